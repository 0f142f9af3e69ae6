//! Dual-rail encoding of affine ODEs.
//!
//! A signed state `x` is carried by two nonnegative rails with `x = x⁺ − x⁻`.
//! With the sign split `Â = Â⁺ − Â⁻`, `b̂ = b̂⁺ − b̂⁻` the rails obey
//!
//! ```text
//! ∂x⁺ = Â⁺x⁺ + Â⁻x⁻ + b̂⁺ − γ x⁺∘x⁻
//! ∂x⁻ = Â⁻x⁺ + Â⁺x⁻ + b̂⁻ − γ x⁺∘x⁻
//! ```
//!
//! and the annihilation term cancels in the difference.

use crate::dae::AffineOde;
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::numerics::Matrix;

pub fn plus_name(var: &str) -> String {
    format!("{var}_p")
}

pub fn minus_name(var: &str) -> String {
    format!("{var}_m")
}

/// Nonnegative split `(Â⁺, Â⁻, b̂⁺, b̂⁻)` of an affine ODE.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveQuadruple {
    pub a_plus: Matrix,
    pub a_minus: Matrix,
    pub b_plus: Vec<f64>,
    pub b_minus: Vec<f64>,
    pub state_names: Vec<String>,
    /// States from this index on are exogenous (zero rows).
    pub driven: usize,
}

impl PositiveQuadruple {
    pub fn len(&self) -> usize {
        self.state_names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.state_names.is_empty()
    }
}

/// Canonical split `Â⁺ = max(Â, 0)`, `Â⁻ = max(−Â, 0)`, likewise for `b̂`.
pub fn positivate(ode: &AffineOde) -> PositiveQuadruple {
    let a = ode.ahat();
    PositiveQuadruple {
        a_plus: a.map(|v| v.max(0.0)),
        a_minus: a.map(|v| (-v).max(0.0)),
        b_plus: ode.bhat().iter().map(|v| v.max(0.0)).collect(),
        b_minus: ode.bhat().iter().map(|v| (-v).max(0.0)).collect(),
        state_names: ode.state_names().to_vec(),
        driven: ode.driven(),
    }
}

/// Minimal initial split `(max(x, 0), max(−x, 0))`.
pub fn split_initial(x0: &[f64]) -> (Vec<f64>, Vec<f64>) {
    (
        x0.iter().map(|v| v.max(0.0)).collect(),
        x0.iter().map(|v| (-v).max(0.0)).collect(),
    )
}

/// Interleaves two rail vectors as `(x₁⁺, x₁⁻, x₂⁺, x₂⁻, …)`.
pub fn interleave(plus: &[f64], minus: &[f64]) -> Vec<f64> {
    plus.iter().zip(minus).flat_map(|(p, m)| [*p, *m]).collect()
}

/// Rail-interleaved initial state for `x0`.
pub fn rail_initial(x0: &[f64]) -> Vec<f64> {
    let (p, m) = split_initial(x0);
    interleave(&p, &m)
}

/// Dual-rail system with annihilation rate `γ`.
///
/// Evaluates as a [`VectorField`] over interleaved rails.
#[derive(Debug, Clone, PartialEq)]
pub struct HungarizedSystem {
    pub quad: PositiveQuadruple,
    pub gamma: f64,
    pub rail_names: Vec<String>,
}

impl HungarizedSystem {
    pub fn n(&self) -> usize {
        self.quad.len()
    }

    /// `(var, var_p, var_m)` for every state.
    pub fn difference_pairs(&self) -> Vec<(String, String, String)> {
        self.quad
            .state_names
            .iter()
            .map(|s| (s.clone(), plus_name(s), minus_name(s)))
            .collect()
    }

    /// Derivative at `state`, checking its length.
    pub fn eval_checked(&self, state: &[f64]) -> Result<Vec<f64>> {
        if state.len() != 2 * self.n() {
            return Err(Error::DimensionMismatch(format!(
                "rail state of length {} for {} rails",
                state.len(),
                2 * self.n()
            )));
        }
        Ok(self.eval_vec(state))
    }
}

pub fn hungarize(quad: PositiveQuadruple, gamma: f64) -> Result<HungarizedSystem> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::Config(format!(
            "gamma must be finite and >= 0, got {gamma}"
        )));
    }
    let rail_names = quad
        .state_names
        .iter()
        .flat_map(|s| [plus_name(s), minus_name(s)])
        .collect();
    Ok(HungarizedSystem {
        quad,
        gamma,
        rail_names,
    })
}

impl VectorField for HungarizedSystem {
    fn names(&self) -> &[String] {
        &self.rail_names
    }

    fn eval(&self, state: &[f64], deriv: &mut [f64]) {
        let q = &self.quad;
        let n = q.len();
        for i in 0..n {
            let (ap, am) = (q.a_plus.row(i), q.a_minus.row(i));
            let mut dp = q.b_plus[i];
            let mut dm = q.b_minus[i];
            for j in 0..n {
                let (xp, xm) = (state[2 * j], state[2 * j + 1]);
                dp += ap[j] * xp + am[j] * xm;
                dm += am[j] * xp + ap[j] * xm;
            }
            if i < q.driven {
                let annihilation = self.gamma * state[2 * i] * state[2 * i + 1];
                dp -= annihilation;
                dm -= annihilation;
            }
            deriv[2 * i] = dp;
            deriv[2 * i + 1] = dm;
        }
    }
}
