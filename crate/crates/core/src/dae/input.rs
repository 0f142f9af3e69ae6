//! Inputs modelled as solutions of an affine ODE `∂(u, z) = D·(u, z) + d`.

use crate::error::{Error, Result};
use crate::numerics::Matrix;

/// One sinusoidal component `β·sin(ω t + γ)` of a Fourier input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierTerm {
    pub beta: f64,
    pub omega: f64,
    pub gamma: f64,
}

impl FourierTerm {
    pub fn new(beta: f64, omega: f64, gamma: f64) -> Self {
        FourierTerm { beta, omega, gamma }
    }
}

/// Affine input dynamics over `m` inputs `u` and `k` auxiliary states `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct InputModel {
    d: Matrix,
    offset: Vec<f64>,
    u0: Vec<f64>,
    z0: Vec<f64>,
    input_names: Vec<String>,
    aux_names: Vec<String>,
}

impl InputModel {
    pub fn new(
        d: Matrix,
        offset: Vec<f64>,
        u0: Vec<f64>,
        z0: Vec<f64>,
        input_names: Vec<String>,
        aux_names: Vec<String>,
    ) -> Result<Self> {
        let dim = u0.len() + z0.len();
        if d.rows() != dim || d.cols() != dim || offset.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "input model D is {}x{}, d has {} entries, state has {dim}",
                d.rows(),
                d.cols(),
                offset.len()
            )));
        }
        if input_names.len() != u0.len() || aux_names.len() != z0.len() {
            return Err(Error::DimensionMismatch(
                "input/aux name count does not match initial values".into(),
            ));
        }
        if !d.is_finite() || offset.iter().chain(&u0).chain(&z0).any(|v| !v.is_finite()) {
            return Err(Error::Validation("non-finite input model entry".into()));
        }
        Ok(InputModel {
            d,
            offset,
            u0,
            z0,
            input_names,
            aux_names,
        })
    }

    /// Constant inputs: `D = 0`, `d = 0`, no auxiliary states.
    pub fn constant(names: Vec<String>, values: Vec<f64>) -> Result<Self> {
        let m = values.len();
        InputModel::new(
            Matrix::zeros(m, m),
            vec![0.0; m],
            values,
            Vec::new(),
            names,
            Vec::new(),
        )
    }

    /// Block-diagonal combination; inputs of all models come first, then
    /// all auxiliary states, each group in model order.
    pub fn stack(models: &[InputModel]) -> Result<Self> {
        let m: usize = models.iter().map(InputModel::m).sum();
        let k: usize = models.iter().map(InputModel::k).sum();
        let dim = m + k;
        let mut d = Matrix::zeros(dim, dim);
        let mut offset = vec![0.0; dim];
        let mut u0 = Vec::with_capacity(m);
        let mut z0 = Vec::with_capacity(k);
        let mut input_names = Vec::with_capacity(m);
        let mut aux_names = Vec::with_capacity(k);

        // Global index of each local state, per model.
        let mut u_at = 0;
        let mut z_at = m;
        for model in models {
            let local: Vec<usize> = (0..model.m())
                .map(|i| u_at + i)
                .chain((0..model.k()).map(|i| z_at + i))
                .collect();
            for (li, &gi) in local.iter().enumerate() {
                offset[gi] = model.offset[li];
                for (lj, &gj) in local.iter().enumerate() {
                    d[(gi, gj)] = model.d[(li, lj)];
                }
            }
            u_at += model.m();
            z_at += model.k();
            u0.extend_from_slice(&model.u0);
            z0.extend_from_slice(&model.z0);
            input_names.extend(model.input_names.iter().cloned());
            aux_names.extend(model.aux_names.iter().cloned());
        }
        InputModel::new(d, offset, u0, z0, input_names, aux_names)
    }

    pub fn m(&self) -> usize {
        self.u0.len()
    }

    pub fn k(&self) -> usize {
        self.z0.len()
    }

    pub fn dim(&self) -> usize {
        self.m() + self.k()
    }

    pub fn d(&self) -> &Matrix {
        &self.d
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    pub fn u0(&self) -> &[f64] {
        &self.u0
    }

    pub fn z0(&self) -> &[f64] {
        &self.z0
    }

    pub fn input_names(&self) -> &[String] {
        &self.input_names
    }

    pub fn aux_names(&self) -> &[String] {
        &self.aux_names
    }

    /// `(u(0), z(0))` stacked.
    pub fn initial(&self) -> Vec<f64> {
        self.u0.iter().chain(&self.z0).copied().collect()
    }

    /// Names of `(u, z)` stacked.
    pub fn state_names(&self) -> Vec<String> {
        self.input_names
            .iter()
            .chain(&self.aux_names)
            .cloned()
            .collect()
    }

    /// Same dynamics with every initial value multiplied by `c`.
    pub fn scaled(&self, c: f64) -> InputModel {
        let mut out = self.clone();
        out.u0
            .iter_mut()
            .chain(out.z0.iter_mut())
            .for_each(|v| *v *= c);
        out.offset.iter_mut().for_each(|v| *v *= c);
        out
    }
}

/// Input `u(t) = α + Σ β_i sin(ω_i t + γ_i)` as the linear system
/// `∂u = Σ β_i ω_i z̄_i`, `∂z_i = ω_i z̄_i`, `∂z̄_i = −ω_i z_i`.
///
/// Auxiliary states are named `<name>_s<i>` (`z_i`) and `<name>_c<i>` (`z̄_i`).
pub fn fourier_input(name: &str, alpha: f64, terms: &[FourierTerm]) -> Result<InputModel> {
    if let Some(t) = terms.iter().find(|t| !(t.omega > 0.0)) {
        return Err(Error::Validation(format!(
            "Fourier frequency must be positive, got {}",
            t.omega
        )));
    }
    let dim = 1 + 2 * terms.len();
    let mut d = Matrix::zeros(dim, dim);
    let mut z0 = Vec::with_capacity(2 * terms.len());
    let mut aux_names = Vec::with_capacity(2 * terms.len());
    let mut u0 = alpha;
    for (i, t) in terms.iter().enumerate() {
        let s = 1 + 2 * i;
        let c = s + 1;
        d[(0, c)] = t.beta * t.omega;
        d[(s, c)] = t.omega;
        d[(c, s)] = -t.omega;
        z0.push(t.gamma.sin());
        z0.push(t.gamma.cos());
        aux_names.push(format!("{name}_s{}", i + 1));
        aux_names.push(format!("{name}_c{}", i + 1));
        u0 += t.beta * t.gamma.sin();
    }
    InputModel::new(
        d,
        vec![0.0; dim],
        vec![u0],
        z0,
        vec![name.to_string()],
        aux_names,
    )
}

/// Truncated Fourier series of a ±`amplitude` square wave with fundamental
/// `omega0`, using the odd harmonics up to `max_harmonic`.
pub fn square_wave_terms(amplitude: f64, omega0: f64, max_harmonic: usize) -> Vec<FourierTerm> {
    (1..=max_harmonic)
        .step_by(2)
        .map(|j| {
            FourierTerm::new(
                4.0 * amplitude / (j as f64 * std::f64::consts::PI),
                j as f64 * omega0,
                0.0,
            )
        })
        .collect()
}
