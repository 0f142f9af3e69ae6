//! Backward-Euler reference solver on the stacked pencil of a DAE and its
//! input dynamics.

use super::{consistent_project, DaeSystem, InputModel};
use crate::error::{Error, Result, Warning};
use crate::numerics::{Lu, Matrix};
use crate::trajectory::Trajectory;

const BLOW_UP: f64 = 1e12;
const PROJECTION_STEP: f64 = 1e-6;

/// Result of a reference run.
#[derive(Debug, Clone)]
pub struct ReferenceRun {
    /// Columns: DAE states, then input states `(u, z)`.
    pub trajectory: Trajectory,
    pub warnings: Vec<Warning>,
}

/// Fixed-step backward Euler on
/// `diag(E, I) ∂(x, w) = [[A, [B 0]], [0, D]] (x, w) + (0, d)`.
#[derive(Debug, Clone, Copy)]
pub struct ReferenceSolver {
    h: f64,
    stride: usize,
}

impl ReferenceSolver {
    pub fn new(h: f64) -> Self {
        ReferenceSolver { h, stride: 1 }
    }

    /// Record only every `stride`-th step (the final step is always kept).
    pub fn record_every(mut self, stride: usize) -> Self {
        self.stride = stride.max(1);
        self
    }

    pub fn solve(
        &self,
        sys: &DaeSystem,
        inp: &InputModel,
        x0: &[f64],
        t_end: f64,
    ) -> Result<ReferenceRun> {
        let h = self.h;
        if !(h > 0.0) || !(t_end > 0.0) {
            return Err(Error::Config(format!(
                "reference solve needs h > 0 and T > 0 (h = {h}, T = {t_end})"
            )));
        }
        if sys.input_names() != inp.input_names() {
            return Err(Error::DimensionMismatch(
                "DAE inputs do not match input model".into(),
            ));
        }
        if x0.len() != sys.n() {
            return Err(Error::DimensionMismatch(format!(
                "initial state of length {} for {} states",
                x0.len(),
                sys.n()
            )));
        }
        let (n, m, q) = (sys.n(), sys.m(), inp.dim());
        let dim = n + q;

        let mut warnings = Vec::new();
        let b0 = sys.forcing(inp.u0())?;
        let (projected, flagged) = consistent_project(sys, &b0, x0, PROJECTION_STEP)?;
        let x_start = if flagged {
            let shift = x0
                .iter()
                .zip(&projected)
                .fold(0.0, |s, (a, b)| f64::max(s, (a - b).abs()));
            warnings.push(Warning::InconsistentInitial { shift });
            projected
        } else {
            x0.to_vec()
        };

        let mut e = Matrix::identity(dim);
        e.set_block(0, 0, sys.e());
        let mut a = Matrix::zeros(dim, dim);
        a.set_block(0, 0, sys.a());
        a.set_block(0, n, sys.b());
        a.set_block(n, n, inp.d());
        let mut forcing = vec![0.0; dim];
        forcing[n..]
            .iter_mut()
            .zip(inp.offset())
            .for_each(|(f, d)| *f = h * d);
        debug_assert_eq!(sys.b().cols(), m);

        let lu = Lu::factor(&e.add_scaled(&a, -h)?)?;

        let mut names: Vec<String> = sys.state_names().to_vec();
        names.extend(inp.state_names());
        let mut traj = Trajectory::new(names);
        let mut state: Vec<f64> = x_start.into_iter().chain(inp.initial()).collect();
        traj.push(0.0, state.clone())?;

        let steps = (t_end / h - 1e-9).ceil().max(1.0) as usize;
        for i in 1..=steps {
            let mut rhs = e.mul_vec(&state)?;
            rhs.iter_mut().zip(&forcing).for_each(|(r, f)| *r += f);
            state = lu.solve(&rhs);
            let t = i as f64 * h;
            if state.iter().any(|v| !v.is_finite() || v.abs() > BLOW_UP) {
                return Err(Error::NonFiniteState { time: t });
            }
            if i % self.stride == 0 || i == steps {
                traj.push(t, state.clone())?;
            }
        }
        Ok(ReferenceRun {
            trajectory: traj,
            warnings,
        })
    }
}

/// Backward-Euler reference trajectory at every step `i·h`.
pub fn reference_solve(
    sys: &DaeSystem,
    inp: &InputModel,
    x0: &[f64],
    t_end: f64,
    h: f64,
) -> Result<Trajectory> {
    Ok(ReferenceSolver::new(h)
        .solve(sys, inp, x0, t_end)?
        .trajectory)
}
