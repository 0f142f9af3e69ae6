//! Fixed-step integration and trajectory analytics.

mod study;

pub use study::{convergence_study, study_csv, StudyRow};

use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::numerics::{solve_linear, Matrix};
use crate::trajectory::Trajectory;

/// States beyond this magnitude abort integration.
pub const BLOW_UP: f64 = 1e12;

/// Classical RK4 from `x0` to `t_end` with step `dt`, recording every step.
pub fn integrate<F: VectorField + ?Sized>(
    field: &F,
    x0: &[f64],
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    integrate_every(field, x0, t_end, dt, 1)
}

/// RK4 recording every `stride`-th step; the initial and final states are
/// always recorded. Times are `i·dt` for `i = 0..=⌈t_end/dt⌉`.
pub fn integrate_every<F: VectorField + ?Sized>(
    field: &F,
    x0: &[f64],
    t_end: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) || !(t_end >= dt) {
        return Err(Error::Config(format!(
            "integration needs dt > 0 and T >= dt (dt = {dt}, T = {t_end})"
        )));
    }
    let n = field.dim();
    if x0.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "initial state of length {} for a field of dimension {n}",
            x0.len()
        )));
    }
    let stride = stride.max(1);
    let steps = (t_end / dt - 1e-9).ceil() as usize;
    let mut traj = Trajectory::new(field.names().to_vec());
    traj.push(0.0, x0.to_vec())?;

    let mut x = x0.to_vec();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];
    for i in 1..=steps {
        field.eval(&x, &mut k1);
        for j in 0..n {
            tmp[j] = x[j] + 0.5 * dt * k1[j];
        }
        field.eval(&tmp, &mut k2);
        for j in 0..n {
            tmp[j] = x[j] + 0.5 * dt * k2[j];
        }
        field.eval(&tmp, &mut k3);
        for j in 0..n {
            tmp[j] = x[j] + dt * k3[j];
        }
        field.eval(&tmp, &mut k4);
        let t = i as f64 * dt;
        for j in 0..n {
            x[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            if !x[j].is_finite() || x[j].abs() > BLOW_UP {
                return Err(Error::NonFiniteState { time: t });
            }
        }
        if i % stride == 0 || i == steps {
            traj.push(t, x.clone())?;
        }
    }
    Ok(traj)
}

/// Columns `out = plus − minus` for each `(plus, minus, out)`.
pub fn recover_difference(traj: &Trajectory, pairs: &[(&str, &str, &str)]) -> Result<Trajectory> {
    let idx: Vec<(usize, usize)> = pairs
        .iter()
        .map(|(p, m, _)| Ok((traj.column_index(p)?, traj.column_index(m)?)))
        .collect::<Result<_>>()?;
    let mut out = Trajectory::new(pairs.iter().map(|(_, _, o)| o.to_string()).collect());
    for (t, row) in traj.rows() {
        out.push(t, idx.iter().map(|&(p, m)| row[p] - row[m]).collect())?;
    }
    Ok(out)
}

/// `max_t max_c |a_c(t) − b_c(t)|` over the times of `a` inside the common
/// time range, with `b` linearly interpolated onto those times.
pub fn sup_error(a: &Trajectory, b: &Trajectory, columns: &[&str]) -> Result<f64> {
    let ja: Vec<usize> = columns
        .iter()
        .map(|c| a.column_index(c))
        .collect::<Result<_>>()?;
    let jb: Vec<usize> = columns
        .iter()
        .map(|c| b.column_index(c))
        .collect::<Result<_>>()?;
    if a.is_empty() || b.is_empty() {
        return Ok(0.0);
    }
    let lo = a.times()[0].max(b.times()[0]);
    let hi = a.times()[a.len() - 1].min(b.times()[b.len() - 1]);
    let tol = 1e-9 * (1.0 + hi.abs());
    let mut worst: f64 = 0.0;
    for (t, row) in a.rows() {
        if t < lo - tol || t > hi + tol {
            continue;
        }
        for (&ca, &cb) in ja.iter().zip(&jb) {
            worst = worst.max((row[ca] - b.interpolate(cb, t)).abs());
        }
    }
    Ok(worst)
}

/// Least-squares fit `a·sin(ωt) + b·cos(ωt) + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    /// `√(a² + b²)`.
    pub amplitude: f64,
    /// `atan2(b, a)`, so the fit reads `amplitude·sin(ωt + phase) + offset`.
    pub phase: f64,
    pub offset: f64,
    /// Root-mean-square fit error over the window.
    pub residual: f64,
}

pub fn fit_sinusoid(
    traj: &Trajectory,
    column: &str,
    omega: f64,
    window: (f64, f64),
) -> Result<FitResult> {
    let j = traj.column_index(column)?;
    let (start, end) = window;
    let min_len = 2.0 * std::f64::consts::TAU / omega;
    if !(omega > 0.0) || end - start < min_len * (1.0 - 1e-9) {
        return Err(Error::WindowTooShort {
            start,
            end,
            min_len,
        });
    }
    let samples: Vec<(f64, f64)> = traj
        .rows()
        .filter(|(t, _)| *t >= start - 1e-12 && *t <= end + 1e-12)
        .map(|(t, row)| (t, row[j]))
        .collect();
    if samples.len() < 3 {
        return Err(Error::WindowTooShort {
            start,
            end,
            min_len,
        });
    }
    let mut normal = Matrix::zeros(3, 3);
    let mut rhs = vec![0.0; 3];
    for &(t, y) in &samples {
        let basis = [(omega * t).sin(), (omega * t).cos(), 1.0];
        for r in 0..3 {
            rhs[r] += basis[r] * y;
            for c in 0..3 {
                normal[(r, c)] += basis[r] * basis[c];
            }
        }
    }
    let coef = solve_linear(&normal, &rhs)?;
    let sq: f64 = samples
        .iter()
        .map(|&(t, y)| {
            let fit = coef[0] * (omega * t).sin() + coef[1] * (omega * t).cos() + coef[2];
            (y - fit).powi(2)
        })
        .sum();
    Ok(FitResult {
        amplitude: coef[0].hypot(coef[1]),
        phase: coef[1].atan2(coef[0]),
        offset: coef[2],
        residual: (sq / samples.len() as f64).sqrt(),
    })
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut y = x % tau;
    if y <= -std::f64::consts::PI {
        y += tau;
    } else if y > std::f64::consts::PI {
        y -= tau;
    }
    y
}
