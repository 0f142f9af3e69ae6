//! Error of the compiled CRN against the reference solver as `h` shrinks.

use super::sup_error;
use crate::dae::{DaeSystem, InputModel};
use crate::error::{Error, Result};
use crate::pipeline::{compile_dae, PipelineConfig};
use crate::trajectory::Trajectory;

/// Upper bound on recorded reference points.
const REFERENCE_POINTS: f64 = 1e5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyRow {
    pub h: f64,
    pub sup_error: f64,
}

/// Runs the full pipeline for each `h` and measures the sup-norm error of
/// the recovered circuit variables on `[0, t_end]` against the reference
/// solver at `h_ref` (default `min(hs)/100`). Rows follow the order of `hs`.
pub fn convergence_study(
    dae: &DaeSystem,
    input: &InputModel,
    hs: &[f64],
    t_end: f64,
    cfg: &PipelineConfig,
    h_ref: Option<f64>,
) -> Result<Vec<StudyRow>> {
    if hs.is_empty() || hs.iter().any(|&h| !(h > 0.0)) {
        return Err(Error::Config("study needs positive step sizes".into()));
    }
    let h_min = hs.iter().copied().fold(f64::INFINITY, f64::min);
    let h_ref = h_ref.unwrap_or(h_min / 100.0);

    let first = compile_dae(dae, input, None, &cfg.with_h(hs[0]))?;
    let stride = ((t_end / h_ref) / REFERENCE_POINTS).ceil().max(1.0) as usize;
    let reference = first.reference(t_end, h_ref, stride)?;
    let names: Vec<String> = first.ode.circuit_names().to_vec();

    let run = |h: f64| -> Result<StudyRow> {
        let compiled = compile_dae(dae, input, None, &cfg.with_h(h))?;
        let traj: Trajectory = compiled.simulate(t_end, compiled.default_dt(), 1)?;
        let cols: Vec<&str> = names.iter().map(String::as_str).collect();
        Ok(StudyRow {
            h,
            sup_error: sup_error(&traj, &reference, &cols)?,
        })
    };
    std::thread::scope(|s| {
        let handles: Vec<_> = hs.iter().map(|&h| s.spawn(move || run(h))).collect();
        handles
            .into_iter()
            .map(|hd| hd.join().expect("study worker panicked"))
            .collect()
    })
}

/// CSV `h,sup_error`.
pub fn study_csv(rows: &[StudyRow]) -> String {
    let mut out = String::from("h,sup_error\n");
    for r in rows {
        out.push_str(&format!(
            "{},{}\n",
            crate::num_fmt::format_f64(r.h),
            crate::num_fmt::format_f64(r.sup_error)
        ));
    }
    out
}
