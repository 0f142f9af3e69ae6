//! Sup-norm error of the compiled network against the reference solver for
//! shrinking h.

use circ2crn::circuit::{build_dae, fixtures};
use circ2crn::pipeline::PipelineConfig;
use circ2crn::sim::{convergence_study, study_csv};

fn main() -> Result<(), circ2crn::Error> {
    let (dae, input) = build_dae(&fixtures::high_pass())?;
    let hs = [0.08, 0.04, 0.02, 0.01];
    let rows = convergence_study(
        &dae,
        &input,
        &hs,
        10.0,
        &PipelineConfig::default(),
        Some(1e-5),
    )?;
    print!("{}", study_csv(&rows));
    for w in rows.windows(2) {
        eprintln!(
            "h {} -> {}: ratio {:.2}",
            w[0].h,
            w[1].h,
            w[0].sup_error / w[1].sup_error
        );
    }
    Ok(())
}
