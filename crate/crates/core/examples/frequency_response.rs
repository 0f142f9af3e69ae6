//! Gain and phase of the RL high-pass, measured on the reaction network.

use circ2crn::circuit::fixtures;
use circ2crn::driver::{freq, freq_csv, RunConfig};

fn main() -> Result<(), circ2crn::Error> {
    let omegas = [0.1, 0.3, 1.0, 3.0, 10.0];
    let points = freq(fixtures::HIGH_PASS, &omegas, &RunConfig::default())?;
    print!("{}", freq_csv(&points));
    for p in &points {
        let analytic = p.omega / (1.0 + p.omega * p.omega).sqrt();
        eprintln!(
            "omega {}: gain {:.4}, analytic {analytic:.4}",
            p.omega, p.gain
        );
    }
    Ok(())
}
