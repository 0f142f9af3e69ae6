//! Square-wave input through the RL high-pass: the output spikes at each
//! step and settles back to zero while the input holds its level.
//!
//! `cargo run --release --example perfect_adaptation [period] [h]`

use circ2crn::circuit::{fixtures, Waveform};
use circ2crn::dae::square_wave_terms;
use circ2crn::pipeline::{compile_netlist, PipelineConfig};

fn arg(n: usize, default: f64) -> f64 {
    std::env::args()
        .nth(n)
        .and_then(|s| s.parse().ok())
        .unwrap_or(default)
}

fn main() -> Result<(), circ2crn::Error> {
    let period = arg(1, 14.0);
    // Smaller h keeps the input oscillators from smoothing the edges.
    let h = arg(2, 1e-3);
    let wave = Waveform::Fourier {
        alpha: 0.0,
        terms: square_wave_terms(1.0, std::f64::consts::TAU / period, 7),
    };
    let net = fixtures::high_pass().with_waveform("vin", wave)?;
    let compiled = compile_netlist(&net, &PipelineConfig::default().with_h(h))?;
    let t_end = 3.0 * period;
    let traj = compiled.simulate(t_end, compiled.default_dt(), 100)?;
    let vout = traj.column("v2")?;

    let half = period / 2.0;
    println!("step_at,peak,max_after_5");
    let mut k = 1;
    while (k + 1) as f64 * half <= t_end + 1e-9 {
        let jump = k as f64 * half;
        let mut peak: f64 = 0.0;
        let mut settled: f64 = 0.0;
        for (&t, &v) in traj.times().iter().zip(&vout) {
            if (jump - 1.0..jump + 5.0).contains(&t) && v.abs() > peak.abs() {
                peak = v;
            }
            if (jump + 5.0..jump + half - 1.0).contains(&t) {
                settled = settled.max(v.abs());
            }
        }
        println!("{jump},{peak:.4},{settled:.4}");
        k += 1;
    }
    Ok(())
}
