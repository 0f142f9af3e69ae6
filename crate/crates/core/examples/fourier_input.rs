//! A truncated Fourier series generated by linear oscillator states, checked
//! against the trigonometric sum.

use circ2crn::dae::{fourier_input, square_wave_terms};
use circ2crn::field::FnField;
use circ2crn::sim::integrate;

fn main() -> Result<(), circ2crn::Error> {
    let omega0 = std::f64::consts::TAU / 10.0;
    let terms = square_wave_terms(1.0, omega0, 7);
    let input = fourier_input("u", 0.0, &terms)?;
    let d = input.d().clone();
    let field = FnField::new(input.state_names(), move |x: &[f64], dx: &mut [f64]| {
        let y = d.mul_vec(x).expect("square system");
        dx.copy_from_slice(&y);
    });
    let traj = integrate(&field, &input.initial(), 20.0, 1e-3)?;
    let u = traj.column("u")?;
    let mut worst: f64 = 0.0;
    for (&t, &v) in traj.times().iter().zip(&u) {
        let sum: f64 = terms
            .iter()
            .map(|f| f.beta * (f.omega * t + f.gamma).sin())
            .sum();
        worst = worst.max((v - sum).abs());
    }
    println!(
        "{} oscillator states, max deviation from the sum {worst:.2e}",
        input.dim()
    );
    for t in [1.25, 2.5, 5.0, 7.5] {
        let k = traj.times().partition_point(|&s| s < t);
        println!("u({t}) = {:.4}", u[k]);
    }
    Ok(())
}
