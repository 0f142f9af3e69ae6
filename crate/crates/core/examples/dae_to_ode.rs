//! The backward-Euler slope turns the singular high-pass DAE into an ODE
//! whose solution approaches the DAE's as h shrinks.

use circ2crn::circuit::{build_dae, fixtures};
use circ2crn::dae::{backward_euler_map, ReferenceSolver};
use circ2crn::sim::integrate;

fn main() -> Result<(), circ2crn::Error> {
    let (dae, input) = build_dae(&fixtures::high_pass())?;
    println!("E = {:?}\nA = {:?}\nB = {:?}", dae.e(), dae.a(), dae.b());
    let b = dae.forcing(input.u0())?;
    let x0 = [1.0, 0.0];
    let reference = ReferenceSolver::new(1e-5)
        .record_every(1000)
        .solve(&dae, &input, &x0, 5.0)?
        .trajectory;
    let exact = reference.last().map(|(_, row)| row[1]).unwrap_or_default();
    println!("h,i_l1(5),error");
    for h in [0.1, 0.05, 0.02, 0.01, 0.005] {
        let ode = backward_euler_map(&dae, &b, h)?;
        let traj = integrate(&ode, &x0, 5.0, h / 20.0)?;
        let i = traj.last().map(|(_, row)| row[1]).unwrap_or_default();
        println!("{h},{i:.6},{:.2e}", (i - exact).abs());
    }
    Ok(())
}
