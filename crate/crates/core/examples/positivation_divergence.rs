//! Without annihilation the rails grow exponentially while their
//! difference stays bounded; with gamma = 1/h they stay small.

use circ2crn::circuit::fixtures;
use circ2crn::pipeline::{compile_netlist, PipelineConfig};
use circ2crn::Error;

fn main() -> Result<(), Error> {
    let net = fixtures::high_pass();
    let damped = compile_netlist(&net, &PipelineConfig::default())?;
    let species = damped.simulate_species(100.0, damped.default_dt(), 1000)?;
    println!(
        "gamma = 1/h: largest rail on [0, 100] is {:.4}",
        species.max_abs()
    );

    let free = compile_netlist(&net, &PipelineConfig::default().with_gamma(0.0))?;
    match free.simulate_species(20.0, free.default_dt(), 1000) {
        Err(Error::NonFiniteState { time }) => {
            println!("gamma = 0: rails passed the blow-up threshold at t = {time:.3}")
        }
        Ok(traj) => println!("gamma = 0: largest rail {:.3e}", traj.max_abs()),
        Err(e) => return Err(e),
    }
    let diff = free.simulate(0.2, free.default_dt(), 100)?;
    let species = free.simulate_species(0.2, free.default_dt(), 100)?;
    println!(
        "gamma = 0 on [0, 0.2]: largest rail {:.3e}, largest difference {:.4}",
        species.max_abs(),
        diff.max_abs()
    );
    Ok(())
}
