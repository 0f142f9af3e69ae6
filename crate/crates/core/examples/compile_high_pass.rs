//! Compile the RL high-pass into a reaction network and print it.

use circ2crn::circuit::fixtures;
use circ2crn::crn::serialize_crn;
use circ2crn::pipeline::{compile_netlist, PipelineConfig};

fn main() -> Result<(), circ2crn::Error> {
    let compiled = compile_netlist(&fixtures::high_pass(), &PipelineConfig::default())?;
    for w in &compiled.warnings {
        eprintln!("warning: {w}");
    }
    println!("states: {:?}", compiled.circuit_names());
    println!(
        "{} circuit reactions, {} input reactions",
        compiled.circuit_crn.reactions.len(),
        compiled.input_crn.reactions.len()
    );
    print!("{}", serialize_crn(&compiled.crn));
    Ok(())
}
