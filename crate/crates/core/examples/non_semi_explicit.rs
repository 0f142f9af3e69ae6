//! Current source into two capacitors and a resistor: both equations carry
//! two derivatives, so the system is not semi-explicit.

use circ2crn::circuit::fixtures;
use circ2crn::pipeline::{compile_netlist, PipelineConfig, Scheme};
use circ2crn::sim::sup_error;

fn main() -> Result<(), circ2crn::Error> {
    let net = fixtures::two_capacitor();
    for scheme in [Scheme::BackwardEuler, Scheme::Direct] {
        let c = compile_netlist(&net, &PipelineConfig::default().with_scheme(scheme))?;
        let traj = c.simulate(10.0, c.default_dt(), 1)?;
        let reference = c.reference(10.0, 1e-4, 1)?;
        let err = sup_error(&traj, &reference, &c.circuit_names())?;
        let (t, row) = traj.last().expect("nonempty run");
        println!(
            "{scheme:?}: {} reactions, v1({t}) = {:.4}, v2({t}) = {:.4}, sup error {err:.2e}",
            c.crn.reactions.len(),
            row[traj.column_index("v1")?],
            row[traj.column_index("v2")?]
        );
    }
    Ok(())
}
