//! Linear circuits: netlist parsing and compilation to DAEs.

mod mna;
mod netlist;

pub use mna::{
    build_dae, current_name, input_model, reduce_voltage_sources, stamp, voltage_name, Stamps,
    DIFFERENTIAL_OUTPUT,
};
pub use netlist::{
    parse_netlist, Component, ComponentKind, ComponentValue, Netlist, Waveform, GROUND,
};

/// Bundled example circuits.
pub mod fixtures {
    use super::{parse_netlist, Netlist};

    pub const HIGH_PASS: &str = include_str!("../../netlists/high_pass.net");
    pub const HIGH_PASS_SINE: &str = include_str!("../../netlists/high_pass_sine.net");
    pub const LOW_PASS: &str = include_str!("../../netlists/low_pass.net");
    pub const TWO_CAPACITOR: &str = include_str!("../../netlists/two_capacitor.net");
    pub const DIVIDER: &str = include_str!("../../netlists/divider.net");
    pub const PARALLEL_SOURCES: &str = include_str!("../../netlists/parallel_sources.net");

    fn load(text: &str) -> Netlist {
        parse_netlist(text).expect("bundled netlist parses")
    }

    pub fn high_pass() -> Netlist {
        load(HIGH_PASS)
    }

    pub fn high_pass_sine() -> Netlist {
        load(HIGH_PASS_SINE)
    }

    pub fn low_pass() -> Netlist {
        load(LOW_PASS)
    }

    pub fn two_capacitor() -> Netlist {
        load(TWO_CAPACITOR)
    }

    pub fn divider() -> Netlist {
        load(DIVIDER)
    }

    pub fn parallel_sources() -> Netlist {
        load(PARALLEL_SOURCES)
    }

    /// The three dynamic fixtures: RL high-pass, RC low-pass, two capacitors.
    pub fn dynamic() -> Vec<(&'static str, Netlist)> {
        vec![
            ("high_pass", high_pass()),
            ("low_pass", low_pass()),
            ("two_capacitor", two_capacitor()),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_round_trip() {
        for text in [
            fixtures::HIGH_PASS,
            fixtures::HIGH_PASS_SINE,
            fixtures::LOW_PASS,
            fixtures::TWO_CAPACITOR,
            fixtures::DIVIDER,
            fixtures::PARALLEL_SOURCES,
        ] {
            let net = parse_netlist(text).unwrap();
            assert_eq!(parse_netlist(&net.serialize()).unwrap(), net);
        }
    }
}
