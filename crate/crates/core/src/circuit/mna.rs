//! Modified nodal analysis: netlist → `E ∂x = A x + B u`.
//!
//! Unknowns are the non-ground node voltages `v<node>` followed by the
//! branch currents `i_<name>` of voltage sources and inductors. A voltage
//! source driving a node that carries no capacitor and is not the output
//! is eliminated together with its current, since that node voltage is the
//! input itself; the eliminations are row operations on the pencil and do
//! not change the trajectory of the remaining unknowns.

use std::collections::HashMap;

use super::netlist::{ComponentKind, Netlist, Waveform, GROUND};
use crate::dae::{fourier_input, DaeSystem, InputModel};
use crate::error::{Error, Result};
use crate::numerics::Matrix;

/// Name of the extra algebraic unknown for a differential output.
pub const DIFFERENTIAL_OUTPUT: &str = "v_out";

/// Raw MNA stamps before any elimination.
#[derive(Debug, Clone)]
pub struct Stamps {
    pub e: Matrix,
    pub a: Matrix,
    pub b: Matrix,
    pub state_names: Vec<String>,
    pub input_names: Vec<String>,
    pub output: String,
}

pub fn voltage_name(node: &str) -> String {
    format!("v{node}")
}

pub fn current_name(component: &str) -> String {
    format!("i_{component}")
}

/// Assemble the stamps without eliminating anything.
pub fn stamp(net: &Netlist) -> Result<Stamps> {
    let nodes = net.nodes();
    let mut state_names: Vec<String> = nodes.iter().map(|n| voltage_name(n)).collect();
    let node_index: HashMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let idx = |n: &str| -> Option<usize> {
        if n == GROUND {
            None
        } else {
            Some(node_index[n])
        }
    };
    for c in net.components() {
        if matches!(
            c.kind,
            ComponentKind::VoltageSource | ComponentKind::Inductor
        ) {
            state_names.push(current_name(&c.name));
        }
    }
    let (po, no) = net.output();
    let output = if no == GROUND {
        voltage_name(po)
    } else {
        state_names.push(DIFFERENTIAL_OUTPUT.to_string());
        DIFFERENTIAL_OUTPUT.to_string()
    };
    let input_names: Vec<String> = net.sources().map(|c| c.name.clone()).collect();
    check_unique(&state_names, &input_names)?;

    let n = state_names.len();
    let m = input_names.len();
    let mut e = Matrix::zeros(n, n);
    let mut a = Matrix::zeros(n, n);
    let mut b = Matrix::zeros(n, m);

    // Symmetric two-terminal stamp of `value` into matrix `mat`.
    fn two_terminal(mat: &mut Matrix, p: Option<usize>, q: Option<usize>, value: f64) {
        if let Some(p) = p {
            mat[(p, p)] += value;
        }
        if let Some(q) = q {
            mat[(q, q)] += value;
        }
        if let (Some(p), Some(q)) = (p, q) {
            mat[(p, q)] -= value;
            mat[(q, p)] -= value;
        }
    }

    let mut branch = nodes.len();
    let mut source = 0;
    for c in net.components() {
        let p = idx(&c.nodes.0);
        let q = idx(&c.nodes.1);
        match c.kind {
            ComponentKind::Resistor => {
                two_terminal(&mut a, p, q, -1.0 / c.passive_value().unwrap_or(1.0));
            }
            ComponentKind::Capacitor => {
                two_terminal(&mut e, p, q, c.passive_value().unwrap_or(1.0));
            }
            ComponentKind::Inductor => {
                let k = branch;
                branch += 1;
                if let Some(p) = p {
                    a[(p, k)] -= 1.0;
                    a[(k, p)] += 1.0;
                }
                if let Some(q) = q {
                    a[(q, k)] += 1.0;
                    a[(k, q)] -= 1.0;
                }
                e[(k, k)] = c.passive_value().unwrap_or(1.0);
            }
            ComponentKind::VoltageSource => {
                let k = branch;
                branch += 1;
                if let Some(p) = p {
                    a[(p, k)] -= 1.0;
                    a[(k, p)] += 1.0;
                }
                if let Some(q) = q {
                    a[(q, k)] += 1.0;
                    a[(k, q)] -= 1.0;
                }
                b[(k, source)] = -1.0;
                source += 1;
            }
            ComponentKind::CurrentSource => {
                // Current flows from node+ through the source into node-.
                if let Some(p) = p {
                    b[(p, source)] -= 1.0;
                }
                if let Some(q) = q {
                    b[(q, source)] += 1.0;
                }
                source += 1;
            }
        }
    }
    if no != GROUND {
        let k = n - 1;
        a[(k, k)] = -1.0;
        if let Some(p) = idx(po) {
            a[(k, p)] += 1.0;
        }
        if let Some(q) = idx(no) {
            a[(k, q)] -= 1.0;
        }
    }

    for r in 0..n {
        if e.row(r).iter().all(|&v| v == 0.0) && a.row(r).iter().all(|&v| v == 0.0) {
            return Err(Error::Validation(format!(
                "equation for {} is identically zero",
                state_names[r]
            )));
        }
    }

    Ok(Stamps {
        e,
        a,
        b,
        state_names,
        input_names,
        output,
    })
}

fn check_unique(states: &[String], inputs: &[String]) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for name in states.iter().chain(inputs) {
        if !seen.insert(name.as_str()) {
            return Err(Error::Validation(format!(
                "derived variable name {name} is ambiguous; rename a node or source"
            )));
        }
    }
    Ok(())
}

/// Gaussian elimination of unknown `col` using equation `row` as pivot.
/// Requires `E[:, col] = 0`, so the eliminated unknown is defined
/// algebraically by the pivot equation alone.
fn eliminate(st: &mut Stamps, row: usize, col: usize) {
    let n = st.state_names.len();
    let pivot = st.a[(row, col)];
    debug_assert!(pivot != 0.0 && (0..n).all(|r| st.e[(r, col)] == 0.0));
    for r in 0..n {
        if r == row || st.a[(r, col)] == 0.0 {
            continue;
        }
        let f = st.a[(r, col)] / pivot;
        for j in 0..n {
            let (ev, av) = (st.e[(row, j)], st.a[(row, j)]);
            st.e[(r, j)] -= f * ev;
            st.a[(r, j)] -= f * av;
        }
        for j in 0..st.b.cols() {
            let bv = st.b[(row, j)];
            st.b[(r, j)] -= f * bv;
        }
        st.a[(r, col)] = 0.0;
    }
    st.e = st.e.without(Some(row), Some(col));
    st.a = st.a.without(Some(row), Some(col));
    st.b = st.b.without(Some(row), None);
    st.state_names.remove(col);
}

fn column_is_zero(m: &Matrix, col: usize) -> bool {
    (0..m.rows()).all(|r| m[(r, col)] == 0.0)
}

/// Eliminate every voltage source whose driven node is not the output and
/// carries no capacitor: first its current (pivot on the node's KCL row),
/// then the node voltage (pivot on the source's branch row).
///
/// Rows are kept aligned with unknowns: row `k` is the equation that was
/// stamped for unknown `k` (KCL for node voltages, branch law for currents).
pub fn reduce_voltage_sources(mut st: Stamps, net: &Netlist) -> Stamps {
    for c in net.sources() {
        if c.kind != ComponentKind::VoltageSource {
            continue;
        }
        let (p, q) = (&c.nodes.0, &c.nodes.1);
        let pos = |st: &Stamps, name: &str| st.state_names.iter().position(|s| s == name);
        let candidates = [p, q].into_iter().filter(|n| *n != GROUND);
        let current = current_name(&c.name);
        let mut chosen = None;
        for node in candidates {
            let vname = voltage_name(node);
            if vname == st.output {
                continue;
            }
            if let Some(k) = pos(&st, &vname) {
                if column_is_zero(&st.e, k) {
                    chosen = Some(vname);
                    break;
                }
            }
        }
        let Some(vname) = chosen else { continue };
        let (Some(kv), Some(ki)) = (pos(&st, &vname), pos(&st, &current)) else {
            continue;
        };
        if st.a[(kv, ki)] == 0.0 {
            continue;
        }
        eliminate_pair(&mut st, kv, ki);
    }
    st
}

/// Removes KCL row `kv` with current column `ki`, then branch row (formerly
/// `ki`) with voltage column (formerly `kv`).
fn eliminate_pair(st: &mut Stamps, kv: usize, ki: usize) {
    eliminate(st, kv, ki);
    // After removing row kv and column ki the indices shift.
    let branch_row = if ki > kv { ki - 1 } else { ki };
    let voltage_col = if kv > ki { kv - 1 } else { kv };
    if st.a[(branch_row, voltage_col)] == 0.0 || !column_is_zero(&st.e, voltage_col) {
        return;
    }
    eliminate(st, branch_row, voltage_col);
}

/// Compile a netlist into its DAE and the input model of its sources.
pub fn build_dae(net: &Netlist) -> Result<(DaeSystem, InputModel)> {
    let reduced = reduce_voltage_sources(stamp(net)?, net);
    let output_index = reduced
        .state_names
        .iter()
        .position(|s| *s == reduced.output)
        .expect("output unknown is never eliminated");
    let sys = DaeSystem::new(
        reduced.e,
        reduced.a,
        reduced.b,
        reduced.state_names,
        reduced.input_names,
        output_index,
    )?;
    Ok((sys, input_model(net)?))
}

/// Input model of all sources, stacked in netlist order.
pub fn input_model(net: &Netlist) -> Result<InputModel> {
    let models = net
        .sources()
        .map(|c| match c.waveform() {
            Some(Waveform::Dc(v)) => fourier_input(&c.name, *v, &[]),
            Some(Waveform::Fourier { alpha, terms }) => fourier_input(&c.name, *alpha, terms),
            None => unreachable!("sources carry waveforms"),
        })
        .collect::<Result<Vec<_>>>()?;
    InputModel::stack(&models)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::netlist::parse_netlist;
    use crate::dae::{backward_euler_map, check_regularity, probe_steps, DEFAULT_PROBE_SEED};

    fn compile(text: &str) -> (DaeSystem, InputModel) {
        build_dae(&parse_netlist(text).unwrap()).unwrap()
    }

    /// Slope `F_h` evaluated over named states, for row-equivalence checks.
    fn slope(sys: &DaeSystem, u: &[f64], h: f64, at: &[(&str, f64)]) -> Vec<(String, f64)> {
        let b = sys.forcing(u).unwrap();
        let map = backward_euler_map(sys, &b, h).unwrap();
        let mut x = vec![0.0; sys.n()];
        for (name, v) in at {
            x[sys.state_index(name).unwrap()] = *v;
        }
        sys.state_names()
            .iter()
            .cloned()
            .zip(crate::field::VectorField::eval_vec(&map, &x))
            .collect()
    }

    #[test]
    fn high_pass_is_row_equivalent_to_reference_pencil() {
        let (sys, inp) = compile("V vin 1 0 DC 1\nR r1 1 2 1\nL l1 2 0 1\nOUT 2");
        assert_eq!(sys.state_names(), &["v2", "i_l1"]);
        assert_eq!(sys.output_name(), "v2");
        assert_eq!(inp.input_names(), &["vin"]);

        // Reference over (i, v_out): E = [[1,0],[0,0]], A = [[0,1],[1,1]], B = (0,−1).
        let reference = DaeSystem::new(
            Matrix::from_rows(&[[1.0, 0.0], [0.0, 0.0]]),
            Matrix::from_rows(&[[0.0, 1.0], [1.0, 1.0]]),
            Matrix::from_rows(&[[0.0], [-1.0]]),
            vec!["i_l1".into(), "v2".into()],
            vec!["vin".into()],
            1,
        )
        .unwrap();
        for &h in &[0.01, 0.1] {
            for at in [[("i_l1", 0.3), ("v2", -0.7)], [("i_l1", 2.0), ("v2", 0.0)]] {
                let mut got = slope(&sys, &[1.0], h, &at);
                let mut want = slope(&reference, &[1.0], h, &at);
                got.sort_by(|a, b| a.0.cmp(&b.0));
                want.sort_by(|a, b| a.0.cmp(&b.0));
                for (g, w) in got.iter().zip(&want) {
                    assert_eq!(g.0, w.0);
                    assert!(
                        (g.1 - w.1).abs() <= 1e-9 * (1.0 + w.1.abs()),
                        "{g:?} vs {w:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn divider_is_purely_algebraic() {
        let (sys, inp) = compile("V vin 1 0 DC 1\nR a 1 2 1\nR b 2 0 1\nOUT 2");
        assert_eq!(sys.state_names(), &["v2"]);
        assert_eq!(sys.e(), &Matrix::zeros(1, 1));
        // −2 v2 + vin = 0.
        let x =
            crate::numerics::solve_linear(&sys.a().scaled(-1.0), &sys.forcing(inp.u0()).unwrap())
                .unwrap();
        assert!((x[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn two_capacitor_circuit_matches_its_equations() {
        let (sys, inp) = compile("I is 0 1 DC 1\nC c1 1 0 1\nC c2 1 2 1\nR r1 2 0 1\nOUT 2");
        assert_eq!(sys.state_names(), &["v1", "v2"]);
        assert_eq!(sys.e(), &Matrix::from_rows(&[[2.0, -1.0], [-1.0, 1.0]]));
        assert_eq!(sys.a(), &Matrix::from_rows(&[[0.0, 0.0], [0.0, -1.0]]));
        assert_eq!(sys.forcing(inp.u0()).unwrap(), vec![1.0, 0.0]);
        // Row-equivalent to E = [[2,−1],[1,−1]], A = [[0,0],[0,1]] (second row negated).
        let flipped = Matrix::from_rows(&[[1.0, 0.0], [0.0, -1.0]]);
        assert_eq!(
            flipped.matmul(sys.e()).unwrap(),
            Matrix::from_rows(&[[2.0, -1.0], [1.0, -1.0]])
        );
        assert_eq!(
            flipped.matmul(sys.a()).unwrap(),
            Matrix::from_rows(&[[0.0, 0.0], [0.0, 1.0]])
        );
        assert!(sys.has_invertible_e());
    }

    #[test]
    fn rc_low_pass_reduces_to_one_ode() {
        let (sys, _) = compile("V vin 1 0 DC 1\nR r1 1 2 2\nC c1 2 0 0.5\nOUT 2");
        assert_eq!(sys.state_names(), &["v2"]);
        assert_eq!(sys.e(), &Matrix::from_rows(&[[0.5]]));
        assert_eq!(sys.a(), &Matrix::from_rows(&[[-0.5]]));
        assert_eq!(sys.b(), &Matrix::from_rows(&[[0.5]]));
    }

    #[test]
    fn output_node_keeps_its_source() {
        let (sys, _) = compile("V vin 1 0 DC 1\nR r1 1 0 1\nOUT 1");
        assert_eq!(sys.state_names(), &["v1", "i_vin"]);
        assert!(check_regularity(&sys, &probe_steps(DEFAULT_PROBE_SEED)));
    }

    #[test]
    fn differential_output_adds_algebraic_unknown() {
        let (sys, inp) = compile("V vin 1 0 DC 2\nR a 1 2 1\nR b 2 3 1\nR c 3 0 1\nOUT 1 3");
        assert_eq!(sys.output_name(), DIFFERENTIAL_OUTPUT);
        let x =
            crate::numerics::solve_linear(&sys.a().scaled(-1.0), &sys.forcing(inp.u0()).unwrap())
                .unwrap();
        // v1 = 2, v3 = 2/3.
        assert!((x[sys.output_index()] - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn parallel_voltage_sources_give_a_singular_pencil() {
        let (sys, _) = compile("V a 1 0 DC 1\nV b 1 0 DC 2\nR r 1 0 1\nOUT 1");
        assert!(!check_regularity(&sys, &probe_steps(DEFAULT_PROBE_SEED)));
    }

    #[test]
    fn dangling_current_source_node_is_rejected() {
        let net =
            parse_netlist("I s 1 0 DC 1\nR r 2 0 1\nR q 2 1 1\nC c 3 0 1\nI t 3 0 DC 1\nOUT 2")
                .unwrap();
        assert!(build_dae(&net).is_ok());
        // Node 1 touches only the source, so its KCL row has no E/A entries.
        let net = parse_netlist("I s 1 0 DC 1\nR r 2 0 1\nOUT 2").unwrap();
        assert!(matches!(build_dae(&net), Err(Error::Validation(_))));
    }

    #[test]
    fn name_collisions_are_reported() {
        // Node "in" gives voltage unknown "vin", clashing with source "vin".
        let net = parse_netlist("V vin in 0 DC 1\nR r in 0 1\nOUT in").unwrap();
        assert!(matches!(build_dae(&net), Err(Error::Validation(_))));
    }

    #[test]
    fn sources_stack_in_netlist_order() {
        let (sys, inp) =
            compile("V a 1 0 FOURIER 0 1 2 0\nR r 1 2 1\nI b 0 2 DC 3\nC c 2 0 1\nOUT 2");
        assert_eq!(sys.input_names(), &["a", "b"]);
        assert_eq!(inp.state_names(), vec!["a", "b", "a_s1", "a_c1"]);
    }
}
