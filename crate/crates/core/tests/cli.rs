//! The `circ2crn` binary: outputs, exit codes and determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

use circ2crn::circuit::fixtures;
use circ2crn::crn::section_block;
use circ2crn::Trajectory;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_circ2crn"))
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn compile_prints_the_network_and_warns_on_projection() {
    let net = scratch("hp.net", fixtures::HIGH_PASS);
    let out = run(&["compile", net.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("# chemical reaction network"));
    assert!(text.contains("# reactions: circuit"));
    assert!(text.contains("# diff v2 v2_p v2_m"));
    assert!(stderr(&out).contains("warning"));
}

#[test]
fn compile_is_deterministic_and_writes_files() {
    let net = scratch("hp_sine.net", fixtures::HIGH_PASS_SINE);
    let a = scratch("a.crn", "");
    let b = scratch("b.crn", "");
    for path in [&a, &b] {
        let out = run(&[
            "compile",
            net.to_str().unwrap(),
            "-o",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let ta = std::fs::read_to_string(&a).unwrap();
    assert!(!ta.is_empty());
    assert_eq!(ta, std::fs::read_to_string(&b).unwrap());
}

#[test]
fn circuit_block_is_independent_of_the_source() {
    let dc = scratch("dec_dc.net", fixtures::HIGH_PASS);
    let sine = scratch("dec_sine.net", fixtures::HIGH_PASS_SINE);
    let a = stdout(&run(&["compile", dc.to_str().unwrap()]));
    let b = stdout(&run(&["compile", sine.to_str().unwrap()]));
    assert_ne!(a, b);
    assert_eq!(section_block(&a, "circuit"), section_block(&b, "circuit"));
    assert!(section_block(&a, "circuit").is_some());
}

#[test]
fn step_and_gamma_options_change_the_rates() {
    let net = scratch("hp_opts.net", fixtures::HIGH_PASS);
    let out = run(&[
        "compile",
        net.to_str().unwrap(),
        "-h",
        "0.1",
        "--gamma",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("v2_p + v2_m ->{3} 0"));
    assert!(text.contains("->{10} v2_m + v2_p"));
}

#[test]
fn malformed_netlist_exits_one_with_a_line_number() {
    let net = scratch("bad.net", "V vin 1 0 DC 1\nR r1 1 2 banana\nOUT 2\n");
    let out = run(&["compile", net.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn missing_file_exits_one() {
    let out = run(&["compile", "/nonexistent/circuit.net"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn singular_pencil_exits_two() {
    let net = scratch("par.net", fixtures::PARALLEL_SOURCES);
    let out = run(&["compile", net.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("singular pencil"));
}

#[test]
fn simulate_reports_rails_and_differences() {
    let net = scratch("hp_sim.net", fixtures::HIGH_PASS);
    let crn = scratch("hp_sim.crn", "");
    let csv = scratch("hp_sim.csv", "");
    let svg = scratch("hp_sim.svg", "");
    run(&[
        "compile",
        net.to_str().unwrap(),
        "-o",
        crn.to_str().unwrap(),
    ]);
    let out = run(&[
        "simulate",
        crn.to_str().unwrap(),
        "-T",
        "50",
        "--every",
        "100",
        "-o",
        csv.to_str().unwrap(),
        "--plot",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let traj = Trajectory::from_csv(&std::fs::read_to_string(&csv).unwrap()).unwrap();
    assert!((traj.times().last().unwrap() - 50.0).abs() < 1e-9);
    for name in traj.names() {
        if name.ends_with("_p") || name.ends_with("_m") {
            let col = traj.column(name).unwrap();
            assert!(col.iter().all(|&v| v >= 0.0), "{name}");
        }
    }
    // After the transient the inductor carries the full source current.
    let i = traj.column("i_l1").unwrap();
    assert!((i.last().unwrap() - 1.0).abs() < 1e-3);
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn simulate_is_deterministic() {
    let net = scratch("det.net", fixtures::LOW_PASS);
    let crn = scratch("det.crn", "");
    run(&[
        "compile",
        net.to_str().unwrap(),
        "-o",
        crn.to_str().unwrap(),
    ]);
    let a = run(&[
        "simulate",
        crn.to_str().unwrap(),
        "-T",
        "2",
        "--every",
        "50",
    ]);
    let b = run(&[
        "simulate",
        crn.to_str().unwrap(),
        "-T",
        "2",
        "--every",
        "50",
    ]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn empty_network_gives_a_time_column_only() {
    let crn = scratch("empty.crn", "# chemical reaction network\n");
    let out = run(&["simulate", crn.to_str().unwrap(), "-T", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("t"));
    // Header plus t = 0, 0.001, ..., 1.
    assert_eq!(text.lines().count(), 1002);
}

#[test]
fn undamped_network_blows_up_with_exit_three() {
    let net = scratch("free.net", fixtures::HIGH_PASS);
    let crn = scratch("free.crn", "");
    let out = run(&[
        "compile",
        net.to_str().unwrap(),
        "--gamma",
        "0",
        "-o",
        crn.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("warning"));
    let out = run(&["simulate", crn.to_str().unwrap(), "-T", "30"]);
    assert_eq!(out.status.code(), Some(3));
    let msg = stderr(&out);
    let time: f64 = msg
        .rsplit("t = ")
        .next()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or_else(|| panic!("no blow-up time in `{msg}`"));
    assert!(time < 30.0);
}

#[test]
fn malformed_network_exits_one() {
    let crn = scratch("bad.crn", "species a\na ->{x} a + a\n");
    let out = run(&["simulate", crn.to_str().unwrap(), "-T", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_passes_and_fails_honestly() {
    let net = scratch("ver.net", fixtures::HIGH_PASS);
    let out = run(&["verify", net.to_str().unwrap(), "-T", "10", "--tol", "0.05"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("PASS"));

    let out = run(&["verify", net.to_str().unwrap(), "-T", "10", "--tol", "1e-9"]);
    assert_eq!(out.status.code(), Some(4));
    let text = stdout(&out);
    assert!(text.contains("FAIL") && text.contains("sup_error"));
}

#[test]
fn verify_study_prints_a_table() {
    let net = scratch("study.net", fixtures::HIGH_PASS);
    let out = run(&[
        "verify",
        net.to_str().unwrap(),
        "-T",
        "5",
        "--tol",
        "0.05",
        "--study",
        "0.04,0.02,0.01",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let table: Vec<f64> = text
        .lines()
        .skip_while(|l| *l != "h,sup_error")
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(table.len(), 3);
    assert!(table[0] > table[1] && table[1] > table[2]);
}

#[test]
fn freq_writes_gain_and_phase() {
    let net = scratch("freq.net", fixtures::HIGH_PASS);
    let out = run(&["freq", net.to_str().unwrap(), "--omega", "1,0.1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("omega,gain,phase_deg"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows[0][0], 1.0);
    assert!((rows[0][1] - 0.707).abs() <= 0.03);
    assert!((rows[0][2] - 45.0).abs() <= 3.0);
    assert_eq!(rows[1][0], 0.1);
    assert!(rows[1][1] <= 0.15);
}

#[test]
fn help_is_available_despite_the_step_flag() {
    let out = run(&["compile", "--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("--step"));
}

#[test]
fn bad_options_exit_one() {
    let net = scratch("opt.net", fixtures::HIGH_PASS);
    let out = run(&["compile", net.to_str().unwrap(), "-h", "-1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["freq", net.to_str().unwrap(), "--omega", "one"]);
    assert_eq!(out.status.code(), Some(1));
}
