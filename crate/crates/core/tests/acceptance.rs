//! Acceptance criteria 1 to 10. Each criterion prints one PASS/FAIL line;
//! the process fails if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use circ2crn::circuit::{build_dae, fixtures, Netlist, Waveform};
use circ2crn::crn::{emit_crn, mass_action_field, section_block, serialize_crn, Reaction};
use circ2crn::dae::{backward_euler_map_with_inputs, square_wave_terms};
use circ2crn::driver::{self, RunConfig};
use circ2crn::pipeline::{compile_netlist, Compiled, PipelineConfig, Scheme, CIRCUIT_SECTION};
use circ2crn::positivation::{hungarize, positivate, split_initial, HungarizedSystem};
use circ2crn::sim::{convergence_study, integrate_every, sup_error};
use circ2crn::{Error, VectorField};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    format!("error: {e}")
}

fn compile(net: &Netlist, cfg: &PipelineConfig) -> Result<Compiled, String> {
    compile_netlist(net, cfg).map_err(fail)
}

/// High-pass at ω = 1: gain 0.707 and phase 45° within the stated bands.
fn criterion_1() -> Outcome {
    let start = Instant::now();
    let cfg = RunConfig::default();
    let p = driver::measure_response(&fixtures::high_pass(), 1.0, &cfg).map_err(fail)?;
    let secs = start.elapsed().as_secs_f64();
    let detail = format!(
        "gain {:.4} in [0.677, 0.737], phase {:.2} deg in [42, 48], {secs:.2} s",
        p.gain, p.phase_deg
    );
    check(
        (0.677..=0.737).contains(&p.gain) && (42.0..=48.0).contains(&p.phase_deg) && secs <= 10.0,
        detail,
    )
}

/// Exactly the twelve reactions of the dual-rail high-pass network.
fn criterion_2() -> Outcome {
    let h = 0.01;
    let (p, q, r) = (1.0 / (1.0 + h), 1.0 / (h + h * h), 1.0 / h);
    let (dae, _) = build_dae(&fixtures::high_pass()).map_err(fail)?;
    let ode = backward_euler_map_with_inputs(&dae, h).map_err(fail)?;
    let hs = hungarize(positivate(&ode), r).map_err(fail)?;
    let zeros = vec![0.0; hs.n()];
    let crn = emit_crn(&hs, &zeros, &zeros).map_err(fail)?;

    // i is the inductor current, v_out the node across it, v_in the source.
    let expected = [
        (vec!["vin_p"], vec!["vin_p", "i_l1_p"], p),
        (vec!["vin_m"], vec!["vin_m", "i_l1_m"], p),
        (vec!["i_l1_m"], vec!["i_l1_m", "i_l1_p"], p),
        (vec!["i_l1_p"], vec!["i_l1_p", "i_l1_m"], p),
        (vec!["vin_p"], vec!["vin_p", "v2_p"], q),
        (vec!["vin_m"], vec!["vin_m", "v2_m"], q),
        (vec!["i_l1_m"], vec!["i_l1_m", "v2_p"], q),
        (vec!["i_l1_p"], vec!["i_l1_p", "v2_m"], q),
        (vec!["v2_m"], vec!["v2_m", "v2_p"], r),
        (vec!["v2_p"], vec!["v2_p", "v2_m"], r),
        (vec!["i_l1_p", "i_l1_m"], vec![], r),
        (vec!["v2_p", "v2_m"], vec![], r),
    ];
    let key = |x: &Reaction| format!("{:?} -> {:?}", x.reactants, x.products);
    let mut got: Vec<Reaction> = crn.reactions.iter().map(Reaction::canonical).collect();
    let mut want: Vec<Reaction> = expected
        .iter()
        .map(|(a, b, k)| Reaction::new(a.clone(), b.clone(), *k).canonical())
        .collect();
    got.sort_by_key(key);
    want.sort_by_key(key);
    let count = got.len();
    let same = count == want.len()
        && got.iter().zip(&want).all(|(g, w)| {
            g.reactants == w.reactants
                && g.products == w.products
                && (g.rate - w.rate).abs() <= 1e-12 * w.rate
        });
    check(
        same,
        format!("{count} reactions, expected 12 matching triples"),
    )
}

/// Error against the oracle shrinks with h, ratio >= 1.5, <= 0.02 at h = 0.01.
fn criterion_3() -> Outcome {
    let (dae, inp) = build_dae(&fixtures::high_pass()).map_err(fail)?;
    let hs = [0.04, 0.02, 0.01];
    let rows = convergence_study(
        &dae,
        &inp,
        &hs,
        10.0,
        &PipelineConfig::default(),
        Some(1e-5),
    )
    .map_err(fail)?;
    let errs: Vec<f64> = rows.iter().map(|r| r.sup_error).collect();
    let ratios: Vec<f64> = errs.windows(2).map(|w| w[0] / w[1]).collect();
    let detail = format!(
        "errors {:.3e} {:.3e} {:.3e}, ratios {:.2} {:.2}",
        errs[0], errs[1], errs[2], ratios[0], ratios[1]
    );
    check(ratios.iter().all(|&r| r >= 1.5) && errs[2] <= 0.02, detail)
}

/// Rail differences reproduce the direct ODE run to 1e-9.
fn criterion_4() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (name, net) in fixtures::dynamic() {
        let c = compile(&net, &PipelineConfig::default())?;
        let dt = c.default_dt();
        let rails = c.simulate(10.0, dt, 1).map_err(fail)?;
        let direct = c.simulate_ode(10.0, dt, 1).map_err(fail)?;
        let names: Vec<&str> = direct.names().iter().map(String::as_str).collect();
        let err = sup_error(&rails, &direct, &names).map_err(fail)?;
        parts.push(format!("{name} {err:.1e}"));
        worst = worst.max(err);
    }
    check(worst <= 1e-9, format!("sup errors {}", parts.join(", ")))
}

/// Bounded rails with gamma = 1/h; divergence before t = 20 without it.
fn criterion_5() -> Outcome {
    let net = fixtures::high_pass();
    let damped = compile(&net, &PipelineConfig::default())?;
    let species = damped
        .simulate_species(100.0, damped.default_dt(), 100)
        .map_err(fail)?;
    let bound = species.max_abs();

    let free = compile(&net, &PipelineConfig::default().with_gamma(0.0))?;
    let field = mass_action_field(&free.crn).map_err(fail)?;
    // The integrator stops at the first state past its blow-up threshold.
    let diverged_at = match integrate_every(
        &field,
        &free.crn.initial_state(),
        20.0,
        free.default_dt(),
        1,
    ) {
        Err(Error::NonFiniteState { time }) => Some(time),
        Ok(traj) => traj
            .rows()
            .find(|(_, row)| row.iter().any(|v| *v > 1e3))
            .map(|(t, _)| t),
        Err(e) => return Err(fail(e)),
    };
    let detail = format!(
        "max rail {bound:.3} with gamma = 1/h, gamma = 0 diverges at t = {}",
        diverged_at.map_or("never".to_string(), |t| format!("{t:.3}"))
    );
    check(
        bound <= 10.0 && diverged_at.is_some_and(|t| t < 20.0),
        detail,
    )
}

fn field_gap(hs: &HungarizedSystem, rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let (p, m) = split_initial(&vec![0.0; hs.n()]);
    let crn = emit_crn(hs, &p, &m).map_err(fail)?;
    let mass = mass_action_field(&crn).map_err(fail)?;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let rails: Vec<f64> = (0..2 * hs.n()).map(|_| rng.gen_range(0.0..2.0)).collect();
        let want = hs.eval_checked(&rails).map_err(fail)?;
        // Species order of the network may differ from the rail order.
        let mut state = vec![0.0; crn.species.len()];
        for (k, name) in hs.rail_names.iter().enumerate() {
            let j = crn
                .species
                .iter()
                .position(|s| s == name)
                .ok_or("missing rail")?;
            state[j] = rails[k];
        }
        let got = mass.eval_vec(&state);
        for (k, name) in hs.rail_names.iter().enumerate() {
            let j = crn
                .species
                .iter()
                .position(|s| s == name)
                .ok_or("missing rail")?;
            worst = worst.max((got[j] - want[k]).abs());
        }
    }
    Ok(worst)
}

/// Mass-action field of the emitted network equals the dual-rail field.
fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    let mut fixtures_all = fixtures::dynamic();
    fixtures_all.push(("high_pass_sine", fixtures::high_pass_sine()));
    fixtures_all.push(("divider", fixtures::divider()));
    for (_, net) in &fixtures_all {
        let c = compile(net, &PipelineConfig::default())?;
        worst = worst.max(field_gap(&c.circuit_rails, &mut rng)?);
        worst = worst.max(field_gap(&c.input_rails, &mut rng)?);
    }
    check(
        worst <= 1e-12,
        format!(
            "max field gap {worst:.1e} over {} fixtures",
            fixtures_all.len()
        ),
    )
}

/// The circuit block does not depend on the input signal.
fn criterion_7() -> Outcome {
    let cfg = PipelineConfig::default();
    let dc = serialize_crn(&compile(&fixtures::high_pass(), &cfg)?.crn);
    let sine = serialize_crn(&compile(&fixtures::high_pass_sine(), &cfg)?.crn);
    let a = section_block(&dc, CIRCUIT_SECTION).ok_or("no circuit block in DC network")?;
    let b = section_block(&sine, CIRCUIT_SECTION).ok_or("no circuit block in sine network")?;
    check(
        a == b && dc != sine,
        format!(
            "circuit blocks {} ({} bytes)",
            if a == b { "identical" } else { "differ" },
            a.len()
        ),
    )
}

/// Two-capacitor circuit through the backward-Euler path, and the oracle's
/// residual on the circuit equations.
fn criterion_8() -> Outcome {
    let cfg = PipelineConfig::default().with_scheme(Scheme::BackwardEuler);
    let c = compile(&fixtures::two_capacitor(), &cfg)?;
    let traj = c.simulate(10.0, c.default_dt(), 1).map_err(fail)?;
    let h_ref = 1e-4;
    let reference = c.reference(10.0, h_ref, 1).map_err(fail)?;
    let cols = c.circuit_names();
    let err = sup_error(&traj, &reference, &cols).map_err(fail)?;

    // (C1 + C2) v1' - C2 v2' = i_S and C2 v1' - C2 v2' = v2 / R, C = R = 1.
    let v1 = reference.column("v1").map_err(fail)?;
    let v2 = reference.column("v2").map_err(fail)?;
    let mut residual: f64 = 0.0;
    for k in 1..v1.len() {
        let d1 = (v1[k] - v1[k - 1]) / h_ref;
        let d2 = (v2[k] - v2[k - 1]) / h_ref;
        residual = residual.max((2.0 * d1 - d2 - 1.0).abs());
        residual = residual.max((d1 - d2 - v2[k]).abs());
    }
    check(
        err <= 0.05 && residual <= 1e-8,
        format!("sup error {err:.3e} (<= 0.05), oracle residual {residual:.1e} (<= 1e-8)"),
    )
}

/// Square-wave input: each step gives a same-signed peak of at least half
/// the step and the output settles within 5 time units.
fn criterion_9() -> Outcome {
    let period = 14.0;
    let half = period / 2.0;
    // The truncated series takes about half a period of its top harmonic to
    // switch levels; the plateau is what lies outside those edges.
    let edge = period / 14.0;
    let t_end = 3.0 * period;
    let wave = Waveform::Fourier {
        alpha: 0.0,
        terms: square_wave_terms(1.0, std::f64::consts::TAU / period, 7),
    };
    let net = fixtures::high_pass()
        .with_waveform("vin", wave)
        .map_err(fail)?;
    let c = compile(&net, &PipelineConfig::default().with_h(1e-3))?;
    let traj = c.simulate(t_end, c.default_dt(), 20).map_err(fail)?;
    let times = traj.times();
    let vin = traj.column("vin").map_err(fail)?;
    let vout = traj.column(c.output_name()).map_err(fail)?;
    let mean = |a: f64, b: f64, v: &[f64]| {
        let xs: Vec<f64> = times
            .iter()
            .zip(v)
            .filter(|(t, _)| **t >= a && **t < b)
            .map(|(_, x)| *x)
            .collect();
        xs.iter().sum::<f64>() / xs.len() as f64
    };
    let baseline = 0.0;
    let mut ok = true;
    let mut worst_peak = f64::INFINITY;
    let mut worst_settle: f64 = 0.0;
    let mut k = 1;
    while (k as f64 + 1.0) * half <= t_end + 1e-9 {
        let jump = k as f64 * half;
        let step = mean(jump, jump + half, &vin) - mean(jump - half, jump, &vin);
        let mut peak: f64 = 0.0;
        let mut settle: f64 = 0.0;
        for (i, &t) in times.iter().enumerate() {
            let d = vout[i] - baseline;
            if t >= jump - edge && t <= jump + 5.0 && d.abs() > peak.abs() {
                peak = d;
            }
            if t >= jump + 5.0 && t < jump + half - edge {
                settle = settle.max(d.abs());
            }
        }
        let peak_ratio = peak / step;
        let settle_ratio = settle / step.abs();
        ok &= peak_ratio >= 0.5 && settle_ratio <= 0.1;
        worst_peak = worst_peak.min(peak_ratio);
        worst_settle = worst_settle.max(settle_ratio);
        k += 1;
    }
    check(
        ok && k > 1,
        format!(
            "{} steps, min signed peak/step {worst_peak:.3} (>= 0.5), max settled/step {worst_settle:.3} (<= 0.1)",
            k - 1
        ),
    )
}

/// RC low-pass on the direct path: unit DC gain, strong attenuation at 10/RC.
fn criterion_10() -> Outcome {
    let c = compile(&fixtures::low_pass(), &PipelineConfig::default())?;
    if c.scheme != Scheme::Direct {
        return Err(format!("scheme {:?}, expected Direct", c.scheme));
    }
    let traj = c.simulate(20.0, c.default_dt(), 100).map_err(fail)?;
    let (_, last) = traj.last().ok_or("empty trajectory")?;
    let j = traj.column_index("v2").map_err(fail)?;
    let dc = last[j];
    let p = driver::measure_response(&fixtures::low_pass(), 10.0, &RunConfig::default())
        .map_err(fail)?;
    check(
        (dc - 1.0).abs() <= 0.01 && p.gain <= 0.15,
        format!("DC gain {dc:.5}, gain {:.4} at omega = 10", p.gain),
    )
}

fn main() -> ExitCode {
    let criteria: [(usize, fn() -> Outcome); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    panic::set_hook(Box::new(|_| {}));
    let start = Instant::now();
    let results: Vec<(usize, Outcome)> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|&(n, f)| {
                s.spawn(move || {
                    let out = panic::catch_unwind(AssertUnwindSafe(f))
                        .unwrap_or_else(|_| Err("panicked".to_string()));
                    (n, out)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut failed = 0;
    for (n, out) in &results {
        match out {
            Ok(d) => println!("criterion {n}: PASS  {d}"),
            Err(d) => {
                failed += 1;
                println!("criterion {n}: FAIL  {d}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1} s",
        results.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
