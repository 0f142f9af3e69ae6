//! The `circ2crn` commands as library calls.

use std::fmt;

use crate::circuit::{parse_netlist, Netlist, Waveform};
use crate::crn::{mass_action_field, parse_crn, serialize_crn, Crn};
use crate::dae::{DEFAULT_H, DEFAULT_PROBE_SEED};
use crate::error::{Error, Result, Warning};
use crate::num_fmt::format_f64;
use crate::pipeline::{compile_netlist, differences, Compiled, PipelineConfig, Scheme};
use crate::sim::{
    convergence_study, fit_sinusoid, integrate_every, sup_error, wrap_angle, StudyRow,
};
use crate::trajectory::Trajectory;

/// Environment variable overriding the regularity-probe seed.
pub const SEED_ENV: &str = "CIRC2CRN_SEED";
/// Exit code for a completed verification that missed its tolerance.
pub const EXIT_VERIFY_FAILED: i32 = 4;

/// Settings shared by all commands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub h: f64,
    /// `None` means `1/h`.
    pub gamma: Option<f64>,
    /// `None` means `h/20`.
    pub dt: Option<f64>,
    pub t_end: f64,
    /// Start of the sinusoid fit window.
    pub transient: f64,
    pub seed: u64,
    pub scheme: Scheme,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            h: DEFAULT_H,
            gamma: None,
            dt: None,
            t_end: 10.0,
            transient: 20.0,
            seed: DEFAULT_PROBE_SEED,
            scheme: Scheme::Auto,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::Config(format!("h must be positive, got {}", self.h)));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::Config(format!("dt must be positive, got {dt}")));
            }
        }
        if let Some(g) = self.gamma {
            if !(g >= 0.0 && g.is_finite()) {
                return Err(Error::Config(format!("gamma must be >= 0, got {g}")));
            }
        }
        if !(self.transient >= 0.0) {
            return Err(Error::Config("transient discard must be >= 0".into()));
        }
        Ok(())
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            h: self.h,
            gamma: self.gamma,
            scheme: self.scheme,
            seed: self.seed,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt.unwrap_or(self.h / 20.0)
    }

    /// Seed from [`SEED_ENV`] if set and valid.
    pub fn seed_from_env() -> Result<Option<u64>> {
        match std::env::var(SEED_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map(Some)
                .map_err(|_| Error::Config(format!("{SEED_ENV} must be an integer, got `{v}`"))),
            Err(_) => Ok(None),
        }
    }
}

/// Serialized union CRN and the diagnostics raised while compiling.
#[derive(Debug, Clone)]
pub struct CompileOutput {
    pub text: String,
    pub compiled: Compiled,
    pub warnings: Vec<Warning>,
}

pub fn compile(netlist: &str, cfg: &RunConfig) -> Result<CompileOutput> {
    cfg.validate()?;
    let net = parse_netlist(netlist)?;
    let compiled = compile_netlist(&net, &cfg.pipeline())?;
    Ok(CompileOutput {
        text: serialize_crn(&compiled.crn),
        warnings: compiled.warnings.clone(),
        compiled,
    })
}

/// Step `1/(20·max rate)`, or `T/1000` for a network without reactions.
pub fn auto_dt(crn: &Crn, t_end: f64) -> f64 {
    let max_rate = crn.reactions.iter().map(|r| r.rate).fold(0.0, f64::max);
    if max_rate > 0.0 {
        1.0 / (20.0 * max_rate)
    } else {
        t_end / 1000.0
    }
}

#[derive(Debug, Clone)]
pub struct SimulateOutput {
    /// Species columns followed by the `# diff` columns.
    pub trajectory: Trajectory,
    pub dt: f64,
    pub warnings: Vec<Warning>,
}

pub fn simulate(
    crn_text: &str,
    t_end: f64,
    dt: Option<f64>,
    stride: usize,
) -> Result<SimulateOutput> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::Config(format!("T must be positive, got {t_end}")));
    }
    let crn = parse_crn(crn_text)?;
    let limit = auto_dt(&crn, t_end);
    let dt = dt.unwrap_or(limit);
    let mut warnings = Vec::new();
    if !crn.reactions.is_empty() && dt > limit * (1.0 + 1e-12) {
        warnings.push(Warning::StepTooLarge { dt, limit });
    }
    let field = mass_action_field(&crn)?;
    let species = integrate_every(&field, &crn.initial_state(), t_end, dt, stride)?;
    let trajectory = if crn.diffs.is_empty() {
        species
    } else {
        species.join(&differences(&species, &crn)?)?
    };
    Ok(SimulateOutput {
        trajectory,
        dt,
        warnings,
    })
}

/// Pipeline-versus-reference comparison.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub h: f64,
    pub h_ref: f64,
    pub t_end: f64,
    pub sup_error: f64,
    pub tol: f64,
    pub columns: Vec<String>,
    pub study: Option<Vec<StudyRow>>,
    pub warnings: Vec<Warning>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.sup_error <= self.tol
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "sup_error {} over [0, {}] on {} (h = {}, reference step {})",
            format_f64(self.sup_error),
            format_f64(self.t_end),
            self.columns.join(","),
            format_f64(self.h),
            format_f64(self.h_ref)
        )?;
        writeln!(
            f,
            "{} (tol {})",
            if self.passed() { "PASS" } else { "FAIL" },
            format_f64(self.tol)
        )?;
        if let Some(rows) = &self.study {
            writeln!(f, "h,sup_error")?;
            for r in rows {
                writeln!(f, "{},{}", format_f64(r.h), format_f64(r.sup_error))?;
            }
        }
        Ok(())
    }
}

/// Reference step used by `verify`: `h/100`.
pub fn reference_step(h: f64) -> f64 {
    h / 100.0
}

pub fn verify(
    netlist: &str,
    cfg: &RunConfig,
    tol: f64,
    study: Option<&[f64]>,
) -> Result<VerifyReport> {
    cfg.validate()?;
    if !(cfg.t_end > 0.0) {
        return Err(Error::Config(format!(
            "T must be positive, got {}",
            cfg.t_end
        )));
    }
    let net = parse_netlist(netlist)?;
    let compiled = compile_netlist(&net, &cfg.pipeline())?;
    let mut warnings = compiled.warnings.clone();
    let dt = cfg.dt();
    warnings.extend(compiled.step_warning(dt));

    let h_ref = reference_step(cfg.h);
    let stride = ((cfg.t_end / h_ref) / 1e5).ceil().max(1.0) as usize;
    let reference = compiled.reference(cfg.t_end, h_ref, stride)?;
    let traj = compiled.simulate(cfg.t_end, dt, 1)?;
    let columns: Vec<String> = compiled.ode.circuit_names().to_vec();
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let err = sup_error(&traj, &reference, &cols)?;

    let study = match study {
        Some(hs) => Some(convergence_study(
            &compiled.dae,
            &compiled.input,
            hs,
            cfg.t_end,
            &cfg.pipeline(),
            None,
        )?),
        None => None,
    };
    Ok(VerifyReport {
        h: cfg.h,
        h_ref,
        t_end: cfg.t_end,
        sup_error: err,
        tol,
        columns,
        study,
        warnings,
    })
}

/// Measured steady-state response at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreqPoint {
    pub omega: f64,
    /// Output amplitude over input amplitude, both fitted in the window.
    pub gain: f64,
    /// Output phase minus input phase, in degrees.
    pub phase_deg: f64,
}

/// Simulated duration for frequency `omega`: the discard window plus at
/// least 30 time units and three periods.
pub fn freq_duration(omega: f64, transient: f64) -> f64 {
    transient + f64::max(30.0, 3.0 * std::f64::consts::TAU / omega)
}

/// Drives the netlist's only source with `sin(ωt)` and fits input and
/// output sinusoids after the transient.
pub fn measure_response(net: &Netlist, omega: f64, cfg: &RunConfig) -> Result<FreqPoint> {
    let sources: Vec<_> = net.sources().collect();
    if sources.len() != 1 {
        return Err(Error::Validation(format!(
            "frequency response needs exactly one source, found {}",
            sources.len()
        )));
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::Config(format!(
            "omega must be positive, got {omega}"
        )));
    }
    let source = sources[0].name.clone();
    let driven = net.with_waveform(&source, Waveform::sine(1.0, omega))?;
    let compiled = compile_netlist(&driven, &cfg.pipeline())?;
    let t_end = freq_duration(omega, cfg.transient);
    let traj = compiled.simulate(t_end, cfg.dt(), 1)?;
    let window = (cfg.transient, t_end);
    let out = fit_sinusoid(&traj, compiled.output_name(), omega, window)?;
    let inp = fit_sinusoid(&traj, &source, omega, window)?;
    Ok(FreqPoint {
        omega,
        gain: out.amplitude / inp.amplitude,
        phase_deg: wrap_angle(out.phase - inp.phase).to_degrees(),
    })
}

/// Frequency sweep; points run concurrently, rows follow `omegas`.
pub fn freq(netlist: &str, omegas: &[f64], cfg: &RunConfig) -> Result<Vec<FreqPoint>> {
    cfg.validate()?;
    if omegas.is_empty() {
        return Err(Error::Config("no frequencies given".into()));
    }
    let net = parse_netlist(netlist)?;
    std::thread::scope(|s| {
        let handles: Vec<_> = omegas
            .iter()
            .map(|&w| {
                let net = &net;
                s.spawn(move || measure_response(net, w, cfg))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("frequency worker panicked"))
            .collect()
    })
}

pub fn freq_csv(points: &[FreqPoint]) -> String {
    let mut out = String::from("omega,gain,phase_deg\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{}\n",
            format_f64(p.omega),
            format_f64(p.gain),
            format_f64(p.phase_deg)
        ));
    }
    out
}

/// Parses `a,b,c` into numbers.
pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Config(format!("bad number `{s}` in list")))
        })
        .collect()
}

/// Parses a number or `auto`.
pub fn parse_auto(text: &str) -> Result<Option<f64>> {
    if text.eq_ignore_ascii_case("auto") {
        return Ok(None);
    }
    text.trim()
        .parse::<f64>()
        .map(Some)
        .map_err(|_| Error::Config(format!("expected a number or `auto`, got `{text}`")))
}
