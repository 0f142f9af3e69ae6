//! Netlist → DAE → ODE → dual-rail CRN, plus the matching reference run.

use std::collections::HashSet;

use crate::circuit::{build_dae, Netlist};
use crate::crn::{emit_crn, mass_action_field, union, Crn};
use crate::dae::{
    check_regularity, compose_direct, compose_input, consistent_project, probe_steps, AffineOde,
    ComposedOde, DaeSystem, InputModel, ReferenceSolver, DEFAULT_H, DEFAULT_PROBE_SEED,
};
use crate::error::{Error, Result, Warning};
use crate::positivation::{hungarize, positivate, split_initial, HungarizedSystem};
use crate::sim::{integrate_every, recover_difference};
use crate::trajectory::Trajectory;

/// Step used to project the initial state onto the consistent set.
pub const PROJECTION_STEP: f64 = 1e-6;
pub const CIRCUIT_SECTION: &str = "circuit";
pub const INPUT_SECTION: &str = "input";

/// How the DAE is turned into an ODE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// `Direct` when `E` is invertible, otherwise `BackwardEuler`.
    #[default]
    Auto,
    /// Backward-Euler slope with `u⁽¹⁾` correction rails.
    BackwardEuler,
    /// `∂x = E⁻¹(A x + B u)` with the exact input dynamics.
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub h: f64,
    /// Annihilation rate; `None` means `1/h`.
    pub gamma: Option<f64>,
    pub scheme: Scheme,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            h: DEFAULT_H,
            gamma: None,
            scheme: Scheme::Auto,
            seed: DEFAULT_PROBE_SEED,
        }
    }
}

impl PipelineConfig {
    pub fn with_h(mut self, h: f64) -> Self {
        self.h = h;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma);
        self
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn gamma(&self) -> f64 {
        self.gamma.unwrap_or(1.0 / self.h)
    }
}

/// Every intermediate product of one compilation.
#[derive(Debug, Clone)]
pub struct Compiled {
    pub config: PipelineConfig,
    /// `Direct` or `BackwardEuler`, after resolving `Auto`.
    pub scheme: Scheme,
    pub dae: DaeSystem,
    pub input: InputModel,
    pub ode: ComposedOde,
    /// Consistent initial circuit state.
    pub x0: Vec<f64>,
    pub circuit_rails: HungarizedSystem,
    pub input_rails: HungarizedSystem,
    pub circuit_crn: Crn,
    pub input_crn: Crn,
    /// Union of the circuit and input networks, with labelled sections.
    pub crn: Crn,
    pub warnings: Vec<Warning>,
}

pub fn compile_netlist(net: &Netlist, cfg: &PipelineConfig) -> Result<Compiled> {
    let (dae, input) = build_dae(net)?;
    compile_dae(&dae, &input, None, cfg)
}

/// Compiles a DAE driven by `input`, starting from `x0` (zero by default)
/// projected onto the consistent set.
pub fn compile_dae(
    dae: &DaeSystem,
    input: &InputModel,
    x0: Option<&[f64]>,
    cfg: &PipelineConfig,
) -> Result<Compiled> {
    if !(cfg.h > 0.0 && cfg.h.is_finite()) {
        return Err(Error::Config(format!("h must be positive, got {}", cfg.h)));
    }
    if !check_regularity(dae, &probe_steps(cfg.seed)) {
        return Err(Error::SingularPencil);
    }
    let gamma = cfg.gamma();
    let mut warnings = Vec::new();
    if gamma == 0.0 {
        warnings.push(Warning::GammaZero);
    }

    let start = x0.map_or_else(|| vec![0.0; dae.n()], <[f64]>::to_vec);
    let b0 = dae.forcing(input.u0())?;
    let (projected, flagged) = consistent_project(dae, &b0, &start, PROJECTION_STEP)?;
    let x0 = if flagged {
        let shift = start
            .iter()
            .zip(&projected)
            .fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs()));
        warnings.push(Warning::InconsistentInitial { shift });
        projected
    } else {
        start
    };

    let scheme = match cfg.scheme {
        Scheme::Auto if dae.has_invertible_e() => Scheme::Direct,
        Scheme::Auto => Scheme::BackwardEuler,
        s => s,
    };
    let ode = match scheme {
        Scheme::Direct => compose_direct(dae, input)?,
        _ => compose_input(dae, input, cfg.h)?,
    };

    let circuit_names: HashSet<&str> = ode.circuit_names().iter().map(String::as_str).collect();
    if let Some(clash) = ode
        .input
        .state_names()
        .iter()
        .find(|s| circuit_names.contains(s.as_str()))
    {
        return Err(Error::Validation(format!(
            "input state {clash} clashes with a circuit variable"
        )));
    }

    let circuit_rails = hungarize(positivate(&ode.circuit), gamma)?;
    let input_rails = hungarize(positivate(&ode.input), gamma)?;

    let circuit_init: Vec<f64> = ode
        .circuit
        .state_names()
        .iter()
        .enumerate()
        .map(|(k, name)| {
            if k < ode.circuit.driven() {
                x0[k]
            } else {
                let j = ode
                    .input
                    .state_index(name)
                    .expect("circuit inputs are input states");
                ode.input_init[j]
            }
        })
        .collect();
    let (cp, cm) = split_initial(&circuit_init);
    let (ip, im) = split_initial(&ode.input_init);
    let circuit_crn = emit_crn(&circuit_rails, &cp, &cm)?.labelled(CIRCUIT_SECTION);
    let input_crn = emit_crn(&input_rails, &ip, &im)?.labelled(INPUT_SECTION);
    let crn = union(&circuit_crn, &input_crn)?;

    Ok(Compiled {
        config: *cfg,
        scheme,
        dae: dae.clone(),
        input: input.clone(),
        ode,
        x0,
        circuit_rails,
        input_rails,
        circuit_crn,
        input_crn,
        crn,
        warnings,
    })
}

impl Compiled {
    /// Integration step `h/20`.
    pub fn default_dt(&self) -> f64 {
        self.config.h / 20.0
    }

    pub fn circuit_names(&self) -> Vec<&str> {
        self.ode
            .circuit_names()
            .iter()
            .map(String::as_str)
            .collect()
    }

    pub fn output_name(&self) -> &str {
        self.dae.output_name()
    }

    /// The single ODE over circuit and input states whose dual-rail form the
    /// CRN implements.
    pub fn full_ode(&self) -> Result<AffineOde> {
        self.ode.full()
    }

    pub fn full_initial(&self) -> Vec<f64> {
        self.ode.initial_state(&self.x0)
    }

    /// Species trajectory of the CRN under mass action.
    pub fn simulate_species(&self, t_end: f64, dt: f64, stride: usize) -> Result<Trajectory> {
        let field = mass_action_field(&self.crn)?;
        integrate_every(&field, &self.crn.initial_state(), t_end, dt, stride)
    }

    /// CRN run reduced to rail differences, one column per circuit and
    /// input state.
    pub fn simulate(&self, t_end: f64, dt: f64, stride: usize) -> Result<Trajectory> {
        let species = self.simulate_species(t_end, dt, stride)?;
        differences(&species, &self.crn)
    }

    /// The same ODE integrated directly, without rails.
    pub fn simulate_ode(&self, t_end: f64, dt: f64, stride: usize) -> Result<Trajectory> {
        integrate_every(&self.full_ode()?, &self.full_initial(), t_end, dt, stride)
    }

    /// Backward-Euler reference on the exact DAE, from the same `x0`.
    pub fn reference(&self, t_end: f64, h_ref: f64, stride: usize) -> Result<Trajectory> {
        Ok(ReferenceSolver::new(h_ref)
            .record_every(stride)
            .solve(&self.dae, &self.input, &self.x0, t_end)?
            .trajectory)
    }

    pub fn step_warning(&self, dt: f64) -> Option<Warning> {
        let limit = self.default_dt();
        (dt > limit * (1.0 + 1e-12)).then_some(Warning::StepTooLarge { dt, limit })
    }
}

/// Difference columns for every `# diff` pair of `crn`.
pub fn differences(species: &Trajectory, crn: &Crn) -> Result<Trajectory> {
    let pairs: Vec<(&str, &str, &str)> = crn
        .diffs
        .iter()
        .map(|(o, p, m)| (p.as_str(), m.as_str(), o.as_str()))
        .collect();
    recover_difference(species, &pairs)
}
