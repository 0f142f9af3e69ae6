use thiserror::Error;

/// Errors raised anywhere along the netlist → DAE → ODE → CRN pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid circuit: {0}")]
    Validation(String),

    #[error("singular matrix (pivot {pivot:e} below threshold in column {column})")]
    SingularMatrix { column: usize, pivot: f64 },

    #[error("singular pencil: det(E - hA) vanishes at every probe step")]
    SingularPencil,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("state left the finite range at t = {time}")]
    NonFiniteState { time: f64 },

    #[error("negative initial concentration {value} for species {species}")]
    NegativeInit { species: String, value: f64 },

    #[error("unknown species {0}")]
    UnknownSpecies(String),

    #[error("conflicting initial values for shared species {species}: {left} vs {right}")]
    InitConflict {
        species: String,
        left: f64,
        right: f64,
    },

    #[error("unknown trajectory column {0}")]
    UnknownColumn(String),

    #[error("fit window [{start}, {end}] shorter than two periods ({min_len})")]
    WindowTooShort { start: f64, end: f64, min_len: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// Process exit code used by the `circ2crn` binary.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SingularPencil | Error::SingularMatrix { .. } => 2,
            Error::NonFiniteState { .. } => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Non-fatal diagnostics surfaced alongside successful results.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// The supplied initial state violated the algebraic constraints and was
    /// replaced by its one-step projection.
    InconsistentInitial { shift: f64 },
    /// Annihilation disabled: rails may grow without bound.
    GammaZero,
    /// Integrator step above the `h/20` stability guideline.
    StepTooLarge { dt: f64, limit: f64 },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::InconsistentInitial { shift } => write!(
                f,
                "initial state is not consistent; projected (max shift {shift:.3e})"
            ),
            Warning::GammaZero => write!(
                f,
                "gamma = 0: no annihilation reactions, rails will grow exponentially"
            ),
            Warning::StepTooLarge { dt, limit } => write!(
                f,
                "dt = {dt} exceeds the stability guideline h/20 = {limit}"
            ),
        }
    }
}
