//! Compile linear electric circuits into mass-action chemical reaction
//! networks whose rail differences track the circuit's voltages and
//! currents.
//!
//! The pipeline runs netlist → DAE `E ∂x = A x + B u` (modified nodal
//! analysis) → affine ODE (backward-Euler slope `(E − hA)⁻¹(A x + b)`, or
//! `E⁻¹(A x + b)` when `E` is invertible) → dual-rail system with
//! annihilation → reactions. A backward-Euler solver on the exact DAE serves
//! as the reference for verification.
//!
//! ```
//! use circ2crn::circuit::fixtures;
//! use circ2crn::pipeline::{compile_netlist, PipelineConfig};
//!
//! let compiled = compile_netlist(&fixtures::high_pass(), &PipelineConfig::default()).unwrap();
//! let traj = compiled.simulate(5.0, compiled.default_dt(), 100).unwrap();
//! let i = traj.column("i_l1").unwrap();
//! assert!((i.last().unwrap() - (1.0 - (-5f64).exp())).abs() < 0.02);
//! ```

// `!(x > 0.0)` is how NaN gets rejected together with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod circuit;
pub mod crn;
pub mod dae;
pub mod driver;
pub mod error;
pub mod field;
pub mod num_fmt;
pub mod numerics;
pub mod pipeline;
pub mod plot;
pub mod positivation;
pub mod sim;
pub mod trajectory;

pub use error::{Error, Result, Warning};
pub use field::VectorField;
pub use numerics::Matrix;
pub use trajectory::Trajectory;
