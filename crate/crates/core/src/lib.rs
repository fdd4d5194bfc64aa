//! Numerical verification of Hadamard-type integral inequalities for products
//! of convex and s-convex (second sense) functions.
//!
//! The crate is organised bottom-up:
//!
//! * [`special`]: Gamma and Beta functions.
//! * [`function_model`]: intervals, function specs and seeded generators.
//! * [`certification`]: sampled membership checks with concrete witnesses.
//! * [`quadrature`]: composite Gauss–Legendre rules with endpoint power weights.
//! * [`inequality`]: evaluators for every inequality, plus the pointwise
//!   proof step.
//! * [`registry`]: the evaluators behind one trait, selected by name.
//! * [`campaign`]: deterministic falsification campaigns and replay.

pub mod campaign;
pub mod certification;
pub mod error;
pub mod function_model;
pub mod inequality;
pub mod quadrature;
pub mod registry;
pub mod special;
pub mod stream;

pub use error::{Error, Result};
pub use function_model::{FunctionSpec, Interval};
pub use inequality::{InequalityId, InequalityReport, Tolerances, Verdict};
pub use registry::{Case, Exponents, Inequality, Registry};
