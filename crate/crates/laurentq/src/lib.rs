//! Orthogonal Laurent polynomials for varying exponential weights
//! `exp(-N V(z))` with a Laurent-rational external field `V`.
//!
//! The crate builds the orthonormal/monic OLP families and their recurrence
//! coefficients at finite `n`, solves the associated `even`/`odd`
//! equilibrium-measure problems, assembles the genus-N hyperelliptic surface
//! data (periods, Riemann matrix, Abel maps, theta functions), and evaluates
//! the closed-form large-n predictions for recurrence coefficients, Hankel
//! determinant ratios, and root products so that both routes can be compared
//! at finite `n`.
//!
//! Everything runs in extended precision (MPFR via `rug`); Hankel-type
//! determinants are exponentially ill-conditioned, so working precision is a
//! first-class parameter rather than an afterthought.

pub mod asymptotics;
pub mod config;
pub mod equilibrium;
pub mod error;
pub mod moments;
pub mod numerics;
pub mod olp;
pub mod potential;
pub mod recurrence;
pub mod report;
pub mod surface;

pub use error::{LqError, Result};
pub use numerics::PrecisionCtx;
