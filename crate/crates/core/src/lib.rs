//! Numerical laboratory for a contact form on R^{2n+1} of the shape
//! `alpha = alpha_st / H` whose Reeb flow carries an invariant Clifford torus
//! with irrational rotation, orbits trapped in one time direction, and no
//! periodic orbits at all.
//!
//! The crate is layered bottom-up:
//!
//! - [`profiles`]: the three scalar profile families `f_z`, `g`, `h` and their audit.
//! - [`hamiltonian`]: the assembled positive function `H` and its gradient.
//! - [`contact`]: the standard contact form, its frame, and the contact vector field `X`.
//! - [`flow`]: adaptive integration of `X`, orbit classification, rotation numbers, scans.
//! - [`verify`]: optimization and finite-difference audits.
//! - [`config`]: the serializable run configuration shared by the CLI.

pub mod config;
pub mod contact;
pub mod error;
pub mod flow;
pub mod hamiltonian;
pub mod point;
pub mod profiles;
pub mod quadrature;
pub mod sampling;
pub mod verify;

pub use error::{ConfigError, FlowError, ProfileError};
pub use point::{Point, ReducedPoint};
