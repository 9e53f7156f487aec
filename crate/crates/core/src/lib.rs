//! Variational regularization toolkit.
//!
//! The library is organized around a variational scheme: a discrepancy
//! functional on the data space, a regularization functional on the solution
//! space, and a forward operator connecting the two. From one scheme three
//! minimization problems are derived and solved:
//!
//! * Tikhonov:  minimize `rho(F(x), y) + alpha * R(x)`
//! * Ivanov:    minimize `rho(F(x), y)` subject to `R(x) <= tau`
//! * Morozov:   minimize `R(x)` subject to `rho(F(x), y) <= delta`
//!
//! On top of the solvers sit two verification labs: [`convergence`] checks
//! sequence-level continuity and stability conditions of a scheme on finite
//! sequence prefixes, and [`kl`] provides exact Kullback-Leibler machinery on
//! step functions over `[0, 1]`.
//!
//! The crate is `no_std` (with `alloc`); all IO, file formats and the command
//! line front end live in the companion `varreg-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod convergence;
pub mod discrepancy;
pub mod ext;
pub mod functionals;
pub mod kl;
pub mod linalg;
pub mod point;
pub mod regularizers;
pub mod scheme;
pub mod solve1d;
pub mod solvers;
pub mod stepfn;

pub use discrepancy::Discrepancy;
pub use ext::ExtReal;
pub use functionals::ConvexFunctional;
pub use linalg::Matrix;
pub use point::Point;
pub use regularizers::Regularizer;
pub use scheme::{ForwardOp, Scheme};
pub use solvers::{SolveReport, SolverConfig};
pub use stepfn::StepFn;
