//! Numerical core for reflected diffusions under volatility uncertainty.
//!
//! The crate is `no_std` (with `alloc`) and is organised bottom-up:
//!
//! - [`geometry`]: reflecting domains, normal cones, exterior-sphere and
//!   cone-uniformity checks, and the penalty field `U` (tapered squared distance).
//! - [`skorokhod`]: deterministic Skorokhod problems on uniform grids, solved by
//!   penalization, by recursive projection, or in closed form on the half-line,
//!   together with the collar/excursion/schedule diagnostics of the penalized path.
//! - [`uncertainty`]: volatility sets, the G-function, scenario simulation of
//!   G-Brownian motion, upper-expectation and capacity estimators and a 1-D
//!   G-heat finite-difference oracle.
//! - [`rgsde`]: reflected G-Brownian motion and reflected G-SDEs via per-path
//!   reflection, penalized SDEs and Picard iteration.
//!
//! Batch operations are parametrised by an [`exec::Executor`]; the std
//! companion crate supplies a thread-pool executor. Results never depend on the
//! executor because every random draw is addressed by `(seed, stream, counter)`.
#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod exec;
pub mod geometry;
pub mod linalg;
pub mod math;
pub mod rgsde;
pub mod rng;
pub mod skorokhod;
pub mod uncertainty;

pub use geometry::{Domain, DomainKind, PenaltyField};
pub use linalg::{Mat, Point};
pub use skorokhod::{Grid, Path, SkorokhodSolution};
