//! Core algorithms for indirect adaptive control with a static update law:
//! Lyapunov certificates, the eigenvalue-lift function and the performance
//! bounds derived from it, frequency-domain feasibility criteria with a
//! small constrained matrix-inequality search, deterministic closed-loop
//! simulation, and the disturbance-observer sensitivity analysis for the
//! purely linear case.
//!
//! The crate is `no_std` (with `alloc`); IO, file formats and the CLI live
//! in the companion `adaptctl` crate.

#![cfg_attr(not(test), no_std)]
// Validations use `!(x > 0.0)` on purpose: the negation also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bounds;
pub mod error;
pub mod freqresp;
pub mod kyp;
pub mod linalg;
pub mod lyapunov;
pub mod mat;
pub mod regressor;
pub mod rng;
pub mod search;
pub mod sim;

pub use error::{Error, Result};
pub use linalg::{EigenDecomposition, SymMatrix};
pub use lyapunov::NominalCertificate;
pub use mat::Mat;
pub use regressor::BetaFamily;
pub use sim::{LinearErrorSystem, NoiseSpec, Trajectory, UncertaintyModel, UpdateLaw};
