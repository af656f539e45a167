//! Two-qubit discord dynamics under decoherence and detection of sudden
//! changes through crossings of the eigenvalue branches of the correlation
//! matrix `A = x xᵀ + T Tᵀ`.
//!
//! The crate is organised bottom-up:
//!
//! * [`qstate`] – density matrices, Pauli/Bloch decomposition, Bell-diagonal states.
//! * [`channels`] – single-qubit Kraus channels and the Bell-diagonal evolution laws.
//! * [`collective`] – two atoms decaying into a common vacuum.
//! * [`discord`] – geometric and information-theoretic discord.
//! * [`witness`] – branch tracking, crossing detection and derivative-jump checks.
//! * [`scenario`] – configuration-driven runs producing CSV/JSON output.
//!
//! See the `examples/` directory for one runnable program per capability.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with the range
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod collective;
pub mod discord;
mod error;
pub mod qstate;
pub mod scenario;
pub mod witness;

pub use error::{Error, Result};

pub use num_complex::Complex64;
