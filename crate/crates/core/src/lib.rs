//! Exact perturbative simulation of fault-tolerant encoding and error
//! correction for the [[7,1,3]] Steane code under a non-equiprobable Pauli
//! error model.
//!
//! Every noisy protocol is compiled to a circuit IR with explicit fault
//! locations. Fault patterns up to a configurable order are enumerated and
//! simulated exactly (dense state vector, or an equivalent Pauli-frame fast
//! path), and post-selected fidelities are accumulated as truncated
//! polynomials in the error rates `(p_x, p_y, p_z)`. A full density-matrix
//! oracle provides an independent numeric cross-check.

pub mod circuit;
pub mod dense;
pub mod engine;
pub mod experiments;
pub mod pauli;
pub mod poly;
pub mod report;
pub mod steane;

pub use poly::{Monomial, PolyError, TruncatedPoly};
