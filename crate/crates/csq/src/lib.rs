//! Coherent-state (anti-Wick) quantization on the complex plane.
//!
//! The crate maps classical observables f(z, z̄) to operators on a truncated
//! Fock space, evaluates their lower symbols ⟨z|A|z⟩, reproduces the spectral
//! studies of the angle/time operators for the free particle, quantizes
//! Dirac-derivative distributions (projector reconstruction, dequantization,
//! star product), and checks the noncommutative-plane identities satisfied by
//! the Voros product on exponential symbols.
//!
//! Everything is computed in overflow-safe scaled form (log-space factorials,
//! e^{-x}-scaled Bessel and Kummer functions, log-weight Gauss-Laguerre rules)
//! so truncation orders up to 200 and radii up to ~100 stay inside f64 range.

pub mod distrib;
pub mod error;
pub mod expr;
pub mod fock;
pub mod io;
pub mod linalg;
pub mod ncplane;
pub mod quadrature;
pub mod quantize;
pub mod specfun;
pub mod spectra;
pub mod symbols;

pub use error::{CsqError, Result};
