//! Classical random-field model of the free Klein–Gordon vacuum.
//!
//! A Gibbs measure `exp(-H_ξ[φ]/kT)` with `H_ξ = ∫d³k/(2π)³ ξ(k)|φ̃(k)|²` makes
//! every smeared field `φ_f` Gaussian with variance `kT∫d³k/(2π)³|f̃|²/(2ξ)`.
//! The choice `ξ = kT·√(k²+m²)/ℏ` reproduces the vacuum two-point function of the
//! quantized field exactly. This crate computes those spectral integrals,
//! samples the measure on periodic lattices, evaluates the one-particle and
//! superposition marginal densities, and checks all of it against independent
//! oracles.

pub mod analytic;
pub mod bessel;
pub mod cli;
pub mod error;
pub mod fault;
pub mod lattice;
mod params;
pub mod quadrature;
pub mod regularizer;
pub mod rng;
pub mod sampler;
pub mod states;
pub mod testfn;
pub mod verify;

pub use error::{Error, Result};
