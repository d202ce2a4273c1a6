//! Upper quantum Lyapunov exponents and Anosov relations for quantum systems
//! driven by a classical flow.
//!
//! The Heisenberg evolution of a linear observable `L = α_x·x̂ + α_p·p̂` under a
//! quadratic Hamiltonian is completely determined by the classical symplectic
//! propagator of the driven oscillator. This crate reduces quantum growth-rate
//! questions to that classical cocycle:
//!
//! - [`weyl`] — exact algebra of linear observables and Weyl labels: symplectic
//!   form, commutator norms, coefficient pullback/pushforward.
//! - [`hull`] — driving data: trigonometric potentials on a torus hull and the
//!   linear flow `θ ↦ θ + ωt`.
//! - [`cocycle`] — fixed-step RK4 integration of the classical propagator
//!   `F(t, t0; θ)` and its algebraic identities.
//! - [`lyapunov`] — classical and quantum Lyapunov exponent estimators, stable
//!   directions, and direction profiles.
//! - [`anosov`] — Floquet reduction for periodic driving, Anosov direction
//!   fields, finite-horizon dichotomy estimation, and relation residuals.
//! - [`cat`] — the configurational quantum cat system: exact one-period
//!   coefficient map, its four Anosov directions, and inner/outer derivation
//!   classification.
//!
//! The crate is `no_std`-compatible (with `alloc`); enable the `libm` feature
//! instead of `std` for float math on bare targets.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("anosovq-core requires either the `std` or the `libm` feature");

pub mod anosov;
pub mod cat;
pub mod cocycle;
pub mod error;
pub mod hull;
pub mod lyapunov;
pub mod weyl;

mod mat2;
mod math;

pub use error::{Error, Result};

/// Complex scalar used for multipliers, exponents, and reduction frames.
pub use num_complex::Complex64;
