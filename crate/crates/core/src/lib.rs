//! Numerical interpolation theory for the symmetrised bidisc
//! Γ = {(z + w, zw) : |z|, |w| ≤ 1}.
//!
//! The crate is organised bottom-up:
//!
//! * [`ratfun`]: polynomials, rational functions and finite Blaschke products.
//! * [`linalg`]: small dense complex matrices and Hermitian eigensolvers.
//! * [`gamma_core`]: the functions Φ_ω, membership tests, royal nodes,
//!   Γ-inner verification and invariant distances.
//! * [`pick`]: scalar Nevanlinna–Pick problems and the Schur algorithm.
//! * [`cnu`]: the Φ-pencil condition C_ν and the search over Blaschke products.
//! * [`eclass`]: classification of rational Γ-inner maps into the classes E_{νk}.
//! * [`families`]: constructors for explicit Γ-inner maps.
//! * [`counterexample`]: data satisfying C_{ν−1} but not C_ν.
//! * [`spectral`]: reduction of 2×2 spectral interpolation to Γ-data.
//! * [`suite`]: the reproducible worked-example suite.

// `!(x < 1.0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cnu;
pub mod config;
pub mod counterexample;
pub mod eclass;
pub mod error;
pub mod families;
pub mod gamma_core;
pub mod linalg;
pub mod parallel;
pub mod pick;
pub mod ratfun;
pub mod spectral;
pub mod suite;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
