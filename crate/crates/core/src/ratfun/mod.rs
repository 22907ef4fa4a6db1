//! Polynomials, rational functions and finite Blaschke products.
//!
//! Arithmetic is in double precision. Degrees are small (at most a few
//! dozen), so roots come from companion-matrix eigenvalues and common
//! factors are removed by root pairing rather than by symbolic gcds.

mod blaschke;
mod boundary;
mod poly;
mod rational;

pub use blaschke::{
    classify_inner, phasar_derivative, BlaschkeProduct, CIRCLE_MARGIN, INNER_SAMPLES, UNIMODULAR_TOL,
};
pub use boundary::{boundary_interpolant, mobius_from_boundary_triple, same_cyclic_order, BoundaryInterpolation};
pub use poly::{Poly, RootCluster, COEFF_NOISE};
pub use rational::{reduce_rational, RationalFn, Reduction, PAIRING_TOL};

use crate::C64;

/// Pseudohyperbolic distance |z − w| / |1 − w̄z| on the disc.
pub fn pseudo_hyperbolic(z: C64, w: C64) -> f64 {
    let den = (C64::new(1.0, 0.0) - w.conj() * z).norm();
    let num = (z - w).norm();
    if den == 0.0 {
        return if num == 0.0 { 0.0 } else { 1.0 };
    }
    (num / den).min(1.0)
}
