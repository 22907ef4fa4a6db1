//! The 2×2 spectral Nevanlinna–Pick problem: find analytic F on the disc
//! with F(λ_j) = W_j and spectral radius r(F(λ)) ≤ 1.
//!
//! For non-scalar W_j the problem is equivalent to Γ-interpolation of
//! (tr W_j, det W_j), so any necessary condition on Γ-data screens it.

use crate::cnu::{check_cnu, CnuReport, GammaData, SearchConfig};
use crate::gamma_core::{membership, GammaPoint};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// Tolerance of the scalar-matrix test ‖W − (tr W/2)I‖ ≤ tol.
pub const SCALAR_TOL: f64 = 1e-10;

pub type Mat2 = [[C64; 2]; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SpectralNPProblem {
    pub nodes: Vec<C64>,
    pub matrices: Vec<Mat2>,
}

pub fn trace(w: &Mat2) -> C64 {
    w[0][0] + w[1][1]
}

pub fn det(w: &Mat2) -> C64 {
    w[0][0] * w[1][1] - w[0][1] * w[1][0]
}

/// [[0, 1], [−p, s]], whose trace is s and determinant p.
pub fn companion(z: &GammaPoint) -> Mat2 {
    let zero = C64::new(0.0, 0.0);
    [[zero, C64::new(1.0, 0.0)], [-z.p, z.s]]
}

/// Frobenius norm of W − (tr W/2)I.
fn distance_from_scalar(w: &Mat2) -> f64 {
    let h = trace(w) / 2.0;
    ((w[0][0] - h).norm_sqr() + (w[1][1] - h).norm_sqr() + w[0][1].norm_sqr() + w[1][0].norm_sqr()).sqrt()
}

impl SpectralNPProblem {
    pub fn new(nodes: Vec<C64>, matrices: Vec<Mat2>) -> Self {
        SpectralNPProblem { nodes, matrices }
    }

    /// Companion matrices of Γ-data.
    pub fn from_gamma_data(d: &GammaData) -> Self {
        SpectralNPProblem {
            nodes: d.nodes.clone(),
            matrices: d.targets.iter().map(companion).collect(),
        }
    }

    /// The Γ-data (tr W_j, det W_j). Targets on the boundary of Γ are
    /// allowed.
    pub fn to_gamma_data(&self) -> Result<GammaData> {
        if self.nodes.len() != self.matrices.len() {
            return Err(Error::InvalidParameter(format!(
                "{} nodes but {} matrices",
                self.nodes.len(),
                self.matrices.len()
            )));
        }
        let mut targets = Vec::with_capacity(self.matrices.len());
        for (j, w) in self.matrices.iter().enumerate() {
            if distance_from_scalar(w) <= SCALAR_TOL {
                return Err(Error::ScalarMatrix(j));
            }
            let z = GammaPoint::new(trace(w), det(w));
            if !membership(&z).closed_gamma {
                return Err(Error::SpectralRadius(j));
            }
            targets.push(z);
        }
        GammaData::with_closure(self.nodes.clone(), targets, false)
    }
}

/// Runs the C_ν check on the reduced data, with ν defaulting to n − 2
/// (0 when n < 2). A "fails" status proves the spectral problem unsolvable.
pub fn screen(prob: &SpectralNPProblem, nu: Option<usize>, cfg: &SearchConfig) -> Result<CnuReport> {
    let d = prob.to_gamma_data()?;
    let nu = nu.unwrap_or(d.len().saturating_sub(2));
    check_cnu(&d, nu, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn companion_round_trip() {
        let z = GammaPoint::new(c(0.3, -0.2), c(0.1, 0.05));
        let w = companion(&z);
        assert_eq!(trace(&w), z.s);
        assert_eq!(det(&w), z.p);
    }

    #[test]
    fn diagonal_matrix_reduces() {
        let zero = c(0.0, 0.0);
        let p = SpectralNPProblem::new(vec![c(0.1, 0.0)], vec![[[c(0.5, 0.0), zero], [zero, c(0.2, 0.0)]]]);
        let d = p.to_gamma_data().unwrap();
        assert!((d.targets[0].s - c(0.7, 0.0)).norm() < 1e-15);
        assert!((d.targets[0].p - c(0.1, 0.0)).norm() < 1e-15);
        assert!(membership(&d.targets[0]).open_g);
    }

    #[test]
    fn scalar_matrix_is_refused() {
        let zero = c(0.0, 0.0);
        let p = SpectralNPProblem::new(vec![c(0.1, 0.0)], vec![[[c(0.5, 0.0), zero], [zero, c(0.5, 0.0)]]]);
        assert!(matches!(p.to_gamma_data(), Err(Error::ScalarMatrix(0))));
    }

    #[test]
    fn large_spectrum_is_refused() {
        let zero = c(0.0, 0.0);
        let p = SpectralNPProblem::new(vec![c(0.1, 0.0)], vec![[[c(1.5, 0.0), zero], [zero, c(0.2, 0.0)]]]);
        assert!(matches!(p.to_gamma_data(), Err(Error::SpectralRadius(0))));
    }
}
