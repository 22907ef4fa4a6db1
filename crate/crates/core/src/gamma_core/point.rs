use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// Absolute tolerance for the equality predicates of membership.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// A point (s, p) of C².
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaPoint {
    pub s: C64,
    pub p: C64,
}

impl GammaPoint {
    pub fn new(s: C64, p: C64) -> Self {
        GammaPoint { s, p }
    }

    /// Symmetrization (z + w, zw).
    pub fn from_pair(z: C64, w: C64) -> Self {
        GammaPoint { s: z + w, p: z * w }
    }

    /// |s − s̄p|.
    pub fn defect(&self) -> f64 {
        (self.s - self.s.conj() * self.p).norm()
    }
}

/// Φ(z, s, p) = (2zp − s)/(2 − zs).
pub fn phi(z: C64, pt: &GammaPoint) -> Result<C64> {
    let den = C64::new(2.0, 0.0) - z * pt.s;
    if den.norm() < 1e-12 {
        return Err(Error::PolePoint { z, s: pt.s });
    }
    Ok((z * pt.p * 2.0 - pt.s) / den)
}

/// Multi-flag membership report. Equality conditions are judged with an
/// absolute tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Membership {
    /// In the open set G: |s − s̄p| < 1 − |p|².
    pub open_g: bool,
    /// In Γ: |s| ≤ 2 and |s − s̄p| ≤ 1 − |p|².
    pub closed_gamma: bool,
    /// In Γ but in none of the finer classes (only possible at the edge of
    /// the tolerance bands).
    pub closed_gamma_only: bool,
    /// In the topological boundary ∂Γ.
    pub boundary_topological: bool,
    /// In the distinguished boundary bΓ: |s| ≤ 2, |p| = 1, s = s̄p.
    pub distinguished_boundary: bool,
    pub outside: bool,
}

/// The most specific class a point belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum MembershipKind {
    OpenG,
    DistinguishedBoundary,
    BoundaryTopological,
    ClosedGammaOnly,
    Outside,
}

impl Membership {
    pub fn kind(&self) -> MembershipKind {
        if self.distinguished_boundary {
            MembershipKind::DistinguishedBoundary
        } else if self.boundary_topological {
            MembershipKind::BoundaryTopological
        } else if self.open_g {
            MembershipKind::OpenG
        } else if self.closed_gamma {
            MembershipKind::ClosedGammaOnly
        } else {
            MembershipKind::Outside
        }
    }
}

/// Classifies a point with the default tolerance.
pub fn membership(pt: &GammaPoint) -> Membership {
    membership_tol(pt, MEMBERSHIP_TOL)
}

pub fn membership_tol(pt: &GammaPoint, tol: f64) -> Membership {
    let s_ok = pt.s.norm() <= 2.0 + tol;
    let defect = pt.defect();
    let room = 1.0 - pt.p.norm_sqr();
    let closed_gamma = s_ok && defect <= room + tol;
    let open_g = s_ok && defect < room - tol;
    let boundary_topological = s_ok && (defect - room).abs() <= tol;
    let distinguished_boundary = s_ok && (pt.p.norm() - 1.0).abs() <= tol && defect <= tol;
    let closed_gamma_only = closed_gamma && !open_g && !boundary_topological;
    Membership {
        open_g,
        closed_gamma,
        closed_gamma_only,
        boundary_topological,
        distinguished_boundary,
        outside: !closed_gamma,
    }
}
