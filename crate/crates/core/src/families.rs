//! Explicit rational Γ-inner maps and the operations that make new ones
//! from old.

use crate::cnu::GammaData;
use crate::gamma_core::{membership, verify_gamma_inner, GammaMap};
use crate::pick::validate_nodes;
use crate::ratfun::{BlaschkeProduct, Poly, RationalFn};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Tolerance of the Γ-inner check applied to every constructed map.
pub const BUILD_TOL: f64 = 1e-8;

/// Largest degree of ψ accepted by [`FamilySpec::HPsi`].
pub const MAX_PSI_DEGREE: usize = 20;

/// Margin kept below the sampled bound on r in [`FamilySpec::ScaleS`].
pub const SCALE_MARGIN: f64 = 1e-6;

const SCALE_ANGLES: usize = 512;
const SCALE_RADII: usize = 32;

/// A named family with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", content = "params", rename_all = "camelCase")]
pub enum FamilySpec {
    /// (φ + ψ, φψ).
    Symmetrize { phi: BlaschkeProduct, psi: BlaschkeProduct },
    /// (2υ, υ²).
    RoyalLift { upsilon: BlaschkeProduct },
    /// (½ s₁s₂, p₁p₂).
    SemigroupProduct { first: Box<FamilySpec>, second: Box<FamilySpec> },
    /// (r s, p), for 0 ≤ r up to the bound min{2/‖s‖∞, inf (1 − |p|²)/|s − s̄p|}.
    ScaleS { base: Box<FamilySpec>, r: f64 },
    /// h ∘ φ.
    ComposeInner { base: Box<FamilySpec>, phi: BlaschkeProduct },
    /// (ωp + ω̄, p) with |ω| = 1.
    SuperficialOf { omega: C64, p: BlaschkeProduct },
    /// (βλ + β̄, λ), |β| < 1.
    FlatGeodesic { beta: C64 },
    /// (2(1 − r)λ^{ν+1}, λ(λ^{2ν+1} + r)) / (1 + rλ^{2ν+1}), ν ≥ 1, 0 < r < 1.
    HNu { nu: usize, r: f64 },
    /// (λ + λψ, λ²ψ).
    HPsi { psi: BlaschkeProduct },
    /// (λ² + λ^{2j+3}, λ^{2j+5}), j ≥ 1.
    HJ { j: usize },
    /// (cλ, λ(λ − a)) / (1 − āλ), a ∈ D∖{0}, c real with |c| ≤ 2(1 − |a|).
    Surprise { a: C64, c: f64 },
}

fn invalid<T>(msg: String) -> Result<T> {
    Err(Error::InvalidParameter(msg))
}

fn rat(b: &BlaschkeProduct) -> RationalFn {
    b.to_rational()
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn lambda_pow(k: usize) -> Poly {
    Poly::monomial(real(1.0), k)
}

/// Builds the map described by `spec` and checks that it is Γ-inner.
pub fn build(spec: &FamilySpec) -> Result<GammaMap> {
    let h = build_unchecked(spec)?;
    let check = verify_gamma_inner(&h, BUILD_TOL);
    if !check.is_gamma_inner {
        return Err(Error::Validation(format!(
            "{} is not Γ-inner: {}",
            spec.name(),
            check.reason.unwrap_or_default()
        )));
    }
    Ok(h)
}

fn build_unchecked(spec: &FamilySpec) -> Result<GammaMap> {
    match spec {
        FamilySpec::Symmetrize { phi, psi } => {
            let (f, g) = (rat(phi), rat(psi));
            GammaMap::new(f.add(&g), f.mul(&g))
        }
        FamilySpec::RoyalLift { upsilon } => {
            let u = rat(upsilon);
            GammaMap::new(u.scale(real(2.0)), u.mul(&u))
        }
        FamilySpec::SemigroupProduct { first, second } => {
            let (a, b) = (build(first)?, build(second)?);
            GammaMap::new(a.s.mul(&b.s).scale(real(0.5)), a.p.mul(&b.p))
        }
        FamilySpec::ScaleS { base, r } => {
            let h = build(base)?;
            let bound = scale_bound(&h);
            if !(*r >= 0.0 && *r <= bound - SCALE_MARGIN) {
                return invalid(format!("r = {r} exceeds the admissible bound {bound} less the margin {SCALE_MARGIN:e}"));
            }
            GammaMap::new(h.s.scale(real(*r)), h.p.clone())
        }
        FamilySpec::ComposeInner { base, phi } => {
            let h = build(base)?;
            let f = rat(phi);
            GammaMap::new(h.s.compose(&f)?, h.p.compose(&f)?)
        }
        FamilySpec::SuperficialOf { omega, p } => {
            if (omega.norm() - 1.0).abs() > 1e-12 {
                return invalid(format!("|ω| = {} is not 1", omega.norm()));
            }
            let p = rat(p);
            GammaMap::new(p.scale(*omega).add(&RationalFn::constant(omega.conj())), p)
        }
        FamilySpec::FlatGeodesic { beta } => {
            if !(beta.norm() < 1.0) {
                return invalid(format!("|β| = {} is not below 1", beta.norm()));
            }
            GammaMap::new(
                RationalFn::from_poly(Poly::new(vec![beta.conj(), *beta])),
                RationalFn::identity(),
            )
        }
        FamilySpec::HNu { nu, r } => {
            if *nu < 1 || !(*r > 0.0 && *r < 1.0) {
                return invalid(format!("h_ν needs ν ≥ 1 and 0 < r < 1, got ν = {nu}, r = {r}"));
            }
            let k = 2 * nu + 1;
            let den = &Poly::one() + &lambda_pow(k).scale(real(*r));
            let s = RationalFn::new(lambda_pow(nu + 1).scale(real(2.0 * (1.0 - r))), den.clone())?;
            let p = RationalFn::new(&lambda_pow(k + 1) + &lambda_pow(1).scale(real(*r)), den)?;
            GammaMap::new(s, p)
        }
        FamilySpec::HPsi { psi } => {
            if psi.degree() > MAX_PSI_DEGREE {
                return invalid(format!("deg ψ = {} exceeds {MAX_PSI_DEGREE}", psi.degree()));
            }
            let l = RationalFn::identity();
            let f = rat(psi);
            GammaMap::new(l.add(&l.mul(&f)), l.mul(&l).mul(&f))
        }
        FamilySpec::HJ { j } => {
            if *j < 1 {
                return invalid("h_j needs j ≥ 1".into());
            }
            GammaMap::new(
                RationalFn::from_poly(&lambda_pow(2) + &lambda_pow(2 * j + 3)),
                RationalFn::from_poly(lambda_pow(2 * j + 5)),
            )
        }
        FamilySpec::Surprise { a, c } => {
            if !(a.norm() > 0.0 && a.norm() < 1.0) {
                return invalid(format!("a = {a} must lie in the punctured disc"));
            }
            if c.abs() > 2.0 * (1.0 - a.norm()) + 1e-15 {
                return invalid(format!("|c| = {} exceeds 2(1 − |a|) = {}", c.abs(), 2.0 * (1.0 - a.norm())));
            }
            let den = Poly::new(vec![real(1.0), -a.conj()]);
            GammaMap::new(
                RationalFn::new(lambda_pow(1).scale(real(*c)), den.clone())?,
                RationalFn::new(Poly::new(vec![real(0.0), -*a, real(1.0)]), den)?,
            )
        }
    }
}

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Symmetrize { .. } => "symmetrize",
            FamilySpec::RoyalLift { .. } => "royalLift",
            FamilySpec::SemigroupProduct { .. } => "semigroupProduct",
            FamilySpec::ScaleS { .. } => "scaleS",
            FamilySpec::ComposeInner { .. } => "composeInner",
            FamilySpec::SuperficialOf { .. } => "superficialOf",
            FamilySpec::FlatGeodesic { .. } => "flatGeodesic",
            FamilySpec::HNu { .. } => "hNu",
            FamilySpec::HPsi { .. } => "hPsi",
            FamilySpec::HJ { .. } => "hJ",
            FamilySpec::Surprise { .. } => "surprise",
        }
    }
}

/// Sampled value of min{2/‖s‖∞, inf_D (1 − |p|²)/|s − s̄p|}, the largest r
/// for which (r s, p) stays in Γ.
pub fn scale_bound(h: &GammaMap) -> f64 {
    let mut sup_s: f64 = 0.0;
    let mut inf_ratio = f64::INFINITY;
    for a in 0..SCALE_ANGLES {
        let t = TAU * a as f64 / SCALE_ANGLES as f64;
        sup_s = sup_s.max(h.s.eval(C64::from_polar(1.0, t)).norm());
        for k in 0..SCALE_RADII {
            let z = C64::from_polar(k as f64 / SCALE_RADII as f64, t);
            let pt = h.eval(z);
            let defect = pt.defect();
            if defect > 1e-14 {
                inf_ratio = inf_ratio.min((1.0 - pt.p.norm_sqr()) / defect);
            }
        }
    }
    let s_bound = if sup_s > 0.0 { 2.0 / sup_s } else { f64::INFINITY };
    s_bound.min(inf_ratio)
}

/// Γ-data λ_j ↦ h(λ_j). The data require open targets exactly when every
/// sampled target lies in G.
pub fn sample_data(h: &GammaMap, nodes: &[C64]) -> Result<GammaData> {
    validate_nodes(nodes)?;
    let targets: Vec<_> = nodes.iter().map(|&z| h.eval(z)).collect();
    let mut open = true;
    for (j, t) in targets.iter().enumerate() {
        let m = membership(t);
        if !m.closed_gamma {
            return Err(Error::Validation(format!("h(λ_{j}) = ({}, {}) is outside Γ", t.s, t.p)));
        }
        open &= m.open_g;
    }
    GammaData::with_closure(nodes.to_vec(), targets, open)
}
