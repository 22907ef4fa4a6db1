use super::point::GammaPoint;
use crate::ratfun::{classify_inner, BlaschkeProduct, Poly, RationalFn, COEFF_NOISE};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// A pair h = (s, p) of rational functions, both stored reduced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGammaMap")]
pub struct GammaMap {
    pub s: RationalFn,
    pub p: RationalFn,
}

#[derive(Deserialize)]
struct RawGammaMap {
    s: RationalFn,
    p: RationalFn,
}

impl TryFrom<RawGammaMap> for GammaMap {
    type Error = Error;
    fn try_from(r: RawGammaMap) -> Result<Self> {
        GammaMap::new(r.s, r.p)
    }
}

/// s = S/D and p = P/D over one polynomial denominator D.
#[derive(Clone, Debug)]
pub struct CommonForm {
    pub s: Poly,
    pub p: Poly,
    pub d: Poly,
}

impl GammaMap {
    pub fn new(s: RationalFn, p: RationalFn) -> Result<Self> {
        Ok(GammaMap {
            s: s.reduced()?,
            p: p.reduced()?,
        })
    }

    pub fn eval(&self, z: C64) -> GammaPoint {
        GammaPoint::new(self.s.eval(z), self.p.eval(z))
    }

    /// d(p), the degree of the second component.
    pub fn dp(&self) -> usize {
        self.p.degree()
    }

    /// Writes s and p over a common denominator, using the denominator of
    /// p when it is divisible by that of s.
    pub fn common_form(&self) -> CommonForm {
        let d = self.p.den().clone();
        let lifted = self.s.num() * &d;
        let (q, r) = lifted.div_rem(self.s.den());
        if r.max_abs() <= 1e-9 * lifted.max_abs().max(1e-300) {
            return CommonForm {
                s: q.cleaned(COEFF_NOISE),
                p: self.p.num().clone(),
                d,
            };
        }
        CommonForm {
            s: self.s.num() * self.p.den(),
            p: self.p.num() * self.s.den(),
            d: self.s.den() * self.p.den(),
        }
    }
}

const CIRCLE_CHECK_SAMPLES: usize = 256;

/// Diagnostics of [`verify_gamma_inner`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GammaInnerCheck {
    pub is_gamma_inner: bool,
    /// Smallest modulus among the poles of s and p (∞ when there are none).
    pub min_pole_modulus: f64,
    pub max_abs_p_deviation: f64,
    pub max_abs_s: f64,
    pub max_symmetry_defect: f64,
    pub reason: Option<String>,
}

/// Bound on the rounding error of evaluating f = N/D at z.
fn rounding_error(f: &RationalFn, z: C64) -> f64 {
    let d = f.den().eval(z).norm();
    if d == 0.0 {
        return f64::INFINITY;
    }
    let n = (f.num().degree() + f.den().degree() + 1) as f64;
    let kappa = (f.num().eval_scale(z) + f.eval(z).norm() * f.den().eval_scale(z)) / d;
    16.0 * n * f64::EPSILON * kappa
}

/// Checks that h is analytic on the closed disc with h(T) ⊂ bΓ, which
/// makes it Γ-inner.
pub fn verify_gamma_inner(h: &GammaMap, tol: f64) -> GammaInnerCheck {
    let mut poles = Vec::new();
    let mut reason = None;
    for (name, f) in [("p", &h.p), ("s", &h.s)] {
        match f.den().roots() {
            Ok(r) => poles.extend(r),
            Err(e) => reason = Some(format!("root finding on the denominator of {name}: {e}")),
        }
    }
    let min_pole_modulus = poles.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    // Each deviation is measured beyond the rounding error of evaluating the
    // monomial forms, which grows with their condition number.
    let (mut dp, mut ms, mut sym) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..CIRCLE_CHECK_SAMPLES {
        let z = C64::from_polar(1.0, TAU * (k as f64 + 0.5) / CIRCLE_CHECK_SAMPLES as f64);
        let pt = h.eval(z);
        let (es, ep) = (rounding_error(&h.s, z), rounding_error(&h.p, z));
        dp = dp.max((pt.p.norm() - 1.0).abs() - ep);
        ms = ms.max(pt.s.norm() - es);
        sym = sym.max(pt.defect() - 2.0 * es - pt.s.norm() * ep);
    }
    if reason.is_none() {
        if min_pole_modulus <= 1.0 + 1e-10 {
            reason = Some(format!("pole of modulus {min_pole_modulus} in the closed disc"));
        } else if dp > tol {
            reason = Some(format!("|p| deviates from 1 by {dp} on the circle"));
        } else if ms > 2.0 + tol {
            reason = Some(format!("|s| reaches {ms} > 2 on the circle"));
        } else if sym > tol {
            reason = Some(format!("|s - conj(s) p| reaches {sym} on the circle"));
        }
    }
    GammaInnerCheck {
        is_gamma_inner: reason.is_none(),
        min_pole_modulus,
        max_abs_p_deviation: dp,
        max_abs_s: ms,
        max_symmetry_defect: sym,
        reason,
    }
}

/// A point ζ ∈ T with h(ζ) = (2ω̄, ω̄²); `target` = ½·conj(s(ζ)) = ω.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoyalNode {
    pub zeta: C64,
    pub omega: C64,
    pub target: C64,
}

/// Royal structure of a Γ-inner map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum RoyalAnalysis {
    /// s² − 4p ≡ 0, so h = (2f, f²) with f = s/2.
    RoyalMap { f: RationalFn },
    Nodes { nodes: Vec<RoyalNode> },
}

impl RoyalAnalysis {
    pub fn nodes(&self) -> &[RoyalNode] {
        match self {
            RoyalAnalysis::Nodes { nodes } => nodes,
            RoyalAnalysis::RoyalMap { .. } => &[],
        }
    }

    pub fn is_royal_map(&self) -> bool {
        matches!(self, RoyalAnalysis::RoyalMap { .. })
    }
}

const ROYAL_SAMPLES: usize = 64;
const ROYAL_MAP_TOL: f64 = 1e-9;

/// Numerator of s² − 4p over the common denominator.
pub fn royal_polynomial(h: &GammaMap) -> (Poly, f64) {
    let cf = h.common_form();
    let s2 = &cf.s * &cf.s;
    let pd = (&cf.p * &cf.d).scale(C64::new(4.0, 0.0));
    let scale = s2.max_abs().max(pd.max_abs());
    (&s2 - &pd, scale)
}

/// Royal nodes on the circle: unit-circle roots of the numerator of
/// s² − 4p, filtered by ||ζ| − 1| < 1e−7 and polished on the circle.
///
/// s² − 4p ≡ 0 is decided on circle samples, where both terms are O(1),
/// since the coefficients of the common form can be badly scaled.
pub fn royal_nodes(h: &GammaMap) -> Result<RoyalAnalysis> {
    let (q, _) = royal_polynomial(h);
    let royal = (0..ROYAL_SAMPLES).all(|k| {
        let z = C64::from_polar(1.0, TAU * (k as f64 + 0.5) / ROYAL_SAMPLES as f64);
        let s = h.s.eval(z);
        (s * s - h.p.eval(z) * 4.0).norm() <= ROYAL_MAP_TOL
    });
    if royal {
        return Ok(RoyalAnalysis::RoyalMap {
            f: h.s.scale(C64::new(0.5, 0.0)),
        });
    }
    let q = q.cleaned(COEFF_NOISE);
    let mut nodes: Vec<RoyalNode> = Vec::new();
    for cl in q.root_clusters()? {
        if (cl.z.norm() - 1.0).abs() >= 1e-7 {
            continue;
        }
        let g = q.nth_derivative(cl.mult - 1);
        let dg = g.derivative();
        let mut zeta = cl.z / cl.z.norm();
        for _ in 0..3 {
            let d = dg.eval(zeta);
            if d.norm() == 0.0 {
                break;
            }
            let cand = zeta - g.eval(zeta) / d;
            let cand = cand / cand.norm();
            if g.eval(cand).norm() < g.eval(zeta).norm() {
                zeta = cand;
            } else {
                break;
            }
        }
        if nodes.iter().any(|n| (n.zeta - zeta).norm() < 1e-8) {
            continue;
        }
        let s = h.s.eval(zeta);
        let omega = s.conj() * 0.5;
        let omega = omega / omega.norm();
        nodes.push(RoyalNode { zeta, omega, target: omega });
    }
    nodes.sort_by(|a, b| a.zeta.arg().total_cmp(&b.zeta.arg()));
    Ok(RoyalAnalysis::Nodes { nodes })
}

/// ‖s‖∞ = 2, detected through royal nodes.
pub fn is_full(h: &GammaMap) -> Result<bool> {
    Ok(match royal_nodes(h)? {
        RoyalAnalysis::RoyalMap { .. } => h.dp() > 0,
        RoyalAnalysis::Nodes { nodes } => !nodes.is_empty(),
    })
}

/// Returns ω ∈ T with s ≡ ωp + ω̄, if any.
///
/// Over the common denominator this reads S = a(P + D) + ib(P − D) with
/// ω = a + ib, a real least-squares problem on the coefficients.
pub fn is_superficial(h: &GammaMap) -> Option<C64> {
    let cf = h.common_form();
    let u = &cf.p + &cf.d;
    let v = (&cf.p - &cf.d).scale(C64::new(0.0, 1.0));
    let n = cf.s.coeffs().len().max(u.coeffs().len()).max(v.coeffs().len());
    let dot = |x: &Poly, y: &Poly| -> f64 { (0..n).map(|k| (x.coeff(k).conj() * y.coeff(k)).re).sum() };
    let (uu, uv, vv) = (dot(&u, &u), dot(&u, &v), dot(&v, &v));
    let (us, vs) = (dot(&u, &cf.s), dot(&v, &cf.s));
    let det = uu * vv - uv * uv;
    let scale = uu.max(vv).max(1e-300);
    let candidates: Vec<(f64, f64)> = if det.abs() > 1e-12 * scale * scale {
        vec![((us * vv - vs * uv) / det, (vs * uu - us * uv) / det)]
    } else {
        // u and v are parallel (p constant): s = (aα + bβ)e along e, with a² + b² = 1
        let (e, ee, es) = if uu >= vv { (&u, uu, us) } else { (&v, vv, vs) };
        if ee == 0.0 {
            return None;
        }
        let (alpha, beta, gamma) = (dot(e, &u) / ee, dot(e, &v) / ee, es / ee);
        let r = alpha.hypot(beta);
        if r == 0.0 || (gamma / r).abs() > 1.0 + 1e-9 {
            return None;
        }
        let phi = beta.atan2(alpha);
        let t = (gamma / r).clamp(-1.0, 1.0).acos();
        vec![((phi + t).cos(), (phi + t).sin()), ((phi - t).cos(), (phi - t).sin())]
    };
    let tol = 1e-9 * (cf.s.max_abs() + u.max_abs() + v.max_abs()).max(1.0);
    candidates.into_iter().find_map(|(a, b)| {
        let omega = C64::new(a, b);
        if (omega.norm() - 1.0).abs() > 1e-8 {
            return None;
        }
        let resid = &cf.s - &(&u.scale(C64::new(a, 0.0)) + &v.scale(C64::new(b, 0.0)));
        (resid.max_abs() <= tol).then(|| omega / omega.norm())
    })
}

/// Result of [`is_symmetrization`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Symmetrization {
    /// Inner φ, ψ with h = (φ + ψ, φψ), ordered by degree.
    pub factors: Option<(BlaschkeProduct, BlaschkeProduct)>,
    pub diagnostic: String,
}

/// Square root of a polynomial that is a perfect square, by the power
/// series recurrence run from whichever end has the larger coefficient.
fn poly_sqrt(q: &Poly) -> Option<Poly> {
    let v = q.valuation();
    if v % 2 == 1 {
        return None;
    }
    let q = q.shift_down(v);
    let m = q.degree();
    if m % 2 == 1 {
        return None;
    }
    let reversed = q.leading().norm() > q.coeff(0).norm();
    let work = if reversed { q.reflect(m).conj_coeffs() } else { q.clone() };
    let c = work.coeffs();
    let half = m / 2;
    let mut g = vec![C64::new(0.0, 0.0); half + 1];
    g[0] = c[0].sqrt();
    for k in 1..=half {
        let cross: C64 = (1..k).map(|i| g[i] * g[k - i]).sum();
        g[k] = (c[k] - cross) / (g[0] * 2.0);
    }
    let g = Poly::new(g);
    let g = if reversed { g.reflect(half).conj_coeffs() } else { g };
    let resid = &(&g * &g) - &q;
    if resid.max_abs() > 1e-8 * q.max_abs() {
        return None;
    }
    Some(g.shift_up(v / 2))
}

/// Decides whether h = (φ + ψ, φψ) for inner φ, ψ, and constructs them.
///
/// The criterion is that s² − 4p has an analytic square root; for rational
/// Γ-inner h this is equivalent to the numerator of s² − 4p being a perfect
/// square, which is tested by an exact polynomial square root.
pub fn is_symmetrization(h: &GammaMap) -> Result<Symmetrization> {
    let cf = h.common_form();
    let (q, scale) = royal_polynomial(h);
    let g = if q.max_abs() <= 1e-12 * scale.max(1e-300) {
        Poly::zero()
    } else {
        match poly_sqrt(&q.cleaned(COEFF_NOISE)) {
            Some(g) => g,
            None => {
                return Ok(Symmetrization {
                    factors: None,
                    diagnostic: "numerator of s^2 - 4p is not a perfect square".into(),
                })
            }
        }
    };
    let two_d = cf.d.scale(C64::new(2.0, 0.0));
    let phi = RationalFn::new(&cf.s - &g, two_d.clone())?.reduced()?;
    let psi = RationalFn::new(&cf.s + &g, two_d)?.reduced()?;
    match (classify_inner(&phi), classify_inner(&psi)) {
        (Some(a), Some(b)) => {
            let pair = if a.degree() <= b.degree() { (a, b) } else { (b, a) };
            Ok(Symmetrization {
                factors: Some(pair),
                diagnostic: "square root found; both factors inner".into(),
            })
        }
        _ => Ok(Symmetrization {
            factors: None,
            diagnostic: "square root exists but the factors are not inner".into(),
        }),
    }
}

/// Decomposition p = c λ^k D̃_p / D_p, s = λ^ℓ N_s / D_p with D_p(0) = 1.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StructuralForm {
    /// Order of the zero of s at 0; `None` when s ≡ 0.
    pub ell: Option<usize>,
    pub ns: Option<Poly>,
    pub dp: Poly,
    pub c: C64,
    pub k: usize,
    /// Degree n of D_p.
    pub n: usize,
    /// Largest |b_j − c·conj(b_{n+k−2ℓ−j})|.
    pub symmetry_error: f64,
}

pub fn structural_form(h: &GammaMap) -> Result<StructuralForm> {
    let d0 = h.p.den().coeff(0);
    if d0.norm() < 1e-12 {
        return Err(Error::Validation("p has a pole at 0".into()));
    }
    let dp = h.p.den().scale(d0.inv());
    let np = h.p.num().scale(d0.inv()).cleaned(COEFF_NOISE);
    let n = dp.degree();
    let dt = dp.reflect(n);
    let k = np.valuation();
    let c = np.coeff(k) / dt.coeff(0);
    let expect = dt.shift_up(k).scale(c);
    let scale = np.max_abs().max(1.0);
    if (&np - &expect).max_abs() > 1e-8 * scale || (c.norm() - 1.0).abs() > 1e-8 {
        return Err(Error::Validation(
            "p is not of the form c λ^k D~/D; the input is not Γ-inner".into(),
        ));
    }
    let lifted = h.s.num() * &dp;
    let (big_s, rem) = lifted.div_rem(h.s.den());
    if rem.max_abs() > 1e-9 * lifted.max_abs().max(1e-300) {
        return Err(Error::Validation("a pole of s is not a pole of p".into()));
    }
    let big_s = big_s.cleaned(COEFF_NOISE);
    if big_s.is_zero() {
        return Ok(StructuralForm { ell: None, ns: None, dp, c, k, n, symmetry_error: 0.0 });
    }
    let ell = big_s.valuation();
    let ns = big_s.shift_down(ell);
    if 2 * ell > n + k || ns.degree() != n + k - 2 * ell {
        return Err(Error::Validation(format!(
            "degree pattern violated: ℓ = {ell}, n + k = {}, d(N_s) = {}",
            n + k,
            ns.degree()
        )));
    }
    let m = ns.degree();
    let symmetry_error = (0..=m)
        .map(|j| (ns.coeff(j) - c * ns.coeff(m - j).conj()).norm())
        .fold(0.0, f64::max);
    if symmetry_error > 1e-8 * ns.max_abs().max(1.0) {
        return Err(Error::Validation(format!(
            "coefficient symmetry of N_s violated by {symmetry_error}"
        )));
    }
    Ok(StructuralForm { ell: Some(ell), ns: Some(ns), dp, c, k, n, symmetry_error })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn poly_map(s: &[f64], p: &[f64]) -> GammaMap {
        GammaMap::new(
            RationalFn::from_poly(Poly::from_real(s)),
            RationalFn::from_poly(Poly::from_real(p)),
        )
        .unwrap()
    }

    #[test]
    fn verify_examples() {
        assert!(verify_gamma_inner(&poly_map(&[0.0, 2.0], &[0.0, 0.0, 1.0]), 1e-9).is_gamma_inner);
        assert!(!verify_gamma_inner(&poly_map(&[0.0, 3.0], &[0.0, 0.0, 1.0]), 1e-9).is_gamma_inner);
        let den = Poly::from_real(&[1.0, -0.5]);
        let s = RationalFn::new(Poly::from_real(&[0.0, 0.5]), den.clone()).unwrap();
        let p = RationalFn::new(Poly::from_real(&[0.0, -0.5, 1.0]), den).unwrap();
        let h = GammaMap::new(s, p).unwrap();
        assert!(verify_gamma_inner(&h, 1e-9).is_gamma_inner);
        let sf = structural_form(&h).unwrap();
        assert_eq!((sf.ell, sf.k, sf.n), (Some(1), 1, 1));
        assert!((sf.ns.unwrap().coeff(0) - 0.5).norm() < 1e-12);
        assert!((sf.dp.coeff(1) + 0.5).norm() < 1e-12);
        assert!((sf.c - 1.0).norm() < 1e-12);
    }

    #[test]
    fn superficial_and_symmetrization() {
        let w = is_superficial(&poly_map(&[1.0, 1.0], &[0.0, 1.0])).unwrap();
        assert!((w - 1.0).norm() < 1e-12);
        assert!(is_superficial(&poly_map(&[0.5, 0.5], &[0.0, 1.0])).is_none());
        assert!(is_superficial(&poly_map(&[0.0], &[0.0, 1.0])).is_none());

        let sym = is_symmetrization(&poly_map(&[0.0, 1.0, 1.0], &[0.0, 0.0, 0.0, 1.0])).unwrap();
        let (a, b) = sym.factors.unwrap();
        assert_eq!((a.degree(), b.degree()), (1, 2));
        let sym = is_symmetrization(&poly_map(&[0.0, 2.0], &[0.0, 0.0, 1.0])).unwrap();
        let (a, b) = sym.factors.unwrap();
        assert_eq!((a.degree(), b.degree()), (1, 1));
        assert!(is_symmetrization(&poly_map(&[0.5, 0.5], &[0.0, 1.0])).unwrap().factors.is_none());
    }

    #[test]
    fn royal_structure() {
        assert!(royal_nodes(&poly_map(&[0.0, 2.0], &[0.0, 0.0, 1.0])).unwrap().is_royal_map());
        assert!(!is_full(&poly_map(&[0.0], &[0.0, 0.0, 0.0, 1.0])).unwrap());
        assert!(!is_full(&poly_map(&[0.5, 0.5], &[0.0, 1.0])).unwrap());
        let nodes = royal_nodes(&poly_map(&[1.0, 1.0], &[0.0, 1.0])).unwrap();
        assert_eq!(nodes.nodes().len(), 1);
        assert!((nodes.nodes()[0].zeta - c(1.0, 0.0)).norm() < 1e-12);
    }
}
