//! Membership of rational Γ-inner maps in the classes E_{νk}: h ∈ E_{νk}
//! when Φ∘(m, h) = (2mp − s)/(2 − ms) is a Blaschke product of degree at
//! most k − 1 for some m of degree at most ν.
//!
//! Φ∘(υ, h) has degree d(υ) + d(p) minus the number of cancellations, and a
//! cancellation happens exactly at a royal node ζ ∈ T with υ(ζ) = ½·s̄(ζ),
//! at most one per node. Deciding a cell is therefore a boundary
//! interpolation problem on the royal nodes.

use crate::gamma_core::{is_superficial, royal_nodes, GammaMap, RoyalAnalysis, RoyalNode};
use crate::ratfun::{
    boundary_interpolant, classify_inner, mobius_from_boundary_triple, BlaschkeProduct, Poly, RationalFn,
    PAIRING_TOL,
};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// |υ(ζ) − ½s̄(ζ)| below which a royal node counts as matched.
pub const ROYAL_MATCH_TOL: f64 = 1e-8;

/// Cap on the royal-node subsets tried per degree in the search branch.
pub const MAX_SUBSETS: usize = 500;

/// Φ∘(υ, h) in lowest terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PhiComposition {
    pub result: RationalFn,
    /// The result as a Blaschke product, when it is one.
    pub inner: Option<BlaschkeProduct>,
    /// d(υ) + d(p) − d(result).
    pub cancellations: usize,
    /// Common roots removed on the unit circle during reduction.
    pub circle_pairings: usize,
}

/// Forms (2υp − s)/(2 − υs) over the common denominator of h and reduces it.
///
/// With h = (S/D, P/D) and υ = U/V this is (2UP − SV)/(2VD − US).
pub fn phi_compose(upsilon: &BlaschkeProduct, h: &GammaMap) -> Result<PhiComposition> {
    let expected = upsilon.degree() + h.dp();
    if let RoyalAnalysis::RoyalMap { f } = royal_nodes(h)? {
        let result = f.scale(C64::new(-1.0, 0.0)).reduced()?;
        let cancellations = expected.saturating_sub(result.degree());
        return Ok(PhiComposition {
            inner: classify_inner(&result),
            result,
            cancellations,
            circle_pairings: 0,
        });
    }
    let cf = h.common_form();
    let u = upsilon.to_rational();
    let (un, ud) = (u.num(), u.den());
    let two = C64::new(2.0, 0.0);
    let num = &(un * &cf.p).scale(two) - &(&cf.s * ud);
    let den = &(ud * &cf.d).scale(two) - &(un * &cf.s);
    if den.is_zero() {
        return Err(Error::Validation("2 − υs vanishes identically".into()));
    }
    let red = RationalFn::new(num, den)?.reduce(PAIRING_TOL)?;
    let circle_pairings = red.common_roots.iter().filter(|z| (z.norm() - 1.0).abs() < 1e-6).count();
    let result = red.reduced;
    let d = result.degree();
    if d > expected {
        return Err(Error::Validation(format!(
            "reduced degree {d} exceeds d(υ) + d(p) = {expected}"
        )));
    }
    Ok(PhiComposition {
        inner: classify_inner(&result),
        result,
        cancellations: expected - d,
        circle_pairings,
    })
}

/// Whether υ meets the cancellation condition at one royal node.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CancellationRecord {
    pub node: RoyalNode,
    pub satisfied: bool,
}

/// One record per royal node of h on the circle; empty when h is not full
/// or is a royal map.
pub fn cancellation_points(upsilon: &BlaschkeProduct, h: &GammaMap) -> Result<Vec<CancellationRecord>> {
    Ok(royal_nodes(h)?
        .nodes()
        .iter()
        .map(|&node| CancellationRecord {
            node,
            satisfied: (upsilon.eval(node.zeta) - node.target).norm() < ROYAL_MATCH_TOL,
        })
        .collect())
}

/// How a table cell was decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Method {
    /// h = (2f, f²): Φ∘(m, h) = −f for every m.
    RoyalMap,
    /// d(p) ≤ k − 1, so any constant m works.
    DegreeBound,
    /// No royal nodes on T, so no cancellations are possible.
    NotFull,
    /// Constant m equal to a repeated royal target.
    ConstantTarget,
    /// Rotation m = tζ̄λ through one royal node.
    SingleNode,
    /// Automorphism through two royal nodes and an arc midpoint.
    NodePair,
    /// Automorphism through three royal nodes.
    MobiusTriple,
    /// Degree-δ boundary interpolation on a subset of royal nodes.
    BoundaryInterpolation,
    /// Every candidate degree was ruled out.
    Exhausted,
    /// Copied from a smaller cell (E_{νk} ⊂ E_{ν,k+1}, E_{νk} ⊂ E_{ν+1,k}).
    Monotone,
}

/// One cell of the E-class table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EClassCell {
    pub nu: usize,
    pub k: usize,
    pub in_e: bool,
    /// Decided by a finite argument rather than a search.
    pub exact: bool,
    pub witness_m: Option<BlaschkeProduct>,
    pub resulting_q: Option<BlaschkeProduct>,
    pub method: Method,
}

/// Per-map data shared by all cells.
#[derive(Clone, Debug)]
pub struct EClassContext {
    pub h: GammaMap,
    pub dp: usize,
    pub royal: RoyalAnalysis,
}

impl EClassContext {
    pub fn new(h: &GammaMap) -> Result<Self> {
        Ok(EClassContext { h: h.clone(), dp: h.dp(), royal: royal_nodes(h)? })
    }

    fn verify(&self, m: &BlaschkeProduct, k: usize) -> Option<BlaschkeProduct> {
        let c = phi_compose(m, &self.h).ok()?;
        c.inner.filter(|q| q.degree() < k)
    }

    fn matches(&self, m: &BlaschkeProduct) -> usize {
        self.royal
            .nodes()
            .iter()
            .filter(|n| (m.eval(n.zeta) - n.target).norm() < ROYAL_MATCH_TOL)
            .count()
    }
}

/// Decides h ∈ E_{νk}.
pub fn in_enuk(h: &GammaMap, nu: usize, k: usize) -> Result<EClassCell> {
    in_enuk_ctx(&EClassContext::new(h)?, nu, k)
}

pub fn in_enuk_ctx(ctx: &EClassContext, nu: usize, k: usize) -> Result<EClassCell> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let cell = |in_e, exact, m: Option<BlaschkeProduct>, q, method| EClassCell {
        nu,
        k,
        in_e,
        exact,
        witness_m: m,
        resulting_q: q,
        method,
    };
    if let RoyalAnalysis::RoyalMap { f } = &ctx.royal {
        let m = BlaschkeProduct::constant(0.0);
        let q = ctx.verify(&m, usize::MAX);
        let in_e = f.degree() < k;
        return Ok(if in_e {
            cell(true, true, Some(m), q, Method::RoyalMap)
        } else {
            cell(false, true, None, None, Method::RoyalMap)
        });
    }
    if ctx.dp < k {
        for phase in [0.0, 1.0, 2.0, 3.0] {
            let m = BlaschkeProduct::constant(phase);
            if let Some(q) = ctx.verify(&m, k) {
                return Ok(cell(true, true, Some(m), Some(q), Method::DegreeBound));
            }
        }
        return Err(Error::Validation("Φ∘(ω, h) is not a Blaschke product for any tested ω".into()));
    }
    let nodes = ctx.royal.nodes();
    if nodes.is_empty() {
        return Ok(cell(false, true, None, None, Method::NotFull));
    }
    let mut exact = true;
    for delta in 0..=nu {
        let needed = delta + ctx.dp + 1 - k;
        if needed > nodes.len() {
            continue;
        }
        let found = match delta {
            0 => constant_witness(ctx, needed, k),
            1 => degree_one_witness(ctx, needed, k)?,
            _ => {
                let (w, e) = higher_witness(ctx, delta, needed, k);
                exact &= e;
                w
            }
        };
        if let Some((m, q, method)) = found {
            return Ok(cell(true, true, Some(m), Some(q), method));
        }
    }
    Ok(cell(false, exact, None, None, Method::Exhausted))
}

type Witness = (BlaschkeProduct, BlaschkeProduct, Method);

fn constant_witness(ctx: &EClassContext, needed: usize, k: usize) -> Option<Witness> {
    let nodes = ctx.royal.nodes();
    for n in nodes {
        let group = nodes.iter().filter(|o| (o.target - n.target).norm() < ROYAL_MATCH_TOL).count();
        if group >= needed {
            let m = BlaschkeProduct::constant_value(n.target);
            if let Some(q) = ctx.verify(&m, k) {
                return Some((m, q, Method::ConstantTarget));
            }
        }
    }
    None
}

fn arc_midpoint(a: C64, b: C64) -> C64 {
    let span = (b / a).arg().rem_euclid(std::f64::consts::TAU);
    a * C64::from_polar(1.0, span / 2.0)
}

fn degree_one_witness(ctx: &EClassContext, needed: usize, k: usize) -> Result<Option<Witness>> {
    let nodes = ctx.royal.nodes();
    let n = nodes.len();
    match needed {
        1 => {
            for node in nodes {
                let m = BlaschkeProduct::monomial(1, (node.target * node.zeta.conj()).arg());
                if let Some(q) = ctx.verify(&m, k) {
                    return Ok(Some((m, q, Method::SingleNode)));
                }
            }
        }
        2 => {
            for a in 0..n {
                for b in a + 1..n {
                    let (na, nb) = (&nodes[a], &nodes[b]);
                    if (na.target - nb.target).norm() < ROYAL_MATCH_TOL {
                        continue;
                    }
                    let zc = arc_midpoint(na.zeta, nb.zeta);
                    let tc = arc_midpoint(na.target, nb.target);
                    for t in [tc, -tc] {
                        let src = [na.zeta, nb.zeta, zc];
                        let dst = [na.target, nb.target, t];
                        if let Some(m) = mobius_from_boundary_triple(&src, &dst)? {
                            if let Some(q) = ctx.verify(&m, k) {
                                return Ok(Some((m, q, Method::NodePair)));
                            }
                        }
                    }
                }
            }
        }
        _ => {
            for a in 0..n {
                for b in a + 1..n {
                    for c in b + 1..n {
                        let src = [nodes[a].zeta, nodes[b].zeta, nodes[c].zeta];
                        let dst = [nodes[a].target, nodes[b].target, nodes[c].target];
                        let Some(m) = mobius_from_boundary_triple(&src, &dst)? else { continue };
                        if ctx.matches(&m) >= needed {
                            if let Some(q) = ctx.verify(&m, k) {
                                return Ok(Some((m, q, Method::MobiusTriple)));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Lexicographic k-subsets of 0..n, at most `cap` of them; the flag says
/// whether the enumeration was complete.
fn subsets(n: usize, k: usize, cap: usize) -> (Vec<Vec<usize>>, bool) {
    let mut out = Vec::new();
    if k > n {
        return (out, true);
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if out.len() == cap {
            return (out, false);
        }
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return (out, true);
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Degree δ ≥ 2. With at least 2δ + 1 required matches every witness is the
/// unique interpolant of some (2δ+1)-subset, so the search is exhaustive
/// when each subset has a one-dimensional solution space.
fn higher_witness(ctx: &EClassContext, delta: usize, needed: usize, k: usize) -> (Option<Witness>, bool) {
    let nodes = ctx.royal.nodes();
    let size = needed.min(2 * delta + 1);
    let (sets, complete) = subsets(nodes.len(), size, MAX_SUBSETS);
    let mut exact = complete && size == 2 * delta + 1;
    for set in sets {
        let z: Vec<C64> = set.iter().map(|&i| nodes[i].zeta).collect();
        let t: Vec<C64> = set.iter().map(|&i| nodes[i].target).collect();
        let r = boundary_interpolant(&z, &t, delta);
        exact &= r.exact;
        if let Some(m) = r.solution {
            if ctx.matches(&m) >= needed {
                if let Some(q) = ctx.verify(&m, k) {
                    return (Some((m, q, Method::BoundaryInterpolation)), true);
                }
            }
        }
    }
    (None, exact)
}

/// A k-extremality certificate: h ∈ E_{νk} and h is not superficial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct KExtremalCertificate {
    pub k: usize,
    pub nu: usize,
    pub witness_m: Option<BlaschkeProduct>,
    pub basis: String,
}

/// Consistency of the table with the descriptions of the first two columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ColumnChecks {
    /// h ∈ E_{ν1} exactly when h is superficial, for every ν in the table.
    pub column1: bool,
    /// h ∈ E_{ν2} exactly when h is superficial or a complex geodesic.
    pub column2: bool,
}

/// Full classification of one map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EClassReport {
    pub map: GammaMap,
    pub dp: usize,
    pub royal: RoyalAnalysis,
    pub memberships: Vec<EClassCell>,
    pub superficial: bool,
    /// ω with s = ωp + ω̄, when superficial.
    pub omega: Option<C64>,
    /// In E_{02} and not superficial.
    pub geodesic: bool,
    pub k_extremal_certificates: Vec<KExtremalCertificate>,
    pub column_checks: ColumnChecks,
    /// Implications that hold only under the open interpolation conjecture;
    /// recorded, never used.
    pub conditional_note: String,
}

impl EClassReport {
    pub fn cell(&self, nu: usize, k: usize) -> Option<&EClassCell> {
        self.memberships.iter().find(|c| c.nu == nu && c.k == k)
    }
}

/// Fills the table ν ≤ `nu_max`, 1 ≤ k ≤ `k_max` and derives the
/// superficial, geodesic and k-extremal flags from it.
pub fn classify(h: &GammaMap, nu_max: usize, k_max: usize) -> Result<EClassReport> {
    let ctx = EClassContext::new(h)?;
    let k_max = k_max.max(2);
    let mut cells: Vec<EClassCell> = Vec::new();
    for nu in 0..=nu_max {
        for k in 1..=k_max {
            let smaller = cells
                .iter()
                .find(|c| c.in_e && ((c.nu + 1 == nu && c.k == k) || (c.nu == nu && c.k + 1 == k)))
                .cloned();
            let cell = match smaller {
                Some(c) => EClassCell { nu, k, method: Method::Monotone, ..c },
                None => in_enuk_ctx(&ctx, nu, k)?,
            };
            cells.push(cell);
        }
    }
    // an exact exclusion excludes every smaller cell exactly
    let exact_out: Vec<(usize, usize)> = cells.iter().filter(|c| !c.in_e && c.exact).map(|c| (c.nu, c.k)).collect();
    for c in cells.iter_mut().filter(|c| !c.in_e) {
        if exact_out.iter().any(|&(n, k)| c.nu <= n && c.k <= k) {
            c.exact = true;
        }
    }

    let omega = is_superficial(h);
    let superficial = omega.is_some();
    let in_cell = |nu: usize, k: usize| cells.iter().any(|c| c.nu == nu && c.k == k && c.in_e);
    let geodesic = in_cell(0, 2) && !superficial;
    let mut certs = Vec::new();
    if !superficial {
        for k in 2..=k_max {
            if let Some(c) = cells.iter().find(|c| c.k == k && c.in_e) {
                certs.push(KExtremalCertificate {
                    k,
                    nu: c.nu,
                    witness_m: c.witness_m.clone(),
                    basis: format!("h ∈ E_{{{},{k}}} and h is not superficial", c.nu),
                });
            }
        }
    }
    let column1 = (0..=nu_max).all(|nu| in_cell(nu, 1) == superficial);
    let column2 = (0..=nu_max).all(|nu| in_cell(nu, 2) == (superficial || geodesic));
    Ok(EClassReport {
        map: h.clone(),
        dp: ctx.dp,
        royal: ctx.royal,
        memberships: cells,
        superficial,
        omega,
        geodesic,
        k_extremal_certificates: certs,
        column_checks: ColumnChecks { column1, column2 },
        conditional_note: "if the Γ-interpolation conjecture holds, every rational n-extremal Γ-inner map lies in \
                           E_{n−2,n}; this is not asserted here"
            .into(),
    })
}

/// d(p) ≤ 2n − 2, the degree bound for members of E_{νn} that are not
/// superficial. Superficial maps lie in E_{ν1} for every d(p), through a
/// constant witness with mq ≡ −1.
pub fn degree_bound_check(h: &GammaMap, n: usize) -> bool {
    h.dp() + 2 <= 2 * n
}

/// Numerator of Φ∘(υ, h) before reduction, for derivative checks at royal
/// nodes.
pub fn unreduced_numerator(upsilon: &BlaschkeProduct, h: &GammaMap) -> Poly {
    let cf = h.common_form();
    let u = upsilon.to_rational();
    &(u.num() * &cf.p).scale(C64::new(2.0, 0.0)) - &(&cf.s * u.den())
}
