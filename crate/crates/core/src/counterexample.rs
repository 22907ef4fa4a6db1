//! Γ-interpolation data that satisfy C_{ν−1} but not C_ν.
//!
//! Start from data sampled from h_ν at ν + 2 nodes. They satisfy C_ν
//! extremally at m = −λ^ν with auxiliary extremal q = −λ^{ν+1}. Inflating
//! the Φ-values q(λ_j) radially by (1 + ε) makes the Φ-data at m
//! unsolvable, and since w ↦ Φ(m(λ_j), (s, p_j)) is a Möbius map in s the
//! inflated values are pulled back to explicit targets s̃_j. For small ε the
//! strict inequality behind C_{ν−1} survives.

use crate::cnu::{check_cnu, pencil_matrix, x_norm, CnuReport, CnuStatus, GammaData, ViolationCertificate};
use crate::config::RunConfig;
use crate::families::{build, sample_data, FamilySpec};
use crate::gamma_core::{membership, GammaPoint};
use crate::linalg::hermitian_eigen;
use crate::ratfun::BlaschkeProduct;
use crate::cnu::nelder_mead::golden_max;
use crate::{Error, Result, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Required negative pencil eigenvalue at m.
pub const VIOLATION_EIG: f64 = 1e-6;
/// Required excess of ‖X(m)‖ over 1, twice the default search tolerance.
pub const VIOLATION_NORM: f64 = 2e-6;
/// Accepted C_0 scan minimum, relative to the largest pencil diagonal.
pub const SCAN_TOL: f64 = 1e-9;
/// Angles of the dense constant-ω scan used as C_0 evidence.
pub const SCAN_POINTS: usize = 4096;
pub const EPS_MAX: f64 = 0.2;
pub const BISECTION_STEPS: usize = 40;
/// Radius of the default nodes.
pub const NODE_RADIUS: f64 = 0.4;
/// Tolerance on ‖X(m)‖ − 1 for the unperturbed data.
const BASE_EXTREMAL_TOL: f64 = 1e-8;

/// How strong the C_{ν−1} evidence is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum EvidenceGrade {
    /// ν = 1: a dense scan of the one-parameter family of constants.
    DenseScan,
    /// ν ≥ 2: a budgeted search over Bl_{ν−1}.
    BudgetedSearch,
}

/// Minimum over a grid of constants ω of the smallest pencil eigenvalue.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OmegaScan {
    pub points: usize,
    pub min_eigenvalue: f64,
    /// Angle of ω at the minimum, after golden-section refinement.
    pub omega_angle: f64,
    /// Largest pencil diagonal entry seen; the acceptance band is relative
    /// to it.
    pub scale: f64,
}

impl OmegaScan {
    pub fn passes(&self) -> bool {
        self.min_eigenvalue >= -SCAN_TOL * self.scale
    }
}

/// Evidence that the perturbed data satisfy C_{ν−1}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LowerEvidence {
    pub grade: EvidenceGrade,
    pub report: CnuReport,
    pub scan: Option<OmegaScan>,
}

impl LowerEvidence {
    pub fn passes(&self) -> bool {
        !matches!(self.report.status, CnuStatus::Fails | CnuStatus::Inconclusive)
            && self.scan.as_ref().is_none_or(OmegaScan::passes)
    }
}

/// One bisection step on ε.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BisectionStep {
    pub epsilon: f64,
    pub violated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CounterexampleReport {
    pub nu: usize,
    pub r: f64,
    pub seed: u64,
    pub base: GammaData,
    pub perturbed: GammaData,
    pub epsilon: f64,
    /// −λ^ν.
    pub m: BlaschkeProduct,
    /// −λ^{ν+1}.
    pub q: BlaschkeProduct,
    pub violation: ViolationCertificate,
    pub lower_evidence: LowerEvidence,
    pub bisection: Vec<BisectionStep>,
}

/// ν + 2 points on the circle of radius 0.4, equally spaced, rotated by an
/// angle drawn from `seed`.
pub fn default_nodes(nu: usize, seed: u64) -> Vec<C64> {
    let rot = TAU * ChaCha8Rng::seed_from_u64(seed).gen::<f64>();
    let n = nu + 2;
    (0..n)
        .map(|j| C64::from_polar(NODE_RADIUS, rot + TAU * j as f64 / n as f64))
        .collect()
}

/// Targets (s̃_j, p_j) with Φ(m(λ_j), (s̃_j, p_j)) = (1 + ε) q(λ_j):
/// s̃ = 2(m p − w′)/(1 − w′ m).
pub fn perturbed_targets(
    base: &GammaData,
    m: &BlaschkeProduct,
    q: &BlaschkeProduct,
    epsilon: f64,
) -> Result<Vec<GammaPoint>> {
    base.nodes
        .iter()
        .zip(&base.targets)
        .map(|(&l, t)| {
            let mj = m.eval(l);
            let w = q.eval(l) * (1.0 + epsilon);
            let den = C64::new(1.0, 0.0) - w * mj;
            if den.norm() < 1e-12 {
                return Err(Error::PolePoint { z: mj, s: w });
            }
            Ok(GammaPoint::new((mj * t.p - w) * 2.0 / den, t.p))
        })
        .collect()
}

fn perturbed_data(base: &GammaData, m: &BlaschkeProduct, q: &BlaschkeProduct, epsilon: f64) -> Option<GammaData> {
    let targets = perturbed_targets(base, m, q, epsilon).ok()?;
    if !targets.iter().all(|t| membership(t).open_g) {
        return None;
    }
    GammaData::new(base.nodes.clone(), targets).ok()
}

fn violated(d: &GammaData, m: &BlaschkeProduct) -> bool {
    let eig = pencil_matrix(m, d).map(|p| hermitian_eigen(&p).min());
    let norm = x_norm(m, d);
    matches!((eig, norm), (Ok(e), Ok(n)) if e < -VIOLATION_EIG && n > 1.0 + VIOLATION_NORM)
}

/// Smallest pencil eigenvalue over constants ω = e^{iθ}, on a grid of
/// `points` angles refined by golden section around the worst angle.
pub fn omega_scan(d: &GammaData, points: usize) -> Result<OmegaScan> {
    let min_eig = |t: f64| -> f64 {
        pencil_matrix(&BlaschkeProduct::constant(t), d)
            .map(|p| hermitian_eigen(&p).min())
            .unwrap_or(f64::NEG_INFINITY)
    };
    let h = TAU / points as f64;
    let mut scale: f64 = 0.0;
    let mut worst = (f64::INFINITY, 0.0);
    for k in 0..points {
        let t = h * k as f64;
        let p = pencil_matrix(&BlaschkeProduct::constant(t), d)?;
        scale = scale.max((0..p.dim()).map(|i| p[(i, i)].norm()).fold(0.0, f64::max));
        let e = hermitian_eigen(&p).min();
        if e < worst.0 {
            worst = (e, t);
        }
    }
    let (t, neg, _) = golden_max(&|t: f64| -min_eig(t), worst.1 - h, worst.1 + h, 1e-12);
    if -neg < worst.0 {
        worst = (-neg, t.rem_euclid(TAU));
    }
    Ok(OmegaScan { points, min_eigenvalue: worst.0, omega_angle: worst.1, scale })
}

fn lower_evidence(d: &GammaData, nu: usize, cfg: &RunConfig, scan_points: usize) -> Result<LowerEvidence> {
    let report = check_cnu(d, nu - 1, &cfg.search())?;
    if nu == 1 {
        Ok(LowerEvidence {
            grade: EvidenceGrade::DenseScan,
            report,
            scan: Some(omega_scan(d, scan_points)?),
        })
    } else {
        Ok(LowerEvidence { grade: EvidenceGrade::BudgetedSearch, report, scan: None })
    }
}

/// Builds the counterexample for ν ≥ 1 and 0 < r < 1.
///
/// ε is bisected on (0, 0.2] to the smallest value at which the pencil at m
/// has an eigenvalue below −1e−6 (and ‖X(m)‖ > 1 + 2e−6) with all targets
/// in G; C_{ν−1} is then checked on the result.
pub fn generate(nu: usize, r: f64, nodes: Option<Vec<C64>>, seed: u64, cfg: &RunConfig) -> Result<CounterexampleReport> {
    if nu < 1 {
        return Err(Error::InvalidParameter("ν must be at least 1".into()));
    }
    cfg.validate()?;
    let nodes = nodes.unwrap_or_else(|| default_nodes(nu, seed));
    if nodes.len() != nu + 2 {
        return Err(Error::InvalidParameter(format!("need ν + 2 = {} nodes, got {}", nu + 2, nodes.len())));
    }
    if let Some(z) = nodes.iter().find(|z| z.norm() < 1e-8) {
        return Err(Error::Precondition(format!(
            "q = −λ^(ν+1) vanishes at the node {z}; radial inflation needs q(λ_j) ≠ 0, choose other nodes"
        )));
    }
    let h = build(&FamilySpec::HNu { nu, r })?;
    let base = sample_data(&h, &nodes)?;
    let m = BlaschkeProduct::monomial(nu, PI);
    let q = BlaschkeProduct::monomial(nu + 1, PI);
    let base_norm = x_norm(&m, &base)?;
    if (base_norm - 1.0).abs() > BASE_EXTREMAL_TOL {
        return Err(Error::Validation(format!("base data are not extremal at m: ‖X(m)‖ = {base_norm}")));
    }

    let mut bisection = Vec::new();
    let mut hi = EPS_MAX;
    loop {
        let ok = perturbed_data(&base, &m, &q, hi).is_some_and(|d| violated(&d, &m));
        bisection.push(BisectionStep { epsilon: hi, violated: ok });
        if ok {
            break;
        }
        hi /= 2.0;
        if hi < 1e-12 {
            return Err(Error::Bisection("no ε in (0, 0.2] gives a certified violation inside G".into()));
        }
    }
    let mut lo = 0.0;
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        let ok = perturbed_data(&base, &m, &q, mid).is_some_and(|d| violated(&d, &m));
        bisection.push(BisectionStep { epsilon: mid, violated: ok });
        if ok {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let epsilon = hi;
    let perturbed = perturbed_data(&base, &m, &q, epsilon).expect("endpoint checked");
    let violation = ViolationCertificate::at(&m, &perturbed)?;
    let lower = lower_evidence(&perturbed, nu, cfg, SCAN_POINTS)?;
    if !lower.passes() {
        return Err(Error::Bisection(format!(
            "C_{} evidence fails at ε = {epsilon:e} (status {:?})",
            nu - 1,
            lower.report.status
        )));
    }
    Ok(CounterexampleReport {
        nu,
        r,
        seed,
        base,
        perturbed,
        epsilon,
        m,
        q,
        violation,
        lower_evidence: lower,
        bisection,
    })
}

/// Outcome of [`verify`], with the failed checks named.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Verification {
    pub ok: bool,
    pub failures: Vec<String>,
}

/// Re-derives the perturbed data from (base, ε, m, q), re-checks G
/// membership and the certificate at m, and reruns the C_{ν−1} check with
/// every grid doubled.
pub fn verify(rep: &CounterexampleReport, cfg: &RunConfig) -> Verification {
    let mut failures = Vec::new();
    match perturbed_targets(&rep.base, &rep.m, &rep.q, rep.epsilon) {
        Ok(t) => {
            if !t.iter().all(|t| membership(t).open_g) {
                failures.push("recomputed targets leave G".to_string());
            }
            let drift = t
                .iter()
                .zip(&rep.perturbed.targets)
                .map(|(a, b)| (a.s - b.s).norm() + (a.p - b.p).norm())
                .fold(0.0, f64::max);
            if drift > 1e-12 || t.len() != rep.perturbed.targets.len() {
                failures.push(format!("perturbed targets differ from the recomputation by {drift:e}"));
            }
        }
        Err(e) => failures.push(format!("recomputation failed: {e}")),
    }
    if !rep.perturbed.targets.iter().all(|t| membership(t).open_g) {
        failures.push("reported targets leave G".to_string());
    }
    let cert = ViolationCertificate { upsilon: rep.m.clone(), ..rep.violation.clone() };
    if !cert.verify(&rep.perturbed, VIOLATION_EIG) {
        failures.push("no pencil eigenvalue below −1e−6 at m".to_string());
    }
    if rep.m.degree() > rep.nu {
        failures.push(format!("m has degree {} > ν", rep.m.degree()));
    }
    if rep.nu >= 1 {
        match lower_evidence(&rep.perturbed, rep.nu, &cfg.doubled(), 2 * SCAN_POINTS) {
            Ok(ev) if ev.passes() => {}
            Ok(ev) => failures.push(format!("C_{} recheck: status {:?}", rep.nu - 1, ev.report.status)),
            Err(e) => failures.push(format!("C_{} recheck failed: {e}", rep.nu - 1)),
        }
    }
    Verification { ok: failures.is_empty(), failures }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma_core::phi;

    #[test]
    fn pullback_hits_inflated_values() {
        let h = build(&FamilySpec::HNu { nu: 1, r: 0.5 }).unwrap();
        let base = sample_data(&h, &default_nodes(1, 3)).unwrap();
        let m = BlaschkeProduct::monomial(1, PI);
        let q = BlaschkeProduct::monomial(2, PI);
        let t = perturbed_targets(&base, &m, &q, 0.01).unwrap();
        for (l, z) in base.nodes.iter().zip(&t) {
            let w = phi(m.eval(*l), z).unwrap();
            assert!((w - q.eval(*l) * 1.01).norm() < 1e-14);
        }
        let t0 = perturbed_targets(&base, &m, &q, 0.0).unwrap();
        for (a, b) in t0.iter().zip(&base.targets) {
            assert!((a.s - b.s).norm() < 1e-14);
        }
    }

    #[test]
    fn default_nodes_shape() {
        let n = default_nodes(2, 7);
        assert_eq!(n.len(), 4);
        assert!(n.iter().all(|z| (z.norm() - NODE_RADIUS).abs() < 1e-15));
        assert_eq!(n, default_nodes(2, 7));
    }

    fn small_report() -> CounterexampleReport {
        generate(1, 0.5, None, 0, &RunConfig::default()).unwrap()
    }

    #[test]
    fn generated_report_verifies() {
        let rep = small_report();
        assert!(rep.violation.eigenvalue <= -VIOLATION_EIG);
        assert!(rep.epsilon > 0.0 && rep.epsilon <= EPS_MAX);
        assert!(verify(&rep, &RunConfig::default()).ok);
    }

    #[test]
    fn epsilon_outside_g_is_rejected() {
        let mut rep = small_report();
        let mut eps = 2.0 * rep.epsilon;
        let targets = loop {
            let t = perturbed_targets(&rep.base, &rep.m, &rep.q, eps);
            if let Ok(t) = &t {
                if !t.iter().all(|z| membership(z).open_g) {
                    break t.clone();
                }
            }
            eps *= 2.0;
            assert!(eps < 1e6);
        };
        rep.epsilon = eps;
        rep.perturbed.targets = targets;
        let v = verify(&rep, &RunConfig::default());
        assert!(!v.ok);
        assert!(v.failures.iter().any(|f| f.contains("leave G")));
    }

    #[test]
    fn lower_degree_multiplier_is_rejected() {
        let mut rep = small_report();
        rep.m = BlaschkeProduct::monomial(0, PI);
        assert!(!verify(&rep, &RunConfig::default()).ok);
    }

    #[test]
    fn nu_zero_and_zero_node_are_refused() {
        let cfg = RunConfig::default();
        assert!(matches!(generate(0, 0.5, None, 0, &cfg), Err(Error::InvalidParameter(_))));
        let nodes = vec![C64::new(0.0, 0.0), C64::new(0.3, 0.0), C64::new(-0.2, 0.1)];
        assert!(matches!(generate(1, 0.5, Some(nodes), 0, &cfg), Err(Error::Precondition(_))));
    }

    #[test]
    fn violation_persists_past_threshold() {
        let rep = small_report();
        for f in [1.5, 3.0, 10.0] {
            if let Some(d) = perturbed_data(&rep.base, &rep.m, &rep.q, f * rep.epsilon) {
                assert!(violated(&d, &rep.m));
            }
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let a = serde_json::to_string(&small_report()).unwrap();
        let b = serde_json::to_string(&small_report()).unwrap();
        assert_eq!(a, b);
    }
}
