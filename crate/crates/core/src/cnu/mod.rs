//! Condition C_ν: for every Blaschke product υ of degree at most ν the data
//! λ_j ↦ Φ(υ(λ_j), z_j) are solvable, i.e. the operator X(υ) is a
//! contraction.

pub mod nelder_mead;
mod search;

use crate::config::GridSizes;
use crate::gamma_core::{membership, phi, GammaPoint};
use crate::linalg::{cholesky, hermitian_eigen, lower_inverse, CMatrix};
use crate::pick::{np_status, solve_extremal_with, validate_nodes, NPData, NPKind, NPStatus, PICK_TOL};
use crate::ratfun::BlaschkeProduct;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

pub use search::{halton, DegreeSearchLog};

fn default_true() -> bool {
    true
}

/// Γ-interpolation data λ_j ↦ z_j = (s_j, p_j).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", try_from = "RawGammaData")]
pub struct GammaData {
    pub nodes: Vec<C64>,
    pub targets: Vec<GammaPoint>,
    /// Targets must lie in the open set G rather than in Γ.
    pub require_open: bool,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct RawGammaData {
    nodes: Vec<C64>,
    targets: Vec<GammaPoint>,
    #[serde(default = "default_true")]
    require_open: bool,
}

impl TryFrom<RawGammaData> for GammaData {
    type Error = Error;
    fn try_from(r: RawGammaData) -> Result<Self> {
        GammaData::with_closure(r.nodes, r.targets, r.require_open)
    }
}

impl GammaData {
    /// Data with every target in G.
    pub fn new(nodes: Vec<C64>, targets: Vec<GammaPoint>) -> Result<Self> {
        Self::with_closure(nodes, targets, true)
    }

    pub fn with_closure(nodes: Vec<C64>, targets: Vec<GammaPoint>, require_open: bool) -> Result<Self> {
        if nodes.len() != targets.len() {
            return Err(Error::InvalidParameter(format!(
                "{} nodes but {} targets",
                nodes.len(),
                targets.len()
            )));
        }
        if nodes.is_empty() {
            return Err(Error::InvalidParameter("no interpolation nodes".into()));
        }
        validate_nodes(&nodes)?;
        for (j, t) in targets.iter().enumerate() {
            let m = membership(t);
            if require_open && !m.open_g {
                return Err(Error::Precondition(format!("target {j} = ({}, {}) is not in G", t.s, t.p)));
            }
            if !m.closed_gamma {
                return Err(Error::Precondition(format!("target {j} = ({}, {}) is not in Γ", t.s, t.p)));
            }
        }
        Ok(GammaData { nodes, targets, require_open })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The scalar problem λ_j ↦ p_j.
    pub fn p_data(&self) -> NPData {
        NPData {
            nodes: self.nodes.clone(),
            targets: self.targets.iter().map(|t| t.p).collect(),
        }
    }
}

/// The scalar problem λ_j ↦ Φ(υ(λ_j), z_j).
pub fn phi_data(upsilon: &BlaschkeProduct, d: &GammaData) -> Result<NPData> {
    let targets = d
        .nodes
        .iter()
        .zip(&d.targets)
        .map(|(&l, t)| phi(upsilon.eval(l), t))
        .collect::<Result<Vec<_>>>()?;
    Ok(NPData { nodes: d.nodes.clone(), targets })
}

/// The Hermitian pencil whose positivity is C_ν at υ:
///
/// [1 − u_i p_i p̄_j ū_j − ½u_i(s_i − p_i s̄_j) − ½(s̄_j − p̄_j s_i)ū_j
///  − ¼(1 − u_i ū_j)s_i s̄_j] / (1 − λ_i λ̄_j),  u = υ(λ).
///
/// It equals ¼·D·Pick(Φ-data)·D* with D = diag(2 − u_i s_i).
pub fn pencil_matrix(upsilon: &BlaschkeProduct, d: &GammaData) -> Result<CMatrix> {
    let u: Vec<C64> = d.nodes.iter().map(|&l| upsilon.eval(l)).collect();
    for (j, t) in d.targets.iter().enumerate() {
        phi(u[j], t)?;
    }
    let one = C64::new(1.0, 0.0);
    let mut m = CMatrix::from_fn(d.len(), |i, j| {
        let (zi, zj) = (&d.targets[i], &d.targets[j]);
        let (ui, uj) = (u[i], u[j].conj());
        let num = one - ui * zi.p * zj.p.conj() * uj
            - ui * (zi.s - zi.p * zj.s.conj()) * 0.5
            - (zj.s.conj() - zj.p.conj() * zi.s) * uj * 0.5
            - (one - ui * uj) * zi.s * zj.s.conj() * 0.25;
        num / (one - d.nodes[i] * d.nodes[j].conj())
    });
    m.hermitize();
    Ok(m)
}

/// Evaluates ‖X(υ)‖ on fixed data, reusing the Cholesky factor of the
/// kernel Gram matrix G_ij = 1/(1 − λ_i λ̄_j).
///
/// With G = LL* and W = diag(Φ(υ(λ_j), z_j)), the Pick matrix of the Φ-data
/// is G − WGW*, so ‖X(υ)‖ = ‖L⁻¹WL‖.
#[derive(Clone, Debug)]
pub struct XNormEvaluator {
    data: GammaData,
    l: CMatrix,
    l_inv: CMatrix,
}

impl XNormEvaluator {
    pub fn new(d: &GammaData) -> Result<Self> {
        let one = C64::new(1.0, 0.0);
        let g = CMatrix::from_fn(d.len(), |i, j| one / (one - d.nodes[i] * d.nodes[j].conj()));
        let l = cholesky(&g).ok_or_else(|| Error::Coincident("kernel Gram matrix is singular".into()))?;
        let l_inv = lower_inverse(&l);
        Ok(XNormEvaluator { data: d.clone(), l, l_inv })
    }

    pub fn data(&self) -> &GammaData {
        &self.data
    }

    pub fn eval(&self, upsilon: &BlaschkeProduct) -> Result<f64> {
        let w = phi_data(upsilon, &self.data)?.targets;
        Ok(self.norm_of(&w))
    }

    fn norm_of(&self, w: &[C64]) -> f64 {
        let n = w.len();
        if n == 1 {
            return w[0].norm();
        }
        let wl = CMatrix::from_fn(n, |i, j| w[i] * self.l[(i, j)]);
        let c = &self.l_inv * &wl;
        let mut cc = &c * &c.adjoint();
        cc.hermitize();
        hermitian_eigen(&cc).max().max(0.0).sqrt()
    }
}

/// ‖X(υ)‖ for the data `d`.
pub fn x_norm(upsilon: &BlaschkeProduct, d: &GammaData) -> Result<f64> {
    XNormEvaluator::new(d)?.eval(upsilon)
}

/// Tolerances and budgets of the Bl_ν search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchConfig {
    /// sup ‖X(υ)‖ > 1 + tol means C_ν fails.
    pub tol: f64,
    /// sup within this distance of 1 counts as extremal.
    pub strict_band: f64,
    pub grid: GridSizes,
    pub seed: u64,
    /// Iteration cap of each Nelder–Mead refinement.
    pub max_iter: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        crate::config::RunConfig::default().search()
    }
}

/// Width of the band below 1 + tol in which an unconverged search cannot
/// tell "holds" from "fails".
pub const INCONCLUSIVE_BAND: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum CnuStatus {
    HoldsStrictly,
    HoldsExtremally,
    Fails,
    Inconclusive,
}

/// A Blaschke product at which the pencil has a negative eigenvalue.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ViolationCertificate {
    pub upsilon: BlaschkeProduct,
    pub eigenvalue: f64,
    pub eigenvector: Vec<C64>,
    pub x_norm: f64,
}

impl ViolationCertificate {
    pub fn at(upsilon: &BlaschkeProduct, d: &GammaData) -> Result<Self> {
        let eig = hermitian_eigen(&pencil_matrix(upsilon, d)?);
        Ok(ViolationCertificate {
            upsilon: upsilon.clone(),
            eigenvalue: eig.min(),
            eigenvector: eig.vector(0),
            x_norm: x_norm(upsilon, d)?,
        })
    }

    /// Recomputes the pencil and confirms an eigenvalue below `-tol`.
    pub fn verify(&self, d: &GammaData, tol: f64) -> bool {
        pencil_matrix(&self.upsilon, d)
            .map(|m| hermitian_eigen(&m).min() < -tol)
            .unwrap_or(false)
    }
}

/// Outcome of [`check_cnu`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CnuReport {
    pub nu: usize,
    pub status: CnuStatus,
    /// Estimate of sup over Bl_ν of ‖X(υ)‖.
    pub sup_norm: f64,
    /// The υ attaining `sup_norm`.
    pub argmax: BlaschkeProduct,
    pub witness_m: Option<BlaschkeProduct>,
    pub witness_q: Option<BlaschkeProduct>,
    /// max_j |Φ(m(λ_j), z_j) − q(λ_j)|.
    pub witness_residual: Option<f64>,
    pub violation: Option<ViolationCertificate>,
    pub evaluations: usize,
    pub search_log: Vec<DegreeSearchLog>,
    pub note: Option<String>,
}

/// Searches Bl_ν for the largest ‖X(υ)‖ and classifies C_ν.
///
/// Each degree δ ≤ ν is searched separately, since Bl_ν contains every lower
/// degree; the best value over all degrees is the estimate. A "fails" answer
/// comes with a negative pencil eigenvalue, which is a proof; "holds"
/// answers are search evidence.
pub fn check_cnu(d: &GammaData, nu: usize, cfg: &SearchConfig) -> Result<CnuReport> {
    let ev = XNormEvaluator::new(d)?;
    let logs = crate::parallel::install(|| (0..=nu).map(|deg| search::search_degree(&ev, deg, cfg)).collect::<Vec<_>>());
    let best = logs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.best_value.total_cmp(&b.1.best_value).then(b.0.cmp(&a.0)))
        .map(|(_, l)| l.clone())
        .expect("at least degree 0");
    let sup = best.best_value;
    let argmax = search::upsilon_of(&best.best_params);
    let evaluations = logs.iter().map(|l| l.evaluations).sum();
    let mut report = CnuReport {
        nu,
        status: CnuStatus::HoldsStrictly,
        sup_norm: sup,
        argmax: argmax.clone(),
        witness_m: None,
        witness_q: None,
        witness_residual: None,
        violation: None,
        evaluations,
        search_log: logs,
        note: None,
    };
    if sup > 1.0 + cfg.tol {
        report.status = CnuStatus::Fails;
        report.violation = Some(ViolationCertificate::at(&argmax, d)?);
    } else if !best.converged && sup >= 1.0 - INCONCLUSIVE_BAND {
        report.status = CnuStatus::Inconclusive;
        report.note = Some(format!(
            "best local refinement did not converge; sup estimate {sup} lies within {INCONCLUSIVE_BAND:e} of 1"
        ));
    } else if sup >= 1.0 - cfg.strict_band {
        report.status = CnuStatus::HoldsExtremally;
        let np_tol = PICK_TOL.max(4.0 * (1.0 - sup).abs());
        match auxiliary_extremal_with(d, nu, &argmax, np_tol, WITNESS_TOL) {
            Ok((m, q)) => {
                report.witness_residual = Some(witness_residual(d, &m, &q)?);
                report.witness_m = Some(m);
                report.witness_q = Some(q);
            }
            Err(e) => {
                report.witness_m = Some(argmax);
                report.note = Some(format!("auxiliary extremal not recovered: {e}"));
            }
        }
    }
    Ok(report)
}

/// Interpolation error accepted for the q returned with an extremal report.
pub const WITNESS_TOL: f64 = 1e-8;

fn witness_residual(d: &GammaData, m: &BlaschkeProduct, q: &BlaschkeProduct) -> Result<f64> {
    let w = phi_data(m, d)?;
    Ok(w.nodes
        .iter()
        .zip(&w.targets)
        .map(|(&l, &t)| (q.eval(l) - t).norm())
        .fold(0.0, f64::max))
}

/// For m with ‖X(m)‖ = 1, returns (m, q) where q is the unique Blaschke
/// product solving λ_j ↦ Φ(m(λ_j), z_j).
pub fn auxiliary_extremal(d: &GammaData, nu: usize, m: &BlaschkeProduct) -> Result<(BlaschkeProduct, BlaschkeProduct)> {
    auxiliary_extremal_with(d, nu, m, PICK_TOL, WITNESS_TOL)
}

/// As [`auxiliary_extremal`] with explicit extremality and verification
/// tolerances.
pub fn auxiliary_extremal_with(
    d: &GammaData,
    nu: usize,
    m: &BlaschkeProduct,
    np_tol: f64,
    verify_tol: f64,
) -> Result<(BlaschkeProduct, BlaschkeProduct)> {
    if m.degree() > nu {
        return Err(Error::Precondition(format!("m has degree {} > ν = {nu}", m.degree())));
    }
    let data = phi_data(m, d)?;
    let status = np_status(&data, np_tol)?;
    if status.kind != NPKind::ExtremallySolvable {
        return Err(Error::NotExtremal(format!(
            "Φ-data at m are {:?} (min Pick eigenvalue {:e})",
            status.kind, status.min_eigenvalue
        )));
    }
    let q = solve_extremal_with(&data, np_tol, verify_tol)?;
    Ok((m.clone(), q))
}

/// Evidence that a flat-case problem is solvable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FlatCertificate {
    /// sup over constants of ‖X(ω)‖.
    pub c0_sup_norm: f64,
    pub p_status: NPStatus,
}

/// Decision rule for the flat case: if C_0 holds and the problem
/// λ_j ↦ p_j is extremally solvable, the Γ-problem is solvable.
pub fn flat_case_decision(d: &GammaData, cfg: &SearchConfig) -> Result<Option<FlatCertificate>> {
    let p_status = np_status(&d.p_data(), PICK_TOL)?;
    if p_status.kind != NPKind::ExtremallySolvable {
        return Ok(None);
    }
    let c0 = check_cnu(d, 0, cfg)?;
    if matches!(c0.status, CnuStatus::Fails | CnuStatus::Inconclusive) {
        return Ok(None);
    }
    Ok(Some(FlatCertificate { c0_sup_norm: c0.sup_norm, p_status }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pick::pick_matrix;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn pencil_is_congruent_to_phi_pick() {
        let d = GammaData::new(
            vec![c(0.1, 0.0), c(-0.3, 0.2)],
            vec![GammaPoint::new(c(0.4, 0.1), c(0.1, 0.0)), GammaPoint::new(c(-0.2, 0.3), c(0.0, 0.2))],
        )
        .unwrap();
        let u = BlaschkeProduct::new(1.1, vec![c(0.2, -0.4)]).unwrap();
        let m = pencil_matrix(&u, &d).unwrap();
        let p = pick_matrix(&phi_data(&u, &d).unwrap()).unwrap();
        let two = c(2.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                let di = two - u.eval(d.nodes[i]) * d.targets[i].s;
                let dj = two - u.eval(d.nodes[j]) * d.targets[j].s;
                assert!((m[(i, j)] - p[(i, j)] * di * dj.conj() * 0.25).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn one_node_norm_is_phi_modulus() {
        let t = GammaPoint::new(c(0.3, -0.2), c(0.1, 0.05));
        let d = GammaData::new(vec![c(0.2, 0.1)], vec![t]).unwrap();
        let u = BlaschkeProduct::constant(0.7);
        let v = x_norm(&u, &d).unwrap();
        assert!((v - phi(u.unit(), &t).unwrap().norm()).abs() < 1e-15);
    }

    #[test]
    fn schwarz_pick_violation_exceeds_one() {
        // Φ(0, (s, p)) = −s/2, so targets s = 0 and s = −1.8 give Φ-data 0 ↦ 0, 0.5 ↦ 0.9
        let d = GammaData::new(
            vec![c(0.0, 0.0), c(0.5, 0.0)],
            vec![GammaPoint::new(c(0.0, 0.0), c(0.0, 0.0)), GammaPoint::new(c(-1.8, 0.0), c(0.81, 0.0))],
        )
        .unwrap();
        let v = XNormEvaluator::new(&d).unwrap().norm_of(&[c(0.0, 0.0), c(0.9, 0.0)]);
        assert!(v > 1.0);
    }

    #[test]
    fn json_defaults_to_open() {
        let d: GammaData =
            serde_json::from_str(r#"{"nodes":[[0,0]],"targets":[{"s":[0.1,0],"p":[0,0]}]}"#).unwrap();
        assert!(d.require_open);
        assert!(serde_json::from_str::<GammaData>(r#"{"nodes":[[0,0]],"targets":[{"s":[2,0],"p":[1,0]}]}"#).is_err());
        let d: GammaData = serde_json::from_str(
            r#"{"nodes":[[0,0]],"targets":[{"s":[2,0],"p":[1,0]}],"requireOpen":false}"#,
        )
        .unwrap();
        assert!(!d.require_open);
    }
}
