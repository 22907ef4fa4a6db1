//! Scalar Nevanlinna–Pick interpolation on the disc.

use crate::linalg::{hermitian_eigen, CMatrix};
use crate::ratfun::{classify_inner, BlaschkeProduct, Poly, RationalFn};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// Relative band (times the trace) inside which the smallest Pick
/// eigenvalue counts as zero.
pub const PICK_TOL: f64 = 1e-8;

/// Maximum interpolation error accepted from [`solve_extremal`].
pub const SOLVE_VERIFY_TOL: f64 = 1e-9;

/// Interpolation data λ_j ↦ w_j.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NPData {
    pub nodes: Vec<C64>,
    pub targets: Vec<C64>,
}

impl NPData {
    pub fn new(nodes: Vec<C64>, targets: Vec<C64>) -> Result<Self> {
        let d = NPData { nodes, targets };
        d.validate()?;
        Ok(d)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes.len() != self.targets.len() {
            return Err(Error::InvalidParameter(format!(
                "{} nodes but {} targets",
                self.nodes.len(),
                self.targets.len()
            )));
        }
        validate_nodes(&self.nodes)
    }
}

/// Nodes must be pairwise distinct points of the open disc.
pub fn validate_nodes(nodes: &[C64]) -> Result<()> {
    if let Some(z) = nodes.iter().find(|z| !(z.norm() < 1.0)) {
        return Err(Error::InvalidParameter(format!("node {z} is not in the open disc")));
    }
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            if (nodes[i] - nodes[j]).norm() <= 1e-10 {
                return Err(Error::Coincident(format!("nodes {i} and {j}")));
            }
        }
    }
    Ok(())
}

/// Solvability class of an interpolation problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum NPKind {
    StrictlySolvable,
    ExtremallySolvable,
    Unsolvable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NPStatus {
    pub kind: NPKind,
    pub min_eigenvalue: f64,
    /// Eigenvalues above the tolerance band.
    pub rank: usize,
    pub eigenvalues: Vec<f64>,
    /// Half-width of the band around zero.
    pub band: f64,
}

/// P_ij = (1 − w_i w̄_j)/(1 − λ_i λ̄_j).
pub fn pick_matrix(d: &NPData) -> Result<CMatrix> {
    d.validate()?;
    let one = C64::new(1.0, 0.0);
    Ok(CMatrix::from_fn(d.len(), |i, j| {
        (one - d.targets[i] * d.targets[j].conj()) / (one - d.nodes[i] * d.nodes[j].conj())
    }))
}

/// Classifies the problem by the spectrum of its Pick matrix. `tol` is
/// relative to the trace, floored at 1 so that data with all targets
/// (nearly) unimodular, whose Pick matrix is rounding noise, count as
/// extremal.
pub fn np_status(d: &NPData, tol: f64) -> Result<NPStatus> {
    let p = pick_matrix(d)?;
    let eig = hermitian_eigen(&p);
    let band = tol * p.trace().re.abs().max(1.0);
    let min = eig.min();
    let kind = if min > band {
        NPKind::StrictlySolvable
    } else if min >= -band {
        NPKind::ExtremallySolvable
    } else {
        NPKind::Unsolvable
    };
    Ok(NPStatus {
        kind,
        min_eigenvalue: min,
        rank: eig.values.iter().filter(|&&v| v > band).count(),
        eigenvalues: eig.values,
        band,
    })
}

/// One Schur step at the first node:
/// w'_j = ((1 − λ̄_1λ_j)/(λ_j − λ_1)) · ((w_j − w_1)/(1 − w̄_1 w_j)).
pub fn schur_reduce(d: &NPData) -> Result<NPData> {
    d.validate()?;
    if d.len() < 2 {
        return Err(Error::Precondition("Schur reduction needs at least two nodes".into()));
    }
    let (l1, w1) = (d.nodes[0], d.targets[0]);
    if w1.norm() >= 1.0 {
        return Err(Error::Precondition(format!("first target {w1} is not in the open disc")));
    }
    let one = C64::new(1.0, 0.0);
    let targets = d.nodes[1..]
        .iter()
        .zip(&d.targets[1..])
        .map(|(&l, &w)| ((one - l1.conj() * l) / (l - l1)) * ((w - w1) / (one - w1.conj() * w)))
        .collect();
    Ok(NPData { nodes: d.nodes[1..].to_vec(), targets })
}

/// Unique Blaschke solution of extremally solvable data, verified to
/// [`SOLVE_VERIFY_TOL`] at the nodes.
pub fn solve_extremal(d: &NPData, tol: f64) -> Result<BlaschkeProduct> {
    solve_extremal_with(d, tol, SOLVE_VERIFY_TOL)
}

/// As [`solve_extremal`] with an explicit verification tolerance.
///
/// The Schur step is applied rank(P) times, pivoting on the smallest
/// remaining target; the remaining targets are then a single unimodular
/// constant, and the inverse steps f = (B f₁ + w₁)/(1 + w̄₁ B f₁) with
/// B = B_{λ₁} rebuild the solution as a rational function.
pub fn solve_extremal_with(d: &NPData, tol: f64, verify_tol: f64) -> Result<BlaschkeProduct> {
    let status = np_status(d, tol)?;
    if status.kind != NPKind::ExtremallySolvable {
        return Err(Error::NotExtremal(format!(
            "Pick matrix status {:?}, min eigenvalue {:e}",
            status.kind, status.min_eigenvalue
        )));
    }
    let (num, den) = schur_solve(d.clone(), status.rank)?;
    let f = RationalFn::new(num, den)?;
    let q = classify_inner(&f)
        .ok_or_else(|| Error::Validation("Schur recursion did not produce a Blaschke product".into()))?;
    let err = d
        .nodes
        .iter()
        .zip(&d.targets)
        .map(|(&l, &w)| (q.eval(l) - w).norm())
        .fold(0.0, f64::max);
    if err > verify_tol {
        return Err(Error::Validation(format!(
            "recovered solution misses the data by {err:e}"
        )));
    }
    Ok(q)
}

fn schur_solve(mut d: NPData, rank: usize) -> Result<(Poly, Poly)> {
    let one = C64::new(1.0, 0.0);
    if rank == 0 {
        let mean: C64 = d.targets.iter().sum::<C64>() / d.len() as f64;
        if mean.norm() < 0.5 {
            return Err(Error::Validation("rank-0 remainder is not a unimodular constant".into()));
        }
        return Ok((Poly::constant(mean / mean.norm()), Poly::one()));
    }
    let pivot = (0..d.len())
        .min_by(|&a, &b| d.targets[a].norm().total_cmp(&d.targets[b].norm()))
        .expect("nonempty data");
    if d.targets[pivot].norm() >= 1.0 {
        return Err(Error::Validation("no target left inside the disc before the rank was used up".into()));
    }
    d.nodes.swap(0, pivot);
    d.targets.swap(0, pivot);
    let (l1, w1) = (d.nodes[0], d.targets[0]);
    let (p, q) = schur_solve(schur_reduce(&d)?, rank - 1)?;
    let lin = Poly::new(vec![-l1, one]);
    let refl = Poly::new(vec![one, -l1.conj()]);
    let num = &(&lin * &p) + &(&refl * &q).scale(w1);
    let den = &(&refl * &q) + &(&lin * &p).scale(w1.conj());
    Ok((num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn data(nodes: &[C64], targets: &[C64]) -> NPData {
        NPData::new(nodes.to_vec(), targets.to_vec()).unwrap()
    }

    #[test]
    fn pick_matrix_examples() {
        let p = pick_matrix(&data(&[c(0.0, 0.0)], &[c(0.5, 0.0)])).unwrap();
        assert!((p[(0, 0)] - 0.75).norm() < 1e-15);
        let p = pick_matrix(&data(&[c(0.0, 0.0), c(0.5, 0.0)], &[c(0.0, 0.0), c(0.5, 0.0)])).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((p[(i, j)] - 1.0).norm() < 1e-15);
            }
        }
        let p = pick_matrix(&data(&[c(0.0, 0.0), c(0.5, 0.0)], &[c(0.0, 0.0), c(0.9, 0.0)])).unwrap();
        assert!((p[(1, 1)] - 0.19 / 0.75).norm() < 1e-14);
    }

    #[test]
    fn status_examples() {
        let s = np_status(&data(&[c(0.0, 0.0)], &[c(0.5, 0.0)]), PICK_TOL).unwrap();
        assert_eq!(s.kind, NPKind::StrictlySolvable);
        let s = np_status(&data(&[c(0.0, 0.0), c(0.5, 0.0)], &[c(0.0, 0.0), c(0.5, 0.0)]), PICK_TOL).unwrap();
        assert_eq!((s.kind, s.rank), (NPKind::ExtremallySolvable, 1));
        let s = np_status(&data(&[c(0.0, 0.0), c(0.5, 0.0)], &[c(0.0, 0.0), c(0.9, 0.0)]), PICK_TOL).unwrap();
        assert_eq!(s.kind, NPKind::Unsolvable);
    }

    #[test]
    fn schur_reduce_examples() {
        let r = schur_reduce(&data(&[c(0.0, 0.0), c(0.5, 0.0)], &[c(0.0, 0.0), c(0.5, 0.0)])).unwrap();
        assert!((r.targets[0] - 1.0).norm() < 1e-15);
        let l2 = c(0.3, -0.4);
        let w2 = c(0.1, 0.2);
        let r = schur_reduce(&data(&[c(0.0, 0.0), l2], &[c(0.0, 0.0), w2])).unwrap();
        assert!((r.targets[0] - w2 / l2).norm() < 1e-15);
        assert!(schur_reduce(&data(&[c(0.0, 0.0), l2], &[c(1.0, 0.0), w2])).is_err());
    }

    #[test]
    fn solve_examples() {
        let q = solve_extremal(&data(&[c(0.0, 0.0), c(0.5, 0.0)], &[c(0.0, 0.0), c(0.5, 0.0)]), PICK_TOL).unwrap();
        assert_eq!(q.degree(), 1);
        assert!((q.eval(c(0.2, 0.7)) - c(0.2, 0.7)).norm() < 1e-12);

        let truth = BlaschkeProduct::new(0.0, vec![c(0.3, 0.0), c(-0.2, 0.0)]).unwrap();
        let nodes = [c(0.1, 0.2), c(-0.5, 0.1), c(0.4, -0.6)];
        let targets: Vec<C64> = nodes.iter().map(|&z| truth.eval(z)).collect();
        let q = solve_extremal(&data(&nodes, &targets), PICK_TOL).unwrap();
        assert_eq!(q.degree(), 2);
        assert!(q.sup_distance(&truth, 64) < 1e-9);

        let q = solve_extremal(&data(&[c(0.0, 0.0)], &[c(1.0, 0.0)]), PICK_TOL).unwrap();
        assert_eq!(q.degree(), 0);
        assert!((q.unit() - 1.0).norm() < 1e-15);
    }
}
