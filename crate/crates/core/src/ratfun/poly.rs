use crate::linalg::{hessenberg_eigenvalues, CMatrix};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

/// Complex polynomial with ascending coefficients. Trailing zeros are
/// trimmed, so the zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<C64>", into = "Vec<C64>")]
pub struct Poly {
    coeffs: Vec<C64>,
}

/// A root together with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootCluster {
    pub z: C64,
    pub mult: usize,
}

/// Coefficients below this fraction of the largest one are treated as
/// rounding noise by [`Poly::cleaned`].
pub const COEFF_NOISE: f64 = 1e-14;

const CLUSTER_RADIUS: f64 = 1e-4;

impl From<Vec<C64>> for Poly {
    fn from(coeffs: Vec<C64>) -> Self {
        Poly::new(coeffs)
    }
}

impl From<Poly> for Vec<C64> {
    fn from(p: Poly) -> Self {
        p.coeffs
    }
}

impl Poly {
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == C64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    /// c·λ^k
    pub fn monomial(c: C64, k: usize) -> Self {
        let mut v = vec![C64::new(0.0, 0.0); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[C64]) -> Self {
        roots.iter().fold(Self::one(), |acc, &r| {
            &acc * &Self::new(vec![-r, C64::new(1.0, 0.0)])
        })
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Coefficient of λ^k (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> C64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Σ |a_i| |z|^i, the natural scale for judging |p(z)| against zero.
    pub fn eval_scale(&self, z: C64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    /// |p(z)| relative to [`Poly::eval_scale`].
    pub fn relative_residual(&self, z: C64) -> f64 {
        let s = self.eval_scale(z);
        if s == 0.0 {
            0.0
        } else {
            self.eval(z).norm() / s
        }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn nth_derivative(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |p, _| p.derivative())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    pub fn conj_coeffs(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    /// Zeroes coefficients below `rel` times the largest and trims.
    pub fn cleaned(&self, rel: f64) -> Self {
        let cut = rel * self.max_abs();
        Self::new(
            self.coeffs
                .iter()
                .map(|&c| if c.norm() <= cut { C64::new(0.0, 0.0) } else { c })
                .collect(),
        )
    }

    /// Number of vanishing low-order coefficients (order of the zero at 0).
    pub fn valuation(&self) -> usize {
        self.coeffs
            .iter()
            .take_while(|c| **c == C64::new(0.0, 0.0))
            .count()
    }

    /// p(λ)/λ^k, dropping the k lowest coefficients.
    pub fn shift_down(&self, k: usize) -> Self {
        Self::new(self.coeffs.iter().skip(k).copied().collect())
    }

    /// λ^k p(λ).
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut v = vec![C64::new(0.0, 0.0); k];
        v.extend_from_slice(&self.coeffs);
        Self::new(v)
    }

    /// λ^n · conj(p(1/λ̄)), requiring n ≥ deg p.
    pub fn reflect(&self, n: usize) -> Self {
        assert!(self.is_zero() || self.degree() <= n);
        Self::new((0..=n).map(|i| self.coeff(n - i).conj()).collect())
    }

    /// Quotient of division by (λ − z), discarding the remainder. Uses
    /// forward deflation inside the unit disc and backward outside, which
    /// keeps the recurrence stable in both regimes.
    pub fn deflate(&self, z: C64) -> Self {
        let n = self.degree();
        if self.is_zero() || n == 0 {
            return Self::zero();
        }
        let a = &self.coeffs;
        let mut q = vec![C64::new(0.0, 0.0); n];
        if z.norm() <= 1.0 {
            q[n - 1] = a[n];
            for i in (1..n).rev() {
                q[i - 1] = a[i] + z * q[i];
            }
        } else {
            q[0] = -a[0] / z;
            for i in 1..n {
                q[i] = (q[i - 1] - a[i]) / z;
            }
        }
        Self::new(q)
    }

    /// Polynomial long division.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        if self.is_zero() || self.degree() < d.degree() {
            return (Self::zero(), self.clone());
        }
        let mut r = self.coeffs.clone();
        let dn = d.degree();
        let lead = d.leading();
        let mut q = vec![C64::new(0.0, 0.0); self.degree() - dn + 1];
        for k in (0..q.len()).rev() {
            let c = r[k + dn] / lead;
            q[k] = c;
            for (i, &di) in d.coeffs.iter().enumerate() {
                r[k + i] -= c * di;
            }
        }
        r.truncate(dn);
        (Self::new(q), Self::new(r))
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Roots with multiplicity.
    pub fn roots(&self) -> Result<Vec<C64>> {
        Ok(self
            .root_clusters()?
            .into_iter()
            .flat_map(|c| std::iter::repeat_n(c.z, c.mult))
            .collect())
    }

    /// Roots grouped by multiplicity.
    ///
    /// Eigenvalues of the companion matrix (after rescaling λ so the roots
    /// have unit geometric mean) are refined by two Newton steps. Nearby
    /// eigenvalues are merged into a multiple root when the centroid,
    /// polished by Newton on the appropriate derivative, annihilates the
    /// polynomial and its lower derivatives to working accuracy; otherwise
    /// they are kept as distinct simple roots.
    pub fn root_clusters(&self) -> Result<Vec<RootCluster>> {
        let p = self.cleaned(COEFF_NOISE);
        if p.is_zero() {
            return Ok(vec![]);
        }
        let k0 = p.valuation();
        let q = p.shift_down(k0);
        let mut out = Vec::new();
        if k0 > 0 {
            out.push(RootCluster {
                z: C64::new(0.0, 0.0),
                mult: k0,
            });
        }
        let m = q.degree();
        if m == 0 {
            return Ok(out);
        }
        let raw = if m == 1 {
            vec![-q.coeffs[0] / q.coeffs[1]]
        } else {
            companion_eigenvalues(&q).ok_or(Error::RootFinding(m))?
        };
        let polished: Vec<C64> = raw.into_iter().map(|z| newton_polish(&q, z, 2)).collect();
        out.extend(cluster_roots(&q, polished));
        Ok(out)
    }
}

fn companion_eigenvalues(q: &Poly) -> Option<Vec<C64>> {
    let m = q.degree();
    let c = q.coeffs();
    let rho = (c[0].norm() / c[m].norm()).powf(1.0 / m as f64);
    let rho = if rho.is_finite() && rho > 0.0 { rho } else { 1.0 };
    let lead = c[m];
    // monic in μ = λ/ρ: μ^m + Σ b_i μ^i, b_i = c_i ρ^{i−m} / c_m
    let b: Vec<C64> = (0..m).map(|i| c[i] * rho.powi(i as i32 - m as i32) / lead).collect();
    let h = CMatrix::from_fn(m, |i, j| {
        if i == 0 {
            -b[m - 1 - j]
        } else if i == j + 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let mu = hessenberg_eigenvalues(h)?;
    if mu.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return None;
    }
    Some(mu.into_iter().map(|z| z * rho).collect())
}

fn newton_polish(p: &Poly, mut z: C64, steps: usize) -> C64 {
    let dp = p.derivative();
    for _ in 0..steps {
        let f = p.eval(z);
        let d = dp.eval(z);
        if d.norm() == 0.0 {
            break;
        }
        let cand = z - f / d;
        if cand.re.is_finite() && cand.im.is_finite() && p.eval(cand).norm() <= f.norm() {
            z = cand;
        } else {
            break;
        }
    }
    z
}

fn cluster_roots(p: &Poly, roots: Vec<C64>) -> Vec<RootCluster> {
    let n = roots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let scale = roots[i].norm().max(roots[j].norm()).max(1.0);
            if (roots[i] - roots[j]).norm() <= CLUSTER_RADIUS * scale {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut label = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if label[r] == usize::MAX {
            label[r] = groups.len();
            groups.push(vec![]);
        }
        groups[label[r]].push(i);
    }
    let mut out = Vec::new();
    for g in groups {
        if g.len() == 1 {
            out.push(RootCluster { z: roots[g[0]], mult: 1 });
            continue;
        }
        let k = g.len();
        let centroid = g.iter().map(|&i| roots[i]).sum::<C64>() / k as f64;
        let dk = p.nth_derivative(k - 1);
        let c = newton_polish(&dk, centroid, 8);
        let genuine = (0..k).all(|j| {
            let pj = p.nth_derivative(j);
            let tol = if j == 0 { 1e-12 } else { 1e-9 };
            pj.relative_residual(c) <= tol
        });
        if genuine {
            out.push(RootCluster { z: c, mult: k });
        } else {
            out.extend(g.iter().map(|&i| RootCluster { z: roots[i], mult: 1 }));
        }
    }
    out
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![C64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly::new(v)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(C64::new(-1.0, 0.0))
    }
}
