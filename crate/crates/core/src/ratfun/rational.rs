use super::poly::{Poly, RootCluster, COEFF_NOISE};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// Quotient of two polynomials with a monic denominator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRational")]
pub struct RationalFn {
    num: Poly,
    den: Poly,
}

#[derive(Deserialize)]
struct RawRational {
    num: Poly,
    den: Poly,
}

impl TryFrom<RawRational> for RationalFn {
    type Error = Error;
    fn try_from(r: RawRational) -> Result<Self> {
        RationalFn::new(r.num, r.den)
    }
}

/// Default relative residual under which a denominator root is considered
/// a root of the numerator as well.
pub const PAIRING_TOL: f64 = 1e-8;

/// Outcome of [`reduce_rational`].
#[derive(Clone, Debug, PartialEq)]
pub struct Reduction {
    pub reduced: RationalFn,
    /// Number of common root pairs removed.
    pub cancellations: usize,
    /// The common roots that were removed, with repetition.
    pub common_roots: Vec<C64>,
}

impl RationalFn {
    /// Builds num/den, normalizing the denominator to be monic.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        let lead = den.leading();
        if lead == C64::new(1.0, 0.0) {
            return Ok(RationalFn { num, den });
        }
        // the division leaves rounding noise in the leading coefficient
        let mut d = den.scale(lead.inv()).coeffs().to_vec();
        *d.last_mut().expect("nonzero denominator") = C64::new(1.0, 0.0);
        Ok(RationalFn {
            num: num.scale(lead.inv()),
            den: Poly::new(d),
        })
    }

    pub fn from_poly(p: Poly) -> Self {
        RationalFn { num: p, den: Poly::one() }
    }

    pub fn constant(c: C64) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    /// The identity map λ.
    pub fn identity() -> Self {
        Self::from_poly(Poly::monomial(C64::new(1.0, 0.0), 1))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    /// max(deg num, deg den); the degree d(f) once reduced.
    pub fn degree(&self) -> usize {
        if self.num.is_zero() {
            return 0;
        }
        self.num.degree().max(self.den.degree())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.num.eval(z) / self.den.eval(z)
    }

    pub fn scale(&self, c: C64) -> Self {
        RationalFn {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return RationalFn {
                num: &self.num + &o.num,
                den: self.den.clone(),
            };
        }
        Self::new(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
            .expect("product of nonzero denominators")
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(C64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(&self.num * &o.num, &self.den * &o.den).expect("product of nonzero denominators")
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        if o.num.is_zero() {
            return Err(Error::InvalidParameter("division by the zero function".into()));
        }
        Self::new(&self.num * &o.den, &self.den * &o.num)
    }

    /// f ∘ g, via homogenization: with d = max(deg N, deg D) and g = a/b,
    /// (Σ n_k a^k b^{d−k}) / (Σ d_k a^k b^{d−k}).
    pub fn compose(&self, g: &RationalFn) -> Result<Self> {
        let d = self.num.degree().max(self.den.degree());
        let a_pows: Vec<Poly> = (0..=d).map(|k| g.num.pow(k)).collect();
        let b_pows: Vec<Poly> = (0..=d).map(|k| g.den.pow(k)).collect();
        let homog = |p: &Poly| {
            (0..=d).fold(Poly::zero(), |acc, k| {
                let term = (&a_pows[k] * &b_pows[d - k]).scale(p.coeff(k));
                &acc + &term
            })
        };
        Self::new(homog(&self.num), homog(&self.den))
    }

    /// Removes common roots of numerator and denominator.
    pub fn reduce(&self, pairing_tol: f64) -> Result<Reduction> {
        reduce_rational(self, pairing_tol)
    }

    /// Reduced form with the default pairing tolerance.
    pub fn reduced(&self) -> Result<Self> {
        Ok(self.reduce(PAIRING_TOL)?.reduced)
    }

    /// Largest coefficient discrepancy against another rational function
    /// after normalizing both to a monic denominator (assumes both reduced).
    pub fn coeff_distance(&self, o: &Self) -> f64 {
        if self.den.degree() != o.den.degree() {
            return f64::INFINITY;
        }
        let n = self.num.coeffs().len().max(o.num.coeffs().len());
        let dn = (0..n).map(|k| (self.num.coeff(k) - o.num.coeff(k)).norm());
        let m = self.den.coeffs().len();
        let dd = (0..m).map(|k| (self.den.coeff(k) - o.den.coeff(k)).norm());
        dn.chain(dd).fold(0.0, f64::max)
    }
}

/// Coprime representation of `f`.
///
/// Common factors of λ are removed exactly. Every other denominator root ζ
/// (with multiplicity) is paired with the numerator when
/// |num(ζ)| ≤ `pairing_tol` · Σ|a_i||ζ|^i and a numerator root cluster lies
/// within √`pairing_tol` · max(1, |ζ|) of ζ; the pair is deflated out of
/// both polynomials. The residual test alone accepts spurious pairs near
/// high-multiplicity numerator clusters.
pub fn reduce_rational(f: &RationalFn, pairing_tol: f64) -> Result<Reduction> {
    let mut num = f.num.cleaned(COEFF_NOISE);
    let mut den = f.den.cleaned(COEFF_NOISE);
    if num.is_zero() {
        return Ok(Reduction {
            reduced: RationalFn::constant(C64::new(0.0, 0.0)),
            cancellations: 0,
            common_roots: vec![],
        });
    }
    let mut common = Vec::new();
    let k = num.valuation().min(den.valuation());
    if k > 0 {
        num = num.shift_down(k);
        den = den.shift_down(k);
        common.extend(std::iter::repeat_n(C64::new(0.0, 0.0), k));
    }
    let mut num_roots: Vec<RootCluster> = num.root_clusters()?;
    for cluster in den.root_clusters()? {
        let reach = pairing_tol.sqrt() * cluster.z.norm().max(1.0);
        for _ in 0..cluster.mult {
            if num.degree() == 0 || num.relative_residual(cluster.z) > pairing_tol {
                break;
            }
            let Some(partner) = num_roots
                .iter_mut()
                .filter(|r| r.mult > 0 && (r.z - cluster.z).norm() <= reach)
                .min_by(|a, b| (a.z - cluster.z).norm().total_cmp(&(b.z - cluster.z).norm()))
            else {
                break;
            };
            partner.mult -= 1;
            num = num.deflate(cluster.z);
            den = den.deflate(cluster.z);
            common.push(cluster.z);
        }
    }
    Ok(Reduction {
        reduced: RationalFn::new(num.cleaned(COEFF_NOISE), den.cleaned(COEFF_NOISE))?,
        cancellations: common.len(),
        common_roots: common,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn cancels_a_single_common_root() {
        let f = RationalFn::new(Poly::from_real(&[-1.0, 0.0, 1.0]), Poly::from_real(&[-1.0, 1.0])).unwrap();
        let r = f.reduce(PAIRING_TOL).unwrap();
        assert_eq!(r.cancellations, 1);
        let expect = RationalFn::from_poly(Poly::from_real(&[1.0, 1.0]));
        assert!(r.reduced.coeff_distance(&expect) < 1e-14);
    }

    #[test]
    fn cancels_cube_roots_of_unity() {
        // (2λ⁸ − λ⁵ − λ²)/(2 − λ³ − λ⁶) = −λ²(2λ³+1)/(λ³+2)
        let num = Poly::from_real(&[0.0, 0.0, -1.0, 0.0, 0.0, -1.0, 0.0, 0.0, 2.0]);
        let den = Poly::from_real(&[2.0, 0.0, 0.0, -1.0, 0.0, 0.0, -1.0]);
        let r = RationalFn::new(num, den).unwrap().reduce(PAIRING_TOL).unwrap();
        assert_eq!(r.cancellations, 3);
        let expect = RationalFn::new(
            Poly::from_real(&[0.0, 0.0, -1.0, 0.0, 0.0, -2.0]),
            Poly::from_real(&[2.0, 0.0, 0.0, 1.0]),
        )
        .unwrap();
        assert!(r.reduced.coeff_distance(&expect) < 1e-12);
        assert_eq!(r.reduced.degree(), 5);
    }

    #[test]
    fn coprime_input_is_unchanged() {
        let f = RationalFn::new(Poly::from_real(&[0.0, 1.0]), Poly::from_real(&[1.0, -0.5])).unwrap();
        let r = f.reduce(PAIRING_TOL).unwrap();
        assert_eq!(r.cancellations, 0);
        assert!(r.reduced.coeff_distance(&f) < 1e-15);
    }

    #[test]
    fn composition_matches_pointwise() {
        let f = RationalFn::new(Poly::from_real(&[0.5, 0.0, 1.0]), Poly::from_real(&[1.0, 0.25])).unwrap();
        let g = RationalFn::new(Poly::from_real(&[-0.2, 1.0]), Poly::from_real(&[1.0, -0.2])).unwrap();
        let fg = f.compose(&g).unwrap();
        for z in [c(0.1, 0.2), c(-0.4, 0.3), c(0.7, -0.1)] {
            assert!((fg.eval(z) - f.eval(g.eval(z))).norm() < 1e-13);
        }
    }
}
