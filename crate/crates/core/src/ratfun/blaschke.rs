use super::poly::Poly;
use super::rational::RationalFn;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Zeros closer than this to the unit circle are rejected.
pub const CIRCLE_MARGIN: f64 = 1e-10;

/// Number of circle samples used to confirm unimodularity.
pub const INNER_SAMPLES: usize = 64;

/// Tolerance on ||f| − 1| at the circle samples.
pub const UNIMODULAR_TOL: f64 = 1e-8;

/// Finite Blaschke product e^{iθ} Π (λ − α)/(1 − ᾱλ).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBlaschke")]
pub struct BlaschkeProduct {
    phase: f64,
    zeros: Vec<C64>,
}

#[derive(Deserialize)]
struct RawBlaschke {
    phase: f64,
    #[serde(default)]
    zeros: Vec<C64>,
}

impl TryFrom<RawBlaschke> for BlaschkeProduct {
    type Error = Error;
    fn try_from(r: RawBlaschke) -> Result<Self> {
        BlaschkeProduct::new(r.phase, r.zeros)
    }
}

fn normalize_phase(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

impl BlaschkeProduct {
    pub fn new(phase: f64, zeros: Vec<C64>) -> Result<Self> {
        if !phase.is_finite() {
            return Err(Error::InvalidParameter(format!("phase {phase}")));
        }
        if let Some(&z) = zeros.iter().find(|z| !(z.norm() < 1.0 - CIRCLE_MARGIN)) {
            return Err(Error::ZeroNotInDisc(z));
        }
        Ok(BlaschkeProduct {
            phase: normalize_phase(phase),
            zeros,
        })
    }

    /// Unimodular constant e^{iθ}.
    pub fn constant(phase: f64) -> Self {
        BlaschkeProduct {
            phase: normalize_phase(phase),
            zeros: vec![],
        }
    }

    /// Unimodular constant equal to `w / |w|`.
    pub fn constant_value(w: C64) -> Self {
        Self::constant(w.arg())
    }

    pub fn identity() -> Self {
        Self::monomial(1, 0.0)
    }

    /// e^{iθ} λ^k.
    pub fn monomial(k: usize, phase: f64) -> Self {
        BlaschkeProduct {
            phase: normalize_phase(phase),
            zeros: vec![C64::new(0.0, 0.0); k],
        }
    }

    /// The single factor B_α(λ) = (λ − α)/(1 − ᾱλ).
    pub fn factor(alpha: C64) -> Result<Self> {
        Self::new(0.0, vec![alpha])
    }

    /// Clamps zeros into the disc of radius `max_radius` instead of failing;
    /// used by searches that parameterize the closed set Bl_ν.
    pub fn clamped(phase: f64, zeros: Vec<C64>, max_radius: f64) -> Self {
        let zeros = zeros
            .into_iter()
            .map(|z| {
                let r = z.norm();
                if r > max_radius {
                    z * (max_radius / r)
                } else {
                    z
                }
            })
            .collect();
        BlaschkeProduct {
            phase: normalize_phase(phase),
            zeros,
        }
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn zeros(&self) -> &[C64] {
        &self.zeros
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn unit(&self) -> C64 {
        C64::from_polar(1.0, self.phase)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.zeros
            .iter()
            .fold(self.unit(), |acc, &a| acc * (z - a) / (C64::new(1.0, 0.0) - a.conj() * z))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut zeros = self.zeros.clone();
        zeros.extend_from_slice(&o.zeros);
        BlaschkeProduct {
            phase: normalize_phase(self.phase + o.phase),
            zeros,
        }
    }

    /// Multiplies by the unimodular constant e^{iφ}.
    pub fn rotate(&self, phi: f64) -> Self {
        BlaschkeProduct {
            phase: normalize_phase(self.phase + phi),
            zeros: self.zeros.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        self.rotate(std::f64::consts::PI)
    }

    /// Rational form e^{iθ} Π(λ − α) / Π(1 − ᾱλ) with monic denominator.
    pub fn to_rational(&self) -> RationalFn {
        let one = C64::new(1.0, 0.0);
        let num = self
            .zeros
            .iter()
            .fold(Poly::constant(self.unit()), |acc, &a| &acc * &Poly::new(vec![-a, one]));
        let den = self
            .zeros
            .iter()
            .filter(|a| a.norm() > 0.0)
            .fold(Poly::one(), |acc, &a| &acc * &Poly::new(vec![one, -a.conj()]));
        RationalFn::new(num, den).expect("nonzero denominator")
    }

    /// Phasar derivative at λ ∈ T: Σ (1 − |α|²)/|1 − ᾱλ|².
    pub fn phasar_derivative(&self, lambda: C64) -> f64 {
        phasar_derivative(self, lambda)
    }

    /// Largest distance between zero multisets, matching greedily.
    pub fn zero_distance(&self, o: &Self) -> f64 {
        if self.degree() != o.degree() {
            return f64::INFINITY;
        }
        let mut rest: Vec<C64> = o.zeros.clone();
        let mut worst: f64 = 0.0;
        for &a in &self.zeros {
            let (idx, d) = rest
                .iter()
                .enumerate()
                .map(|(i, &b)| (i, (a - b).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .expect("same length");
            worst = worst.max(d);
            rest.swap_remove(idx);
        }
        worst
    }

    /// Sup-distance to another Blaschke product, sampled on the circle.
    pub fn sup_distance(&self, o: &Self, samples: usize) -> f64 {
        (0..samples)
            .map(|k| {
                let z = C64::from_polar(1.0, TAU * k as f64 / samples as f64);
                (self.eval(z) - o.eval(z)).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Phasar derivative Σ (1 − |α|²)/|1 − ᾱλ|² of a Blaschke product at λ ∈ T.
pub fn phasar_derivative(f: &BlaschkeProduct, lambda: C64) -> f64 {
    f.zeros
        .iter()
        .map(|a| (1.0 - a.norm_sqr()) / (C64::new(1.0, 0.0) - a.conj() * lambda).norm_sqr())
        .sum()
}

/// Recognizes a reduced rational function as a finite Blaschke product.
///
/// Requires every pole to lie outside the closed disc, every zero inside it
/// (at least 1e−10 from the circle) and |f| = 1 within 1e−8 at 64 circle
/// samples.
pub fn classify_inner(f: &RationalFn) -> Option<BlaschkeProduct> {
    if f.is_zero() {
        return None;
    }
    let poles = f.den().roots().ok()?;
    if poles.iter().any(|z| z.norm() <= 1.0 + CIRCLE_MARGIN) {
        return None;
    }
    let zeros = f.num().roots().ok()?;
    if zeros.iter().any(|z| z.norm() >= 1.0 - CIRCLE_MARGIN) {
        return None;
    }
    for k in 0..INNER_SAMPLES {
        let z = C64::from_polar(1.0, TAU * k as f64 / INNER_SAMPLES as f64);
        if (f.eval(z).norm() - 1.0).abs() > UNIMODULAR_TOL {
            return None;
        }
    }
    let bare = BlaschkeProduct::new(0.0, zeros).ok()?;
    let one = C64::new(1.0, 0.0);
    let phase = (f.eval(one) / bare.eval(one)).arg();
    Some(bare.rotate(phase))
}
