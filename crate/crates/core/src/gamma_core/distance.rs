use super::map::GammaMap;
use super::point::{membership, phi, GammaPoint};
use crate::cnu::nelder_mead::golden_max;
use crate::ratfun::pseudo_hyperbolic;
use crate::{Error, Result, C64};
use std::f64::consts::TAU;

const CARATHEODORY_GRID: usize = 512;
const CARATHEODORY_REFINE: usize = 4;

/// Carathéodory distance on Γ: the maximum over ω ∈ T of
/// ρ(Φ_ω(a), Φ_ω(b)), found on a 512-angle grid and refined by golden
/// section to 1e−10 in angle around the best grid peaks.
pub fn caratheodory_distance(a: &GammaPoint, b: &GammaPoint) -> Result<f64> {
    for (name, pt) in [("first", a), ("second", b)] {
        if membership(pt).outside {
            return Err(Error::Validation(format!("{name} point lies outside Gamma")));
        }
    }
    let f = |theta: f64| -> f64 {
        let w = C64::from_polar(1.0, theta);
        match (phi(w, a), phi(w, b)) {
            (Ok(x), Ok(y)) => pseudo_hyperbolic(x, y),
            _ => 0.0,
        }
    };
    let h = TAU / CARATHEODORY_GRID as f64;
    let vals: Vec<f64> = (0..CARATHEODORY_GRID).map(|k| f(k as f64 * h)).collect();
    let mut peaks: Vec<usize> = (0..CARATHEODORY_GRID)
        .filter(|&k| {
            let prev = vals[(k + CARATHEODORY_GRID - 1) % CARATHEODORY_GRID];
            let next = vals[(k + 1) % CARATHEODORY_GRID];
            vals[k] >= prev && vals[k] >= next
        })
        .collect();
    peaks.sort_by(|&x, &y| vals[y].total_cmp(&vals[x]));
    let mut best = vals.iter().copied().fold(0.0, f64::max);
    for &k in peaks.iter().take(CARATHEODORY_REFINE) {
        let t = k as f64 * h;
        let (_, v, _) = golden_max(&f, t - h, t + h, 1e-10);
        best = best.max(v);
    }
    Ok(best)
}

/// ρ(λ1, λ2) − C_Γ(h(λ1), h(λ2)); zero certifies that h is isometric for
/// the invariant distances at this pair.
pub fn kobayashi_defect(h: &GammaMap, l1: C64, l2: C64) -> Result<f64> {
    if (l1 - l2).norm() < 1e-14 {
        return Err(Error::Precondition("the two disc points coincide".into()));
    }
    if l1.norm() >= 1.0 || l2.norm() >= 1.0 {
        return Err(Error::Precondition("points must lie in the open disc".into()));
    }
    Ok(pseudo_hyperbolic(l1, l2) - caratheodory_distance(&h.eval(l1), &h.eval(l2))?)
}
