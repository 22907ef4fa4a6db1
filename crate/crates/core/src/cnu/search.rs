//! Maximization of ‖X(υ)‖ over Blaschke products of one fixed degree.
//!
//! A product of degree δ is parameterized by (θ, x_1, y_1, …, x_δ, y_δ):
//! phase θ and zeros x_k + iy_k, radially clamped into the disc.

use super::nelder_mead::{golden_max, minimize};
use super::{SearchConfig, XNormEvaluator};
use crate::ratfun::BlaschkeProduct;
use crate::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::f64::consts::TAU;

/// Zeros are clamped to this radius, so products near the boundary of
/// Bl_δ (where the degree drops) are still reachable.
pub const MAX_ZERO_RADIUS: f64 = 1.0 - 1e-9;

const PEAKS_REFINED: usize = 4;
const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Trace of the search at one degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DegreeSearchLog {
    pub degree: usize,
    /// Grid points or quasi-random seeds evaluated.
    pub seeds: usize,
    pub grid_best: f64,
    pub refinements: usize,
    pub evaluations: usize,
    pub best_value: f64,
    pub best_params: Vec<f64>,
    /// Whether the refinement that produced the best value converged.
    pub converged: bool,
}

/// Radical inverse of `index` in base `base`.
pub fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

pub(super) fn upsilon_of(params: &[f64]) -> BlaschkeProduct {
    let zeros = params[1..].chunks(2).map(|c| C64::new(c[0], c[1])).collect();
    BlaschkeProduct::clamped(params[0], zeros, MAX_ZERO_RADIUS)
}

fn value(ev: &XNormEvaluator, params: &[f64]) -> f64 {
    ev.eval(&upsilon_of(params)).unwrap_or(f64::NEG_INFINITY)
}

/// Larger value first; ties broken by lexicographic parameter order.
fn better(a: &(f64, Vec<f64>), b: &(f64, Vec<f64>)) -> Ordering {
    b.0.total_cmp(&a.0).then_with(|| {
        a.1.iter()
            .zip(&b.1)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

/// Canonical parameters: phase in [0, 2π) and zeros as clamped.
fn canonical(params: &[f64]) -> Vec<f64> {
    let u = upsilon_of(params);
    let mut out = vec![u.phase()];
    for z in u.zeros() {
        out.push(z.re);
        out.push(z.im);
    }
    out
}

pub(super) fn search_degree(ev: &XNormEvaluator, degree: usize, cfg: &SearchConfig) -> DegreeSearchLog {
    match degree {
        0 => search_constant(ev, cfg),
        _ => {
            let (seeds, starts, step) = if degree == 1 {
                (degree1_grid(cfg), cfg.grid.degree1_starts, 0.05)
            } else {
                (quasi_random_seeds(degree, cfg), cfg.grid.higher_starts, 0.1)
            };
            refine_from_seeds(ev, degree, seeds, starts, step, cfg)
        }
    }
}

fn search_constant(ev: &XNormEvaluator, cfg: &SearchConfig) -> DegreeSearchLog {
    let n = cfg.grid.degree0_angles;
    let h = TAU / n as f64;
    let vals: Vec<f64> = (0..n).into_par_iter().map(|k| value(ev, &[h * k as f64])).collect();
    let mut peaks: Vec<usize> = (0..n)
        .filter(|&k| vals[k] >= vals[(k + n - 1) % n] && vals[k] >= vals[(k + 1) % n])
        .collect();
    peaks.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
    peaks.truncate(PEAKS_REFINED);
    let grid_best = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let refined: Vec<(f64, Vec<f64>, usize)> = peaks
        .par_iter()
        .map(|&k| {
            let t0 = h * k as f64;
            let (t, v, evals) = golden_max(&|t: f64| value(ev, &[t]), t0 - h, t0 + h, 1e-12);
            if v >= vals[k] {
                (v, canonical(&[t]), evals)
            } else {
                (vals[k], canonical(&[t0]), evals)
            }
        })
        .collect();
    let evaluations = n + refined.iter().map(|r| r.2).sum::<usize>();
    let best = refined
        .into_iter()
        .map(|(v, p, _)| (v, p))
        .min_by(better)
        .unwrap_or((grid_best, vec![0.0]));
    DegreeSearchLog {
        degree: 0,
        seeds: n,
        grid_best,
        refinements: peaks.len(),
        evaluations,
        best_value: best.0,
        best_params: best.1,
        converged: true,
    }
}

fn degree1_grid(cfg: &SearchConfig) -> Vec<Vec<f64>> {
    let (na, nd) = (cfg.grid.degree1_angles, cfg.grid.degree1_disc);
    let mut out = Vec::new();
    for a in 0..na {
        let theta = TAU * a as f64 / na as f64;
        for i in 0..nd {
            let x = -1.0 + (2 * i + 1) as f64 / nd as f64;
            for j in 0..nd {
                let y = -1.0 + (2 * j + 1) as f64 / nd as f64;
                if x * x + y * y < 1.0 {
                    out.push(vec![theta, x, y]);
                }
            }
        }
    }
    out
}

fn quasi_random_seeds(degree: usize, cfg: &SearchConfig) -> Vec<Vec<f64>> {
    let dim = 2 * degree + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (degree as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let shift: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
    (0..cfg.grid.higher_seeds as u64)
        .map(|i| {
            let u: Vec<f64> = (0..dim)
                .map(|k| (halton(i + 1, PRIMES[k % PRIMES.len()]) + shift[k]).fract())
                .collect();
            let mut p = vec![TAU * u[0]];
            for k in 0..degree {
                let z = C64::from_polar(u[2 * k + 1].sqrt(), TAU * u[2 * k + 2]);
                p.push(z.re);
                p.push(z.im);
            }
            p
        })
        .collect()
}

fn refine_from_seeds(
    ev: &XNormEvaluator,
    degree: usize,
    seeds: Vec<Vec<f64>>,
    starts: usize,
    step: f64,
    cfg: &SearchConfig,
) -> DegreeSearchLog {
    let n_seeds = seeds.len();
    let mut scored: Vec<(f64, Vec<f64>)> = seeds.into_par_iter().map(|p| (value(ev, &p), p)).collect();
    scored.sort_by(better);
    let grid_best = scored.first().map_or(f64::NEG_INFINITY, |s| s.0);
    scored.truncate(starts);
    let neg = |x: &[f64]| -value(ev, x);
    let runs: Vec<(f64, Vec<f64>, bool, usize)> = scored
        .par_iter()
        .map(|(v0, x0)| {
            let r = minimize(&neg, x0, step, cfg.max_iter, 1e-10, 1e-14);
            if -r.value >= *v0 {
                (-r.value, canonical(&r.x), r.converged, r.evals)
            } else {
                (*v0, canonical(x0), r.converged, r.evals)
            }
        })
        .collect();
    let evaluations = n_seeds + runs.iter().map(|r| r.3).sum::<usize>();
    let best = runs
        .iter()
        .min_by(|a, b| better(&(a.0, a.1.clone()), &(b.0, b.1.clone())))
        .cloned()
        .unwrap_or((grid_best, vec![0.0; 2 * degree + 1], false, 0));
    DegreeSearchLog {
        degree,
        seeds: n_seeds,
        grid_best,
        refinements: runs.len(),
        evaluations,
        best_value: best.0,
        best_params: best.1,
        converged: best.2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halton_base_two() {
        let v: Vec<f64> = (1..5).map(|i| halton(i, 2)).collect();
        assert_eq!(v, vec![0.5, 0.25, 0.75, 0.125]);
    }

    #[test]
    fn degree_one_grid_stays_in_disc() {
        let g = degree1_grid(&SearchConfig::default());
        assert!(g.iter().all(|p| p[1] * p[1] + p[2] * p[2] < 1.0));
        assert_eq!(g.len() % 64, 0);
    }
}
