//! Boundary interpolation by Blaschke products: Möbius maps through three
//! boundary point pairs, cyclic order, and the real-linear formulation for
//! higher degrees.

use super::blaschke::BlaschkeProduct;
use super::poly::Poly;
use crate::linalg::real_null_space;
use crate::{Error, Result, C64};

const DISTINCT_TOL: f64 = 1e-12;

fn check_distinct(pts: &[C64; 3], what: &str) -> Result<()> {
    for i in 0..3 {
        for j in i + 1..3 {
            if (pts[i] - pts[j]).norm() < DISTINCT_TOL {
                return Err(Error::Coincident(format!("{what} points {i} and {j}")));
            }
        }
    }
    Ok(())
}

fn orientation(t: &[C64; 3]) -> f64 {
    ((t[1] - t[0]).conj() * (t[2] - t[0])).im
}

/// True iff the two triples of circle points run in the same direction.
pub fn same_cyclic_order(a: &[C64; 3], b: &[C64; 3]) -> Result<bool> {
    check_distinct(a, "first triple")?;
    check_distinct(b, "second triple")?;
    Ok(orientation(a).signum() == orientation(b).signum())
}

type Mat2 = [[C64; 2]; 2];

fn to_standard(z: &[C64; 3]) -> Mat2 {
    // λ ↦ (λ − z1)(z2 − z3) / ((λ − z3)(z2 − z1)) sends z1, z2, z3 to 0, 1, ∞
    let a = z[1] - z[2];
    let c = z[1] - z[0];
    [[a, -z[0] * a], [c, -z[2] * c]]
}

fn inverse(m: &Mat2) -> Mat2 {
    [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]]
}

fn product(x: &Mat2, y: &Mat2) -> Mat2 {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    out
}

/// The disc automorphism sending `src[i]` to `dst[i]`, if one exists.
///
/// Three distinct boundary pairs determine a unique Möbius map; it preserves
/// the disc exactly when both triples share a cyclic order. Repeated
/// destination points admit no Möbius map and give `None`.
pub fn mobius_from_boundary_triple(src: &[C64; 3], dst: &[C64; 3]) -> Result<Option<BlaschkeProduct>> {
    check_distinct(src, "source")?;
    if check_distinct(dst, "destination").is_err() {
        return Ok(None);
    }
    if !same_cyclic_order(src, dst)? {
        return Ok(None);
    }
    let m = product(&inverse(&to_standard(dst)), &to_standard(src));
    let (a, b, d) = (m[0][0], m[0][1], m[1][1]);
    if a.norm() == 0.0 || d.norm() == 0.0 {
        return Ok(None);
    }
    let alpha = -b / a;
    if alpha.norm() >= 1.0 - 1e-10 {
        return Ok(None);
    }
    let bare = BlaschkeProduct::new(0.0, vec![alpha])?;
    let phase = (dst[0] / bare.eval(src[0])).arg();
    let map = bare.rotate(phase);
    let ok = src.iter().zip(dst).all(|(s, t)| (map.eval(*s) - t).norm() < 1e-8);
    Ok(ok.then_some(map))
}

/// Search result for degree-δ boundary interpolation.
#[derive(Clone, Debug)]
pub struct BoundaryInterpolation {
    /// Dimension of the real solution space of the linearized conditions.
    pub null_dim: usize,
    /// An interpolating Blaschke product of exact degree δ, if found.
    pub solution: Option<BlaschkeProduct>,
    /// Whether the answer is decided by a finite argument (null space of
    /// dimension at most one) rather than by search.
    pub exact: bool,
}

/// Looks for a Blaschke product B of degree `degree` with B(ζ_i) = t_i at
/// the given circle points.
///
/// Writing B = P/P̃ with P of degree δ, the condition B(ζ) = t is
/// Im(σ̄ P(ζ)) = 0 where σ² = t ζ^δ, which is real-linear in the
/// coefficients of P. A solution is a Blaschke product iff every root of P
/// lies in the open disc. With a one-dimensional solution space this is a
/// direct check; larger spaces are searched with Nelder–Mead over the unit
/// sphere, minimizing the largest root modulus.
pub fn boundary_interpolant(nodes: &[C64], targets: &[C64], degree: usize) -> BoundaryInterpolation {
    let cols = 2 * degree + 2;
    let rows: Vec<Vec<f64>> = nodes
        .iter()
        .zip(targets)
        .map(|(&z, &t)| {
            let sigma = (t * z.powu(degree as u32)).sqrt();
            let mut row = vec![0.0; cols];
            for k in 0..=degree {
                let u = sigma.conj() * z.powu(k as u32);
                row[2 * k] = u.im;
                row[2 * k + 1] = u.re;
            }
            row
        })
        .collect();
    let basis = real_null_space(&rows, cols, 1e-9);
    let null_dim = basis.len();
    let to_poly = |x: &[f64]| -> Poly {
        let mut v = vec![C64::new(0.0, 0.0); degree + 1];
        for (k, b) in basis.iter().enumerate() {
            for j in 0..=degree {
                v[j] += C64::new(b[2 * j], b[2 * j + 1]) * x[k];
            }
        }
        Poly::new(v)
    };
    let build = |p: &Poly| -> Option<BlaschkeProduct> {
        if p.degree() != degree || p.leading().norm() < 1e-10 * p.max_abs() {
            return None;
        }
        let roots = p.roots().ok()?;
        if roots.iter().any(|r| r.norm() >= 1.0 - 1e-9) {
            return None;
        }
        let b = BlaschkeProduct::new(2.0 * p.leading().arg(), roots).ok()?;
        let ok = nodes.iter().zip(targets).all(|(&z, &t)| (b.eval(z) - t).norm() < 1e-8);
        ok.then_some(b)
    };
    match null_dim {
        0 => BoundaryInterpolation { null_dim, solution: None, exact: true },
        1 => {
            let p = to_poly(&[1.0]);
            BoundaryInterpolation { null_dim, solution: build(&p), exact: true }
        }
        _ => {
            let objective = |x: &[f64]| -> f64 {
                let p = to_poly(x);
                if p.degree() != degree || p.leading().norm() < 1e-10 * p.max_abs().max(1e-300) {
                    return 10.0;
                }
                match p.roots() {
                    Ok(r) => r.iter().map(|z| z.norm()).fold(0.0, f64::max),
                    Err(_) => 10.0,
                }
            };
            let mut starts: Vec<Vec<f64>> = (0..null_dim)
                .map(|k| (0..null_dim).map(|j| if j == k { 1.0 } else { 0.0 }).collect())
                .collect();
            for s in 0..8 {
                starts.push(
                    (0..null_dim)
                        .map(|j| ((s * 7 + j * 3) as f64 * 0.731).sin())
                        .collect(),
                );
            }
            for x0 in starts {
                let res = crate::cnu::nelder_mead::minimize(&objective, &x0, 0.3, 600, 1e-12, 1e-12);
                if res.value < 1.0 - 1e-9 {
                    if let Some(b) = build(&to_poly(&res.x)) {
                        return BoundaryInterpolation { null_dim, solution: Some(b), exact: false };
                    }
                }
            }
            BoundaryInterpolation { null_dim, solution: None, exact: false }
        }
    }
}
