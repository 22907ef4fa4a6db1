#![allow(dead_code)]

use gamma_interp::ratfun::BlaschkeProduct;
use gamma_interp::C64;
use proptest::prelude::*;
use std::f64::consts::TAU;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn disc_point(max_r: f64) -> impl Strategy<Value = C64> {
    (0.0..max_r, 0.0..TAU).prop_map(|(r, t)| C64::from_polar(r, t))
}

pub fn circle_point() -> impl Strategy<Value = C64> {
    (0.0..TAU).prop_map(|t| C64::from_polar(1.0, t))
}

pub fn blaschke(min_deg: usize, max_deg: usize, max_r: f64) -> impl Strategy<Value = BlaschkeProduct> {
    (0.0..TAU, prop::collection::vec(disc_point(max_r), min_deg..=max_deg))
        .prop_map(|(t, z)| BlaschkeProduct::new(t, z).expect("zeros inside the disc"))
}

fn separated(pts: &[C64], min_gap: f64) -> bool {
    pts.iter().enumerate().all(|(i, a)| pts[i + 1..].iter().all(|b| (a - b).norm() > min_gap))
}

/// `n` disc points of modulus below `max_r`, pairwise at least 0.1 apart.
pub fn nodes(n: usize, max_r: f64) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(disc_point(max_r), n).prop_filter("separated nodes", |v| separated(v, 0.1))
}

/// Points on a spiral filling the disc of radius 0.9.
pub fn fresh_points(n: usize) -> Vec<C64> {
    (0..n).map(|k| C64::from_polar(0.9 * (k as f64 + 0.5) / n as f64, 2.4 * k as f64)).collect()
}

pub fn circle_samples(n: usize) -> Vec<C64> {
    (0..n).map(|k| C64::from_polar(1.0, TAU * (k as f64 + 0.3) / n as f64)).collect()
}
