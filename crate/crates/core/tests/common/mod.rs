//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;
use sampclust::ObjectiveKind;

/// `x` scaled by 2^1074, which is an integer for every finite f64.
pub fn scaled(x: f64) -> BigInt {
    assert!(x.is_finite());
    if x == 0.0 {
        return BigInt::zero();
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1 } else { 1 };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
    BigInt::from(sign) * (BigInt::from(mant) << ((e + 1074) as usize))
}

fn ldexp(mut v: f64, mut e: i64) -> f64 {
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
    }
    v * 2f64.powi(e as i32)
}

/// Round `b * 2^-1074` to the nearest f64, ties to even.
pub fn unscale(b: &BigInt) -> f64 {
    let neg = b.is_negative();
    let a = b.abs();
    let bits = a.bits();
    let v = if bits <= 53 {
        ldexp(a.to_u64().unwrap() as f64, -1074)
    } else {
        let s = bits - 53;
        let mut m: BigInt = &a >> s;
        let rem: BigInt = &a - (&m << s);
        let half = BigInt::from(1u8) << (s - 1);
        let odd = (&m % 2u8) == BigInt::from(1u8);
        if rem > half || (rem == half && odd) {
            m += 1u8;
        }
        ldexp(m.to_u64().unwrap() as f64, s as i64 - 1074)
    };
    if neg {
        -v
    } else {
        v
    }
}

/// Correctly rounded sum.
pub fn big_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    unscale(&values.into_iter().map(scaled).sum())
}

pub fn point_cost(p: &[f64], centers: &[Vec<f64>], kind: ObjectiveKind) -> f64 {
    let mut best = f64::INFINITY;
    for c in centers {
        let mut sq = 0.0;
        for d in 0..p.len() {
            sq += (p[d] - c[d]) * (p[d] - c[d]);
        }
        best = best.min(sq);
    }
    match kind {
        ObjectiveKind::Means => best,
        _ => best.sqrt(),
    }
}

/// Minimum over every retained subset of size n - z of the objective on that subset.
pub fn brute_objective(points: &[Vec<f64>], centers: &[Vec<f64>], z: usize, kind: ObjectiveKind) -> f64 {
    let n = points.len();
    assert!(n <= 20 && z < n);
    let costs: Vec<f64> = points.iter().map(|p| point_cost(p, centers, kind)).collect();
    let keep = n - z;
    let mut best_max = f64::INFINITY;
    let mut best_sum: Option<BigInt> = None;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != keep {
            continue;
        }
        let chosen = (0..n).filter(|i| mask >> i & 1 == 1);
        match kind {
            ObjectiveKind::Center => {
                let m = chosen.map(|i| costs[i]).fold(0.0, f64::max);
                best_max = best_max.min(m);
            }
            _ => {
                let s: BigInt = chosen.map(|i| scaled(costs[i])).sum();
                if best_sum.as_ref().is_none_or(|b| s < *b) {
                    best_sum = Some(s);
                }
            }
        }
    }
    match kind {
        ObjectiveKind::Center => best_max,
        _ => unscale(&best_sum.unwrap()) / keep as f64,
    }
}

/// Smallest trimmed k-center radius over center sets drawn from the points.
pub fn brute_discrete_kcenter(points: &[Vec<f64>], k: usize, z: usize) -> f64 {
    let n = points.len();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << n) {
        if mask.count_ones() as usize != k.min(n) {
            continue;
        }
        let centers: Vec<Vec<f64>> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| points[i].clone()).collect();
        best = best.min(brute_objective(points, &centers, z, ObjectiveKind::Center));
    }
    best
}

/// A small random instance with integer coordinates.
pub struct Tiny {
    pub points: Vec<Vec<f64>>,
    pub centers: Vec<Vec<f64>>,
    pub z: usize,
}

pub fn tiny_instance<R: Rng>(rng: &mut R, max_n: usize, max_z: usize, max_d: usize, max_k: usize) -> Tiny {
    let n = rng.random_range(1..=max_n);
    let d = rng.random_range(1..=max_d);
    let k = rng.random_range(1..=max_k);
    let z = rng.random_range(0..=max_z.min(n - 1));
    let coord = |rng: &mut R| rng.random_range(-20i32..=20) as f64;
    let points = (0..n).map(|_| (0..d).map(|_| coord(rng)).collect()).collect();
    let centers = (0..k).map(|_| (0..d).map(|_| coord(rng)).collect()).collect();
    Tiny { points, centers, z }
}
