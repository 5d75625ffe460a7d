use rand::Rng;

use super::KCenterSolution;
use crate::error::{Error, Result};
use crate::objective::sq_dist;
use crate::types::{CenterSet, Dataset};

/// Farthest-point traversal for k-center (2-approximation).
///
/// The first center is a uniformly random point of `data`.
pub fn gonzalez_kcenter<R: Rng + ?Sized>(data: &Dataset, k: usize, rng: &mut R) -> Result<KCenterSolution> {
    if k == 0 {
        return Err(Error::input("k must be at least 1"));
    }
    let first = rng.random_range(0..data.len());
    gonzalez_kcenter_from(data, k, first)
}

/// Farthest-point traversal starting from the point at index `first`.
///
/// Each further center is the point farthest from the current centers, lowest
/// index on ties. Once every point coincides with a center the remaining picks
/// repeat existing centers, so exactly `k` centers are always returned.
pub fn gonzalez_kcenter_from(data: &Dataset, k: usize, first: usize) -> Result<KCenterSolution> {
    if k == 0 {
        return Err(Error::input("k must be at least 1"));
    }
    if first >= data.len() {
        return Err(Error::input(format!("first index {first} out of range")));
    }
    let mut chosen = Vec::with_capacity(k);
    chosen.push(first);
    let anchor = data.point(first);
    let mut nearest: Vec<f64> = data.points().map(|p| sq_dist(p, anchor)).collect();
    while chosen.len() < k {
        let (far, _) = farthest(&nearest);
        chosen.push(far);
        let c = data.point(far);
        for (d, p) in nearest.iter_mut().zip(data.points()) {
            let nd = sq_dist(p, c);
            if nd < *d {
                *d = nd;
            }
        }
    }
    let (_, radius_sq) = farthest(&nearest);
    Ok(KCenterSolution {
        centers: CenterSet::from_indices(data, &chosen)?,
        center_indices: chosen,
        radius: radius_sq.sqrt(),
    })
}

fn farthest(d: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &v) in d.iter().enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}
