use rand::Rng;

use crate::error::{Error, Result};
use crate::objective::sq_dist;
use crate::types::{CenterSet, Dataset};

/// Redraws allowed when a draw lands on an existing center.
const DUPLICATE_RETRIES: usize = 16;

/// k-means++ (D²) seeding.
///
/// The first center is uniform; each further one is drawn with probability
/// proportional to the squared distance to the nearest chosen center. When all
/// remaining mass is zero (fewer than k distinct points) draws fall back to
/// uniform and duplicates are accepted after a bounded number of retries.
pub fn kmeanspp_seed<R: Rng + ?Sized>(data: &Dataset, k: usize, rng: &mut R) -> Result<CenterSet> {
    if k == 0 {
        return Err(Error::input("k must be at least 1"));
    }
    let n = data.len();
    let first = rng.random_range(0..n);
    let mut chosen = vec![first];
    let mut weights: Vec<f64> = data.points().map(|p| sq_dist(p, data.point(first))).collect();
    while chosen.len() < k {
        let total: f64 = weights.iter().sum();
        let mut pick = draw(&weights, total, rng);
        let mut tries = 0;
        while weights[pick] == 0.0 && tries < DUPLICATE_RETRIES {
            pick = draw(&weights, total, rng);
            tries += 1;
        }
        chosen.push(pick);
        let c = data.point(pick);
        for (w, p) in weights.iter_mut().zip(data.points()) {
            let d = sq_dist(p, c);
            if d < *w {
                *w = d;
            }
        }
    }
    CenterSet::from_indices(data, &chosen)
}

fn draw<R: Rng + ?Sized>(weights: &[f64], total: f64, rng: &mut R) -> usize {
    if total <= 0.0 || !total.is_finite() {
        return rng.random_range(0..weights.len());
    }
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last_positive = i;
            if acc > target {
                return i;
            }
        }
    }
    // rounding left target just above the accumulated mass
    last_positive
}
