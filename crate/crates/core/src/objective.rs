//! Distances, the three outlier-trimmed objectives, and membership assignment.
//!
//! For a fixed center set the optimal retained subset of size n - z is
//! obtained by discarding the z points of largest per-point cost. This holds
//! for the max, the sum, and the sum of squares alike, so no subset search is
//! needed. Equal costs discard the higher point index first, and nearest-center
//! ties resolve to the lowest center index.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::sum::ExactSum;
use crate::types::{CenterSet, ClusteringResult, Dataset, Membership, ObjectiveKind};

#[inline]
pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Squared distance to the nearest center and its index (lowest index on ties).
#[inline]
pub fn nearest_sq(p: &[f64], centers: &CenterSet) -> (f64, usize) {
    let mut best = f64::INFINITY;
    let mut best_idx = 0;
    for (j, c) in centers.centers().enumerate() {
        let d = sq_dist(p, c);
        if d < best {
            best = d;
            best_idx = j;
        }
    }
    (best, best_idx)
}

/// `dist(p, H)`: Euclidean distance to the nearest center and that center's index.
pub fn dist_to_set(p: &[f64], centers: &CenterSet) -> Result<(f64, usize)> {
    if p.len() != centers.dim() {
        return Err(Error::DimensionMismatch { expected: centers.dim(), found: p.len() });
    }
    let (sq, idx) = nearest_sq(p, centers);
    Ok((sq.sqrt(), idx))
}

/// Per-point costs and nearest-center indices for the whole dataset.
pub fn point_costs(data: &Dataset, centers: &CenterSet, kind: ObjectiveKind) -> Result<(Vec<f64>, Vec<usize>)> {
    data.check_dim(centers.dim())?;
    let mut costs = Vec::with_capacity(data.len());
    let mut nearest = Vec::with_capacity(data.len());
    for p in data.points() {
        let (sq, j) = nearest_sq(p, centers);
        costs.push(kind.cost_from_sq(sq));
        nearest.push(j);
    }
    Ok((costs, nearest))
}

/// Ordering in which points are discarded: larger cost first, then larger index.
#[inline]
pub(crate) fn discard_order(a: (f64, usize), b: (f64, usize)) -> Ordering {
    b.0.total_cmp(&a.0).then(b.1.cmp(&a.1))
}

/// Indices of the `z` points discarded as outliers, in discard order.
pub fn discarded_indices(costs: &[f64], z: usize) -> Vec<usize> {
    if z == 0 {
        return Vec::new();
    }
    let mut keyed: Vec<(f64, usize)> = costs.iter().copied().zip(0..).collect();
    if z < keyed.len() {
        keyed.select_nth_unstable_by(z - 1, |a, b| discard_order(*a, *b));
        keyed.truncate(z);
    }
    keyed.sort_unstable_by(|a, b| discard_order(*a, *b));
    keyed.into_iter().map(|(_, i)| i).collect()
}

/// Aggregate retained per-point costs into the objective value.
///
/// `retained_sum` must be the exact sum of the retained costs; `retained_max`
/// their maximum.
#[inline]
pub(crate) fn aggregate(kind: ObjectiveKind, retained_max: f64, retained_sum: &ExactSum, retained: usize) -> f64 {
    match kind {
        ObjectiveKind::Center => retained_max,
        ObjectiveKind::Median | ObjectiveKind::Means => retained_sum.value() / retained as f64,
    }
}

/// Trimmed objective of precomputed per-point costs plus the discarded indices.
pub fn trimmed_objective(costs: &[f64], z: usize, kind: ObjectiveKind) -> Result<(f64, Vec<usize>)> {
    let n = costs.len();
    if z >= n {
        return Err(Error::input(format!("z = {z} must be smaller than n = {n}")));
    }
    let discarded = discarded_indices(costs, z);
    let mut is_discarded = vec![false; n];
    for &i in &discarded {
        is_discarded[i] = true;
    }
    let mut max = 0.0f64;
    let mut sum = ExactSum::new();
    for (c, _) in costs.iter().zip(&is_discarded).filter(|(_, d)| !**d) {
        max = max.max(*c);
        if kind != ObjectiveKind::Center {
            sum.add(*c);
        }
    }
    Ok((aggregate(kind, max, &sum, n - z), discarded))
}

/// The outlier-trimmed objective `Δ^{-z}(P, H)` of the given kind.
pub fn objective_with_outliers(data: &Dataset, centers: &CenterSet, z: usize, kind: ObjectiveKind) -> Result<f64> {
    if z >= data.len() {
        return Err(Error::input(format!("z = {z} must be smaller than n = {}", data.len())));
    }
    let (costs, _) = point_costs(data, centers, kind)?;
    trimmed_objective(&costs, z, kind).map(|(v, _)| v)
}

/// `Cost(X, Y)`: sum of squared distances from each point of X to its nearest center.
pub fn cost(data: &Dataset, centers: &CenterSet) -> Result<f64> {
    data.check_dim(centers.dim())?;
    Ok(data.points().map(|p| nearest_sq(p, centers).0).collect::<ExactSum>().value())
}

/// Mark the z costliest points as outliers and assign the rest to their nearest center.
pub fn assign_memberships(
    data: &Dataset,
    centers: &CenterSet,
    z: usize,
    kind: ObjectiveKind,
) -> Result<ClusteringResult> {
    if z >= data.len() {
        return Err(Error::input(format!("z = {z} must be smaller than n = {}", data.len())));
    }
    let (costs, nearest) = point_costs(data, centers, kind)?;
    let (objective, discarded) = trimmed_objective(&costs, z, kind)?;
    let mut memberships: Vec<Membership> = nearest.into_iter().map(|j| Membership::Center(j as u32)).collect();
    for i in discarded {
        memberships[i] = Membership::Outlier;
    }
    Ok(ClusteringResult { centers: centers.clone(), memberships, outlier_count: z, objective, kind })
}
