//! Greedy-disk k-center with outliers (3-approximation).
//!
//! For a guessed radius r the greedy repeatedly takes the point whose r-ball
//! holds the most uncovered points and marks everything within 3r of it as
//! covered. The guess succeeds if at most z points stay uncovered after k
//! rounds. Every r at or above the optimal radius succeeds, so a binary search
//! over the sorted pairwise distances ends at a radius no larger than the
//! optimum and the covered points lie within 3x of it.

use super::KCenterSolution;
use crate::error::{Error, Result};
use crate::objective::{point_costs, sq_dist, trimmed_objective};
use crate::types::{CenterSet, Dataset, ObjectiveKind};

/// Largest input accepted; the distance table is quadratic in it.
pub const MAX_POINTS: usize = 12_000;

/// Rows of the distance table sorted by distance.
struct SortedBalls {
    n: usize,
    dist: Vec<f64>,
    idx: Vec<u32>,
}

impl SortedBalls {
    fn new(data: &Dataset) -> Self {
        let n = data.len();
        let mut full = vec![0.0f64; n * n];
        for i in 0..n {
            let pi = data.point(i);
            for j in (i + 1)..n {
                let d = sq_dist(pi, data.point(j)).sqrt();
                full[i * n + j] = d;
                full[j * n + i] = d;
            }
        }
        let mut dist = Vec::with_capacity(n * n);
        let mut idx = Vec::with_capacity(n * n);
        let mut row: Vec<(f64, u32)> = Vec::with_capacity(n);
        for i in 0..n {
            row.clear();
            row.extend((0..n).map(|j| (full[i * n + j], j as u32)));
            row.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            dist.extend(row.iter().map(|e| e.0));
            idx.extend(row.iter().map(|e| e.1));
        }
        SortedBalls { n, dist, idx }
    }

    /// Points within distance `r` of point `i`.
    fn ball(&self, i: usize, r: f64) -> &[u32] {
        let row = &self.dist[i * self.n..(i + 1) * self.n];
        let len = row.partition_point(|&d| d <= r);
        &self.idx[i * self.n..i * self.n + len]
    }

    fn candidate_radii(&self) -> Vec<f64> {
        let n = self.n;
        let mut radii: Vec<f64> = Vec::with_capacity(n * (n - 1) / 2 + 1);
        radii.push(0.0);
        for i in 0..n {
            for j in 0..n {
                let d = self.dist[i * n + j];
                // each unordered pair appears in two rows; keep one copy
                if (self.idx[i * n + j] as usize) > i {
                    radii.push(d);
                }
            }
        }
        radii.sort_unstable_by(f64::total_cmp);
        radii.dedup();
        radii
    }

    /// Greedy disk cover at radius `r`; returns the chosen centers and the
    /// number of points left uncovered.
    fn greedy(&self, k: usize, r: f64) -> (Vec<usize>, usize) {
        let n = self.n;
        let mut counts: Vec<usize> = (0..n).map(|i| self.ball(i, r).len()).collect();
        let mut covered = vec![false; n];
        let mut uncovered = n;
        let mut centers = Vec::with_capacity(k);
        let expanded = 3.0 * r;
        for _ in 0..k {
            let mut best = 0;
            for i in 1..n {
                if counts[i] > counts[best] {
                    best = i;
                }
            }
            centers.push(best);
            if uncovered == 0 {
                continue;
            }
            for &j in self.ball(best, expanded) {
                let j = j as usize;
                if covered[j] {
                    continue;
                }
                covered[j] = true;
                uncovered -= 1;
                for &i in self.ball(j, r) {
                    counts[i as usize] -= 1;
                }
            }
        }
        (centers, uncovered)
    }
}

/// k-center with exactly `z` outliers; centers are chosen among the input points.
///
/// The returned radius is the max distance of the n - z retained points to
/// the centers. When `k + z >= n` the first k points (cycled if needed) are
/// returned with radius 0.
pub fn charikar_kcenter_outliers(data: &Dataset, k: usize, z: usize) -> Result<KCenterSolution> {
    let n = data.len();
    if k == 0 {
        return Err(Error::input("k must be at least 1"));
    }
    if z >= n {
        return Err(Error::input(format!("z = {z} must be smaller than n = {n}")));
    }
    let chosen: Vec<usize> = if k + z >= n {
        (0..k).map(|i| i % n).collect()
    } else {
        if n > MAX_POINTS {
            return Err(Error::Config(format!("greedy-disk k-center accepts at most {MAX_POINTS} points, got {n}")));
        }
        let balls = SortedBalls::new(data);
        let radii = balls.candidate_radii();
        // radii[hi] always succeeds; indices below lo are known to fail.
        let mut hi = radii.len() - 1;
        let mut lo = 0;
        let mut best = balls.greedy(k, radii[hi]).0;
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            let (centers, left) = balls.greedy(k, radii[mid]);
            if left <= z {
                hi = mid;
                best = centers;
            } else {
                lo = mid + 1;
            }
        }
        best
    };
    let centers = CenterSet::from_indices(data, &chosen)?;
    let (costs, _) = point_costs(data, &centers, ObjectiveKind::Center)?;
    let (radius, _) = trimmed_objective(&costs, z, ObjectiveKind::Center)?;
    Ok(KCenterSolution { centers, center_indices: chosen, radius })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_outlier_on_a_line() {
        let p = Dataset::from_scalars("t", &[0.0, 1.0, 2.0, 100.0]).unwrap();
        let s = charikar_kcenter_outliers(&p, 1, 1).unwrap();
        assert!(s.center_indices[0] <= 2);
        assert!(s.radius <= 3.0 * 1.0);
    }

    #[test]
    fn keep_only_the_centers() {
        let p = Dataset::from_scalars("t", &[0.0, 1.0, 2.0, 100.0]).unwrap();
        let s = charikar_kcenter_outliers(&p, 2, 2).unwrap();
        assert_eq!(s.radius, 0.0);
        assert_eq!(s.centers.len(), 2);
    }

    #[test]
    fn duplicate_groups_are_covered_exactly() {
        let p = Dataset::from_scalars("t", &[5.0, 5.0, 5.0, -3.0, -3.0, 40.0, 40.0, 40.0]).unwrap();
        let s = charikar_kcenter_outliers(&p, 3, 0).unwrap();
        assert_eq!(s.radius, 0.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        let p = Dataset::from_scalars("t", &[0.0, 1.0]).unwrap();
        assert!(charikar_kcenter_outliers(&p, 0, 0).is_err());
        assert!(charikar_kcenter_outliers(&p, 1, 2).is_err());
    }
}
