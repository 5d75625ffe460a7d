//! Lloyd iterations, with and without outlier trimming (k-means--).

use super::{geometric_median, IterConfig};
use crate::error::{Error, Result};
use crate::objective::{discard_order, discarded_indices, nearest_sq, sq_dist};
use crate::sum::exact_sum;
use crate::types::{CenterSet, Dataset, ObjectiveKind};

#[derive(Debug, Clone, PartialEq)]
pub struct LloydOutcome {
    pub centers: CenterSet,
    /// Objective after each assignment, starting with the initial centers.
    pub objective_history: Vec<f64>,
    pub iterations: usize,
    /// Points trimmed in the final assignment (empty for plain Lloyd).
    pub outliers: Vec<usize>,
}

impl LloydOutcome {
    pub fn objective(&self) -> f64 {
        *self.objective_history.last().expect("history starts with the initial objective")
    }
}

/// Alternate nearest-center assignment and center updates.
///
/// `kind` selects the update: coordinate means for `Means`, Weiszfeld
/// geometric medians for `Median`. Empty clusters are re-seeded at the
/// current farthest point.
pub fn lloyd(data: &Dataset, init: &CenterSet, cfg: &IterConfig, kind: ObjectiveKind) -> Result<LloydOutcome> {
    iterate(data, init, cfg, kind, 0)
}

/// k-means-- : each round trims the `z` costliest points before updating.
pub fn trimmed_lloyd(
    data: &Dataset,
    k: usize,
    z: usize,
    init: &CenterSet,
    cfg: &IterConfig,
    kind: ObjectiveKind,
) -> Result<LloydOutcome> {
    if init.len() != k {
        return Err(Error::input(format!("expected {k} initial centers, got {}", init.len())));
    }
    iterate(data, init, cfg, kind, z)
}

struct Assignment {
    costs: Vec<f64>,
    nearest: Vec<usize>,
    trimmed: Vec<bool>,
    discarded: Vec<usize>,
    objective: f64,
}

fn assign(data: &Dataset, centers: &CenterSet, kind: ObjectiveKind, z: usize) -> Assignment {
    let n = data.len();
    let mut costs = Vec::with_capacity(n);
    let mut nearest = Vec::with_capacity(n);
    for p in data.points() {
        let (sq, j) = nearest_sq(p, centers);
        costs.push(kind.cost_from_sq(sq));
        nearest.push(j);
    }
    let discarded = discarded_indices(&costs, z);
    let mut trimmed = vec![false; n];
    for &i in &discarded {
        trimmed[i] = true;
    }
    let objective = exact_sum(costs.iter().zip(&trimmed).filter(|(_, t)| !**t).map(|(c, _)| *c)) / (n - z) as f64;
    Assignment { costs, nearest, trimmed, discarded, objective }
}

fn iterate(data: &Dataset, init: &CenterSet, cfg: &IterConfig, kind: ObjectiveKind, z: usize) -> Result<LloydOutcome> {
    if kind == ObjectiveKind::Center {
        return Err(Error::input("Lloyd iterations need a median or means objective"));
    }
    if cfg.max_iters == 0 {
        return Err(Error::input("max_iters must be at least 1"));
    }
    if z >= data.len() {
        return Err(Error::input(format!("z = {z} must be smaller than n = {}", data.len())));
    }
    data.check_dim(init.dim())?;

    let mut centers = init.clone();
    let mut current = assign(data, &centers, kind, z);
    let mut history = vec![current.objective];
    let mut iterations = 0;
    while iterations < cfg.max_iters {
        iterations += 1;
        let next_centers = update(data, &centers, &current, kind, cfg.restrict_centers_to_input);
        let next = assign(data, &next_centers, kind, z);
        let prev = current.objective;
        history.push(next.objective);
        centers = next_centers;
        current = next;
        if prev - current.objective <= cfg.tol * prev {
            break;
        }
    }
    Ok(LloydOutcome { centers, objective_history: history, iterations, outliers: current.discarded })
}

fn update(data: &Dataset, centers: &CenterSet, a: &Assignment, kind: ObjectiveKind, restrict: bool) -> CenterSet {
    let k = centers.len();
    let dim = data.dim();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, (&j, &t)) in a.nearest.iter().zip(&a.trimmed).enumerate() {
        if !t {
            members[j].push(i);
        }
    }
    let mut next = centers.clone();
    let mut empty = Vec::new();
    for (j, m) in members.iter().enumerate() {
        if m.is_empty() {
            empty.push(j);
            continue;
        }
        let new_center = match kind {
            ObjectiveKind::Means => {
                let mut mean = vec![0.0; dim];
                for &i in m {
                    for (acc, x) in mean.iter_mut().zip(data.point(i)) {
                        *acc += x;
                    }
                }
                mean.iter_mut().for_each(|v| *v /= m.len() as f64);
                mean
            }
            _ => {
                let old = centers.center(j);
                let med = geometric_median(data, m, old);
                let spread = |c: &[f64]| exact_sum(m.iter().map(|&i| sq_dist(data.point(i), c).sqrt()));
                if spread(&med) <= spread(old) {
                    med
                } else {
                    old.to_vec()
                }
            }
        };
        let new_center = if restrict { snap(data, m, &new_center) } else { new_center };
        next.center_mut(j).copy_from_slice(&new_center);
    }
    if !empty.is_empty() {
        // farthest retained points first
        let mut order: Vec<usize> = (0..data.len()).filter(|&i| !a.trimmed[i]).collect();
        order.sort_unstable_by(|&x, &y| discard_order((a.costs[x], x), (a.costs[y], y)));
        for (j, &i) in empty.iter().zip(order.iter().cycle()) {
            next.center_mut(*j).copy_from_slice(data.point(i));
        }
    }
    next
}

fn snap(data: &Dataset, members: &[usize], target: &[f64]) -> Vec<f64> {
    let mut best = members[0];
    let mut best_d = f64::INFINITY;
    for &i in members {
        let d = sq_dist(data.point(i), target);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    data.point(best).to_vec()
}
