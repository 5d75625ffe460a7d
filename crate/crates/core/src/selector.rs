//! Best-of-m selection in a single pass over the full data.
//!
//! While reading each point once, every candidate center set keeps its z + 1
//! largest per-point costs in a bounded heap and, for the median and means
//! objectives, an exact running sum. After the pass the trimmed objective of
//! each candidate is exactly what [`objective_with_outliers`] computes, so the
//! winner agrees with evaluating the candidates one by one.
//!
//! [`objective_with_outliers`]: crate::objective::objective_with_outliers

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::time::Instant;

use rand::Rng;

use crate::error::{Error, Result};
use crate::objective::{aggregate, discard_order, nearest_sq};
use crate::rng::seeded;
use crate::sampler::{run_framework, FrameworkConfig};
use crate::sum::ExactSum;
use crate::types::{CenterSet, ClusteringResult, Dataset, Membership, ObjectiveKind};

/// Where a candidate came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub seed: u64,
    pub note: String,
}

/// The candidate center sets H_1..H_m.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    candidates: Vec<CenterSet>,
    provenance: Vec<Provenance>,
}

impl CandidateSet {
    pub fn new(candidates: Vec<CenterSet>) -> Result<Self> {
        let provenance =
            (0..candidates.len()).map(|i| Provenance { seed: 0, note: format!("candidate {i}") }).collect();
        Self::with_provenance(candidates, provenance)
    }

    pub fn with_provenance(candidates: Vec<CenterSet>, provenance: Vec<Provenance>) -> Result<Self> {
        let first = candidates.first().ok_or_else(|| Error::input("candidate list is empty"))?;
        if let Some(bad) = candidates.iter().find(|c| c.dim() != first.dim()) {
            return Err(Error::DimensionMismatch { expected: first.dim(), found: bad.dim() });
        }
        if provenance.len() != candidates.len() {
            return Err(Error::input("one provenance entry per candidate is required"));
        }
        Ok(CandidateSet { candidates, provenance })
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn candidates(&self) -> &[CenterSet] {
        &self.candidates
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }
}

#[derive(Debug, Clone, Copy)]
struct Key(f64, usize);

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Key {
    // Greater means discarded earlier.
    fn cmp(&self, other: &Self) -> Ordering {
        discard_order((other.0, other.1), (self.0, self.1))
    }
}

/// Streaming trimmed-objective state for one candidate.
#[derive(Debug, Clone)]
struct Tracker {
    top: BinaryHeap<Reverse<Key>>,
    cap: usize,
    sum: ExactSum,
    seen: usize,
}

impl Tracker {
    fn new(z: usize) -> Self {
        Tracker { top: BinaryHeap::with_capacity(z + 2), cap: z + 1, sum: ExactSum::new(), seen: 0 }
    }

    fn push(&mut self, cost: f64, index: usize, kind: ObjectiveKind) {
        self.seen += 1;
        if kind != ObjectiveKind::Center {
            self.sum.add(cost);
        }
        self.offer(Key(cost, index));
    }

    fn offer(&mut self, key: Key) {
        if self.top.len() < self.cap {
            self.top.push(Reverse(key));
        } else if let Some(Reverse(min)) = self.top.peek() {
            if key > *min {
                self.top.pop();
                self.top.push(Reverse(key));
            }
        }
    }

    /// Combine with the state of a disjoint partition of the points.
    fn merge(&mut self, other: Tracker) {
        self.sum.merge(&other.sum);
        self.seen += other.seen;
        for Reverse(key) in other.top {
            self.offer(key);
        }
    }

    /// Objective value and the discarded point indices (largest first).
    fn finish(&self, z: usize, kind: ObjectiveKind) -> (f64, Vec<usize>) {
        let mut keys: Vec<Key> = self.top.iter().map(|r| r.0).collect();
        keys.sort_unstable_by(|a, b| b.cmp(a));
        let discarded: Vec<Key> = keys.iter().copied().take(z).collect();
        let retained = self.seen - z;
        let value = match kind {
            ObjectiveKind::Center => keys.get(z).map_or(0.0, |k| k.0),
            _ => {
                let mut s = self.sum.clone();
                for k in &discarded {
                    s.add(-k.0);
                }
                aggregate(kind, 0.0, &s, retained)
            }
        };
        (value, discarded.into_iter().map(|k| k.1).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelectOptions {
    /// Max number of buffered (point, candidate) memberships. Beyond it the
    /// winner's memberships are recovered with a second scan instead.
    pub membership_buffer_cap: usize,
}

impl Default for SelectOptions {
    fn default() -> Self {
        SelectOptions { membership_buffer_cap: 1 << 27 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub best_index: usize,
    pub result: ClusteringResult,
    /// Trimmed objective of every candidate.
    pub objectives: Vec<f64>,
    /// Number of point reads from the data (n for a single pass).
    pub point_reads: usize,
}

pub fn one_pass_select(data: &Dataset, cands: &CandidateSet, z: usize, kind: ObjectiveKind) -> Result<Selection> {
    one_pass_select_with(data, cands, z, kind, &SelectOptions::default())
}

pub fn one_pass_select_with(
    data: &Dataset,
    cands: &CandidateSet,
    z: usize,
    kind: ObjectiveKind,
    opts: &SelectOptions,
) -> Result<Selection> {
    let n = data.len();
    if cands.is_empty() {
        return Err(Error::input("candidate list is empty"));
    }
    if z >= n {
        return Err(Error::input(format!("z = {z} must be smaller than n = {n}")));
    }
    data.check_dim(cands.candidates[0].dim())?;
    let m = cands.len();
    let buffer = n.saturating_mul(m) <= opts.membership_buffer_cap;
    let mut trackers: Vec<Tracker> = (0..m).map(|_| Tracker::new(z)).collect();
    let mut nearest: Vec<Vec<u32>> = if buffer { vec![Vec::with_capacity(n); m] } else { Vec::new() };
    let mut reads = 0usize;

    for (i, p) in data.points().enumerate() {
        reads += 1;
        for (l, h) in cands.candidates.iter().enumerate() {
            let (sq, j) = nearest_sq(p, h);
            trackers[l].push(kind.cost_from_sq(sq), i, kind);
            if buffer {
                nearest[l].push(j as u32);
            }
        }
    }

    let finished: Vec<(f64, Vec<usize>)> = trackers.iter().map(|t| t.finish(z, kind)).collect();
    let objectives: Vec<f64> = finished.iter().map(|f| f.0).collect();
    let mut best = 0;
    for (l, &v) in objectives.iter().enumerate() {
        if v < objectives[best] {
            best = l;
        }
    }
    let winner = &cands.candidates[best];
    let column: Vec<u32> = if buffer {
        nearest.swap_remove(best)
    } else {
        data.points()
            .map(|p| {
                reads += 1;
                nearest_sq(p, winner).1 as u32
            })
            .collect()
    };
    let mut memberships: Vec<Membership> = column.into_iter().map(Membership::Center).collect();
    for &i in &finished[best].1 {
        memberships[i] = Membership::Outlier;
    }
    Ok(Selection {
        best_index: best,
        result: ClusteringResult {
            centers: winner.clone(),
            memberships,
            outlier_count: z,
            objective: objectives[best],
            kind,
        },
        objectives,
        point_reads: reads,
    })
}

/// Trimmed objectives of every candidate computed over contiguous chunks of
/// the data and merged. Agrees exactly with [`one_pass_select`] for any chunking.
pub fn chunked_objectives(
    data: &Dataset,
    cands: &CandidateSet,
    z: usize,
    kind: ObjectiveKind,
    chunk: usize,
) -> Result<Vec<f64>> {
    if z >= data.len() {
        return Err(Error::input(format!("z = {z} must be smaller than n = {}", data.len())));
    }
    let chunk = chunk.max(1);
    let mut totals: Vec<Tracker> = (0..cands.len()).map(|_| Tracker::new(z)).collect();
    let mut start = 0;
    while start < data.len() {
        let end = (start + chunk).min(data.len());
        for (l, h) in cands.candidates.iter().enumerate() {
            let mut part = Tracker::new(z);
            for i in start..end {
                let (sq, _) = nearest_sq(data.point(i), h);
                part.push(kind.cost_from_sq(sq), i, kind);
            }
            totals[l].merge(part);
        }
        start = end;
    }
    Ok(totals.iter().map(|t| t.finish(z, kind).0).collect())
}

/// Timing and provenance of one framework run inside a boosted run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub seed: u64,
    pub sample_size: usize,
    pub extra: usize,
    pub sample_secs: f64,
    pub solve_secs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoostedRun {
    pub result: ClusteringResult,
    pub best_index: usize,
    pub objectives: Vec<f64>,
    pub runs: Vec<RunRecord>,
    /// Wall time of the full-data selection pass.
    pub select_secs: f64,
    pub point_reads: usize,
    pub warning: Option<String>,
}

/// Run the framework `m` times with independent derived seeds and keep the
/// candidate with the lowest trimmed objective on the full data.
pub fn boosted_run<R: Rng + ?Sized>(
    data: &Dataset,
    cfg: &FrameworkConfig,
    m: usize,
    rng: &mut R,
) -> Result<BoostedRun> {
    if m == 0 {
        return Err(Error::input("number of runs must be at least 1"));
    }
    let mut candidates = Vec::with_capacity(m);
    let mut provenance = Vec::with_capacity(m);
    let mut runs = Vec::with_capacity(m);
    let mut warning = None;
    for r in 0..m {
        let seed: u64 = rng.random();
        let run = run_framework(data, cfg, &mut seeded(seed))?;
        warning = warning.or(run.warning.clone());
        runs.push(RunRecord {
            seed,
            sample_size: run.sample_size,
            extra: run.extra,
            sample_secs: run.sample_secs,
            solve_secs: run.solve_secs,
        });
        provenance.push(Provenance { seed, note: format!("run {r}") });
        candidates.push(run.centers);
    }
    let cands = CandidateSet::with_provenance(candidates, provenance)?;
    let t = Instant::now();
    let sel = one_pass_select(data, &cands, cfg.z, cfg.kind)?;
    let select_secs = t.elapsed().as_secs_f64();
    Ok(BoostedRun {
        result: sel.result,
        best_index: sel.best_index,
        objectives: sel.objectives,
        runs,
        select_secs,
        point_reads: sel.point_reads,
        warning,
    })
}
