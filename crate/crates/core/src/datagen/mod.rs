//! Synthetic instances, the adversarial tightness instance, point-file I/O,
//! and outlier augmentation for labeled real data.

mod io;

pub use io::{load_points, read_metadata, save_points, write_metadata, DatasetMetadata, LabelColumn, PointFormat};

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::sq_dist;
use crate::rng::seeded;
use crate::sampler::ceil_count;
use crate::types::{CenterSet, Dataset, Label};

/// Rejection-sampling attempts per outlier before the box is enlarged.
pub const MAX_REJECTION_ATTEMPTS: usize = 1_000_000;
/// Number of 2x box enlargements before giving up.
pub const MAX_BOX_ENLARGEMENTS: usize = 5;
/// Above this many within-cluster pairs the diameter is bounded instead of scanned.
pub const EXACT_DIAMETER_PAIRS: usize = 40_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub k: usize,
    pub n: usize,
    pub z: usize,
    pub dim: usize,
    /// Side length of the hypercube holding the cluster centers.
    pub side: f64,
    /// Per-coordinate standard deviation of each cluster.
    pub sigma: f64,
    /// Fraction of the n - z inliers assigned to the smallest cluster.
    pub min_cluster_frac: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    /// The large synthetic setting: k = 8, n = 10^5, z = 2% n, D = 100, side 400, σ = √1000.
    pub fn reference(seed: u64) -> Self {
        SyntheticSpec {
            k: 8,
            n: 100_000,
            z: 2_000,
            dim: 100,
            side: 400.0,
            sigma: 1000f64.sqrt(),
            min_cluster_frac: 1.0 / 8.0,
            seed,
        }
    }

    /// `min_cluster_frac` giving a smallest cluster of `ratio * z` points,
    /// i.e. an instance with ε1/ε2 = ratio.
    pub fn frac_for_ratio(n: usize, z: usize, ratio: f64) -> f64 {
        ratio * z as f64 / (n - z) as f64
    }

    pub fn cluster_sizes(&self) -> Result<Vec<usize>> {
        if self.k == 0 || self.dim == 0 {
            return Err(Error::input("k and dim must be at least 1"));
        }
        if self.z >= self.n {
            return Err(Error::input(format!("z = {} must be smaller than n = {}", self.z, self.n)));
        }
        let inliers = self.n - self.z;
        if inliers < self.k {
            return Err(Error::input(format!("{inliers} inliers cannot fill {} clusters", self.k)));
        }
        if !(self.side > 0.0 && self.sigma >= 0.0 && self.side.is_finite() && self.sigma.is_finite()) {
            return Err(Error::input("side must be positive and sigma nonnegative"));
        }
        if self.k == 1 {
            return Ok(vec![inliers]);
        }
        let smallest = (self.min_cluster_frac * inliers as f64).round() as usize;
        if smallest < 1 {
            return Err(Error::input("min_cluster_frac leaves the smallest cluster empty"));
        }
        let rest = inliers
            .checked_sub(smallest)
            .filter(|r| *r >= self.k - 1)
            .ok_or_else(|| Error::input("min_cluster_frac leaves too few points for the other clusters"))?;
        let others = self.k - 1;
        if smallest > rest.div_ceil(others) {
            return Err(Error::input(format!(
                "min_cluster_frac = {} does not make the last cluster the smallest",
                self.min_cluster_frac
            )));
        }
        let mut sizes: Vec<usize> = (0..others).map(|j| rest / others + usize::from(j < rest % others)).collect();
        sizes.push(smallest);
        Ok(sizes)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiameterMethod {
    /// Max over all within-cluster pairs.
    Exact,
    /// Twice the largest point-to-center distance (triangle inequality).
    CenterBound,
}

/// Planted structure of a generated instance, recomputed from the realized points.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub generating_centers: CenterSet,
    pub labels: Vec<Label>,
    pub cluster_sizes: Vec<usize>,
    /// Per cluster, the max distance of its points to its generating center.
    pub r_bound: Vec<f64>,
    /// Max within-cluster diameter L.
    pub diameter: f64,
    pub diameter_method: DiameterMethod,
}

impl GroundTruth {
    pub fn outlier_count(&self) -> usize {
        self.labels.iter().filter(|l| l.is_outlier()).count()
    }

    /// Radius covering every planted cluster; an upper bound on the optimal k-center radius.
    pub fn radius_bound(&self) -> f64 {
        self.r_bound.iter().copied().fold(0.0, f64::max)
    }

    /// Realized `(ε1, ε2)`: `k min|C_j| / n` and `k z / n`.
    pub fn realized_epsilons(&self) -> (f64, f64) {
        let n = self.labels.len() as f64;
        let k = self.cluster_sizes.len() as f64;
        let min = self.cluster_sizes.iter().copied().min().unwrap_or(0) as f64;
        (k * min / n, k * self.outlier_count() as f64 / n)
    }

    /// Build ground truth from labeled data and the planted centers.
    pub fn from_labeled(data: &Dataset, generating_centers: CenterSet) -> Result<Self> {
        let labels = data.labels().ok_or_else(|| Error::input("ground truth needs labeled data"))?.to_vec();
        data.check_dim(generating_centers.dim())?;
        let k = generating_centers.len();
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (i, l) in labels.iter().enumerate() {
            if let Label::Cluster(c) = l {
                let c = *c as usize;
                if c >= k {
                    return Err(Error::input(format!("label {c} has no generating center")));
                }
                members[c].push(i);
            }
        }
        let r_bound: Vec<f64> = members
            .iter()
            .enumerate()
            .map(|(j, m)| {
                m.iter().map(|&i| sq_dist(data.point(i), generating_centers.center(j))).fold(0.0, f64::max).sqrt()
            })
            .collect();
        let pairs: usize = members.iter().map(|m| m.len() * m.len().saturating_sub(1) / 2).sum();
        let (diameter, diameter_method) = if pairs <= EXACT_DIAMETER_PAIRS {
            (exact_diameter(data, &members), DiameterMethod::Exact)
        } else {
            (2.0 * r_bound.iter().copied().fold(0.0, f64::max), DiameterMethod::CenterBound)
        };
        Ok(GroundTruth {
            generating_centers,
            labels,
            cluster_sizes: members.iter().map(Vec::len).collect(),
            r_bound,
            diameter,
            diameter_method,
        })
    }
}

fn exact_diameter(data: &Dataset, members: &[Vec<usize>]) -> f64 {
    let mut best = 0.0f64;
    for m in members {
        for (a, &i) in m.iter().enumerate() {
            let pi = data.point(i);
            for &j in &m[a + 1..] {
                best = best.max(sq_dist(pi, data.point(j)));
            }
        }
    }
    best.sqrt()
}

/// A ball that outliers must avoid.
struct Ball {
    center: Vec<f64>,
    radius_sq: f64,
}

/// Draw `count` points uniformly from the cube `lows + [0, side]^D`
/// that fall outside every ball.
fn draw_outside<R: Rng + ?Sized>(
    rng: &mut R,
    count: usize,
    dim: usize,
    lows: &[f64],
    side: f64,
    balls: &[Ball],
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(count * dim);
    let mut point = vec![0.0; dim];
    let mut lows = lows.to_vec();
    let mut side = side;
    let mut enlargements = 0;
    let mut made = 0;
    while made < count {
        let mut placed = false;
        for _ in 0..MAX_REJECTION_ATTEMPTS {
            for (x, lo) in point.iter_mut().zip(&lows) {
                *x = lo + side * rng.random::<f64>();
            }
            if balls.iter().all(|b| sq_dist(&point, &b.center) > b.radius_sq) {
                placed = true;
                break;
            }
        }
        if placed {
            out.extend_from_slice(&point);
            made += 1;
            continue;
        }
        if enlargements == MAX_BOX_ENLARGEMENTS {
            return Err(Error::Runtime(format!(
                "could not place outlier {made} outside the cluster balls after {MAX_BOX_ENLARGEMENTS} box enlargements"
            )));
        }
        // Double the cube about its middle.
        for lo in lows.iter_mut() {
            *lo -= side / 2.0;
        }
        side *= 2.0;
        enlargements += 1;
    }
    Ok(out)
}

/// Gaussian clusters around uniform centers, plus uniform outliers outside
/// every cluster's enclosing ball.
///
/// The outlier box is the center hypercube scaled 3x about its middle. Points
/// are ordered cluster by cluster, outliers last.
pub fn gen_synthetic(spec: &SyntheticSpec) -> Result<(Dataset, GroundTruth)> {
    let sizes = spec.cluster_sizes()?;
    let mut rng = seeded(spec.seed);
    let dim = spec.dim;
    let centers: Vec<f64> = (0..spec.k * dim).map(|_| spec.side * rng.random::<f64>()).collect();
    let normal = Normal::new(0.0, spec.sigma).map_err(|e| Error::input(e.to_string()))?;

    let mut coords = Vec::with_capacity(spec.n * dim);
    let mut labels = Vec::with_capacity(spec.n);
    for (j, &size) in sizes.iter().enumerate() {
        let c = &centers[j * dim..(j + 1) * dim];
        for _ in 0..size {
            coords.extend(c.iter().map(|x| x + normal.sample(&mut rng)));
            labels.push(Label::Cluster(j as u32));
        }
    }

    // Enclosing balls from the realized inliers.
    let mut radius_sq = vec![0.0f64; spec.k];
    for (p, l) in coords.chunks_exact(dim).zip(&labels) {
        if let Label::Cluster(j) = l {
            let j = *j as usize;
            radius_sq[j] = radius_sq[j].max(sq_dist(p, &centers[j * dim..(j + 1) * dim]));
        }
    }
    let balls: Vec<Ball> = (0..spec.k)
        .map(|j| Ball { center: centers[j * dim..(j + 1) * dim].to_vec(), radius_sq: radius_sq[j] })
        .collect();
    let lows = vec![-spec.side; dim];
    let outliers = draw_outside(&mut rng, spec.z, dim, &lows, 3.0 * spec.side, &balls)?;
    coords.extend(outliers);
    labels.extend(std::iter::repeat_n(Label::Outlier, spec.z));

    let data = Dataset::from_flat(format!("synthetic-{}", spec.seed), dim, coords)?.with_labels(labels)?;
    let truth = GroundTruth::from_labeled(&data, CenterSet::from_flat(dim, centers)?)?;
    Ok((data, truth))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversarialSpec {
    pub k: usize,
    pub cluster_sizes: Vec<usize>,
    pub z: usize,
    /// Minimum separation between any two distinct locations.
    pub x: f64,
    pub dim: usize,
}

/// Clusters of coincident points plus isolated outliers, every distinct
/// location at least `x` from every other.
///
/// Location `i` sits at `i * x` on the first axis. The first k locations carry
/// `cluster_sizes[j]` copies each; the next z hold one outlier each. The
/// optimal radius is 0.
pub fn gen_adversarial(spec: &AdversarialSpec) -> Result<(Dataset, GroundTruth)> {
    if spec.k == 0 || spec.dim == 0 {
        return Err(Error::input("k and dim must be at least 1"));
    }
    if spec.cluster_sizes.len() != spec.k || spec.cluster_sizes.contains(&0) {
        return Err(Error::input("need one positive size per cluster"));
    }
    if !(spec.x > 0.0 && spec.x.is_finite()) {
        return Err(Error::input("separation x must be positive"));
    }
    let dim = spec.dim;
    let location = |i: usize| {
        let mut p = vec![0.0; dim];
        p[0] = i as f64 * spec.x;
        p
    };
    let mut coords = Vec::new();
    let mut labels = Vec::new();
    for (j, &size) in spec.cluster_sizes.iter().enumerate() {
        let p = location(j);
        for _ in 0..size {
            coords.extend_from_slice(&p);
            labels.push(Label::Cluster(j as u32));
        }
    }
    for o in 0..spec.z {
        coords.extend(location(spec.k + o));
        labels.push(Label::Outlier);
    }
    let centers: Vec<f64> = (0..spec.k).flat_map(location).collect();
    let data = Dataset::from_flat("adversarial", dim, coords)?.with_labels(labels)?;
    let truth = GroundTruth::from_labeled(&data, CenterSet::from_flat(dim, centers)?)?;
    Ok((data, truth))
}

/// Relabel every cluster holding fewer than `min_fraction * n` points as outliers.
pub fn relabel_small_clusters(data: &Dataset, min_fraction: f64) -> Result<Dataset> {
    let labels = data.labels().ok_or_else(|| Error::input("dataset has no labels"))?;
    let mut counts = std::collections::HashMap::new();
    for l in labels {
        if let Label::Cluster(c) = l {
            *counts.entry(*c).or_insert(0usize) += 1;
        }
    }
    let cutoff = min_fraction * data.len() as f64;
    let relabeled: Vec<Label> = labels
        .iter()
        .map(|l| match l {
            Label::Cluster(c) if (counts[c] as f64) < cutoff => Label::Outlier,
            other => *other,
        })
        .collect();
    let names = data.label_names().to_vec();
    Ok(data.clone().with_labels(relabeled)?.with_label_names(names))
}

/// Number of outliers to append so that outliers make up at least `fraction`
/// of the augmented data.
pub fn outliers_needed(n: usize, existing: usize, fraction: f64) -> usize {
    if fraction <= 0.0 {
        return 0;
    }
    let need = (fraction * n as f64 - existing as f64) / (1.0 - fraction);
    if need <= 0.0 {
        0
    } else {
        ceil_count(need)
    }
}

/// Append uniformly drawn outliers outside every labeled cluster's enclosing
/// ball (centroid, max member distance) until outliers make up `fraction` of
/// the data.
///
/// Draws come from the data's bounding hypercube scaled 3x about its middle.
pub fn augment_outliers<R: Rng + ?Sized>(data: &Dataset, fraction: f64, rng: &mut R) -> Result<Dataset> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::input(format!("outlier fraction {fraction} must lie in [0, 1)")));
    }
    let labels = data.labels().ok_or_else(|| Error::input("augmentation needs labeled clusters"))?;
    let existing = labels.iter().filter(|l| l.is_outlier()).count();
    let add = outliers_needed(data.len(), existing, fraction);
    if add == 0 {
        return Ok(data.clone());
    }
    let dim = data.dim();
    let balls = enclosing_balls(data, labels);

    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for p in data.points() {
        for d in 0..dim {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let extent = lo.iter().zip(&hi).map(|(a, b)| b - a).fold(0.0, f64::max);
    let side = if extent > 0.0 { extent } else { 1.0 };
    let lows: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| (a + b) / 2.0 - 1.5 * side).collect();
    let drawn = draw_outside(rng, add, dim, &lows, 3.0 * side, &balls)?;

    let mut out = data.clone();
    for p in drawn.chunks_exact(dim) {
        out.push_labeled(p, Label::Outlier);
    }
    Ok(out)
}

fn enclosing_balls(data: &Dataset, labels: &[Label]) -> Vec<Ball> {
    let dim = data.dim();
    let mut sums: std::collections::BTreeMap<u32, (Vec<f64>, usize)> = Default::default();
    for (p, l) in data.points().zip(labels) {
        if let Label::Cluster(c) = l {
            let e = sums.entry(*c).or_insert_with(|| (vec![0.0; dim], 0));
            for (s, x) in e.0.iter_mut().zip(p) {
                *s += x;
            }
            e.1 += 1;
        }
    }
    let mut balls: std::collections::BTreeMap<u32, Ball> = sums
        .into_iter()
        .map(|(c, (s, cnt))| (c, Ball { center: s.into_iter().map(|v| v / cnt as f64).collect(), radius_sq: 0.0 }))
        .collect();
    for (p, l) in data.points().zip(labels) {
        if let Label::Cluster(c) = l {
            let b = balls.get_mut(c).expect("every cluster has a ball");
            b.radius_sq = b.radius_sq.max(sq_dist(p, &b.center));
        }
    }
    balls.into_values().collect()
}

/// Check the outliers of `data` lie outside each labeled cluster's (centroid, max distance) ball.
pub fn outliers_outside_clusters(data: &Dataset) -> Result<bool> {
    let labels = data.labels().ok_or_else(|| Error::input("dataset has no labels"))?;
    let balls = enclosing_balls(data, labels);
    Ok(data
        .points()
        .zip(labels)
        .filter(|(_, l)| l.is_outlier())
        .all(|(p, _)| balls.iter().all(|b| sq_dist(p, &b.center) > b.radius_sq)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> SyntheticSpec {
        SyntheticSpec { k: 3, n: 300, z: 6, dim: 4, side: 100.0, sigma: 2.0, min_cluster_frac: 1.0 / 3.0, seed: 7 }
    }

    #[test]
    fn equal_split_when_frac_is_one_over_k() {
        let sizes = small_spec().cluster_sizes().unwrap();
        assert_eq!(sizes.iter().sum::<usize>(), 294);
        let (lo, hi) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
        assert!(hi - lo <= 1, "{sizes:?}");
    }

    #[test]
    fn invalid_specs() {
        assert!(SyntheticSpec { z: 300, ..small_spec() }.cluster_sizes().is_err());
        assert!(SyntheticSpec { min_cluster_frac: 0.9, ..small_spec() }.cluster_sizes().is_err());
        assert!(SyntheticSpec { min_cluster_frac: 0.0, ..small_spec() }.cluster_sizes().is_err());
    }

    #[test]
    fn synthetic_labels_and_audit() {
        let spec = SyntheticSpec { min_cluster_frac: 0.1, ..small_spec() };
        let (data, truth) = gen_synthetic(&spec).unwrap();
        assert_eq!(data.len(), 300);
        assert_eq!(truth.outlier_count(), 6);
        assert_eq!(*truth.cluster_sizes.last().unwrap(), 29);
        assert!(outliers_outside_clusters(&data).unwrap());
        // planted balls are avoided too
        for (p, l) in data.points().zip(&truth.labels) {
            if l.is_outlier() {
                for j in 0..3 {
                    assert!(sq_dist(p, truth.generating_centers.center(j)).sqrt() > truth.r_bound[j]);
                }
            }
        }
        let (e1, e2) = truth.realized_epsilons();
        assert!((e1 - 3.0 * 29.0 / 300.0).abs() < 1e-12);
        assert!((e2 - 3.0 * 6.0 / 300.0).abs() < 1e-12);
        assert_eq!(truth.diameter_method, DiameterMethod::Exact);
        assert!(truth.diameter <= 2.0 * truth.radius_bound() + 1e-9);
    }

    #[test]
    fn zero_outliers_means_every_point_is_clustered() {
        let (data, _) = gen_synthetic(&SyntheticSpec { z: 0, ..small_spec() }).unwrap();
        assert!(data.labels().unwrap().iter().all(|l| !l.is_outlier()));
    }

    #[test]
    fn synthetic_is_reproducible() {
        let a = gen_synthetic(&small_spec()).unwrap();
        let b = gen_synthetic(&small_spec()).unwrap();
        assert_eq!(a.0, b.0);
        assert_ne!(a.0, gen_synthetic(&SyntheticSpec { seed: 8, ..small_spec() }).unwrap().0);
    }

    #[test]
    fn adversarial_layout() {
        let spec = AdversarialSpec { k: 2, cluster_sizes: vec![10, 10], z: 3, x: 10.0, dim: 1 };
        let (data, truth) = gen_adversarial(&spec).unwrap();
        assert_eq!(data.len(), 23);
        let mut locs: Vec<f64> = data.coords().to_vec();
        locs.sort_by(f64::total_cmp);
        locs.dedup();
        assert_eq!(locs, vec![0.0, 10.0, 20.0, 30.0, 40.0]);
        assert_eq!(truth.radius_bound(), 0.0);
        assert_eq!(truth.diameter, 0.0);
        let (_, none) = gen_adversarial(&AdversarialSpec { z: 0, ..spec }).unwrap();
        assert_eq!(none.outlier_count(), 0);
    }

    #[test]
    fn augmentation_counts_and_placement() {
        assert_eq!(outliers_needed(59_000, 0, 0.01), 596);
        assert_eq!(outliers_needed(100, 5, 0.01), 0);
        assert_eq!(outliers_needed(100, 0, 0.0), 0);

        let (data, _) = gen_synthetic(&SyntheticSpec { z: 0, ..small_spec() }).unwrap();
        let same = augment_outliers(&data, 0.0, &mut seeded(1)).unwrap();
        assert_eq!(same, data);
        let aug = augment_outliers(&data, 0.05, &mut seeded(1)).unwrap();
        let added = aug.len() - data.len();
        assert_eq!(added, outliers_needed(300, 0, 0.05));
        assert!(added as f64 / aug.len() as f64 >= 0.05);
        assert!(outliers_outside_clusters(&aug).unwrap());
        assert!(augment_outliers(&Dataset::from_scalars("u", &[1.0]).unwrap(), 0.1, &mut seeded(1)).is_err());
    }

    #[test]
    fn small_clusters_become_outliers() {
        let labels: Vec<Label> = (0..200).map(|i| Label::Cluster(if i == 0 { 2 } else { (i % 2) as u32 })).collect();
        let data = Dataset::from_flat("r", 1, (0..200).map(f64::from).collect()).unwrap().with_labels(labels).unwrap();
        let r = relabel_small_clusters(&data, 0.01).unwrap();
        assert_eq!(r.labels().unwrap()[0], Label::Outlier);
        assert_eq!(r.outlier_indices().unwrap(), vec![0]);
    }
}
