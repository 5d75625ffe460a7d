//! Uniform sampling and the four sample-then-solve algorithms.
//!
//! | variant | objective        | step 2 on the sample                         | |H|    |
//! |---------|------------------|----------------------------------------------|--------|
//! | I       | center           | farthest-point traversal with k + k' centers | k + k' |
//! | II      | center           | greedy-disk k-center with z' outliers        | k      |
//! | I       | median / means   | k-means++ then Lloyd with k + k' centers     | k + k' |
//! | II      | median / means   | k-means++ then trimmed Lloyd with z' outliers| k      |
//!
//! Sample sizes and budgets come either directly from the caller or from an
//! [`SignificanceParams`] via the closed-form bounds below. All bounds use the
//! natural log and round up.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subroutines::{
    charikar_kcenter_outliers, gonzalez_kcenter, kmeanspp_seed, lloyd, trimmed_lloyd, IterConfig, MAX_CHARIKAR_POINTS,
};
use crate::types::{CenterSet, Dataset, ObjectiveKind};

/// Upper bound on `|S| * D` for a single sample.
pub const MAX_SAMPLE_COORDS: usize = 1 << 28;

/// Round up, treating values within 1e-9 (relative) of an integer as that integer.
pub(crate) fn ceil_count(x: f64) -> usize {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r.max(0.0) as usize
    } else {
        x.ceil().max(0.0) as usize
    }
}

/// Parameters of an (ε1, ε2)-significant instance plus the confidence knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignificanceParams {
    /// Smallest optimal cluster holds at least `epsilon1 * n / k` points.
    pub epsilon1: f64,
    /// Number of outliers is `epsilon2 * n / k`.
    pub epsilon2: f64,
    /// Failure probability per sampling event.
    pub eta: f64,
    /// Relative deviation allowed in per-cluster sample counts.
    pub delta: f64,
    /// Additive-error knob of the median/means guarantees.
    pub xi: f64,
}

impl SignificanceParams {
    pub fn validate(&self) -> Result<()> {
        let open01 = |v: f64| v > 0.0 && v < 1.0;
        if !open01(self.epsilon1) {
            return Err(Error::input(format!("epsilon1 = {} must lie in (0, 1)", self.epsilon1)));
        }
        if !(self.epsilon2 >= 0.0 && self.epsilon2.is_finite()) {
            return Err(Error::input(format!("epsilon2 = {} must be nonnegative", self.epsilon2)));
        }
        for (name, v) in [("eta", self.eta), ("delta", self.delta), ("xi", self.xi)] {
            if !open01(v) {
                return Err(Error::input(format!("{name} = {v} must lie in (0, 1)")));
            }
        }
        Ok(())
    }

    /// `t = η (1 - δ) ε1 / ε2`.
    pub fn t(&self) -> f64 {
        self.eta * (1.0 - self.delta) * self.epsilon1 / self.epsilon2
    }

    /// Whether `ε1 / ε2 > 1 / (η (1 - δ))`, equivalently `t > 1`, which the
    /// variant-II guarantees require.
    pub fn variant_two_condition_holds(&self) -> bool {
        self.epsilon2 == 0.0 || self.t() > 1.0
    }
}

/// `ceil((k / ε1) ln(k / η))`, or `max(1, k)` when the log is not positive.
pub fn sample_size_alg1(k: usize, epsilon1: f64, eta: f64) -> usize {
    let arg = k as f64 / eta;
    if arg <= 1.0 {
        return k.max(1);
    }
    ceil_count(k as f64 / epsilon1 * arg.ln()).max(1)
}

/// `ceil((3k / (δ² ε1)) ln(2k / η))`.
pub fn sample_size_concentration(k: usize, epsilon1: f64, delta: f64, eta: f64) -> usize {
    let arg = 2.0 * k as f64 / eta;
    if arg <= 1.0 {
        return k.max(1);
    }
    ceil_count(3.0 * k as f64 / (delta * delta * epsilon1) * arg.ln()).max(1)
}

/// `ceil(max{(3k / (δ² ε1)) ln(2k/η), (k / (2 ξ² ε1 (1 - δ))) ln(2k/η)})`.
pub fn sample_size_means(k: usize, epsilon1: f64, delta: f64, xi: f64, eta: f64) -> usize {
    let arg = 2.0 * k as f64 / eta;
    if arg <= 1.0 {
        return k.max(1);
    }
    let log = arg.ln();
    let concentration = 3.0 * k as f64 / (delta * delta * epsilon1) * log;
    let mean_estimate = k as f64 / (2.0 * xi * xi * epsilon1 * (1.0 - delta)) * log;
    ceil_count(concentration.max(mean_estimate)).max(1)
}

/// `ceil((1/η)(ε2/k)|S|)`: extra centers k' (variant I) or sample outliers z' (variant II).
pub fn budget_extra(eta: f64, epsilon2: f64, k: usize, sample_size: usize) -> usize {
    ceil_count(epsilon2 / (eta * k as f64) * sample_size as f64)
}

/// Expected number of outliers in a uniform sample, `z̃ = (z/n)|S|`.
pub fn expected_sample_outliers(z: usize, n: usize, sample_size: usize) -> f64 {
    z as f64 * sample_size as f64 / n as f64
}

/// k' such that `(k + k') / k = τ`, rounded up.
pub fn extra_from_tau(k: usize, tau: f64) -> Result<usize> {
    if !(tau >= 1.0 && tau.is_finite()) {
        return Err(Error::input(format!("tau = {tau} must be at least 1")));
    }
    Ok(ceil_count((tau - 1.0) * k as f64))
}

/// z' as a multiple of the expected number of sample outliers.
pub fn extra_from_outlier_ratio(ratio: f64, z: usize, n: usize, sample_size: usize) -> Result<usize> {
    if !(ratio >= 0.0 && ratio.is_finite()) {
        return Err(Error::input(format!("outlier ratio {ratio} must be nonnegative")));
    }
    Ok(ceil_count(ratio * expected_sample_outliers(z, n, sample_size)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// Extra centers on the sample, no outlier removal there.
    I,
    /// Exactly k centers, with z' sample points discarded.
    II,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::I => "I",
            Variant::II => "II",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" | "i" | "1" => Ok(Variant::I),
            "II" | "ii" | "2" => Ok(Variant::II),
            other => Err(Error::input(format!("unknown variant '{other}' (expected I or II)"))),
        }
    }
}

/// Sample size and budget, either given directly or derived from significance parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Budget {
    Direct(SampleBudget),
    Theory(SignificanceParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleBudget {
    pub sample_size: usize,
    /// k' for variant I, z' for variant II.
    pub extra: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameworkConfig {
    pub variant: Variant,
    pub kind: ObjectiveKind,
    pub k: usize,
    pub z: usize,
    pub budget: Budget,
    #[serde(default)]
    pub iter: IterConfig,
    #[serde(default)]
    pub seed: u64,
}

impl FrameworkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::input("k must be at least 1"));
        }
        match &self.budget {
            Budget::Direct(b) if b.sample_size == 0 => Err(Error::input("sample size must be at least 1")),
            Budget::Theory(p) => p.validate(),
            _ => Ok(()),
        }
    }

    /// Resolve the budget to `(|S|, extra)` plus a warning when a theory-mode
    /// precondition does not hold.
    pub fn resolve_budget(&self) -> Result<(SampleBudget, Option<String>)> {
        self.validate()?;
        match self.budget {
            Budget::Direct(b) => Ok((b, None)),
            Budget::Theory(p) => {
                let sample_size = match (self.variant, self.kind) {
                    (Variant::I, ObjectiveKind::Center) => sample_size_alg1(self.k, p.epsilon1, p.eta),
                    (Variant::II, ObjectiveKind::Center) => {
                        sample_size_concentration(self.k, p.epsilon1, p.delta, p.eta)
                    }
                    _ => sample_size_means(self.k, p.epsilon1, p.delta, p.xi, p.eta),
                };
                let extra = budget_extra(p.eta, p.epsilon2, self.k, sample_size);
                let warning = (self.variant == Variant::II && !p.variant_two_condition_holds()).then(|| {
                    format!(
                        "t = eta (1 - delta) eps1 / eps2 = {:.4} <= 1; the variant II guarantee does not apply",
                        p.t()
                    )
                });
                Ok((SampleBudget { sample_size, extra }, warning))
            }
        }
    }
}

/// Output of one sample-then-solve run.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameworkRun {
    pub centers: CenterSet,
    pub sample_size: usize,
    pub extra: usize,
    pub warning: Option<String>,
    pub sample_secs: f64,
    pub solve_secs: f64,
}

/// Indices of `m` i.i.d. uniform draws (with replacement) from `0..n`.
pub fn sample_indices<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Vec<usize> {
    (0..m).map(|_| rng.random_range(0..n)).collect()
}

/// `m` points drawn independently and uniformly, with replacement. Labels are carried along.
pub fn uniform_sample<R: Rng + ?Sized>(data: &Dataset, m: usize, rng: &mut R) -> Result<Dataset> {
    if m == 0 {
        return Err(Error::input("sample size must be at least 1"));
    }
    data.select(&sample_indices(data.len(), m, rng))
}

/// Step 2: solve on a given sample. Returns k + extra centers for variant I
/// and k centers for variant II.
pub fn solve_on_sample<R: Rng + ?Sized>(
    sample: &Dataset,
    variant: Variant,
    kind: ObjectiveKind,
    k: usize,
    extra: usize,
    iter: &IterConfig,
    rng: &mut R,
) -> Result<CenterSet> {
    if k == 0 {
        return Err(Error::input("k must be at least 1"));
    }
    let s = sample.len();
    // z' >= |S| would leave nothing to cluster; keep at least one point
    let sample_outliers = extra.min(s - 1);
    Ok(match (variant, kind) {
        (Variant::I, ObjectiveKind::Center) => gonzalez_kcenter(sample, k + extra, rng)?.centers,
        (Variant::II, ObjectiveKind::Center) => charikar_kcenter_outliers(sample, k, sample_outliers)?.centers,
        (Variant::I, _) => {
            let init = kmeanspp_seed(sample, k + extra, rng)?;
            lloyd(sample, &init, iter, kind)?.centers
        }
        (Variant::II, _) => {
            let init = kmeanspp_seed(sample, k, rng)?;
            trimmed_lloyd(sample, k, sample_outliers, &init, iter, kind)?.centers
        }
    })
}

/// Steps 1 and 2: draw a uniform sample and solve on it. The caller evaluates
/// the returned centers against the full data.
pub fn run_framework<R: Rng + ?Sized>(data: &Dataset, cfg: &FrameworkConfig, rng: &mut R) -> Result<FrameworkRun> {
    let (budget, warning) = cfg.resolve_budget()?;
    if budget.sample_size.saturating_mul(data.dim()) > MAX_SAMPLE_COORDS {
        return Err(Error::Config(format!(
            "sample of {} points in dimension {} exceeds the memory cap",
            budget.sample_size,
            data.dim()
        )));
    }
    if cfg.variant == Variant::II
        && cfg.kind == ObjectiveKind::Center
        && budget.sample_size > MAX_CHARIKAR_POINTS
        && cfg.k + budget.extra < budget.sample_size
    {
        return Err(Error::Config(format!(
            "variant II k-center supports samples of at most {MAX_CHARIKAR_POINTS} points, got {}",
            budget.sample_size
        )));
    }
    let t0 = Instant::now();
    let sample = uniform_sample(data, budget.sample_size, rng)?;
    let sample_secs = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let centers = solve_on_sample(&sample, cfg.variant, cfg.kind, cfg.k, budget.extra, &cfg.iter, rng)?;
    let solve_secs = t1.elapsed().as_secs_f64();
    Ok(FrameworkRun { centers, sample_size: budget.sample_size, extra: budget.extra, warning, sample_secs, solve_secs })
}
