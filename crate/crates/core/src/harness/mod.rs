//! Evaluation metrics, per-run reports, and experiment plans.

mod plan;

pub use plan::{
    aggregate, load_instance, read_reports, run_experiment, summarize, write_aggregate_csv, write_long_csv,
    AlgorithmPlan, CellSummary, ExperimentOutput, FileSource, Instance, InstancePlan, InstanceSource, OutputOptions,
    Plan, SampleSize, Stat,
};

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampler::{FrameworkConfig, Variant};
use crate::selector::boosted_run;
use crate::types::{ClusteringResult, Dataset, Label, Membership, ObjectiveKind};

/// Fraction of the ground-truth outliers that the result discards.
///
/// `None` when the truth has no outliers.
pub fn precision(result: &ClusteringResult, truth: &[Label]) -> Result<Option<f64>> {
    check_len(result, truth)?;
    let true_outliers = truth.iter().filter(|l| l.is_outlier()).count();
    if true_outliers == 0 {
        return Ok(None);
    }
    let hit = result.memberships.iter().zip(truth).filter(|(m, l)| m.is_outlier() && l.is_outlier()).count();
    Ok(Some(hit as f64 / true_outliers as f64))
}

/// `(1 / (n - z)) Σ_j max_l |C'_j ∩ C_l|` over the reported inliers.
///
/// Points the truth marks as outliers belong to no class, so an obtained
/// cluster containing one is not pure.
pub fn purity(result: &ClusteringResult, truth: &[Label]) -> Result<f64> {
    check_len(result, truth)?;
    let mut overlap: HashMap<(u32, u32), usize> = HashMap::new();
    let mut retained = 0usize;
    for (m, l) in result.memberships.iter().zip(truth) {
        if let Membership::Center(j) = m {
            retained += 1;
            if let Label::Cluster(c) = l {
                *overlap.entry((*j, *c)).or_insert(0) += 1;
            }
        }
    }
    if retained == 0 {
        return Ok(0.0);
    }
    let mut best: HashMap<u32, usize> = HashMap::new();
    for ((j, _), count) in overlap {
        let b = best.entry(j).or_insert(0);
        *b = (*b).max(count);
    }
    Ok(best.values().sum::<usize>() as f64 / retained as f64)
}

fn check_len(result: &ClusteringResult, truth: &[Label]) -> Result<()> {
    if result.memberships.len() != truth.len() {
        return Err(Error::input(format!(
            "{} memberships for {} labeled points",
            result.memberships.len(),
            truth.len()
        )));
    }
    Ok(())
}

/// Wall-clock seconds per phase. Sample and solve are summed over boosting runs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub sample_secs: f64,
    pub solve_secs: f64,
    /// The full-data selection and membership pass.
    pub select_secs: f64,
}

/// One evaluated run (possibly boosted over several framework runs).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub instance: String,
    pub algorithm: String,
    pub variant: Variant,
    pub kind: ObjectiveKind,
    /// The resolved configuration; absent when resolution itself failed.
    pub config: Option<FrameworkConfig>,
    pub runs: usize,
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    pub sample_size: Option<usize>,
    pub extra: Option<usize>,
    pub objective: Option<f64>,
    pub normalized_objective: Option<f64>,
    /// Set when the group minimum was 0 and machine epsilon was used instead.
    #[serde(default)]
    pub normalization_floored: bool,
    pub precision: Option<f64>,
    pub purity: Option<f64>,
    pub timings: Timings,
    pub warning: Option<String>,
    pub error: Option<String>,
}

impl EvalReport {
    pub const SCHEMA_VERSION: u32 = 1;

    /// Record of a run that did not complete.
    pub fn failed(instance: &str, algorithm: &str, variant: Variant, kind: ObjectiveKind, err: &Error) -> Self {
        EvalReport {
            schema_version: Self::SCHEMA_VERSION,
            instance: instance.to_string(),
            algorithm: algorithm.to_string(),
            variant,
            kind,
            config: None,
            runs: 0,
            trial: 0,
            seed: 0,
            n: 0,
            sample_size: None,
            extra: None,
            objective: None,
            normalized_objective: None,
            normalization_floored: false,
            precision: None,
            purity: None,
            timings: Timings::default(),
            warning: None,
            error: Some(err.to_string()),
        }
    }
}

/// Run the framework `runs` times on `data`, keep the best candidate, and score it.
pub fn evaluate<R: Rng + ?Sized>(
    instance: &str,
    algorithm: &str,
    data: &Dataset,
    cfg: &FrameworkConfig,
    runs: usize,
    trial: usize,
    rng: &mut R,
) -> Result<(EvalReport, ClusteringResult)> {
    let boosted = boosted_run(data, cfg, runs, rng)?;
    let (precision, purity) = match data.labels() {
        Some(labels) => (precision(&boosted.result, labels)?, Some(purity(&boosted.result, labels)?)),
        None => (None, None),
    };
    let timings = Timings {
        sample_secs: boosted.runs.iter().map(|r| r.sample_secs).sum(),
        solve_secs: boosted.runs.iter().map(|r| r.solve_secs).sum(),
        select_secs: boosted.select_secs,
    };
    let first = &boosted.runs[0];
    let report = EvalReport {
        schema_version: EvalReport::SCHEMA_VERSION,
        instance: instance.to_string(),
        algorithm: algorithm.to_string(),
        variant: cfg.variant,
        kind: cfg.kind,
        config: Some(cfg.clone()),
        runs,
        trial,
        seed: cfg.seed,
        n: data.len(),
        sample_size: Some(first.sample_size),
        extra: Some(first.extra),
        objective: Some(boosted.result.objective),
        normalized_objective: None,
        normalization_floored: false,
        precision,
        purity,
        timings,
        warning: boosted.warning,
        error: None,
    };
    Ok((report, boosted.result))
}

/// Divide each objective by the group minimum. A zero minimum is replaced by
/// machine epsilon and flagged.
pub fn normalize_group(reports: &mut [EvalReport]) -> Result<()> {
    let Some(first) = reports.iter().find(|r| r.objective.is_some()) else {
        return Ok(());
    };
    let (instance, kind): (String, ObjectiveKind) = (first.instance.clone(), first.kind);
    if reports.iter().any(|r| r.instance != instance || r.kind != kind) {
        return Err(Error::input("a normalization group must share instance and objective"));
    }
    let min = reports.iter().filter_map(|r| r.objective).fold(f64::INFINITY, f64::min);
    let floored = min <= 0.0;
    let denom = if floored { f64::EPSILON } else { min };
    for r in reports.iter_mut() {
        r.normalized_objective = r.objective.map(|v| if v == min { 1.0 } else { v / denom });
        r.normalization_floored = floored && r.objective.is_some();
    }
    Ok(())
}

/// Normalize every (instance, objective) group of a report collection in place.
pub fn normalize_all(reports: &mut [EvalReport]) -> Result<()> {
    let mut groups: HashMap<(String, ObjectiveKind), Vec<usize>> = HashMap::new();
    for (i, r) in reports.iter().enumerate() {
        groups.entry((r.instance.clone(), r.kind)).or_default().push(i);
    }
    for idx in groups.into_values() {
        let mut group: Vec<EvalReport> = idx.iter().map(|&i| reports[i].clone()).collect();
        normalize_group(&mut group)?;
        for (i, r) in idx.into_iter().zip(group) {
            reports[i] = r;
        }
    }
    Ok(())
}
