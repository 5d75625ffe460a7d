//! Experiment plans: instances x algorithm configs x trials.
//!
//! A plan is a TOML document:
//!
//! ```toml
//! seed = 7
//! trials = 20
//!
//! [output]
//! record_timings = true
//!
//! [[instance]]
//! name = "syn"
//! source = "synthetic"        # synthetic | adversarial | file
//! k = 8
//! n = 100000
//! z = 2000
//! dim = 100
//! side = 400.0
//! sigma = 31.6227766
//! min_cluster_frac = 0.125
//! seed = 1
//!
//! [[algorithm]]
//! name = "alg2"
//! variant = "II"
//! objective = "center"
//! sample_size = "2%"          # or an absolute count
//! outlier_ratio = 2.0         # or extra = 80, or tau = 2.0 (variant I)
//! runs = 10
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{evaluate, normalize_all, EvalReport, Timings};
use crate::datagen::{
    augment_outliers, gen_adversarial, gen_synthetic, load_points, relabel_small_clusters, AdversarialSpec,
    GroundTruth, LabelColumn, PointFormat, SyntheticSpec,
};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, seeded};
use crate::sampler::{
    ceil_count, extra_from_outlier_ratio, extra_from_tau, Budget, FrameworkConfig, SampleBudget, SignificanceParams,
    Variant,
};
use crate::subroutines::IterConfig;
use crate::sum::exact_sum;
use crate::types::{Dataset, Label, ObjectiveKind};

/// `|S|` as an absolute count or a fraction of n (written `"2%"`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSampleSize", into = "String")]
pub enum SampleSize {
    Absolute(usize),
    Fraction(f64),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawSampleSize {
    Count(u64),
    Text(String),
}

impl TryFrom<RawSampleSize> for SampleSize {
    type Error = Error;

    fn try_from(raw: RawSampleSize) -> Result<Self> {
        match raw {
            RawSampleSize::Count(c) => Ok(SampleSize::Absolute(c as usize)),
            RawSampleSize::Text(s) => s.parse(),
        }
    }
}

impl FromStr for SampleSize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(pct) = s.strip_suffix('%') {
            let p: f64 = pct.trim().parse().map_err(|_| Error::input(format!("invalid sample percentage {s:?}")))?;
            if !(p > 0.0 && p <= 100.0) {
                return Err(Error::input(format!("sample percentage {s:?} must lie in (0, 100]")));
            }
            return Ok(SampleSize::Fraction(p / 100.0));
        }
        match s.parse::<usize>() {
            Ok(0) | Err(_) => Err(Error::input(format!("invalid sample size {s:?} (use a positive count or N%)"))),
            Ok(c) => Ok(SampleSize::Absolute(c)),
        }
    }
}

impl fmt::Display for SampleSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SampleSize::Absolute(c) => write!(f, "{c}"),
            SampleSize::Fraction(p) => write!(f, "{}%", p * 100.0),
        }
    }
}

impl From<SampleSize> for String {
    fn from(s: SampleSize) -> String {
        s.to_string()
    }
}

impl SampleSize {
    pub fn resolve(self, n: usize) -> usize {
        match self {
            SampleSize::Absolute(c) => c,
            SampleSize::Fraction(p) => ceil_count(p * n as f64).max(1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileSource {
    pub path: PathBuf,
    #[serde(default)]
    pub labels: LabelColumn,
    /// Relabel clusters smaller than this fraction of n as outliers.
    pub relabel_below: Option<f64>,
    /// Append outliers until they make up this fraction.
    pub augment_fraction: Option<f64>,
    /// Defaults to the number of labeled clusters.
    pub k: Option<usize>,
    /// Defaults to the number of points labeled OUTLIER.
    pub z: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum InstanceSource {
    Synthetic(SyntheticSpec),
    Adversarial(AdversarialSpec),
    File(FileSource),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstancePlan {
    pub name: String,
    #[serde(flatten)]
    pub source: InstanceSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmPlan {
    pub name: String,
    pub variant: Variant,
    pub objective: ObjectiveKind,
    /// Defaults to the instance's k.
    pub k: Option<usize>,
    pub sample_size: Option<SampleSize>,
    /// k' or z' given directly.
    pub extra: Option<usize>,
    /// Variant I: `(k + k') / k`.
    pub tau: Option<f64>,
    /// Variant II: z' as a multiple of the expected sample outliers.
    pub outlier_ratio: Option<f64>,
    /// Derive |S| and the budget from significance parameters instead.
    pub theory: Option<SignificanceParams>,
    #[serde(default = "one")]
    pub runs: usize,
    #[serde(default)]
    pub iter: IterConfig,
}

fn one() -> usize {
    1
}

impl AlgorithmPlan {
    pub fn direct(name: &str, variant: Variant, objective: ObjectiveKind, sample_size: SampleSize) -> Self {
        AlgorithmPlan {
            name: name.to_string(),
            variant,
            objective,
            k: None,
            sample_size: Some(sample_size),
            extra: None,
            tau: None,
            outlier_ratio: None,
            theory: None,
            runs: 1,
            iter: IterConfig::default(),
        }
    }

    /// Resolve against an instance into a framework configuration.
    pub fn config(&self, inst: &Instance, seed: u64) -> Result<FrameworkConfig> {
        let k = self.k.unwrap_or(inst.k);
        let n = inst.data.len();
        let extras = [self.extra.is_some(), self.tau.is_some(), self.outlier_ratio.is_some()];
        if extras.iter().filter(|b| **b).count() > 1 {
            return Err(Error::Config(format!("{}: give at most one of extra, tau, outlier_ratio", self.name)));
        }
        let budget = match (self.theory, self.sample_size) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(format!("{}: theory and sample_size are exclusive", self.name)))
            }
            (Some(_), None) if extras.contains(&true) => {
                return Err(Error::Config(format!("{}: theory mode derives the budget itself", self.name)))
            }
            (Some(p), None) => Budget::Theory(p),
            (None, None) => return Err(Error::Config(format!("{}: sample_size or theory is required", self.name))),
            (None, Some(size)) => {
                let sample_size = size.resolve(n);
                let extra = if let Some(e) = self.extra {
                    e
                } else if let Some(tau) = self.tau {
                    if self.variant != Variant::I {
                        return Err(Error::Config(format!("{}: tau applies to variant I", self.name)));
                    }
                    extra_from_tau(k, tau)?
                } else if let Some(ratio) = self.outlier_ratio {
                    if self.variant != Variant::II {
                        return Err(Error::Config(format!("{}: outlier_ratio applies to variant II", self.name)));
                    }
                    extra_from_outlier_ratio(ratio, inst.z, n, sample_size)?
                } else {
                    0
                };
                Budget::Direct(SampleBudget { sample_size, extra })
            }
        };
        let cfg = FrameworkConfig {
            variant: self.variant,
            kind: self.objective,
            k,
            z: inst.z,
            budget,
            iter: self.iter,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputOptions {
    /// Off makes every record byte-identical across reruns.
    #[serde(default = "yes")]
    pub record_timings: bool,
}

fn yes() -> bool {
    true
}

impl Default for OutputOptions {
    fn default() -> Self {
        OutputOptions { record_timings: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Plan {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default)]
    pub output: OutputOptions,
    #[serde(rename = "instance")]
    pub instances: Vec<InstancePlan>,
    #[serde(rename = "algorithm")]
    pub algorithms: Vec<AlgorithmPlan>,
}

impl Plan {
    pub fn from_toml(text: &str) -> Result<Self> {
        let plan: Plan = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if plan.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        Ok(plan)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }
}

/// A dataset ready for evaluation.
#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub data: Dataset,
    pub k: usize,
    pub z: usize,
    pub truth: Option<GroundTruth>,
}

/// Generate or read an instance. Relative file paths resolve against `base_dir`.
pub fn load_instance(plan: &InstancePlan, base_dir: &Path, seed: u64) -> Result<Instance> {
    match &plan.source {
        InstanceSource::Synthetic(spec) => {
            let (data, truth) = gen_synthetic(spec)?;
            Ok(Instance {
                name: plan.name.clone(),
                data: data.with_name(&plan.name),
                k: spec.k,
                z: spec.z,
                truth: Some(truth),
            })
        }
        InstanceSource::Adversarial(spec) => {
            let (data, truth) = gen_adversarial(spec)?;
            Ok(Instance {
                name: plan.name.clone(),
                data: data.with_name(&plan.name),
                k: spec.k,
                z: spec.z,
                truth: Some(truth),
            })
        }
        InstanceSource::File(src) => {
            let path = if src.path.is_absolute() { src.path.clone() } else { base_dir.join(&src.path) };
            let mut data = load_points(&path, PointFormat { labels: src.labels })?.with_name(&plan.name);
            if let Some(frac) = src.relabel_below {
                data = relabel_small_clusters(&data, frac)?;
            }
            if let Some(frac) = src.augment_fraction {
                data = augment_outliers(&data, frac, &mut seeded(seed))?;
            }
            let labels = data.labels();
            let k = match (src.k, labels) {
                (Some(k), _) => k,
                (None, Some(ls)) => {
                    let mut ids: Vec<u32> = ls
                        .iter()
                        .filter_map(|l| match l {
                            Label::Cluster(c) => Some(*c),
                            Label::Outlier => None,
                        })
                        .collect();
                    ids.sort_unstable();
                    ids.dedup();
                    ids.len()
                }
                (None, None) => return Err(Error::Config(format!("{}: unlabeled file needs k", plan.name))),
            };
            let z = src.z.or_else(|| data.outlier_indices().map(|o| o.len())).unwrap_or(0);
            Ok(Instance { name: plan.name.clone(), data, k, z, truth: None })
        }
    }
}

/// Count, mean and sample standard deviation, summed exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub count: usize,
    pub mean: Option<f64>,
    pub std: Option<f64>,
}

pub fn summarize(values: &[f64]) -> Stat {
    let count = values.len();
    if count == 0 {
        return Stat { count, mean: None, std: None };
    }
    let mean = exact_sum(values.iter().copied()) / count as f64;
    let std = if count == 1 {
        0.0
    } else {
        (exact_sum(values.iter().map(|v| (v - mean) * (v - mean))) / (count - 1) as f64).sqrt()
    };
    Stat { count, mean: Some(mean), std: Some(std) }
}

/// Aggregates of one (instance, algorithm) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub instance: String,
    pub algorithm: String,
    pub variant: Variant,
    pub kind: ObjectiveKind,
    pub trials: usize,
    pub failures: usize,
    pub objective: Stat,
    pub normalized_objective: Stat,
    pub precision: Stat,
    pub purity: Stat,
    pub sample_secs: Stat,
    pub solve_secs: Stat,
    pub select_secs: Stat,
}

/// Group reports by (instance, algorithm), in order of first appearance.
pub fn aggregate(reports: &[EvalReport]) -> Vec<CellSummary> {
    let mut order: Vec<(String, String)> = Vec::new();
    let mut cells: BTreeMap<(String, String), Vec<&EvalReport>> = BTreeMap::new();
    for r in reports {
        let key = (r.instance.clone(), r.algorithm.clone());
        if !cells.contains_key(&key) {
            order.push(key.clone());
        }
        cells.entry(key).or_default().push(r);
    }
    order
        .into_iter()
        .map(|key| {
            let rs = &cells[&key];
            let ok: Vec<&&EvalReport> = rs.iter().filter(|r| r.error.is_none()).collect();
            let stat =
                |f: &dyn Fn(&EvalReport) -> Option<f64>| summarize(&ok.iter().filter_map(|r| f(r)).collect::<Vec<_>>());
            CellSummary {
                instance: key.0.clone(),
                algorithm: key.1.clone(),
                variant: rs[0].variant,
                kind: rs[0].kind,
                trials: rs.len(),
                failures: rs.len() - ok.len(),
                objective: stat(&|r| r.objective),
                normalized_objective: stat(&|r| r.normalized_objective),
                precision: stat(&|r| r.precision),
                purity: stat(&|r| r.purity),
                sample_secs: stat(&|r| Some(r.timings.sample_secs)),
                solve_secs: stat(&|r| Some(r.timings.solve_secs)),
                select_secs: stat(&|r| Some(r.timings.select_secs)),
            }
        })
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::Runtime(format!("{}: {e}", path.display()))
}

pub fn write_aggregate_csv(cells: &[CellSummary], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    let stats =
        ["objective", "normalized_objective", "precision", "purity", "sample_secs", "solve_secs", "select_secs"];
    let mut header = vec![
        "instance".to_string(),
        "algorithm".into(),
        "variant".into(),
        "objective_kind".into(),
        "trials".into(),
        "failures".into(),
    ];
    for s in stats {
        header.push(format!("{s}_mean"));
        header.push(format!("{s}_std"));
    }
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for c in cells {
        let mut row = vec![
            c.instance.clone(),
            c.algorithm.clone(),
            c.variant.to_string(),
            c.kind.to_string(),
            c.trials.to_string(),
            c.failures.to_string(),
        ];
        for s in
            [c.objective, c.normalized_objective, c.precision, c.purity, c.sample_secs, c.solve_secs, c.select_secs]
        {
            row.push(opt(s.mean));
            row.push(opt(s.std));
        }
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// One row per (run, metric), for plotting.
pub fn write_long_csv(reports: &[EvalReport], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(["instance", "algorithm", "variant", "objective_kind", "trial", "seed", "metric", "value"])
        .map_err(|e| csv_err(path, e))?;
    for r in reports.iter().filter(|r| r.error.is_none()) {
        let metrics = [
            ("objective", r.objective),
            ("normalized_objective", r.normalized_objective),
            ("precision", r.precision),
            ("purity", r.purity),
            ("sample_size", r.sample_size.map(|v| v as f64)),
            ("extra", r.extra.map(|v| v as f64)),
            ("sample_secs", Some(r.timings.sample_secs)),
            ("solve_secs", Some(r.timings.solve_secs)),
            ("select_secs", Some(r.timings.select_secs)),
        ];
        for (name, value) in metrics {
            if let Some(v) = value {
                w.write_record([
                    r.instance.as_str(),
                    &r.algorithm,
                    &r.variant.to_string(),
                    r.kind.as_str(),
                    &r.trial.to_string(),
                    &r.seed.to_string(),
                    name,
                    &format!("{v:?}"),
                ])
                .map_err(|e| csv_err(path, e))?;
            }
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Read every `*.json` report in `dir`, sorted by file name.
pub fn read_reports(dir: &Path) -> Result<Vec<EvalReport>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            Ok(serde_json::from_str(&text)?)
        })
        .collect()
}

fn file_stem_safe(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

/// Everything a plan produced.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub reports: Vec<EvalReport>,
    pub cells: Vec<CellSummary>,
}

/// Run every (instance, algorithm, trial) cell and write the reports to `out_dir`:
/// `runs/*.json`, `aggregate.csv` and `long.csv`. Failures are recorded, not raised.
pub fn run_experiment(plan: &Plan, base_dir: &Path, out_dir: &Path) -> Result<ExperimentOutput> {
    let runs_dir = out_dir.join("runs");
    std::fs::create_dir_all(&runs_dir).map_err(|e| Error::io(&runs_dir, e))?;
    let mut reports = Vec::new();
    for (ii, ip) in plan.instances.iter().enumerate() {
        let inst_seed = derive_seed(plan.seed, ii as u64);
        let inst = load_instance(ip, base_dir, inst_seed);
        for (ai, ap) in plan.algorithms.iter().enumerate() {
            for trial in 0..plan.trials {
                let seed = derive_seed(derive_seed(inst_seed, ai as u64), trial as u64);
                let outcome = match &inst {
                    Ok(inst) => ap.config(inst, seed).and_then(|cfg| {
                        evaluate(&inst.name, &ap.name, &inst.data, &cfg, ap.runs, trial, &mut seeded(seed))
                            .map(|(r, _)| r)
                    }),
                    Err(e) => Err(Error::Input(format!("instance {}: {e}", ip.name))),
                };
                let mut report = outcome.unwrap_or_else(|e| {
                    let mut r = EvalReport::failed(&ip.name, &ap.name, ap.variant, ap.objective, &e);
                    r.runs = ap.runs;
                    r
                });
                report.trial = trial;
                report.seed = seed;
                if let Ok(inst) = &inst {
                    report.n = inst.data.len();
                }
                if !plan.output.record_timings {
                    report.timings = Timings::default();
                }
                reports.push(report);
            }
        }
    }
    normalize_all(&mut reports)?;
    for r in &reports {
        let name = format!("{}__{}__t{:04}.json", file_stem_safe(&r.instance), file_stem_safe(&r.algorithm), r.trial);
        let path = runs_dir.join(name);
        let text = serde_json::to_string_pretty(r)? + "\n";
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    }
    let cells = aggregate(&reports);
    write_aggregate_csv(&cells, &out_dir.join("aggregate.csv"))?;
    write_long_csv(&reports, &out_dir.join("long.csv"))?;
    Ok(ExperimentOutput { reports, cells })
}
