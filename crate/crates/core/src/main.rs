use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use sampclust::datagen::{
    gen_adversarial, gen_synthetic, load_points, save_points, write_metadata, DatasetMetadata, LabelColumn, PointFormat,
};
use sampclust::harness::{
    aggregate, evaluate, normalize_all, precision, purity, read_reports, run_experiment, write_aggregate_csv,
    AlgorithmPlan, CellSummary, Instance, InstanceSource, Plan, SampleSize,
};
use sampclust::objective::objective_with_outliers;
use sampclust::rng::seeded;
use sampclust::{CenterSet, ClusteringResult, Error, Membership, ObjectiveKind, Result, Variant};

#[derive(Parser)]
#[command(name = "sampclust", version, about = "Clustering with outliers via uniform sampling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic or adversarial dataset from a spec file.
    Gen(GenArgs),
    /// Run one algorithm configuration on one dataset and print a JSON report.
    Run(RunArgs),
    /// Execute an experiment plan into a report directory.
    Bench(BenchArgs),
    /// Recompute metrics from a dataset and a membership file.
    Eval(EvalArgs),
    /// Normalize and tabulate a report directory.
    Compare(CompareArgs),
}

#[derive(Args)]
struct GenArgs {
    /// TOML spec with `source = "synthetic"` or `"adversarial"` and the generator fields.
    #[arg(long)]
    spec: PathBuf,
    /// Output CSV; a `.meta.json` sidecar is written next to it.
    #[arg(long)]
    out: PathBuf,
    /// Override the spec's seed (synthetic only).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct DataArgs {
    #[arg(long)]
    data: PathBuf,
    /// Whether the last column holds labels.
    #[arg(long, value_parser = parse_label_column, default_value = "auto")]
    labels: LabelColumn,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Number of clusters; defaults to the number of labeled classes.
    #[arg(long)]
    k: Option<usize>,
    /// Number of outliers; defaults to the number of OUTLIER labels.
    #[arg(long)]
    z: Option<usize>,
    #[arg(long, default_value = "I")]
    variant: Variant,
    #[arg(long, default_value = "center")]
    objective: ObjectiveKind,
    /// Absolute count or a percentage of n, e.g. `2%`.
    #[arg(long)]
    sample_size: SampleSize,
    /// k' (variant I) or z' (variant II).
    #[arg(long, conflicts_with_all = ["tau", "outlier_ratio"])]
    extra: Option<usize>,
    /// Variant I: (k + k') / k.
    #[arg(long, conflicts_with = "outlier_ratio")]
    tau: Option<f64>,
    /// Variant II: z' as a multiple of the expected number of sample outliers.
    #[arg(long)]
    outlier_ratio: Option<f64>,
    /// Boosting runs m.
    #[arg(long, default_value_t = 1)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write one membership per line (center index or OUTLIER).
    #[arg(long)]
    memberships: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    plan: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Override the plan's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the plan's trial count.
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    memberships: PathBuf,
    /// Centers CSV; enables the objective.
    #[arg(long)]
    centers: Option<PathBuf>,
    #[arg(long, default_value = "center")]
    objective: ObjectiveKind,
}

#[derive(Args)]
struct CompareArgs {
    /// A `bench` output directory or a directory of JSON reports.
    #[arg(long)]
    dir: PathBuf,
    /// Also write the table as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_label_column(s: &str) -> std::result::Result<LabelColumn, String> {
    match s {
        "auto" => Ok(LabelColumn::Auto),
        "present" | "yes" => Ok(LabelColumn::Present),
        "absent" | "no" => Ok(LabelColumn::Absent),
        _ => Err(format!("expected auto, present or absent, got {s:?}")),
    }
}

fn print_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn gen(args: GenArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.spec).map_err(|e| Error::io(&args.spec, e))?;
    let source: InstanceSource = toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
    let (data, meta) = match source {
        InstanceSource::Synthetic(mut spec) => {
            if let Some(seed) = args.seed {
                spec.seed = seed;
            }
            let (data, truth) = gen_synthetic(&spec)?;
            (data, DatasetMetadata::new("synthetic", &spec, &truth)?)
        }
        InstanceSource::Adversarial(spec) => {
            let (data, truth) = gen_adversarial(&spec)?;
            (data, DatasetMetadata::new("adversarial", &spec, &truth)?)
        }
        InstanceSource::File(_) => return Err(Error::Config("gen needs a synthetic or adversarial spec".into())),
    };
    save_points(&data, &args.out)?;
    write_metadata(&meta, &args.out.with_extension("meta.json"))?;
    eprintln!("wrote {} points to {}", data.len(), args.out.display());
    Ok(())
}

fn run(args: RunArgs) -> Result<()> {
    let data = load_points(&args.data.data, PointFormat { labels: args.data.labels })?;
    let labeled_k = data.labels().map(|ls| {
        let mut ids: Vec<_> = ls.iter().filter(|l| !l.is_outlier()).collect();
        ids.sort_unstable();
        ids.dedup();
        ids.len()
    });
    let k = args.k.or(labeled_k).ok_or_else(|| Error::input("--k is required for unlabeled data"))?;
    let z = args.z.or_else(|| data.outlier_indices().map(|o| o.len())).unwrap_or(0);
    let inst = Instance { name: data.name().to_string(), data, k, z, truth: None };
    let plan = AlgorithmPlan {
        k: Some(k),
        extra: args.extra,
        tau: args.tau,
        outlier_ratio: args.outlier_ratio,
        runs: args.runs,
        ..AlgorithmPlan::direct("cli", args.variant, args.objective, args.sample_size)
    };
    let cfg = plan.config(&inst, args.seed)?;
    let (report, result) = evaluate(&inst.name, "cli", &inst.data, &cfg, args.runs, 0, &mut seeded(args.seed))?;
    if let Some(path) = &args.memberships {
        let mut text = String::with_capacity(result.memberships.len() * 3);
        for m in &result.memberships {
            match m {
                Membership::Center(j) => text.push_str(&j.to_string()),
                Membership::Outlier => text.push_str(sampclust::types::OUTLIER_LABEL),
            }
            text.push('\n');
        }
        std::fs::write(path, text).map_err(|e| Error::io(path, e))?;
    }
    print_json(&report, args.out.as_deref())
}

fn bench(args: BenchArgs) -> Result<()> {
    let mut plan = Plan::load(&args.plan)?;
    if let Some(seed) = args.seed {
        plan.seed = seed;
    }
    if let Some(trials) = args.trials {
        if trials == 0 {
            return Err(Error::input("--trials must be at least 1"));
        }
        plan.trials = trials;
    }
    let base = args.plan.parent().unwrap_or(Path::new("."));
    let out = run_experiment(&plan, base, &args.out)?;
    let failed = out.reports.iter().filter(|r| r.error.is_some()).count();
    print_table(&out.cells);
    eprintln!("{} runs, {failed} failed; reports in {}", out.reports.len(), args.out.display());
    Ok(())
}

fn read_memberships(path: &Path) -> Result<Vec<Membership>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let l = l.trim();
            if l == sampclust::types::OUTLIER_LABEL {
                Ok(Membership::Outlier)
            } else {
                l.parse().map(Membership::Center).map_err(|_| Error::Parse {
                    path: path.to_path_buf(),
                    line: i as u64 + 1,
                    message: format!("expected a center index or OUTLIER, got {l:?}"),
                })
            }
        })
        .collect()
}

#[derive(Serialize)]
struct EvalOutput {
    n: usize,
    z: usize,
    precision: Option<f64>,
    purity: Option<f64>,
    objective: Option<f64>,
}

fn eval(args: EvalArgs) -> Result<()> {
    let data = load_points(&args.data.data, PointFormat { labels: args.data.labels })?;
    let memberships = read_memberships(&args.memberships)?;
    if memberships.len() != data.len() {
        return Err(Error::input(format!("{} memberships for {} points", memberships.len(), data.len())));
    }
    let z = memberships.iter().filter(|m| m.is_outlier()).count();
    let objective = match &args.centers {
        Some(p) => {
            let c = load_points(p, PointFormat { labels: LabelColumn::Absent })?;
            let centers = CenterSet::from_flat(c.dim(), c.coords().to_vec())?;
            Some(objective_with_outliers(&data, &centers, z, args.objective)?)
        }
        None => None,
    };
    let result = ClusteringResult {
        centers: CenterSet::from_flat(data.dim(), data.point(0).to_vec())?,
        memberships,
        outlier_count: z,
        objective: objective.unwrap_or(f64::NAN),
        kind: args.objective,
    };
    let (precision, purity) = match data.labels() {
        Some(ls) => (precision(&result, ls)?, Some(purity(&result, ls)?)),
        None => (None, None),
    };
    print_json(&EvalOutput { n: data.len(), z, precision, purity, objective }, None)
}

fn compare(args: CompareArgs) -> Result<()> {
    let runs = args.dir.join("runs");
    let dir = if runs.is_dir() { runs } else { args.dir.clone() };
    let mut reports = read_reports(&dir)?;
    if reports.is_empty() {
        return Err(Error::input(format!("no reports in {}", dir.display())));
    }
    normalize_all(&mut reports)?;
    let cells = aggregate(&reports);
    print_table(&cells);
    if let Some(out) = &args.out {
        write_aggregate_csv(&cells, out)?;
    }
    Ok(())
}

fn print_table(cells: &[CellSummary]) {
    let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.4}"));
    println!(
        "{:<16} {:<12} {:>4} {:>7} {:>6} {:>14} {:>10} {:>9} {:>9}",
        "instance", "algorithm", "var", "kind", "ok", "objective", "norm", "precision", "purity"
    );
    for c in cells {
        println!(
            "{:<16} {:<12} {:>4} {:>7} {:>6} {:>14} {:>10} {:>9} {:>9}",
            c.instance,
            c.algorithm,
            c.variant.to_string(),
            c.kind.as_str(),
            format!("{}/{}", c.trials - c.failures, c.trials),
            fmt(c.objective.mean),
            fmt(c.normalized_objective.mean),
            fmt(c.precision.mean),
            fmt(c.purity.mean),
        );
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Run(a) => run(a),
        Command::Bench(a) => bench(a),
        Command::Eval(a) => eval(a),
        Command::Compare(a) => compare(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 1 } else { 2 })
        }
    }
}
