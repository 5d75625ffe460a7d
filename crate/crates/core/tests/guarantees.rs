use sampclust::datagen::{gen_synthetic, GroundTruth, SyntheticSpec};
use sampclust::objective::objective_with_outliers;
use sampclust::rng::seeded;
use sampclust::sampler::{run_framework, solve_on_sample, uniform_sample};
use sampclust::{Budget, Dataset, FrameworkConfig, ObjectiveKind, SignificanceParams, Variant};

const ETA: f64 = 0.2;
const DELTA: f64 = 0.5;
const XI: f64 = 0.5;

fn instance(seed: u64) -> (Dataset, GroundTruth) {
    let spec =
        SyntheticSpec { k: 4, n: 10_000, z: 100, dim: 10, side: 400.0, sigma: 10.0, min_cluster_frac: 0.25, seed };
    gen_synthetic(&spec).unwrap()
}

fn theory(variant: Variant, kind: ObjectiveKind, truth: &GroundTruth, eta: f64) -> FrameworkConfig {
    let (epsilon1, epsilon2) = truth.realized_epsilons();
    FrameworkConfig {
        variant,
        kind,
        k: 4,
        z: truth.outlier_count(),
        budget: Budget::Theory(SignificanceParams { epsilon1, epsilon2, eta, delta: DELTA, xi: XI }),
        iter: Default::default(),
        seed: 0,
    }
}

fn means_bound_rate(variant: Variant) -> f64 {
    let (data, truth) = instance(31);
    let cfg = theory(variant, ObjectiveKind::Means, &truth, ETA);
    let p = match cfg.budget {
        Budget::Theory(p) => p,
        Budget::Direct(_) => unreachable!(),
    };
    let (budget, warning) = cfg.resolve_budget().unwrap();
    assert!(warning.is_none());
    let z = truth.outlier_count();
    let opt = objective_with_outliers(&data, &truth.generating_centers, z, ObjectiveKind::Means).unwrap();
    let l2 = truth.diameter * truth.diameter;
    let ratio = (1.0 + DELTA) / (1.0 - DELTA);
    let stretch = match variant {
        Variant::I => 1.0,
        Variant::II => p.t() / (p.t() - 1.0),
    };

    let trials = 100;
    let mut hits = 0;
    for trial in 0..trials {
        let mut rng = seeded(7_000 + trial);
        let sample = uniform_sample(&data, budget.sample_size, &mut rng).unwrap();
        let h = solve_on_sample(&sample, variant, cfg.kind, 4, budget.extra, &cfg.iter, &mut rng).unwrap();
        // c is the ratio the subroutine achieved on the sample's true inliers
        let inliers: Vec<usize> = (0..sample.len()).filter(|&i| !sample.labels().unwrap()[i].is_outlier()).collect();
        let s_in = sample.select(&inliers).unwrap();
        let reached = objective_with_outliers(&s_in, &h, 0, ObjectiveKind::Means).unwrap();
        let reference = objective_with_outliers(&s_in, &truth.generating_centers, 0, ObjectiveKind::Means).unwrap();
        let c = (reached / reference).max(1.0);
        let alpha = 2.0 + (4.0 + 4.0 * c) * stretch * ratio;
        let beta = (4.0 + 4.0 * c) * stretch * ratio;
        let got = objective_with_outliers(&data, &h, z, ObjectiveKind::Means).unwrap();
        if got <= alpha * opt + beta * XI * l2 {
            hits += 1;
        }
    }
    hits as f64 / trials as f64
}

#[test]
fn means_bound_holds_often_enough_variant_one() {
    let rate = means_bound_rate(Variant::I);
    assert!(rate >= (1.0 - ETA).powi(3), "rate {rate}");
}

#[test]
fn means_bound_holds_often_enough_variant_two() {
    let rate = means_bound_rate(Variant::II);
    assert!(rate >= (1.0 - ETA).powi(3), "rate {rate}");
}

#[test]
fn output_sizes_and_determinism() {
    let (data, truth) = instance(32);
    for (variant, kind) in [
        (Variant::I, ObjectiveKind::Center),
        (Variant::II, ObjectiveKind::Center),
        (Variant::I, ObjectiveKind::Means),
        (Variant::II, ObjectiveKind::Median),
    ] {
        let cfg = theory(variant, kind, &truth, 0.5);
        let run = run_framework(&data, &cfg, &mut seeded(3)).unwrap();
        let expected = match variant {
            Variant::I => 4 + run.extra,
            Variant::II => 4,
        };
        assert_eq!(run.centers.len(), expected, "{variant} {kind}");
        assert_eq!(run_framework(&data, &cfg, &mut seeded(3)).unwrap().centers, run.centers);
    }
}

#[test]
fn theory_mode_warns_when_variant_two_precondition_fails() {
    let (data, truth) = instance(33);
    // t = η (1 - δ) ε1 / ε2 with ε1 ≈ 0.99, ε2 = 0.04 drops below 1 at η = 0.05
    let cfg = theory(Variant::II, ObjectiveKind::Center, &truth, 0.05);
    let run = run_framework(&data, &cfg, &mut seeded(1)).unwrap();
    assert!(run.warning.as_deref().unwrap().contains("t = "));
    assert_eq!(run.centers.len(), 4);
    let fine = run_framework(&data, &theory(Variant::II, ObjectiveKind::Center, &truth, 0.5), &mut seeded(1)).unwrap();
    assert!(fine.warning.is_none());
    let one = run_framework(&data, &theory(Variant::I, ObjectiveKind::Center, &truth, 0.05), &mut seeded(1)).unwrap();
    assert!(one.warning.is_none());
}
