use proptest::prelude::*;
use rand::Rng;
use sampclust::datagen::{gen_synthetic, SyntheticSpec};
use sampclust::objective::{assign_memberships, objective_with_outliers};
use sampclust::rng::seeded;
use sampclust::sampler::run_framework;
use sampclust::selector::{boosted_run, chunked_objectives, one_pass_select, one_pass_select_with, SelectOptions};
use sampclust::{Budget, CandidateSet, CenterSet, Dataset, FrameworkConfig, ObjectiveKind, SampleBudget, Variant};

fn spec(seed: u64) -> SyntheticSpec {
    SyntheticSpec { k: 4, n: 2000, z: 200, dim: 5, side: 400.0, sigma: 5.0, min_cluster_frac: 0.25, seed }
}

fn config(variant: Variant, kind: ObjectiveKind, sample_size: usize, extra: usize) -> FrameworkConfig {
    FrameworkConfig {
        variant,
        kind,
        k: 4,
        z: 200,
        budget: Budget::Direct(SampleBudget { sample_size, extra }),
        iter: Default::default(),
        seed: 0,
    }
}

#[test]
fn best_of_m_dominates_every_candidate() {
    let (data, _) = gen_synthetic(&spec(1)).unwrap();
    for (variant, kind) in [
        (Variant::I, ObjectiveKind::Center),
        (Variant::II, ObjectiveKind::Center),
        (Variant::I, ObjectiveKind::Means),
        (Variant::II, ObjectiveKind::Median),
    ] {
        let cfg = config(variant, kind, 100, 10);
        let b = boosted_run(&data, &cfg, 6, &mut seeded(5)).unwrap();
        assert_eq!(b.objectives.len(), 6);
        assert_eq!(b.point_reads, data.len());
        assert!(b.objectives.iter().all(|&v| b.result.objective <= v));
        assert_eq!(b.result.objective, b.objectives[b.best_index]);
        let again = boosted_run(&data, &cfg, 6, &mut seeded(5)).unwrap();
        assert_eq!(again.result, b.result);
    }
}

#[test]
fn single_run_equals_bare_framework_plus_evaluation() {
    let (data, _) = gen_synthetic(&spec(2)).unwrap();
    let cfg = config(Variant::II, ObjectiveKind::Means, 150, 30);
    let b = boosted_run(&data, &cfg, 1, &mut seeded(9)).unwrap();
    let run_seed: u64 = seeded(9).random();
    let bare = run_framework(&data, &cfg, &mut seeded(run_seed)).unwrap();
    assert_eq!(b.result, assign_memberships(&data, &bare.centers, cfg.z, cfg.kind).unwrap());
}

#[test]
fn rescanning_gives_the_same_selection() {
    let (data, _) = gen_synthetic(&spec(3)).unwrap();
    let cands: Vec<CenterSet> = (0..4)
        .map(|s| {
            run_framework(&data, &config(Variant::I, ObjectiveKind::Center, 50, 4), &mut seeded(s)).unwrap().centers
        })
        .collect();
    let set = CandidateSet::new(cands).unwrap();
    let one = one_pass_select(&data, &set, 200, ObjectiveKind::Center).unwrap();
    let two =
        one_pass_select_with(&data, &set, 200, ObjectiveKind::Center, &SelectOptions { membership_buffer_cap: 10 })
            .unwrap();
    assert_eq!(one.result, two.result);
    assert_eq!(one.point_reads, data.len());
    assert_eq!(two.point_reads, 2 * data.len());
}

/// The probability that at least one of m independent runs succeeds. The
/// boosted run succeeds exactly when some run does, since it keeps the minimum.
fn boosted_rate(q: f64, m: i32) -> f64 {
    1.0 - (1.0 - q).powi(m)
}

#[test]
fn boosting_example_arithmetic() {
    let q = (1.0f64 - 0.8).powi(2);
    assert!((boosted_rate(q, 50) - 0.87).abs() < 0.005);
}

#[test]
fn boosted_success_rate_matches_independent_runs() {
    // Tiny samples with k centers and no outlier budget succeed only some of the time.
    let (data, truth) = gen_synthetic(&spec(4)).unwrap();
    let r = truth.radius_bound();
    let cfg = config(Variant::I, ObjectiveKind::Center, 8, 0);
    let success =
        |centers: &CenterSet| objective_with_outliers(&data, centers, 200, ObjectiveKind::Center).unwrap() <= 4.0 * r;

    let singles = 600;
    let hits =
        (0..singles).filter(|&s| success(&run_framework(&data, &cfg, &mut seeded(1_000 + s)).unwrap().centers)).count();
    let q = hits as f64 / singles as f64;
    assert!(q > 0.05 && q < 0.6, "single-run rate {q} leaves nothing to boost");

    let m = 5;
    let boosted = 300;
    let boosted_hits = (0..boosted)
        .filter(|&s| success(&boosted_run(&data, &cfg, m, &mut seeded(50_000 + s)).unwrap().result.centers))
        .count();
    let rate = boosted_hits as f64 / boosted as f64;
    let expected = boosted_rate(q, m as i32);
    assert!((rate - expected).abs() <= 0.1, "boosted {rate} vs 1-(1-{q})^{m} = {expected}");
}

fn line_data() -> impl Strategy<Value = (Vec<f64>, usize, Vec<Vec<f64>>, usize)> {
    (3usize..60).prop_flat_map(|n| {
        (
            prop::collection::vec(-50.0f64..50.0, n),
            0..n,
            prop::collection::vec(prop::collection::vec(-50.0f64..50.0, 1..4), 1..4),
            1usize..20,
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chunking_does_not_change_objectives((values, z, cands, chunk) in line_data()) {
        let data = Dataset::from_scalars("p", &values).unwrap();
        let set = CandidateSet::new(cands.iter().map(|c| CenterSet::from_flat(1, c.clone()).unwrap()).collect()).unwrap();
        for kind in [ObjectiveKind::Center, ObjectiveKind::Median, ObjectiveKind::Means] {
            let whole = one_pass_select(&data, &set, z, kind).unwrap().objectives;
            prop_assert_eq!(chunked_objectives(&data, &set, z, kind, chunk).unwrap(), whole);
        }
    }
}
