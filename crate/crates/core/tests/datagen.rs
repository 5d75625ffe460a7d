use proptest::prelude::*;
use sampclust::datagen::{
    augment_outliers, gen_adversarial, gen_synthetic, load_points, outliers_needed, outliers_outside_clusters,
    relabel_small_clusters, save_points, AdversarialSpec, DiameterMethod, PointFormat, SyntheticSpec,
};
use sampclust::objective::sq_dist;
use sampclust::rng::seeded;
use sampclust::{Dataset, Label};

#[test]
fn reference_instance_is_significant() {
    for ratio in [2.0, 4.0, 6.0] {
        let frac = SyntheticSpec::frac_for_ratio(100_000, 2_000, ratio);
        let spec = SyntheticSpec { min_cluster_frac: frac, ..SyntheticSpec::reference(7) };
        let (data, truth) = gen_synthetic(&spec).unwrap();
        assert_eq!((data.len(), data.dim()), (100_000, 100));
        assert_eq!(truth.outlier_count(), 2_000);
        let min = *truth.cluster_sizes.iter().min().unwrap();
        assert!(min as f64 >= frac * 98_000.0 - 1.0);
        // every cluster holds at least (ε1/k) n points and z = (ε2/k) n
        let (e1, e2) = truth.realized_epsilons();
        assert!(truth.cluster_sizes.iter().all(|&s| s as f64 >= e1 / 8.0 * 100_000.0 - 1e-6));
        assert!((e2 / 8.0 * 100_000.0 - 2_000.0).abs() < 1e-6);
        assert!((e1 / e2 - ratio).abs() < 0.01, "realized ratio {}", e1 / e2);
        assert_eq!(truth.diameter_method, DiameterMethod::CenterBound);
        assert!(outliers_outside_clusters(&data).unwrap());
        for (p, l) in data.points().zip(&truth.labels) {
            if l.is_outlier() {
                for j in 0..8 {
                    assert!(sq_dist(p, truth.generating_centers.center(j)).sqrt() > truth.r_bound[j]);
                }
            }
        }
    }
}

#[test]
fn exact_diameter_below_the_pair_threshold() {
    let spec = SyntheticSpec { k: 2, n: 500, z: 10, dim: 3, side: 100.0, sigma: 2.0, min_cluster_frac: 0.5, seed: 3 };
    let (data, truth) = gen_synthetic(&spec).unwrap();
    assert_eq!(truth.diameter_method, DiameterMethod::Exact);
    let labels = data.labels().unwrap();
    let mut brute = 0.0f64;
    for i in 0..data.len() {
        for j in 0..data.len() {
            if !labels[i].is_outlier() && labels[i] == labels[j] {
                brute = brute.max(sq_dist(data.point(i), data.point(j)).sqrt());
            }
        }
    }
    assert_eq!(truth.diameter, brute);
}

#[test]
fn adversarial_separations_are_exact() {
    let spec = AdversarialSpec { k: 3, cluster_sizes: vec![5, 7, 9], z: 4, x: 2.5, dim: 3 };
    let (data, truth) = gen_adversarial(&spec).unwrap();
    let mut locations: Vec<Vec<f64>> = data.points().map(<[f64]>::to_vec).collect();
    locations.sort_by(|a, b| a[0].total_cmp(&b[0]));
    locations.dedup();
    assert_eq!(locations.len(), 7);
    for a in 0..locations.len() {
        for b in a + 1..locations.len() {
            assert!(sq_dist(&locations[a], &locations[b]).sqrt() >= 2.5);
        }
    }
    assert_eq!(truth.cluster_sizes, vec![5, 7, 9]);
    assert_eq!(truth.radius_bound(), 0.0);
}

#[test]
fn same_spec_gives_byte_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let spec = SyntheticSpec { k: 3, n: 900, z: 9, dim: 4, side: 400.0, sigma: 10.0, min_cluster_frac: 0.2, seed: 21 };
    for name in ["a.csv", "b.csv"] {
        save_points(&gen_synthetic(&spec).unwrap().0, &dir.path().join(name)).unwrap();
    }
    assert_eq!(std::fs::read(dir.path().join("a.csv")).unwrap(), std::fs::read(dir.path().join("b.csv")).unwrap());
}

#[test]
fn shuttle_shaped_file() {
    // Seven classes in R^9 with the skewed sizes of the real data; four are tiny.
    let sizes = [45_586usize, 8_903, 3_267, 171, 50, 13, 10];
    let mut rows = Vec::with_capacity(58_000);
    let mut labels = Vec::with_capacity(58_000);
    for (c, &s) in sizes.iter().enumerate() {
        for i in 0..s {
            rows.push((0..9).map(|d| (c * 100 + (i * 7 + d) % 13) as f64).collect::<Vec<f64>>());
            labels.push(Label::Cluster(c as u32));
        }
    }
    let data = Dataset::from_rows("shuttle", &rows).unwrap().with_labels(labels).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("shuttle.csv");
    save_points(&data, &path).unwrap();
    let loaded = load_points(&path, PointFormat::default()).unwrap();
    assert_eq!((loaded.len(), loaded.dim()), (58_000, 9));

    let relabeled = relabel_small_clusters(&loaded, 0.01).unwrap();
    let tiny: usize = sizes[3..].iter().sum();
    assert_eq!(relabeled.outlier_indices().unwrap().len(), tiny);

    let augmented = augment_outliers(&relabeled, 0.01, &mut seeded(5)).unwrap();
    let added = augmented.len() - 58_000;
    assert_eq!(added, outliers_needed(58_000, tiny, 0.01));
    let outliers = augmented.outlier_indices().unwrap().len();
    assert!(outliers as f64 >= 0.01 * augmented.len() as f64);
    assert!(((outliers - 1) as f64) < 0.01 * (augmented.len() - 1) as f64, "one fewer would miss the target");
    assert_eq!(outliers_needed(59_000, 0, 0.01), 596);
    let appended = augmented.select(&(58_000..augmented.len()).collect::<Vec<_>>()).unwrap();
    assert!(appended.labels().unwrap().iter().all(|l| l.is_outlier()));
}

fn labeled_dataset() -> impl Strategy<Value = Dataset> {
    (1usize..5, 1usize..40).prop_flat_map(|(d, n)| {
        (
            prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::ZERO, n * d),
            prop::collection::vec(prop::option::of(0u32..4), n),
            any::<bool>(),
        )
            .prop_map(move |(coords, labels, labeled)| {
                let data = Dataset::from_flat("rt", d, coords).unwrap();
                if labeled {
                    data.with_labels(labels.into_iter().map(|l| l.map_or(Label::Outlier, Label::Cluster)).collect())
                        .unwrap()
                } else {
                    data
                }
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn save_then_load_is_identity(data in labeled_dataset()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rt.csv");
        save_points(&data, &path).unwrap();
        let back = load_points(&path, PointFormat::default()).unwrap();
        prop_assert_eq!(back.coords(), data.coords());
        prop_assert_eq!(back.labels(), data.labels());
        prop_assert_eq!(back.dim(), data.dim());
    }
}
