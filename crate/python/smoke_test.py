"""Smoke test for the Python extension.

Build and run from the repository root:

    cargo build -p sampclust-py --features extension-module --release
    cp target/release/libsampclust.so python/sampclust.so
    python3 python/smoke_test.py
"""

import math
import os
import sys
import tempfile

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import sampclust as sc  # noqa: E402


def main():
    line = sc.Dataset([[0.0], [1.0], [2.0], [9.0]])
    assert len(line) == 4 and line.dim == 1
    assert sc.objective_with_outliers(line, [[0.0]], 1, "center") == 2.0
    assert sc.dist_to_set([3.0, 4.0], [[0.0, 0.0]]) == (5.0, 0)
    assert sc.cost(sc.Dataset([[0.0], [2.0]]), [[0.0]]) == 4.0

    r = sc.assign_memberships(sc.Dataset([[0.0], [1.0], [9.0]]), [[0.0]], 1, "center")
    assert r.memberships == [0, 0, None]
    assert r.objective == 1.0

    best, res = sc.one_pass_select(sc.Dataset([[0.0], [1.0], [9.0], [10.0]]), [[[0.0]], [[0.0], [10.0]]], 1, "center")
    assert best == 1 and res.objective == 1.0

    centers, radius = sc.gonzalez_kcenter(sc.Dataset([[0.0], [4.0], [8.0], [10.0]]), 2, 0)
    assert len(centers) == 2 and radius <= 6.0

    assert sc.sample_size_alg1(8, 0.8, 0.5) == 28
    assert sc.budget_extra(0.5, 0.2, 8, 2000) == 100

    data, truth = sc.gen_synthetic(k=4, n=4000, z=40, dim=10, side=400.0, sigma=5.0, seed=1)
    assert len(data) == 4000 and len(truth["r_bound"]) == 4
    labels = data.labels()
    assert sum(l is None for l in labels) == 40

    for variant, kind, extra in [("I", "center", 4), ("II", "center", 8), ("I", "means", 4), ("II", "median", 8)]:
        centers = sc.run_framework(data, variant, kind, 4, 40, 400, extra, seed=3)
        assert len(centers) == (4 + extra if variant == "I" else 4)
        res = sc.boosted_run(data, variant, kind, 4, 40, 400, extra, runs=3, seed=3)
        assert res.outlier_count == 40 and math.isfinite(res.objective)
        p, q = sc.precision(res, data), sc.purity(res, data)
        assert 0.0 <= p <= 1.0 and 0.0 <= q <= 1.0
        print(f"{variant:>2} {kind:<6} objective={res.objective:.3f} precision={p:.3f} purity={q:.3f}")

    adv, _ = sc.gen_adversarial([10, 10], 3, 10.0)
    assert len(adv) == 23

    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "pts.csv")
        data.save(path)
        back = sc.Dataset.load(path)
        assert back.rows() == data.rows() and back.labels() == labels

    try:
        sc.objective_with_outliers(line, [[0.0]], 4, "center")
    except ValueError:
        pass
    else:
        raise AssertionError("z >= n must raise ValueError")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
