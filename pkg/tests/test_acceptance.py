"""Acceptance gate: the twelve structural guarantees the package ships with.

Each criterion is one test; the terminal summary prints one PASS/FAIL line
per criterion (see conftest). Budgets and tolerances are pinned here —
loosening them is a behavior change, not a test fix.
"""

import math
import time

from sievecluster import (
    MethodSpec,
    SplitMix64,
    brute_force_maximal_linked,
    build_sieve,
    check_functoriality,
    check_sandwich,
    check_sieve_axioms,
    cover_metric,
    edge_linkage,
    evaluate_method,
    find_counterexample,
    flagify,
    iterative_flagify_oracle,
    k_linkage,
    maximal_linkage,
    maximal_linked_sets,
    random_flag_cover,
    random_metric,
    random_morphism,
    refines,
    sieve_consistent,
    single_linkage,
    verify_witness,
    vertex_linkage,
)
from sievecluster.covers import Cover, Relation
from sievecluster.fileio import canonical_json_bytes, write_json
from sievecluster.rng import derive_seed
from sievecluster.verify import METRIC_MODES

INF = math.inf

CRITERIA = {
    1: "scale families consistent under all non-expansive maps (200 pairs each)",
    2: "connectivity/closure families consistent under injective maps (200 pairs each)",
    3: "witness search: verified violations for the injective-only families, none for the scale families",
    4: "two-sided bracketing at the probed scale for every non-trivial built-in (100 spaces)",
    5: "vertex-connectivity chain refines downward and meets its endpoints (100 spaces)",
    6: "step-linkage and vertex-linkage identities hold exactly (100 spaces)",
    7: "cover metrization recovers every random flag cover exactly (50 covers)",
    8: "clique kernel and flagification match their exhaustive oracles (500 cases each)",
    9: "built profiles satisfy all three conditions and match flat evaluation (100 spaces x 5 families)",
    10: "profile-level consistency along sampled non-expansive maps (100 maps)",
    11: "connectivity methods fast at 200 points; components at 2000 points",
    12: "repeated runs with the same seed produce byte-identical reports",
}


def _median_scale(x) -> float:
    dists = x.pairwise_distances()
    return dists[len(dists) // 2] if dists else 1.0


def test_criterion_01_functoriality_scale_families():
    specs = [
        MethodSpec(family="sl", delta=1.0),
        MethodSpec(family="ml", delta=1.0),
    ]
    for k in (1, 2, 3, INF):
        for budget in (INF, 1.5):
            specs.append(MethodSpec(family="l", delta=1.0, k=k, budget=budget))
    start = time.perf_counter()
    for spec in specs:
        report = check_functoriality(
            spec, trials=200, category="met", seed=1001, sizes=(3, 10)
        )
        assert report.violations == [], (spec.label(), len(report.violations))
    assert time.perf_counter() - start < 30.0


def test_criterion_02_functoriality_injective_families():
    specs = [
        MethodSpec(family=family, delta=1.0, k=k)
        for family in ("vl", "el", "bk", "bkstar")
        for k in (1, 2, 3)
    ]
    start = time.perf_counter()
    for spec in specs:
        report = check_functoriality(
            spec, trials=200, category="metinj", seed=1002
        )
        assert report.violations == [], (spec.label(), len(report.violations))
    assert time.perf_counter() - start < 60.0


def test_criterion_03_counterexample_search():
    for family in ("vl", "el", "bk", "bkstar"):
        spec = (
            MethodSpec(family=family, delta=1.0, k=2)
        )
        start = time.perf_counter()
        witness = find_counterexample(spec, max_points=6)
        assert time.perf_counter() - start < 120.0, family
        assert witness is not None, family
        assert witness["points"] <= 6
        assert verify_witness(witness), family
    for family in ("sl", "ml"):
        spec = MethodSpec(family=family, delta=1.0)
        start = time.perf_counter()
        assert find_counterexample(spec, max_points=6) is None, family
        assert time.perf_counter() - start < 120.0, family


def test_criterion_04_sandwich():
    specs = [
        MethodSpec(family="sl", delta=1.0),
        MethodSpec(family="ml", delta=1.0),
        MethodSpec(family="l", delta=1.0, k=2, budget=INF),
        MethodSpec(family="l", delta=1.0, k=2, budget=1.5),
        MethodSpec(family="l", delta=1.0, k=3, budget=INF),
        MethodSpec(family="vl", delta=1.0, k=2),
        MethodSpec(family="vl", delta=1.0, k=3),
        MethodSpec(family="el", delta=1.0, k=1),
        MethodSpec(family="bk", delta=1.0, k=2),
        MethodSpec(family="bkstar", delta=1.0, k=2),
    ]
    for spec in specs:
        report = check_sandwich(spec, trials=100, seed=1004)
        assert report.violations == [], spec.label()


def test_criterion_05_vertex_connectivity_chain():
    for i in range(100):
        x = random_metric(3 + i % 6, derive_seed(1005, i), METRIC_MODES[i % 3])
        delta = _median_scale(x)
        levels = {k: vertex_linkage(x, delta, k) for k in range(1, 7)}
        for k in range(1, 5):
            assert refines(levels[k + 1], levels[k]), (i, k)
        ml = maximal_linkage(x, delta)
        for k in range(1, 6):
            assert refines(ml, levels[k]), (i, k)
        assert levels[1] == single_linkage(x, delta), i


def test_criterion_06_identities():
    for i in range(100):
        x = random_metric(3 + i % 6, derive_seed(1006, i), METRIC_MODES[i % 3])
        delta = _median_scale(x)
        assert k_linkage(x, delta, 1, INF) == maximal_linkage(x, delta), i
        assert k_linkage(x, delta, INF, INF) == single_linkage(x, delta), i
        assert vertex_linkage(x, delta, x.n) == maximal_linkage(x, delta), i


def test_criterion_07_cover_metrization():
    for i in range(50):
        n = 1 + i % 7
        cover = random_flag_cover(n, derive_seed(1007, i))
        delta = 0.5 + 0.5 * (i % 3)
        x = cover_metric(cover, delta)
        assert maximal_linkage(x, delta) == cover, (i, n)


def test_criterion_08_oracle_equivalence():
    for case in range(500):
        rng = SplitMix64(derive_seed(1008, 1, case))
        n = 1 + rng.randint(12)
        base = [f"v{i:02d}" for i in range(n)]
        density = rng.randint(101)
        pairs = [
            (base[i], base[j])
            for i in range(n)
            for j in range(i + 1, n)
            if rng.randint(100) < density
        ]
        rel = Relation(base, pairs)
        assert maximal_linked_sets(rel) == brute_force_maximal_linked(rel), case
    for case in range(500):
        rng = SplitMix64(derive_seed(1008, 2, case))
        n = 1 + rng.randint(8)
        base = [f"v{i}" for i in range(n)]
        full = (1 << n) - 1
        masks = [1 + rng.randint(full) for _ in range(1 + rng.randint(4))]
        covered = 0
        for m in masks:
            covered |= m
        masks.extend(1 << v for v in range(n) if not covered >> v & 1)
        cover = Cover.from_masks(tuple(base), masks)
        assert flagify(cover) == iterative_flagify_oracle(cover), case


def test_criterion_09_profile_conditions():
    specs = [
        MethodSpec(family="sl", delta=1.0),
        MethodSpec(family="ml", delta=1.0),
        MethodSpec(family="l", delta=1.0, k=2, budget=INF),
        MethodSpec(family="vl", delta=1.0, k=2),
        MethodSpec(family="el", delta=1.0, k=2),
    ]
    for i in range(100):
        x = random_metric(3 + i % 6, derive_seed(1009, i), METRIC_MODES[i % 3])
        rng = SplitMix64(derive_seed(1009, 7, i))
        for spec in specs:
            sieve = build_sieve(x, spec)
            report = check_sieve_axioms(sieve)
            assert report.is_sieve, (i, spec.label(), report.summary())
            for _ in range(10):
                t = rng.uniform(0.0, 1.1 * x.diameter())
                assert sieve.evaluate(t) == evaluate_method(
                    x, spec.with_delta(t)
                ), (i, spec.label(), t)


def test_criterion_10_profile_level_consistency():
    specs = [
        MethodSpec(family="sl", delta=1.0),
        MethodSpec(family="l", delta=1.0, k=2, budget=INF),
    ]
    for i in range(100):
        x = random_metric(3 + i % 5, derive_seed(1010, i), METRIC_MODES[i % 3])
        y, f = random_morphism(x, SplitMix64(derive_seed(1010, 7, i)), "met")
        for spec in specs:
            sx = build_sieve(x, spec)
            sy = build_sieve(y, spec)
            assert sieve_consistent(f, sx, sy), (i, spec.label())


def test_criterion_11_performance():
    cloud = random_metric(200, 2011, "euclidean-points")
    start = time.perf_counter()
    vertex_linkage(cloud, 0.05, 2)
    edge_linkage(cloud, 0.05, 2)
    assert time.perf_counter() - start < 10.0
    big = random_metric(2000, 2012, "euclidean-points")
    start = time.perf_counter()
    single_linkage(big, 0.05)
    assert time.perf_counter() - start < 5.0


def test_criterion_12_determinism(tmp_path):
    def report_files(tag: str) -> list[bytes]:
        blobs = []
        fun = check_functoriality(
            MethodSpec(family="ml", delta=1.0), trials=40, category="met", seed=1012
        )
        sand = check_sandwich(
            MethodSpec(family="vl", delta=1.0, k=2), trials=40, seed=1012
        )
        witness = find_counterexample(MethodSpec(family="vl", delta=1.0, k=2))
        sieve = build_sieve(
            random_metric(7, 1012, "closure-of-random-matrix"),
            MethodSpec(family="ml", delta=1.0),
        )
        for name, payload in (
            ("functoriality", fun.to_dict()),
            ("sandwich", sand.to_dict()),
            ("witness", witness),
            ("profile", sieve.to_dict()),
        ):
            path = tmp_path / f"{tag}-{name}.json"
            write_json(path, payload)
            blobs.append(path.read_bytes())
        return blobs

    first = report_files("run1")
    second = report_files("run2")
    assert first == second
    fresh = check_functoriality(
        MethodSpec(family="ml", delta=1.0), trials=40, category="met", seed=1012
    )
    assert first[0] == canonical_json_bytes(fresh.to_dict())
