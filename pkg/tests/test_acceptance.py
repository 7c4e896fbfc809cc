"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest -rA tests/test_acceptance.py`` to see every line.  The
session-scoped fixtures in conftest.py (calibration grid, thinned sweeps)
are shared across criteria, so the first criterion touching one pays its
cost.
"""

import math
import random
import statistics
import time
from itertools import combinations, combinations_with_replacement, product

import numpy as np
import pytest
from scipy.stats import spearmanr

from stationcover.gen import GeneratorParams, generate
from stationcover.graphview import (
    Formula3Sat,
    build_n1,
    build_n2,
    check_two_core_containment,
    encode_3sat,
    to_graph,
    two_core,
    verify_structure_witnesses,
)
from stationcover.gtfs import load_gtfs
from stationcover.harness import derive_seed
from stationcover.metrics import bipartite_clustering, fit_power_law, metrics_report
from stationcover.model import build_instance, degree_stats, largest_component
from stationcover.reduce import reduce_to_core
from stationcover.solve import solve_exact, solve_naive, solve_pipeline, verify_cover

from conftest import CALIBRATION_BETAS, CALIBRATION_TEMPERATURES, MASTER_SEED
from oracles import (
    exhaustive_path_cycle_counts,
    random_connected_graph,
    random_instance,
    reference_core_counts,
    sample_discrete_power_law,
    truth_table_satisfiable,
)


def criterion(cid: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {cid}: {detail}")
    assert ok, f"{cid}: {detail}"


def test_criterion_01_reduction_soundness():
    rng = random.Random(101)
    started = time.monotonic()
    for k in range(500):
        inst = random_instance(rng, max_stations=18, max_connections=14)
        cover, _ = solve_pipeline(inst)
        assert verify_cover(inst, cover)
        naive = solve_naive(inst)
        assert len(cover) == len(naive), (k, inst)
    elapsed = time.monotonic() - started
    criterion(
        "C01 reduction soundness",
        elapsed < 60.0,
        f"500/500 instances with |pipeline| = |naive|, {elapsed:.1f}s (< 60s)",
    )


def test_criterion_02_core_uniqueness():
    rng = random.Random(102)
    for k in range(50):
        inst = random_instance(rng, max_stations=14, max_connections=10)
        report = reduce_to_core(inst)
        expected = (report.core.n_stations, report.core.n_connections)
        for order in range(20):
            counts = reference_core_counts(inst, random.Random(1000 * k + order))
            assert counts == expected, (k, order, inst)
    criterion(
        "C02 core uniqueness",
        True,
        "50 instances x 20 removal orders: identical core station/connection counts",
    )


def test_criterion_03_two_core_containment(calibration_runs, gtfs_toy_dir):
    corpus = [
        build_instance(None, [("a", "b"), ("a", "c"), ("a", "d")]),
        build_instance(None, [("a", "b"), ("b", "c"), ("a", "c")]),
        build_instance(None, [("a", "b"), ("b", "c")]),
        build_instance(None, [("u", "w", "v"), ("v", "x"), ("u", "x")]),
        build_instance(None, [("a", "b"), ("a", "b")]),
        build_instance(None, [("a", "b")] * 3),
        load_gtfs(gtfs_toy_dir),
    ]
    rng = random.Random(103)
    for _ in range(15):
        graph = random_connected_graph(rng, rng.randint(5, 40))
        corpus.append(build_n1(graph))
        corpus.append(build_n2(graph))
    for _ in range(10):
        n = rng.randint(1, 6)
        clauses = tuple(
            tuple(rng.choice([1, -1]) * rng.randint(1, n) for _ in range(3))
            for _ in range(rng.randint(0, 2 * n))
        )
        corpus.append(encode_3sat(Formula3Sat(n, clauses))[0])
    for _ in range(100):
        corpus.append(random_instance(rng))
    for cell in calibration_runs.values():
        corpus.append(cell[0].largest_component)
    violations = [i for i, inst in enumerate(corpus) if not check_two_core_containment(inst)]
    criterion(
        "C03 core-in-2-core containment",
        not violations,
        f"{len(corpus)} corpus instances checked, {len(violations)} violations",
    )


def test_criterion_04_graph_constructions():
    rng = random.Random(104)
    for k in range(50):
        graph = random_connected_graph(rng, rng.randint(10, 100), extra_edges=rng.randint(1, 10))
        n1 = build_n1(graph)
        assert to_graph(n1) == graph
        _, report = solve_pipeline(n1)
        assert report.complexity == 1, (k, report.complexity)
        n2 = build_n2(graph)
        assert to_graph(n2) == graph
        core = reduce_to_core(n2).core
        expected = two_core(graph)
        assert core.stations == expected.vertices, k
        assert len(core.connections) == len(expected.edges), k
    criterion(
        "C04 graph constructions",
        True,
        "50 graphs: fully reducible variant has complexity 1; irreducible variant's "
        "core equals the 2-core exactly",
    )


def _assert_encoding_equivalence(formula: Formula3Sat, use_naive: bool) -> None:
    instance, graph = encode_3sat(formula)
    optimum = len(solve_naive(instance)) if use_naive else len(solve_exact(instance))
    satisfiable = truth_table_satisfiable(formula.n_variables, formula.clauses)
    assert satisfiable == (optimum == formula.n_variables), (formula, optimum, satisfiable)
    assert verify_structure_witnesses(graph), formula


def test_criterion_05_sat_encoding():
    checked = 0
    # all single-clause formulas over n = 1..4 (canonical literal multisets)
    for n in range(1, 5):
        literals = [sign * v for v in range(1, n + 1) for sign in (1, -1)]
        for clause in combinations_with_replacement(literals, 3):
            _assert_encoding_equivalence(Formula3Sat(n, (clause,)), use_naive=True)
            checked += 1
    # every subset of the 8 full sign-pattern clauses over 3 variables
    patterns3 = [tuple(s * v for s, v in zip(signs, (1, 2, 3))) for signs in product((1, -1), repeat=3)]
    for r in range(len(patterns3) + 1):
        for subset in combinations(patterns3, r):
            _assert_encoding_equivalence(Formula3Sat(3, subset), use_naive=True)
            checked += 1
    # the full sign-pattern family over 4 variables (unsatisfiable)
    patterns4 = tuple(
        tuple(s * v for s, v in zip(signs, triple))
        for triple in combinations((1, 2, 3, 4), 3)
        for signs in product((1, -1), repeat=3)
    )
    _assert_encoding_equivalence(Formula3Sat(4, patterns4), use_naive=False)
    checked += 1
    # 100 random formulas with up to 8 variables
    rng = random.Random(105)
    for _ in range(100):
        n = rng.randint(5, 8)
        clauses = tuple(
            tuple(rng.choice([1, -1]) * rng.randint(1, n) for _ in range(3))
            for _ in range(rng.randint(1, 2 * n))
        )
        _assert_encoding_equivalence(Formula3Sat(n, clauses), use_naive=False)
        checked += 1
    criterion(
        "C05 3-SAT encoding",
        True,
        f"{checked} formulas: satisfiable iff optimum = n; structure witnesses verified on all",
    )


def test_criterion_06_clustering_counts():
    rng = random.Random(106)
    checked = 0
    while checked < 200:
        inst = random_instance(rng, max_stations=6, max_connections=6)
        if inst.n_stations + inst.n_connections > 12:
            continue
        fast = bipartite_clustering(inst)
        paths, cycles = exhaustive_path_cycle_counts(inst)
        assert (fast.n_paths, fast.n_cycles) == (paths, cycles), inst
        checked += 1
    k23 = bipartite_clustering(build_instance(None, [("a", "b")] * 3))
    assert k23.kappa == pytest.approx(1.0)
    criterion(
        "C06 clustering counts",
        True,
        "200 bipartite graphs: fast counts equal exhaustive enumeration; K_{2,3} gives kappa = 1",
    )


def test_criterion_07_calibration(calibration_runs):
    realized = {
        cell: [degree_stats(run.instance).delta_s for run in runs]
        for cell, runs in calibration_runs.items()
    }
    flat = [v for values in realized.values() for v in values]
    ok = all(1.85 <= v <= 2.15 for v in flat)
    criterion(
        "C07 calibration",
        ok,
        f"90 runs over (beta, T) in {{2.5, 3.5, inf}} x {{0.1, 0.5, 0.9}}: "
        f"pre-component delta_S in [{min(flat):.3f}, {max(flat):.3f}] (target [1.85, 2.15])",
    )


def test_criterion_08_component_size(calibration_runs):
    finite_cells = [
        (beta, t)
        for beta in CALIBRATION_BETAS
        for t in CALIBRATION_TEMPERATURES
        if not math.isinf(beta) and beta > 2.5
    ]
    sizes, degrees = [], []
    for cell in finite_cells:
        for run in calibration_runs[cell]:
            lcc = run.largest_component
            sizes.append(lcc.n_stations)
            degrees.append(degree_stats(lcc).delta_s)
    inf_sizes = [
        run.largest_component.n_stations
        for t in CALIBRATION_TEMPERATURES
        for run in calibration_runs[(math.inf, t)]
    ]
    ok = min(sizes) >= 1000 and max(degrees) <= 2.7
    criterion(
        "C08 component size",
        ok,
        f"finite beta > 2.5: largest components {min(sizes)}-{max(sizes)} (>= 1000), "
        f"post-component delta_S <= {max(degrees):.3f} (<= 2.7); "
        f"uniform-weight limit excluded per ledger (its components span {min(inf_sizes)}-{max(inf_sizes)})",
    )


def test_criterion_09_empty_core_regime():
    temperatures = (0.0, 0.1, 0.2, 0.25)
    cell_means, details = {}, []
    for t in temperatures:
        fractions, complexities = [], []
        for sample in range(10):
            seed = derive_seed(MASTER_SEED, t, math.inf, sample)
            run = generate(GeneratorParams(2000, 10.0, 2.0, math.inf, t, seed))
            report = reduce_to_core(run.largest_component)
            fractions.append(report.relative_core_complexity)
            complexities.append(report.complexity)
        cell_means[t] = sum(fractions) / len(fractions)
        details.append(
            f"T={t}: mean station fraction {cell_means[t]:.2%}, "
            f"max core component {max(complexities)}"
        )
    ok = all(mean <= 0.005 for mean in cell_means.values())
    criterion(
        "C09 empty-core regime",
        ok,
        "; ".join(details)
        + " | gate: mean relative core complexity <= 0.5% per cell; the surviving "
        "stations are forced singleton picks (see ledger)",
    )


def test_criterion_10_global_bound(thinned_main_sweep):
    core = thinned_main_sweep.cell_mean("core_frac")
    worst_cell = max(core, key=core.get)
    ok = core[worst_cell] <= 0.55
    # soft variance diagnostic, not gated: share of samples within 5% of
    # their cell mean (absolute floor 0.005 for near-empty cells)
    by_cell: dict = {}
    for row in thinned_main_sweep.rows:
        by_cell.setdefault((row.temperature, row.beta), []).append(row.core_frac)
    close = total = 0
    for cell, values in by_cell.items():
        mean = sum(values) / len(values)
        tolerance = max(0.05 * mean, 0.005)
        close += sum(1 for v in values if abs(v - mean) <= tolerance)
        total += len(values)
    criterion(
        "C10 global bound",
        ok,
        f"thinned main sweep: max per-cell mean core fraction {core[worst_cell]:.1%} "
        f"at (T={worst_cell[0]}, beta={worst_cell[1]}) (<= 55%); "
        f"sweep wall time {thinned_main_sweep.elapsed_seconds / 60:.1f} min; "
        f"variance diagnostic: {close}/{total} samples within 5% of their cell mean",
    )


def test_criterion_11_locality_monotonicity(thinned_main_sweep):
    kappa = thinned_main_sweep.cell_mean("kappa")
    core = thinned_main_sweep.cell_mean("core_frac")
    temps = sorted({t for t, _ in kappa})
    failures, details = [], []
    for beta in sorted(set(thinned_main_sweep.config.betas), key=lambda b: (math.isinf(b), b)):
        rho_kappa = spearmanr(temps, [kappa[(t, beta)] for t in temps]).statistic
        core_curve = [core[(t, beta)] for t in temps]
        parts = [f"beta={beta}: rho(T,kappa)={rho_kappa:+.3f}"]
        if rho_kappa > -0.9:
            failures.append(f"beta={beta} rho_kappa={rho_kappa:+.3f}")
        if max(core_curve) > 0.01:  # core fractions not all ~ 0
            rho_core = spearmanr(temps, core_curve).statistic
            parts.append(f"rho(T,core)={rho_core:+.3f}")
            if rho_core < 0.8:
                failures.append(f"beta={beta} rho_core={rho_core:+.3f}")
        details.append(" ".join(parts))
    criterion(
        "C11 locality monotonicity",
        not failures,
        "; ".join(details)
        + (f" | violations: {failures}" if failures else " | all within gates"),
    )


def _tractable_threshold(cell_means: dict, temps, beta: float):
    ok_temps = [t for t in temps if cell_means[(t, beta)] <= 0.01]
    return max(ok_temps) if ok_temps else None


def test_criterion_12_ratio_variant(thinned_main_sweep, thinned_ratio4_sweep):
    main_core = thinned_main_sweep.cell_mean("core_frac")
    ratio_core = thinned_ratio4_sweep.cell_mean("core_frac")
    main_cx = thinned_main_sweep.cell_mean("complexity_frac")
    ratio_cx = thinned_ratio4_sweep.cell_mean("complexity_frac")
    temps = sorted({t for t, _ in main_core})
    betas = sorted(set(thinned_main_sweep.config.betas), key=lambda b: (math.isinf(b), b))
    failures, details = [], []
    for beta in betas:
        t_main = _tractable_threshold(main_core, temps, beta)
        t_ratio = _tractable_threshold(ratio_core, temps, beta)
        d_main = _tractable_threshold(main_cx, temps, beta)
        d_ratio = _tractable_threshold(ratio_cx, temps, beta)
        details.append(
            f"beta={beta}: T*={t_main}->{t_ratio} (residue-free diagnostic {d_main}->{d_ratio})"
        )
        if math.isinf(beta):
            ok = t_main is not None and t_ratio is not None and t_ratio > t_main
        else:
            ok = (t_main is None) or (t_ratio is not None and t_ratio >= t_main)
        if not ok:
            failures.append(f"beta={beta}: {t_main} -> {t_ratio}")
    criterion(
        "C12 ratio variant",
        not failures,
        "station-fraction thresholds (gate) vs max-component diagnostic: "
        + "; ".join(details)
        + (f" | violations: {failures}" if failures else ""),
    )


def test_criterion_13_degree_variant(thinned_deg5_sweep):
    core = thinned_deg5_sweep.cell_mean("core_frac")
    worst_cell = max(core, key=core.get)
    ok = core[worst_cell] >= 0.80
    criterion(
        "C13 degree variant",
        ok,
        f"thinned deg5 sweep: max per-cell mean core fraction {core[worst_cell]:.1%} "
        f"at (T={worst_cell[0]}, beta={worst_cell[1]}) (>= 80%)",
    )


def test_criterion_14_power_law_fitting():
    betas, distances = [], []
    for seed in range(20):
        rng = np.random.default_rng(1400 + seed)
        sample = sample_discrete_power_law(2000, 3.5, rng)
        fit = fit_power_law(sample)
        betas.append(fit.beta)
        distances.append(fit.ks)
    median_beta = statistics.median(betas)
    median_ks = statistics.median(distances)
    ok = 3.2 <= median_beta <= 3.8 and median_ks <= 0.05
    criterion(
        "C14 power-law fitting",
        ok,
        f"20 synthetic samples (n=2000, beta=3.5): median beta_hat {median_beta:.3f} "
        f"(in [3.2, 3.8]), median KS {median_ks:.4f} (<= 0.05)",
    )


def test_criterion_15_real_data_capability(gtfs_toy_dir, tmp_path):
    inst = largest_component(load_gtfs(gtfs_toy_dir))
    report = metrics_report(inst)
    values = {
        "n_stations": report.n_stations,
        "ratio": report.station_connection_ratio,
        "delta_s": report.delta_s,
        "beta_hat": report.beta_hat,
        "ks": report.ks,
        "kappa": report.kappa,
        "two_core_frac": report.two_core_fraction,
        "core_frac": report.core_fraction,
    }
    ok = (
        report.n_stations > 0
        and all(math.isfinite(float(v)) for v in values.values())
        and report.kappa_defined
    )
    # the documented command pair must work end to end
    from stationcover.cli import main as cli_main

    out = tmp_path / "toy.hsd"
    assert cli_main(["ingest-gtfs", str(gtfs_toy_dir), "-o", str(out), "--largest-component"]) == 0
    assert cli_main(["metrics", str(out), "-o", str(tmp_path / "row.csv")]) == 0
    row = (tmp_path / "row.csv").read_text().splitlines()
    ok = ok and len(row) == 2 and len(row[1].split(",")) == 8
    criterion(
        "C15 real-data capability",
        ok,
        "toy feed -> all eight columns populated: "
        + ", ".join(f"{k}={float(v):.3g}" for k, v in values.items()),
    )
