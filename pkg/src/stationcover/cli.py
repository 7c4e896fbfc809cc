"""Command line interface.

Subcommands: generate, reduce, solve, metrics, ingest-gtfs, sweep,
construct-n1, construct-n2, encode-sat.  Every command exits 0 on success
and nonzero with a diagnostic on stderr otherwise.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import gen, graphview, gtfs, harness, metrics, model, solve
from .reduce import reduce_to_core


def _write_or_print(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _parse_beta(value: str) -> float:
    return math.inf if value.lower() in ("inf", "infinity") else float(value)


def _parse_budget(value: str) -> solve.Budget:
    if value.endswith("s"):
        return solve.Budget(max_seconds=float(value[:-1]))
    if value.endswith("m"):
        return solve.Budget(max_seconds=60.0 * float(value[:-1]))
    return solve.Budget(max_nodes=int(value))


def cmd_generate(args: argparse.Namespace) -> int:
    params = gen.GeneratorParams(
        n_stations=args.stations,
        ratio=args.ratio,
        target_delta_s=args.delta_s,
        beta=args.beta,
        temperature=args.temperature,
        seed=args.seed,
    )
    result = gen.generate(params)
    instance = result.largest_component if args.largest_component else result.instance
    model.save_hsd(instance, args.output)
    lcc = result.largest_component
    print(
        f"wrote {args.output}: {instance.n_stations} stations, "
        f"{instance.n_connections} connections "
        f"(largest component: {lcc.n_stations} stations); scale a = {result.world.a:.6g}"
    )
    return 0


def cmd_reduce(args: argparse.Namespace) -> int:
    instance = model.load_hsd(args.instance)
    report = reduce_to_core(instance)
    two_core_vertices = graphview.two_core(graphview.to_graph(instance)).vertices
    if instance.n_stations:
        report = report.with_two_core_size(len(two_core_vertices) / instance.n_stations)
    model.save_hsd(report.core, args.output)
    print(f"input: {instance.n_stations} stations, {instance.n_connections} connections")
    print(f"core:  {report.core.n_stations} stations, {report.core.n_connections} connections")
    print(f"complexity: {report.complexity}")
    print(f"relative core complexity: {report.relative_core_complexity:.4%}")
    print(f"relative 2-core size: {report.relative_two_core_size:.4%}")
    print(f"core written to {args.output}")
    if args.report:
        lines = [f"station {s} dominated-by {w}" for s, w in report.removed_stations]
        lines += [
            f"connection {' '.join(c)} dominated-by {' '.join(w)}"
            for c, w in report.removed_connections
        ]
        Path(args.report).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
        print(f"removal trace written to {args.report}")
    return 0


def cmd_solve(args: argparse.Namespace) -> int:
    instance = model.load_hsd(args.instance)
    budget = _parse_budget(args.budget) if args.budget else None
    try:
        cover, report = solve.solve_pipeline(instance, budget)
    except solve.BudgetExhausted as exc:
        print(f"budget exhausted; best cover found has size {len(exc.best_cover)}", file=sys.stderr)
        print("upper bound: " + " ".join(sorted(exc.best_cover)), file=sys.stderr)
        return 3
    print(f"optimum size: {len(cover)}")
    print("cover: " + " ".join(sorted(cover)))
    print(
        f"reduction removed {len(report.removed_stations)} stations and "
        f"{len(report.removed_connections)} connections; core complexity {report.complexity}"
    )
    return 0


def cmd_metrics(args: argparse.Namespace) -> int:
    instance = model.load_hsd(args.instance)
    if args.largest_component:
        instance = model.largest_component(instance)
    if args.ccdf:
        degrees = list(model.degree_stats(instance).station_degrees.values())
        lines = ["degree,fraction_at_least"]
        lines += [f"{value},{fraction:.6g}" for value, fraction in metrics.ccdf(degrees)]
        Path(args.ccdf).write_text("\n".join(lines) + "\n", encoding="utf-8")
    report = metrics.metrics_report(instance)
    _write_or_print(metrics.MetricsReport.CSV_HEADER + "\n" + report.csv_row() + "\n", args.output)
    if args.figure:
        _plot_ccdf(instance, report, args.figure)
        print(f"degree CCDF figure written to {args.figure}", file=sys.stderr)
    return 0


def _plot_ccdf(instance: model.Instance, report: metrics.MetricsReport, path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import numpy as np
    from scipy.special import zeta

    degrees = list(model.degree_stats(instance).station_degrees.values())
    points = metrics.ccdf([d for d in degrees if d > 0])
    xs = [value for value, _ in points]
    ys = [fraction for _, fraction in points]
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(xs, ys, drawstyle="steps-post", label="station degrees")
    if not math.isnan(report.beta_hat):
        fit = metrics.fit_power_law(degrees)
        tail_share = sum(1 for d in degrees if d >= fit.xmin) / len(degrees)
        grid = np.arange(fit.xmin, max(xs) + 1)
        ax.loglog(
            grid,
            tail_share * zeta(fit.beta, grid) / zeta(fit.beta, fit.xmin),
            "--",
            label=f"fit (beta = {fit.beta:.2f})",
        )
    ax.set_xlabel("degree x")
    ax.set_ylabel("share of stations with degree >= x")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def cmd_ingest_gtfs(args: argparse.Namespace) -> int:
    instance = gtfs.load_gtfs(args.directory)
    if args.largest_component:
        instance = model.largest_component(instance)
    model.save_hsd(instance, args.output)
    print(
        f"wrote {args.output}: {instance.n_stations} stations, "
        f"{instance.n_connections} connections"
    )
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    config = harness.PRESETS[args.preset]
    if args.config:
        config = harness.parse_sweep_config(Path(args.config).read_text(encoding="utf-8"), config)
    if args.samples:
        config = replace(config, samples=args.samples)
    if args.seed is not None:
        config = replace(config, master_seed=args.seed)

    def progress(done: int, total: int) -> None:
        if args.verbose:
            print(f"\r{done}/{total} samples", end="", file=sys.stderr, flush=True)

    results = harness.run_sweep(config, jobs=args.jobs, progress=progress)
    if args.verbose:
        print(file=sys.stderr)
    paths = harness.write_results(results, args.output, figures=not args.no_figures)
    for path in paths:
        print(f"wrote {path}")
    for temperature, beta, sample, message in results.errors:
        print(f"cell (T={temperature}, beta={beta}, sample={sample}) failed: {message}",
              file=sys.stderr)
    return 0 if not results.errors else 4


def cmd_construct_n1(args: argparse.Namespace) -> int:
    graph = graphview.read_edge_list(Path(args.graph).read_text(encoding="utf-8"))
    instance = graphview.build_n1(graph, args.station)
    model.save_hsd(instance, args.output)
    print(f"wrote {args.output}: {instance.n_connections} connections on {instance.n_stations} stations")
    return 0


def cmd_construct_n2(args: argparse.Namespace) -> int:
    graph = graphview.read_edge_list(Path(args.graph).read_text(encoding="utf-8"))
    instance = graphview.build_n2(graph)
    model.save_hsd(instance, args.output)
    print(f"wrote {args.output}: {instance.n_connections} connections on {instance.n_stations} stations")
    return 0


def cmd_encode_sat(args: argparse.Namespace) -> int:
    formula = graphview.read_dimacs(Path(args.cnf).read_text(encoding="utf-8"))
    instance, graph = graphview.encode_3sat(formula)
    model.save_hsd(instance, args.output)
    witnesses_ok = graphview.verify_structure_witnesses(graph)
    print(
        f"wrote {args.output}: {formula.n_variables} variables, "
        f"{len(formula.clauses)} clauses; structure witnesses "
        f"{'verified' if witnesses_ok else 'FAILED'}"
    )
    return 0 if witnesses_ok else 5


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stationcover",
        description="Station cover / hitting set laboratory",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a random instance")
    p.add_argument("--stations", type=int, default=2000)
    p.add_argument("--ratio", type=float, default=10.0)
    p.add_argument("--delta-s", type=float, default=2.0)
    p.add_argument("--beta", type=_parse_beta, default=math.inf, help="power-law exponent or 'inf'")
    p.add_argument("--temperature", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--largest-component", action="store_true")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("reduce", help="apply the dominance reduction rules")
    p.add_argument("instance")
    p.add_argument("-o", "--output", default="core.hsd")
    p.add_argument("--report", help="write the removal trace (element/witness pairs)")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("solve", help="exact minimum cover via reduce + branch and bound")
    p.add_argument("instance")
    p.add_argument("--budget", help="node cap (e.g. 100000) or time cap (e.g. 10s, 2m)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("metrics", help="summary metrics as one CSV row")
    p.add_argument("instance")
    p.add_argument("--largest-component", action="store_true")
    p.add_argument("--ccdf", help="also write the degree CCDF as CSV to this path")
    p.add_argument("--figure", help="also render the degree CCDF figure (svg/png)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("ingest-gtfs", help="build an instance from a GTFS feed directory")
    p.add_argument("directory")
    p.add_argument("--largest-component", action="store_true")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_ingest_gtfs)

    p = sub.add_parser("sweep", help="run a (temperature, beta) sweep")
    p.add_argument("--preset", choices=sorted(harness.PRESETS), default="thinned")
    p.add_argument("--config", help="flat key-value config file overriding the preset")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--verbose", action="store_true")
    p.add_argument("-o", "--output", default="sweep-out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("construct-n1", help="fully reducible instance on a given graph")
    p.add_argument("graph", help="edge list file: one 'u v' per line")
    p.add_argument("--station", help="designated station (default: smallest per component)")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_construct_n1)

    p = sub.add_parser("construct-n2", help="irreducible instance on a given graph's 2-core")
    p.add_argument("graph", help="edge list file: one 'u v' per line")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_construct_n2)

    p = sub.add_parser("encode-sat", help="encode a DIMACS 3-CNF formula as an instance")
    p.add_argument("cnf")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_encode_sat)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (model.ModelError, gtfs.GtfsError, gen.GenerationError, metrics.MetricsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
