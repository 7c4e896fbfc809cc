"""Experiment harness: parameter sweeps over temperature and exponent grids.

Each cell of the grid is generated, trimmed to its largest component,
measured and reduced; results land in one CSV row per sample plus rendered
figures (clustering versus temperature, and a core-complexity heatmap).
Per-sample seeds are derived from (master seed, temperature, beta, sample),
so results do not depend on scheduling.
"""

from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .gen import GeneratorParams, generate
from .metrics import metrics_report

CSV_HEADER = (
    "T,beta,sample,seed,n_stations_lcc,ratio_lcc,delta_s_lcc,"
    "kappa,beta_hat,ks,two_core_frac,core_frac"
)


@dataclass(frozen=True)
class SweepConfig:
    n_stations: int = 2000
    ratio: float = 10.0
    target_delta_s: float = 2.0
    temperatures: tuple[float, ...] = ()
    betas: tuple[float, ...] = ()
    samples: int = 10
    master_seed: int = 1

    def __post_init__(self) -> None:
        if not self.temperatures or not self.betas:
            raise ValueError("temperature and beta grids must be non-empty")
        if self.samples < 1:
            raise ValueError("need at least one sample per cell")


def _grid(start: float, stop: float, step: float) -> tuple[float, ...]:
    count = round((stop - start) / step)
    return tuple(round(start + i * step, 10) for i in range(count + 1))


MAIN_TEMPERATURES = _grid(0.0, 1.0, 0.05)
MAIN_BETAS = _grid(2.0, 5.0, 0.25) + (math.inf,)
THINNED_TEMPERATURES = _grid(0.0, 1.0, 0.1)
THINNED_BETAS = (2.0, 2.5, 3.0, 3.5, 5.0, math.inf)

PRESETS: dict[str, SweepConfig] = {
    "main": SweepConfig(temperatures=MAIN_TEMPERATURES, betas=MAIN_BETAS),
    "ratio4": SweepConfig(ratio=4.0, temperatures=MAIN_TEMPERATURES, betas=MAIN_BETAS),
    "deg5": SweepConfig(target_delta_s=5.0, temperatures=MAIN_TEMPERATURES, betas=MAIN_BETAS),
    "thinned": SweepConfig(temperatures=THINNED_TEMPERATURES, betas=THINNED_BETAS, samples=3),
}


def parse_sweep_config(text: str, base: SweepConfig | None = None) -> SweepConfig:
    """Flat key-value sweep configuration; unknown keys are rejected.

    Recognized keys: n_stations, ratio, delta_s, temperatures, betas,
    samples, seed.  List values are whitespace- or comma-separated; ``inf``
    is a valid beta.
    """
    config = base or PRESETS["main"]
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        values = value.replace(",", " ").split()
        if key == "n_stations":
            config = replace(config, n_stations=int(value))
        elif key == "ratio":
            config = replace(config, ratio=float(value))
        elif key == "delta_s":
            config = replace(config, target_delta_s=float(value))
        elif key == "temperatures":
            config = replace(config, temperatures=tuple(float(v) for v in values))
        elif key == "betas":
            config = replace(config, betas=tuple(float(v) for v in values))
        elif key == "samples":
            config = replace(config, samples=int(value))
        elif key == "seed":
            config = replace(config, master_seed=int(value))
        else:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
    return config


def derive_seed(master_seed: int, temperature: float, beta: float, sample: int) -> int:
    """Deterministic per-sample seed; cell-local, independent of schedule."""
    t_key = round(temperature * 1000)
    b_key = (1 << 32) - 1 if math.isinf(beta) else round(beta * 1000)
    sequence = np.random.SeedSequence([master_seed, t_key, b_key, sample])
    return int(sequence.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class SweepRow:
    temperature: float
    beta: float
    sample: int
    seed: int
    n_stations_lcc: int
    ratio_lcc: float
    delta_s_lcc: float
    kappa: float
    beta_hat: float
    ks: float
    two_core_frac: float
    core_frac: float
    # not part of the CSV contract; kept for diagnostics
    core_complexity: int = 0

    @property
    def complexity_frac(self) -> float:
        return self.core_complexity / self.n_stations_lcc if self.n_stations_lcc else 0.0


@dataclass
class SweepResults:
    config: SweepConfig
    rows: list[SweepRow] = field(default_factory=list)
    errors: list[tuple[float, float, int, str]] = field(default_factory=list)
    elapsed_seconds: float = 0.0

    def cell_mean(self, attribute: str) -> dict[tuple[float, float], float]:
        """Per-(T, beta) arithmetic mean of one row attribute."""
        sums: dict[tuple[float, float], list[float]] = {}
        for row in self.rows:
            sums.setdefault((row.temperature, row.beta), []).append(getattr(row, attribute))
        return {cell: sum(vals) / len(vals) for cell, vals in sums.items()}


def _run_sample(task: tuple[SweepConfig, float, float, int]) -> tuple[str, object]:
    config, temperature, beta, sample = task
    seed = derive_seed(config.master_seed, temperature, beta, sample)
    try:
        params = GeneratorParams(
            n_stations=config.n_stations,
            ratio=config.ratio,
            target_delta_s=config.target_delta_s,
            beta=beta,
            temperature=temperature,
            seed=seed,
        )
        lcc = generate(params).largest_component
        report = metrics_report(lcc)
        row = SweepRow(
            temperature=temperature,
            beta=beta,
            sample=sample,
            seed=seed,
            n_stations_lcc=report.n_stations,
            ratio_lcc=report.station_connection_ratio,
            delta_s_lcc=report.delta_s,
            kappa=report.kappa,
            beta_hat=report.beta_hat,
            ks=report.ks,
            two_core_frac=report.two_core_fraction,
            core_frac=report.core_fraction,
            core_complexity=report.core_complexity,
        )
        return "ok", row
    except Exception as exc:  # recorded per cell, not fatal
        return "err", (temperature, beta, sample, f"{type(exc).__name__}: {exc}")


def _beta_sort_key(beta: float) -> float:
    return float("inf") if math.isinf(beta) else beta


def run_sweep(config: SweepConfig, jobs: int = 1, progress=None) -> SweepResults:
    """Run every (temperature, beta, sample) cell; failures are recorded rows-apart.

    With ``jobs > 1`` the samples run on a process pool; the output is
    sorted and seed derivation is cell-local, so parallelism never changes
    a row.
    """
    started = time.monotonic()
    tasks = [
        (config, temperature, beta, sample)
        for temperature in config.temperatures
        for beta in config.betas
        for sample in range(config.samples)
    ]
    results = SweepResults(config=config)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = pool.map(_run_sample, tasks, chunksize=1)
            for done, (kind, payload) in enumerate(outcomes, start=1):
                _record(results, kind, payload)
                if progress:
                    progress(done, len(tasks))
    else:
        for done, task in enumerate(tasks, start=1):
            kind, payload = _run_sample(task)
            _record(results, kind, payload)
            if progress:
                progress(done, len(tasks))
    results.rows.sort(key=lambda r: (r.temperature, _beta_sort_key(r.beta), r.sample))
    results.errors.sort(key=lambda e: (e[0], _beta_sort_key(e[1]), e[2]))
    results.elapsed_seconds = time.monotonic() - started
    return results


def _record(results: SweepResults, kind: str, payload) -> None:
    if kind == "ok":
        results.rows.append(payload)
    else:
        results.errors.append(payload)


def _format_beta(beta: float) -> str:
    return "inf" if math.isinf(beta) else f"{beta:.6g}"


def write_csv(results: SweepResults, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER.split(","))
        for row in results.rows:
            writer.writerow(
                [
                    f"{row.temperature:.6g}",
                    _format_beta(row.beta),
                    row.sample,
                    row.seed,
                    row.n_stations_lcc,
                    f"{row.ratio_lcc:.6g}",
                    f"{row.delta_s_lcc:.6g}",
                    f"{row.kappa:.6g}",
                    f"{row.beta_hat:.6g}",
                    f"{row.ks:.6g}",
                    f"{row.two_core_frac:.6g}",
                    f"{row.core_frac:.6g}",
                ]
            )


def _plot_clustering(results: SweepResults, path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    kappa = results.cell_mean("kappa")
    fig, ax = plt.subplots(figsize=(6, 4))
    for beta in sorted(set(results.config.betas), key=_beta_sort_key):
        xs = sorted({t for (t, b) in kappa if b == beta})
        ys = [kappa[(t, beta)] for t in xs]
        ax.plot(xs, ys, marker="o", markersize=3, label=f"beta = {_format_beta(beta)}")
    ax.set_xlabel("temperature T")
    ax.set_ylabel("mean bipartite clustering")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _plot_core_heatmap(results: SweepResults, path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    core = results.cell_mean("core_frac")
    temperatures = sorted({t for (t, _) in core})
    betas = sorted({b for (_, b) in core}, key=_beta_sort_key)
    grid = np.full((len(betas), len(temperatures)), np.nan)
    for (t, b), value in core.items():
        grid[betas.index(b), temperatures.index(t)] = value
    fig, ax = plt.subplots(figsize=(6, 4))
    image = ax.imshow(grid, origin="lower", aspect="auto", vmin=0.0, cmap="viridis")
    ax.set_xticks(range(len(temperatures)), [f"{t:g}" for t in temperatures], fontsize=7)
    ax.set_yticks(range(len(betas)), [_format_beta(b) for b in betas], fontsize=7)
    ax.set_xlabel("temperature T")
    ax.set_ylabel("beta")
    fig.colorbar(image, ax=ax, label="mean relative core complexity")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def write_results(results: SweepResults, out_dir, figures: bool = True) -> list[Path]:
    """Write sweep.csv plus the two figures; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / "sweep.csv"]
    write_csv(results, paths[0])
    if figures and results.rows:
        clustering_path = out / "clustering_vs_temperature.svg"
        heatmap_path = out / "core_complexity_heatmap.svg"
        _plot_clustering(results, clustering_path)
        _plot_core_heatmap(results, heatmap_path)
        paths += [clustering_path, heatmap_path]
    return paths
