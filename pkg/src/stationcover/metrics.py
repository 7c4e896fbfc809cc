"""Heterogeneity and locality measurements.

Heterogeneity is captured by a discrete power-law fit of the station degrees
(maximum-likelihood exponent, lower cutoff chosen by Kolmogorov-Smirnov
distance).  Locality is captured by the bipartite clustering coefficient of
the station-connection incidence graph, normalized to its 2-core so attached
trees do not wash the signal out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import zeta

from .graphview import to_graph, two_core
from .model import Instance, degree_stats
from .reduce import reduce_to_core


class MetricsError(ValueError):
    pass


def ccdf(degrees) -> list[tuple[int, float]]:
    """Share of samples with value at least x, for each distinct observed x."""
    data = sorted(degrees)
    if not data:
        raise MetricsError("empty degree list")
    n = len(data)
    out: list[tuple[int, float]] = []
    for i, value in enumerate(data):
        if i == 0 or value != data[i - 1]:
            out.append((value, (n - i) / n))
    return out


@dataclass(frozen=True)
class PowerLawFit:
    beta: float
    xmin: int
    ks: float
    n_tail: int


_BETA_BOUNDS = (1.0001, 25.0)
MIN_TAIL = 10


def _mle_exponent(tail: np.ndarray, xmin: int) -> float:
    log_sum = float(np.log(tail).sum())
    n = len(tail)

    def nll(beta: float) -> float:
        return beta * log_sum + n * math.log(zeta(beta, xmin))

    result = minimize_scalar(nll, bounds=_BETA_BOUNDS, method="bounded")
    return float(result.x)


def _ks_distance(tail: np.ndarray, beta: float, xmin: int) -> float:
    xmax = int(tail.max())
    xs = np.arange(xmin, xmax + 2)
    model = zeta(beta, xs) / zeta(beta, xmin)
    sorted_tail = np.sort(tail)
    empirical = 1.0 - np.searchsorted(sorted_tail, xs, side="left") / len(tail)
    return float(np.abs(empirical - model).max())


def fit_power_law(degrees, min_tail: int = MIN_TAIL) -> PowerLawFit:
    """Discrete maximum-likelihood power-law fit with a scanned lower cutoff.

    For every candidate cutoff (each distinct positive degree whose tail
    keeps at least ``min_tail`` samples) the exponent is fitted by maximizing
    the zeta-normalized likelihood; the cutoff with the smallest KS distance
    between empirical and fitted tail CCDF wins.  Zero degrees never enter a
    tail.  Raises on degenerate input (fewer than two distinct positive
    values).
    """
    data = np.asarray(list(degrees), dtype=np.int64)
    if data.size == 0 or (data < 0).any():
        raise MetricsError("degrees must be non-negative integers")
    positive = np.sort(data[data > 0])
    distinct = np.unique(positive)
    if distinct.size < 2:
        raise MetricsError("no tail: degree distribution is degenerate")
    candidates = [int(x) for x in distinct if (positive >= x).sum() >= min_tail]
    if not candidates:
        candidates = [int(distinct[0])]
    best: PowerLawFit | None = None
    for xmin in candidates:
        tail = positive[positive >= xmin]
        beta = _mle_exponent(tail, xmin)
        ks = _ks_distance(tail, beta, xmin)
        if best is None or ks < best.ks:
            best = PowerLawFit(beta=beta, xmin=xmin, ks=ks, n_tail=int(tail.size))
    assert best is not None
    return best


@dataclass(frozen=True)
class ClusteringResult:
    """Bipartite clustering coefficient with its raw path/cycle counts.

    ``defined`` is False when the 2-core of the incidence graph has no
    3-path, in which case ``kappa`` is reported as 0: the reduction rules
    alone already dismantle such an instance, so locality is moot.
    """

    kappa: float
    defined: bool
    n_paths: int
    n_cycles: int


def bipartite_clustering(instance: Instance) -> ClusteringResult:
    """4 * (#4-cycles) / (#3-paths) in the 2-core of the incidence graph.

    3-paths are counted per middle edge as (deg(s)-1)*(deg(c)-1); 4-cycles
    per station pair as C(shared connections, 2).  Duplicate connections are
    distinct incidence nodes.
    """
    station_adj: dict[str, set[int]] = {s: set() for s in instance.stations}
    conn_adj: list[set[str]] = []
    for j, members in enumerate(instance.connection_sets):
        conn_adj.append(set(members))
        for s in members:
            station_adj[s].add(j)

    # Peel to the 2-core of the bipartite graph.
    queue: list[tuple[bool, object]] = [
        (True, s) for s, js in station_adj.items() if len(js) <= 1
    ]
    queue += [(False, j) for j, ss in enumerate(conn_adj) if len(ss) <= 1]
    alive_stations = set(station_adj)
    alive_conns = set(range(len(conn_adj)))
    while queue:
        is_station, node = queue.pop()
        if is_station:
            if node not in alive_stations:
                continue
            alive_stations.discard(node)
            for j in station_adj[node]:
                conn_adj[j].discard(node)
                if j in alive_conns and len(conn_adj[j]) <= 1:
                    queue.append((False, j))
            station_adj[node].clear()
        else:
            if node not in alive_conns:
                continue
            alive_conns.discard(node)
            for s in conn_adj[node]:
                station_adj[s].discard(node)
                if s in alive_stations and len(station_adj[s]) <= 1:
                    queue.append((True, s))
            conn_adj[node].clear()

    n_paths = 0
    for s in alive_stations:
        ds = len(station_adj[s])
        for j in station_adj[s]:
            n_paths += (ds - 1) * (len(conn_adj[j]) - 1)

    shared: dict[tuple[str, str], int] = {}
    for j in alive_conns:
        members = sorted(conn_adj[j])
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                pair = (members[a], members[b])
                shared[pair] = shared.get(pair, 0) + 1
    n_cycles = sum(k * (k - 1) // 2 for k in shared.values())

    if n_paths == 0:
        return ClusteringResult(kappa=0.0, defined=False, n_paths=0, n_cycles=0)
    return ClusteringResult(
        kappa=4.0 * n_cycles / n_paths, defined=True, n_paths=n_paths, n_cycles=n_cycles
    )


@dataclass(frozen=True)
class MetricsReport:
    """One summary row per instance, in the canonical column order.

    ``core_complexity`` (the largest core component's station count, i.e.
    the brute-force work the reduction leaves behind) rides along for
    diagnostics but is not part of the tabular columns.
    """

    n_stations: int
    station_connection_ratio: float
    delta_s: float
    beta_hat: float
    ks: float
    kappa: float
    kappa_defined: bool
    two_core_fraction: float
    core_fraction: float
    core_complexity: int

    CSV_HEADER = "n_stations,ratio,delta_s,beta_hat,ks,kappa,two_core_frac,core_frac"

    def csv_row(self) -> str:
        return ",".join(
            [
                str(self.n_stations),
                f"{self.station_connection_ratio:.6g}",
                f"{self.delta_s:.6g}",
                f"{self.beta_hat:.6g}",
                f"{self.ks:.6g}",
                f"{self.kappa:.6g}",
                f"{self.two_core_fraction:.6g}",
                f"{self.core_fraction:.6g}",
            ]
        )


def metrics_report(instance: Instance) -> MetricsReport:
    """Assemble the full per-instance summary (best run on one component).

    A degenerate degree distribution yields NaN for the power-law columns
    instead of failing the whole report.
    """
    if instance.is_empty():
        raise MetricsError("cannot report on an empty instance")
    stats = degree_stats(instance)
    degrees = list(stats.station_degrees.values())
    try:
        fit = fit_power_law(degrees)
        beta_hat, ks = fit.beta, fit.ks
    except MetricsError:
        beta_hat, ks = float("nan"), float("nan")
    clustering = bipartite_clustering(instance)
    graph = to_graph(instance)
    core_vertices = two_core(graph).vertices
    reduction = reduce_to_core(instance)
    return MetricsReport(
        n_stations=instance.n_stations,
        station_connection_ratio=stats.ratio,
        delta_s=stats.delta_s,
        beta_hat=beta_hat,
        ks=ks,
        kappa=clustering.kappa,
        kappa_defined=clustering.defined,
        two_core_fraction=len(core_vertices) / instance.n_stations,
        core_fraction=reduction.relative_core_complexity,
        core_complexity=reduction.complexity,
    )
