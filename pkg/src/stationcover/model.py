"""Core data model for station cover / hitting set instances.

An instance is a universe of stations plus a list of connections, each an
ordered sequence of distinct stations.  All hitting-set operations treat
connections as plain sets; the sequence order is kept because the graph view
needs it.  Duplicate connections (equal as sets) are retained here and only
disappear through the dominance reduction rules.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence


class ModelError(ValueError):
    """Raised for malformed instances or unparseable instance files."""


@dataclass(frozen=True)
class Instance:
    """Immutable station cover instance.

    Stations are opaque string tokens with a total (lexicographic) order;
    every tie-break in the package uses this order.  Connections keep the
    sequence order they were built with.
    """

    stations: frozenset[str]
    connections: tuple[tuple[str, ...], ...]

    @cached_property
    def connection_sets(self) -> tuple[frozenset[str], ...]:
        return tuple(frozenset(c) for c in self.connections)

    @cached_property
    def incidence(self) -> Mapping[str, tuple[int, ...]]:
        """Station -> indices of the connections containing it."""
        inc: dict[str, list[int]] = {s: [] for s in self.stations}
        for j, conn in enumerate(self.connections):
            for s in conn:
                inc[s].append(j)
        return {s: tuple(js) for s, js in inc.items()}

    @property
    def n_stations(self) -> int:
        return len(self.stations)

    @property
    def n_connections(self) -> int:
        return len(self.connections)

    def is_empty(self) -> bool:
        return not self.stations

    def sorted_stations(self) -> list[str]:
        return sorted(self.stations)


@dataclass(frozen=True)
class DegreeStats:
    """Degree statistics of an instance.

    ``delta_s`` is the mean number of connections per station, ``delta_c``
    the mean number of stations per connection, and ``ratio`` the
    station-connection ratio.  The handshake identity
    ``delta_c * |C| == delta_s * |S|`` holds exactly.
    """

    station_degrees: Mapping[str, int]
    connection_degrees: tuple[int, ...]
    delta_s: float
    delta_c: float
    ratio: float


def build_instance(
    stations: Iterable[str] | None,
    connections: Iterable[Sequence[str]],
) -> Instance:
    """Build a normalized instance.

    Repeated stations within one connection are collapsed to their first
    occurrence (order preserved).  When ``stations`` is given explicitly it
    must cover every station referenced by a connection; extra entries become
    isolated stations.  With ``stations=None`` the station set is inferred.
    """
    normalized: list[tuple[str, ...]] = []
    referenced: set[str] = set()
    for k, conn in enumerate(connections):
        seen: set[str] = set()
        seq: list[str] = []
        for s in conn:
            if not isinstance(s, str) or not s:
                raise ModelError(f"connection {k}: station tokens must be non-empty strings")
            if s not in seen:
                seen.add(s)
                seq.append(s)
        if not seq:
            raise ModelError(f"connection {k}: empty connection")
        normalized.append(tuple(seq))
        referenced |= seen

    if stations is None:
        station_set = frozenset(referenced)
    else:
        station_set = frozenset(stations)
        for s in station_set:
            if not isinstance(s, str) or not s:
                raise ModelError("station tokens must be non-empty strings")
        unknown = referenced - station_set
        if unknown:
            raise ModelError(f"connections reference unknown stations: {sorted(unknown)[:5]}")
    return Instance(stations=station_set, connections=tuple(normalized))


def connected_components(instance: Instance) -> list[Instance]:
    """Split an instance into its connected components.

    Two stations are connected when they can be linked by a chain of shared
    connections.  Stations in no connection form singleton components.  The
    result is sorted by descending station count, ties broken by the smallest
    station token of the component.
    """
    parent: dict[str, str] = {s: s for s in instance.stations}

    def find(x: str) -> str:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(a: str, b: str) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    for conn in instance.connections:
        first = conn[0]
        for s in conn[1:]:
            union(first, s)

    groups: dict[str, set[str]] = {}
    for s in instance.stations:
        groups.setdefault(find(s), set()).add(s)

    conns_of: dict[str, list[tuple[str, ...]]] = {root: [] for root in groups}
    for conn in instance.connections:
        conns_of[find(conn[0])].append(conn)

    parts = [
        Instance(stations=frozenset(members), connections=tuple(conns_of[root]))
        for root, members in groups.items()
    ]
    parts.sort(key=lambda p: (-p.n_stations, min(p.stations)))
    return parts


def largest_component(instance: Instance) -> Instance:
    if instance.is_empty():
        raise ModelError("empty instance has no components")
    return connected_components(instance)[0]


def degree_stats(instance: Instance) -> DegreeStats:
    if instance.is_empty():
        raise ModelError("degree statistics of an empty instance are undefined")
    station_degrees = {s: 0 for s in instance.stations}
    for conn in instance.connections:
        for s in conn:
            station_degrees[s] += 1
    connection_degrees = tuple(len(c) for c in instance.connections)
    pairs = sum(connection_degrees)
    n, m = instance.n_stations, instance.n_connections
    delta_s = pairs / n
    delta_c = pairs / m if m else 0.0
    ratio = n / m if m else float("inf")
    return DegreeStats(
        station_degrees=station_degrees,
        connection_degrees=connection_degrees,
        delta_s=delta_s,
        delta_c=delta_c,
        ratio=ratio,
    )


# Plain-text interchange format: one connection per line, tokens separated by
# whitespace, '#' starts a comment.  Isolated stations are recorded in a
# dedicated comment directive so that write/read round-trips exactly.
_ISOLATED_RE = re.compile(r"^#\s*isolated:\s*(.*)$")


def read_hsd(text: str) -> Instance:
    """Parse the plain-text instance format."""
    connections: list[tuple[str, ...]] = []
    isolated: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("#"):
            m = _ISOLATED_RE.match(line)
            if m:
                isolated.update(m.group(1).split())
            continue
        tokens = line.split()
        if not tokens:
            raise ModelError(f"line {lineno}: empty connection")
        connections.append(tuple(tokens))
    referenced = {s for conn in connections for s in conn}
    return build_instance(referenced | isolated, connections)


def write_hsd(instance: Instance) -> str:
    """Serialize an instance; inverse of :func:`read_hsd` up to normalization."""
    lines = [" ".join(conn) for conn in instance.connections]
    covered = {s for conn in instance.connections for s in conn}
    isolated = sorted(instance.stations - covered)
    if isolated:
        lines.append("# isolated: " + " ".join(isolated))
    return "\n".join(lines) + ("\n" if lines else "")


def load_hsd(path) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        return read_hsd(fh.read())


def save_hsd(instance: Instance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_hsd(instance))
