"""Dominance reduction rules and the core of an instance.

Two rules are applied to a fixpoint:

* a station is removable when another station occurs in every connection
  that contains it (the other station is never a worse pick);
* a connection is removable when another connection is a subset of it
  (hitting the subset hits the superset).

The surviving instance, the core, has a station/connection count that does
not depend on the removal order.  Mutual dominance (identical incidence or
equal connection sets) is broken deterministically by removing the larger
station token, respectively the later connection.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .model import Instance, connected_components


@dataclass(frozen=True)
class ReductionReport:
    """Outcome of running the reduction rules to a fixpoint.

    ``removed_stations`` and ``removed_connections`` record each removal in
    order together with its dominating witness.  ``complexity`` is the
    maximum station count over the core's connected components;
    ``relative_core_complexity`` is the fraction of input stations that
    survived.  ``relative_two_core_size`` is filled in by the graph view
    (it needs the graph of the original instance) and stays ``None`` here.
    """

    core: Instance
    removed_stations: tuple[tuple[str, str], ...]
    removed_connections: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...]
    complexity: int
    relative_core_complexity: float
    relative_two_core_size: float | None = None

    def with_two_core_size(self, fraction: float) -> "ReductionReport":
        return replace(self, relative_two_core_size=fraction)


def reduce_to_core(instance: Instance) -> ReductionReport:
    """Apply both dominance rules until neither applies; return the core.

    Alternates full station passes and connection passes.  Incidence is kept
    as bitsets (one integer per station over connection indices, one per
    connection over station indices) so the subset tests are word-parallel;
    dominators are only searched among co-members of a smallest containing
    connection, which is where they must sit.
    """
    tokens = sorted(instance.stations)
    index_of = {s: i for i, s in enumerate(tokens)}
    n = len(tokens)
    m = len(instance.connections)

    # conn_members[j]: bitmask of station indices; st_conns[i]: bitmask of
    # connection indices.  Both only ever contain alive elements.
    conn_members = [0] * m
    st_conns = [0] * n
    for j, conn in enumerate(instance.connections):
        mask = 0
        for s in conn:
            i = index_of[s]
            mask |= 1 << i
            st_conns[i] |= 1 << j
        conn_members[j] = mask

    alive_stations = set(range(n))
    alive_conns = set(range(m))
    removed_stations: list[tuple[str, str]] = []
    removed_connections: list[tuple[tuple[str, ...], tuple[str, ...]]] = []

    def bits(mask: int):
        while mask:
            low = mask & -mask
            yield low.bit_length() - 1
            mask ^= low

    def remove_station(i: int, witness: int) -> None:
        alive_stations.discard(i)
        removed_stations.append((tokens[i], tokens[witness]))
        bit = 1 << i
        for j in bits(st_conns[i]):
            conn_members[j] &= ~bit
        st_conns[i] = 0

    def remove_connection(j: int, witness: int) -> None:
        alive_conns.discard(j)
        removed_connections.append((instance.connections[j], instance.connections[witness]))
        bit = 1 << j
        for i in bits(conn_members[j]):
            st_conns[i] &= ~bit
        conn_members[j] = 0

    def station_pass() -> bool:
        changed = False
        order = sorted(alive_stations)
        for i in order:
            mask = st_conns[i]
            if mask == 0:
                # In no connection: any other station dominates vacuously;
                # among mutually isolated stations keep the smallest token.
                witness = next(
                    (
                        k
                        for k in order
                        if k != i and k in alive_stations and (st_conns[k] or k < i)
                    ),
                    None,
                )
                if witness is not None:
                    remove_station(i, witness)
                    changed = True
                continue
            smallest = min(bits(mask), key=lambda j: conn_members[j].bit_count())
            deg = mask.bit_count()
            for k in sorted(bits(conn_members[smallest])):
                if k == i:
                    continue
                other = st_conns[k]
                if other.bit_count() < deg:
                    continue
                if mask & ~other == 0 and (other != mask or k < i):
                    remove_station(i, k)
                    changed = True
                    break
        return changed

    def connection_pass() -> bool:
        changed = False
        for j in sorted(alive_conns):
            if j not in alive_conns:
                continue
            members = conn_members[j]
            supersets = ~0
            for i in bits(members):
                supersets &= st_conns[i]
            for k in bits(supersets):
                if k == j:
                    continue
                if conn_members[k] != members or k > j:
                    remove_connection(k, j)
                    changed = True
        return changed

    while True:
        changed = station_pass()
        changed |= connection_pass()
        if not changed:
            break

    core_connections = tuple(
        tuple(s for s in instance.connections[j] if index_of[s] in alive_stations)
        for j in sorted(alive_conns)
    )
    core = Instance(
        stations=frozenset(tokens[i] for i in alive_stations),
        connections=core_connections,
    )
    complexity = max((c.n_stations for c in connected_components(core)), default=0)
    relative = core.n_stations / instance.n_stations if instance.n_stations else 0.0
    return ReductionReport(
        core=core,
        removed_stations=tuple(removed_stations),
        removed_connections=tuple(removed_connections),
        complexity=complexity,
        relative_core_complexity=relative,
    )


def complexity_stats(core: Instance, original: Instance) -> tuple[int, float]:
    """(max component station count of the core, surviving-station fraction).

    The fraction uses the station count of the original's largest component
    as denominator, matching how instances are reported after being trimmed
    to their largest component.
    """
    if core.is_empty():
        return 0, 0.0
    complexity = max(c.n_stations for c in connected_components(core))
    if original.is_empty():
        return complexity, 0.0
    denom = max(c.n_stations for c in connected_components(original))
    return complexity, core.n_stations / denom
