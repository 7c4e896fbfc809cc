"""Graph view of an instance: 2-cores, instance constructions, SAT encoding.

The graph of an instance has the stations as vertices and an edge for each
pair of consecutive stations in a connection.  The operations here probe how
little that graph determines about the reduction rules: two constructions
realize the same graph with a fully reducible and an irreducible instance,
and a 3-CNF encoder produces hard instances whose graphs are nearly trees.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .model import Instance, ModelError, build_instance
from .reduce import reduce_to_core


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph; edges are normalized (u < v) token pairs."""

    vertices: frozenset[str]
    edges: frozenset[tuple[str, str]]

    def adjacency(self) -> dict[str, list[str]]:
        adj: dict[str, list[str]] = {v: [] for v in self.vertices}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        for nbrs in adj.values():
            nbrs.sort()
        return adj


def make_graph(vertices: Iterable[str], edges: Iterable[tuple[str, str]]) -> Graph:
    vset = set(vertices)
    eset: set[tuple[str, str]] = set()
    for u, v in edges:
        if u == v:
            raise ModelError(f"self-loop at {u!r}")
        vset.add(u)
        vset.add(v)
        eset.add((u, v) if u < v else (v, u))
    return Graph(vertices=frozenset(vset), edges=frozenset(eset))


def to_graph(instance: Instance) -> Graph:
    edges: set[tuple[str, str]] = set()
    for conn in instance.connections:
        for a, b in zip(conn, conn[1:]):
            edges.add((a, b) if a < b else (b, a))
    return Graph(vertices=instance.stations, edges=frozenset(edges))


def two_core(graph: Graph) -> Graph:
    """Maximal subgraph of minimum degree 2: the fixpoint of leaf removal."""
    adj = {v: set(nbrs) for v, nbrs in graph.adjacency().items()}
    queue = [v for v, nbrs in adj.items() if len(nbrs) <= 1]
    alive = set(adj)
    while queue:
        v = queue.pop()
        if v not in alive:
            continue
        alive.discard(v)
        for u in adj[v]:
            adj[u].discard(v)
            if u in alive and len(adj[u]) <= 1:
                queue.append(u)
        adj[v].clear()
    edges = frozenset(e for e in graph.edges if e[0] in alive and e[1] in alive)
    return Graph(vertices=frozenset(alive), edges=edges)


def connected_vertex_sets(graph: Graph) -> list[set[str]]:
    adj = graph.adjacency()
    seen: set[str] = set()
    parts: list[set[str]] = []
    for start in sorted(graph.vertices):
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if u not in comp:
                    comp.add(u)
                    stack.append(u)
        seen |= comp
        parts.append(comp)
    parts.sort(key=lambda c: (-len(c), min(c)))
    return parts


def check_two_core_containment(instance: Instance) -> bool:
    """Check that the core keeps no neighbor structure beyond the 2-core.

    After exhaustive dominance reduction, the stations that still have a
    consecutive neighbor in some core connection live inside the 2-core of
    the original instance's graph; stations surviving only in single-station
    connections may lie outside it.  The core is unique only up to swapping
    stations with identical incidence, and such twins need not agree on
    2-core membership, so membership is checked up to the twin relation plus
    the (automorphism-invariant) count bound.  Station removals can splice
    sequences, so core edges need not be original edges; their endpoints are
    what never escapes the 2-core.
    """
    core = reduce_to_core(instance).core
    core_graph = to_graph(core)
    allowed = two_core(to_graph(instance)).vertices
    non_isolated = {v for e in core_graph.edges for v in e}
    if len(non_isolated) > len(allowed):
        return False
    incidence = {s: frozenset(instance.incidence[s]) for s in instance.stations}
    twins: dict[frozenset[int], set[str]] = {}
    for s, key in incidence.items():
        twins.setdefault(key, set()).add(s)
    return all(
        s in allowed or any(t in allowed for t in twins[incidence[s]]) for s in non_isolated
    )


def _bfs(adj: dict[str, list[str]], source: str) -> tuple[dict[str, int], dict[str, str]]:
    dist = {source: 0}
    parent: dict[str, str] = {}
    frontier = [source]
    while frontier:
        nxt: list[str] = []
        for v in frontier:
            for u in adj[v]:
                if u not in dist:
                    dist[u] = dist[v] + 1
                    parent[u] = v
                    nxt.append(u)
        frontier = nxt
    return dist, parent


def _path_from(parent: dict[str, str], source: str, target: str) -> list[str]:
    path = [target]
    while path[-1] != source:
        path.append(parent[path[-1]])
    path.reverse()
    return path


def build_n1(graph: Graph, designated_station: str | None = None) -> Instance:
    """Instance on the given graph whose core collapses to one station per component.

    Per component a designated station is placed on every connection: for
    each edge, the connection is the shortest path from the designated
    station to the edge's nearer endpoint, extended by the other endpoint.
    """
    if designated_station is not None and designated_station not in graph.vertices:
        raise ModelError(f"designated station {designated_station!r} is not a vertex")
    adj = graph.adjacency()
    connections: list[tuple[str, ...]] = []
    for comp in connected_vertex_sets(graph):
        if designated_station in comp:
            s = designated_station
        else:
            s = min(comp)
        dist, parent = _bfs(adj, s)
        comp_edges = sorted(e for e in graph.edges if e[0] in comp)
        for u, v in comp_edges:
            near, far = (u, v) if (dist[u], u) <= (dist[v], v) else (v, u)
            path = _path_from(parent, s, near)
            path.append(far)
            connections.append(tuple(path))
    return build_instance(graph.vertices, connections)


def build_n2(graph: Graph) -> Instance:
    """Instance on the given graph whose core is exactly the graph's 2-core.

    Every 2-core edge becomes a two-station connection.  Every vertex hanging
    off the 2-core gets one connection: its unique tree path to the 2-core,
    extended by the anchor's smallest 2-core neighbor, so that exactly one
    2-core edge is included.  Components without a cycle are rejected.
    """
    core_vertices = two_core(graph).vertices
    adj = graph.adjacency()
    for comp in connected_vertex_sets(graph):
        if not (comp & core_vertices):
            raise ModelError(f"component containing {min(comp)!r} has an empty 2-core")

    connections: list[tuple[str, ...]] = [
        e for e in sorted(graph.edges) if e[0] in core_vertices and e[1] in core_vertices
    ]
    for s in sorted(graph.vertices - core_vertices):
        # BFS through non-core vertices; the attachment to the 2-core is a
        # single edge, so exactly one anchor is reachable.
        parent: dict[str, str] = {}
        seen = {s}
        frontier = [s]
        anchor: str | None = None
        while frontier and anchor is None:
            nxt: list[str] = []
            for v in frontier:
                for u in adj[v]:
                    if u in seen:
                        continue
                    parent[u] = v
                    if u in core_vertices:
                        anchor = u
                        break
                    seen.add(u)
                    nxt.append(u)
                if anchor is not None:
                    break
            frontier = nxt
        assert anchor is not None
        path = _path_from(parent, s, anchor)
        extend = min(u for u in adj[anchor] if u in core_vertices)
        path.append(extend)
        connections.append(tuple(path))
    return build_instance(graph.vertices, connections)


@dataclass(frozen=True)
class Formula3Sat:
    """3-CNF formula; clauses are triples of signed 1-based variable indices."""

    n_variables: int
    clauses: tuple[tuple[int, int, int], ...]

    def __post_init__(self) -> None:
        if self.n_variables < 1:
            raise ModelError("formula needs at least one variable")
        for clause in self.clauses:
            if len(clause) != 3:
                raise ModelError(f"clause {clause} does not have exactly 3 literals")
            for lit in clause:
                if lit == 0 or abs(lit) > self.n_variables:
                    raise ModelError(f"literal {lit} out of range in clause {clause}")


def literal_token(lit: int) -> str:
    return f"p{lit}" if lit > 0 else f"n{-lit}"


HUB_TOKENS = ("z0", "z1")


def encode_3sat(formula: Formula3Sat) -> tuple[Instance, Graph]:
    """Encode satisfiability as a station cover instance.

    One two-station connection per variable (its two literals) and one
    five-station connection per clause, threading the clause literals through
    the two hub stations.  The formula is satisfiable exactly when the
    minimum cover has one station per variable.
    """
    z0, z1 = HUB_TOKENS
    stations = {z0, z1}
    connections: list[tuple[str, ...]] = []
    for i in range(1, formula.n_variables + 1):
        stations.add(literal_token(i))
        stations.add(literal_token(-i))
        connections.append((literal_token(i), literal_token(-i)))
    for a, b, c in formula.clauses:
        connections.append((literal_token(a), z0, literal_token(b), z1, literal_token(c)))
    instance = build_instance(stations, connections)
    return instance, to_graph(instance)


def is_acyclic(graph: Graph, removed: Iterable[str] = ()) -> bool:
    """True when the graph minus the given vertices contains no cycle."""
    gone = set(removed)
    parent: dict[str, str] = {v: v for v in graph.vertices if v not in gone}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in graph.edges:
        if u in gone or v in gone:
            continue
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


def is_valid_path_decomposition(graph: Graph, bags: Sequence[set[str]]) -> bool:
    """Validity of a path-shaped tree decomposition.

    Checks vertex coverage, edge coverage, and that each vertex occupies a
    contiguous run of bags.
    """
    covered = set().union(*bags) if bags else set()
    if not (graph.vertices <= covered):
        return False
    for u, v in graph.edges:
        if not any(u in bag and v in bag for bag in bags):
            return False
    for v in graph.vertices:
        positions = [i for i, bag in enumerate(bags) if v in bag]
        if positions[-1] - positions[0] + 1 != len(positions):
            return False
    return True


def decomposition_width(bags: Sequence[set[str]]) -> int:
    return max(len(bag) for bag in bags) - 1


_LIT_TOKEN = re.compile(r"^[pn](\d+)$")


def verify_structure_witnesses(graph: Graph) -> bool:
    """Structural certificates for an encoded formula's graph.

    Confirms that removing the two hub stations leaves an acyclic graph
    (feedback vertex number at most 2) and that the per-variable bags of
    both literals plus both hubs form a valid path decomposition of width 3.
    """
    variables: set[int] = set()
    for v in graph.vertices:
        m = _LIT_TOKEN.match(v)
        if m:
            variables.add(int(m.group(1)))
        elif v not in HUB_TOKENS:
            return False
    if not variables:
        return False
    if not is_acyclic(graph, removed=HUB_TOKENS):
        return False
    z0, z1 = HUB_TOKENS
    bags = [{literal_token(i), literal_token(-i), z0, z1} for i in sorted(variables)]
    return is_valid_path_decomposition(graph, bags) and decomposition_width(bags) == 3


def read_edge_list(text: str) -> Graph:
    """Parse a plain edge list: one ``u v`` pair per line, ``#`` comments."""
    edges: list[tuple[str, str]] = []
    vertices: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) == 1:
            vertices.add(tokens[0])
            continue
        if len(tokens) != 2:
            raise ModelError(f"line {lineno}: expected 'u v', got {line!r}")
        edges.append((tokens[0], tokens[1]))
    return make_graph(vertices, edges)


def read_dimacs(text: str) -> Formula3Sat:
    """Parse a DIMACS CNF file; every clause must have exactly three literals."""
    n_variables: int | None = None
    n_clauses: int | None = None
    literals: list[int] = []
    clauses: list[tuple[int, int, int]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ModelError(f"malformed problem line: {line!r}")
            n_variables, n_clauses = int(parts[2]), int(parts[3])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                if len(literals) != 3:
                    raise ModelError(f"clause {tuple(literals)} does not have exactly 3 literals")
                clauses.append((literals[0], literals[1], literals[2]))
                literals = []
            else:
                literals.append(lit)
    if literals:
        raise ModelError("unterminated clause at end of input")
    if n_variables is None:
        raise ModelError("missing 'p cnf' problem line")
    if n_clauses is not None and n_clauses != len(clauses):
        raise ModelError(f"header announces {n_clauses} clauses, found {len(clauses)}")
    return Formula3Sat(n_variables=n_variables, clauses=tuple(clauses))
