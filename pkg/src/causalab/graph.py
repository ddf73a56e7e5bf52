"""Graph model for DAGs and CPDAGs.

A graph is a fixed, ordered node list plus an edge-mark matrix. Mark
``ARROW`` at (i, j) means the directed edge i -> j; ``LINE`` means an
undirected edge and is stored symmetrically. The node order is canonical
(dataset column order) and every algorithm iterates in it, so results
are deterministic. Graphs are immutable: edit helpers return new graphs.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import NotADag, SchemaViolation, UnknownNode

NO_EDGE = 0
ARROW = 1   # mark(i, j) == ARROW  <=>  i -> j
LINE = 2    # stored at both (i, j) and (j, i)

Edge = tuple[str, str]


@dataclass(frozen=True)
class Cycle:
    """A directed simple cycle; the closing edge back to nodes[0] is implied."""

    nodes: tuple[str, ...]

    def __str__(self) -> str:
        return " -> ".join(self.nodes + (self.nodes[0],))


class CausalGraph:
    """DAG / CPDAG over a canonical node order."""

    __slots__ = ("nodes", "_index", "_marks")

    def __init__(
        self,
        nodes: Sequence[str],
        directed: Iterable[Edge] = (),
        undirected: Iterable[Edge] = (),
    ):
        nodes = tuple(nodes)
        if len(set(nodes)) != len(nodes):
            raise SchemaViolation("duplicate node names")
        if any(not n for n in nodes):
            raise SchemaViolation("empty node name")
        self.nodes = nodes
        self._index = {n: i for i, n in enumerate(nodes)}
        n = len(nodes)
        self._marks = [[NO_EDGE] * n for _ in range(n)]
        # opposite directed marks may coexist (a 2-cycle awaiting repair);
        # a directed mark may not share a pair with an undirected one
        for a, b in directed:
            i, j = self._idx(a), self._idx(b)
            if i == j:
                raise SchemaViolation(f"self-loop on {a!r}")
            if self._marks[i][j] != NO_EDGE or self._marks[j][i] == LINE:
                raise SchemaViolation(f"conflicting marks on edge ({a!r}, {b!r})")
            self._marks[i][j] = ARROW
        for a, b in undirected:
            i, j = self._idx(a), self._idx(b)
            if i == j:
                raise SchemaViolation(f"self-loop on {a!r}")
            if self._marks[i][j] != NO_EDGE or self._marks[j][i] != NO_EDGE:
                raise SchemaViolation(f"conflicting marks on edge ({a!r}, {b!r})")
            self._marks[i][j] = LINE
            self._marks[j][i] = LINE

    # -- basics ------------------------------------------------------------

    def _idx(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownNode(f"unknown node {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CausalGraph):
            return NotImplemented
        return self.nodes == other.nodes and self._marks == other._marks

    def __hash__(self):  # pragma: no cover - not used as dict key
        return hash((self.nodes, tuple(map(tuple, self._marks))))

    def __repr__(self) -> str:
        d = ", ".join(f"{a}->{b}" for a, b in self.directed_edges())
        u = ", ".join(f"{a}--{b}" for a, b in self.undirected_edges())
        return f"CausalGraph([{', '.join(self.nodes)}]; {d}; {u})"

    def mark(self, a: str, b: str) -> int:
        return self._marks[self._idx(a)][self._idx(b)]

    def directed_edges(self) -> list[Edge]:
        out = []
        for i, row in enumerate(self._marks):
            for j, m in enumerate(row):
                if m == ARROW:
                    out.append((self.nodes[i], self.nodes[j]))
        return out

    def undirected_edges(self) -> list[Edge]:
        out = []
        n = len(self.nodes)
        for i in range(n):
            for j in range(i + 1, n):
                if self._marks[i][j] == LINE:
                    out.append((self.nodes[i], self.nodes[j]))
        return out

    def edge_count(self) -> int:
        return len(self.directed_edges()) + len(self.undirected_edges())

    def parents(self, name: str) -> tuple[str, ...]:
        j = self._idx(name)
        return tuple(self.nodes[i] for i in range(len(self.nodes))
                     if self._marks[i][j] == ARROW)

    def children(self, name: str) -> tuple[str, ...]:
        i = self._idx(name)
        return tuple(self.nodes[j] for j in range(len(self.nodes))
                     if self._marks[i][j] == ARROW)

    def undirected_neighbors(self, name: str) -> tuple[str, ...]:
        i = self._idx(name)
        return tuple(self.nodes[j] for j in range(len(self.nodes))
                     if self._marks[i][j] == LINE)

    def adjacent(self, a: str, b: str) -> bool:
        i, j = self._idx(a), self._idx(b)
        return self._marks[i][j] != NO_EDGE or self._marks[j][i] != NO_EDGE

    def is_fully_directed(self) -> bool:
        return not self.undirected_edges()

    # -- immutable edits ---------------------------------------------------

    def without_directed_edge(self, a: str, b: str) -> "CausalGraph":
        if self.mark(a, b) != ARROW:
            raise UnknownNode(f"no directed edge {a!r} -> {b!r}")
        directed = [e for e in self.directed_edges() if e != (a, b)]
        return CausalGraph(self.nodes, directed, self.undirected_edges())

    def with_reversed_edge(self, a: str, b: str) -> "CausalGraph":
        if self.mark(a, b) != ARROW:
            raise UnknownNode(f"no directed edge {a!r} -> {b!r}")
        directed = [(b, a) if e == (a, b) else e for e in self.directed_edges()]
        return CausalGraph(self.nodes, directed, self.undirected_edges())


# -- algorithms --------------------------------------------------------------


def _directed_adj(g: CausalGraph) -> list[list[int]]:
    n = len(g.nodes)
    adj: list[list[int]] = [[] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if g._marks[i][j] == ARROW:
                adj[i].append(j)
    return adj


def find_cycles(g: CausalGraph) -> list[Cycle]:
    """One representative simple cycle per strongly connected component.

    Only directed edges participate; undirected marks are ignored. The
    returned list is empty iff the directed part is acyclic.
    """
    n = len(g.nodes)
    adj = _directed_adj(g)

    # Tarjan's SCC, iterative to be safe on deep graphs.
    index_of = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    sccs: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index_of[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index_of[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            for k in range(pi, len(adj[v])):
                w = adj[v][k]
                if index_of[w] == -1:
                    work[-1] = (v, k + 1)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index_of[w])
            if advanced:
                continue
            work.pop()
            if low[v] == index_of[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                if len(comp) >= 2:
                    sccs.append(sorted(comp))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])

    sccs.sort(key=lambda comp: comp[0])
    cycles = []
    for comp in sccs:
        comp_set = set(comp)
        best: list[int] | None = None
        # shortest cycle in the component; ties favor canonical start order
        for start in comp:
            prev: dict[int, int] = {}
            q = deque([start])
            seen = {start}
            closing = None
            while q and closing is None:
                v = q.popleft()
                for w in adj[v]:
                    if w not in comp_set:
                        continue
                    if w == start:
                        closing = v
                        break
                    if w not in seen:
                        seen.add(w)
                        prev[w] = v
                        q.append(w)
            assert closing is not None  # SCC of size >= 2 must close
            path = [closing]
            while path[-1] != start:
                path.append(prev[path[-1]])
            path.reverse()
            if best is None or len(path) < len(best):
                best = path
        cycles.append(Cycle(tuple(g.nodes[i] for i in best)))
    return cycles


def topological_order(g: CausalGraph) -> list[str]:
    """Kahn's algorithm with canonical-order tie-breaking."""
    if g.undirected_edges():
        raise NotADag("graph has undirected edges")
    n = len(g.nodes)
    adj = _directed_adj(g)
    indeg = [0] * n
    for i in range(n):
        for j in adj[i]:
            indeg[j] += 1
    ready = sorted(i for i in range(n) if indeg[i] == 0)
    order: list[int] = []
    while ready:
        v = ready.pop(0)
        order.append(v)
        changed = False
        for w in adj[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
                changed = True
        if changed:
            ready.sort()
    if len(order) != n:
        raise NotADag("directed part contains a cycle")
    return [g.nodes[i] for i in order]


def descendants(g: CausalGraph, x: str) -> set[str]:
    """All nodes reachable from x via directed edges, excluding x."""
    start = g._idx(x)
    adj = _directed_adj(g)
    seen = set()
    q = deque([start])
    while q:
        v = q.popleft()
        for w in adj[v]:
            if w not in seen and w != start:
                seen.add(w)
                q.append(w)
    return {g.nodes[i] for i in seen}


def _ancestors_of_set(g: CausalGraph, targets: set[int]) -> set[int]:
    n = len(g.nodes)
    par: list[list[int]] = [[] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if g._marks[i][j] == ARROW:
                par[j].append(i)
    out = set(targets)
    q = deque(targets)
    while q:
        v = q.popleft()
        for p in par[v]:
            if p not in out:
                out.add(p)
                q.append(p)
    return out


def d_separated(g: CausalGraph, x: str, y: str, z: Iterable[str]) -> bool:
    """Whether every path between x and y is blocked given z.

    Uses the linear-time active-trail reachability algorithm: a trail may
    pass through a non-collider iff it is outside z, and through a
    collider iff the collider or one of its descendants is in z.
    """
    if g.undirected_edges():
        raise NotADag("d-separation requires a fully directed graph")
    if find_cycles(g):
        raise NotADag("d-separation requires an acyclic graph")
    xi, yi = g._idx(x), g._idx(y)
    zi = {g._idx(name) for name in z}
    if xi == yi:
        raise ValueError("x and y must differ")
    if xi in zi or yi in zi:
        raise ValueError("x and y must not be in the conditioning set")

    n = len(g.nodes)
    children: list[list[int]] = [[] for _ in range(n)]
    parents: list[list[int]] = [[] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if g._marks[i][j] == ARROW:
                children[i].append(j)
                parents[j].append(i)

    anc_z = _ancestors_of_set(g, set(zi))

    # state: (node, direction); UP = trail arrives from a child,
    # DOWN = trail arrives from a parent.
    UP, DOWN = 0, 1
    visited = set()
    q = deque([(xi, UP)])
    while q:
        v, d = q.popleft()
        if (v, d) in visited:
            continue
        visited.add((v, d))
        if v == yi and v not in zi:
            return False
        if d == UP and v not in zi:
            for p in parents[v]:
                q.append((p, UP))
            for c in children[v]:
                q.append((c, DOWN))
        elif d == DOWN:
            if v not in zi:
                for c in children[v]:
                    q.append((c, DOWN))
            if v in anc_z:
                for p in parents[v]:
                    q.append((p, UP))
    return True


# -- serialization -----------------------------------------------------------

GRAPH_SCHEMA_KINDS = ("directed", "undirected")
RESERVED_KINDS = ("bidirected",)  # latent-confounder mark, rejected for now


def to_json(g: CausalGraph, indent: int | None = None) -> str:
    """Serialize to the ``{"nodes": [...], "edges": [...]}`` document.

    Edges are listed in canonical scan order; undirected edges appear once
    with ``from`` before ``to`` in node order.
    """
    edges = []
    n = len(g.nodes)
    for i in range(n):
        for j in range(n):
            m = g._marks[i][j]
            if m == ARROW:
                edges.append(
                    {"from": g.nodes[i], "to": g.nodes[j], "kind": "directed"}
                )
            elif m == LINE and i < j:
                edges.append(
                    {"from": g.nodes[i], "to": g.nodes[j], "kind": "undirected"}
                )
    doc = {"nodes": list(g.nodes), "edges": edges}
    return json.dumps(doc, indent=indent)


def graph_to_dict(g: CausalGraph) -> dict:
    return json.loads(to_json(g))


def from_json(text: str | dict) -> CausalGraph:
    """Parse the graph document; raises SchemaViolation on any deviation."""
    if isinstance(text, str):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise SchemaViolation(f"not valid JSON: {e}") from None
    else:
        doc = text
    if not isinstance(doc, dict) or set(doc) != {"nodes", "edges"}:
        raise SchemaViolation("document must have exactly 'nodes' and 'edges'")
    nodes = doc["nodes"]
    if not isinstance(nodes, list) or not all(isinstance(n, str) for n in nodes):
        raise SchemaViolation("'nodes' must be a list of strings")
    node_set = set(nodes)
    if len(node_set) != len(nodes):
        raise SchemaViolation("duplicate node names")
    edges = doc["edges"]
    if not isinstance(edges, list):
        raise SchemaViolation("'edges' must be a list")
    directed: list[Edge] = []
    undirected: list[Edge] = []
    for e in edges:
        if not isinstance(e, dict) or set(e) != {"from", "to", "kind"}:
            raise SchemaViolation(
                "edge must have exactly 'from', 'to' and 'kind'"
            )
        a, b, kind = e["from"], e["to"], e["kind"]
        if a not in node_set or b not in node_set:
            raise SchemaViolation(f"edge references unknown node: {e}")
        if a == b:
            raise SchemaViolation(f"self-loop on {a!r}")
        if kind == "directed":
            directed.append((a, b))
        elif kind == "undirected":
            undirected.append((a, b))
        elif kind in RESERVED_KINDS:
            raise SchemaViolation(
                f"edge kind {kind!r} is reserved and not supported"
            )
        else:
            raise SchemaViolation(f"unknown edge kind {kind!r}")
    try:
        return CausalGraph(nodes, directed, undirected)
    except UnknownNode as e:  # pragma: no cover - guarded above
        raise SchemaViolation(str(e)) from None
