"""Independent brute-force oracles for the test suite.

Everything here is deliberately naive and separate from the library's
algorithms: d-separation by exhaustive path enumeration, CPDAG
construction by enumerating every acyclic orientation of the skeleton,
minimum feedback arc set by subset search, and closed-form total
effects for linear SEMs.
"""

from __future__ import annotations

import itertools
import random

import numpy as np

from causalab.graph import CausalGraph


# --- random graph generators --------------------------------------------------

def node_names(n: int) -> list[str]:
    return [f"V{i}" for i in range(n)]


def random_dag(rng: random.Random, n: int, p: float) -> CausalGraph:
    """Random DAG: each pair (i, j) with i < j gets edge i -> j w.p. p."""
    names = node_names(n)
    edges = [
        (names[i], names[j])
        for i in range(n) for j in range(i + 1, n)
        if rng.random() < p
    ]
    return CausalGraph(names, directed=edges)


def random_digraph(rng: random.Random, n: int, n_edges: int) -> CausalGraph:
    """Random directed graph (may be cyclic, 2-cycles allowed)."""
    names = node_names(n)
    pairs = [(a, b) for a in names for b in names if a != b]
    rng.shuffle(pairs)
    return CausalGraph(names, directed=pairs[:n_edges])


def random_cyclic_digraph(rng: random.Random, n: int,
                          n_edges: int) -> CausalGraph:
    """Random digraph guaranteed to contain at least one directed cycle."""
    names = node_names(n)
    while True:
        g = random_digraph(rng, n, n_edges)
        if _has_cycle_edges(set(g.directed_edges()), names):
            return g
        # force one: close a random 3-cycle if possible
        a, b, c = rng.sample(names, 3)
        base = set(g.directed_edges())
        trio = {(a, b), (b, c), (c, a)}
        conflict = {(y, x) for x, y in trio}
        if not (base & conflict):
            edges = list((base - trio) | trio)
            return CausalGraph(names, directed=edges)


def _has_cycle_edges(edges: set[tuple[str, str]], names: list[str]) -> bool:
    children: dict[str, list[str]] = {v: [] for v in names}
    for a, b in edges:
        children[a].append(b)
    color = {v: 0 for v in names}

    def dfs(v: str) -> bool:
        color[v] = 1
        for w in children[v]:
            if color[w] == 1 or (color[w] == 0 and dfs(w)):
                return True
        color[v] = 2
        return False

    return any(color[v] == 0 and dfs(v) for v in names)


# --- d-separation by path enumeration ----------------------------------------

def _descendant_map(g: CausalGraph) -> dict[str, set[str]]:
    out: dict[str, set[str]] = {}
    children = {v: set(g.children(v)) for v in g.nodes}
    for v in g.nodes:
        seen: set[str] = set()
        stack = [v]
        while stack:
            u = stack.pop()
            for w in children[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        out[v] = seen
    return out


def brute_force_d_separated(g: CausalGraph, x: str, y: str,
                            z: set[str]) -> bool:
    """Enumerate every simple undirected path and test blocking by hand."""
    desc = _descendant_map(g)
    neighbors: dict[str, set[str]] = {v: set() for v in g.nodes}
    for a, b in g.directed_edges():
        neighbors[a].add(b)
        neighbors[b].add(a)
    directed = set(g.directed_edges())

    def path_active(path: list[str]) -> bool:
        for k in range(1, len(path) - 1):
            prev, v, nxt = path[k - 1], path[k], path[k + 1]
            into_v_from_prev = (prev, v) in directed
            into_v_from_next = (nxt, v) in directed
            if into_v_from_prev and into_v_from_next:
                # collider: blocked unless v or a descendant is conditioned on
                if v not in z and not (desc[v] & z):
                    return False
            else:
                # chain or fork: blocked when v is conditioned on
                if v in z:
                    return False
        return True

    stack: list[list[str]] = [[x]]
    while stack:
        path = stack.pop()
        last = path[-1]
        if last == y:
            if path_active(path):
                return False
            continue
        for w in sorted(neighbors[last]):
            if w not in path:
                stack.append(path + [w])
    return True


# --- brute-force CPDAG of a DAG -----------------------------------------------

def _v_structures(nodes, edges: set[tuple[str, str]]) -> frozenset:
    adj: dict[str, set[str]] = {v: set() for v in nodes}
    parents: dict[str, set[str]] = {v: set() for v in nodes}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
        parents[b].add(a)
    out = set()
    for k in nodes:
        for i, j in itertools.combinations(sorted(parents[k]), 2):
            if j not in adj[i]:
                out.add((i, k, j))
    return frozenset(out)


def _is_acyclic(nodes, edges: set[tuple[str, str]]) -> bool:
    return not _has_cycle_edges(edges, list(nodes))


def brute_force_cpdag(dag: CausalGraph) -> CausalGraph:
    """CPDAG by definition: enumerate all class members, mark common arrows.

    A member is any acyclic orientation of the skeleton with the same
    v-structures (Verma-Pearl characterization). An edge is directed in
    the CPDAG iff every member agrees on its direction.
    """
    nodes = dag.nodes
    base = set(dag.directed_edges())
    assert not dag.undirected_edges(), "oracle expects a DAG"
    skeleton = sorted({tuple(sorted(e)) for e in base})
    target_vs = _v_structures(nodes, base)

    members = []
    for orientation in itertools.product((0, 1), repeat=len(skeleton)):
        edges = {
            (a, b) if bit == 0 else (b, a)
            for (a, b), bit in zip(skeleton, orientation)
        }
        if not _is_acyclic(nodes, edges):
            continue
        if _v_structures(nodes, edges) != target_vs:
            continue
        members.append(edges)
    assert members, "the DAG itself must be a member"

    directed = []
    undirected = []
    for a, b in skeleton:
        if all((a, b) in m for m in members):
            directed.append((a, b))
        elif all((b, a) in m for m in members):
            directed.append((b, a))
        else:
            undirected.append((a, b))
    return CausalGraph(nodes, directed=directed, undirected=undirected)


# --- structural hamming distance ----------------------------------------------

def shd(g1: CausalGraph, g2: CausalGraph) -> int:
    """Count node pairs whose joint edge mark differs between the graphs."""
    assert g1.nodes == g2.nodes
    count = 0
    for i, a in enumerate(g1.nodes):
        for b in g1.nodes[i + 1:]:
            m1 = (g1.mark(a, b), g1.mark(b, a))
            m2 = (g2.mark(a, b), g2.mark(b, a))
            if m1 != m2:
                count += 1
    return count


# --- minimum feedback arc set ---------------------------------------------------

def min_feedback_arc_set_size(g: CausalGraph) -> int:
    """Smallest number of arc removals making g acyclic, by subset search."""
    edges = g.directed_edges()
    nodes = list(g.nodes)
    base = set(edges)
    if _is_acyclic(nodes, base):
        return 0
    for k in range(1, len(edges) + 1):
        for drop in itertools.combinations(edges, k):
            if _is_acyclic(nodes, base - set(drop)):
                return k
    return len(edges)


# --- linear SEM simulation -------------------------------------------------------

def random_sem(rng: random.Random, g: CausalGraph,
               low: float = 0.5, high: float = 1.5) -> np.ndarray:
    """Coefficient matrix B with B[i, j] the weight on edge i -> j."""
    n = len(g.nodes)
    b = np.zeros((n, n))
    index = {v: k for k, v in enumerate(g.nodes)}
    for a, c in g.directed_edges():
        mag = rng.uniform(low, high)
        b[index[a], index[c]] = mag if rng.random() < 0.5 else -mag
    return b


def sample_sem(seed: int, g: CausalGraph, b: np.ndarray,
               n_rows: int, noise_std: float = 1.0) -> np.ndarray:
    """Draw rows from the linear-Gaussian SEM x_j = sum_i B[i,j] x_i + eps."""
    rng = np.random.default_rng(seed)
    n = len(g.nodes)
    order = _topo_indices(g)
    data = np.zeros((n_rows, n))
    for j in order:
        data[:, j] = data @ b[:, j] + rng.normal(0.0, noise_std, n_rows)
    return data


def _topo_indices(g: CausalGraph) -> list[int]:
    from causalab.graph import topological_order

    index = {v: k for k, v in enumerate(g.nodes)}
    return [index[v] for v in topological_order(g)]


def total_effect(b: np.ndarray, t: int, y: int) -> float:
    """Sum over directed paths of coefficient products: (I - B)^-1 entry."""
    n = b.shape[0]
    return float(np.linalg.inv(np.eye(n) - b)[t, y])


def recursive_partial_corr(corr: np.ndarray, i: int, j: int, k: int) -> float:
    """Order-1 partial correlation by the textbook recursion."""
    r_ij, r_ik, r_jk = corr[i, j], corr[i, k], corr[j, k]
    return (r_ij - r_ik * r_jk) / ((1 - r_ik**2) * (1 - r_jk**2)) ** 0.5
