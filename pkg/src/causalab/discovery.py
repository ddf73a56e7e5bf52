"""Constraint-based structure learning.

PC-stable skeleton search over a CI oracle, collider orientation from
separation sets, and the four Meek closure rules. Neighbor sets are
frozen at the start of each conditioning-size level, and candidate
subsets are enumerated in canonical lexicographic order, so the output
is independent of node ordering and fully reproducible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import AlgorithmUnavailable, MixedColumnKinds
from .graph import ARROW, LINE, NO_EDGE, CausalGraph
from .independence import CiOracle, DEFAULT_ALPHA, FisherZTester, GSquareTester
from .tabular import ColumnKind, Dataset, DatasetProfile


class Algorithm(str, Enum):
    PC = "pc"
    OLC = "olc"  # latent-confounder slot; registered, not implemented


class CiTestKind(str, Enum):
    FISHER_Z = "fisher_z"
    G_SQUARE = "g_square"
    ORACLE = "oracle"


@dataclass(frozen=True)
class DiscoveryParams:
    alpha: float = DEFAULT_ALPHA
    max_cond_size: int | None = 3  # None means unlimited
    algorithm: Algorithm = Algorithm.PC
    test: CiTestKind = CiTestKind.FISHER_Z

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must be in (0, 1)")
        if self.max_cond_size is not None and self.max_cond_size < 0:
            raise ValueError("max_cond_size must be >= 0 or None")


@dataclass(frozen=True)
class AlgorithmChoice:
    algorithm: Algorithm
    test: CiTestKind
    rationale: str


@dataclass
class Skeleton:
    nodes: tuple[str, ...]
    adjacency: list[set[int]]
    sepsets: dict[tuple[int, int], tuple[int, ...]]

    def sepset(self, i: int, j: int) -> tuple[int, ...] | None:
        return self.sepsets.get((min(i, j), max(i, j)))

    def edges(self) -> list[tuple[int, int]]:
        return [
            (i, j)
            for i in range(len(self.nodes))
            for j in sorted(self.adjacency[i])
            if i < j
        ]


@dataclass
class DiscoveryDiagnostics:
    ci_tests: int = 0
    edges_removed_per_level: list[int] = field(default_factory=list)
    orientation_conflicts: list[tuple[str, str]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "ci_tests": self.ci_tests,
            "edges_removed_per_level": list(self.edges_removed_per_level),
            "orientation_conflicts": [list(c) for c in self.orientation_conflicts],
            "warnings": list(self.warnings),
        }


class _CountingOracle:
    """Wraps a CI oracle, counting queries for the diagnostics."""

    def __init__(self, inner: CiOracle):
        self.inner = inner
        self.count = 0

    def independent(self, i: int, j: int, s: tuple[int, ...]) -> bool:
        self.count += 1
        return self.inner.independent(i, j, s)


def learn_skeleton(
    oracle: CiOracle,
    nodes: Sequence[str],
    params: DiscoveryParams,
    diagnostics: DiscoveryDiagnostics | None = None,
) -> Skeleton:
    """PC-stable skeleton search starting from the complete graph.

    At level l, each still-present ordered edge (i, j) is tested against
    the size-l subsets of i's level-start neighbors minus j; the first
    separating subset removes the edge and is recorded as the sepset.
    """
    names = tuple(nodes)
    n = len(names)
    if n < 2:
        raise ValueError("need at least 2 nodes")
    counting = _CountingOracle(oracle)
    adj: list[set[int]] = [set(range(n)) - {i} for i in range(n)]
    sepsets: dict[tuple[int, int], tuple[int, ...]] = {}

    # within-level tie-breaking is keyed to node NAMES, so the recorded
    # sepsets are invariant under permutations of the column order
    by_name = sorted(range(n), key=lambda k: names[k])

    level = 0
    removed_per_level: list[int] = []
    while params.max_cond_size is None or level <= params.max_cond_size:
        if not any(len(adj[i]) - 1 >= level for i in range(n) if adj[i]):
            break
        snapshot = [frozenset(a) for a in adj]
        removed = 0
        for i in by_name:
            for j in by_name:
                if j == i or j not in adj[i]:
                    continue
                candidates = sorted(snapshot[i] - {j},
                                    key=lambda k: names[k])
                if len(candidates) < level:
                    continue
                for s in itertools.combinations(candidates, level):
                    if counting.independent(i, j, s):
                        adj[i].discard(j)
                        adj[j].discard(i)
                        sepsets[(min(i, j), max(i, j))] = tuple(sorted(s))
                        removed += 1
                        break
        removed_per_level.append(removed)
        level += 1

    if diagnostics is not None:
        diagnostics.ci_tests += counting.count
        diagnostics.edges_removed_per_level = removed_per_level
    return Skeleton(nodes=names, adjacency=adj, sepsets=sepsets)


def orient_v_structures(
    sk: Skeleton,
) -> tuple[CausalGraph, list[tuple[str, str]]]:
    """Orient unshielded colliders; conflicted edges stay undirected.

    For every unshielded triple i - k - j, k is made a collider iff it is
    absent from sepset(i, j). An edge demanded in both directions by
    different triples is left undirected and reported as a conflict.
    """
    n = len(sk.nodes)
    demanded: set[tuple[int, int]] = set()
    for k in range(n):
        neighbors = sorted(sk.adjacency[k])
        for i, j in itertools.combinations(neighbors, 2):
            if j in sk.adjacency[i]:
                continue  # shielded
            sep = sk.sepset(i, j)
            if sep is None:
                continue
            if k not in sep:
                demanded.add((i, k))
                demanded.add((j, k))

    conflicts = sorted(
        {(min(a, b), max(a, b)) for a, b in demanded if (b, a) in demanded}
    )
    conflict_set = set(conflicts)
    directed = [
        (a, b) for a, b in sorted(demanded)
        if (min(a, b), max(a, b)) not in conflict_set
    ]
    oriented_pairs = {(min(a, b), max(a, b)) for a, b in directed}
    undirected = [e for e in sk.edges() if e not in oriented_pairs]
    g = CausalGraph(
        sk.nodes,
        [(sk.nodes[a], sk.nodes[b]) for a, b in directed],
        [(sk.nodes[i], sk.nodes[j]) for i, j in undirected],
    )
    return g, [(sk.nodes[a], sk.nodes[b]) for a, b in conflicts]


def apply_meek_rules(g: CausalGraph) -> CausalGraph:
    """Close a partially directed graph under the four Meek rules.

    R1: a -> b, b - c, a and c nonadjacent        =>  b -> c
    R2: a -> b -> c, a - c                        =>  a -> c
    R3: a - b, a - c, a - d, c -> b, d -> b,
        c and d nonadjacent                       =>  a -> b
    R4: a - b, a - c, c -> d, d -> b,
        c and b nonadjacent                       =>  a -> b
    Rules are scanned in canonical order until a fixpoint.
    """
    n = len(g.nodes)
    m = [row[:] for row in g._marks]

    def adjacent(i, j):
        return m[i][j] != NO_EDGE or m[j][i] != NO_EDGE

    def orient(i, j):
        m[i][j] = ARROW
        m[j][i] = NO_EDGE

    changed = True
    while changed:
        changed = False
        for a in range(n):
            for b in range(n):
                if m[a][b] != LINE:
                    continue
                # R1: some c -> a with c, b nonadjacent
                if any(m[c][a] == ARROW and not adjacent(c, b)
                       for c in range(n) if c != b):
                    orient(a, b)
                    changed = True
                    continue
                # R2: chain a -> c -> b
                if any(m[a][c] == ARROW and m[c][b] == ARROW
                       for c in range(n)):
                    orient(a, b)
                    changed = True
                    continue
                # R3: a - c, a - d, c -> b, d -> b, c and d nonadjacent
                pointers = [c for c in range(n)
                            if m[a][c] == LINE and m[c][b] == ARROW]
                if any(not adjacent(c, d)
                       for c, d in itertools.combinations(pointers, 2)):
                    orient(a, b)
                    changed = True
                    continue
                # R4: a - c, c -> d, d -> b, c and b nonadjacent
                hit = False
                for c in range(n):
                    if m[a][c] != LINE or adjacent(c, b):
                        continue
                    if any(m[c][d] == ARROW and m[d][b] == ARROW
                           for d in range(n)):
                        hit = True
                        break
                if hit:
                    orient(a, b)
                    changed = True

    directed = [(g.nodes[i], g.nodes[j]) for i in range(n) for j in range(n)
                if m[i][j] == ARROW]
    undirected = [(g.nodes[i], g.nodes[j]) for i in range(n)
                  for j in range(i + 1, n) if m[i][j] == LINE]
    return CausalGraph(g.nodes, directed, undirected)


def run_pc(
    source: "CiOracle | np.ndarray | Sequence[Sequence[object]]",
    nodes: Sequence[str],
    params: DiscoveryParams,
) -> tuple[CausalGraph, DiscoveryDiagnostics]:
    """Skeleton search, collider orientation, Meek closure.

    ``source`` is a CI oracle for ORACLE runs, a complete numeric matrix
    for FISHER_Z, or a row-major label table for G_SQUARE.
    """
    if params.algorithm is Algorithm.OLC:
        raise AlgorithmUnavailable(
            "latent-confounder discovery is registered but not implemented"
        )
    if params.test is CiTestKind.ORACLE:
        oracle: CiOracle = source  # type: ignore[assignment]
    elif params.test is CiTestKind.FISHER_Z:
        oracle = FisherZTester(np.asarray(source, dtype=float), params.alpha)
    else:
        oracle = GSquareTester(source, params.alpha)  # type: ignore[arg-type]

    diagnostics = DiscoveryDiagnostics()
    sk = learn_skeleton(oracle, nodes, params, diagnostics)
    oriented, conflicts = orient_v_structures(sk)
    diagnostics.orientation_conflicts = conflicts
    for a, b in conflicts:
        diagnostics.warnings.append(
            f"conflicting collider orientations on edge {a} - {b}; left undirected"
        )
    cpdag = apply_meek_rules(oriented)
    return cpdag, diagnostics


def matrix_for_test(ds: Dataset, test: CiTestKind):
    """Extract the data structure run_pc expects for a data-backed test."""
    kinds = ds.kinds()
    if len(kinds) > 1:
        raise MixedColumnKinds(
            "dataset mixes continuous and categorical columns; "
            "discovery supports one kind at a time"
        )
    if test is CiTestKind.FISHER_Z:
        return ds.to_matrix()
    return [
        tuple(c.values[r] for c in ds.columns)
        for r in range(ds.row_count)
    ]


_LATENT_HINTS = (
    "latent",
    "hidden confound",
    "unobserved confound",
    "unmeasured confound",
)


def select_algorithm(profile: DatasetProfile, instruction: str) -> AlgorithmChoice:
    """Rule-based algorithm and test selection from the request text and data."""
    kinds = {c.kind for c in profile.columns}
    if kinds == {ColumnKind.CATEGORICAL}:
        test = CiTestKind.G_SQUARE
        data_note = "all columns categorical, so the G-squared test applies"
    elif kinds == {ColumnKind.CONTINUOUS}:
        test = CiTestKind.FISHER_Z
        data_note = "all columns continuous, so the Fisher-z test applies"
    else:
        test = CiTestKind.FISHER_Z
        data_note = (
            "columns mix continuous and categorical kinds; discovery will "
            "require a single kind"
        )

    lowered = instruction.lower()
    hint = next((h for h in _LATENT_HINTS if h in lowered), None)
    if hint is not None:
        return AlgorithmChoice(
            algorithm=Algorithm.OLC,
            test=test,
            rationale=(
                f"instruction mentions {hint!r}, which asks for latent-"
                f"confounder handling; {data_note}"
            ),
        )
    return AlgorithmChoice(
        algorithm=Algorithm.PC,
        test=test,
        rationale=(
            f"no latent-confounder request detected, so the constraint-based "
            f"PC search is the default; {data_note}"
        ),
    )
