"""Cycle detection and confidence-weighted repair of DAG violations.

Repairs are greedy: while the graph is cyclic, drop (or, with a strong
enough prior, reverse) the weakest edge of the current representative
cycle, where edge strength is the larger of its prior weight and its
absolute correlation. Exact minimum feedback arc set is NP-hard; the
greedy plan is checked statistically against a brute-force oracle on
small instances in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from .errors import StaleEdit
from .graph import ARROW, CausalGraph, Cycle, descendants, find_cycles

REVERSE_PRIOR_THRESHOLD = 0.8


class EditAction(str, Enum):
    REMOVE = "remove"
    REVERSE = "reverse"


@dataclass(frozen=True)
class EdgeEdit:
    edge: tuple[str, str]
    action: EditAction
    confidence: float
    justification: str


@dataclass(frozen=True)
class RepairPlan:
    edits: tuple[EdgeEdit, ...]
    resulting_graph: CausalGraph


def detect_violations(g: CausalGraph) -> list[Cycle]:
    """Directed cycles breaking the DAG assumption; empty means compliant."""
    return find_cycles(g)


def _strength(
    g: CausalGraph,
    edge: tuple[str, str],
    corr: np.ndarray | None,
    priors: Mapping[tuple[str, str], float],
) -> float:
    prior = priors.get(edge, 0.0)
    assoc = 0.0
    if corr is not None:
        i = g.nodes.index(edge[0])
        j = g.nodes.index(edge[1])
        assoc = abs(float(corr[i][j]))
    return max(prior, assoc)


def _reversal_is_safe(g: CausalGraph, edge: tuple[str, str]) -> bool:
    # reversing i -> j adds j -> i, which cycles iff i still reaches j;
    # an existing reverse arc rules reversal out entirely
    a, b = edge
    if g.mark(b, a) != 0:
        return False
    without = g.without_directed_edge(a, b)
    return b not in descendants(without, a)


def propose_repairs(
    g: CausalGraph,
    corr: np.ndarray | Sequence[Sequence[float]] | None = None,
    priors: Sequence[tuple[tuple[str, str], float]] = (),
) -> RepairPlan:
    """Greedy weakest-edge repair plan restoring acyclicity.

    Each iteration scores the edges of the current representative cycle,
    removes the minimum-strength one (canonical tie-break), and assigns
    confidence 1 - strength / max_strength_in_cycle. An edge whose prior
    weight is at least 0.8 is reversed instead, provided the reversal
    does not create a new cycle.
    """
    corr_arr = None if corr is None else np.asarray(corr, dtype=float)
    prior_map = {tuple(edge): float(w) for edge, w in priors}
    edits: list[EdgeEdit] = []
    work = g
    while True:
        cycles = find_cycles(work)
        if not cycles:
            break
        cyc = cycles[0]
        ring = list(cyc.nodes) + [cyc.nodes[0]]
        edges = [(ring[k], ring[k + 1]) for k in range(len(cyc.nodes))]
        strengths = {e: _strength(work, e, corr_arr, prior_map) for e in edges}
        max_s = max(strengths.values())

        def canonical(e):
            return (work.nodes.index(e[0]), work.nodes.index(e[1]))

        target = min(edges, key=lambda e: (strengths[e], canonical(e)))
        s = strengths[target]
        # stored at the serialization precision so checkpoints round-trip
        confidence = round(1.0 if max_s == 0 else 1.0 - s / max_s, 4)

        if (
            prior_map.get(target, 0.0) >= REVERSE_PRIOR_THRESHOLD
            and _reversal_is_safe(work, target)
        ):
            action = EditAction.REVERSE
            work = work.with_reversed_edge(*target)
            verb = "reversed"
        else:
            action = EditAction.REMOVE
            work = work.without_directed_edge(*target)
            verb = "removed"
        justification = (
            f"edge {target[0]} -> {target[1]} {verb}: weakest link "
            f"(strength {s:.4f} vs cycle max {max_s:.4f}) in cycle {cyc}"
        )
        edits.append(EdgeEdit(
            edge=target,
            action=action,
            confidence=confidence,
            justification=justification,
        ))
    return RepairPlan(edits=tuple(edits), resulting_graph=work)


def apply_plan(g: CausalGraph, plan: RepairPlan) -> CausalGraph:
    """Apply the plan's edits in order; edits must reference live edges."""
    work = g
    for edit in plan.edits:
        a, b = edit.edge
        if a not in work or b not in work or work.mark(a, b) != ARROW:
            raise StaleEdit(f"edge {a} -> {b} is no longer present")
        if edit.action is EditAction.REMOVE:
            work = work.without_directed_edge(a, b)
        else:
            work = work.with_reversed_edge(a, b)
    return work


def plan_to_dict(plan: RepairPlan) -> dict:
    """Session-state JSON shape; confidence fixed to 4 decimal places."""
    return {
        "edits": [
            {
                "edge": list(e.edge),
                "action": e.action.value,
                "confidence": round(e.confidence, 4),
                "justification": e.justification,
            }
            for e in plan.edits
        ],
        "resulting_edges": {
            "directed": [list(e) for e in plan.resulting_graph.directed_edges()],
            "undirected": [list(e) for e in plan.resulting_graph.undirected_edges()],
        },
    }
