"""What-if answers on a learned graph.

Qualitative effects come from graph surgery plus reachability; on a
CPDAG, targets reachable only through undirected edges are reported as
direction-ambiguous rather than guessed. Quantitative effects use linear
back-door adjustment with the treatment's parents as the adjustment set,
which is always valid in a DAG.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import NotADag, NotDescendant, SingularDesign, UnknownNode
from .graph import ARROW, LINE, CausalGraph, descendants, find_cycles
from .tabular import ColumnKind, Dataset


class EffectVerdict(str, Enum):
    AFFECTED = "affected"
    UNAFFECTED = "unaffected"
    AMBIGUOUS = "ambiguous_orientation"


@dataclass(frozen=True)
class InterventionQuery:
    target: str
    outcome: str | None = None


@dataclass(frozen=True)
class InterventionAnswer:
    target: str
    verdicts: tuple[tuple[str, str], ...]  # (outcome, verdict value)
    effect_estimate: float | None
    adjustment_set: tuple[str, ...] | None
    narrative: str

    def verdict_for(self, outcome: str) -> str | None:
        for name, verdict in self.verdicts:
            if name == outcome:
                return verdict
        return None

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "verdicts": {name: v for name, v in self.verdicts},
            "effect_estimate": (
                None if self.effect_estimate is None
                else float(f"{self.effect_estimate:.6g}")
            ),
            "adjustment_set": (
                None if self.adjustment_set is None else list(self.adjustment_set)
            ),
            "narrative": self.narrative,
        }


def do_surgery(g: CausalGraph, target: str) -> CausalGraph:
    """Remove every directed edge into the target; all else unchanged."""
    g._idx(target)  # raises UnknownNode
    directed = [(a, b) for a, b in g.directed_edges() if b != target]
    return CausalGraph(g.nodes, directed, g.undirected_edges())


def _mixed_reachable(g: CausalGraph, start: str) -> set[str]:
    # directed edges traversed forward, undirected edges both ways
    n = len(g.nodes)
    s = g._idx(start)
    seen = {s}
    q = deque([s])
    while q:
        v = q.popleft()
        for w in range(n):
            if g._marks[v][w] in (ARROW, LINE) and w not in seen:
                seen.add(w)
                q.append(w)
    seen.discard(s)
    return {g.nodes[i] for i in seen}


def qualitative_effect(g: CausalGraph, target: str, outcome: str) -> EffectVerdict:
    """Effect of do(target) on outcome, honest about CPDAG ambiguity."""
    if outcome not in g:
        raise UnknownNode(f"unknown node {outcome!r}")
    surgered = do_surgery(g, target)
    if outcome in descendants(surgered, target):
        return EffectVerdict.AFFECTED
    if outcome in _mixed_reachable(surgered, target):
        return EffectVerdict.AMBIGUOUS
    return EffectVerdict.UNAFFECTED


def estimate_linear_effect(
    ds: Dataset, g: CausalGraph, treatment: str, outcome: str
) -> tuple[float, tuple[str, ...]]:
    """Back-door estimate: OLS of outcome on treatment plus its parents.

    Solved by normal equations; a 1e-9 ridge jitter is applied once if
    the design is singular.
    """
    if g.undirected_edges() or find_cycles(g):
        raise NotADag("effect estimation needs a fully directed acyclic graph")
    if outcome not in descendants(g, treatment):
        raise NotDescendant(f"{outcome!r} is not downstream of {treatment!r}")
    adjustment = g.parents(treatment)

    def col(name: str) -> np.ndarray:
        c = ds.column(name)
        if c.kind is not ColumnKind.CONTINUOUS:
            raise ValueError(f"column {name!r} is not continuous")
        if any(v is None for v in c.values):
            raise ValueError(f"column {name!r} has missing values")
        return np.asarray(c.values, dtype=float)

    y = col(outcome)
    x = np.column_stack(
        [np.ones(len(y)), col(treatment)] + [col(a) for a in adjustment]
    )
    xtx = x.T @ x
    xty = x.T @ y
    try:
        beta = np.linalg.solve(xtx, xty)
    except np.linalg.LinAlgError:
        jittered = xtx + 1e-9 * np.eye(xtx.shape[0])
        try:
            beta = np.linalg.solve(jittered, xty)
        except np.linalg.LinAlgError:
            raise SingularDesign("design matrix singular after jitter") from None
    return float(beta[1]), adjustment


def answer_query(
    g: CausalGraph,
    query: InterventionQuery,
    ds: Dataset | None = None,
) -> InterventionAnswer:
    """Full what-if answer: verdicts, optional estimate, narrative.

    A numeric estimate is attempted only when the outcome is affected,
    the graph is fully directed, and complete continuous data is at hand.
    """
    target = query.target
    if target not in g:
        raise UnknownNode(f"unknown node {target!r}")
    outcomes = (
        [query.outcome] if query.outcome
        else [n for n in g.nodes if n != target]
    )
    verdicts = tuple(
        (o, qualitative_effect(g, target, o).value) for o in outcomes
    )

    effect = None
    adjustment: tuple[str, ...] | None = None
    lines: list[str] = []
    affected = [o for o, v in verdicts if v == EffectVerdict.AFFECTED.value]
    ambiguous = [o for o, v in verdicts if v == EffectVerdict.AMBIGUOUS.value]
    unaffected = [o for o, v in verdicts if v == EffectVerdict.UNAFFECTED.value]

    if affected:
        lines.append(
            f"Intervening on {target} propagates along directed paths to: "
            f"{', '.join(affected)}."
        )
    if ambiguous:
        lines.append(
            f"For {', '.join(ambiguous)} the learned graph leaves edge "
            f"directions open, so the effect of do({target}) cannot be "
            f"signed without further assumptions."
        )
    if unaffected and query.outcome:
        lines.append(
            f"{', '.join(unaffected)} is not downstream of {target}; "
            f"the intervention leaves it unchanged."
        )
    if not affected and not ambiguous and not unaffected:
        lines.append(f"{target} has no other variables to influence.")

    if (
        query.outcome
        and query.outcome in affected
        and g.is_fully_directed()
        and ds is not None
        and ds.kinds() == {ColumnKind.CONTINUOUS}
        and not ds.has_missing()
    ):
        effect, adjustment = estimate_linear_effect(
            ds, g, target, query.outcome
        )
        adj_text = ", ".join(adjustment) if adjustment else "nothing (no parents)"
        lines.append(
            f"A linear back-door estimate adjusting for {adj_text} puts the "
            f"effect of one unit of {target} on {query.outcome} at "
            f"{effect:.6g}."
        )
    elif query.outcome and query.outcome in affected and not g.is_fully_directed():
        lines.append(
            "No numeric estimate is offered because some edges remain "
            "undirected in the learned structure."
        )
    return InterventionAnswer(
        target=target,
        verdicts=verdicts,
        effect_estimate=effect,
        adjustment_set=adjustment,
        narrative=" ".join(lines),
    )
