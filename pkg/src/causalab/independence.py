"""Conditional-independence tests backing constraint-based discovery.

Fisher-z on partial correlations for continuous data, the G-squared
likelihood-ratio test on stratified contingency tables for categorical
data, and a graphical oracle that answers queries by d-separation on a
known DAG. All tests are pure functions of their inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np
from scipy.special import erfc, gammaincc

from .errors import (
    DegenerateVariable,
    NotADag,
    SingularMatrix,
    TooFewSamples,
)
from .graph import CausalGraph, d_separated, find_cycles

DEFAULT_ALPHA = 0.05
_SINGULAR_TOL = 1e-10
_R_CLAMP = 1.0 - 1e-12


@dataclass(frozen=True)
class CiTestResult:
    statistic: float
    p_value: float
    independent: bool
    test_name: str
    dof_or_n: int
    low_power: bool = False


class CiOracle(Protocol):
    """Answers independence queries over node indices."""

    def independent(self, i: int, j: int, s: tuple[int, ...]) -> bool: ...


def normal_sf(x: float) -> float:
    """Upper tail of the standard normal via erfc (abs error <= 1e-12)."""
    return 0.5 * erfc(x / math.sqrt(2.0))


def chi2_sf(x: float, dof: int) -> float:
    """Chi-square survival function via the regularized incomplete gamma."""
    if x <= 0:
        return 1.0
    return float(gammaincc(dof / 2.0, x / 2.0))


def partial_correlation(
    corr: np.ndarray | Sequence[Sequence[float]],
    i: int,
    j: int,
    s: Sequence[int] = (),
) -> float:
    """Partial correlation of i, j given s from a correlation matrix.

    Inverts the submatrix over {i, j} | s and reads
    -P[i,j] / sqrt(P[i,i] * P[j,j]); the result is clamped just inside
    (-1, 1) so the Fisher transform stays finite.
    """
    if i == j or i in s or j in s:
        raise ValueError("indices must satisfy i != j and i, j not in s")
    corr = np.asarray(corr, dtype=float)
    # canonical index order makes the result exactly symmetric in (i, j)
    idx = [min(i, j), max(i, j), *sorted(s)]
    sub = corr[np.ix_(idx, idx)]
    if not np.all(np.isfinite(sub)):
        raise SingularMatrix("correlation submatrix contains non-finite entries")
    svals = np.linalg.svd(sub, compute_uv=False)
    if svals[-1] < _SINGULAR_TOL:
        raise SingularMatrix(
            f"correlation submatrix over {idx} singular (smallest "
            f"singular value {svals[-1]:.2e})"
        )
    p = np.linalg.inv(sub)
    r = -p[0, 1] / math.sqrt(p[0, 0] * p[1, 1])
    return max(-_R_CLAMP, min(_R_CLAMP, float(r)))


class FisherZTester:
    """Fisher-z CI test sharing one correlation matrix across queries."""

    def __init__(self, data: np.ndarray, alpha: float = DEFAULT_ALPHA):
        data = np.asarray(data, dtype=float)
        if data.ndim != 2:
            raise ValueError("data must be a 2-D (rows, variables) matrix")
        if not 0 < alpha < 1:
            raise ValueError("alpha must be in (0, 1)")
        self.n = data.shape[0]
        self.alpha = alpha
        with np.errstate(invalid="ignore", divide="ignore"):
            self.corr = np.corrcoef(data, rowvar=False)

    def test(self, i: int, j: int, s: tuple[int, ...] = (),
             alpha: float | None = None) -> CiTestResult:
        alpha = self.alpha if alpha is None else alpha
        if self.n < len(s) + 4:
            raise TooFewSamples(
                f"need at least |s| + 4 = {len(s) + 4} rows, have {self.n}"
            )
        r = partial_correlation(self.corr, i, j, s)
        z = math.atanh(r)
        statistic = math.sqrt(self.n - len(s) - 3) * abs(z)
        p = 2.0 * normal_sf(statistic)
        p = max(0.0, min(1.0, p))
        return CiTestResult(
            statistic=statistic,
            p_value=p,
            independent=p > alpha,
            test_name="fisher_z",
            dof_or_n=self.n,
        )

    def independent(self, i: int, j: int, s: tuple[int, ...] = ()) -> bool:
        return self.test(i, j, s).independent


def fisher_z_test(data: np.ndarray, i: int, j: int, s: tuple[int, ...] = (),
                  alpha: float = DEFAULT_ALPHA) -> CiTestResult:
    return FisherZTester(data, alpha).test(i, j, s)


class GSquareTester:
    """G-squared CI test over label columns, stratified by the conditioning set."""

    def __init__(self, data: Sequence[Sequence[object]], alpha: float = DEFAULT_ALPHA):
        # data is row-major: data[r][c] is the label of variable c in row r
        if not 0 < alpha < 1:
            raise ValueError("alpha must be in (0, 1)")
        rows = [tuple(r) for r in data]
        if not rows:
            raise TooFewSamples("no rows")
        self.n = len(rows)
        self.p = len(rows[0])
        self.alpha = alpha
        self.levels: list[list[object]] = []
        self.codes = np.empty((self.n, self.p), dtype=np.intp)
        for c in range(self.p):
            col = [r[c] for r in rows]
            lv = sorted(set(col), key=repr)
            code = {v: k for k, v in enumerate(lv)}
            self.levels.append(lv)
            self.codes[:, c] = [code[v] for v in col]

    def test(self, i: int, j: int, s: tuple[int, ...] = (),
             alpha: float | None = None) -> CiTestResult:
        alpha = self.alpha if alpha is None else alpha
        i, j = min(i, j), max(i, j)  # exact symmetry in (i, j)
        s = tuple(sorted(s))
        for v in (i, j, *s):
            if len(self.levels[v]) < 2:
                raise DegenerateVariable(
                    f"variable {v} has fewer than 2 observed levels"
                )
        li, lj = len(self.levels[i]), len(self.levels[j])

        # group rows by conditioning-set configuration
        strata: dict[tuple, np.ndarray] = {}
        if s:
            keys = [tuple(self.codes[r, list(s)]) for r in range(self.n)]
            order: dict[tuple, list[int]] = {}
            for r, k in enumerate(keys):
                order.setdefault(k, []).append(r)
            strata = {k: np.asarray(v) for k, v in sorted(order.items())}
        else:
            strata = {(): np.arange(self.n)}

        g2 = 0.0
        for rows_idx in strata.values():
            ci = self.codes[rows_idx, i]
            cj = self.codes[rows_idx, j]
            table = np.zeros((li, lj))
            np.add.at(table, (ci, cj), 1.0)
            total = table.sum()
            expected = np.outer(table.sum(axis=1), table.sum(axis=0)) / total
            mask = table > 0
            g2 += 2.0 * float(
                np.sum(table[mask] * np.log(table[mask] / expected[mask]))
            )
        dof = len(strata) * (li - 1) * (lj - 1)
        p = max(0.0, min(1.0, chi2_sf(g2, dof)))
        return CiTestResult(
            statistic=g2,
            p_value=p,
            independent=p > alpha,
            test_name="g_square",
            dof_or_n=dof,
            low_power=self.n < 10 * dof,
        )

    def independent(self, i: int, j: int, s: tuple[int, ...] = ()) -> bool:
        return self.test(i, j, s).independent


def g_square_test(data: Sequence[Sequence[object]], i: int, j: int,
                  s: tuple[int, ...] = (),
                  alpha: float = DEFAULT_ALPHA) -> CiTestResult:
    return GSquareTester(data, alpha).test(i, j, s)


class DSepOracle:
    """Graphical CI oracle: independent iff d-separated in the true DAG."""

    def __init__(self, truth: CausalGraph):
        if truth.undirected_edges() or find_cycles(truth):
            raise NotADag("oracle requires a fully directed acyclic graph")
        self.truth = truth
        self._cache: dict[tuple[int, int, tuple[int, ...]], bool] = {}

    def independent(self, i: int, j: int, s: tuple[int, ...] = ()) -> bool:
        key = (i, j, tuple(sorted(s))) if i < j else (j, i, tuple(sorted(s)))
        hit = self._cache.get(key)
        if hit is None:
            nodes = self.truth.nodes
            hit = d_separated(
                self.truth, nodes[key[0]], nodes[key[1]],
                {nodes[k] for k in key[2]},
            )
            self._cache[key] = hit
        return hit


def dsep_oracle(truth: CausalGraph) -> DSepOracle:
    return DSepOracle(truth)
