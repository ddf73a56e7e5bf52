#!/usr/bin/env python3
"""Regenerate data/sachs.csv, the bundled protein-signaling fixture.

The real flow-cytometry measurements are not redistributable here, so
the demo ships a synthetic stand-in: 7466 draws from a linear-Gaussian
structural model over the 11 classic phosphoprotein names. The wiring
follows the textbook signaling map (PKC/PKA upstream, the Raf-Mek-Erk
cascade, the Plcg-PIP module), with parent pairs chosen non-adjacent so
every regulator edge is orientable from observational data alone.
"""

import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from causalab.graph import CausalGraph, topological_order  # noqa: E402

NODES = ["Raf", "Mek", "Plcg", "PIP2", "PIP3", "Erk", "Akt", "PKA", "PKC",
         "P38", "Jnk"]

EDGE_COEFFICIENTS = {
    ("PKC", "PKA"): 0.8,
    ("Plcg", "PKA"): 0.7,
    ("PKA", "Raf"): 1.0,
    ("Raf", "Mek"): 0.9,
    ("PKC", "Mek"): 0.8,
    ("Mek", "Erk"): 0.8,
    ("PKA", "Erk"): 0.9,
    ("PKA", "Akt"): 0.9,
    ("PIP3", "Akt"): 0.8,
    ("PKC", "P38"): 1.0,
    ("PKA", "Jnk"): 0.9,
    ("P38", "Jnk"): 0.8,
    ("Plcg", "PIP3"): 1.0,
    ("PIP3", "PIP2"): 0.9,
    ("Plcg", "PIP2"): 0.6,
}

N_ROWS = 7466  # same size as the classic dataset
SEED = 0


def generating_graph() -> CausalGraph:
    return CausalGraph(NODES, directed=list(EDGE_COEFFICIENTS))


def sample(seed: int = SEED, n: int = N_ROWS) -> np.ndarray:
    g = generating_graph()
    index = {v: k for k, v in enumerate(NODES)}
    b = np.zeros((len(NODES), len(NODES)))
    for (a, c), w in EDGE_COEFFICIENTS.items():
        b[index[a], index[c]] = w
    rng = np.random.default_rng(seed)
    data = np.zeros((n, len(NODES)))
    for name in topological_order(g):
        j = index[name]
        data[:, j] = data @ b[:, j] + rng.normal(0.0, 1.0, n)
    return data


def main() -> None:
    data = sample()
    out = ROOT / "data" / "sachs.csv"
    out.parent.mkdir(exist_ok=True)
    with out.open("w", encoding="utf-8") as fh:
        fh.write(",".join(NODES) + "\n")
        for row in data:
            fh.write(",".join(f"{v:.4f}" for v in row) + "\n")
    print(f"wrote {out}: {data.shape[0]} rows x {data.shape[1]} columns")


if __name__ == "__main__":
    main()
