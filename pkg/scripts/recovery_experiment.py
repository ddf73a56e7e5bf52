#!/usr/bin/env python3
"""Structure-recovery experiment: SHD of PC output vs sample size and alpha.

Simulates linear-Gaussian SEMs on random DAGs, runs the PC search on each
draw, and reports structural hamming distance to the true equivalence
class. Useful for sanity-checking sensitivity to the significance level
before trusting a real analysis.

    python scripts/recovery_experiment.py --nodes 8 --seeds 20
"""

import argparse
import random
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))
sys.path.insert(0, str(ROOT / "tests"))

from causalab.discovery import DiscoveryParams, run_pc  # noqa: E402
from oracles import (  # noqa: E402
    brute_force_cpdag,
    random_dag,
    random_sem,
    sample_sem,
    shd,
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--nodes", type=int, default=8)
    parser.add_argument("--edge-prob", type=float, default=0.35)
    parser.add_argument("--seeds", type=int, default=20)
    parser.add_argument("--dag-seed", type=int, default=1)
    parser.add_argument("--samples", type=int, nargs="+",
                        default=[500, 2000, 5000])
    parser.add_argument("--alphas", type=float, nargs="+",
                        default=[0.01, 0.05, 0.1])
    args = parser.parse_args()

    rng = random.Random(args.dag_seed)
    truth = random_dag(rng, args.nodes, args.edge_prob)
    coeffs = random_sem(rng, truth, 0.6, 1.4)
    target = brute_force_cpdag(truth)
    print(f"true DAG: {len(truth.directed_edges())} edges over "
          f"{args.nodes} nodes; CPDAG has "
          f"{len(target.directed_edges())} compelled edges")

    print(f"{'n':>6} {'alpha':>6} {'mean SHD':>9} {'max':>4} {'<=4':>5}")
    for n in args.samples:
        for alpha in args.alphas:
            shds = []
            for seed in range(args.seeds):
                data = sample_sem(seed, truth, coeffs, n)
                got, _ = run_pc(
                    data, truth.nodes,
                    DiscoveryParams(alpha=alpha, max_cond_size=3),
                )
                shds.append(shd(got, target))
            arr = np.asarray(shds)
            print(f"{n:>6} {alpha:>6} {arr.mean():>9.2f} {arr.max():>4} "
                  f"{(arr <= 4).mean():>5.0%}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
