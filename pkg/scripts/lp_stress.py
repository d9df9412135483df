"""Stress the phase-1 solver on constructed instances with known answers.

Feasible instances come from twirled Gram matrices; infeasible ones from
random pairs with tr H > tr G on the 5-ring. Prints counts per graph and the
largest re-checked residual.
"""
from __future__ import annotations

import argparse
import time
from dataclasses import dataclass, field

import numpy as np

from sepconv.feasibility import Verdict, sep1_feasible
from sepconv.instances import GRAPHS, random_pair_instance, twirl_instance


@dataclass
class StressConfig:
    trials: int = 200
    seed: int = 0
    graphs: list[str] = field(default_factory=lambda: sorted(GRAPHS))


def run(cfg: StressConfig) -> dict:
    rng = np.random.default_rng(cfg.seed)
    out = {}
    for name in cfg.graphs:
        t0 = time.perf_counter()
        counts = {v.value: 0 for v in Verdict}
        worst = 0.0
        for _ in range(cfg.trials):
            rep = sep1_feasible(twirl_instance(rng, name).inst)
            counts[rep.verdict.value] += 1
            if rep.verdict is Verdict.FEASIBLE:
                worst = max(worst, rep.residual)
        out[name] = {"counts": counts, "worst_residual": worst, "seconds": time.perf_counter() - t0}
    refuted = sum(sep1_feasible(random_pair_instance(rng)).verdict is Verdict.INFEASIBLE
                  for _ in range(cfg.trials))
    out["ring5 tr H > tr G"] = {"counts": {"Infeasible": refuted}, "worst_residual": float("nan"), "seconds": 0.0}
    return out


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--trials", type=int, default=StressConfig.trials)
    p.add_argument("--seed", type=int, default=StressConfig.seed)
    p.add_argument("--graphs", nargs="*", default=None, choices=sorted(GRAPHS))
    args = p.parse_args()
    cfg = StressConfig(args.trials, args.seed)
    if args.graphs:
        cfg.graphs = args.graphs
    for name, r in run(cfg).items():
        counts = ", ".join(f"{k} {v}" for k, v in r["counts"].items() if v)
        print(f"{name:>18}: {counts}; max residual {r['worst_residual']:.1e}; {r['seconds']:.2f}s")


if __name__ == "__main__":
    main()
