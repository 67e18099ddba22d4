#!/usr/bin/env python3
"""Time the numba and numpy kernel lanes on the moderate-rates preset.

Usage: python benchmarks/bench_backends.py [--paths N] [--repeats K]

Runs the four-valuation SCR workload (central, equity, up, down) per lane
and reports wall times plus the worst disagreement between the lanes.
"""

import argparse
import time

import numpy as np

from alm.backend import available_backends, run_paths
from alm.config import preset
from alm.scenarios import simulate
from alm.valuation import build_inputs, build_market


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--paths", type=int, default=20_000)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    cfg = preset("paper-2pct")
    market = build_market(x0=cfg.x0, theta=cfg.theta, k=cfg.k,
                          sigma_r=cfg.sigma_r, horizon=cfg.horizon + cfg.n,
                          regime=cfg.regime)
    t0 = time.perf_counter()
    scn = simulate(market.central, cfg.equity(), cfg.horizon, args.paths, cfg.seed)
    print(f"simulate {args.paths} paths x {cfg.horizon}y: "
          f"{time.perf_counter() - t0:.2f}s")

    models = {
        "central": (market.central, None),
        "equity": (market.central, cfg.s_eq),
        "up": (market.shocked["ir_up"], None),
        "down": (market.shocked["ir_down"], None),
    }
    inputs = {
        name: build_inputs(scn, model, market.central, cfg.equity(),
                           cfg.liability(), cfg.w_s, cfg.n, s_eq=s_eq)
        for name, (model, s_eq) in models.items()
    }

    results = {}
    for backend in available_backends():
        if backend == "numba":  # compile outside the timed region
            run_paths(inputs["central"], backend=backend)
        best = float("inf")
        for _ in range(args.repeats):
            start = time.perf_counter()
            results[backend] = {
                name: run_paths(inp, backend=backend)
                for name, inp in inputs.items()
            }
            best = min(best, time.perf_counter() - start)
        bof = results[backend]["central"].bof.mean()
        print(f"{backend:6s}: 4 valuations in {best:.2f}s  "
              f"(central BOF {bof:.5f})")

    if len(results) == 2:
        worst = max(
            np.abs(results["numba"][name].bof - results["numpy"][name].bof).max()
            for name in models
        )
        print(f"worst |numba - numpy| per-path BOF gap: {worst:.2e}")


if __name__ == "__main__":
    main()
