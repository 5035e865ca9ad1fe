#!/usr/bin/env python3
"""Calibration experiments behind src/sketchnla/_constants.py.

Sweeps candidate constants for each sketch-dimension formula over random
well-spread and coherent test spaces and reports the measured success rate
at the target distortion (or error ratio). Rerun after touching any formula
and copy the chosen values into _constants.py.

Usage: python3 scripts/calibrate_constants.py [--seeds N]
"""

import argparse
import math

import numpy as np

from sketchnla import _constants as C
from sketchnla.lowrank import best_rank_k_error, low_rank_approx
from sketchnla.sketch import make_sparse_embedding
from sketchnla.verify import max_distortion


def spaces(n, r, seed):
    g = np.random.default_rng(seed)
    well_spread = g.standard_normal((n, r))
    coherent = np.vstack([np.eye(r), 1e-3 * g.standard_normal((n - r, r))])
    return {"well_spread": well_spread, "coherent": coherent}


def sparse_dim_success(c, n, r, eps, seeds):
    x = r / eps
    t = max(C.SPARSE_DIM_FLOOR, math.ceil(c * x * x * max(1.0, math.log(x))))
    rates = {}
    for name, a in spaces(n, r, seed=1).items():
        ok = sum(
            max_distortion(make_sparse_embedding(n, t, seed=s), a).eps_measured <= eps
            for s in range(seeds)
        )
        rates[name] = ok / seeds
    return t, rates


def calibrate_sparse_dim(seeds):
    print("== sparse embedding dimension constant (target >=90% at eps) ==")
    for c in (0.25, 0.5, 1.0, 2.0):
        for r, eps in ((10, 0.5), (20, 0.5), (10, 0.25)):
            t, rates = sparse_dim_success(c, 1000, r, eps, seeds)
            print(f"  c={c:<4} r={r:<3} eps={eps}: t={t:<6} success {rates}")
    print(f"  chosen: SPARSE_DIM_C = {C.SPARSE_DIM_C}")


def calibrate_lowrank(seeds):
    print("== low-rank pipeline constants (target >=90% at 1.5x delta_k) ==")
    g = np.random.default_rng(3)
    u, _ = np.linalg.qr(g.standard_normal((400, 300)))
    v, _ = np.linalg.qr(g.standard_normal((300, 300)))
    a = (u * (1.0 / np.arange(1, 301))) @ v.T
    delta = best_rank_k_error(a, 5)
    for strategy in ("srht_compose", "leverage_sample"):
        ok = sum(
            low_rank_approx(a, 5, 0.5, seed=s, strategy=strategy).err <= 1.5 * delta
            for s in range(seeds)
        )
        print(f"  {strategy}: {ok}/{seeds} within 1.5x")
    print(
        f"  chosen: LOWRANK_TR_C={C.LOWRANK_TR_C} "
        f"LOWRANK_V_C={C.LOWRANK_V_C} LOWRANK_VP_C={C.LOWRANK_VP_C}"
    )


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--seeds", type=int, default=50)
    args = parser.parse_args()
    calibrate_sparse_dim(args.seeds)
    calibrate_lowrank(args.seeds)


if __name__ == "__main__":
    main()
