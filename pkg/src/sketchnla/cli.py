"""Command-line entry points: regress, lowrank, leverage, bench, synth.

Every command is reproducible: identical flags and seed give byte-identical
output apart from the wall_ms column. Bad flags exit 2, solver failures
exit 3.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import io as mio
from ._validation import resolve_seed
from .leverage import approx_leverage_scores
from .linalg import exact_leverage_scores
from .lowrank import best_rank_k_error, low_rank_approx
from .lp import LpParams, lp_regress
from .regress import (
    SolverError,
    cgnr_solve,
    generalized_regression,
    nonneg_regression,
    precondition,
    richardson_solve,
    sketch_solve_ls,
)
from .synth import write_corpus

log = logging.getLogger("sketchnla")

BENCH_HEADER = (
    "matrix_id,n,d,nnz,k,t_r,t_s,err_ratio_minus_1,cond_su,capped,seed,wall_ms"
)


def bench_grid(d: int) -> list[int]:
    """t_R values floor(1.6^z - 0.5) for z >= 1 while t_R <= d/5."""
    grid, z = [], 1
    while True:
        t = math.floor(1.6**z - 0.5)
        if t > d / 5:
            break
        if t >= 1 and (not grid or t != grid[-1]):
            grid.append(t)
        z += 1
    return grid


def pareto_curve(points, quantile: float = 0.99):
    """1%-Pareto curve: at x, the `quantile` of y over points with x_j <= x.

    A running max keeps the curve monotone by construction (raising y only
    makes the at-most-1%-better condition more conservative).
    """
    pts = sorted(points)
    xs = sorted({x for x, _ in pts})
    curve = []
    best = -np.inf
    for x in xs:
        ys = [y for xj, y in pts if xj <= x]
        best = max(best, float(np.quantile(ys, quantile)))
        curve.append((x, best))
    return curve


def _load_input(path):
    return mio.load_matrix_market(path)


def cmd_regress(args) -> int:
    a = _load_input(args.input)
    b = mio.load_dense(args.rhs)
    seed = resolve_seed(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    if args.method == "sketch":
        sol = sketch_solve_ls(a, b, args.eps, seed)
    elif args.method == "coreset":
        sol, _ = generalized_regression(a, b, args.eps, seed)
    elif args.method in ("richardson", "cgnr"):
        pre = precondition(a, min(args.eps, 0.5), seed)
        solve = richardson_solve if args.method == "richardson" else cgnr_solve
        sol = solve(a, pre, b, args.eps)
    elif args.method == "nnls":
        sol = nonneg_regression(a, b, args.eps, seed)
    else:  # lp
        sol = lp_regress(a, b, LpParams(p=args.p, eps=args.eps, seed=seed))
    wall_ms = 1000.0 * (time.perf_counter() - t0)
    mio.save_dense(out / "solution.mtx", sol.x)
    if sol.coreset is not None:
        sol.coreset.save_csv(out / "coreset.csv")
    telemetry = {
        "method": sol.method,
        "eps": args.eps,
        "seed": seed,
        "sketch_dim": sol.sketch_dim,
        "iterations": sol.iterations,
        "residual": sol.residual_norm,
        "residual_history": list(sol.residual_history),
        "wall_ms": wall_ms,
    }
    (out / "telemetry.json").write_text(json.dumps(telemetry, indent=2) + "\n")
    return 0


def cmd_lowrank(args) -> int:
    a = _load_input(args.input)
    seed = resolve_seed(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    res = low_rank_approx(a, args.k, args.eps, seed, strategy=args.strategy)
    wall_ms = 1000.0 * (time.perf_counter() - t0)
    mio.save_dense(out / "l.mtx", res.factors.l)
    mio.save_dense(out / "d.mtx", np.diag(res.factors.d))
    mio.save_dense(out / "w.mtx", res.factors.w)
    manifest = {
        "k": args.k,
        "eps": args.eps,
        "seed": seed,
        "strategy": args.strategy,
        "err": res.err,
        "t_r": res.t_r,
        "t_s": res.t_s,
        "cond_su": res.cond_su,
        "wall_ms": wall_ms,
    }
    if args.oracle:
        from .linalg import frobenius_norm

        delta_k = best_rank_k_error(a, args.k)
        manifest["delta_k"] = delta_k
        # Guard the denominator: for (near-)rank-k inputs delta_k is noise.
        manifest["ratio"] = res.err / max(delta_k, 1e-8 * frobenius_norm(a))
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return 0


def cmd_leverage(args) -> int:
    a = _load_input(args.input)
    seed = resolve_seed(args.seed)
    if args.exact:
        scores = exact_leverage_scores(a)
    else:
        scores = approx_leverage_scores(
            a, args.eps, args.repetitions, seed
        ).scores
    with open(args.out, "w") as fh:
        fh.write("index,score\n")
        for i, s in enumerate(scores):
            fh.write(f"{i},{float(s)!r}\n")
    return 0


def _bench_one(path, index, k, trials, root_seed, eps, cond_cap):
    """All records for one corpus matrix; returns [] on a read failure."""
    try:
        a = mio.load_matrix_market(path)
    except (OSError, mio.MatrixMarketError) as exc:
        log.warning("skipping %s: %s", path, exc)
        return []
    n, d = a.shape
    if k > min(n, d):
        log.warning("skipping %s: k=%d exceeds min dimension", path, k)
        return []
    from .linalg import frobenius_norm

    delta_k = best_rank_k_error(a, k)
    denom = max(delta_k, 1e-8 * frobenius_norm(a))
    records = []
    for t_r in bench_grid(d):
        for trial in range(trials):
            seed = int(
                np.random.SeedSequence(
                    root_seed, spawn_key=(index, t_r, trial)
                ).generate_state(1)[0]
            )
            t0 = time.perf_counter()
            res = low_rank_approx(
                a,
                k,
                eps,
                seed,
                strategy="leverage_sample",
                t_r=t_r,
                cond_cap=cond_cap,
            )
            wall_ms = 1000.0 * (time.perf_counter() - t0)
            ratio_minus_1 = max((res.err - delta_k) / denom, -1e-10)
            records.append(
                {
                    "matrix_id": Path(path).stem,
                    "n": n,
                    "d": d,
                    "nnz": int(a.nnz),
                    "k": k,
                    "t_r": t_r,
                    "t_s": res.t_s,
                    "err_ratio_minus_1": ratio_minus_1,
                    "cond_su": res.cond_su,
                    "capped": res.capped,
                    "seed": seed,
                    "wall_ms": wall_ms,
                }
            )
    return records


def cmd_bench(args) -> int:
    paths = sorted(Path(args.corpus).glob("*.mtx"))
    root_seed = resolve_seed(args.seed)
    jobs = max(1, args.jobs)
    work = [
        (path, i, args.k, args.trials, root_seed, args.eps, args.cond_cap)
        for i, path in enumerate(paths)
    ]
    if jobs == 1:
        chunks = [_bench_one(*w) for w in work]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(lambda w: _bench_one(*w), work))
    records = [r for chunk in chunks for r in chunk]
    if not records:
        print("bench: no matrix could be processed", file=sys.stderr)
        return 3
    records.sort(key=lambda r: (r["matrix_id"], r["t_r"], r["seed"]))
    with open(args.out, "w") as fh:
        fh.write(BENCH_HEADER + "\n")
        for r in records:
            fh.write(
                f"{r['matrix_id']},{r['n']},{r['d']},{r['nnz']},{r['k']},"
                f"{r['t_r']},{r['t_s']},{r['err_ratio_minus_1']!r},"
                f"{r['cond_su']!r},{str(r['capped']).lower()},{r['seed']},"
                f"{r['wall_ms']!r}\n"
            )
    err_pts = [(r["k"] / r["t_r"], r["err_ratio_minus_1"]) for r in records]
    cond_pts = [
        (r["t_r"] / r["t_s"], r["cond_su"] - 1.0) for r in records if r["t_s"] > 0
    ]
    pareto_path = Path(args.out).with_suffix(".pareto.csv")
    with open(pareto_path, "w") as fh:
        fh.write("curve,x,y\n")
        for x, y in pareto_curve(err_pts):
            fh.write(f"err,{x!r},{y!r}\n")
        for x, y in pareto_curve(cond_pts):
            fh.write(f"cond,{x!r},{y!r}\n")
    return 0


def cmd_synth(args) -> int:
    write_corpus(args.out, count=args.count, d=args.d, seed=resolve_seed(args.seed))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sketchnla")
    sub = p.add_subparsers(dest="command", required=True)

    pr = sub.add_parser("regress", help="solve a regression problem")
    pr.add_argument("--input", required=True, help="A as coordinate .mtx")
    pr.add_argument("--rhs", required=True, help="b as .mtx (array or coordinate)")
    pr.add_argument(
        "--method",
        required=True,
        choices=["sketch", "coreset", "cgnr", "richardson", "nnls", "lp"],
    )
    pr.add_argument("--eps", type=float, default=0.5)
    pr.add_argument("--seed", type=int, default=None)
    pr.add_argument("--p", type=float, default=2.0, help="norm for method=lp")
    pr.add_argument("--out", required=True)
    pr.set_defaults(func=cmd_regress)

    pl = sub.add_parser("lowrank", help="rank-k approximation")
    pl.add_argument("--input", required=True)
    pl.add_argument("--k", type=int, required=True)
    pl.add_argument("--eps", type=float, default=0.5)
    pl.add_argument("--seed", type=int, default=None)
    pl.add_argument(
        "--strategy", choices=["srht_compose", "leverage_sample"], default="srht_compose"
    )
    pl.add_argument("--oracle", action="store_true", help="also compute delta_k")
    pl.add_argument("--out", required=True)
    pl.set_defaults(func=cmd_lowrank)

    pv = sub.add_parser("leverage", help="approximate leverage scores")
    pv.add_argument("--input", required=True)
    pv.add_argument("--eps", type=float, default=0.5)
    pv.add_argument("--repetitions", type=int, default=5)
    pv.add_argument("--seed", type=int, default=None)
    pv.add_argument("--exact", action="store_true", help="emit the exact oracle scores")
    pv.add_argument("--out", required=True)
    pv.set_defaults(func=cmd_leverage)

    pb = sub.add_parser("bench", help="low-rank benchmark over a corpus")
    pb.add_argument("--corpus", required=True, help="directory of .mtx files")
    pb.add_argument("--k", type=int, required=True)
    pb.add_argument("--trials", type=int, default=3)
    pb.add_argument("--seed", type=int, default=None)
    pb.add_argument("--eps", type=float, default=0.5)
    pb.add_argument("--cond-cap", type=float, default=1.2, dest="cond_cap")
    pb.add_argument("--jobs", type=int, default=1)
    pb.add_argument("--out", required=True)
    pb.set_defaults(func=cmd_bench)

    ps = sub.add_parser("synth", help="generate a synthetic corpus")
    ps.add_argument("--out", required=True)
    ps.add_argument("--count", type=int, default=20)
    ps.add_argument("--d", type=int, default=120)
    ps.add_argument("--seed", type=int, default=None)
    ps.set_defaults(func=cmd_synth)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, stream=sys.stderr)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, mio.MatrixMarketError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SolverError, np.linalg.LinAlgError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
