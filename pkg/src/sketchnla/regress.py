"""Least-squares solvers built on sketching.

Sketch-and-solve, leverage-score coreset regression, a randomized
preconditioner feeding Richardson and CGNR iterations, and nonnegative
regression through an affine-embedding sketch. Every solver reports its
residual recomputed on the original data, never on the sketch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _constants as C
from ._validation import as_dense, as_matrix, check_eps, check_same_rows
from .linalg import (
    DEFAULT_TOL,
    Tolerances,
    pivoted_qr_rank,
    pseudoinverse_solve,
)
from .leverage import approx_leverage_scores, sampling_probs_from_scores
from .sketch import (
    SketchOperator,
    compose,
    default_sparse_dim,
    default_srht_dim,
    make_leverage_sampler,
    sparse_embedding_or_identity,
    srht_or_identity,
)


class SolverError(RuntimeError):
    """Raised when an iterative or active-set solve fails to converge."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class Coreset:
    rows: list  # (row index, weight) pairs
    size: int

    def save_csv(self, path) -> None:
        with open(str(path), "w") as fh:
            fh.write("row,weight\n")
            for idx, weight in self.rows:
                fh.write(f"{idx},{float(weight)!r}\n")


@dataclass(frozen=True)
class RegressionSolution:
    x: np.ndarray
    residual_norm: float  # on the original data, never the sketch
    method: str
    sketch_dim: int
    seed: int
    iterations: int = 0
    residual_history: tuple = ()
    coreset: Coreset | None = None


@dataclass(frozen=True)
class Preconditioner:
    r_inv: np.ndarray  # maps preconditioned coordinates back, d x rank
    eps0: float
    seed: int
    rank: int
    sketch_dim: int


def _seed_stream(seed: int, *key: int) -> int:
    return int(np.random.SeedSequence(int(seed), spawn_key=key).generate_state(1)[0])


def _residual_fro(a, x, b) -> float:
    return float(np.linalg.norm(np.asarray(a @ x) - b, "fro"))


def sketch_solve_ls(
    a,
    b,
    eps: float,
    seed: int = 0,
    operator: SketchOperator | None = None,
    tol: Tolerances = DEFAULT_TOL,
) -> RegressionSolution:
    """Solve min ||Ax - B|| on a sparse-embedding sketch of the joint space.

    The embedding is sized for the column space of A adjoined with B, so the
    sketched minimizer is a (1+eps)-minimizer of the original with the
    construction's probability. ``operator`` overrides the sketch (tests use
    the full-isometry hook here).
    """
    a = as_matrix(a)
    b = as_dense(b)
    check_same_rows(a, b)
    eps = check_eps(eps)
    if operator is None:
        t = default_sparse_dim(a.shape[1] + b.shape[1], eps)
        operator = sparse_embedding_or_identity(a.shape[0], t, seed)
    sa = operator.apply(a)
    sb = operator.apply(b)
    x = pseudoinverse_solve(sa, sb, tol)
    return RegressionSolution(
        x=x,
        residual_norm=_residual_fro(a, x, b),
        method="sketch",
        sketch_dim=operator.output_dim,
        seed=int(seed),
    )


def generalized_regression(
    a,
    b,
    eps: float,
    seed: int = 0,
    tol: Tolerances = DEFAULT_TOL,
):
    """Leverage-score coreset regression for multiple right-hand sides.

    Estimates leverage scores at constant factor, samples
    t = O(r/eps + r log r) rows with replacement, and solves the weighted
    subproblem. Returns the solution and the coreset.
    """
    a = as_matrix(a)
    b = as_dense(b)
    check_same_rows(a, b)
    eps = check_eps(eps)
    scores = approx_leverage_scores(
        a, eps=0.5, repetitions=3, seed=_seed_stream(seed, 0), tol=tol
    )
    r = max(scores.rank, 1)
    probs = sampling_probs_from_scores(scores, r)
    t = math.ceil(C.CORESET_T_C * (r / eps + r * math.log(max(r, 2))))
    sampler = make_leverage_sampler(probs, t, _seed_stream(seed, 1))
    sa = sampler.apply(a)
    sb = sampler.apply(b)
    x = pseudoinverse_solve(sa, sb, tol)
    coreset = Coreset(
        rows=list(zip(sampler.picks.tolist(), sampler.weights.tolist())), size=t
    )
    solution = RegressionSolution(
        x=x,
        residual_norm=_residual_fro(a, x, b),
        method="coreset",
        sketch_dim=t,
        seed=int(seed),
        coreset=coreset,
    )
    return solution, coreset


def precondition(
    a, eps0: float, seed: int = 0, tol: Tolerances = DEFAULT_TOL
) -> Preconditioner:
    """Build R with kappa(A @ R) <= (1+eps0)/(1-eps0) from a two-stage sketch.

    A sparse embedding followed by an SRHT (each sized at eps0/2) embeds
    C(A); a column-pivoted QR of the sketched matrix yields the change of
    basis, truncated to the detected numerical rank.
    """
    a = as_matrix(a)
    if not (0.0 < eps0 <= 0.5):
        raise ValueError(f"eps0 must be in (0, 0.5], got {eps0}")
    n, d = a.shape
    t1 = default_sparse_dim(d, eps0 / 2)
    s = sparse_embedding_or_identity(n, t1, _seed_stream(seed, 0))
    sa = s.apply(a)
    _, _, _, rank = pivoted_qr_rank(sa, tol)
    if rank == 0:
        raise ValueError("cannot precondition a zero matrix")
    rows = sa.shape[0]
    t2 = default_srht_dim(rank, eps0 / 2, rows)
    f = srht_or_identity(rows, t2, _seed_stream(seed, 1))
    sketched = f.apply(sa)
    q, r_mat, perm, rank2 = pivoted_qr_rank(sketched, tol)
    r11_inv = np.linalg.inv(r_mat[:rank2, :rank2])
    r_inv = np.zeros((d, rank2))
    r_inv[perm[:rank2]] = r11_inv
    return Preconditioner(
        r_inv=r_inv, eps0=eps0, seed=int(seed), rank=rank2, sketch_dim=f.output_dim
    )


def _iterate(
    a, pre: Preconditioner, b, eps: float, max_iter: int, step_fn, method: str
) -> RegressionSolution:
    """Shared driver: iterate in preconditioned coordinates, map back."""
    a = as_matrix(a)
    b = as_dense(b)
    check_same_rows(a, b)
    eps = check_eps(eps)
    m = np.asarray(a @ pre.r_inv)  # n x rank; AR in the preconditioned system
    state = step_fn(m, b)  # generator yielding iterates y
    y = np.zeros((pre.rank, b.shape[1]))
    res = float(np.linalg.norm(b, "fro"))
    history = [res]
    floor = 1e-14 * max(res, 1.0)  # noise floor; below it jitter is meaningless
    grew = 0
    iterations = 0
    for y in state:
        iterations += 1
        new_res = float(np.linalg.norm(m @ y - b, "fro"))
        history.append(new_res)
        if new_res > floor and new_res > history[-2] * (1 + 1e-9):
            grew += 1
            if grew >= 2:
                raise SolverError(
                    f"{method} diverged: residual grew twice in a row; "
                    "the preconditioner did not capture the column space",
                    best=pre.r_inv @ y,
                )
        else:
            grew = 0
        if new_res <= floor:
            break
        if history[-2] > 0 and abs(new_res - history[-2]) <= (eps / 10) * history[-2]:
            break
        if iterations >= max_iter:
            break
    x = pre.r_inv @ y
    return RegressionSolution(
        x=x,
        residual_norm=_residual_fro(a, x, b),
        method=method,
        sketch_dim=pre.sketch_dim,
        seed=pre.seed,
        iterations=iterations,
        residual_history=tuple(history),
    )


def richardson_solve(
    a, pre: Preconditioner, b, eps: float, max_iter: int = 100
) -> RegressionSolution:
    """Iterative refinement y <- y + M^T (b - M y) for M = A R.

    Contracts the preconditioned error by a factor <= 3*eps0 per step when
    the preconditioner succeeded.
    """

    def steps(m, b2):
        y = np.zeros((m.shape[1], b2.shape[1]))
        while True:
            y = y + m.T @ (b2 - m @ y)
            yield y

    return _iterate(a, pre, b, eps, max_iter, steps, "richardson")


def cgnr_solve(
    a, pre: Preconditioner, b, eps: float, max_iter: int = 100
) -> RegressionSolution:
    """Conjugate gradient on the normal equations of M = A R.

    Residual norms are non-increasing; for a rank-r system the exact
    solution is reached within r iterations in exact arithmetic.
    """

    def steps(m, b2):
        y = np.zeros((m.shape[1], b2.shape[1]))
        r = b2 - m @ y
        z = m.T @ r
        p = z.copy()
        zz = np.einsum("ij,ij->j", z, z)
        while True:
            mp = m @ p
            denom = np.einsum("ij,ij->j", mp, mp)
            alpha = np.where(denom > 0, zz / np.maximum(denom, 1e-300), 0.0)
            y = y + p * alpha
            r = r - mp * alpha
            z = m.T @ r
            zz_new = np.einsum("ij,ij->j", z, z)
            beta = np.where(zz > 0, zz_new / np.maximum(zz, 1e-300), 0.0)
            p = z + p * beta
            zz = zz_new
            yield y

    return _iterate(a, pre, b, eps, max_iter, steps, "cgnr")


def lawson_hanson_nnls(m, y, dual_tol: float = 1e-8, max_passes: int | None = None):
    """Classical active-set NNLS: min ||m x - y|| subject to x >= 0.

    Stops at dual feasibility max_i w_i <= dual_tol * scale. Raises
    SolverError after the pass cap.
    """
    m = as_dense(m)
    y = np.asarray(y, dtype=np.float64).ravel()
    n, d = m.shape
    if max_passes is None:
        max_passes = 10 * d + 50
    x = np.zeros(d)
    passive = np.zeros(d, dtype=bool)
    w = m.T @ (y - m @ x)
    scale = max(np.abs(w).max(initial=0.0), 1.0)
    passes = 0
    while True:
        inactive = ~passive
        if not inactive.any() or w[inactive].max(initial=-np.inf) <= dual_tol * scale:
            return x
        passes += 1
        if passes > max_passes:
            raise SolverError("NNLS did not converge within the pass cap", best=x)
        j = np.flatnonzero(inactive)[np.argmax(w[inactive])]
        passive[j] = True
        while True:
            z = np.zeros(d)
            cols = np.flatnonzero(passive)
            z[cols] = np.linalg.lstsq(m[:, cols], y, rcond=None)[0]
            if z[cols].min(initial=np.inf) > 0:
                x = z
                break
            # Step toward z until the first passive coordinate hits zero.
            neg = cols[z[cols] <= 0]
            denom = np.maximum(x[neg] - z[neg], 1e-300)
            alpha = np.min(x[neg] / denom)
            x = x + alpha * (z - x)
            passive &= x > 1e-14
        w = m.T @ (y - m @ x)


def nonneg_regression(
    a,
    b,
    eps: float,
    seed: int = 0,
    operator: SketchOperator | None = None,
) -> RegressionSolution:
    """min_{X >= 0} ||AX - B|| via an affine-embedding sketch.

    The sketch composes a sparse embedding with an SRHT, each targeted at
    eps/3 so the composite preserves ||AX - B||^2 to (1 +- eps) over all X.
    The sketched problem is solved per column by Lawson-Hanson NNLS.
    """
    a = as_matrix(a)
    b = as_dense(b)
    check_same_rows(a, b)
    eps = check_eps(eps)
    if operator is None:
        joint = a.shape[1] + b.shape[1]
        n = a.shape[0]
        t1 = min(default_sparse_dim(joint, eps / 3), n)
        inner = sparse_embedding_or_identity(n, t1, _seed_stream(seed, 0))
        t2 = default_srht_dim(joint, eps / 3, inner.output_dim)
        operator = compose(
            srht_or_identity(inner.output_dim, t2, _seed_stream(seed, 1)), inner
        )
    sa = operator.apply(a)
    sb = operator.apply(b)
    x = np.column_stack(
        [lawson_hanson_nnls(sa, sb[:, j]) for j in range(sb.shape[1])]
    )
    return RegressionSolution(
        x=x,
        residual_norm=_residual_fro(a, x, b),
        method="nnls",
        sketch_dim=operator.output_dim,
        seed=int(seed),
    )
