"""Randomized rank-k approximation: A ~= L diag(d) W^T with (1+eps) error.

Five steps: sketch the row space (A R^T), orthonormalize to U, sketch the
affine regression min_rank-k ||UX - A|| down with S, solve the small problem
through an SVD of SU and a rank-k truncation, and rotate back. The affine
sketch S is either a composed sparse-embedding/SRHT or a leverage-score
sampler on the rows of U grown until SU is well conditioned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import _constants as C
from ._validation import as_matrix, check_count, check_eps
from .linalg import (
    DEFAULT_TOL,
    Tolerances,
    best_rank_k,
    condition_number,
    frobenius_norm,
    orthonormal_basis,
    thin_svd,
)
from .sketch import (
    SketchOperator,
    apply_right,
    compose,
    default_sparse_dim,
    make_leverage_sampler,
    sparse_embedding_or_identity,
    srht_or_identity,
)

STRATEGIES = ("srht_compose", "leverage_sample")
DENSE_RESIDUAL_LIMIT = 4_000_000  # entries; above this use the Gram identity


@dataclass(frozen=True)
class LowRankFactors:
    l: np.ndarray  # n x k, orthonormal columns
    d: np.ndarray  # k non-negative, non-increasing
    w: np.ndarray  # n' x k, orthonormal columns
    k: int


@dataclass(frozen=True)
class LowRankResult:
    factors: LowRankFactors
    err: float  # ||A - L diag(d) W^T||_F on the original data
    cond_su: float
    t_r: int
    t_s: int
    strategy: str
    seed: int
    capped: bool = False


def sketch_dims_lowrank(k: int, eps: float) -> tuple[int, int, int]:
    """(t_r, v, v_prime): row-space sketch width and affine-sketch dims."""
    k = check_count(k, "k")
    eps = check_eps(eps)
    x = k / eps
    t_r = max(k + 1, math.ceil(C.LOWRANK_TR_C * x * max(1.0, math.log(x))))
    return (t_r,) + _affine_dims(t_r, eps)


def _affine_dims(t_r: int, eps: float) -> tuple[int, int]:
    y = t_r / eps
    v = max(t_r + 1, math.ceil(C.LOWRANK_V_C * y * y * max(1.0, math.log(y))))
    v_prime = max(t_r + 1, math.ceil(C.LOWRANK_VP_C * y * max(1.0, math.log(y)) ** 2))
    return v, min(v_prime, v)


def truncate_rank_k(m, k: int, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Best Frobenius rank-k approximation by SVD truncation."""
    f = thin_svd(m, tol)
    k = check_count(k, "k", minimum=0)
    if k > min(m.shape):
        raise ValueError(f"k={k} out of range for shape {m.shape}")
    return (f.u[:, :k] * f.sigma[:k]) @ f.v[:, :k].T


def _pad_orthonormal(q: np.ndarray, k: int, seed: int) -> np.ndarray:
    """Extend q with orthonormal columns orthogonal to the existing ones."""
    n, have = q.shape
    if have >= k:
        return q[:, :k]
    rng = np.random.default_rng(seed)
    extra = rng.standard_normal((n, k - have))
    extra -= q @ (q.T @ extra)
    extra, _ = np.linalg.qr(extra)
    return np.hstack([q, extra[:, : k - have]])


def _residual_norm(a, l, d, w) -> float:
    n, n_cols = a.shape
    if n * n_cols <= DENSE_RESIDUAL_LIMIT:
        dense = a.toarray() if sp.issparse(a) else a
        return float(np.linalg.norm(dense - (l * d) @ w.T, "fro"))
    # ||A - LDW^T||^2 = ||A||^2 - 2 <A, LDW^T> + sum d^2 for orthonormal L, W.
    cross = np.einsum("ij,ij->", np.asarray(a @ (w * d)), l)
    val = frobenius_norm(a) ** 2 - 2.0 * cross + float(np.sum(d**2))
    return float(math.sqrt(max(val, 0.0)))


def low_rank_approx(
    a,
    k: int,
    eps: float,
    seed: int = 0,
    strategy: str = "srht_compose",
    t_r: int | None = None,
    cond_cap: float = 1.2,
    t_s_cap_ratio: float = 110.0,
    r_op: SketchOperator | None = None,
    s_op: SketchOperator | None = None,
    tol: Tolerances = DEFAULT_TOL,
) -> LowRankResult:
    """Rank-k factors with ||A - LDW^T||_F <= (1+eps) Delta_k whp.

    ``strategy`` picks the affine sketch: "srht_compose" composes a sparse
    embedding with an SRHT; "leverage_sample" samples rows of U with exact
    (U is orthonormal) leverage probabilities, doubling the sample until
    cond(SU) <= cond_cap or the t_s cap is hit. ``r_op``/``s_op`` override
    the sketches (full-isometry hooks in tests).
    """
    a = as_matrix(a)
    n, n_cols = a.shape
    k = check_count(k, "k")
    if k > min(n, n_cols):
        raise ValueError(f"k={k} out of range for shape {a.shape}")
    eps = check_eps(eps)
    if strategy not in STRATEGIES:
        raise ValueError(f"strategy must be one of {STRATEGIES}, got {strategy!r}")
    dims_t_r, v, v_prime = sketch_dims_lowrank(k, eps)
    if t_r is None:
        t_r = dims_t_r
    else:
        t_r = check_count(t_r, "t_r")
        v, v_prime = _affine_dims(t_r, eps)

    def stream(j):
        return int(
            np.random.SeedSequence(int(seed), spawn_key=(7, j)).generate_state(1)[0]
        )

    # Step 1: row-space sketch and orthonormal basis of C(A R^T).
    if r_op is None:
        if strategy == "srht_compose":
            t_hat = min(max(2 * t_r, default_sparse_dim(k, eps)), n_cols)
            inner = sparse_embedding_or_identity(n_cols, t_hat, stream(1))
            r_op = compose(srht_or_identity(inner.output_dim, t_r, stream(0)), inner)
        else:
            r_op = sparse_embedding_or_identity(n_cols, t_r, stream(1))
    y = apply_right(a, r_op)
    u = orthonormal_basis(y, tol)
    if u.shape[1] == 0:
        factors = LowRankFactors(
            l=_pad_orthonormal(np.zeros((n, 0)), k, stream(9)),
            d=np.zeros(k),
            w=_pad_orthonormal(np.zeros((n_cols, 0)), k, stream(10)),
            k=k,
        )
        return LowRankResult(
            factors, frobenius_norm(a), 1.0, t_r, 0, strategy, int(seed)
        )

    # Step 2: affine sketch of (U, A).
    capped = False
    if s_op is not None:
        su = s_op.apply(u)
        sa = s_op.apply(a)
        t_s = s_op.output_dim
        cond_su = condition_number(su, tol)
    elif strategy == "srht_compose":
        inner = sparse_embedding_or_identity(n, min(v, n), stream(3))
        s_op = compose(
            srht_or_identity(inner.output_dim, v_prime, stream(2)), inner
        )
        su = s_op.apply(u)
        sa = s_op.apply(a)
        t_s = s_op.output_dim
        cond_su = condition_number(su, tol)
    else:
        probs = np.einsum("ij,ij->i", u, u)
        probs = probs / probs.sum()
        t_s = max(2 * t_r, 2 * k, 8)
        cap = max(t_s, math.ceil(t_s_cap_ratio * t_r))
        attempt = 0
        while True:
            sampler = make_leverage_sampler(probs, t_s, stream(20 + attempt))
            su = sampler.apply(u)
            cond_su = condition_number(su, tol)
            if cond_su <= cond_cap or t_s >= cap:
                capped = cond_su > cond_cap
                break
            t_s = min(2 * t_s, cap)
            attempt += 1
        sa = sampler.apply(a)
        s_op = sampler

    # Steps 3-5: SVD of SU, rank-k truncation, rotate back.
    f = thin_svd(su, tol)
    ut_sa = f.u[:, : f.rank].T @ sa
    x_hat = truncate_rank_k(ut_sa, min(k, min(ut_sa.shape)), tol)
    t_mat = (f.v[:, : f.rank] / f.sigma[: f.rank]) @ x_hat
    g = thin_svd(t_mat, tol)
    k_eff = min(k, g.rank)
    l = _pad_orthonormal(u @ g.u[:, :k_eff], k, stream(9))
    w = _pad_orthonormal(g.v[:, :k_eff], k, stream(10))
    d = np.zeros(k)
    d[:k_eff] = g.sigma[:k_eff]
    factors = LowRankFactors(l=l, d=d, w=w, k=k)
    err = _residual_norm(a, l, d, w)
    return LowRankResult(
        factors, err, float(cond_su), t_r, t_s, strategy, int(seed), capped
    )


def best_rank_k_error(a, k: int, tol: Tolerances = DEFAULT_TOL) -> float:
    """Delta_k = ||A - [A]_k||_F via the exact truncated SVD."""
    a = as_matrix(a)
    dense = a.toarray() if sp.issparse(a) else a
    _, _, _, delta_k = best_rank_k(dense, k, tol)
    return delta_k
