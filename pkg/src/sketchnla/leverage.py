"""Approximate leverage scores in roughly input-sparsity time.

Per repetition: sketch A with a sparse embedding, reduce further with an
SRHT, read a change-of-basis matrix off a column-pivoted QR of the sketch,
then estimate the squared row norms of A in that basis with a Gaussian JL
probe. Repetitions are aggregated by coordinate-wise median.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _constants as C
from ._validation import as_matrix, check_count, check_eps
from .linalg import DEFAULT_TOL, Tolerances, pivoted_qr_rank
from .sketch import (
    default_sparse_dim,
    make_gaussian_jl,
    sparse_embedding_or_identity,
    srht_or_identity,
)


@dataclass(frozen=True)
class LeverageScores:
    scores: np.ndarray
    eps: float
    repetitions: int
    seed: int
    rank: int


def _basis_change(sketched, tol: Tolerances):
    """N with sketched @ N orthonormal, from a column-pivoted QR.

    Returns (N, rank); N is d x rank, zero off the pivot rows.
    """
    _, r, perm, rank = pivoted_qr_rank(sketched, tol)
    if rank == 0:
        return np.zeros((sketched.shape[1], 0)), 0
    r11_inv = np.linalg.inv(r[:rank, :rank])
    n_mat = np.zeros((sketched.shape[1], rank))
    n_mat[perm[:rank]] = r11_inv
    return n_mat, rank


def approx_leverage_scores(
    a,
    eps: float,
    repetitions: int = 5,
    seed: int = 0,
    tol: Tolerances = DEFAULT_TOL,
) -> LeverageScores:
    """Estimate all leverage scores of A to relative error ~eps.

    Each repetition succeeds with constant probability; the coordinate-wise
    median across an odd number of repetitions amplifies that.
    """
    eps = check_eps(eps)
    repetitions = check_count(repetitions, "repetitions")
    if repetitions % 2 == 0:
        raise ValueError("repetitions must be odd for a median to amplify")
    a = as_matrix(a)
    n, d = a.shape

    per_rep = np.zeros((repetitions, n))
    ranks = []
    for rep in range(repetitions):
        rep_seed = np.random.SeedSequence(int(seed), spawn_key=(100 + rep,))
        sub = rep_seed.generate_state(3)
        s = sparse_embedding_or_identity(n, default_t1(d), int(sub[0]))
        sa = s.apply(a)
        # Rank detected on the sketch stands in for exact rank preprocessing.
        _, _, _, rank = pivoted_qr_rank(sa, tol)
        if rank == 0:
            ranks.append(0)
            continue
        f = srht_or_identity(sa.shape[0], _srht_rows(rank), int(sub[1]))
        fsa = f.apply(sa)
        n_mat, rank2 = _basis_change(fsa, tol)
        ranks.append(rank2)
        if rank2 == 0:
            continue
        m = max(1, math.ceil(C.LEVERAGE_JL_C * math.log(max(n, 2)) / eps**2))
        g = make_gaussian_jl(m, rank2, int(sub[2]))
        probe = n_mat @ g.entries.T  # d x m
        rows = np.asarray(a @ probe)
        per_rep[rep] = np.einsum("ij,ij->i", rows, rows)

    rank = int(np.median(ranks)) if ranks else 0
    scores = np.median(per_rep, axis=0)
    return LeverageScores(
        scores=scores, eps=eps, repetitions=repetitions, seed=int(seed), rank=rank
    )


def default_t1(d: int) -> int:
    """Sparse-embedding rows for the first leverage stage (rank bound d)."""
    return default_sparse_dim(max(d, 1), 0.25)


def _srht_rows(rank: int) -> int:
    log_r = math.log(max(rank, 2))
    return max(rank + 1, math.ceil(C.LEVERAGE_F_C * rank * log_r * log_r))


def sampling_probs_from_scores(scores: LeverageScores, r: int) -> np.ndarray:
    """Normalized sampling probabilities with p_i >= u_i / 2r up to estimate error."""
    check_count(r, "r")
    raw = np.asarray(scores.scores, dtype=np.float64)
    if raw.size == 0 or np.all(raw <= 0):
        raise ValueError("cannot build sampling probabilities from all-zero scores")
    floored = np.maximum(raw, 1e-12)
    return floored / floored.sum()
