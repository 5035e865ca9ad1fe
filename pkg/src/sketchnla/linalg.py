"""Dense decompositions and exact oracles.

Everything here is deterministic: thin SVD/QR, pseudoinverse least squares,
exact leverage scores, best rank-k truncation, condition numbers. The
randomized modules are tested against these routines, so they must stay
independent of any sketching code.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from ._validation import as_dense, check_same_rows


@dataclass(frozen=True)
class Tolerances:
    """Numerical-rank and orthogonality thresholds."""

    rank_rel_tol: float = 1e-10
    ortho_tol: float = 1e-8

    def __post_init__(self):
        if not (0.0 < self.rank_rel_tol < 1.0) or not (0.0 < self.ortho_tol < 1.0):
            raise ValueError("tolerances must be in (0, 1)")


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class SvdFactors:
    """Thin SVD a = u @ diag(sigma) @ v.T with a detected numerical rank."""

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray
    rank: int


def thin_svd(a, tol: Tolerances = DEFAULT_TOL) -> SvdFactors:
    """Thin SVD with numerical rank = #{sigma_i > rank_rel_tol * sigma_1}.

    LAPACK non-convergence surfaces as ``numpy.linalg.LinAlgError`` rather
    than silent garbage.
    """
    a = as_dense(a)
    u, sigma, vt = np.linalg.svd(a, full_matrices=False)
    if sigma.size == 0 or sigma[0] == 0.0:
        rank = 0
    else:
        rank = int(np.count_nonzero(sigma > tol.rank_rel_tol * sigma[0]))
    return SvdFactors(u=u, sigma=sigma, v=vt.T, rank=rank)


def thin_qr(a):
    """Thin QR of a tall matrix; returns (q, r) with q.T @ q = I."""
    a = as_dense(a)
    if a.shape[0] < a.shape[1]:
        raise ValueError(f"thin_qr needs n_rows >= n_cols, got {a.shape}")
    q, r = np.linalg.qr(a)
    return q, r


def orthonormal_basis(a, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the column space, truncated to numerical rank."""
    f = thin_svd(a, tol)
    return f.u[:, : f.rank]


def pseudoinverse_solve(a, b, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Minimum-norm least-squares solution via SVD pseudoinverse.

    Singular values below ``rank_rel_tol * sigma_1`` are zeroed, so
    rank-deficient systems get the minimum-Frobenius-norm minimizer.
    """
    a = as_dense(a)
    b = as_dense(b)
    check_same_rows(a, b, "a and b")
    f = thin_svd(a, tol)
    if f.rank == 0:
        return np.zeros((a.shape[1], b.shape[1]))
    ur = f.u[:, : f.rank]
    sr = f.sigma[: f.rank]
    vr = f.v[:, : f.rank]
    return vr @ ((ur.T @ b) / sr[:, None])


def exact_least_squares(a, b, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """X* = A^- B; minimizes ||AX-B||_F, minimum norm among minimizers."""
    if sp.issparse(a):
        a = a.toarray()
    return pseudoinverse_solve(a, b, tol)


def exact_leverage_scores(a, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """u_i = squared i-th row norm of an orthonormal basis of C(A).

    Basis-independent; sums to rank(A); each score in [0, 1].
    """
    u = orthonormal_basis(a, tol)
    return np.einsum("ij,ij->i", u, u)


def best_rank_k(a, k: int, tol: Tolerances = DEFAULT_TOL):
    """Truncated SVD factors and the tail error delta_k = ||A - [A]_k||_F.

    Returns ``(l, d, w, delta_k)`` with l, w orthonormal columns (k of them,
    padded if rank < k is impossible here since k <= min dims by precondition)
    and d the top-k singular values.
    """
    a = as_dense(a)
    k = int(k)
    if k < 0 or k > min(a.shape):
        raise ValueError(f"k={k} out of range for shape {a.shape}")
    f = thin_svd(a, tol)
    delta_k = float(np.sqrt(np.sum(f.sigma[k:] ** 2)))
    return f.u[:, :k], f.sigma[:k].copy(), f.v[:, :k], delta_k


def condition_number(a, tol: Tolerances = DEFAULT_TOL) -> float:
    """sigma_max / sigma_min; +inf when numerically rank-deficient."""
    a = as_dense(a)
    sigma = np.linalg.svd(a, compute_uv=False)
    if sigma.size == 0 or sigma[0] == 0.0:
        return float("inf")
    if sigma[-1] <= tol.rank_rel_tol * sigma[0]:
        return float("inf")
    return float(sigma[0] / sigma[-1])


def frobenius_norm(a) -> float:
    if sp.issparse(a):
        return float(np.sqrt(np.sum(a.data**2)))
    return float(np.linalg.norm(a, "fro"))


def pivoted_qr_rank(a, tol: Tolerances = DEFAULT_TOL):
    """Column-pivoted QR with spectral-style rank detection.

    Returns ``(q, r, perm, rank)`` where a[:, perm] = q @ r and rank counts
    diagonal entries of r above ``rank_rel_tol * |r_00|``.
    """
    a = as_dense(a)
    q, r, perm = scipy.linalg.qr(a, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag[0] == 0.0:
        rank = 0
    else:
        rank = int(np.count_nonzero(diag > tol.rank_rel_tol * diag[0]))
    return q, r, perm, rank
