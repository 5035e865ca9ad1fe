"""Measured counterparts of the embedding guarantees.

The for-all-x subspace claim is checked spectrally: with U an orthonormal
basis of C(A), the worst relative change of a squared norm under S over the
whole subspace is max(sigma_max(SU)^2 - 1, 1 - sigma_min(SU)^2). That is
exact over the subspace, not sampled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import as_dense, as_matrix, check_same_rows
from .linalg import (
    DEFAULT_TOL,
    Tolerances,
    exact_least_squares,
    frobenius_norm,
    orthonormal_basis,
)
from .sketch import SketchOperator, apply_left


@dataclass(frozen=True)
class DistortionReport:
    eps_measured: float
    sigma_min: float
    sigma_max: float
    t: int
    seed: int


def max_distortion(
    s: SketchOperator, a, tol: Tolerances = DEFAULT_TOL, seed: int = 0
) -> DistortionReport:
    """Worst-case squared-norm distortion of S over the column space of A."""
    a = as_matrix(a)
    u = orthonormal_basis(a, tol)
    if u.shape[1] == 0:
        return DistortionReport(0.0, 1.0, 1.0, s.output_dim, seed)
    su = apply_left(s, u)
    sv = np.linalg.svd(su, compute_uv=False)
    smax = float(sv[0])
    smin = float(sv[min(u.shape[1], len(sv)) - 1])
    eps = max(smax**2 - 1.0, 1.0 - smin**2)
    return DistortionReport(float(eps), smin, smax, s.output_dim, seed)


def matrix_product_error(s: SketchOperator, a, b) -> float:
    """||A.T S.T S B - A.T B||_F / (||A||_F ||B||_F); 0 for a zero factor."""
    a = as_dense(a)
    b = as_dense(b)
    check_same_rows(a, b)
    na, nb = np.linalg.norm(a, "fro"), np.linalg.norm(b, "fro")
    if na == 0.0 or nb == 0.0:
        return 0.0
    sa = apply_left(s, a)
    sb = apply_left(s, b)
    return float(np.linalg.norm(sa.T @ sb - a.T @ b, "fro") / (na * nb))


def frobenius_error(s: SketchOperator, a) -> float:
    """|  ||SA||_F^2 - ||A||_F^2  | / ||A||_F^2; 0 for zero A."""
    a = as_matrix(a)
    norm2 = frobenius_norm(a) ** 2
    if norm2 == 0.0:
        return 0.0
    sa = apply_left(s, a)
    return float(abs(np.linalg.norm(sa, "fro") ** 2 - norm2) / norm2)


def affine_embedding_error(
    s: SketchOperator, a, b, probes: int = 8, seed: int = 0
) -> float:
    """Max relative error of ||S(AX-B)||^2 over random probes, X* and X = 0.

    Probes with ||AX-B|| = 0 (consistent systems hit exactly) are skipped;
    a full for-all-X verification is impossible, so the optimum is always
    included since the additive term of the weak bound matters most there.
    """
    a = as_matrix(a)
    b = as_dense(b)
    check_same_rows(a, b)
    x_star = exact_least_squares(a, b)
    rng = np.random.default_rng(seed)
    xs = [x_star, np.zeros_like(x_star)]
    xs += [rng.standard_normal(x_star.shape) for _ in range(int(probes))]
    worst = 0.0
    for x in xs:
        res = a @ x - b
        denom = float(np.linalg.norm(res, "fro") ** 2)
        if denom <= 1e-24 * max(1.0, float(np.linalg.norm(b, "fro") ** 2)):
            continue
        sres = apply_left(s, res)
        num = abs(float(np.linalg.norm(sres, "fro") ** 2) - denom)
        worst = max(worst, num / denom)
    return worst
