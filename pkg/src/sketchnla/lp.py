"""lp regression via a block embedding, conditioned basis, and row sampling.

The input is split into row blocks, each hit by an independent generalized
sparse embedding with per-block failure 1/(100 n); a QR of the stacked sketch
gives a change of basis whose image is well-conditioned for the p-norm up to
recorded factors. Rows are then sampled proportionally to estimated basis
row norms and the weighted coreset problem is solved by smoothed IRLS.

Norms are estimated in l2 (Gaussian probe) and converted to a p-norm
surrogate; the conversion is only tight up to r^{|1/2-1/p|} per norm, i.e.
r^{|p/2-1|} at the probability level, so the coreset size carries that
factor rather than the probabilities (oversampling, never undersampling).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp

from . import _constants as C
from ._validation import as_dense, as_matrix, check_count, check_eps
from .linalg import DEFAULT_TOL, Tolerances, pivoted_qr_rank, pseudoinverse_solve
from .regress import Coreset, RegressionSolution, SolverError
from .sketch import (
    GeneralizedSparseEmbedding,
    IdentityOperator,
    SketchOperator,
    generalized_dims,
    make_gaussian_jl,
)


@dataclass(frozen=True)
class LpParams:
    p: float
    eps: float
    seed: int
    w_block: int | None = None
    t_inner: int | None = None

    def __post_init__(self):
        if not math.isfinite(self.p) or self.p < 1.0:
            raise ValueError(f"p must be in [1, inf), got {self.p}")
        check_eps(self.eps)

    @property
    def gamma_p(self) -> float:
        if self.w_block is None or self.t_inner is None:
            raise ValueError("gamma_p needs w_block and t_inner (build the embedding first)")
        if self.p <= 2.0:
            return math.sqrt(2.0) * self.t_inner ** (1.0 / self.p - 0.5)
        return math.sqrt(2.0) * self.w_block ** (0.5 - 1.0 / self.p)


@dataclass(frozen=True)
class ConditionedBasis:
    u_change: np.ndarray  # r x r change of basis for the reduced columns
    cols: np.ndarray  # pivot columns of A the basis is expressed in
    alpha: float
    beta_bound: float
    params: LpParams


class BlockEmbedding(SketchOperator):
    """Block-diagonal operator: one generalized embedding per row block.

    When the generalized embedding for a block would have at least as many
    rows as the block itself, the block uses the identity instead (a
    0-distortion embedding of the block) and t_inner is recorded as the
    block size; every downstream bound only loosens.
    """

    family = "block"

    def __init__(self, n: int, r: int, params: LpParams):
        self.input_dim = check_count(n, "n")
        r = check_count(r, "r")
        w = params.w_block if params.w_block is not None else min(n, 256 * r)
        w = min(max(1, int(w)), n)
        self.n_padded = math.ceil(n / w) * w
        self.n_blocks = self.n_padded // w
        delta = 1.0 / (100.0 * n)
        _, _, _, t_gen = generalized_dims(r, 0.5, delta)
        if t_gen >= w:
            self.blocks = [IdentityOperator(w) for _ in range(self.n_blocks)]
            self.t_inner = w
        else:
            self.blocks = [
                GeneralizedSparseEmbedding(
                    w,
                    r,
                    0.5,
                    delta,
                    int(
                        np.random.SeedSequence(
                            int(params.seed), spawn_key=(5, i)
                        ).generate_state(1)[0]
                    ),
                )
                for i in range(self.n_blocks)
            ]
            self.t_inner = t_gen
        self.w_block = w
        self.output_dim = self.n_blocks * self.t_inner
        self.params = replace(params, w_block=w, t_inner=self.t_inner)

    def apply(self, a) -> np.ndarray:
        self._check_rows(a)
        dense = a.toarray() if sp.issparse(a) else as_dense(a)
        if self.n_padded > dense.shape[0]:
            pad = np.zeros((self.n_padded - dense.shape[0], dense.shape[1]))
            dense = np.vstack([dense, pad])
        pieces = [
            blk.apply(dense[i * self.w_block : (i + 1) * self.w_block])
            for i, blk in enumerate(self.blocks)
        ]
        return np.vstack(pieces)

    def descriptor(self) -> dict:
        return {
            "family": self.family,
            "n": self.input_dim,
            "r": self.blocks[0].r,
            "p": self.params.p,
            "eps": self.params.eps,
            "seed": self.params.seed,
            "w_block": self.w_block,
        }


def build_block_embedding(n: int, r: int, params: LpParams) -> BlockEmbedding:
    """Block-diagonal embedding; block size defaults to min(n, 256 r)."""
    return BlockEmbedding(n, r, params)


def condition_basis(
    a, params: LpParams, tol: Tolerances = DEFAULT_TOL
) -> ConditionedBasis:
    """Change of basis making A's image p-norm well-conditioned.

    Columns are first reduced to a maximal independent set (pivoted QR);
    the basis construction on the sketched matrix is a QR, exact for p = 2
    and carrying looser recorded (alpha, beta) factors otherwise.
    """
    a = as_matrix(a)
    dense = a.toarray() if sp.issparse(a) else a
    _, _, perm, rank = pivoted_qr_rank(dense, tol)
    if rank == 0:
        raise ValueError("cannot condition a zero matrix")
    cols = np.sort(perm[:rank])
    reduced = dense[:, cols]
    f = build_block_embedding(a.shape[0], rank, params)
    params = f.params
    fa = np.asarray(f.apply(reduced))
    q, r_mat = np.linalg.qr(fa)
    diag = np.abs(np.diag(r_mat))
    if diag.min(initial=np.inf) <= tol.rank_rel_tol * diag.max(initial=0.0):
        raise ValueError("rank deficiency survived column reduction")
    u_basis = np.linalg.inv(r_mat)
    gamma = params.gamma_p
    u_change = u_basis / (rank * gamma)

    p, m = params.p, fa.shape[0]
    if p <= 2.0:
        alpha = rank ** (1.0 / p) * m ** (1.0 / p - 0.5)
        beta = 1.0
    else:
        q_dual = p / (p - 1.0)
        alpha = rank ** (1.0 / p)
        beta = rank ** (1.0 / q_dual - 0.5) * m ** (0.5 - 1.0 / p)
    slack = (params.t_inner * params.w_block) ** abs(1.0 / p - 0.5)
    beta_bound = beta * math.sqrt(3.0) * rank * slack
    return ConditionedBasis(
        u_change=u_change,
        cols=cols,
        alpha=float(alpha),
        beta_bound=float(beta_bound),
        params=params,
    )


def lp_sampling_probs(
    a, basis: ConditionedBasis, params: LpParams, n_probe: int = 64
) -> np.ndarray:
    """Sampling probabilities from estimated basis row norms.

    Row 2-norms of A @ u_change are estimated with an n_probe-column
    Gaussian probe and raised to the p-th power; the p-vs-2 norm slack goes
    into the coreset size, not here.
    """
    a = as_matrix(a)
    n_probe = check_count(n_probe, "n_probe")
    g = make_gaussian_jl(n_probe, basis.u_change.shape[1], int(params.seed) + 1)
    probe = basis.u_change @ g.entries.T
    rows = np.asarray(a[:, basis.cols] @ probe)
    est = np.einsum("ij,ij->i", rows, rows)
    if not np.any(est > 0):
        raise ValueError("zero matrix has no sampling distribution")
    weights = est ** (params.p / 2.0)
    return weights / weights.sum()


def _smoothed_lp_objective(res: np.ndarray, p: float, mu: float) -> float:
    return float(np.sum((res**2 + mu) ** (p / 2.0)))


def _irls(m, y, p, x0, rel_tol=1e-9, max_total=500):
    """Smoothed IRLS for min_x ||m x - y||_p^p; returns (x, iterations).

    |res|^p is smoothed to (res^2 + mu)^{p/2} with mu annealed relative to
    the initial residual scale, keeping the solve positively homogeneous.
    """
    x = x0.copy()
    res = m @ x - y
    scale2 = float(res @ res)
    if scale2 <= 0.0:
        return x, 0
    total = 0
    best = (np.inf, x)
    for mu_rel in 10.0 ** np.arange(-2, -11, -2.0):
        mu = mu_rel * scale2
        prev = _smoothed_lp_objective(res, p, mu)
        for _ in range(60):
            total += 1
            w = (res**2 + mu) ** ((p - 2.0) / 4.0)  # sqrt of IRLS weight
            x_new = pseudoinverse_solve(m * w[:, None], (y * w)[:, None]).ravel()
            step = 1.0
            res_new = m @ x_new - y
            obj = _smoothed_lp_objective(res_new, p, mu)
            while obj > prev * (1 + 1e-12) and step > 1e-6:
                step *= 0.5
                x_try = x + step * (x_new - x)
                res_new = m @ x_try - y
                obj = _smoothed_lp_objective(res_new, p, mu)
                x_new = x_try
            x, res = x_new, res_new
            if obj < best[0]:
                best = (obj, x.copy())
            if abs(prev - obj) <= rel_tol * max(prev, 1e-300):
                break
            prev = obj
            if total >= max_total:
                raise SolverError(
                    "IRLS did not converge within the iteration cap", best=best[1]
                )
    return x, total


def lp_regress(
    a,
    b,
    params: LpParams,
    t_coreset: int | None = None,
    n_probe: int = 64,
    tol: Tolerances = DEFAULT_TOL,
) -> RegressionSolution:
    """(1+eps)-approximate min_x ||Ax - b||_p via a sampled weighted coreset.

    The coreset samples rows with replacement at the basis-row-norm
    probabilities, weighting rows by 1/(t p_i)^{1/p} so the weighted p-norm
    objective is unbiased. ``t_coreset`` overrides the heuristic size; any
    value >= n keeps every row with weight 1 (the solve then reproduces the
    plain full-data solver exactly).
    """
    a = as_matrix(a)
    b = as_dense(b)
    if b.shape[1] != 1:
        raise ValueError("lp_regress expects a single right-hand side column")
    if a.shape[0] != b.shape[0]:
        raise ValueError("dimension mismatch between a and b")
    n = a.shape[0]
    basis = condition_basis(a, params, tol)
    params = basis.params
    probs = lp_sampling_probs(a, basis, params, n_probe)
    rank = basis.u_change.shape[1]
    slack = rank ** abs(params.p / 2.0 - 1.0)
    if t_coreset is None:
        t_coreset = min(n, math.ceil(C.LP_T_C * rank * params.eps**-2 * slack))
    t_coreset = check_count(t_coreset, "t_coreset")

    dense = a.toarray() if sp.issparse(a) else a
    y = b.ravel()
    if t_coreset >= n:
        rows = np.arange(n)
        weights = np.ones(n)
        t_coreset = n
    else:
        rng = np.random.default_rng(
            np.random.SeedSequence(int(params.seed), spawn_key=(6,))
        )
        rows = rng.choice(n, size=t_coreset, p=probs)
        weights = (1.0 / (t_coreset * probs[rows])) ** (1.0 / params.p)
    m = dense[rows][:, basis.cols] * weights[:, None]
    ym = y[rows] * weights
    x0 = pseudoinverse_solve(m, ym[:, None], tol).ravel()
    x_red, iterations = _irls(m, ym, params.p, x0)
    x = np.zeros((a.shape[1], 1))
    x[basis.cols, 0] = x_red
    residual = float(
        np.linalg.norm(np.asarray(a @ x).ravel() - y, ord=params.p)
    )
    return RegressionSolution(
        x=x,
        residual_norm=residual,
        method="lp",
        sketch_dim=t_coreset,
        seed=int(params.seed),
        iterations=iterations,
        coreset=Coreset(
            rows=list(zip(rows.tolist(), weights.tolist())), size=t_coreset
        ),
    )
