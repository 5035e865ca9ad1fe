"""Sketching operators applied from the left in input-sparsity time.

Five families: sparse embedding (one random +-1 per column), generalized
sparse embedding (block-diagonal stacks of small sparse embeddings over
hashed row groups), subsampled randomized Hadamard transform, leverage-score
row sampler, and dense Gaussian JL; plus composition.

All randomness is derived from an explicit 64-bit seed. Internal components
draw from per-component counter-style streams (``SeedSequence`` spawn keys),
so adding a component never perturbs the draws of another. Operators are
immutable after construction; applying one is a pure function.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sp

from . import _constants as C
from ._validation import as_dense, check_count, check_eps

__all__ = [
    "SketchOperator",
    "SparseEmbedding",
    "GeneralizedSparseEmbedding",
    "SrhtOperator",
    "LeverageSampler",
    "GaussianJl",
    "ComposedSketch",
    "make_sparse_embedding",
    "make_generalized_sparse_embedding",
    "make_srht",
    "full_srht",
    "make_leverage_sampler",
    "sparse_embedding_or_identity",
    "srht_or_identity",
    "IdentityOperator",
    "make_gaussian_jl",
    "apply_left",
    "apply_right",
    "compose",
    "default_sparse_dim",
    "default_srht_dim",
    "to_descriptor",
    "from_descriptor",
]


def _rng(seed: int, *stream: int) -> np.random.Generator:
    """Independent generator for component ``stream`` of operator ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=stream))


def default_sparse_dim(r: int, eps: float) -> int:
    """Sketch rows for a sparse embedding of a rank-r space at distortion eps.

    Quadratic in r/eps with one log factor; the constant is calibrated, not
    theoretical (the analysis only pins the shape up to log powers).
    """
    r = check_count(r, "r")
    eps = check_eps(eps)
    x = r / eps
    t = C.SPARSE_DIM_C * x * x * max(1.0, math.log(x))
    return max(C.SPARSE_DIM_FLOOR, math.ceil(t))


def generalized_dims(r: int, eps: float, delta: float) -> tuple[int, int, int, int]:
    """(q, k_blocks, v, t) for a generalized sparse embedding."""
    r = check_count(r, "r")
    eps = check_eps(eps)
    delta = check_eps(delta, name="delta")
    k_blocks = max(1, math.ceil(C.GEN_K_C * math.log(r / (eps * delta)) / eps))
    v = max(1, math.ceil(C.GEN_V_C / eps))
    q = max(
        1,
        math.ceil(C.GEN_Q_C * r * (r + math.log(1.0 / (delta * eps))) / eps**2),
    )
    return q, k_blocks, v, q * k_blocks * v


def default_srht_dim(r: int, eps: float, n: int) -> int:
    """SRHT rows embedding a rank-r subspace of R^n at distortion eps."""
    r = check_count(r, "r")
    n = check_count(n, "n")
    eps = check_eps(eps)
    t = (
        C.SRHT_DIM_C
        * (math.sqrt(r) + math.sqrt(math.log(max(n, 2)))) ** 2
        * math.log(r + 1.0)
        / eps**2
    )
    return max(r + 1, math.ceil(t))


class SketchOperator:
    """Base class: a linear map from R^{input_dim} to R^{output_dim}."""

    input_dim: int
    output_dim: int
    family: str

    def apply(self, a) -> np.ndarray:
        """Return S @ a as a dense array; a may be dense or CSR."""
        raise NotImplementedError

    def dense(self) -> np.ndarray:
        """Materialize S (tests and tiny dims only)."""
        return self.apply(np.eye(self.input_dim))

    def descriptor(self) -> dict:
        raise NotImplementedError

    def _check_rows(self, a) -> None:
        if a.shape[0] != self.input_dim:
            raise ValueError(
                f"operator expects {self.input_dim} rows, got {a.shape[0]}"
            )


class IdentityOperator(SketchOperator):
    """No-op embedding; what a pipeline uses when a sketch would not shrink."""

    family = "identity"

    def __init__(self, n: int):
        self.input_dim = self.output_dim = check_count(n, "n")

    def apply(self, a) -> np.ndarray:
        self._check_rows(a)
        return a.toarray() if sp.issparse(a) else as_dense(a)

    def descriptor(self) -> dict:
        return {"family": self.family, "n": self.input_dim}


class SparseEmbedding(SketchOperator):
    """CountSketch-style map: one +-1 per input coordinate, hashed to t buckets."""

    family = "sparse"

    def __init__(self, n: int, t: int, seed: int):
        self.input_dim = check_count(n, "n")
        self.output_dim = check_count(t, "t")
        self.seed = int(seed)
        self.bucket = _rng(seed, 0, 0).integers(0, t, size=n)
        self.sign = _rng(seed, 0, 1).choice(np.array([-1.0, 1.0]), size=n)
        self._mat = sp.csr_array(
            (self.sign, (self.bucket, np.arange(n))), shape=(t, n)
        )

    def apply(self, a) -> np.ndarray:
        self._check_rows(a)
        if sp.issparse(a):
            # One fused multiply-add per stored nonzero: scatter through the
            # hash with bincount, O(nnz(A) + n) with no densification.
            a = sp.csr_array(a)
            d = a.shape[1]
            counts = np.diff(a.indptr)
            flat = np.repeat(self.bucket * d, counts) + a.indices
            weights = np.repeat(self.sign, counts) * a.data
            out = np.bincount(flat, weights=weights, minlength=self.output_dim * d)
            return out.reshape(self.output_dim, d)
        return np.asarray(self._mat @ as_dense(a), dtype=np.float64)

    def descriptor(self) -> dict:
        return {
            "family": self.family,
            "n": self.input_dim,
            "t": self.output_dim,
            "seed": self.seed,
        }


class GeneralizedSparseEmbedding(SketchOperator):
    """Block-diagonal stack of small sparse embeddings over hashed row groups.

    Rows are hashed to q outer buckets; within a bucket, k_blocks independent
    (bucket, sign) pairs over an inner range v, scaled by 1/sqrt(k_blocks) so
    every implied column has unit norm. Output dimension t = q * k_blocks * v.
    The permutation grouping rows by outer bucket is kept implicit.
    """

    family = "generalized"

    def __init__(self, n: int, r: int, eps: float, delta: float, seed: int):
        self.input_dim = check_count(n, "n")
        self.r = check_count(r, "r")
        self.eps = check_eps(eps)
        self.delta = check_eps(delta, name="delta")
        self.seed = int(seed)

        self.q, self.k_blocks, self.v, self.output_dim = generalized_dims(
            r, self.eps, self.delta
        )
        self.scale = 1.0 / math.sqrt(self.k_blocks)
        # Oversized sketches stay valid; flag them so callers can fall back
        # to a dense method if they care about the dimension.
        self.dense_fallback = self.output_dim > self.input_dim

        self.outer_bucket = _rng(seed, 1, 0).integers(0, self.q, size=n)
        # Inner hashes/signs are drawn per (row, block); rows in different
        # outer buckets land in disjoint output blocks by construction.
        self.inner_bucket = _rng(seed, 1, 1).integers(
            0, self.v, size=(self.k_blocks, n)
        )
        self.inner_sign = _rng(seed, 1, 2).choice(
            np.array([-1.0, 1.0]), size=(self.k_blocks, n)
        )
        rows = (
            self.outer_bucket[None, :] * (self.k_blocks * self.v)
            + np.arange(self.k_blocks)[:, None] * self.v
            + self.inner_bucket
        )
        cols = np.broadcast_to(np.arange(n), (self.k_blocks, n))
        data = self.inner_sign * self.scale
        self._mat = sp.csr_array(
            (data.ravel(), (rows.ravel(), cols.ravel())),
            shape=(self.output_dim, n),
        )

    def apply(self, a) -> np.ndarray:
        self._check_rows(a)
        out = self._mat @ a
        if sp.issparse(out):
            out = out.toarray()
        return np.asarray(out, dtype=np.float64)

    def descriptor(self) -> dict:
        return {
            "family": self.family,
            "n": self.input_dim,
            "r": self.r,
            "eps": self.eps,
            "delta": self.delta,
            "seed": self.seed,
        }


def _fwht(x: np.ndarray) -> np.ndarray:
    """In-place-style fast Walsh-Hadamard transform along axis 0 (unnormalized)."""
    m = x.shape[0]
    out = x.copy()
    h = 1
    while h < m:
        out = out.reshape(m // (2 * h), 2, h, -1)
        top = out[:, 0] + out[:, 1]
        bot = out[:, 0] - out[:, 1]
        out = np.stack((top, bot), axis=1).reshape(m, -1)
        h *= 2
    return out


class SrhtOperator(SketchOperator):
    """Subsampled randomized Hadamard transform.

    Input is zero-padded to the next power of two, sign-flipped, transformed
    by the normalized Walsh-Hadamard matrix, and t rows are sampled uniformly
    with replacement and scaled by sqrt(n_pad/t); an isometry in expectation.
    With ``all_rows=True`` every row is kept in order (no sampling), which is
    an exact isometry and serves as the full-isometry test hook.
    """

    family = "srht"

    def __init__(self, n: int, t: int, seed: int, all_rows: bool = False):
        self.input_dim = check_count(n, "n")
        self.n_pad = 1 << (self.input_dim - 1).bit_length()
        self.seed = int(seed)
        self.all_rows = bool(all_rows)
        if all_rows:
            t = self.n_pad
        self.output_dim = check_count(t, "t")
        if self.output_dim > self.n_pad:
            raise ValueError(f"t={t} exceeds padded dimension {self.n_pad}")
        self.sign = _rng(seed, 2, 0).choice(np.array([-1.0, 1.0]), size=self.n_pad)
        if all_rows:
            self.sampled_rows = np.arange(self.n_pad)
        else:
            self.sampled_rows = _rng(seed, 2, 1).integers(
                0, self.n_pad, size=self.output_dim
            )
        self.scale = math.sqrt(self.n_pad / self.output_dim) / math.sqrt(self.n_pad)

    def apply(self, a) -> np.ndarray:
        self._check_rows(a)
        a = as_dense(a)
        padded = np.zeros((self.n_pad, a.shape[1]))
        padded[: self.input_dim] = a
        padded *= self.sign[:, None]
        transformed = _fwht(padded)
        return self.scale * transformed[self.sampled_rows]

    def descriptor(self) -> dict:
        return {
            "family": self.family,
            "n": self.input_dim,
            "t": self.output_dim,
            "seed": self.seed,
            "all_rows": self.all_rows,
        }


class LeverageSampler(SketchOperator):
    """Row sampler with replacement: row m is e_{z_m} / sqrt(t p_{z_m})."""

    family = "leverage"

    def __init__(self, probs, t: int, seed: int):
        probs = np.asarray(probs, dtype=np.float64).ravel()
        if probs.size == 0 or np.any(probs < 0):
            raise ValueError("probs must be non-negative and non-empty")
        total = probs.sum()
        if total <= 0:
            raise ValueError("probs sum to zero")
        if abs(total - 1.0) > 1e-8:
            raise ValueError(f"probs must sum to 1 within 1e-8, got {total}")
        self.probs = probs / total
        self.input_dim = probs.size
        self.output_dim = check_count(t, "t")
        self.seed = int(seed)
        self.picks = _rng(seed, 3, 0).choice(
            self.input_dim, size=self.output_dim, p=self.probs
        )
        self.weights = 1.0 / np.sqrt(self.output_dim * self.probs[self.picks])

    def apply(self, a) -> np.ndarray:
        self._check_rows(a)
        rows = a[self.picks]
        if sp.issparse(rows):
            rows = rows.toarray()
        return self.weights[:, None] * np.asarray(rows, dtype=np.float64)

    def descriptor(self) -> dict:
        return {
            "family": self.family,
            "probs": self.probs.tolist(),
            "t": self.output_dim,
            "seed": self.seed,
        }


class GaussianJl(SketchOperator):
    """Dense i.i.d. normal matrix scaled by 1/sqrt(rows)."""

    family = "gaussian"

    def __init__(self, rows: int, cols: int, seed: int):
        self.output_dim = check_count(rows, "rows")
        self.input_dim = check_count(cols, "cols")
        self.seed = int(seed)
        self.entries = _rng(seed, 4, 0).standard_normal(
            (self.output_dim, self.input_dim)
        ) / math.sqrt(self.output_dim)

    def apply(self, a) -> np.ndarray:
        self._check_rows(a)
        if sp.issparse(a):
            return np.asarray(self.entries @ a.toarray())
        return self.entries @ as_dense(a)

    def descriptor(self) -> dict:
        return {
            "family": self.family,
            "rows": self.output_dim,
            "cols": self.input_dim,
            "seed": self.seed,
        }


class ComposedSketch(SketchOperator):
    """outer @ inner; apply runs inner first. Error parameters add."""

    family = "composed"

    def __init__(self, outer: SketchOperator, inner: SketchOperator):
        if outer.input_dim != inner.output_dim:
            raise ValueError(
                f"cannot compose: outer expects {outer.input_dim} rows, "
                f"inner produces {inner.output_dim}"
            )
        self.outer = outer
        self.inner = inner
        self.input_dim = inner.input_dim
        self.output_dim = outer.output_dim

    def apply(self, a) -> np.ndarray:
        return self.outer.apply(self.inner.apply(a))

    def descriptor(self) -> dict:
        return {
            "family": self.family,
            "outer": self.outer.descriptor(),
            "inner": self.inner.descriptor(),
        }


def make_sparse_embedding(n: int, t: int, seed: int) -> SparseEmbedding:
    return SparseEmbedding(n, t, seed)


def make_generalized_sparse_embedding(
    n: int, r: int, eps: float, delta: float, seed: int
) -> GeneralizedSparseEmbedding:
    return GeneralizedSparseEmbedding(n, r, eps, delta, seed)


def make_srht(n: int, t: int, seed: int, all_rows: bool = False) -> SrhtOperator:
    return SrhtOperator(n, t, seed, all_rows=all_rows)


def full_srht(n: int, seed: int = 0) -> SrhtOperator:
    """Exact-isometry hook: an SRHT keeping every Hadamard row."""
    return SrhtOperator(n, 1, seed, all_rows=True)


def make_leverage_sampler(probs, t: int, seed: int) -> LeverageSampler:
    return LeverageSampler(probs, t, seed)


def sparse_embedding_or_identity(n: int, t: int, seed: int) -> SketchOperator:
    """Sparse embedding, or the identity when t >= n (a 0-distortion embedding)."""
    if t >= n:
        return IdentityOperator(n)
    return SparseEmbedding(n, t, seed)


def srht_or_identity(n: int, t: int, seed: int) -> SketchOperator:
    """SRHT, or the identity when t >= n."""
    if t >= n:
        return IdentityOperator(n)
    return SrhtOperator(n, t, seed)


def make_gaussian_jl(rows: int, cols: int, seed: int) -> GaussianJl:
    return GaussianJl(rows, cols, seed)


def apply_left(s: SketchOperator, a) -> np.ndarray:
    """S @ A. O(nnz) for sparse embeddings, times the family factor otherwise."""
    return s.apply(a)


def apply_right(a, s: SketchOperator) -> np.ndarray:
    """A @ S.T, computed as (S @ A.T).T for exact consistency with apply_left."""
    at = a.T if sp.issparse(a) else as_dense(a).T
    return s.apply(at).T


def compose(outer: SketchOperator, inner: SketchOperator) -> ComposedSketch:
    return ComposedSketch(outer, inner)


def to_descriptor(s: SketchOperator) -> dict:
    """JSON-ready descriptor; randomness is regenerated from the seed."""
    return s.descriptor()


def from_descriptor(d: dict) -> SketchOperator:
    family = d.get("family")
    if family == "identity":
        return IdentityOperator(d["n"])
    if family == "sparse":
        return SparseEmbedding(d["n"], d["t"], d["seed"])
    if family == "generalized":
        return GeneralizedSparseEmbedding(
            d["n"], d["r"], d["eps"], d["delta"], d["seed"]
        )
    if family == "srht":
        return SrhtOperator(d["n"], d["t"], d["seed"], all_rows=d.get("all_rows", False))
    if family == "leverage":
        return LeverageSampler(np.asarray(d["probs"]), d["t"], d["seed"])
    if family == "gaussian":
        return GaussianJl(d["rows"], d["cols"], d["seed"])
    if family == "composed":
        return ComposedSketch(from_descriptor(d["outer"]), from_descriptor(d["inner"]))
    raise ValueError(f"unknown sketch family {family!r}")
