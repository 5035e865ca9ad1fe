"""Input validation helpers shared across the package.

Matrices are either dense ``numpy.ndarray`` (2-D, float64) or sparse
``scipy.sparse.csr_array``. Helpers here canonicalize user input into one of
those two forms and check the invariants the algorithms rely on.
"""

from __future__ import annotations

import os

import numpy as np
import scipy.sparse as sp


def as_dense(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-D float64 ndarray with finite entries."""
    if sp.issparse(a):
        a = a.toarray()
    out = np.asarray(a, dtype=np.float64)
    if out.ndim == 1:
        out = out.reshape(-1, 1)
    if out.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ValueError(f"{name} contains non-finite entries")
    return out


def as_csr(a, name: str = "matrix") -> sp.csr_array:
    """Coerce to canonical CSR: sorted indices, summed duplicates, no stored zeros."""
    if sp.issparse(a):
        out = sp.csr_array(a, dtype=np.float64)
    else:
        out = sp.csr_array(as_dense(a, name))
    out.sum_duplicates()
    out.eliminate_zeros()
    out.sort_indices()
    if not np.all(np.isfinite(out.data)):
        raise ValueError(f"{name} contains non-finite entries")
    return out


def as_matrix(a, name: str = "matrix"):
    """Return ``a`` as csr_array if sparse, otherwise a dense 2-D array."""
    if sp.issparse(a):
        return as_csr(a, name)
    return as_dense(a, name)


def nnz(a) -> int:
    if sp.issparse(a):
        return int(a.nnz)
    return int(np.count_nonzero(a))


def check_same_rows(a, b, what: str = "operands") -> None:
    if a.shape[0] != b.shape[0]:
        raise ValueError(
            f"{what} must have the same number of rows: {a.shape[0]} vs {b.shape[0]}"
        )


def check_eps(eps: float, lo: float = 0.0, hi: float = 1.0, name: str = "eps") -> float:
    eps = float(eps)
    if not (lo < eps < hi):
        raise ValueError(f"{name} must be in ({lo}, {hi}), got {eps}")
    return eps


def check_count(k, name: str = "count", minimum: int = 1) -> int:
    k = int(k)
    if k < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {k}")
    return k


def resolve_seed(seed=None) -> int:
    """Explicit seed, else the SKETCHNLA_SEED environment variable, else 0."""
    if seed is not None:
        return int(seed)
    env = os.environ.get("SKETCHNLA_SEED")
    return int(env) if env else 0
