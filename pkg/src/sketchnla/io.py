"""Matrix Market ingestion and result writers.

The coordinate reader follows the format conventions: duplicates are summed,
symmetric storage is expanded to a full matrix, explicit zeros are dropped,
and rows come out sorted (canonical CSR). Parse failures report the
offending line number.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from ._validation import as_csr, as_dense


class MatrixMarketError(ValueError):
    """Raised for malformed or unsupported Matrix Market input."""


_FIELDS = {"real", "integer", "pattern"}
_SYMMETRIES = {"general", "symmetric"}


def _parse_header(line: str, path: str):
    parts = line.strip().lower().split()
    if len(parts) != 5 or parts[0] != "%%matrixmarket" or parts[1] != "matrix":
        raise MatrixMarketError(f"{path}:1: bad MatrixMarket header: {line.strip()!r}")
    _, _, layout, field, symmetry = parts
    if field not in _FIELDS:
        raise MatrixMarketError(f"{path}:1: unsupported field type {field!r}")
    if symmetry not in _SYMMETRIES:
        raise MatrixMarketError(f"{path}:1: unsupported symmetry {symmetry!r}")
    return layout, field, symmetry


def load_matrix_market(path) -> sp.csr_array:
    """Read a coordinate-format .mtx file into canonical CSR."""
    path = str(path)
    with open(path) as fh:
        header = fh.readline()
        layout, field, symmetry = _parse_header(header, path)
        if layout != "coordinate":
            raise MatrixMarketError(
                f"{path}:1: expected coordinate layout, got {layout!r}"
            )
        lineno = 1
        size_line = None
        for line in fh:
            lineno += 1
            stripped = line.strip()
            if not stripped or stripped.startswith("%"):
                continue
            size_line = stripped
            break
        if size_line is None:
            raise MatrixMarketError(f"{path}:{lineno}: missing size line")
        try:
            n_rows, n_cols, n_entries = (int(tok) for tok in size_line.split())
        except ValueError:
            raise MatrixMarketError(
                f"{path}:{lineno}: bad size line {size_line!r}"
            ) from None

        rows = np.empty(n_entries, dtype=np.int64)
        cols = np.empty(n_entries, dtype=np.int64)
        vals = np.empty(n_entries, dtype=np.float64)
        k = 0
        for line in fh:
            lineno += 1
            stripped = line.strip()
            if not stripped or stripped.startswith("%"):
                continue
            if k >= n_entries:
                raise MatrixMarketError(f"{path}:{lineno}: more entries than declared")
            toks = stripped.split()
            try:
                i, j = int(toks[0]), int(toks[1])
                if field == "pattern":
                    v = 1.0
                else:
                    v = float(toks[2])
            except (ValueError, IndexError):
                raise MatrixMarketError(
                    f"{path}:{lineno}: bad entry {stripped!r}"
                ) from None
            if not (1 <= i <= n_rows and 1 <= j <= n_cols):
                raise MatrixMarketError(f"{path}:{lineno}: index out of range")
            rows[k], cols[k], vals[k] = i - 1, j - 1, v
            k += 1
        if k != n_entries:
            raise MatrixMarketError(
                f"{path}:{lineno}: expected {n_entries} entries, found {k}"
            )

    if symmetry == "symmetric":
        off = rows != cols
        rows, cols, vals = (
            np.concatenate([rows, cols[off]]),
            np.concatenate([cols, rows[off]]),
            np.concatenate([vals, vals[off]]),
        )
    coo = sp.coo_array((vals, (rows, cols)), shape=(n_rows, n_cols))
    return as_csr(coo, path)


def load_dense(path) -> np.ndarray:
    """Read array-format .mtx as dense; coordinate files are densified."""
    path = str(path)
    with open(path) as fh:
        header = fh.readline()
        layout, field, symmetry = _parse_header(header, path)
    if layout == "coordinate":
        return load_matrix_market(path).toarray()
    if field == "pattern":
        raise MatrixMarketError(f"{path}:1: pattern field invalid for array layout")
    with open(path) as fh:
        fh.readline()
        lineno = 1
        tokens = []
        shape = None
        for line in fh:
            lineno += 1
            stripped = line.strip()
            if not stripped or stripped.startswith("%"):
                continue
            if shape is None:
                try:
                    n_rows, n_cols = (int(tok) for tok in stripped.split())
                except ValueError:
                    raise MatrixMarketError(
                        f"{path}:{lineno}: bad size line {stripped!r}"
                    ) from None
                shape = (n_rows, n_cols)
                continue
            try:
                tokens.extend(float(tok) for tok in stripped.split())
            except ValueError:
                raise MatrixMarketError(
                    f"{path}:{lineno}: bad entry {stripped!r}"
                ) from None
    if shape is None:
        raise MatrixMarketError(f"{path}: missing size line")
    n_rows, n_cols = shape
    if len(tokens) != n_rows * n_cols:
        raise MatrixMarketError(
            f"{path}: expected {n_rows * n_cols} values, found {len(tokens)}"
        )
    data = np.array(tokens, dtype=np.float64)
    out = data.reshape((n_cols, n_rows)).T  # array format is column-major
    if symmetry == "symmetric":
        out = np.tril(out) + np.tril(out, -1).T
    return out


def save_dense(path, a) -> None:
    """Write a dense matrix in .mtx array format (column-major order)."""
    a = as_dense(a)
    with open(str(path), "w") as fh:
        fh.write("%%MatrixMarket matrix array real general\n")
        fh.write(f"{a.shape[0]} {a.shape[1]}\n")
        for j in range(a.shape[1]):
            for i in range(a.shape[0]):
                fh.write(f"{float(a[i, j])!r}\n")


def save_coordinate(path, a) -> None:
    """Write a sparse matrix in .mtx coordinate format."""
    a = as_csr(a)
    coo = a.tocoo()
    with open(str(path), "w") as fh:
        fh.write("%%MatrixMarket matrix coordinate real general\n")
        fh.write(f"{a.shape[0]} {a.shape[1]} {a.nnz}\n")
        for i, j, v in zip(coo.row, coo.col, coo.data):
            fh.write(f"{i + 1} {j + 1} {float(v)!r}\n")


def save_csv(path, a, header=None) -> None:
    """Write a dense matrix as CSV rows with full float precision."""
    a = as_dense(a)
    with open(str(path), "w") as fh:
        if header:
            fh.write(",".join(header) + "\n")
        for row in a:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
