"""Synthetic test matrices with planted spectra and tunable row coherence.

The bench harness uses these as its CI corpus; the generator also backs
calibration experiments. Coherence 0 gives a rotation-invariant column
space; coherence 1 concentrates the leverage on the first rows (an embedded
identity-like block).
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .io import save_coordinate


def planted_matrix(
    n: int,
    d: int,
    decay: float = 1.0,
    spectrum: str = "power",
    coherence: float = 0.0,
    seed: int = 0,
) -> np.ndarray:
    """n x d matrix with singular values i^-decay (power) or exp(-decay i)."""
    rng = np.random.default_rng(seed)
    rank = min(n, d)
    g = rng.standard_normal((n, rank))
    if coherence > 0:
        # Boosting the first rows drags the left singular vectors toward
        # the identity block, concentrating the leverage scores there.
        boost = 1.0 + coherence * 10.0 * np.sqrt(n / rank)
        g[:rank] *= boost
    u, _ = np.linalg.qr(g)
    v, _ = np.linalg.qr(rng.standard_normal((d, rank)))
    idx = np.arange(1, rank + 1, dtype=np.float64)
    if spectrum == "power":
        sig = idx**-decay
    elif spectrum == "exp":
        sig = np.exp(-decay * idx)
    else:
        raise ValueError(f"unknown spectrum {spectrum!r}")
    return (u * sig) @ v.T


def coherent_with_identity_block(n: int, d: int, seed: int = 0, scale: float = 1e-3):
    """Rank-d matrix whose top d rows are the identity; rest tiny Gaussian."""
    rng = np.random.default_rng(seed)
    a = np.vstack([np.eye(d), scale * rng.standard_normal((n - d, d))])
    return a


def write_corpus(out_dir, count: int = 20, d: int = 120, seed: int = 0) -> list:
    """Write a corpus of coordinate .mtx files with varied n/decay/coherence."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    paths = []
    for i in range(count):
        n = int(rng.integers(d + 10, d + 160))
        decay = float(rng.uniform(0.6, 1.8))
        coherence = float(rng.choice([0.0, 0.0, 0.3, 0.8]))
        spectrum = "power" if i % 3 else "exp"
        a = planted_matrix(
            n,
            d,
            decay=decay if spectrum == "power" else decay / 10.0,
            spectrum=spectrum,
            coherence=coherence,
            seed=int(rng.integers(0, 2**31)),
        )
        path = out / f"synth_{i:03d}.mtx"
        save_coordinate(path, a)
        paths.append(path)
    return paths
