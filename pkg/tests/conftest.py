import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def gaussian_instance(n, d, seed, noise=0.5):
    """Regression instance A, b = A x0 + noise, plus x0."""
    g = np.random.default_rng(seed)
    a = g.standard_normal((n, d))
    x0 = g.standard_normal((d, 1))
    b = a @ x0 + noise * g.standard_normal((n, 1))
    return a, b, x0
