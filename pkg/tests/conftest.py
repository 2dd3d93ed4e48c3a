import itertools

import numpy as np
import pytest


def brute_defects(get, n):
    """Reference defect table from plain Python loops; ``get(i, j)`` returns a complex."""
    out = np.empty((n, n, n))
    for f, g, h in itertools.product(range(n), repeat=3):
        out[f, g, h] = abs(get(f, h) - get(f, g) * get(g, h))
    return out


def as_matrix(coeffs):
    """Triangular2 coefficients (U, N, D) as the 2x2 matrix [[x, y], [0, z]]."""
    x, y, d = coeffs
    return np.array([[x, y], [0, x + d]], dtype=complex)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
