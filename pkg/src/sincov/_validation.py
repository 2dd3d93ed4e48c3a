"""Input validation helpers shared by the kernel constructors and estimators."""

from __future__ import annotations

import numpy as np

from .exceptions import DimensionMismatchError

MAX_GROUND_SIZE = 512


def check_square(values, dtype=complex, name: str = "values", trailing: int = 0) -> np.ndarray:
    """Return ``values`` as an ``(n, n, ...)`` array of ``dtype``.

    ``trailing`` is the number of extra axes after the two ground-set axes.
    """
    arr = np.array(values, dtype=dtype)
    if arr.ndim != 2 + trailing:
        raise ValueError(f"{name} must have {2 + trailing} dimensions, got {arr.ndim}")
    if arr.shape[0] != arr.shape[1]:
        raise DimensionMismatchError(arr.shape[0], arr.shape[1], what=f"{name} row/column")
    if arr.shape[0] > MAX_GROUND_SIZE:
        raise ValueError(f"ground set larger than {MAX_GROUND_SIZE} is not supported (triple scans)")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def check_nonvanishing(values, name: str = "values", atol: float = 0.0) -> np.ndarray:
    arr = np.asarray(values)
    if np.any(np.abs(arr) <= atol):
        raise ValueError(f"{name} must not vanish")
    return arr


def check_real_nonnegative(values, name: str = "values", rtol: float = 1e-12) -> np.ndarray:
    arr = np.asarray(values)
    scale = max(1.0, float(np.abs(arr).max())) if arr.size else 1.0
    if np.iscomplexobj(arr) and np.abs(arr.imag).max(initial=0.0) > rtol * scale:
        raise ValueError(f"{name} must be real")
    real = np.real(arr).astype(float)
    if np.any(real < 0):
        raise ValueError(f"{name} must be nonnegative")
    return real


def as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
