"""scikit-learn style wrappers so recovery and decomposition compose with
``clone``, ``get_params`` and pipelines.

Inputs are raw arrays: a square ratio matrix for :class:`PhiEstimator`, an
``(n, n, points)`` value array for :class:`SincovDecomposer`.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import algebra as alg
from ._validation import check_square
from .kernel import DEFAULT_TOL, AlgebraKernel, ControlKernel, GroundSet, ScalarKernel, recover_phi
from .stability import decompose


class PhiEstimator(BaseEstimator):
    """Fit ``phi`` so that ``X[f, g] ~ phi[f] / phi[g]``.

    Parameters
    ----------
    mode : {"least_squares", "anchor"}
    anchor : int or None
        Column index used in anchor mode (default 0).

    Attributes
    ----------
    phi_ : ndarray of complex, normalised so ``phi_[0] == 1``
    residual_, relative_residual_ : float
    """

    def __init__(self, mode="least_squares", anchor=None):
        self.mode = mode
        self.anchor = anchor

    def fit(self, X, y=None):
        S = ScalarKernel(GroundSet.range(len(X)), check_square(X, complex, "X"))
        anchor = None if self.anchor is None else str(self.anchor)
        res = recover_phi(S, mode=self.mode, anchor=anchor)
        self.phi_ = res.phi
        self.residual_ = res.residual
        self.relative_residual_ = res.relative_residual
        self.n_features_in_ = S.n
        return self

    def predict(self, X=None):
        """The fitted Sincov kernel ``phi_[f] / phi_[g]``."""
        check_is_fitted(self, "phi_")
        return self.phi_[:, None] / self.phi_[None, :]

    def score(self, X, y=None):
        """Negative max relative deviation of ``X`` from the fitted kernel."""
        fitted = self.predict()
        return -float(np.abs(np.asarray(X, dtype=complex) / fitted - 1.0).max())


class SincovDecomposer(TransformerMixin, BaseEstimator):
    """Find the coordinates on which a function-valued kernel is exactly Sincov.

    ``fit(X, F)`` takes values ``X[f, g, p]`` and an optional control matrix
    (default: all ones).  ``transform`` restricts a value array to the Sincov
    coordinates ``sincov_points_``.
    """

    def __init__(self, tol=DEFAULT_TOL):
        self.tol = tol

    def fit(self, X, F=None):
        vals = check_square(X, complex, "X", trailing=1)
        n, _, d = vals.shape
        ground = GroundSet.range(n)
        spec = alg.function_algebra(range(d))
        Fk = ControlKernel(ground, np.ones((n, n)) if F is None else np.asarray(F, dtype=float))
        self.report_ = decompose(AlgebraKernel(ground, spec, vals), Fk, tol=self.tol)
        self.sincov_points_ = np.array(self.report_.sincov_chars, dtype=int)
        self.other_points_ = np.array(self.report_.other_chars, dtype=int)
        self.n_features_in_ = d
        return self

    def transform(self, X):
        check_is_fitted(self, "sincov_points_")
        vals = check_square(X, complex, "X", trailing=1)
        return vals[:, :, self.sincov_points_]
