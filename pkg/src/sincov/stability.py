"""Computable consequences of the stability results for delta-Sincov kernels.

* :func:`certified_defect_bound` evaluates, for a delta-Sincov pair
  ``(S, F)``, the explicit upper bound on ``|S(f,h) - S(f,g) S(g,h)|`` in
  terms of ``Gamma(f,g) = F(f,g) F(g,f) - 1``, minimised over the
  auxiliary point ``k``.  When ``|S(h, .)| / F(., .)`` can be made large,
  the bound is small; on an infinite set that forces exact Sincov.
* :func:`per_character_check` pushes an algebra kernel through every
  character (each has norm one), giving scalar delta-Sincov pairs.
* :func:`decompose` splits the characters of a function-algebra kernel into
  the exactly-Sincov part and the rest, with the restriction maps and a
  check that together they are isometric.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import algebra as alg
from ._validation import as_rng
from .exceptions import PremiseError, UnsupportedFamilyError
from .kernel import (
    DEFAULT_TOL,
    AlgebraKernel,
    ControlKernel,
    DefectReport,
    ScalarKernel,
    _same_ground,
    check_delta,
    gamma_matrix,
    max_defect,
)


@dataclass
class BoundResult:
    bound: float
    argmin_k: str | None
    certifying: bool
    unbounded: bool = False  # the h-row of S vanishes; no finite bound

    def to_dict(self) -> dict:
        return {
            "bound": None if self.unbounded else self.bound,
            "argmin_k": self.argmin_k,
            "certifying": self.certifying,
            "unbounded": self.unbounded,
        }


def _premise(S, F, tol, force) -> bool:
    ok = check_delta(S, F, tol).certified
    if not ok and not force:
        raise PremiseError("(S, F) is not delta-Sincov; pass force=True to evaluate the formula anyway")
    return ok


def _bound_terms(S: ScalarKernel, F: ControlKernel, G: np.ndarray, i: int, j: int, l: int, tol: float):
    """Candidate bounds over ``k`` for the triple ``(i, j, l)``; ``inf`` where ``S(l,k)`` vanishes."""
    s = S.values
    Fv = F.values
    shk = np.abs(s[l])
    num = (G[i, j] + G[i, l]) * Fv[i] + abs(s[i, j]) * G[j, l] * Fv[j]
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(shk > tol, num / np.where(shk > tol, shk, 1.0), np.inf)


def certified_defect_bound(
    S: ScalarKernel, F: ControlKernel, f, g, h, tol: float = DEFAULT_TOL, force: bool = False
) -> BoundResult:
    """``min_k ([G(f,g) + G(f,h)] F(f,k) + |S(f,g)| G(g,h) F(g,k)) / |S(h,k)|``.

    ``G`` is :func:`~sincov.kernel.gamma_matrix`.  Under the delta-Sincov
    premise this dominates ``defect(f, g, h)``.  Refuses with
    :class:`PremiseError` when the premise fails unless ``force`` is set, in
    which case the result is labelled non-certifying.
    """
    _same_ground(S, F)
    ok = _premise(S, F, tol, force)
    i, j, l = (S.ground.index(x) for x in (f, g, h))
    terms = _bound_terms(S, F, gamma_matrix(F), i, j, l, tol)
    k = int(np.argmin(terms))
    if not np.isfinite(terms[k]):
        return BoundResult(float("inf"), None, ok, unbounded=True)
    return BoundResult(float(terms[k]), S.ground.labels[k], ok)


def certified_bound_table(S: ScalarKernel, F: ControlKernel, tol: float = DEFAULT_TOL, force: bool = False):
    """All-triples version of :func:`certified_defect_bound`.

    Returns ``(bounds, argmin)`` with shape ``(n, n, n)``; ``argmin`` holds
    ``k`` indices (``-1`` where the bound is infinite).
    """
    _same_ground(S, F)
    _premise(S, F, tol, force)
    s = np.abs(S.values)
    Fv = F.values
    G = gamma_matrix(F)
    n = S.n
    bounds = np.empty((n, n, n))
    argmin = np.empty((n, n, n), dtype=int)
    valid = s > tol  # [h, k]
    denom = np.where(valid, s, 1.0)
    for i in range(n):
        # terms[g, h, k]
        A = G[i][:, None] + G[i][None, :]
        num = A[:, :, None] * Fv[i][None, None, :] + (s[i][:, None] * G)[:, :, None] * Fv[:, None, :]
        terms = np.where(valid[None, :, :], num / denom[None, :, :], np.inf)
        k = np.argmin(terms, axis=2)
        bounds[i] = np.take_along_axis(terms, k[..., None], axis=2)[..., 0]
        argmin[i] = np.where(np.isfinite(bounds[i]), k, -1)
    return bounds, argmin


def propagation_steps(S: ScalarKernel, F: ControlKernel, f, g, h, m) -> dict:
    """Pointwise-in-``k`` forms of the three propagation steps for unbounded ratios.

    Each value is ``max_k (lhs - rhs)``; all are ``<= 0`` (up to roundoff)
    when ``(S, F)`` is delta-Sincov.

    1. ``|S(g,k)| / F(f,k) <= F(h,f) |S(g,k)| / F(h,k)``
    2. ``|S(g,k)/F(h,k) - S(g,h) S(h,k)/F(h,k)| <= F(g,h)``
    3. ``|S(h,k)| / F(h,k) <= F(m,h) |S(h,k)| / F(m,k)``
    """
    fi, gi, hi, mi = (S.ground.index(x) for x in (f, g, h, m))
    s, Fv = S.values, F.values
    step1 = np.abs(s[gi]) / Fv[fi] - Fv[hi, fi] * np.abs(s[gi]) / Fv[hi]
    step2 = np.abs(s[gi] / Fv[hi] - s[gi, hi] * s[hi] / Fv[hi]) - Fv[gi, hi]
    step3 = np.abs(s[hi]) / Fv[hi] - Fv[mi, hi] * np.abs(s[hi]) / Fv[mi]
    return {"step1": float(step1.max()), "step2": float(step2.max()), "step3": float(step3.max())}


@dataclass
class CharacterReport:
    index: int
    weights: np.ndarray
    report: DefectReport

    def to_dict(self) -> dict:
        return {"index": self.index, "weights": alg.complex_to_json(self.weights), **self.report.to_dict()}


def per_character_check(T: AlgebraKernel, F: ControlKernel, tol: float = DEFAULT_TOL, seed: int = 0):
    """``check_delta`` of every scalar kernel ``m o T`` against ``F``, in character order."""
    chars = alg.characters(T.algebra, seed=seed)
    return [CharacterReport(i, ch.weights, check_delta(T.compose(ch), F, tol)) for i, ch in enumerate(chars)]


@dataclass
class DecompositionReport:
    sincov_chars: list
    other_chars: list
    char_max_defects: list
    lambda1_kernel: AlgebraKernel | None
    lambda1_max_defect: float
    lambda2_sup_table: np.ndarray | None
    isometry_check: float
    tol: float
    points: tuple = field(default=())

    def lambda1_scalar_kernels(self) -> list[ScalarKernel]:
        if self.lambda1_kernel is None:
            return []
        K = self.lambda1_kernel
        return [ScalarKernel(K.ground, K.values[:, :, p]) for p in range(K.algebra.dim)]

    def to_dict(self) -> dict:
        return {
            "tol": self.tol,
            "sincov_chars": list(self.sincov_chars),
            "other_chars": list(self.other_chars),
            "points": list(self.points),
            "char_max_defects": list(self.char_max_defects),
            "lambda1_max_defect": self.lambda1_max_defect,
            "lambda2_sup_table": None if self.lambda2_sup_table is None else self.lambda2_sup_table.tolist(),
            "isometry_residual": self.isometry_check,
        }


def decompose(
    T: AlgebraKernel, F: ControlKernel, tol: float = DEFAULT_TOL, n_samples: int = 100, seed: int = 0
) -> DecompositionReport:
    """Split a function-algebra kernel into its Sincov and non-Sincov coordinates.

    ``M_s`` is the set of points whose coordinate kernel has max defect
    ``<= tol``.  ``Lambda1`` restricts to ``M_s``, ``Lambda2`` to the
    complement.  The table ``R[f, g] = max_k ||Lambda2 T(g,k)|| / F(f,k)``
    records the boundedness data, and the isometry residual is
    ``max |max(||Lambda1 x||, ||Lambda2 x||) - ||x|||`` over the kernel
    values and ``n_samples`` random elements.
    """
    spec = T.algebra
    if spec.family != alg.FUNCTION:
        raise UnsupportedFamilyError("decompose needs a function-algebra kernel")
    _same_ground(T, F)
    d = spec.dim
    defects = [max_defect(ScalarKernel(T.ground, T.values[:, :, p]), tol).max_defect for p in range(d)]
    ms = [p for p in range(d) if defects[p] <= tol]
    other = [p for p in range(d) if defects[p] > tol]

    lam1 = None
    lam1_def = 0.0
    if ms:
        sub = alg.function_algebra([spec.points[p] for p in ms])
        lam1 = AlgebraKernel(T.ground, sub, T.values[:, :, ms])
        lam1_def = max_defect(lam1, tol).max_defect

    table = None
    if other:
        mag = np.abs(T.values[:, :, other]).max(axis=2)
        table = (mag[None, :, :] / F.values[:, None, :]).max(axis=2)

    rng = as_rng(seed)
    samples = T.values.reshape(-1, d)
    randoms = rng.standard_normal((n_samples, d)) + 1j * rng.standard_normal((n_samples, d))
    xs = np.concatenate([samples, randoms])
    full = np.abs(xs).max(axis=1)
    n1 = np.abs(xs[:, ms]).max(axis=1) if ms else np.zeros(len(xs))
    n2 = np.abs(xs[:, other]).max(axis=1) if other else np.zeros(len(xs))
    iso = float(np.abs(np.maximum(n1, n2) - full).max())

    return DecompositionReport(
        sincov_chars=ms,
        other_chars=other,
        char_max_defects=defects,
        lambda1_kernel=lam1,
        lambda1_max_defect=lam1_def,
        lambda2_sup_table=table,
        isometry_check=iso,
        tol=tol,
        points=spec.points,
    )


@dataclass
class TrendReport:
    """Per-point sup ratios across refinement levels (rows) of the same point set (columns)."""

    levels: list
    points: tuple
    sup: np.ndarray
    growth: np.ndarray  # sup at the last level over sup at the first

    def to_dict(self) -> dict:
        return {
            "levels": list(self.levels),
            "points": list(self.points),
            "sup": self.sup.tolist(),
            "growth": self.growth.tolist(),
        }


def sup_ratio_trend(make, levels) -> TrendReport:
    """Measure how ``max_{f,g,k} |m(T(g,k))| / F(f,k)`` moves as the ground set is refined.

    ``make(level)`` returns ``(T, F)`` for a function-algebra kernel; every
    level must use the same points.  A finite sample is always bounded, so
    this only exhibits a trend: steady growth at a point hints that the
    unrefined set is unbounded there.
    """
    rows, points = [], None
    for level in levels:
        T, F = make(level)
        if T.algebra.family != alg.FUNCTION:
            raise UnsupportedFamilyError("sup_ratio_trend needs function-algebra kernels")
        _same_ground(T, F)
        if points is None:
            points = T.algebra.points
        elif T.algebra.points != points:
            raise ValueError("refinement levels must share the same points")
        mag = np.abs(T.values)  # (g, k, p)
        rows.append((mag[None, :, :, :] / F.values[:, None, :, None]).max(axis=(0, 1, 2)))
    sup = np.array(rows)
    with np.errstate(divide="ignore", invalid="ignore"):
        growth = sup[-1] / sup[0]
    return TrendReport(list(levels), tuple(points), sup, growth)
