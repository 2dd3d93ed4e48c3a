"""Grüss inequality checks on sampled functions and the Richard kernel.

The Grüss inequality bounds the covariance-like gap
``|I(fg) - I(f) I(g)|`` of two bounded functions by
``(M_f - m_f)(M_g - m_g) / 4``, where ``I`` is the integral mean.  The
Richard kernel ``S(f, g) = <f, g> / (|f| |g|)`` is a family with bounded
Sincov defect.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import integrate

from .exceptions import DimensionMismatchError, DomainError, InputFormatError
from .kernel import (
    DEFAULT_TOL,
    ControlKernel,
    GroundSet,
    ScalarKernel,
    check_delta,
    constant_control_for,
    defect_cube,
)

QUAD_CONSTANT = 10.0


@dataclass(frozen=True)
class SampledFunction:
    """Values on the uniform grid ``a + i (b - a) / (N - 1)``, ``i = 0..N-1``."""

    a: float
    b: float
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).reshape(-1)
        if not self.a < self.b:
            raise DomainError("interval must satisfy a < b")
        if vals.shape[0] < 2:
            raise DomainError("need at least two samples")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, fn, a: float, b: float, n: int) -> "SampledFunction":
        return cls(a, b, fn(np.linspace(a, b, n)))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def step(self) -> float:
        return (self.b - self.a) / (self.n - 1)

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.n)

    def __mul__(self, other: "SampledFunction") -> "SampledFunction":
        _same_grid(self, other)
        return SampledFunction(self.a, self.b, self.values * other.values)


@dataclass(frozen=True)
class BoundsBox:
    lower: float
    upper: float

    def __post_init__(self):
        if self.lower > self.upper:
            raise DomainError("bounds box needs lower <= upper")

    def contains(self, f: SampledFunction, tol: float = 1e-12) -> bool:
        return bool(np.all(f.values >= self.lower - tol) and np.all(f.values <= self.upper + tol))


def _same_grid(f: SampledFunction, g: SampledFunction):
    if f.n != g.n or f.a != g.a or f.b != g.b:
        raise DimensionMismatchError((f.a, f.b, f.n), (g.a, g.b, g.n), what="grid")


def integral_mean(f: SampledFunction, rule: str = "trapezoid") -> float:
    """Composite-quadrature estimate of ``(1 / (b - a)) * integral of f``."""
    if rule == "trapezoid":
        total = integrate.trapezoid(f.values, dx=f.step)
    elif rule == "simpson":
        if f.n % 2 == 0:
            raise DomainError("Simpson's rule needs an odd number of samples")
        total = integrate.simpson(f.values, dx=f.step)
    else:
        raise ValueError(f"unknown rule {rule!r}")
    return float(total / (f.b - f.a))


@dataclass
class GrussReport:
    gap: float
    bound: float
    margin: float
    quad_tol: float
    bounds_inferred: bool
    rule: str

    @property
    def violated(self) -> bool:
        return self.margin < -self.quad_tol

    def to_dict(self) -> dict:
        return {
            "rule": self.rule,
            "gap": self.gap,
            "bound": self.bound,
            "margin": self.margin,
            "quad_tol": self.quad_tol,
            "bounds_inferred": self.bounds_inferred,
            "violated": self.violated,
        }


def gruss_check(
    f: SampledFunction,
    g: SampledFunction,
    bounds_f: BoundsBox | None = None,
    bounds_g: BoundsBox | None = None,
    rule: str = "trapezoid",
) -> GrussReport:
    """Compare ``|I(fg) - I(f) I(g)|`` with ``(M_f - m_f)(M_g - m_g) / 4``.

    Missing bounds are inferred from the samples.  A violation is only
    flagged beyond the quadrature slack ``10 max|values|^2 h^p`` with
    ``p = 2`` (trapezoid) or ``4`` (Simpson).
    """
    _same_grid(f, g)
    inferred = bounds_f is None or bounds_g is None
    bf = bounds_f or BoundsBox(float(f.values.min()), float(f.values.max()))
    bg = bounds_g or BoundsBox(float(g.values.min()), float(g.values.max()))
    for box, fn, name in ((bf, f, "f"), (bg, g, "g")):
        if not box.contains(fn):
            raise DomainError(f"samples of {name} leave the given bounds box")
    gap = abs(integral_mean(f * g, rule) - integral_mean(f, rule) * integral_mean(g, rule))
    bound = 0.25 * (bf.upper - bf.lower) * (bg.upper - bg.lower)
    peak = max(float(np.abs(f.values).max()), float(np.abs(g.values).max()))
    order = 2 if rule == "trapezoid" else 4
    quad_tol = QUAD_CONSTANT * peak * peak * f.step**order
    return GrussReport(gap, bound, bound - gap, quad_tol, inferred, rule)


def sampled_function_from_csv(text: str, path=None, rtol: float = 1e-9) -> SampledFunction:
    """Two columns ``x, value``; ``x`` must be uniform within ``rtol`` (relative)."""
    xs, ys = [], []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or not "".join(row).strip():
            continue
        if len(row) != 2:
            raise InputFormatError(f"expected 2 columns, got {len(row)}", path=path, line=lineno)
        try:
            x, y = float(row[0]), float(row[1])
        except ValueError:
            if lineno == 1:
                continue  # header
            raise InputFormatError("non-numeric entry", path=path, line=lineno) from None
        xs.append(x)
        ys.append(y)
    if len(xs) < 2:
        raise InputFormatError("need at least two samples", path=path)
    xs = np.array(xs)
    expected = np.linspace(xs[0], xs[-1], len(xs))
    span = abs(xs[-1] - xs[0])
    bad = np.nonzero(np.abs(xs - expected) > rtol * span)[0]
    if bad.size:
        raise InputFormatError("x column is not a uniform grid", path=path, line=int(bad[0]) + 1, field="x")
    return SampledFunction(float(xs[0]), float(xs[-1]), np.array(ys))


def load_sampled_function(path) -> SampledFunction:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputFormatError(f"cannot read file ({exc.strerror})", path=path) from exc
    return sampled_function_from_csv(text, path=path)


# ----------------------------------------------------------------- Richard


def richard_kernel(vectors) -> ScalarKernel:
    V = np.asarray(vectors, dtype=float)
    if V.ndim != 2:
        raise DomainError("vectors must be a 2-d array (one vector per row)")
    norms = np.linalg.norm(V, axis=1)
    if np.any(norms == 0):
        raise DomainError("Richard kernel is undefined for zero vectors")
    U = V / norms[:, None]
    G = U @ U.T
    G = 0.5 * (G + G.T)  # exact symmetry despite BLAS ordering
    return ScalarKernel(GroundSet.range(V.shape[0]), G)


@dataclass
class RichardReport:
    kernel: ScalarKernel
    max_defect: float
    argmax_triple: tuple
    c: float
    passes: bool
    control: float
    identity_residual: float
    delta_agrees: bool
    delta_verdict: str

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "max_defect": self.max_defect,
            "argmax_triple": list(self.argmax_triple),
            "passes": self.passes,
            "constant_control": self.control,
            "identity_residual": self.identity_residual,
            "delta_agrees": self.delta_agrees,
            "delta_verdict": self.delta_verdict,
        }


def richard_check(vectors, c: float = 0.0, tol: float = DEFAULT_TOL) -> RichardReport:
    """Scan the Richard kernel against the constant defect budget ``c``.

    Also cross-checks the constant control ``F = (1 + sqrt(1 + 4c)) / 2``:
    ``F*F - F = c``, and ``check_delta`` with this ``F`` must accept exactly
    the triples whose defect is within ``c``.
    """
    if c < 0:
        raise DomainError("c must be nonnegative")
    S = richard_kernel(vectors)
    D = defect_cube(S)
    worst = int(np.argmax(D))
    n = S.n
    i, rem = divmod(worst, n * n)
    triple = (S.ground.labels[i], *(S.ground.labels[x] for x in divmod(rem, n)))
    Fc = constant_control_for(c)
    F = ControlKernel.constant(S.ground, Fc)
    rep = check_delta(S, F, tol, keep_margins=True)
    agrees = bool(np.array_equal(rep.per_triple_margins >= -tol, D <= c + tol))
    return RichardReport(
        kernel=S,
        max_defect=float(D.flat[worst]),
        argmax_triple=triple,
        c=c,
        passes=bool(D.flat[worst] <= c + tol),
        control=Fc,
        identity_residual=abs(Fc * Fc - Fc - c),
        delta_agrees=agrees,
        delta_verdict=rep.verdict,
    )
