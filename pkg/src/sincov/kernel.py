"""Sincov and control kernels on a finite ground set.

A kernel is a dense ``n x n`` table over an ordered list of labels.  Scalar
kernels hold complex numbers, algebra kernels hold coefficient vectors of an
:class:`~sincov.algebra.AlgebraSpec`, and control kernels hold positive reals.

All global checks are exhaustive scans of the ``n**3`` triples ``(f, g, h)``.
Scans are split into row blocks over ``f``; any partition (and any number of
worker threads) yields the same report, with ties broken by the smallest
``(f, g, h)`` index triple.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import algebra as alg
from ._validation import check_real_nonnegative, check_square
from .exceptions import (
    DomainError,
    GroundSetMismatchError,
    InputFormatError,
    NotSemisimpleError,
)

DEFAULT_TOL = 1e-9
EXACT_TOL = 1e-12
SINCOV = "sincov"
DELTA_CERTIFIED = "delta_certified"
VIOLATED = "violated"


# ------------------------------------------------------------------- types


@dataclass(frozen=True)
class GroundSet:
    labels: tuple

    def __post_init__(self):
        labels = tuple(_label_str(x) for x in self.labels)
        if not labels:
            raise ValueError("ground set must be nonempty")
        if len(set(labels)) != len(labels):
            raise ValueError("ground set labels must be distinct")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_pos", {x: i for i, x in enumerate(labels)})

    def __len__(self):
        return len(self.labels)

    def index(self, label) -> int:
        try:
            return self._pos[_label_str(label)]
        except KeyError:
            raise KeyError(f"unknown label {label!r}") from None

    def numeric(self) -> np.ndarray:
        """Labels parsed as floats (for parameter-indexed fixtures)."""
        try:
            return np.array([float(x) for x in self.labels])
        except ValueError:
            raise DomainError("ground-set labels are not numeric") from None

    @classmethod
    def range(cls, n: int) -> "GroundSet":
        return cls(tuple(str(i) for i in range(n)))


def _label_str(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _ground(ground) -> GroundSet:
    if isinstance(ground, GroundSet):
        return ground
    if isinstance(ground, int):
        return GroundSet.range(ground)
    return GroundSet(tuple(ground))


@dataclass(frozen=True, eq=False)
class ScalarKernel:
    ground: GroundSet
    values: np.ndarray

    def __post_init__(self):
        ground = _ground(self.ground)
        vals = check_square(self.values, complex)
        if vals.shape[0] != len(ground):
            raise GroundSetMismatchError(f"{vals.shape[0]} rows for {len(ground)} labels")
        vals.setflags(write=False)
        object.__setattr__(self, "ground", ground)
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return len(self.ground)

    def __call__(self, f, g) -> complex:
        return complex(self.values[self.ground.index(f), self.ground.index(g)])

    def to_dict(self) -> dict:
        return {"ground": list(self.ground.labels), "values": alg.complex_to_json(self.values)}


@dataclass(frozen=True, eq=False)
class AlgebraKernel:
    ground: GroundSet
    algebra: alg.AlgebraSpec
    values: np.ndarray  # (n, n, dim) coefficient vectors

    def __post_init__(self):
        ground = _ground(self.ground)
        vals = check_square(self.values, complex, trailing=1)
        if vals.shape[0] != len(ground):
            raise GroundSetMismatchError(f"{vals.shape[0]} rows for {len(ground)} labels")
        if vals.shape[2] != self.algebra.dim:
            raise alg.DimensionMismatchError(vals.shape[2], self.algebra.dim)
        vals.setflags(write=False)
        object.__setattr__(self, "ground", ground)
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return len(self.ground)

    def __call__(self, f, g) -> alg.Element:
        return alg.Element(self.algebra, self.values[self.ground.index(f), self.ground.index(g)])

    def compose(self, ch: alg.Character) -> ScalarKernel:
        """The scalar kernel ``m o T``."""
        return ScalarKernel(self.ground, ch.evaluate(self.values))

    def entry_norms(self) -> np.ndarray:
        return self.algebra.norms(self.values)

    def to_dict(self) -> dict:
        return {
            "ground": list(self.ground.labels),
            "algebra": self.algebra.to_dict(),
            "values": alg.complex_to_json(self.values),
        }


@dataclass(frozen=True, eq=False)
class ControlKernel:
    """Nonnegative real table ``F``; positivity itself is reported by :func:`check_control`."""

    ground: GroundSet
    values: np.ndarray

    def __post_init__(self):
        ground = _ground(self.ground)
        try:
            vals = check_real_nonnegative(check_square(self.values, complex), "control values")
        except ValueError as exc:
            raise DomainError(str(exc)) from None
        if vals.shape[0] != len(ground):
            raise GroundSetMismatchError(f"{vals.shape[0]} rows for {len(ground)} labels")
        vals.setflags(write=False)
        object.__setattr__(self, "ground", ground)
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, ground, value: float) -> "ControlKernel":
        ground = _ground(ground)
        n = len(ground)
        return cls(ground, np.full((n, n), float(value)))

    @property
    def n(self) -> int:
        return len(self.ground)

    def __call__(self, f, g) -> float:
        return float(self.values[self.ground.index(f), self.ground.index(g)])

    def to_dict(self) -> dict:
        return {"ground": list(self.ground.labels), "values": self.values.tolist()}


def constant_control_for(c: float) -> float:
    """The constant ``F`` with ``F*F - F = c``, i.e. ``(1 + sqrt(1 + 4c)) / 2``."""
    if c < 0:
        raise DomainError("defect budget must be nonnegative")
    return 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * c))


GOLDEN = constant_control_for(1.0)


def _same_ground(a, b):
    if a.ground.labels != b.ground.labels:
        raise GroundSetMismatchError("kernels are defined on different ground sets")


# ------------------------------------------------------------- triple scans


def defect(S, f, g, h) -> float:
    """Sincov defect ``|S(f,h) - S(f,g) S(g,h)|`` (algebra norm for algebra kernels)."""
    i, j, k = (S.ground.index(x) for x in (f, g, h))
    if isinstance(S, AlgebraKernel):
        A = S.algebra
        v = S.values
        return float(A.norms(v[i, k] - A.mul(v[i, j], v[j, k])))
    v = S.values
    return float(abs(v[i, k] - v[i, j] * v[j, k]))


def defect_rows(S, rows) -> np.ndarray:
    """Defects ``D[r, g, h]`` for ``f = rows[r]`` and all ``g, h``."""
    v = S.values
    vf = v[rows]
    if isinstance(S, AlgebraKernel):
        A = S.algebra
        diff = vf[:, None, :, :] - A.mul(vf[:, :, None, :], v[None, :, :, :])
        return A.norms(diff)
    return np.abs(vf[:, None, :] - vf[:, :, None] * v[None, :, :])


def defect_cube(S) -> np.ndarray:
    return defect_rows(S, np.arange(S.n))


def _row_blocks(n: int, per_row: int, chunk_rows: int | None) -> list[np.ndarray]:
    if chunk_rows is None:
        chunk_rows = max(1, int(4_000_000 // max(1, per_row)))
    return [np.arange(s, min(n, s + chunk_rows)) for s in range(0, n, chunk_rows)]


@dataclass
class _Extremum:
    value: float
    index: int  # flat index into the n**3 cube

    def better_max(self, other):
        return other.value > self.value or (other.value == self.value and other.index < self.index)

    def better_min(self, other):
        return other.value < self.value or (other.value == self.value and other.index < self.index)


def _scan(S, F=None, n_jobs: int = 1, chunk_rows: int | None = None, keep_margins: bool = False):
    n = S.n
    per_row = n * n * (S.algebra.dim if isinstance(S, AlgebraKernel) else 1)
    blocks = _row_blocks(n, per_row, chunk_rows)
    Fv = None if F is None else F.values

    def work(rows):
        D = defect_rows(S, rows)
        base = int(rows[0]) * n * n
        amax = int(np.argmax(D))
        out = {"max": _Extremum(float(D.flat[amax]), base + amax)}
        if Fv is not None:
            M = Fv[rows][:, :, None] * Fv[None, :, :] - Fv[rows][:, None, :] - D
            amin = int(np.argmin(M))
            out["min"] = _Extremum(float(M.flat[amin]), base + amin)
            if keep_margins:
                out["margins"] = M
        return out

    if n_jobs and n_jobs > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as ex:
            parts = list(ex.map(work, blocks))
    else:
        parts = [work(b) for b in blocks]

    best_max = parts[0]["max"]
    best_min = parts[0].get("min")
    for p in parts[1:]:
        if best_max.better_max(p["max"]):
            best_max = p["max"]
        if best_min is not None and best_min.better_min(p["min"]):
            best_min = p["min"]
    margins = np.concatenate([p["margins"] for p in parts]) if keep_margins and Fv is not None else None
    return best_max, best_min, margins


def _triple(ground: GroundSet, flat: int) -> tuple:
    n = len(ground)
    i, rem = divmod(flat, n * n)
    j, k = divmod(rem, n)
    return (ground.labels[i], ground.labels[j], ground.labels[k])


@dataclass
class DefectReport:
    max_defect: float
    argmax_triple: tuple
    verdict: str
    tol: float
    min_margin: float | None = None
    argmin_triple: tuple | None = None
    per_triple_margins: np.ndarray | None = field(default=None, repr=False)

    @property
    def certified(self) -> bool:
        return self.verdict in (SINCOV, DELTA_CERTIFIED)

    def to_dict(self) -> dict:
        d = {
            "verdict": self.verdict,
            "tol": self.tol,
            "max_defect": self.max_defect,
            "argmax_triple": list(self.argmax_triple),
        }
        if self.min_margin is not None:
            d["min_margin"] = self.min_margin
            d["argmin_triple"] = list(self.argmin_triple)
        return d


def max_defect(S, tol: float = DEFAULT_TOL, n_jobs: int = 1, chunk_rows: int | None = None) -> DefectReport:
    """Exhaustive Sincov check; verdict ``sincov`` when every defect is ``<= tol``."""
    mx, _, _ = _scan(S, n_jobs=n_jobs, chunk_rows=chunk_rows)
    verdict = SINCOV if mx.value <= tol else VIOLATED
    return DefectReport(mx.value, _triple(S.ground, mx.index), verdict, tol)


def check_delta(
    S,
    F: ControlKernel,
    tol: float = DEFAULT_TOL,
    keep_margins: bool = False,
    n_jobs: int = 1,
    chunk_rows: int | None = None,
) -> DefectReport:
    """Check the delta-Sincov inequality ``defect(f,g,h) <= F(f,g)F(g,h) - F(f,h)``.

    The margin of a triple is the right side minus the defect.  The pair is
    ``violated`` if some margin is below ``-tol``; otherwise the verdict is
    ``sincov`` when all defects are ``<= tol`` and ``delta_certified`` if not.
    """
    _same_ground(S, F)
    mx, mn, margins = _scan(S, F, n_jobs=n_jobs, chunk_rows=chunk_rows, keep_margins=keep_margins)
    if mn.value < -tol:
        verdict = VIOLATED
    elif mx.value <= tol:
        verdict = SINCOV
    else:
        verdict = DELTA_CERTIFIED
    return DefectReport(
        mx.value,
        _triple(S.ground, mx.index),
        verdict,
        tol,
        min_margin=mn.value,
        argmin_triple=_triple(S.ground, mn.index),
        per_triple_margins=margins,
    )


# ------------------------------------------------------------ control kernel


@dataclass
class ControlReport:
    positivity: bool
    submultiplicativity: bool
    diagonal_lower_bound: bool
    min_entry: float
    min_diagonal: float
    max_submult_excess: float
    worst_triple: tuple
    tol: float

    @property
    def passed(self) -> bool:
        return self.positivity and self.submultiplicativity and self.diagonal_lower_bound

    def to_dict(self) -> dict:
        return {
            "positivity": self.positivity,
            "submultiplicativity": self.submultiplicativity,
            "diagonal_lower_bound": self.diagonal_lower_bound,
            "passed": self.passed,
            "min_entry": self.min_entry,
            "min_diagonal": self.min_diagonal,
            "max_submult_excess": self.max_submult_excess,
            "worst_triple": list(self.worst_triple),
            "tol": self.tol,
        }


def check_control(F: ControlKernel, tol: float = DEFAULT_TOL) -> ControlReport:
    """Necessary conditions on ``F`` for any kernel to be delta-Sincov with it.

    ``F(f,h) <= F(f,g) F(g,h)`` follows from the inequality itself; with
    positivity, ``F(f,f) <= F(f,f)**2`` forces ``F(f,f) >= 1``.
    """
    v = F.values
    excess = v[:, None, :] - v[:, :, None] * v[None, :, :]  # [f, g, h]
    worst = int(np.argmax(excess))
    diag = np.diag(v)
    return ControlReport(
        positivity=bool(np.all(v > 0)),
        submultiplicativity=bool(excess.flat[worst] <= tol),
        diagonal_lower_bound=bool(np.all(diag >= 1.0 - tol)),
        min_entry=float(v.min()),
        min_diagonal=float(diag.min()),
        max_submult_excess=float(excess.flat[worst]),
        worst_triple=_triple(F.ground, worst),
        tol=tol,
    )


def gamma(F: ControlKernel, f, g) -> float:
    """``F(f,g) F(g,f) - 1``."""
    i, j = F.ground.index(f), F.ground.index(g)
    return float(F.values[i, j] * F.values[j, i] - 1.0)


def gamma_matrix(F: ControlKernel) -> np.ndarray:
    return F.values * F.values.T - 1.0


@dataclass
class HReport:
    premise_holds: bool
    violations: list
    max_excess: float
    tol: float

    @property
    def n_violations(self) -> int:
        return len(self.violations)

    def to_dict(self) -> dict:
        return {
            "premise_holds": self.premise_holds,
            "conclusion_asserted": self.premise_holds,
            "n_violations": self.n_violations,
            "violations": [list(t) for t in self.violations],
            "max_excess": self.max_excess,
            "tol": self.tol,
        }


def h_submultiplicativity(S: ScalarKernel, F: ControlKernel, tol: float = DEFAULT_TOL) -> HReport:
    """Scan ``H = S + F`` for violations of ``H(f,h) <= H(f,g) H(g,h)``.

    ``S`` must be real and nonnegative.  The conclusion is only a theorem when
    ``(S, F)`` is delta-Sincov; ``premise_holds`` records that check.
    """
    try:
        s = check_real_nonnegative(S.values, "S")
    except ValueError as exc:
        raise DomainError(str(exc)) from None
    _same_ground(S, F)
    premise = check_delta(S, F, tol).certified
    H = s + F.values
    excess = H[:, None, :] - H[:, :, None] * H[None, :, :]
    bad = np.argwhere(excess > tol)
    violations = [tuple(S.ground.labels[i] for i in t) for t in bad]
    return HReport(premise, violations, float(excess.max()), tol)


# -------------------------------------------------------- representations


def build_from_phi(ground, phi) -> ScalarKernel:
    """The Sincov kernel ``S(f,g) = phi(f) / phi(g)``."""
    phi = np.asarray(phi, dtype=complex).reshape(-1)
    if np.any(phi == 0):
        raise DomainError("phi must not vanish")
    return ScalarKernel(_ground(ground), phi[:, None] / phi[None, :])


@dataclass
class PhiRecovery:
    phi: np.ndarray
    residual: float
    relative_residual: float
    mode: str
    sincov: bool

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "phi": alg.complex_to_json(self.phi),
            "residual": self.residual,
            "relative_residual": self.relative_residual,
            "sincov": self.sincov,
        }


def _wrap(theta):
    """Wrap angles to ``(-pi, pi]``."""
    return np.pi - np.mod(np.pi - theta, 2 * np.pi)


def _pairwise_lsq(A: np.ndarray) -> np.ndarray:
    """Minimise ``sum (A[f,g] - x_f + x_g)**2`` over all ordered pairs, gauge ``x_0 = 0``.

    On the complete graph the normal equations give
    ``x_f = mean(x) + sum_g (A[f,g] - A[g,f]) / (2n)``.
    """
    n = A.shape[0]
    x = (A - A.T).sum(axis=1) / (2 * n)
    return x - x[0]


def recover_phi(S: ScalarKernel, mode: str = "anchor", anchor=None, tol: float = DEFAULT_TOL) -> PhiRecovery:
    """Recover ``phi`` with ``S(f,g) ~ phi(f) / phi(g)``, normalised to ``phi[0] = 1``.

    ``anchor`` reads ``phi`` off one column; ``least_squares`` fits
    ``log|S|`` and ``arg S`` as pairwise differences.  The phase fit starts
    from the first column's arguments and does one pass of re-wrapped
    residuals, which is reliable for per-entry phase noise well below pi/2.
    """
    v = S.values
    if mode == "anchor":
        j = 0 if anchor is None else S.ground.index(anchor)
        col = v[:, j]
        if np.any(col == 0):
            raise DomainError(f"anchor column {S.ground.labels[j]!r} contains a zero")
        phi = col / col[0]
    elif mode == "least_squares":
        if np.any(v == 0):
            raise DomainError("least-squares recovery needs a nonvanishing kernel")
        modulus = _pairwise_lsq(np.log(np.abs(v)))
        theta0 = np.angle(v[:, 0])
        r = _wrap(np.angle(v) - (theta0[:, None] - theta0[None, :]))
        theta = theta0 + _pairwise_lsq(r)
        theta = theta - theta[0]
        phi = np.exp(modulus + 1j * theta)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    fitted = phi[:, None] / phi[None, :]
    residual = float(np.abs(v - fitted).max())
    relative = float(np.abs(v / fitted - 1.0).max())
    return PhiRecovery(phi, residual, relative, mode, residual <= tol)


def build_algebra_kernel(spec: alg.AlgebraSpec, chars, active, phi_per_char, ground=None) -> AlgebraKernel:
    """Assemble ``T`` from prescribed Gelfand values.

    ``m(T(f,g)) = phi(m,f) / phi(m,g)`` for ``m`` in ``active`` and ``0``
    for the other characters.  ``phi_per_char`` maps a character index to a
    vector over the ground set (a dict, or an array indexed by character).
    """
    radical, semisimple = alg.radical_and_semisimplicity(spec)
    if not semisimple:
        raise NotSemisimpleError(len(radical))
    W = alg.character_matrix(chars)
    if W.shape[0] != W.shape[1] or np.linalg.matrix_rank(W) < spec.dim:
        raise NotSemisimpleError(spec.dim - np.linalg.matrix_rank(W))
    active = sorted(set(int(a) for a in active))
    phis = {m: np.asarray(phi_per_char[m], dtype=complex) for m in active}
    if ground is None:
        n = len(next(iter(phis.values()))) if phis else 1
        ground = GroundSet.range(n)
    ground = _ground(ground)
    n = len(ground)
    G = np.zeros((n, n, W.shape[0]), dtype=complex)
    for m in active:
        p = phis[m]
        if p.shape != (n,):
            raise GroundSetMismatchError(f"phi for character {m} has length {p.shape[0]}, expected {n}")
        if np.any(p == 0):
            raise DomainError(f"phi for character {m} vanishes")
        G[:, :, m] = p[:, None] / p[None, :]
    coeffs = np.linalg.solve(W, G.reshape(-1, W.shape[0]).T).T.reshape(n, n, spec.dim)
    return AlgebraKernel(ground, spec, coeffs)


# ------------------------------------------------------------ sup ratios


def sup_ratio(S, F: ControlKernel, f, g) -> tuple[float, str]:
    """``max_k |S(g,k)| / F(f,k)`` and its maximiser (norms for algebra kernels)."""
    _same_ground(S, F)
    i, j = F.ground.index(f), S.ground.index(g)
    row = S.entry_norms()[j] if isinstance(S, AlgebraKernel) else np.abs(S.values[j])
    r = row / F.values[i]
    k = int(np.argmax(r))
    return float(r[k]), S.ground.labels[k]


def sup_ratio_table(S, F: ControlKernel) -> np.ndarray:
    """``R[f, g] = max_k |S(g,k)| / F(f,k)`` for all label pairs."""
    _same_ground(S, F)
    mag = S.entry_norms() if isinstance(S, AlgebraKernel) else np.abs(S.values)
    return (mag[None, :, :] / F.values[:, None, :]).max(axis=2)


# -------------------------------------------------------------------- io


def kernel_from_dict(obj, path=None):
    """Decode a scalar or algebra kernel; instance bundles yield their ``kernel``."""
    if isinstance(obj, dict) and "kernel" in obj:
        obj = obj["kernel"]
    if not isinstance(obj, dict):
        raise InputFormatError("kernel must be a JSON object", path=path)
    for key in ("ground", "values"):
        if key not in obj:
            raise InputFormatError(f"missing {key!r}", path=path, field=key)
    ground = GroundSet(tuple(obj["ground"]))
    values = alg.complex_from_json(obj["values"], ndim=3 if "algebra" in obj else 2)
    try:
        if "algebra" in obj:
            spec = alg.algebra_from_json(obj["algebra"])
            return AlgebraKernel(ground, spec, values)
        return ScalarKernel(ground, values)
    except (ValueError, alg.DimensionMismatchError) as exc:
        if isinstance(exc, InputFormatError):
            raise
        raise InputFormatError(str(exc), path=path, field="values") from exc


def control_from_dict(obj, path=None) -> ControlKernel:
    if isinstance(obj, dict) and "control" in obj and isinstance(obj["control"], dict):
        obj = obj["control"]
    if not isinstance(obj, dict) or "ground" not in obj or "values" not in obj:
        raise InputFormatError("control kernel needs 'ground' and 'values'", path=path)
    try:
        return ControlKernel(GroundSet(tuple(obj["ground"])), np.array(obj["values"], dtype=float))
    except (ValueError, TypeError) as exc:
        if isinstance(exc, InputFormatError):
            raise
        raise InputFormatError(str(exc), path=path, field="values") from exc


def read_json(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputFormatError(f"cannot read file ({exc.strerror})", path=path) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputFormatError(exc.msg, path=path, line=exc.lineno) from exc


def kernel_from_csv(text: str, path=None) -> ScalarKernel:
    """Real scalar kernel from CSV: a header row of labels, then ``n`` numeric rows."""
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if not rows:
        raise InputFormatError("empty CSV", path=path)
    labels = [x.strip() for x in rows[0]]
    data = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(labels):
            raise InputFormatError(f"expected {len(labels)} columns, got {len(row)}", path=path, line=lineno)
        try:
            data.append([float(x) for x in row])
        except ValueError as exc:
            raise InputFormatError(str(exc), path=path, line=lineno) from exc
    if len(data) != len(labels):
        raise InputFormatError(f"expected {len(labels)} data rows, got {len(data)}", path=path)
    return ScalarKernel(GroundSet(tuple(labels)), np.array(data))


def load_kernel(path):
    path = Path(path)
    if path.suffix.lower() == ".csv":
        try:
            return kernel_from_csv(path.read_text(), path=path)
        except OSError as exc:
            raise InputFormatError(f"cannot read file ({exc.strerror})", path=path) from exc
    return kernel_from_dict(read_json(path), path=path)


def load_control(path) -> ControlKernel:
    return control_from_dict(read_json(path), path=path)


def stack_characters(T: AlgebraKernel, chars: Sequence[alg.Character]) -> np.ndarray:
    """Gelfand values ``G[f, g, m] = m(T(f, g))``."""
    return T.values @ alg.character_matrix(chars).T
