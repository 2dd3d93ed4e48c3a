"""Finite-dimensional commutative unital algebras and their Gelfand calculus.

Two families are supported:

* ``function``: the algebra of complex functions on a finite point set with
  pointwise operations and the sup norm (a commutative C*-algebra).
* ``structure``: an algebra given by a structure-constants tensor ``c`` with
  ``e_i * e_j = sum_k c[i, j, k] e_k`` and an explicit unit vector.  The norm
  is the operator norm of left multiplication.

Elements are coefficient vectors over the basis; for the function family the
coefficients are the pointwise values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from .exceptions import (
    AlgebraInvariantError,
    CharacterComputationError,
    DimensionMismatchError,
    InputFormatError,
    UnsupportedFamilyError,
)

FUNCTION = "function"
STRUCTURE = "structure"

INVARIANT_TOL = 1e-12
CHARACTER_TOL = 1e-9
DEDUP_TOL = 1e-8
RANK_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class AlgebraSpec:
    """Immutable description of a commutative unital algebra.

    Use :func:`function_algebra`, :func:`structure_algebra` or
    :func:`triangular2` rather than calling the constructor directly.
    """

    family: str
    tensor: np.ndarray
    unit: np.ndarray
    points: tuple | None = None
    name: str | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.unit.shape[0]

    def element(self, coeffs) -> "Element":
        return Element(self, coeffs)

    def basis(self, i: int) -> "Element":
        e = np.zeros(self.dim, dtype=complex)
        e[i] = 1.0
        return Element(self, e)

    @property
    def one(self) -> "Element":
        return Element(self, self.unit)

    @property
    def zero(self) -> "Element":
        return Element(self, np.zeros(self.dim, dtype=complex))

    def random_element(self, rng: np.random.Generator) -> "Element":
        z = rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim)
        return Element(self, z)

    # batched coefficient-level operations; the leading axes are free
    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.family == FUNCTION:
            return a * b
        return np.einsum("...i,...j,ijk->...k", a, b, self.tensor)

    def left_matrices(self, a: np.ndarray) -> np.ndarray:
        """Left-multiplication matrices ``(L_a)[k, j] = sum_i a_i c[i, j, k]``."""
        return np.einsum("...i,ijk->...kj", a, self.tensor)

    def norms(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=complex)
        if self.family == FUNCTION:
            return np.abs(a).max(axis=-1)
        return np.linalg.svd(self.left_matrices(a), compute_uv=False)[..., 0]

    def to_dict(self) -> dict:
        if self.name == "triangular2":
            return {"family": STRUCTURE, "preset": "triangular2"}
        if self.family == FUNCTION:
            return {"family": FUNCTION, "points": list(self.points)}
        return {
            "family": STRUCTURE,
            "dim": self.dim,
            "c": complex_to_json(self.tensor),
            "unit": complex_to_json(self.unit),
        }


@dataclass(frozen=True, eq=False)
class Element:
    algebra: AlgebraSpec
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).reshape(-1)
        if c.shape[0] != self.algebra.dim:
            raise DimensionMismatchError(c.shape[0], self.algebra.dim)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def _check(self, other: "Element"):
        if other.algebra is not self.algebra:
            if other.algebra.dim != self.algebra.dim:
                raise DimensionMismatchError(self.algebra.dim, other.algebra.dim)
            raise DimensionMismatchError(
                self.algebra.name or id(self.algebra),
                other.algebra.name or id(other.algebra),
                what="algebra",
            )

    def __add__(self, other):
        self._check(other)
        return Element(self.algebra, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check(other)
        return Element(self.algebra, self.coeffs - other.coeffs)

    def __neg__(self):
        return Element(self.algebra, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Element):
            self._check(other)
            return Element(self.algebra, self.algebra.mul(self.coeffs, other.coeffs))
        return Element(self.algebra, complex(other) * self.coeffs)

    def __rmul__(self, other):
        return Element(self.algebra, complex(other) * self.coeffs)

    def norm(self) -> float:
        return float(self.algebra.norms(self.coeffs))

    def conj(self) -> "Element":
        if self.algebra.family != FUNCTION:
            raise UnsupportedFamilyError("involution is only defined on function algebras")
        return Element(self.algebra, np.conj(self.coeffs))

    def is_zero(self, atol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.coeffs) <= atol))

    def allclose(self, other: "Element", atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.coeffs, other.coeffs, rtol=0.0, atol=atol))


@dataclass(frozen=True)
class Character:
    """Unital multiplicative functional ``m(x) = weights . coeffs(x)``."""

    weights: np.ndarray

    def __call__(self, x) -> complex:
        c = x.coeffs if isinstance(x, Element) else np.asarray(x)
        return complex(self.weights @ c)

    def evaluate(self, coeffs: np.ndarray) -> np.ndarray:
        """Apply to a batch of coefficient vectors (last axis is the basis)."""
        return np.asarray(coeffs) @ self.weights


# ---------------------------------------------------------------- constructors


def function_algebra(points: Sequence) -> AlgebraSpec:
    points = tuple(str(p) for p in points)
    if not points:
        raise ValueError("function algebra needs at least one point")
    if len(set(points)) != len(points):
        raise ValueError("function algebra points must be distinct")
    n = len(points)
    c = np.zeros((n, n, n), dtype=complex)
    idx = np.arange(n)
    c[idx, idx, idx] = 1.0
    return AlgebraSpec(FUNCTION, c, np.ones(n, dtype=complex), points=points)


def check_structure_invariants(c: np.ndarray, unit: np.ndarray, tol: float = INVARIANT_TOL):
    """Raise :class:`AlgebraInvariantError` unless ``c`` is commutative, associative and unital."""
    n = unit.shape[0]
    if c.shape != (n, n, n):
        raise DimensionMismatchError(c.shape, (n, n, n), what="tensor shape")
    scale = max(1.0, float(np.abs(c).max()))
    comm = np.abs(c - c.transpose(1, 0, 2)).max()
    if comm > tol * scale:
        raise AlgebraInvariantError(f"tensor is not commutative (max asymmetry {comm:.3e})")
    left = np.einsum("ijk,klm->ijlm", c, c)
    right = np.einsum("jlk,ikm->ijlm", c, c)
    assoc = np.abs(left - right).max()
    if assoc > tol * scale * scale:
        raise AlgebraInvariantError(f"tensor is not associative (max defect {assoc:.3e})")
    unit_action = np.einsum("i,ijk->jk", unit, c)
    unit_err = np.abs(unit_action - np.eye(n)).max()
    if unit_err > tol * scale * max(1.0, float(np.abs(unit).max())):
        raise AlgebraInvariantError(f"unit vector does not act as identity (error {unit_err:.3e})")


def structure_algebra(c, unit, name: str | None = None, check: bool = True) -> AlgebraSpec:
    c = np.array(c, dtype=complex)
    unit = np.array(unit, dtype=complex).reshape(-1)
    if check:
        check_structure_invariants(c, unit)
    c.setflags(write=False)
    unit.setflags(write=False)
    return AlgebraSpec(STRUCTURE, c, unit, name=name)


def triangular2() -> AlgebraSpec:
    """Three-dimensional algebra spanned by ``U`` (unit), ``N`` and ``D``.

    An element ``xU + yN + (z - x)D`` stands for the matrix ``[[x, y], [0, z]]``;
    ``N`` is nilpotent and ``D`` idempotent.  The products are chosen commutative
    (``N D = D N = 0``), so ``N`` lies in the block seen by the ``x`` character.
    """
    c = np.zeros((3, 3, 3), dtype=complex)
    U, D = 0, 2  # N = 1 squares to zero and annihilates D
    for i in range(3):
        c[U, i, i] = c[i, U, i] = 1.0
    c[D, D, D] = 1.0
    return structure_algebra(c, [1.0, 0.0, 0.0], name="triangular2")


def change_basis(spec: AlgebraSpec, P) -> AlgebraSpec:
    """Re-express ``spec`` in the basis ``b_i = sum_j P[i, j] e_j``.

    The result is always of the structure family.
    """
    P = np.asarray(P, dtype=complex)
    Pinv = np.linalg.inv(P)
    # b_i b_j = sum P_ia P_jb c_abk e_k = sum P_ia P_jb c_abk Pinv_kl b_l
    c = np.einsum("ia,jb,abk,kl->ijl", P, P, spec.tensor, Pinv)
    unit = spec.unit @ Pinv
    return structure_algebra(c, unit)


PRESETS = {"triangular2": triangular2}


# ------------------------------------------------------------------ operations


def arithmetic(a: Element, b: Element | None, op: str, scale: complex | None = None) -> Element:
    """Dispatch ``add``, ``mul`` or ``scale``; thin wrapper over the operators."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "scale":
        return a * scale
    raise ValueError(f"unknown op {op!r}")


def norm(a: Element) -> float:
    return a.norm()


def _verify_character(spec: AlgebraSpec, w: np.ndarray, tol: float) -> bool:
    if abs(w @ spec.unit - 1.0) > tol:
        return False
    lhs = np.einsum("ijk,k->ij", spec.tensor, w)
    return bool(np.abs(lhs - np.outer(w, w)).max() <= tol)


def _polish(spec: AlgebraSpec, w: np.ndarray, iters: int = 80) -> np.ndarray:
    """Newton iterations on ``w_i w_j = sum_k c_ijk w_k`` and ``w . u = 1``.

    Schur diagonals are only accurate to ~sqrt(eps) on defective blocks; the
    polynomial system pins the exact character.
    """
    n = spec.dim
    c = spec.tensor
    eye = np.eye(n)
    for _ in range(iters):
        res = np.concatenate([(np.outer(w, w) - c @ w).ravel(), [w @ spec.unit - 1.0]])
        if np.abs(res).max() < 1e-15:
            break
        # d/dw_l of (w_i w_j - c_ijk w_k)
        jac = (
            np.einsum("il,j->ijl", eye, w) + np.einsum("i,jl->ijl", w, eye) - c
        ).reshape(n * n, n)
        jac = np.vstack([jac, spec.unit[None, :]])
        step = np.linalg.lstsq(jac, res, rcond=None)[0]
        w = w - step
    return w


def _count_clusters(values: np.ndarray, tol: float) -> int:
    reps: list[complex] = []
    for v in values:
        if all(abs(v - r) > tol for r in reps):
            reps.append(v)
    return len(reps)


def _dedupe(ws: list[np.ndarray], tol: float) -> list[np.ndarray]:
    out: list[np.ndarray] = []
    for w in ws:
        if all(np.abs(w - o).max() > tol for o in out):
            out.append(w)
    return out


def _sort_key(w: np.ndarray):
    r = np.round(w, 6)
    return tuple(x for z in r for x in (z.real, z.imag))


def characters(spec: AlgebraSpec, seed: int = 0, max_retries: int = 5) -> list[Character]:
    """All unital characters of ``spec``.

    For the structure family: Schur-triangularize ``L_a`` for a random ``a``,
    read character candidates off the diagonals of ``Q* L_{e_i} Q``,
    polish, verify and deduplicate.  The returned list is sorted by weights,
    so the set and its order do not depend on ``seed``.
    """
    key = ("chars", seed, max_retries)
    if key in spec._cache:
        return list(spec._cache[key])
    n = spec.dim
    if spec.family == FUNCTION:
        chars = [Character(row) for row in np.eye(n, dtype=complex)]
        spec._cache[key] = chars
        return list(chars)

    rng = np.random.default_rng(seed)
    basis_L = spec.left_matrices(np.eye(n, dtype=complex))
    for _attempt in range(max_retries + 1):
        a = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        La = spec.left_matrices(a)
        _, Q = scipy.linalg.schur(La, output="complex")
        diag = np.einsum("pk,ikj,jp->pi", Q.conj().T, basis_L, Q)  # diag[p, i]
        scale = max(1.0, float(np.abs(La).max()))
        expected = _count_clusters(np.linalg.eigvals(La), 1e-6 * scale)
        found = []
        for p in range(n):
            w = _polish(spec, diag[p].copy())
            if _verify_character(spec, w, CHARACTER_TOL):
                found.append(w)
        found = _dedupe(found, DEDUP_TOL)
        if found and len(found) == expected:
            chars = [Character(w) for w in sorted(found, key=_sort_key)]
            spec._cache[key] = chars
            return list(chars)
    raise CharacterComputationError(
        f"character verification failed after {max_retries} retries "
        "(tensor may be non-commutative or numerically degenerate)"
    )


def character_matrix(chars: Sequence[Character]) -> np.ndarray:
    return np.array([ch.weights for ch in chars], dtype=complex)


def gelfand(a: Element, chars: Sequence[Character]) -> np.ndarray:
    """Gelfand transform of ``a``: its values at the characters, in list order."""
    return character_matrix(chars) @ a.coeffs


def radical_and_semisimplicity(spec: AlgebraSpec, seed: int = 0) -> tuple[list[Element], bool]:
    W = character_matrix(characters(spec, seed=seed))
    _, s, vh = np.linalg.svd(W)
    rank = int(np.sum(s > RANK_RTOL * s[0])) if s.size else 0
    null = vh[rank:].conj()
    # unit vectors, phase fixed so the largest entry is positive real
    lead = null[np.arange(len(null)), np.argmax(np.abs(null), axis=1)] if len(null) else np.ones(0)
    null = null * (np.abs(lead) / lead)[:, None] + 0.0
    radical = [Element(spec, v) for v in null]
    return radical, len(radical) == 0


def is_zero_divisor(a: Element) -> bool:
    """True iff left multiplication by ``a`` is singular (the zero element included)."""
    if a.is_zero():
        return True
    s = np.linalg.svd(a.algebra.left_matrices(a.coeffs), compute_uv=False)
    return bool(s[-1] < RANK_RTOL * s[0])


@dataclass
class CStarReport:
    n_samples: int
    max_identity_residual: float
    max_conjugation_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_identity_residual <= self.tol and self.max_conjugation_residual <= self.tol

    def to_dict(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "max_identity_residual": self.max_identity_residual,
            "max_conjugation_residual": self.max_conjugation_residual,
            "tol": self.tol,
            "passed": self.passed,
        }


def cstar_check(spec: AlgebraSpec, n_samples: int = 100, seed: int = 0, tol: float = 1e-12) -> CStarReport:
    """Check ``||x x*|| = ||x||^2`` and ``gelfand(x*) = conj(gelfand(x))`` on samples."""
    if spec.family != FUNCTION:
        raise UnsupportedFamilyError("C*-check needs the function family (pointwise conjugation)")
    rng = np.random.default_rng(seed)
    chars = characters(spec)
    samples = [spec.one] + [spec.random_element(rng) for _ in range(n_samples - 1)]
    id_res = conj_res = 0.0
    for x in samples:
        nx = x.norm()
        id_res = max(id_res, abs((x * x.conj()).norm() - nx * nx) / max(1.0, nx * nx))
        conj_res = max(conj_res, float(np.abs(gelfand(x.conj(), chars) - np.conj(gelfand(x, chars))).max()))
    return CStarReport(len(samples), id_res, conj_res, tol)


# --------------------------------------------------------------------- JSON io


def complex_to_json(a) -> list:
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [complex_to_json(x) for x in a]


def complex_from_json(obj, field_name: str = "values", ndim: int | None = None) -> np.ndarray:
    """Decode a nested list of ``[re, im]`` pairs into a complex array.

    With ``ndim`` (the rank of the decoded array) bare reals are also
    accepted: an array of rank ``ndim`` is read as real, rank ``ndim + 1``
    with trailing length 2 as pairs.  Without it the trailing axis must be
    the pair axis.
    """
    try:
        arr = np.array(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputFormatError(f"ragged or non-numeric array ({exc})", field=field_name) from exc
    if ndim is not None and arr.ndim == ndim:
        return arr.astype(complex)
    if arr.ndim == 0 or arr.shape[-1] != 2 or (ndim is not None and arr.ndim != ndim + 1):
        raise InputFormatError(f"expected [re, im] pairs, got an array of shape {arr.shape}", field=field_name)
    return arr[..., 0] + 1j * arr[..., 1]


def algebra_from_json(obj) -> AlgebraSpec:
    if isinstance(obj, str):
        if obj in PRESETS:
            return PRESETS[obj]()
        raise InputFormatError(f"unknown algebra preset {obj!r}", field="algebra")
    if not isinstance(obj, dict) or "family" not in obj:
        raise InputFormatError("algebra spec must be an object with a 'family' key", field="family")
    if obj.get("preset") in PRESETS:
        return PRESETS[obj["preset"]]()
    fam = obj["family"]
    if fam == FUNCTION:
        if "points" not in obj:
            raise InputFormatError("function algebra needs 'points'", field="points")
        return function_algebra(obj["points"])
    if fam == STRUCTURE:
        for key in ("dim", "c", "unit"):
            if key not in obj:
                raise InputFormatError(f"structure algebra needs {key!r}", field=key)
        c = complex_from_json(obj["c"], "c", ndim=3)
        unit = complex_from_json(obj["unit"], "unit", ndim=1)
        n = int(obj["dim"])
        if c.shape != (n, n, n) or unit.shape != (n,):
            raise InputFormatError(f"shapes {c.shape}/{unit.shape} do not match dim {n}", field="c")
        return structure_algebra(c, unit)
    raise InputFormatError(f"unknown family {fam!r}", field="family")
