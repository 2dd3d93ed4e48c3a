"""Finite groups given by Cayley tables, and the kernels ``S(f, g) = F(f g^-1)``."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from . import algebra as alg
from .exceptions import DomainError, GroupAxiomError
from .kernel import DEFAULT_TOL, AlgebraKernel, GroundSet, ScalarKernel, max_defect

MAX_ORDER = 256


@dataclass(frozen=True)
class CayleyGroup:
    table: np.ndarray
    identity: int
    inverse: np.ndarray
    labels: tuple

    @property
    def order(self) -> int:
        return self.table.shape[0]


def validate_group(table, labels=None) -> CayleyGroup:
    """Check closure, associativity, identity and inverses by brute force."""
    t = np.asarray(table)
    if t.ndim != 2 or t.shape[0] != t.shape[1]:
        raise GroupAxiomError("closure", "table must be square")
    n = t.shape[0]
    if n == 0 or n > MAX_ORDER:
        raise GroupAxiomError("closure", f"order must be in 1..{MAX_ORDER}")
    if not np.issubdtype(t.dtype, np.integer):
        if not np.all(t == np.round(t)):
            raise GroupAxiomError("closure", "entries must be element indices")
        t = t.astype(int)
    if t.min() < 0 or t.max() >= n:
        raise GroupAxiomError("closure", "entry out of range")
    lhs = t[t, :]  # (a b) c  -> t[t[a,b], c]
    rhs = t[:, t]  # a (b c)  -> t[a, t[b,c]]
    if not np.array_equal(lhs, rhs):
        a, b, c = np.argwhere(lhs != rhs)[0]
        raise GroupAxiomError("associativity", f"({a}*{b})*{c} != {a}*({b}*{c})")
    ar = np.arange(n)
    ids = [e for e in range(n) if np.array_equal(t[e], ar) and np.array_equal(t[:, e], ar)]
    if not ids:
        raise GroupAxiomError("identity")
    e = ids[0]
    hits = t == e
    if not (np.all(hits.sum(axis=1) >= 1)):
        raise GroupAxiomError("inverses", f"element {int(np.argmin(hits.sum(axis=1)))} has no inverse")
    inv = np.argmax(hits, axis=1)
    if not np.all(t[inv, ar] == e):
        raise GroupAxiomError("inverses", "left and right inverses differ")
    labels = tuple(str(x) for x in labels) if labels is not None else tuple(str(i) for i in range(n))
    return CayleyGroup(t, e, inv, labels)


def cyclic_table(n: int) -> np.ndarray:
    a = np.arange(n)
    return (a[:, None] + a[None, :]) % n


def symmetric_table(k: int) -> tuple[np.ndarray, list[str]]:
    """Cayley table of S_k with ``(p*q)(i) = p(q(i))``; labels are one-line notation."""
    perms = list(permutations(range(k)))
    pos = {p: i for i, p in enumerate(perms)}
    n = len(perms)
    t = np.empty((n, n), dtype=int)
    for i, p in enumerate(perms):
        for j, q in enumerate(perms):
            t[i, j] = pos[tuple(p[q[x]] for x in range(k))]
    return t, ["".join(str(x) for x in p) for p in perms]


BUNDLED = {
    "Z6": lambda: (cyclic_table(6), [str(i) for i in range(6)]),
    "S3": lambda: symmetric_table(3),
}


def bundled_group(name: str) -> CayleyGroup:
    if name.startswith("Z") and name[1:].isdigit():
        n = int(name[1:])
        return validate_group(cyclic_table(n))
    if name not in BUNDLED:
        raise KeyError(f"unknown bundled group {name!r}")
    t, labels = BUNDLED[name]()
    return validate_group(t, labels)


@dataclass
class ExponentialityReport:
    exponential: bool
    max_exponential_defect: float
    worst_pair: tuple
    sincov: bool
    max_sincov_defect: float
    tol: float

    @property
    def biconditional_holds(self) -> bool:
        return self.exponential == self.sincov

    def to_dict(self) -> dict:
        return {
            "exponential": self.exponential,
            "max_exponential_defect": self.max_exponential_defect,
            "worst_pair": list(self.worst_pair),
            "sincov": self.sincov,
            "max_sincov_defect": self.max_sincov_defect,
            "biconditional_holds": self.biconditional_holds,
            "tol": self.tol,
        }


def from_group(cayley, fmap, algebra: alg.AlgebraSpec | None = None, tol: float = DEFAULT_TOL):
    """Kernel ``S(f, g) = F(f g^-1)`` and a report comparing exponentiality of ``F``
    (``F(f g) = F(f) F(g)``) with the Sincov property of ``S``.

    ``fmap`` is a vector of complex values, one per group element, or (with
    ``algebra``) an array of coefficient vectors / a list of Elements.
    """
    G = cayley if isinstance(cayley, CayleyGroup) else validate_group(cayley)
    n = G.order
    t = G.table
    if algebra is None and len(fmap) and isinstance(fmap[0], alg.Element):
        algebra = fmap[0].algebra
    if algebra is None:
        F = np.asarray(fmap, dtype=complex).reshape(-1)
        if F.shape[0] != n:
            raise DomainError(f"fmap has {F.shape[0]} values for a group of order {n}")
        S = ScalarKernel(GroundSet(G.labels), F[t[:, G.inverse]])
        exp_defect = np.abs(F[t] - F[:, None] * F[None, :])
    else:
        F = np.array([x.coeffs if isinstance(x, alg.Element) else x for x in fmap], dtype=complex)
        if F.shape != (n, algebra.dim):
            raise DomainError(f"fmap has shape {F.shape}, expected {(n, algebra.dim)}")
        S = AlgebraKernel(GroundSet(G.labels), algebra, F[t[:, G.inverse]])
        exp_defect = algebra.norms(F[t] - algebra.mul(F[:, None, :], F[None, :, :]))
    worst = np.unravel_index(int(np.argmax(exp_defect)), exp_defect.shape)
    rep = max_defect(S, tol)
    report = ExponentialityReport(
        exponential=bool(exp_defect[worst] <= tol),
        max_exponential_defect=float(exp_defect[worst]),
        worst_pair=(G.labels[worst[0]], G.labels[worst[1]]),
        sincov=rep.verdict == "sincov",
        max_sincov_defect=rep.max_defect,
        tol=tol,
    )
    return S, report
