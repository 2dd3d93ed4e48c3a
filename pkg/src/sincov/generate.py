"""Seeded synthetic instances and the two worked-example fixtures."""

from __future__ import annotations

import numpy as np

from . import algebra as alg
from ._validation import as_rng
from .exceptions import SincovError
from .kernel import (
    GOLDEN,
    AlgebraKernel,
    ControlKernel,
    GroundSet,
    ScalarKernel,
    build_from_phi,
    check_delta,
    constant_control_for,
    defect_cube,
)


def random_phi(n: int, seed=0, complex_phases: bool = False) -> np.ndarray:
    """Moduli log-uniform in ``[0.1, 10]``; phases uniform when requested."""
    rng = as_rng(seed)
    phi = 10.0 ** rng.uniform(-1.0, 1.0, size=n)
    if complex_phases:
        phi = phi * np.exp(1j * rng.uniform(-np.pi, np.pi, size=n))
    return phi.astype(complex)


def sincov_instance(n: int, seed=0, complex_phases: bool = False) -> ScalarKernel:
    return build_from_phi(GroundSet.range(n), random_phi(n, seed, complex_phases))


def delta_instance(
    n: int,
    seed=0,
    budget: float = 0.1,
    control: str = "constant",
    nonnegative: bool = True,
    tol: float = 1e-9,
) -> tuple[ScalarKernel, ControlKernel]:
    """A perturbed Sincov kernel with a control that certifies it.

    Entries of an exact kernel are scaled by ``1 + budget * U(-1, 1)`` (or,
    with ``nonnegative=False``, complex phases are also drawn).  The control
    is fitted to the measured defects: for ``constant``, ``F = c`` solves
    ``F*F - F = max defect``; for ``ratio``, ``F(f,g) = F0 psi(f)/psi(g)``
    with ``F0*F0 - F0 >= defect(f,g,h) psi(h)/psi(f)``.
    """
    rng = as_rng(seed)
    ground = GroundSet.range(n)
    phi = random_phi(n, rng, complex_phases=not nonnegative)
    S0 = phi[:, None] / phi[None, :]
    S = ScalarKernel(ground, S0 * (1.0 + budget * rng.uniform(-1.0, 1.0, size=(n, n))))
    D = defect_cube(S)
    if control == "constant":
        c = float(D.max())
        F = ControlKernel.constant(ground, constant_control_for(c * (1 + 1e-12)))
    elif control == "ratio":
        psi = 10.0 ** rng.uniform(-0.3, 0.3, size=n)
        c = float((D * psi[None, None, :] / psi[:, None, None]).max())
        F0 = constant_control_for(c * (1 + 1e-12))
        F = ControlKernel(ground, F0 * psi[:, None] / psi[None, :])
    else:
        raise ValueError(f"unknown control {control!r}")
    if not check_delta(S, F, tol).certified:
        raise SincovError("generated instance failed re-verification")
    return S, F


def triangular2_kernel(labels=(0.5, 1.0, 2.0)) -> AlgebraKernel:
    """``T(f, g) = U + f N`` on numeric labels over the triangular2 preset."""
    spec = alg.triangular2()
    ground = GroundSet(tuple(labels))
    f = ground.numeric()
    n = len(ground)
    vals = np.zeros((n, n, 3), dtype=complex)
    vals[:, :, 0] = 1.0
    vals[:, :, 1] = f[:, None]
    return AlgebraKernel(ground, spec, vals)


def c01_member(t: float, x: np.ndarray) -> np.ndarray:
    """``f_t(x) = x + t (x^2 + 1 - x)``; lies in ``x < f <= x^2 + 1`` for ``t in (0, 1]``."""
    return x + t * (x * x + 1.0 - x)


def c01_example(grid: int = 11, params: int = 10) -> tuple[AlgebraKernel, ControlKernel]:
    """``T(f, g) = (f - 1) / g`` over functions on a uniform grid of ``[0, 1]``.

    The ground set is ``f_t`` for ``t = 1/params, ..., 1``; the control is the
    golden-ratio constant.
    """
    x = np.linspace(0.0, 1.0, grid)
    ts = np.arange(1, params + 1) / params
    spec = alg.function_algebra([repr(float(v)) for v in x])
    fx = np.array([c01_member(t, x) for t in ts])  # (params, grid)
    vals = (fx[:, None, :] - 1.0) / fx[None, :, :]
    ground = GroundSet(tuple(ts))
    return AlgebraKernel(ground, spec, vals.astype(complex)), ControlKernel.constant(ground, GOLDEN)


def function_kernel(spec: alg.AlgebraSpec, scalar_kernels) -> AlgebraKernel:
    """Stack one scalar kernel per point into a function-algebra kernel."""
    ks = list(scalar_kernels)
    vals = np.stack([k.values for k in ks], axis=-1)
    return AlgebraKernel(ks[0].ground, spec, vals)
