"""Analysis of multiplicative Sincov kernels and their delta-Sincov variants
over finite ground sets, with scalar or commutative-algebra values."""

from .algebra import (
    AlgebraSpec,
    Character,
    Element,
    characters,
    cstar_check,
    function_algebra,
    gelfand,
    is_zero_divisor,
    radical_and_semisimplicity,
    structure_algebra,
    triangular2,
)
from .groups import bundled_group, from_group, validate_group
from .gruss import BoundsBox, SampledFunction, gruss_check, integral_mean, richard_check
from .kernel import (
    AlgebraKernel,
    ControlKernel,
    DefectReport,
    GroundSet,
    ScalarKernel,
    build_algebra_kernel,
    build_from_phi,
    check_control,
    check_delta,
    defect,
    gamma,
    h_submultiplicativity,
    max_defect,
    recover_phi,
    sup_ratio,
)
from .stability import certified_defect_bound, decompose, per_character_check, sup_ratio_trend

__version__ = "0.1.0"

__all__ = [
    "AlgebraKernel",
    "AlgebraSpec",
    "BoundsBox",
    "Character",
    "ControlKernel",
    "DefectReport",
    "Element",
    "GroundSet",
    "SampledFunction",
    "ScalarKernel",
    "build_algebra_kernel",
    "build_from_phi",
    "bundled_group",
    "certified_defect_bound",
    "characters",
    "check_control",
    "check_delta",
    "cstar_check",
    "decompose",
    "defect",
    "from_group",
    "function_algebra",
    "gamma",
    "gelfand",
    "gruss_check",
    "h_submultiplicativity",
    "integral_mean",
    "is_zero_divisor",
    "max_defect",
    "per_character_check",
    "radical_and_semisimplicity",
    "recover_phi",
    "richard_check",
    "structure_algebra",
    "sup_ratio",
    "sup_ratio_trend",
    "triangular2",
    "validate_group",
]
