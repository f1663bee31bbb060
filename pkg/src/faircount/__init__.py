"""Exact and numerical invariants for counting nilpotent extensions by the
product of ramified primes: cocycle groups, logarithmic exponents, tuple
counts, and Euler-product leading constants."""

__version__ = "0.1.0"

from .errors import (
    CapExceededError,
    EvenOrderError,
    FaircountError,
    InconsistentDatumError,
    PoleError,
    ShapeError,
    SieveLimitError,
)
from .group_core import (
    AbelianSpec,
    CocycleGroup,
    CocyclePairing,
    CocycleSummand,
    GroupElement,
    abelian_as_cocycle_group,
    build_gn,
    build_mixed_example,
)
from .malle_exponents import (
    ExponentReport,
    FiberedDatum,
    alpha_gn,
    closed_form_b_gn,
    counterexample_report,
    fibered_b_burnside,
    fibered_b_orbit,
    gn_datum,
    mixed_datum,
    mixed_family_probe,
    naive_b_formula,
    naive_b_orbit,
    s_set_size,
    s_set_sizes_all,
    trivial_datum,
)

__all__ = [
    "AbelianSpec",
    "CocycleGroup",
    "CocyclePairing",
    "CocycleSummand",
    "GroupElement",
    "ExponentReport",
    "FiberedDatum",
    "abelian_as_cocycle_group",
    "alpha_gn",
    "build_gn",
    "build_mixed_example",
    "closed_form_b_gn",
    "counterexample_report",
    "fibered_b_burnside",
    "fibered_b_orbit",
    "gn_datum",
    "mixed_datum",
    "mixed_family_probe",
    "naive_b_formula",
    "naive_b_orbit",
    "s_set_size",
    "s_set_sizes_all",
    "trivial_datum",
    "CapExceededError",
    "EvenOrderError",
    "FaircountError",
    "InconsistentDatumError",
    "PoleError",
    "ShapeError",
    "SieveLimitError",
]
