"""Closed-form Wigner functions of finite Hermite states, their nodal sets, and exact Laguerre certificates."""

from .laguerre import LaguerrePoly, ZeroList, divides, laguerre_coeffs, laguerre_eval_exact, laguerre_zeros, sturm_no_roots
from .phase_space import (
    EllipseSpec,
    HermiteState,
    PhasePoint,
    SymplecticMat2,
    is_centered_at_origin,
    rotate_coeffs,
    translate_state,
    williamson_factor,
)
from .nodal_inverse import (
    CircleInverseSolver,
    PatchWignerRegressor,
    admissible_radii,
    circle_residuals,
    fit_from_patch,
    inverse_from_circles,
    line_restriction,
    negative_region_radius,
    nodal_scan,
    parity_constraint,
    rank_lower_bound,
    sign_up_bound,
    symmetric_zero_probe,
)
from .certificates import Certificate, certify
from .wigner_engine import (
    cross_wigner_hermite,
    husimi_eval,
    polyanalytic_form,
    quadrature_oracle,
    wigner_eval,
)

__version__ = "0.1.0"

__all__ = [
    "LaguerrePoly",
    "ZeroList",
    "divides",
    "laguerre_coeffs",
    "laguerre_eval_exact",
    "laguerre_zeros",
    "sturm_no_roots",
    "EllipseSpec",
    "HermiteState",
    "PhasePoint",
    "SymplecticMat2",
    "is_centered_at_origin",
    "rotate_coeffs",
    "translate_state",
    "williamson_factor",
    "cross_wigner_hermite",
    "husimi_eval",
    "polyanalytic_form",
    "quadrature_oracle",
    "wigner_eval",
    "CircleInverseSolver",
    "PatchWignerRegressor",
    "admissible_radii",
    "circle_residuals",
    "fit_from_patch",
    "inverse_from_circles",
    "line_restriction",
    "negative_region_radius",
    "nodal_scan",
    "parity_constraint",
    "rank_lower_bound",
    "sign_up_bound",
    "symmetric_zero_probe",
    "Certificate",
    "certify",
]
