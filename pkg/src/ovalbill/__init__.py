"""Billiards in n-symmetric ovals given by support functions."""

from .curvefile import load_curve, parse_curve
from .dynamics import (
    PhasePoint,
    QuotientPoint,
    billiard_inverse,
    billiard_step,
    dt_symmetric_fixed_point,
    iterate,
    jacobian_numeric,
    jacobian_sp,
    quotient_step,
    step_batch,
)
from .errors import *  # noqa: F403
from .geometry import (
    Oval,
    SupportFunction,
    critical_points,
    eval_support,
    perturb_bump,
    perturb_constant,
    validate,
)
from .hyperbolic import eigen_directions, find_crossings, grow_manifold, tangency_break
from .invariant import check_horizontal_invariance, constant_width_check, gutkin_alpha, gutkin_check, gutkin_oval
from .orbits import (
    classify,
    find_families,
    resonance_check,
    rotation_number_oracle,
    tau_zero_m,
    tau_zero_sin2,
    twist_coefficient,
    twist_report,
)

__version__ = "0.1.0"
