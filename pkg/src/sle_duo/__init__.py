"""Probabilities around a pair of SLE curves grown from one boundary point.

Library surface: special functions (`specfn`), kappa-derived constants and
kernels (`kernel`), quadrature probabilities (`probabilities`), elementary
special cases (`closedforms`), Monte Carlo (`simulator`), the strip current
profile (`qhall`), and the `sle-duo` CLI (`cli`).
"""

__version__ = "0.1.0"

from .closedforms import Kappa8Branch, KZeroTrace, exact_triple, exact_triple_kappa8, kzero_trace
from .errors import (
    DomainError,
    InternalError,
    NumericalError,
    SleDuoError,
    StatisticalQualityError,
    UsageError,
)
from .kernel import (
    CftParams,
    Kappa,
    constant_B,
    derive_params,
    kernel_Q,
    kernel_S,
    norm_constant,
)
from .probabilities import (
    FieldPoint,
    ProbabilityTriple,
    ode_residual,
    schramm_left,
    two_curve_left,
    two_curve_middle_direct,
    two_curve_triple,
)
from .qhall import CurrentProfile, Normalization, StripGeometry, current_profile, strip_coordinate
from .simulator import SimConfig, SimEstimate, assemble_triple, simulate_schramm, simulate_two_curve_left
from .specfn import HypParams, gamma, hyp2f1_nonpos, lgamma

__all__ = [
    "__version__",
    "CftParams",
    "CurrentProfile",
    "DomainError",
    "FieldPoint",
    "HypParams",
    "InternalError",
    "Kappa",
    "Kappa8Branch",
    "KZeroTrace",
    "Normalization",
    "NumericalError",
    "ProbabilityTriple",
    "SimConfig",
    "SimEstimate",
    "SleDuoError",
    "StatisticalQualityError",
    "StripGeometry",
    "UsageError",
    "assemble_triple",
    "constant_B",
    "current_profile",
    "derive_params",
    "exact_triple",
    "exact_triple_kappa8",
    "gamma",
    "hyp2f1_nonpos",
    "kernel_Q",
    "kernel_S",
    "kzero_trace",
    "lgamma",
    "norm_constant",
    "ode_residual",
    "schramm_left",
    "simulate_schramm",
    "simulate_two_curve_left",
    "strip_coordinate",
    "two_curve_left",
    "two_curve_middle_direct",
    "two_curve_triple",
]
