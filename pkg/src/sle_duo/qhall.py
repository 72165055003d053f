"""Strip geometry: mean extra current-density profile across a sample of width L.

The half-plane result transfers to an infinite strip through the log map;
lines of constant angle become lines of constant height y, and the profile is
the kernel evaluated at t = cot(pi y / L) from both sides. Only the shape is
physical, so three normalizations are offered.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import kernel
from .errors import UsageError
from .kernel import as_kappa


@dataclass(frozen=True)
class StripGeometry:
    width_L: float

    def __post_init__(self) -> None:
        if not self.width_L > 0.0:
            raise UsageError("strip width must be positive")


class Normalization(Enum):
    RAW = "raw"
    UNIT_PEAK = "unit_peak"
    UNIT_INTEGRAL = "unit_integral"


@dataclass(frozen=True)
class CurrentProfile:
    y: np.ndarray
    i: np.ndarray
    normalization: Normalization


def strip_coordinate(g: StripGeometry, t: float) -> float:
    """Height in (0, L) of the constant-angle line with projective coordinate t.

    atan2 picks the branch that runs continuously from y -> 0 (t -> +inf)
    to y -> L (t -> -inf); t = 0 maps to mid-strip.
    """
    return g.width_L / math.pi * math.atan2(1.0, float(t))


def current_profile(
    g: StripGeometry, k, grid: int, normalization: Normalization = Normalization.UNIT_PEAK
) -> CurrentProfile:
    """Mean extra current density on the interior grid y = j*L/grid, 0 < j < grid."""
    kappa = as_kappa(k).require_generic("current_profile")
    if grid < 16:
        raise UsageError("grid must be at least 16")
    L = g.width_L
    y = np.arange(1, grid) * (L / grid)
    x = math.pi * y / L
    t = np.cos(x) / np.sin(x)
    B = kernel.constant_B(kappa)
    both = kernel.kernel_Q(kappa, t, 1.0, B) + kernel.kernel_Q(kappa, -t, 1.0, B)
    raw = (math.pi / (L * kernel.norm_constant(kappa))) * (1.0 + t * t) * both
    if normalization is Normalization.RAW:
        vals = raw
    elif normalization is Normalization.UNIT_PEAK:
        vals = raw / np.max(raw)
    elif normalization is Normalization.UNIT_INTEGRAL:
        vals = raw / np.trapezoid(raw, y)
    else:
        raise UsageError(f"unknown normalization {normalization!r}")
    return CurrentProfile(y=y, i=vals, normalization=normalization)
