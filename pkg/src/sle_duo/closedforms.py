"""Exact elementary solutions: the oracle layer.

Covers the three kappa values whose two-curve probabilities reduce to
arctan/pi polynomials, the two inequivalent kappa = 8 limits, and the exact
deterministic kappa = 0 trace geometry (tips on a fixed hyperbola).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, InternalError, UsageError
from .probabilities import FieldPoint, ProbabilityTriple, _as_point

_SUPPORTED = (2.0, 8.0 / 3.0, 4.0)


class Kappa8Branch(Enum):
    """The two non-commuting kappa = 8 answers."""

    LIMIT_FROM_BELOW = "limit_from_below"
    DIRECT_AT_EIGHT = "direct_at_eight"


@dataclass(frozen=True)
class KZeroTrace:
    """Deterministic trace tips for the kappa = 0 pair at separation delta."""

    delta: float
    samples: list[tuple[float, complex]]

    def hyperbola_residuals(self) -> np.ndarray:
        """Relative residual of 4a^2 - (4/3)b^2 = delta^2 per sample."""
        d2 = self.delta * self.delta
        out = np.empty(len(self.samples))
        for i, (_, tip) in enumerate(self.samples):
            a, b = tip.real, tip.imag
            out[i] = abs(4.0 * a * a - (4.0 / 3.0) * b * b - d2) / d2
        return out


def _kappa_value(k) -> float:
    from .kernel import as_kappa

    return as_kappa(k).value


def exact_triple(k, pt) -> ProbabilityTriple:
    """Elementary two-curve triple for kappa in {2, 8/3, 4}."""
    kappa = _kappa_value(k)
    t = _as_point(pt).t
    at = math.atan(t)
    if abs(kappa - 2.0) < 1e-9:
        s = 1.0 + t * t
        den = 9.0 * math.pi ** 2 * s ** 3
        a_poly = -16.0 - 9.0 * t * t + 9.0 * t ** 4
        odd = 9.0 * math.pi * (t ** 3 + t ** 5)
        p_left = 0.25 + (
            a_poly - odd + 9.0 * s * at * (2.0 * t ** 3 - math.pi * s * s + s * s * at)
        ) / den
        p_right = 0.25 + (
            a_poly + odd + 9.0 * s * at * (2.0 * t ** 3 + math.pi * s * s + s * s * at)
        ) / den
        p_middle = 0.5 - 2.0 * (a_poly + 9.0 * s * at * (2.0 * t ** 3 + s * s * at)) / den
        return ProbabilityTriple(p_left, p_middle, p_right, 0.0)
    if abs(kappa - 8.0 / 3.0) < 1e-9:
        poly = 1.0 + 6.0 * t * t + 5.0 * t ** 4
        lin = 2.0 * t * (13.0 + 15.0 * t * t)
        den = 30.0 * math.pi * (1.0 + t * t) ** 2
        p_left = (-lin + 3.0 * math.pi * poly - 6.0 * poly * at) / den
        p_right = (lin + 3.0 * math.pi * poly + 6.0 * poly * at) / den
        return ProbabilityTriple(p_left, 0.8 / (1.0 + t * t), p_right, 0.0)
    if abs(kappa - 4.0) < 1e-9:
        pi2 = math.pi ** 2
        s = 1.0 + t * t
        p_left = 0.25 - 1.0 / (pi2 * s) - at / math.pi + at * at / pi2
        p_right = 0.25 - 1.0 / (pi2 * s) + at / math.pi + at * at / pi2
        p_middle = 0.5 + 2.0 / (pi2 * s) - 2.0 * at * at / pi2
        return ProbabilityTriple(p_left, p_middle, p_right, 0.0)
    raise UsageError(
        f"exact_triple supports kappa in {{2, 8/3, 4}}, got {kappa:g}"
    )


def exact_triple_kappa8(branch: Kappa8Branch, phi: float) -> ProbabilityTriple:
    """Both kappa = 8 solution sets; valid only away from phi = +-pi/2."""
    phi = float(phi)
    if not abs(phi) < math.pi / 2:
        raise DomainError(
            "kappa = 8 probabilities are undefined at phi = +-pi/2 "
            "(the kappa->8 and |t|->inf limits do not commute)"
        )
    if branch is Kappa8Branch.LIMIT_FROM_BELOW:
        return ProbabilityTriple(
            0.25 - phi / (2.0 * math.pi), 0.5, 0.25 + phi / (2.0 * math.pi), 0.0
        )
    if branch is Kappa8Branch.DIRECT_AT_EIGHT:
        return ProbabilityTriple(0.5 - phi / math.pi, 0.0, 0.5 + phi / math.pi, 0.0)
    raise UsageError(f"unknown branch {branch!r}")


def kzero_trace(delta: float, t_max: float, n: int) -> KZeroTrace:
    """Tips of the deterministic kappa = 0 curve, sampled at n times in [0, t_max].

    The tip at time tau solves the depressed cubic
    4 zeta^3 - 3 zeta + f = 0, zeta = z/delta, f = 2(1 + 8 tau/delta^2)^{3/2} - 1,
    taken on the root branch continuously connected to zeta(0) = 1/2 with
    Im >= 0. Closed hyperbolic root formulas keep the branch exact.
    """
    delta = float(delta)
    if delta <= 0.0:
        raise UsageError("delta must be positive")
    if n < 2:
        raise UsageError("n must be at least 2")
    if t_max < 0.0:
        raise UsageError("t_max must be non-negative")
    times = np.unique(np.linspace(0.0, t_max, n))
    samples: list[tuple[float, complex]] = []
    for tau in times:
        f = 2.0 * (1.0 + 8.0 * tau / (delta * delta)) ** 1.5 - 1.0
        theta = math.acosh(f) / 3.0 if f >= 1.0 else 0.0
        # real root r = -cosh(theta) <= -1; the conjugate pair supplies the tip
        r = -math.cosh(theta)
        re = -r / 2.0
        im = 0.5 * math.sqrt(max(3.0 * (r * r - 1.0), 0.0))
        zeta = complex(re, im)
        if tau > 0.0 and im <= 0.0:
            raise InternalError("cubic root selection lost the upper-half-plane branch")
        resid = abs(4.0 * zeta ** 3 - 3.0 * zeta + f)
        if resid > 1e-8 * max(1.0, abs(f)):
            raise InternalError(f"cubic residual {resid:g} at tau = {tau:g}")
        samples.append((float(tau), delta * zeta))
    return KZeroTrace(delta, samples)
