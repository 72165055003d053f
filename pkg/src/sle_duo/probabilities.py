"""Boundary-visit probabilities for one curve and for the two-curve pair.

The two-curve probabilities are tail integrals of ``kernel_S``. The integral
is split at |t| = TAIL_SPLIT: the compact core is integrated in the
compactified variable theta = arctan(t) on a fixed Gauss-Kronrod panel grid
(bisected adaptively only if the embedded error estimate demands it), and the
far tails are summed termwise from the kernel's power-ladder expansion. The
fixed panel layout makes P(t) smooth to machine precision in t, which the
finite-difference ODE residual check relies on.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from . import kernel, quadrature
from .errors import DomainError, NumericalError, UsageError
from .kernel import TAIL_SPLIT, Kappa, as_kappa
from .specfn import gamma, lgamma, rgamma, hyp2f1_nonpos, HypParams

# Quadrature tolerances for the compact core (design defaults).
ABS_TOL = 1e-10
REL_TOL = 1e-10
MAX_LEVELS = 15
# |t| beyond which two_curve_left returns the asymptotic 0/1 directly.
CLAMP_T = 1e6

_THETA0 = math.atan(TAIL_SPLIT)
_N_PANELS = 64
_EDGES = np.linspace(-_THETA0, _THETA0, _N_PANELS + 1)
_ZERO_EDGE = _N_PANELS // 2  # edges[was] == 0.0 by symmetry of linspace


@dataclass(frozen=True)
class FieldPoint:
    """Location of the observation point: projective coordinate and angle."""

    t: float
    phi: float

    def __post_init__(self) -> None:
        if not abs(self.phi) < math.pi / 2:
            raise DomainError(f"phi must lie in (-pi/2, pi/2), got {self.phi}")

    @classmethod
    def from_t(cls, t: float) -> "FieldPoint":
        return cls(float(t), math.atan(t))

    @classmethod
    def from_phi(cls, phi: float) -> "FieldPoint":
        return cls(math.tan(phi), float(phi))


@dataclass(frozen=True)
class ProbabilityTriple:
    p_left: float
    p_middle: float
    p_right: float
    abs_err: float


def _as_point(pt) -> FieldPoint:
    if isinstance(pt, FieldPoint):
        return pt
    return FieldPoint.from_t(float(pt))


class _Evaluator:
    """Per-kappa tables: panel integrals of the kernels plus exact tail masses."""

    def __init__(self, kappa: float):
        self.kappa = kappa
        if kappa <= 0.5:
            warnings.warn(
                f"kappa = {kappa:g} is in the slow-convergence band (0, 0.5]",
                RuntimeWarning,
                stacklevel=3,
            )
        self.B = kernel.constant_B(kappa)
        self.norm = kernel.norm_constant(kappa)

        nodes = quadrature.panel_nodes(_EDGES[:-1], _EDGES[1:])
        tvals = np.tan(nodes.ravel())
        jac = 1.0 + tvals * tvals
        s_vals = kernel.kernel_Q(kappa, tvals, 1.0, self.B) * jac
        odd_vals = kernel.kernel_Q(kappa, tvals, 0.0, 1.0) * jac
        shape = nodes.shape
        self.s_panels, self.s_errs = quadrature.panel_estimates(
            s_vals.reshape(shape), _EDGES[:-1], _EDGES[1:]
        )
        self.odd_panels, self.odd_errs = quadrature.panel_estimates(
            odd_vals.reshape(shape), _EDGES[:-1], _EDGES[1:]
        )
        # suffix sums: integral from edge j to the split
        self.s_suffix = np.concatenate([np.cumsum(self.s_panels[::-1])[::-1], [0.0]])
        self.s_err_suffix = np.concatenate([np.cumsum(self.s_errs[::-1])[::-1], [0.0]])
        self.odd_prefix = np.concatenate([[0.0], np.cumsum(self.odd_panels)])
        self.odd_err_prefix = np.concatenate([[0.0], np.cumsum(self.odd_errs)])

        self.mass_plus = kernel.tail_mass(kappa, TAIL_SPLIT, +1.0, 1.0, self.B)
        self.mass_minus = kernel.tail_mass(kappa, TAIL_SPLIT, -1.0, 1.0, self.B)
        self.odd_mass_plus = kernel.tail_mass(kappa, TAIL_SPLIT, +1.0, 0.0, 1.0)

    def _s_theta(self, thetas: np.ndarray) -> np.ndarray:
        t = np.tan(thetas)
        return kernel.kernel_Q(self.kappa, t, 1.0, self.B) * (1.0 + t * t)

    def _odd_theta(self, thetas: np.ndarray) -> np.ndarray:
        t = np.tan(thetas)
        return kernel.kernel_Q(self.kappa, t, 0.0, 1.0) * (1.0 + t * t)

    def _partial(
        self, f: Callable[[np.ndarray], np.ndarray], lo: np.ndarray, hi: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        """Batched single-panel integrals of f over [lo_i, hi_i]."""
        nodes = quadrature.panel_nodes(lo, hi)
        fv = f(nodes.ravel()).reshape(nodes.shape)
        return quadrature.panel_estimates(fv, lo, hi)

    def p_left_many(self, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        ts = np.asarray(ts, dtype=float)
        p = np.empty_like(ts)
        err = np.empty_like(ts)

        clamp_hi = ts > CLAMP_T
        clamp_lo = ts < -CLAMP_T
        far_hi = (ts > TAIL_SPLIT) & ~clamp_hi
        far_lo = (ts < -TAIL_SPLIT) & ~clamp_lo
        core = np.abs(ts) <= TAIL_SPLIT

        if clamp_hi.any():
            bound = kernel.tail_mass(self.kappa, CLAMP_T, +1.0, 1.0, self.B) / self.norm
            p[clamp_hi] = 0.0
            err[clamp_hi] = bound
        if clamp_lo.any():
            bound = kernel.tail_mass(self.kappa, CLAMP_T, -1.0, 1.0, self.B) / self.norm
            p[clamp_lo] = 1.0
            err[clamp_lo] = bound
        for idx in np.flatnonzero(far_hi):
            p[idx] = kernel.tail_mass(self.kappa, ts[idx], +1.0, 1.0, self.B) / self.norm
            err[idx] = 1e-14 * abs(p[idx]) + 1e-16
        for idx in np.flatnonzero(far_lo):
            mass = kernel.tail_mass(self.kappa, -ts[idx], -1.0, 1.0, self.B) / self.norm
            p[idx] = 1.0 - mass
            err[idx] = 1e-14 * abs(mass) + 1e-16
        if core.any():
            thetas = np.arctan(ts[core])
            j = np.searchsorted(_EDGES, thetas, side="left")
            j = np.clip(j, 0, _N_PANELS)
            pv, pe = self._partial(self._s_theta, thetas, _EDGES[j])
            total = pv + self.s_suffix[j] + self.mass_plus
            toterr = pe + self.s_err_suffix[j] + 1e-15 * abs(self.mass_plus)
            p[core] = total / self.norm
            err[core] = toterr / self.norm
        # the clamped entries legitimately carry the (larger) asymptotic bound
        checked = ~clamp_hi & ~clamp_lo
        if np.any(err[checked] > 1e-9):
            worst = float(err[checked].max())
            raise NumericalError(f"two-curve quadrature error {worst:.3e} exceeds 1e-9")
        return p, err

    def middle_direct_many(self, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        odd_total = self.odd_prefix[_N_PANELS] - self.odd_prefix[_ZERO_EDGE] + self.odd_mass_plus
        half_mass = self.s_suffix[_ZERO_EDGE] + self.mass_plus
        d_const = 1.0 - 2.0 * half_mass / self.norm

        ts = np.abs(np.asarray(ts, dtype=float))
        ratio = np.empty_like(ts)
        rerr = np.empty_like(ts)
        far = ts > TAIL_SPLIT
        for idx in np.flatnonzero(far):
            if ts[idx] > CLAMP_T:
                ratio[idx], rerr[idx] = 1.0, 1e-15
                continue
            tail = kernel.tail_mass(self.kappa, ts[idx], +1.0, 0.0, 1.0)
            ratio[idx] = (odd_total - tail) / odd_total
            rerr[idx] = 1e-14
        core = ~far
        if core.any():
            thetas = np.arctan(ts[core])
            j = np.searchsorted(_EDGES, thetas, side="right") - 1
            j = np.clip(j, _ZERO_EDGE, _N_PANELS - 1)
            pv, pe = self._partial(self._odd_theta, _EDGES[j], thetas)
            upto = self.odd_prefix[j] - self.odd_prefix[_ZERO_EDGE] + pv
            ratio[core] = upto / odd_total
            rerr[core] = (pe + self.odd_err_prefix[j]) / odd_total
        p = d_const * (1.0 - ratio)
        return p, np.abs(d_const) * rerr + 1e-15


@lru_cache(maxsize=128)
def _evaluator(kappa: float) -> _Evaluator:
    return _Evaluator(kappa)


def _generic_kappa(k, op: str) -> float:
    return as_kappa(k).require_generic(op)


def schramm_left(k, pt) -> float:
    """One-curve passage probability at the given field point."""
    kappa = _generic_kappa(k, "schramm_left")
    t = _as_point(pt).t
    b = 4.0 / kappa
    coef = math.exp(lgamma(b) - lgamma(b - 0.5)) / math.sqrt(math.pi)
    if abs(b - 1.5) < 1e-9:
        # parameter coincidence: the hypergeometric factor collapses to a binomial
        return 0.5 - coef * t / math.sqrt(1.0 + t * t)
    if abs(t) <= TAIL_SPLIT:
        f = hyp2f1_nonpos(HypParams(0.5, b, 1.5), -t * t)
        return 0.5 - coef * t * f
    # tail branch: the constant part of t*F cancels the 1/2 exactly
    d = b - 0.5
    if abs(d - round(d)) < 1e-5:
        raise NumericalError(
            f"schramm tail expansion degenerates at kappa = {kappa:g}; "
            "perturb kappa slightly"
        )
    u = abs(t)
    c2 = gamma(1.5) * gamma(0.5 - b) * rgamma(0.5) * rgamma(1.5 - b)
    series = hyp2f1_nonpos(HypParams(b, b - 0.5, b + 0.5), -1.0 / (u * u))
    tail = -coef * c2 * u ** (1.0 - 2.0 * b) * series
    return tail if t > 0 else 1.0 - tail


def two_curve_left(k, pt) -> float:
    """Probability that the point lies to the left of both curves."""
    kappa = _generic_kappa(k, "two_curve_left")
    p, _ = _evaluator(kappa).p_left_many(np.array([_as_point(pt).t]))
    return float(p[0])


def two_curve_triple(k, pt) -> ProbabilityTriple:
    """(left, middle, right) probabilities; right is the exact mirror of left."""
    kappa = _generic_kappa(k, "two_curve_triple")
    t = _as_point(pt).t
    p, err = _evaluator(kappa).p_left_many(np.array([t, -t]))
    p_left, p_right = float(p[0]), float(p[1])
    abs_err = float(err[0] + err[1])
    return ProbabilityTriple(p_left, 1.0 - p_left - p_right, p_right, abs_err)


def two_curve_middle_direct(k, pt) -> float:
    """Middle probability from the odd-kernel route (independent of the triple)."""
    kappa = _generic_kappa(k, "two_curve_middle_direct")
    p, _ = _evaluator(kappa).middle_direct_many(np.array([_as_point(pt).t]))
    return float(p[0])


def _triple_many(k, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized triples for grids (CLI and test helper)."""
    kappa = _generic_kappa(k, "two_curve_triple")
    ev = _evaluator(kappa)
    ts = np.asarray(ts, dtype=float)
    pl, el = ev.p_left_many(ts)
    pr, er = ev.p_left_many(-ts)
    return pl, 1.0 - pl - pr, pr, el + er


def ode_residual(k, t_grid: Sequence[float], p: Callable, h: float = 2e-3) -> float:
    """Max residual of the third-order ODE for P over the given stencil centers.

    ``p`` is evaluated at each center plus offsets j*h, |j| <= 3; 7-point
    central differences (differenced against the center value, so constants
    drop out exactly) produce P', P'' and P'''. The default step balances the
    O(h^4) truncation against the eps/h^3 roundoff amplification of the third
    derivative for probability-scale inputs.
    """
    params = kernel.derive_params(k)
    if params.degenerate:
        raise UsageError("ode_residual requires 0 < kappa < 8")
    centers = np.asarray(t_grid, dtype=float)
    if centers.size < 7:
        raise UsageError("ode_residual needs at least 7 grid points")
    offsets = np.arange(-3.0, 4.0) * h
    pts = centers[:, None] + offsets[None, :]
    try:
        vals = np.asarray(p(pts.ravel()), dtype=float)
        if vals.shape != pts.ravel().shape:
            raise TypeError
    except (TypeError, ValueError):
        vals = np.array([float(p(float(x))) for x in pts.ravel()])
    vals = vals.reshape(pts.shape)
    g = vals - vals[:, 3:4]
    g_m3, g_m2, g_m1, _, g_p1, g_p2, g_p3 = g.T

    d1 = (-g_m3 + 9.0 * g_m2 - 45.0 * g_m1 + 45.0 * g_p1 - 9.0 * g_p2 + g_p3) / (60.0 * h)
    d2 = (
        2.0 * g_m3 - 27.0 * g_m2 + 270.0 * g_m1 + 270.0 * g_p1 - 27.0 * g_p2 + 2.0 * g_p3
    ) / (180.0 * h * h)
    d3 = (g_m3 - 8.0 * g_m2 + 13.0 * g_m1 - 13.0 * g_p1 + 8.0 * g_p2 - g_p3) / (8.0 * h ** 3)

    t = centers
    mu, lam = params.mu, params.lam
    resid = (
        lam * d3
        - (2.0 * mu * t / (t * t + 1.0)) * d2
        + ((3.0 - mu) * t * t - (1.0 + mu)) / (t * t + 1.0) ** 2 * d1
    )
    return float(np.max(np.abs(resid)))
