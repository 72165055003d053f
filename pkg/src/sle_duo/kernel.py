"""Parameter derivations and the two scalar kernels of the theory.

``kernel_Q`` is the general two-parameter solution of the third-order ODE's
first-derivative reduction; ``kernel_S`` fixes the odd coefficient so that the
slowly-decaying tails cancel as t -> +inf, which is what makes its tail
integrals probabilities. Far-tail values and tail integrals are produced by
termwise power-ladder expansions (exact to machine precision) rather than
quadrature, since for kappa > 4 the arctan-compactified integrand is unbounded
at the far end.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InternalError, NumericalError, UsageError
from .specfn import (
    DEGENERACY_TOL,
    HypParams,
    gamma,
    hyp2f1_nonpos,
    lgamma,
    rgamma,
)

# |t| beyond which kernels and integrals switch to the tail ladders. Kept
# small because the direct formula cancels catastrophically once the kernel is
# orders of magnitude below its hypergeometric pieces (severe for kappa < 2).
TAIL_SPLIT = 3.0

_SPECIAL_POINTS = (0.0, 2.0, 8.0 / 3.0, 4.0, 6.0, 8.0)


@dataclass(frozen=True)
class Kappa:
    """Validated SLE parameter in [0, 8]."""

    value: float

    def __post_init__(self) -> None:
        v = float(self.value)
        if not (0.0 <= v <= 8.0) or math.isnan(v):
            raise DomainError(f"kappa must lie in [0, 8], got {self.value}")
        object.__setattr__(self, "value", v)

    @property
    def classification(self) -> str:
        for s in _SPECIAL_POINTS:
            if abs(self.value - s) < 1e-12:
                return f"special point kappa = {s:g}"
        return "generic"

    def require_generic(self, operation: str) -> float:
        if not (0.0 < self.value < 8.0):
            raise UsageError(
                f"{operation} requires 0 < kappa < 8 (kappa = {self.value:g} is a "
                "degenerate limit; see the closed-form module)"
            )
        return self.value


def as_kappa(k) -> Kappa:
    return k if isinstance(k, Kappa) else Kappa(float(k))


@dataclass(frozen=True)
class CftParams:
    """Constants derived from kappa.

    ``lam`` is the level-3 coefficient usually written lambda (reserved word).
    ``degenerate`` marks the kappa = 0 and kappa = 8 endpoints where mu/lam
    and the generic kernels stop making sense.
    """

    h2: float
    h3: float
    mu: float
    lam: float
    c: float
    x2leg: float
    x4leg: float
    alpha1: float
    alpha3: float
    degenerate: bool


def derive_params(k) -> CftParams:
    """All kappa-derived constants, self-checked against the level-3 quadratic."""
    kappa = as_kappa(k).value
    if kappa == 0.0:
        return CftParams(
            h2=math.inf,
            h3=math.inf,
            mu=-0.0,
            lam=0.0,
            c=-math.inf,
            x2leg=math.inf,
            x4leg=math.inf,
            alpha1=-math.inf,
            alpha3=math.inf,
            degenerate=True,
        )
    h2 = (6.0 - kappa) / (2.0 * kappa)
    h3 = (8.0 - kappa) / kappa
    c = (3.0 * kappa - 8.0) * (6.0 - kappa) / (2.0 * kappa)
    degenerate = kappa == 8.0
    mu = -2.0 / h3 if h3 != 0.0 else -math.inf
    lam = 1.0 / (h3 * (1.0 + h3)) if h3 != 0.0 else math.inf
    # h3 must be a root of 3*h3^2 + h3*(c - 7) + c + 2 = 0
    if h3 != math.inf:
        resid = 3.0 * h3 * h3 + h3 * (c - 7.0) + c + 2.0
        scale = max(1.0, 3.0 * h3 * h3, abs(h3 * (c - 7.0)), abs(c + 2.0))
        if abs(resid) > 1e-10 * scale:
            raise InternalError(f"central-charge consistency check failed: residual {resid:g}")
    return CftParams(
        h2=h2,
        h3=h3,
        mu=mu,
        lam=lam,
        c=c,
        x2leg=h3,
        x4leg=24.0 / kappa - 2.0,
        alpha1=-(6.0 - kappa) / kappa,
        alpha3=2.0 / kappa,
        degenerate=degenerate,
    )


def constant_B(k) -> float:
    """Odd-part coefficient that cancels the slow t -> +inf tail."""
    kappa = as_kappa(k).value
    if not (0.0 < kappa <= 8.0):
        raise UsageError(f"constant_B requires 0 < kappa <= 8, got {kappa:g}")
    if kappa == 8.0:
        warnings.warn("constant_B degenerates to 0 at kappa = 8", RuntimeWarning, stacklevel=2)
        return 0.0
    q = 4.0 / kappa
    return -2.0 * math.exp(lgamma(1.0 + q) + lgamma(q) - lgamma(0.5 + q) - lgamma(q - 0.5))


def norm_constant(k) -> float:
    """Closed form of the full-line integral of kernel_S."""
    kappa = as_kappa(k).require_generic("norm_constant")
    q = 4.0 / kappa
    return (
        2.0 ** (2.0 - 2.0 * q)
        * math.pi
        * math.exp(lgamma(3.0 * q - 1.0) - lgamma(q) - lgamma(2.0 * q))
    )


def _families(kappa: float) -> tuple[HypParams, HypParams]:
    q = 4.0 / kappa
    return (
        HypParams(0.5 + q, 1.0 - q, 0.5),
        HypParams(1.0 + q, 1.5 - q, 1.5),
    )


def _check_tail_degeneracy(kappa: float) -> None:
    d = 0.5 - 8.0 / kappa
    if abs(d - round(d)) < DEGENERACY_TOL:
        raise NumericalError(
            f"tail expansion degenerates at kappa = {kappa:g} (8/kappa - 1/2 is an "
            "integer); perturb kappa by more than 1e-5 relative"
        )


def _gauss_coeffs(a: float, b: float, c: float, n: int) -> np.ndarray:
    """First n series coefficients of 2F1(a, b; c; x)."""
    out = np.empty(n)
    out[0] = 1.0
    for j in range(n - 1):
        out[j + 1] = out[j] * (a + j) * (b + j) / ((c + j) * (j + 1.0))
    return out


_TAIL_TERMS = 40


def _tail_coefficients(k, A: float, B: float, sign: float) -> tuple[float, float, np.ndarray, np.ndarray]:
    """Power-ladder coefficients of kernel_Q(sign*u) for u > TAIL_SPLIT.

    Returns (q_fast, q_slow, d_fast, d_slow) such that
        Q(sign*u) = sum_n d_fast[n] u^(q_fast-2n) + sum_n d_slow[n] u^(q_slow-2n).
    """
    kappa = as_kappa(k).require_generic("kernel tail expansion")
    _check_tail_degeneracy(kappa)
    f1, f2 = _families(kappa)
    n = _TAIL_TERMS

    def pieces(p: HypParams) -> tuple[float, np.ndarray, float, np.ndarray]:
        ca = gamma(p.c) * gamma(p.b - p.a) * rgamma(p.b) * rgamma(p.c - p.a)
        cb = gamma(p.c) * gamma(p.a - p.b) * rgamma(p.a) * rgamma(p.c - p.b)
        ga = _gauss_coeffs(p.a, p.a - p.c + 1.0, p.a - p.b + 1.0, n)
        gb = _gauss_coeffs(p.b, p.b - p.c + 1.0, p.b - p.a + 1.0, n)
        return ca, ga, cb, gb

    p1, g1, p2, g2 = pieces(f1)
    q1, h1, q2, h2 = pieces(f2)

    alt = (-1.0) ** np.arange(n)  # series argument is -1/u^2
    nu = 1.0 - 8.0 / kappa
    binom = np.empty(n)
    binom[0] = 1.0
    for m in range(n - 1):
        binom[m + 1] = binom[m] * (nu - m) / (m + 1.0)

    fast_inner = (A * p1) * (g1 * alt) + (sign * B * q1) * (h1 * alt)
    slow_inner = (A * p2) * (g2 * alt) + (sign * B * q2) * (h2 * alt)
    d_fast = np.convolve(fast_inner, binom)[:n]
    d_slow = np.convolve(slow_inner, binom)[:n]
    q_fast = 1.0 - 24.0 / kappa
    q_slow = -8.0 / kappa
    return q_fast, q_slow, d_fast, d_slow


def _tail_value(k, u: np.ndarray, sign: float, A: float, B: float) -> np.ndarray:
    """kernel_Q(sign*u) for u > TAIL_SPLIT via the ladders."""
    q_fast, q_slow, d_fast, d_slow = _tail_coefficients(k, A, B, sign)
    u = np.asarray(u, dtype=float)
    x = u ** -2.0
    powers = x[..., None] ** np.arange(_TAIL_TERMS)
    return u ** q_fast * (powers @ d_fast) + u ** q_slow * (powers @ d_slow)


def tail_mass(k, T: float, sign: float, A: float = 1.0, B: float | None = None) -> float:
    """Exact integral of kernel_Q(sign*u) over u in [T, inf), T >= TAIL_SPLIT."""
    if T < TAIL_SPLIT:
        raise UsageError(f"tail_mass requires T >= {TAIL_SPLIT}")
    if B is None:
        B = constant_B(k)
    q_fast, q_slow, d_fast, d_slow = _tail_coefficients(k, A, B, sign)
    ns = np.arange(_TAIL_TERMS)
    fast = np.sum(d_fast * T ** (q_fast + 1.0 - 2.0 * ns) / (-(q_fast + 1.0 - 2.0 * ns)))
    slow = np.sum(d_slow * T ** (q_slow + 1.0 - 2.0 * ns) / (-(q_slow + 1.0 - 2.0 * ns)))
    return float(fast + slow)


def kernel_Q(k, t, A: float, B: float):
    """General kernel: even/odd hypergeometric combination over (1+t^2)^(8/kappa-1)."""
    kappa = as_kappa(k).require_generic("kernel_Q")
    ts = np.asarray(t, dtype=float)
    scalar = ts.ndim == 0
    ts = np.atleast_1d(ts)
    out = np.empty_like(ts)

    near = np.abs(ts) <= TAIL_SPLIT
    if near.any():
        tn = ts[near]
        f1, f2 = _families(kappa)
        z = -tn * tn
        even = hyp2f1_nonpos(f1, z)
        odd = hyp2f1_nonpos(f2, z)
        out[near] = (A * even + B * tn * odd) * (1.0 + tn * tn) ** (1.0 - 8.0 / kappa)
    far = ~near
    if far.any():
        tf = ts[far]
        for sgn in (1.0, -1.0):
            m = tf * sgn > 0
            if m.any():
                vals = _tail_value(kappa, np.abs(tf[m]), sgn, A, B)
                idx = np.flatnonzero(far)[m]
                out[idx] = vals
    return float(out[0]) if scalar else out


def kernel_S(k, t):
    """The side-splitting kernel: kernel_Q with the tail-cancelling odd coefficient."""
    kappa = as_kappa(k)
    return kernel_Q(kappa, t, 1.0, constant_B(kappa))
