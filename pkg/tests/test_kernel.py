import math

import numpy as np
import pytest
from scipy import integrate

from sle_duo.errors import DomainError, UsageError
from sle_duo.kernel import (
    Kappa,
    TAIL_SPLIT,
    constant_B,
    derive_params,
    kernel_Q,
    kernel_S,
    norm_constant,
    tail_mass,
)


def s4_closed(t):
    return (1.0 / (1.0 + t * t)) * (
        1.0 - (2.0 * t / math.pi) * (1.0 / (1.0 + t * t) + math.atan(t) / t)
    )


class TestKappa:
    def test_range_validation(self):
        with pytest.raises(DomainError):
            Kappa(-0.1)
        with pytest.raises(DomainError):
            Kappa(8.1)
        assert Kappa(0.0).classification.startswith("special")
        assert Kappa(8.0 / 3.0).classification.startswith("special")
        assert Kappa(3.7).classification == "generic"

    def test_require_generic(self):
        with pytest.raises(UsageError):
            Kappa(8.0).require_generic("op")
        assert Kappa(5.0).require_generic("op") == 5.0


class TestDeriveParams:
    def test_kappa6(self):
        p = derive_params(6.0)
        assert p.h3 == pytest.approx(1.0 / 3.0, rel=1e-15)
        assert p.mu == pytest.approx(-6.0, rel=1e-14)
        assert p.lam == pytest.approx(9.0 / 4.0, rel=1e-14)
        assert p.x4leg == pytest.approx(2.0, rel=1e-15)
        assert not p.degenerate

    def test_central_charge_is_quadratic_root(self):
        # oracle: c solves 3 h3^2 + h3 (c-7) + c + 2 = 0 given h3
        for kappa in (2.0, 8.0 / 3.0, 4.0, 6.0, 7.3):
            p = derive_params(kappa)
            c_from_root = (7.0 * p.h3 - 3.0 * p.h3 ** 2 - 2.0) / (p.h3 + 1.0)
            assert p.c == pytest.approx(c_from_root, rel=1e-12, abs=1e-12)
        assert derive_params(6.0).c == pytest.approx(0.0, abs=1e-14)
        assert derive_params(2.0).c == pytest.approx(-2.0, rel=1e-14)
        assert derive_params(2.0).h3 == pytest.approx(3.0)
        assert derive_params(2.0).x2leg == pytest.approx(3.0)

    def test_quadratic_invariant(self):
        for kappa in np.linspace(0.3, 8.0, 40):
            p = derive_params(float(kappa))
            if p.degenerate and not math.isfinite(p.h3):
                continue
            resid = 3.0 * p.h3 ** 2 + p.h3 * (p.c - 7.0) + p.c + 2.0
            assert abs(resid) <= 1e-10 * max(1.0, 3.0 * p.h3 ** 2)

    def test_exponent_consistency(self):
        for kappa in (1.0, 3.0, 6.6):
            p = derive_params(kappa)
            assert p.alpha3 - p.alpha1 == pytest.approx(p.h3, rel=1e-12)
            assert p.alpha1 == pytest.approx(-2.0 * p.h2, rel=1e-12)

    def test_degenerate_ends(self):
        p8 = derive_params(8.0)
        assert p8.degenerate and p8.h3 == 0.0
        p0 = derive_params(0.0)
        assert p0.degenerate and p0.h3 == math.inf


class TestConstantB:
    def test_kappa4_value(self):
        assert constant_B(4.0) == pytest.approx(-4.0 / math.pi, rel=1e-13)

    def test_kappa6_gamma_expression(self):
        want = (
            -2.0
            * math.gamma(5.0 / 3.0)
            * math.gamma(2.0 / 3.0)
            / (math.gamma(7.0 / 6.0) * math.gamma(1.0 / 6.0))
        )
        assert constant_B(6.0) == pytest.approx(want, rel=1e-13)

    def test_kappa83_is_minus_3pi_over_4(self):
        # Gamma(5/2)Gamma(3/2)/(Gamma(2)Gamma(1)) = 3 pi / 8
        assert constant_B(8.0 / 3.0) == pytest.approx(-3.0 * math.pi / 4.0, rel=1e-13)

    def test_kappa8_degenerates_to_zero(self):
        with pytest.warns(RuntimeWarning):
            assert constant_B(8.0) == 0.0


class TestNormConstant:
    def test_kappa6(self):
        assert norm_constant(6.0) == pytest.approx(3.0 * math.sqrt(3.0) * 2.0 ** (-1.0 / 3.0),
                                                   rel=1e-13)

    def test_kappa4_and_2(self):
        # direct substitution: 2^(2-8/k) pi Gamma(12/k - 1)/(Gamma(4/k) Gamma(8/k))
        assert norm_constant(4.0) == pytest.approx(math.pi, rel=1e-13)
        assert norm_constant(2.0) == pytest.approx(
            0.25 * math.pi * math.gamma(5.0) / (math.gamma(2.0) * math.gamma(4.0)), rel=1e-13
        )

    def test_matches_numeric_integral(self):
        # full-line integral via an independent integrator on the core plus
        # our exact ladder tails
        for kappa in (2.0, 8.0 / 3.0, 4.0, 6.0, 7.5):
            core, err = integrate.quad(
                lambda t: kernel_S(kappa, t), -TAIL_SPLIT, TAIL_SPLIT, epsabs=1e-12, limit=200
            )
            total = core + tail_mass(kappa, TAIL_SPLIT, +1.0) + tail_mass(kappa, TAIL_SPLIT, -1.0)
            assert total == pytest.approx(norm_constant(kappa), rel=1e-8)

    def test_tail_mass_against_scipy(self):
        for kappa in (4.0, 6.0):
            ref, err = integrate.quad(
                lambda t: kernel_S(kappa, t), TAIL_SPLIT, np.inf, epsabs=1e-13, limit=400
            )
            assert tail_mass(kappa, TAIL_SPLIT, +1.0) == pytest.approx(ref, rel=1e-9)


class TestKernels:
    def test_s_at_zero_is_one(self):
        for kappa in (1.0, 2.0, 8.0 / 3.0, 4.0, 6.0, 7.9):
            assert kernel_S(kappa, 0.0) == pytest.approx(1.0, rel=1e-14)

    def test_kappa4_closed_form_pointwise(self):
        for t in (0.5, 1.0, 2.0):
            assert kernel_S(4.0, t) == pytest.approx(s4_closed(t), rel=1e-10)

    def test_kappa83_value_at_one(self):
        # direct arithmetic of the elementary form at t = 1
        want = 0.25 * (-0.25 + 1.5 * math.atan(1.0) + 1.5 - 3.0 * math.pi / 4.0)
        assert kernel_S(8.0 / 3.0, 1.0) == pytest.approx(want, rel=1e-11)

    def test_q_at_zero(self):
        assert kernel_Q(6.0, 0.0, 1.0, 123.0) == pytest.approx(1.0, rel=1e-14)

    def test_q_odd_part_is_odd(self):
        for t in (0.3, 1.0, 3.0, 17.0):
            assert kernel_Q(6.0, -t, 0.0, 1.0) == pytest.approx(
                -kernel_Q(6.0, t, 0.0, 1.0), rel=1e-12
            )

    def test_q_even_part_against_direct_pfaff_series(self):
        # 200-term Pfaff sum at z = -1, written out independently
        a, b, c = 7.0 / 6.0, 1.0 / 3.0, 0.5
        w = 0.5  # z/(z-1) at z = -1
        term, acc = 1.0, 1.0
        for n in range(200):
            term *= (a + n) * (c - b + n) / ((c + n) * (n + 1.0)) * w
            acc += term
        want = 2.0 ** (-a) * acc / 2.0 ** (1.0 / 3.0)
        got = kernel_Q(6.0, 1.0, 1.0, 0.0)
        assert got == pytest.approx(want, rel=1e-12)

    def test_route_continuity_at_split(self):
        for kappa in (2.0, 8.0 / 3.0, 4.0, 6.0, 7.5):
            for sign in (1.0, -1.0):
                a = kernel_S(kappa, sign * (TAIL_SPLIT - 1e-9))
                b = kernel_S(kappa, sign * (TAIL_SPLIT + 1e-9))
                assert a == pytest.approx(b, rel=1e-7)

    def test_tail_exponents(self):
        # generic solution decays as t^(-8/kappa); the tuned odd coefficient
        # cancels that ladder and leaves t^(1-24/kappa)
        ts = np.logspace(2.0, 4.0, 9)
        for kappa in (8.0 / 3.0, 4.0, 6.0):
            vals = np.abs(kernel_Q(kappa, ts, 1.0, 0.0))
            slope = np.polyfit(np.log(ts), np.log(vals), 1)[0]
            assert slope == pytest.approx(-8.0 / kappa, rel=0.02)
        for kappa in (4.0, 6.0, 7.5):
            vals = np.abs(kernel_S(kappa, ts))
            slope = np.polyfit(np.log(ts), np.log(vals), 1)[0]
            assert slope == pytest.approx(1.0 - 24.0 / kappa, rel=0.02)

    def test_ode_residual_second_order(self):
        # lam Q'' - (2 mu t/(t^2+1)) Q' + ((3-mu)t^2-(1+mu))/(t^2+1)^2 Q = 0
        h = 1e-3
        for kappa in (8.0 / 3.0, 4.0, 6.0):
            p = derive_params(kappa)
            B = constant_B(kappa)
            ts = np.linspace(-5.0, 5.0, 41)
            offs = np.array([-2.0, -1.0, 0.0, 1.0, 2.0]) * h
            q = kernel_Q(kappa, (ts[:, None] + offs[None, :]).ravel(), 1.0, B).reshape(-1, 5)
            qm2, qm1, q0, qp1, qp2 = q.T
            d1 = (-qp2 + 8 * qp1 - 8 * qm1 + qm2) / (12 * h)
            d2 = (-qp2 + 16 * qp1 - 30 * q0 + 16 * qm1 - qm2) / (12 * h * h)
            t1 = p.lam * d2
            t2 = -(2.0 * p.mu * ts / (ts ** 2 + 1.0)) * d1
            t3 = ((3.0 - p.mu) * ts ** 2 - (1.0 + p.mu)) / (ts ** 2 + 1.0) ** 2 * q0
            # relative to the size of the equation's terms over the grid
            scale = max(np.abs(t1).max(), np.abs(t2).max(), np.abs(t3).max())
            assert float(np.abs(t1 + t2 + t3).max()) <= 1e-6 * scale

    def test_generic_domain_enforced(self):
        with pytest.raises(UsageError):
            kernel_S(8.0, 1.0)
        with pytest.raises(UsageError):
            norm_constant(0.0)
