import numpy as np
import pytest
from scipy import integrate

from sle_duo.errors import NumericalError
from sle_duo.quadrature import (
    NODES_15,
    WEIGHTS_G7,
    WEIGHTS_K15,
    adaptive_quad,
    panel_estimates,
    panel_nodes,
)


def quad_panel(f, a, b):
    nodes = panel_nodes(np.array([a]), np.array([b]))
    vals = f(nodes.ravel()).reshape(nodes.shape)
    return panel_estimates(vals, np.array([a]), np.array([b]))


class TestRuleExactness:
    def test_k15_exact_through_degree_22(self):
        # exact integral of x^n over [-1, 1] is 0 (odd) or 2/(n+1)
        for n in range(23):
            v, _ = quad_panel(lambda x: x ** n, -1.0, 1.0)
            want = 0.0 if n % 2 else 2.0 / (n + 1)
            assert v[0] == pytest.approx(want, abs=5e-15)

    def test_g7_exact_through_degree_13(self):
        half = 1.0
        for n in range(14):
            vals = NODES_15 ** n
            g7 = vals @ WEIGHTS_G7 * half
            want = 0.0 if n % 2 else 2.0 / (n + 1)
            assert g7 == pytest.approx(want, abs=5e-15)

    def test_gauss_weights_match_numpy(self):
        x, w = np.polynomial.legendre.leggauss(7)
        mine = WEIGHTS_G7[WEIGHTS_G7 > 0]
        assert np.allclose(np.sort(mine), np.sort(w), rtol=0, atol=1e-15)
        assert np.allclose(np.sort(NODES_15[1:14:2]), np.sort(x), rtol=0, atol=1e-15)


class TestAdaptive:
    def test_smooth_integral(self):
        v, e = adaptive_quad(np.sin, np.linspace(0.0, np.pi, 5))
        assert v == pytest.approx(2.0, abs=1e-13)
        assert abs(v - 2.0) <= max(e, 1e-14)

    def test_peaked_integrand_vs_scipy(self):
        f = lambda x: 1.0 / (1e-4 + (x - 0.3) ** 2)
        ref, _ = integrate.quad(f, 0.0, 1.0, epsabs=1e-13, epsrel=1e-13)
        v, e = adaptive_quad(f, np.array([0.0, 1.0]), abs_tol=1e-10, rel_tol=1e-12)
        assert v == pytest.approx(ref, rel=1e-10)

    def test_error_estimate_honest(self):
        f = lambda x: np.sqrt(np.abs(x - 0.5))
        ref = (2.0 / 3.0) * (0.5 ** 1.5) * 2.0
        v, e = adaptive_quad(f, np.array([0.0, 1.0]), abs_tol=1e-9, rel_tol=1e-9)
        assert abs(v - ref) <= 10.0 * max(e, 1e-12)

    def test_unreachable_tolerance_raises(self):
        f = lambda x: np.where(x < 0.123456, 0.0, 1.0)
        with pytest.raises(NumericalError, match="achieved"):
            adaptive_quad(f, np.array([0.0, 1.0]), abs_tol=1e-15, rel_tol=1e-15, max_levels=3)
