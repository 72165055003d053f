import dataclasses
import math

import numpy as np
import pytest

import sle_duo.simulator as sim
from sle_duo.errors import StatisticalQualityError, UsageError
from sle_duo.probabilities import schramm_left, two_curve_left
from sle_duo.simulator import (
    SimConfig,
    SimEstimate,
    assemble_triple,
    simulate_schramm,
    simulate_two_curve_left,
)


def config(**kw):
    base = dict(kappa=4.0, target_t=0.0, samples=2000, seed=1)
    base.update(kw)
    return SimConfig(**base)


class TestConfigValidation:
    def test_invariants(self):
        with pytest.raises(UsageError):
            config(samples=0)
        with pytest.raises(UsageError):
            config(delta0=0.0)
        with pytest.raises(UsageError):
            config(x_escape=50.0)
        with pytest.raises(UsageError):
            config(dt_safety=0.2)
        with pytest.raises(UsageError):
            simulate_schramm(config(kappa=8.0))

    def test_estimate_counts(self):
        est = simulate_schramm(config(samples=500))
        assert est.n_left + est.n_right + est.n_unresolved == 500
        p = est.n_left / (est.n_left + est.n_right)
        assert est.p_hat == p
        assert est.stderr == pytest.approx(math.sqrt(p * (1 - p) / 500))


class TestDeterminism:
    def test_bitwise_reproducible(self):
        cfg = config(kappa=6.0, target_t=0.7, samples=3000)
        a = simulate_two_curve_left(cfg)
        b = simulate_two_curve_left(cfg)
        assert a == b

    def test_worker_count_independent(self, monkeypatch):
        monkeypatch.setattr(sim, "_CHUNK", 512)
        cfg = config(kappa=5.0, target_t=-0.4, samples=4000)
        one = simulate_two_curve_left(cfg, workers=1)
        many = simulate_two_curve_left(cfg, workers=4)
        assert one == many

    def test_chunking_invisible(self, monkeypatch):
        cfg = config(kappa=3.0, target_t=1.2, samples=3000)
        whole = simulate_schramm(cfg)
        monkeypatch.setattr(sim, "_CHUNK", 777)
        split = simulate_schramm(cfg)
        assert whole == split


class TestAgainstOracles:
    def test_schramm_symmetric(self):
        est = simulate_schramm(config(samples=20_000, seed=11))
        assert abs(est.p_hat - 0.5) <= 3.0 * est.stderr

    def test_schramm_kappa6(self):
        cfg = config(kappa=6.0, target_t=1.0, samples=20_000, seed=12, dt_safety=0.001)
        est = simulate_schramm(cfg)
        assert abs(est.p_hat - schramm_left(6.0, 1.0)) <= 3.0 * est.stderr

    def test_schramm_kappa2(self):
        cfg = config(kappa=2.0, target_t=-2.0, samples=20_000, seed=13, dt_safety=0.002)
        est = simulate_schramm(cfg)
        assert abs(est.p_hat - schramm_left(2.0, -2.0)) <= 3.0 * est.stderr

    def test_two_curve_examples(self):
        for kappa, t, seed in ((6.0, 0.0, 21), (8.0 / 3.0, 1.0, 22), (4.0, 0.0, 23)):
            cfg = config(kappa=kappa, target_t=t, samples=20_000, seed=seed)
            est = simulate_two_curve_left(cfg)
            oracle = two_curve_left(kappa, t)
            assert abs(est.p_hat - oracle) <= max(0.01, 3.0 * est.stderr)
            assert est.resolved_fraction >= 0.99

    def test_rho_zero_reduction(self):
        # with the force-point drift disabled the pair process is plain SLE
        cfg = config(kappa=6.0, target_t=0.5, samples=20_000, seed=31)
        plain = simulate_schramm(cfg)
        reduced = simulate_two_curve_left(cfg, force_point_drift=False)
        tol = 3.0 * math.hypot(plain.stderr, reduced.stderr)
        assert abs(plain.p_hat - reduced.p_hat) <= tol

    def test_unresolved_fraction_small(self):
        for kappa in (2.0, 4.5, 7.0):
            for t in (0.0, 3.0):
                cfg = config(kappa=kappa, target_t=t, samples=4000, seed=41)
                est = simulate_two_curve_left(cfg)
                assert est.n_unresolved / 4000 < 0.01


class TestSensitivities:
    def test_delta0_insensitive(self):
        # same seed couples the runs; the systematic shift must stay below
        # one single-run standard error
        base = config(kappa=4.0, target_t=0.0, samples=100_000, seed=51)
        mid = simulate_two_curve_left(base)
        for scale in (0.5, 2.0):
            other = simulate_two_curve_left(dataclasses.replace(base, delta0=1e-6 * scale))
            assert abs(other.p_hat - mid.p_hat) < mid.stderr

    def test_step_halving_stable(self):
        base = config(kappa=4.0, target_t=0.0, samples=100_000, seed=52)
        coarse = simulate_two_curve_left(base)
        fine = simulate_two_curve_left(dataclasses.replace(base, dt_safety=base.dt_safety / 2))
        assert abs(coarse.p_hat - fine.p_hat) < 2.0 * coarse.stderr


class TestAssembleTriple:
    def test_symmetric_input(self):
        cfg = config(kappa=8.0 / 3.0, target_t=0.0, samples=20_000, seed=61)
        left = simulate_two_curve_left(cfg)
        right = simulate_two_curve_left(dataclasses.replace(cfg, target_t=-0.0))
        triple = assemble_triple(left, right)
        assert abs(triple.p_left - triple.p_right) <= 3.0 * triple.abs_err
        assert triple.p_middle == pytest.approx(0.8, abs=max(0.01, 3.0 * triple.abs_err))

    def test_kappa2_triple(self):
        cfg = config(kappa=2.0, target_t=1.0, samples=20_000, seed=62)
        left = simulate_two_curve_left(cfg)
        right = simulate_two_curve_left(dataclasses.replace(cfg, target_t=-1.0))
        triple = assemble_triple(left, right)
        from sle_duo.closedforms import exact_triple

        want = exact_triple(2.0, 1.0)
        tol = max(0.01, 3.0 * triple.abs_err)
        assert triple.p_left == pytest.approx(want.p_left, abs=tol)
        assert triple.p_middle == pytest.approx(want.p_middle, abs=tol)
        assert triple.p_right == pytest.approx(want.p_right, abs=tol)

    def test_quality_gate(self):
        bad = SimEstimate(0.5, 0.01, 450, 450, 100, 1000)
        good = SimEstimate(0.5, 0.01, 990, 5, 5, 1000)
        with pytest.raises(StatisticalQualityError):
            assemble_triple(bad, good)
