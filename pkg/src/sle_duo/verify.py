"""Named self-verification suites behind the ``verify`` CLI command.

Each check returns (ok, detail). The fast tier exercises every identity the
package is built on; the full tier adds the large Monte Carlo comparisons.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from . import closedforms, kernel, probabilities, qhall, simulator
from .closedforms import Kappa8Branch
from .specfn import HypParams, gamma, hyp2f1_nonpos


def _check_specfn_identities() -> tuple[bool, str]:
    worst = 0.0
    worst_name = ""

    def track(name: str, got: float, want: float, scale: float = 0.0) -> None:
        nonlocal worst, worst_name
        rel = abs(got - want) / max(abs(want), scale, 1e-300)
        if rel > worst:
            worst, worst_name = rel, name

    track("gamma(1)", gamma(1.0), 1.0)
    track("gamma(1/2)", gamma(0.5), math.sqrt(math.pi))
    track("reflection", gamma(2.0 / 3.0) * gamma(4.0 / 3.0), 2.0 * math.pi / (3.0 * math.sqrt(3.0)))
    rng = np.random.default_rng(20240901)
    for x in rng.uniform(0.1, 30.0, 50):
        track("recurrence", gamma(x + 1.0), x * gamma(x))
    track("arctan", hyp2f1_nonpos(HypParams(0.5, 1.0, 1.5), -1.0), math.pi / 4.0)
    track("log", hyp2f1_nonpos(HypParams(1.0, 1.0, 2.0), -1.0), math.log(2.0))
    from .specfn import _gauss_series

    for kap in rng.uniform(0.8, 7.8, 12):
        q = 4.0 / kap
        a, b, c = 1.0 + q, 1.5 - q, 1.5
        z = -float(rng.uniform(0.0, 60.0))
        # Pfaff-path independence: transform on either upper parameter
        za = np.array([z / (z - 1.0)])
        fa = float((1.0 - z) ** (-a) * _gauss_series(a, c - b, c, za, "check")[0])
        fb = float((1.0 - z) ** (-b) * _gauss_series(c - a, b, c, za, "check")[0])
        track("pfaff-paths", fa, fb)
        f0 = hyp2f1_nonpos(HypParams(a, b, c), z)
        fm = hyp2f1_nonpos(HypParams(a - 1.0, b, c), z)
        fp = hyp2f1_nonpos(HypParams(a, b, c + 1.0), z)
        track("contiguity", c * (1.0 - z) * f0 - c * fm + (c - b) * z * fp, 0.0, scale=abs(c * fm))
    ok = worst <= 1e-9
    return ok, f"worst relative deviation {worst:.2e} ({worst_name})"


def _check_kernel_normalization() -> tuple[bool, str]:
    worst = 0.0
    for kap in (2.0, 8.0 / 3.0, 4.0, 6.0, 7.5):
        numeric = _numeric_norm(kap)
        closed = kernel.norm_constant(kap)
        worst = max(worst, abs(numeric - closed) / closed)
    return worst <= 1e-8, f"worst relative deviation {worst:.2e}"


def _numeric_norm(kap: float) -> float:
    ev = probabilities._evaluator(kap)
    core = float(ev.s_panels.sum())
    return core + ev.mass_plus + ev.mass_minus


def _check_kernel_ode() -> tuple[bool, str]:
    worst = 0.0
    for kap in (8.0 / 3.0, 4.0, 6.0):
        params = kernel.derive_params(kap)
        B = kernel.constant_B(kap)
        h = 1e-3
        ts = np.linspace(-5.0, 5.0, 41)
        offs = np.array([-2.0, -1.0, 0.0, 1.0, 2.0]) * h
        q = kernel.kernel_Q(kap, (ts[:, None] + offs[None, :]).ravel(), 1.0, B).reshape(41, 5)
        qm2, qm1, q0, qp1, qp2 = q.T
        d1 = (-qp2 + 8 * qp1 - 8 * qm1 + qm2) / (12 * h)
        d2 = (-qp2 + 16 * qp1 - 30 * q0 + 16 * qm1 - qm2) / (12 * h * h)
        term1 = params.lam * d2
        term2 = -(2.0 * params.mu * ts / (ts * ts + 1.0)) * d1
        term3 = ((3.0 - params.mu) * ts * ts - (1.0 + params.mu)) / (ts * ts + 1.0) ** 2 * q0
        scale = max(np.abs(term1).max(), np.abs(term2).max(), np.abs(term3).max())
        worst = max(worst, float(np.max(np.abs(term1 + term2 + term3))) / scale)
    return worst <= 1e-6, f"worst relative residual {worst:.2e}"


def _check_probability_ode() -> tuple[bool, str]:
    worst = 0.0
    for kap in (8.0 / 3.0, 4.0, 6.0):
        ev = probabilities._evaluator(kap)
        resid = probabilities.ode_residual(
            kap, np.linspace(-5.0, 5.0, 21), lambda ts: ev.p_left_many(np.asarray(ts))[0]
        )
        worst = max(worst, resid)
    return worst <= 1e-6, f"worst residual {worst:.2e}"


def _check_closed_forms() -> tuple[bool, str]:
    worst = 0.0
    ts = np.linspace(-10.0, 10.0, 101)
    for kap in (2.0, 8.0 / 3.0, 4.0):
        pl, pm, pr_, _ = probabilities._triple_many(kap, ts)
        for i, t in enumerate(ts):
            ex = closedforms.exact_triple(kap, float(t))
            worst = max(
                worst,
                abs(pl[i] - ex.p_left),
                abs(pm[i] - ex.p_middle),
                abs(pr_[i] - ex.p_right),
            )
    return worst <= 1e-8, f"worst componentwise deviation {worst:.2e}"


def _check_sum_rule() -> tuple[bool, str]:
    worst_sum = 0.0
    worst_refl = 0.0
    ts = np.linspace(-20.0, 20.0, 101)
    for kap in (1.0, 2.0, 8.0 / 3.0, 3.0, 4.0, 5.0, 6.0, 7.0):
        pl, pm, pr_, _ = probabilities._triple_many(kap, ts)
        worst_sum = max(worst_sum, float(np.max(np.abs(pl + pm + pr_ - 1.0))))
        pl_m, _, _, _ = probabilities._triple_many(kap, -ts)
        worst_refl = max(worst_refl, float(np.max(np.abs(pr_ - pl_m))))
    ok = worst_sum <= 1e-8 and worst_refl == 0.0
    return ok, f"sum deviation {worst_sum:.2e}, reflection deviation {worst_refl:.2e}"


def _fit_slope(ts: np.ndarray, vals: np.ndarray) -> float:
    return float(np.polyfit(np.log(ts), np.log(vals), 1)[0])


def _check_tail_exponents() -> tuple[bool, str]:
    msgs = []
    ok = True
    ts = np.logspace(2.0, 3.0, 9)
    for kap in (4.0, 6.0):
        ev = probabilities._evaluator(kap)
        slope = _fit_slope(ts, ev.p_left_many(ts)[0])
        want = -(24.0 / kap - 2.0)
        rel = abs(slope - want) / abs(want)
        ok &= rel <= 0.02
        msgs.append(f"two-curve k={kap:g}: slope {slope:.4f} vs {want:.4f}")
    vals = np.array([probabilities.schramm_left(6.0, float(t)) for t in ts])
    slope = _fit_slope(ts, vals)
    want = -(8.0 - 6.0) / 6.0
    ok &= abs(slope - want) / abs(want) <= 0.02
    msgs.append(f"one-curve k=6: slope {slope:.4f} vs {want:.4f}")
    return ok, "; ".join(msgs)


def _check_kappa8_branches() -> tuple[bool, str]:
    phis = np.linspace(-1.5, 1.5, 31)
    worst = 0.0
    for phi in phis:
        lim = closedforms.exact_triple_kappa8(Kappa8Branch.LIMIT_FROM_BELOW, float(phi))
        dire = closedforms.exact_triple_kappa8(Kappa8Branch.DIRECT_AT_EIGHT, float(phi))
        worst = max(worst, abs(lim.p_middle - 0.5), abs(dire.p_middle))
        worst = max(worst, abs(dire.p_left - (0.5 - phi / math.pi)))
        schramm4 = probabilities.schramm_left(4.0, probabilities.FieldPoint.from_phi(float(phi)))
        worst = max(worst, abs(dire.p_left - schramm4))
    return worst <= 1e-10, f"worst deviation {worst:.2e}"


def _check_kzero() -> tuple[bool, str]:
    trace = closedforms.kzero_trace(1.0, 5.0, 100)
    resid = float(trace.hyperbola_residuals().max())
    fine = closedforms.kzero_trace(1e-4, 1.0, 50)
    ang = math.atan2(fine.samples[-1][1].imag, fine.samples[-1][1].real)
    ang_err = abs(ang - math.pi / 3.0)
    ok = resid <= 1e-8 and ang_err <= 1e-3
    return ok, f"hyperbola residual {resid:.2e}, ray angle error {ang_err:.2e}"


def _check_qhall() -> tuple[bool, str]:
    geom = qhall.StripGeometry(1.0)
    prof = qhall.current_profile(geom, 6.0, 64, qhall.Normalization.RAW)
    sym = float(np.max(np.abs(prof.i - prof.i[::-1])))
    ev = probabilities._evaluator(6.0)
    h = 1e-4
    y = prof.y
    t_of = lambda yy: np.cos(math.pi * yy) / np.sin(math.pi * yy)
    diff = (
        lambda yy: ev.p_left_many(t_of(yy))[0] - ev.p_left_many(-t_of(yy))[0]
    )
    fd = (diff(y + h) - diff(y - h)) / (2.0 * h)
    rel = float(np.max(np.abs(fd - prof.i) / np.abs(prof.i)))
    ok = sym <= 1e-9 and rel <= 1e-4
    pos = bool(np.all(prof.i > 0.0))
    return ok and pos, f"symmetry {sym:.2e}, derivative deviation {rel:.2e}, positive={pos}"


def _check_middle_direct() -> tuple[bool, str]:
    worst = 0.0
    for kap in (8.0 / 3.0, 4.0, 6.0):
        for t in (-3.0, -1.0, 0.0, 0.5, 2.0, 10.0):
            direct = probabilities.two_curve_middle_direct(kap, t)
            triple = probabilities.two_curve_triple(kap, t).p_middle
            worst = max(worst, abs(direct - triple))
    return worst <= 1e-8, f"worst route disagreement {worst:.2e}"


def _mc_tolerance(est: simulator.SimEstimate, oracle: float) -> tuple[bool, str]:
    tol = max(0.01, 3.0 * est.stderr)
    dev = abs(est.p_hat - oracle)
    return dev <= tol, f"|{est.p_hat:.5f} - {oracle:.5f}| = {dev:.5f} vs tol {tol:.5f}"


def _check_mc_two_curve() -> tuple[bool, str]:
    msgs = []
    ok = True
    for kap, t, seed in ((6.0, 0.0, 101), (8.0 / 3.0, 1.0, 102), (4.0, 0.0, 103)):
        cfg = simulator.SimConfig(kappa=kap, target_t=t, samples=100_000, seed=seed)
        est = simulator.simulate_two_curve_left(cfg)
        good, msg = _mc_tolerance(est, probabilities.two_curve_left(kap, t))
        ok &= good and est.resolved_fraction >= 0.99
        msgs.append(f"k={kap:g},t={t:g}: {msg}")
    return ok, "; ".join(msgs)


def _check_mc_schramm() -> tuple[bool, str]:
    cfg = simulator.SimConfig(
        kappa=4.0, target_t=1.0, samples=100_000, seed=104, dt_safety=0.0015
    )
    est = simulator.simulate_schramm(cfg)
    dev = abs(est.p_hat - 0.25)
    ok = dev <= 3.0 * est.stderr and est.resolved_fraction >= 0.99
    return ok, f"|{est.p_hat:.5f} - 0.25| = {dev:.5f} vs 3*stderr {3*est.stderr:.5f}"


FAST_CHECKS: list[tuple[str, Callable[[], tuple[bool, str]]]] = [
    ("specfn-identities", _check_specfn_identities),
    ("kernel-normalization", _check_kernel_normalization),
    ("kernel-ode-residual", _check_kernel_ode),
    ("probability-ode-residual", _check_probability_ode),
    ("closed-form-agreement", _check_closed_forms),
    ("sum-rule-reflection", _check_sum_rule),
    ("tail-exponents", _check_tail_exponents),
    ("kappa8-branches", _check_kappa8_branches),
    ("kzero-hyperbola", _check_kzero),
    ("qhall-consistency", _check_qhall),
    ("middle-direct-agreement", _check_middle_direct),
]

FULL_CHECKS: list[tuple[str, Callable[[], tuple[bool, str]]]] = FAST_CHECKS + [
    ("mc-two-curve", _check_mc_two_curve),
    ("mc-schramm", _check_mc_schramm),
]


def run_suite(level: str = "fast") -> tuple[bool, list[tuple[str, bool, str]]]:
    checks = FAST_CHECKS if level == "fast" else FULL_CHECKS
    rows = []
    all_ok = True
    for name, fn in checks:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashed check is a failed check
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        rows.append((name, ok, detail))
        all_ok &= ok
    return all_ok, rows
