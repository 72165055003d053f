"""Command-line interface: figure-style data exports and verification runs.

Exit codes: 0 success, 1 verification or statistical disagreement, 2 usage
error, 3 I/O failure. Every command writes a run manifest beside its outputs;
identical inputs (and seed) reproduce identical data files byte for byte.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, manifest, probabilities, qhall, verify
from .closedforms import kzero_trace
from .errors import (
    DomainError,
    NumericalError,
    StatisticalQualityError,
    UsageError,
)
from .kernel import Kappa
from .simulator import SimConfig, assemble_triple, simulate_two_curve_left

EXIT_OK = 0
EXIT_DISAGREE = 1
EXIT_USAGE = 2
EXIT_IO = 3


def parse_kappa(text: str) -> float:
    """kappa as a decimal or an exact fraction literal like 8/3."""
    try:
        if "/" in text:
            value = float(Fraction(text))
        else:
            value = float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse kappa from {text!r}") from exc
    Kappa(value)
    return value


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _write_csv(path: Path, header: list[str], rows: list[list[float]]) -> None:
    lines = [",".join(header)]
    lines += [",".join(_fmt(x) for x in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _load_config_args(argv: list[str]) -> list[str]:
    """Expand --config FILE into leading flags so explicit flags override."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise UsageError("--config requires a path")
    path = Path(argv[idx + 1])
    rest = argv[:idx] + argv[idx + 2 :]
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    file_args: list[str] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {raw!r} is not key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        file_args += [f"--{key.replace('_', '-')}", value]
    return rest[:1] + file_args + rest[1:]


def _workers(requested: int) -> int:
    cap = os.environ.get("SLE_DUO_THREADS")
    if cap is None:
        return max(1, requested)
    try:
        cap_n = int(cap)
    except ValueError as exc:
        raise UsageError(f"SLE_DUO_THREADS must be an integer, got {cap!r}") from exc
    return max(1, min(requested, cap_n))


def _grid(t_min: float, t_max: float, points: int) -> np.ndarray:
    if points < 2:
        raise UsageError("points must be at least 2")
    if not t_max >= t_min:
        raise UsageError("t-max must be >= t-min")
    return np.linspace(t_min, t_max, points)


def cmd_prob(args: argparse.Namespace) -> int:
    kappa = parse_kappa(args.kappa)
    ts = _grid(args.t_min, args.t_max, args.points)
    started = manifest.utc_now()
    pl, pm, pr_, err = probabilities._triple_many(kappa, ts)
    out = Path(args.out)
    rows = [
        [t, math.atan(t), pl[i], pm[i], pr_[i], err[i]] for i, t in enumerate(ts)
    ]
    if args.format == "csv":
        _write_csv(out, ["t", "phi", "p_left", "p_middle", "p_right", "abs_err"], rows)
    else:
        payload = [
            dict(zip(("t", "phi", "p_left", "p_middle", "p_right", "abs_err"), row))
            for row in rows
        ]
        out.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    manifest.write_manifest(
        out,
        "prob",
        {"kappa": kappa, "t_min": args.t_min, "t_max": args.t_max,
         "points": args.points, "format": args.format},
        started,
        manifest.utc_now(),
        [out],
    )
    return EXIT_OK


def cmd_schramm(args: argparse.Namespace) -> int:
    kappa = parse_kappa(args.kappa)
    ts = _grid(args.t_min, args.t_max, args.points)
    started = manifest.utc_now()
    rows = []
    for t in ts:
        p = probabilities.schramm_left(kappa, float(t))
        rows.append([t, math.atan(t), p, 1.0 - p])
    out = Path(args.out)
    _write_csv(out, ["t", "phi", "p_left", "p_right"], rows)
    manifest.write_manifest(
        out,
        "schramm",
        {"kappa": kappa, "t_min": args.t_min, "t_max": args.t_max, "points": args.points},
        started,
        manifest.utc_now(),
        [out],
    )
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    kappa = parse_kappa(args.kappa)
    started = manifest.utc_now()
    base = dict(
        kappa=kappa,
        samples=args.samples,
        seed=args.seed,
        delta0=args.delta0,
        x_escape=args.x_escape,
        im_floor=args.im_floor,
        dt_safety=args.dt_safety,
        max_steps=args.max_steps,
    )
    workers = _workers(args.workers)
    left = simulate_two_curve_left(SimConfig(target_t=args.t, **base), workers=workers)
    right = simulate_two_curve_left(SimConfig(target_t=-args.t, **base), workers=workers)
    triple = assemble_triple(left, right)
    oracle = probabilities.two_curve_triple(kappa, args.t)

    def compare(est, want):
        tol = 3.0 * est.stderr
        return {
            "p_hat": est.p_hat,
            "oracle": want,
            "delta": abs(est.p_hat - want),
            "tolerance": tol,
            "ok": abs(est.p_hat - want) <= tol,
        }

    comparison = {
        "left": compare(left, oracle.p_left),
        "right": compare(right, oracle.p_right),
    }
    agrees = comparison["left"]["ok"] and comparison["right"]["ok"]
    payload = {
        "config": {**base, "target_t": args.t, "workers": workers},
        "left": left.__dict__,
        "right": right.__dict__,
        "triple": triple.__dict__,
        "oracle": oracle.__dict__,
        "comparison": comparison,
        "agrees": agrees,
        "started": started,
        "finished": manifest.utc_now(),
    }
    out = Path(args.json_out)
    out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    manifest.write_manifest(
        out,
        "simulate",
        {**base, "t": args.t, "workers": workers},
        started,
        payload["finished"],
        [out],
        seed=args.seed,
    )
    return EXIT_OK if agrees else EXIT_DISAGREE


def cmd_qhall(args: argparse.Namespace) -> int:
    kappa = parse_kappa(args.kappa)
    geom = qhall.StripGeometry(args.width)
    started = manifest.utc_now()
    raw = qhall.current_profile(geom, kappa, args.points, qhall.Normalization.RAW)
    peak = raw.i / np.max(raw.i)
    rows = [[raw.y[i], raw.i[i], peak[i]] for i in range(raw.y.size)]
    out = Path(args.out)
    _write_csv(out, ["y", "I_raw", "I_unit_peak"], rows)
    manifest.write_manifest(
        out,
        "qhall",
        {"kappa": kappa, "width": args.width, "points": args.points},
        started,
        manifest.utc_now(),
        [out],
    )
    return EXIT_OK


def cmd_kzero(args: argparse.Namespace) -> int:
    started = manifest.utc_now()
    n = max(args.points, 2)
    trace = kzero_trace(args.delta, args.t_max, n)
    resid = trace.hyperbola_residuals()
    rows = [
        [tau, tip.real, tip.imag, resid[i]]
        for i, (tau, tip) in enumerate(trace.samples)
    ]
    out = Path(args.out)
    _write_csv(out, ["time", "re_tip", "im_tip", "hyperbola_residual"], rows)
    manifest.write_manifest(
        out,
        "kzero",
        {"delta": args.delta, "t_max": args.t_max, "points": args.points},
        started,
        manifest.utc_now(),
        [out],
    )
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    ok, rows = verify.run_suite(args.level)
    width = max(len(name) for name, _, _ in rows)
    for name, good, detail in rows:
        print(f"{name:<{width}}  {'PASS' if good else 'FAIL'}  {detail}")
    if not ok:
        failing = ", ".join(name for name, good, _ in rows if not good)
        print(f"verification failed: {failing}", file=sys.stderr)
        return EXIT_DISAGREE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sle-duo",
        description=(
            "Probabilities that a point of the upper half-plane lies left of, "
            "between, or right of a pair of chordal SLE curves grown from one "
            "boundary point; plus the one-curve formula, a Monte Carlo "
            "cross-check, strip current profiles, and the deterministic "
            "kappa=0 geometry."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    prob = sub.add_parser("prob", help="two-curve probability triple on a t-grid")
    prob.add_argument("--kappa", required=True)
    prob.add_argument("--t-min", type=float, default=-6.0)
    prob.add_argument("--t-max", type=float, default=6.0)
    prob.add_argument("--points", type=int, default=241)
    prob.add_argument("--out", required=True)
    prob.add_argument("--format", choices=("csv", "json"), default="csv")
    prob.set_defaults(fn=cmd_prob)

    schramm = sub.add_parser("schramm", help="one-curve passage probability on a t-grid")
    schramm.add_argument("--kappa", required=True)
    schramm.add_argument("--t-min", type=float, default=-6.0)
    schramm.add_argument("--t-max", type=float, default=6.0)
    schramm.add_argument("--points", type=int, default=241)
    schramm.add_argument("--out", required=True)
    schramm.set_defaults(fn=cmd_schramm)

    simulate = sub.add_parser("simulate", help="Monte Carlo triple vs the quadrature oracle")
    simulate.add_argument("--kappa", required=True)
    simulate.add_argument("--t", type=float, default=0.0)
    simulate.add_argument("--samples", type=int, default=100_000)
    simulate.add_argument("--seed", type=int, default=1)
    simulate.add_argument("--delta0", type=float, default=SimConfig.delta0)
    simulate.add_argument("--x-escape", type=float, default=SimConfig.x_escape)
    simulate.add_argument("--im-floor", type=float, default=SimConfig.im_floor)
    simulate.add_argument("--dt-safety", type=float, default=SimConfig.dt_safety)
    simulate.add_argument("--max-steps", type=int, default=SimConfig.max_steps)
    simulate.add_argument("--workers", type=int, default=1)
    simulate.add_argument("--json-out", required=True)
    simulate.set_defaults(fn=cmd_simulate)

    qh = sub.add_parser("qhall", help="strip current-density profile")
    qh.add_argument("--kappa", default="6")
    qh.add_argument("--width", type=float, default=1.0)
    qh.add_argument("--points", type=int, default=200)
    qh.add_argument("--out", required=True)
    qh.set_defaults(fn=cmd_qhall)

    kz = sub.add_parser("kzero", help="deterministic kappa=0 trace tips")
    kz.add_argument("--delta", type=float, default=1.0)
    kz.add_argument("--t-max", type=float, default=5.0)
    kz.add_argument("--points", type=int, default=100)
    kz.add_argument("--out", required=True)
    kz.set_defaults(fn=cmd_kzero)

    ver = sub.add_parser("verify", help="run the self-verification suites")
    ver.add_argument("--level", choices=("fast", "full"), default="fast")
    ver.set_defaults(fn=cmd_verify)

    for p in (prob, schramm, simulate, qh, kz, ver):
        p.add_argument("--config", help="flat key = value file mirroring the flags")
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _load_config_args(argv)
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:  # argparse exits on usage errors and --help
            return int(exc.code or 0)
        return args.fn(args)
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, StatisticalQualityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DISAGREE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


def entry() -> None:
    sys.exit(main())
