"""Command-line front end.

Subcommands cover the whole toolkit: map iteration and classification
(`pam`), vector-field synthesis (`synth`), full and hybrid simulation
(`simulate`), benchmark verification (`verify-tables`), and the crossover
scan (`crossover`). A single JSON config document with sections
{"pam", "canonical", "sim"} can seed any command; explicit flags override
file values.

Exit codes: 0 success, 2 usage error, 3 domain/singularity error,
4 inconclusive (no classifiable pattern, e.g. inside the canard hole).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from . import plotting
from .errors import MmopamError, NotPeriodic
from .family import CanonicalParams, RhoSpec, compute_geometry
from .pam import (
    PamCoefficients,
    TransformedPam,
    detect_signature,
    iterate_orbit,
    lao_bounds,
    sao_bounds,
    atmost_atleast_bounds,
    transform,
    untransform,
)
from .segments import associated_pam
from .simulate import (
    SectionSpec,
    SimConfig,
    canard_hole_radius,
    classify_series,
    hybrid_simulate,
    integrate_full,
    visual_rescale,
)
from .synthesis import synthesize
from .tables import verify_all

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_INCONCLUSIVE = 4


# --------------------------------------------------------------------------
# config plumbing


def _usage(msg: str) -> SystemExit:
    print(f"usage error: {msg}", file=sys.stderr)
    return SystemExit(EXIT_USAGE)


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _merged(section: dict, args: argparse.Namespace, keys: list[str]) -> dict:
    out = dict(section)
    for key in keys:
        val = getattr(args, key, None)
        if val is not None:
            out[key] = val
    return out


def _pam_from(args, config: dict) -> PamCoefficients:
    vals = _merged(config.get("pam", {}), args, ["a11", "a12", "a21", "a22"])
    missing = [k for k in ("a11", "a12", "a21", "a22") if k not in vals]
    if missing:
        raise _usage(f"missing map coefficients: {', '.join(missing)}")
    return PamCoefficients(vals["a11"], vals["a12"], vals["a21"], vals["a22"])


def _rho_from(args, section: dict) -> RhoSpec:
    if getattr(args, "rho", None) is not None:
        if args.rho == "quadratic":
            if args.p is None or args.q is None:
                raise _usage("--rho quadratic requires --p and --q")
            return RhoSpec("quadratic", p=args.p, q=args.q)
        return RhoSpec("fixed_rational")
    if "rho" in section:
        return RhoSpec.from_json_obj(section["rho"])
    return RhoSpec("fixed_rational")


def _canonical_from(args, config: dict) -> CanonicalParams:
    section = dict(config.get("canonical", {}))
    if "lambda" in section:
        section["lam"] = section.pop("lambda")
    vals = _merged(section, args, ["alpha", "beta", "kappa", "lam"])
    rho = _rho_from(args, section)
    missing = [k for k in ("alpha", "beta", "kappa", "lam") if k not in vals]
    if missing:
        if getattr(args, "from_pam", False) or config.get("pam"):
            return synthesize(_pam_from(args, config), rho)
        raise _usage(f"missing vector-field parameters: {', '.join(missing)}")
    return CanonicalParams(vals["alpha"], vals["beta"], vals["kappa"], vals["lam"], rho)


def _sim_from(args, config: dict) -> SimConfig:
    vals = _merged(config.get("sim", {}), args, ["eps", "delta", "rel_tol", "abs_tol", "max_slow_time"])
    init = vals.get("initial_state")
    return SimConfig(
        eps=vals.get("eps", 1e-7),
        delta=vals.get("delta", 5e-3),
        rel_tol=vals.get("rel_tol", 1e-8),
        abs_tol=vals.get("abs_tol", 1e-10),
        max_slow_time=vals.get("max_slow_time", 40.0),
        initial_state=tuple(init) if init is not None else None,
    )


# --------------------------------------------------------------------------
# pam subcommands


def cmd_pam_iterate(args) -> int:
    config = _load_config(args.config)
    pam = _pam_from(args, config)
    orbit = iterate_orbit(pam, args.z0, max_iters=args.max_iters)
    if args.out_csv:
        with open(args.out_csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["n", "Z"])
            for n, z in enumerate(orbit.iterates):
                writer.writerow([n, repr(z)])
    if args.out_svg:
        plotting.cobweb_plot(pam, orbit.iterates[-min(len(orbit.iterates), 200):], args.out_svg)
    if not orbit.converged:
        print("no periodic pattern detected")
        return EXIT_INCONCLUSIVE
    sig = detect_signature(orbit)
    print(f"period: {orbit.period}")
    print(f"transient: {orbit.transient_length}")
    print(f"signature: {sig}")
    return EXIT_OK


def cmd_pam_signature(args) -> int:
    config = _load_config(args.config)
    pam = _pam_from(args, config)
    orbit = iterate_orbit(pam, args.z0, max_iters=args.max_iters)
    print(detect_signature(orbit))
    return EXIT_OK


def cmd_pam_bounds(args) -> int:
    tp = TransformedPam(a=args.a, b=args.b, mu=args.mu, l=args.l)
    out: dict = {"a": args.a, "b": args.b, "l": args.l}
    if args.L is not None and args.s is not None:
        lao_win, sao_win = atmost_atleast_bounds(tp, args.L, args.s)
        out["lao_window"] = _interval_obj(lao_win, args.L, "L")
        out["sao_window"] = _interval_obj(sao_win, args.s, "s")
    elif args.L is not None:
        mu2, mu1 = lao_bounds(tp, args.L)
        out["lao_window"] = {"L": args.L, "lower": mu2, "upper": mu1, "lower_closed": False, "upper_closed": True}
    elif args.s is not None:
        mu3, mu4 = sao_bounds(tp, args.s)
        out["sao_window"] = {"s": args.s, "lower": mu3, "upper": mu4, "lower_closed": True, "upper_closed": False}
    else:
        raise _usage("provide --L and/or --s")
    print(json.dumps(out, indent=2))
    return EXIT_OK


def _interval_obj(win, count: int, key: str) -> dict:
    return {
        key: count,
        "lower": win.lower,
        "upper": win.upper,
        "lower_closed": win.lower_closed,
        "upper_closed": win.upper_closed,
    }


def cmd_pam_transform(args) -> int:
    if args.inverse:
        for name in ("a", "b", "mu", "l"):
            if getattr(args, name) is None:
                raise _usage(f"--inverse requires --{name}")
        pam = untransform(TransformedPam(args.a, args.b, args.mu, args.l))
        print(json.dumps({"a11": pam.a11, "a12": pam.a12, "a21": pam.a21, "a22": pam.a22}))
    else:
        config = _load_config(args.config)
        tp = transform(_pam_from(args, config))
        print(json.dumps({"a": tp.a, "b": tp.b, "mu": tp.mu, "l": tp.l}))
    return EXIT_OK


# --------------------------------------------------------------------------
# synth


def cmd_synth(args) -> int:
    config = _load_config(args.config)
    target = _pam_from(args, config)
    rho = _rho_from(args, config.get("canonical", {}))
    params = synthesize(target, rho)
    text = params.to_json()
    print(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    if args.verify:
        geom = compute_geometry(params)
        got = associated_pam(params, geom)
        for name, g, t in zip(("a11", "a12", "a21", "a22"), got.as_tuple(), target.as_tuple()):
            print(f"residual {name}: {abs(g - t):.3e}", file=sys.stderr)
    return EXIT_OK


# --------------------------------------------------------------------------
# simulate


def cmd_simulate(args) -> int:
    config = _load_config(args.config)
    params = _canonical_from(args, config)
    if args.mode == "hybrid":
        return _simulate_hybrid(args, params)
    return _simulate_full(args, config, params)


def _simulate_hybrid(args, params: CanonicalParams) -> int:
    delta = args.delta if args.delta is not None else 5e-3
    result = hybrid_simulate(params, delta, args.z_init, args.returns)
    if args.out_prefix:
        with open(args.out_prefix + "_returns.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["n", "Z"])
            for n, z in enumerate(result.returns):
                writer.writerow([n, repr(z)])
    for z in result.returns:
        print(repr(z))
    if result.signature is None:
        print("signature: none detected")
        return EXIT_INCONCLUSIVE
    print(f"signature: {result.signature}")
    if args.compare_pam:
        return _report_match(params, str(result.signature))
    return EXIT_OK


def _simulate_full(args, config: dict, params: CanonicalParams) -> int:
    cfg = _sim_from(args, config)
    sec = SectionSpec(x_section=args.x_section)
    geom = compute_geometry(params)
    series = integrate_full(params, cfg, section=sec, n_crossings=args.crossings)
    if args.out_prefix:
        series.to_csv(args.out_prefix + "_series.csv")
        rescaled = visual_rescale(series, delta=cfg.delta, z0=params.z0)
        plotting.time_series_plot(rescaled, args.out_prefix + "_timeseries.svg")
        plotting.projection_plot(rescaled, args.out_prefix + "_xz.svg", coords="xz")
        crossings = [
            {"t": t, "x": x, "y": y, "z": z, "Z": (z - params.z0) / cfg.delta}
            for t, x, y, z in series.crossing_states
        ]
        with open(args.out_prefix + "_crossings.json", "w", encoding="utf-8") as fh:
            json.dump(crossings, fh, indent=2)
    hole = canard_hole_radius(cfg.eps, cfg.delta)
    Zs = [(z - params.z0) / cfg.delta for *_, z in series.crossing_states]
    flagged = sum(abs(Z) < hole for Z in Zs)
    if flagged:
        print(f"canard-hole flagged crossings: {flagged}/{len(Zs)} (|Z| < {hole:.3g})", file=sys.stderr)
    try:
        sig = classify_series(series, geom, sec)
    except NotPeriodic as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    print(f"signature: {sig}")
    if args.compare_pam:
        return _report_match(params, str(sig))
    return EXIT_OK


def _report_match(params: CanonicalParams, observed: str) -> int:
    geom = compute_geometry(params)
    pam = associated_pam(params, geom)
    try:
        predicted = str(detect_signature(iterate_orbit(pam, -0.5)))
    except MmopamError as exc:
        print(f"map prediction unavailable: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    match = predicted == observed
    print(f"map-predicted signature: {predicted}")
    print(f"match: {'true' if match else 'false'}")
    return EXIT_OK


# --------------------------------------------------------------------------
# verify-tables


def cmd_verify_tables(args) -> int:
    reports = verify_all(synthesis_tol=args.synthesis_tol, window_tol=args.window_tol)
    for rep in reports:
        print(rep.summary())
        print()
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump([rep.to_json_obj() for rep in reports], fh, indent=2)
    return EXIT_OK


# --------------------------------------------------------------------------
# crossover


def cmd_crossover(args) -> int:
    rho = RhoSpec("fixed_rational")
    probe = CanonicalParams(0.0, 0.0, 0.0, 0.0, rho)
    geom = compute_geometry(probe)
    grid = max(2, args.grid)
    windows: list[tuple[float, float, str]] = []
    records = []
    for i in range(grid):
        t = i / (grid - 1)
        kappa = args.kappa1 + t * (args.kappa2 - args.kappa1)
        lam = args.lambda1 + t * (args.lambda2 - args.lambda1)
        params = CanonicalParams(args.alpha, args.beta, kappa, lam, rho)
        pam = associated_pam(params, geom)
        try:
            sig = str(detect_signature(iterate_orbit(pam, args.z_init)))
        except MmopamError:
            sig = "(none)"
        records.append((t, kappa, lam, sig, pam.a12))
        if windows and windows[-1][2] == sig:
            windows[-1] = (windows[-1][0], t, sig)
        else:
            windows.append((t, t, sig))
    print(f"scan: {grid} points, kappa {args.kappa1} -> {args.kappa2}, lambda {args.lambda1} -> {args.lambda2}")
    for lo, hi, sig in windows:
        k_lo = args.kappa1 + lo * (args.kappa2 - args.kappa1)
        k_hi = args.kappa1 + hi * (args.kappa2 - args.kappa1)
        print(f"  t in [{lo:.4f}, {hi:.4f}] (kappa {k_lo:.4f}..{k_hi:.4f}): {sig}")
    if args.out_svg:
        ts = [r[0] for r in records]
        periods = [len(r[3].split()) and _period_of(r[3]) for r in records]
        plotting.line_plot([(ts, periods)], args.out_svg, x_label="scan parameter", y_label="pattern period")
    if args.out_csv:
        with open(args.out_csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "kappa", "lambda", "signature", "mu"])
            for t, kappa, lam, sig, mu in records:
                writer.writerow([f"{t:.6f}", repr(kappa), repr(lam), sig, repr(mu)])
    return EXIT_OK


def _period_of(sig_text: str) -> int:
    if sig_text == "(none)":
        return 0
    total = 0
    for part in sig_text.split():
        L, s = part.split("^")
        total += int(L) + int(s)
    return total


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mmopam", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_pam_flags(p):
        p.add_argument("--config", help="JSON config document")
        for name in ("--a11", "--a12", "--a21", "--a22"):
            p.add_argument(name, type=float)

    pam_parser = sub.add_parser("pam", help="piecewise affine map operations")
    pam_sub = pam_parser.add_subparsers(dest="pam_command", required=True)

    p = pam_sub.add_parser("iterate", help="iterate an orbit; optional CSV and cobweb SVG")
    add_pam_flags(p)
    p.add_argument("--z0", type=float, default=-0.5)
    p.add_argument("--max-iters", type=int, default=100_000)
    p.add_argument("--out-csv")
    p.add_argument("--out-svg")
    p.set_defaults(func=cmd_pam_iterate)

    p = pam_sub.add_parser("signature", help="print the detected signature")
    add_pam_flags(p)
    p.add_argument("--z0", type=float, default=-0.5)
    p.add_argument("--max-iters", type=int, default=100_000)
    p.set_defaults(func=cmd_pam_signature)

    p = pam_sub.add_parser("bounds", help="mu-windows for pure patterns, as JSON")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--l", type=float, required=True)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--L", type=int)
    p.add_argument("--s", type=int)
    p.set_defaults(func=cmd_pam_bounds)

    p = pam_sub.add_parser("transform", help="convert between coefficient forms")
    add_pam_flags(p)
    p.add_argument("--inverse", action="store_true")
    for name in ("--a", "--b", "--mu", "--l"):
        p.add_argument(name, type=float)
    p.set_defaults(func=cmd_pam_transform)

    p = sub.add_parser("synth", help="solve for vector-field parameters realizing a map")
    add_pam_flags(p)
    p.add_argument("--rho", choices=["fixed_rational", "quadratic"])
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("simulate", help="full stiff integration or hybrid reduced simulation")
    add_pam_flags(p)
    p.add_argument("--mode", choices=["full", "hybrid"], default="full")
    p.add_argument("--from-pam", action="store_true", help="derive vector-field parameters from map flags")
    for name in ("--alpha", "--beta", "--kappa", "--lam"):
        p.add_argument(name, type=float)
    p.add_argument("--rho", choices=["fixed_rational", "quadratic"])
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--rel-tol", type=float, dest="rel_tol")
    p.add_argument("--abs-tol", type=float, dest="abs_tol")
    p.add_argument("--max-slow-time", type=float, dest="max_slow_time")
    p.add_argument("--x-section", type=float, dest="x_section")
    p.add_argument("--crossings", type=int, default=25)
    p.add_argument("--z-init", type=float, default=-0.5, help="hybrid mode: initial Z")
    p.add_argument("--returns", type=int, default=40, help="hybrid mode: number of returns")
    p.add_argument("--compare-pam", action="store_true")
    p.add_argument("--out-prefix")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify-tables", help="re-derive all bundled benchmark rows")
    p.add_argument("--synthesis-tol", type=float, default=1e-3)
    p.add_argument("--window-tol", type=float, default=1e-4)
    p.add_argument("--json", help="write the machine-readable report here")
    p.set_defaults(func=cmd_verify_tables)

    p = sub.add_parser("crossover", help="scan (kappa, lambda) between two endpoints")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--kappa1", type=float, required=True)
    p.add_argument("--lambda1", type=float, required=True)
    p.add_argument("--kappa2", type=float, required=True)
    p.add_argument("--lambda2", type=float, required=True)
    p.add_argument("--grid", type=int, default=41)
    p.add_argument("--z-init", type=float, default=-0.5)
    p.add_argument("--out-svg")
    p.add_argument("--out-csv")
    p.set_defaults(func=cmd_crossover)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except NotPeriodic as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except MmopamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
