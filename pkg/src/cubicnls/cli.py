"""Command-line interface.

Subcommands
-----------
standardize    reduce a general cubic system (JSON) to standard parameters
solve          sample a trajectory of the quadratic flow to CSV
fixed-points   fixed points with stability reports, as JSON
profile        sample the space-time profile to CSV

Exit codes: 0 success, 1 malformed input, 2 no coercive conserved form,
3 parameters outside the closed-form catalogue in closed mode.

All CSV output uses 17 significant digits, '.' decimals and LF endings, so
identical inputs (and seeds) give byte-identical files.  The environment
variable NLS_ASY_LOG in {error, info, debug} controls logging verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys

import numpy as np

from .closed_form import UnsupportedCaseError, classify, solve_case
from .profile import FinalData, case1_profile, sync_decay, uapp
from .quadratic_flow import detect_sync, fixed_points, integrate_quad, stability
from .standard_form import GeneralCubic, NonCoerciveError, StandardParams, reduce_to_standard

log = logging.getLogger("cubicnls")

EXIT_OK = 0
EXIT_BAD_INPUT = 1
EXIT_NON_COERCIVE = 2
EXIT_UNSUPPORTED = 3


class _CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _setup_logging() -> None:
    level = os.environ.get("NLS_ASY_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(level=levels.get(level, logging.ERROR), format="%(levelname)s %(message)s")


def _read_text(source: str) -> str:
    if os.path.exists(source):
        with open(source) as fh:
            return fh.read()
    return source


def _load_params(source: str) -> StandardParams:
    try:
        return StandardParams.from_json(_read_text(source))
    except Exception as exc:
        raise _CliError(EXIT_BAD_INPUT, f"cannot parse standard parameters: {exc}") from exc


def _write(out_path: str | None, text: str) -> None:
    if out_path:
        with open(out_path, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(header: str, rows) -> str:
    lines = [header]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# subcommands


def cmd_standardize(args) -> int:
    try:
        g = GeneralCubic.from_json(_read_text(args.input))
    except Exception as exc:
        raise _CliError(EXIT_BAD_INPUT, f"cannot parse general system: {exc}") from exc
    try:
        params, trace = reduce_to_standard(g)
    except NonCoerciveError as exc:
        raise _CliError(EXIT_NON_COERCIVE, str(exc)) from exc
    doc = {
        "p": list(params.p),
        "q": list(params.q),
        "trace": {
            "mass_form": list(trace.mass_form),
            "linear_change": [list(row) for row in np.asarray(trace.linear_change)],
            "rotation_angle": trace.rotation_angle,
            "component_sign_flip": trace.component_sign_flip,
        },
    }
    _write(args.out, json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


def _parse_floats(text: str, n: int, what: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise _CliError(EXIT_BAD_INPUT, f"cannot parse {what}: {text!r}") from exc
    if len(vals) != n:
        raise _CliError(EXIT_BAD_INPUT, f"{what} needs {n} comma-separated values")
    return vals


def cmd_solve(args) -> int:
    params = _load_params(args.params)
    if args.rho <= 0:
        raise _CliError(EXIT_BAD_INPUT, "rho must be positive")
    s0 = np.array(_parse_floats(args.init, 3, "--init"))
    a, b = _parse_floats(args.span, 2, "--span")
    taus = np.linspace(a, b, args.samples)

    closed = oracle = None
    if args.mode in ("closed", "both"):
        try:
            sol = solve_case(params, args.rho, s0)
        except UnsupportedCaseError as exc:
            raise _CliError(
                EXIT_UNSUPPORTED, f"{exc}; rerun with --mode oracle"
            ) from exc
        closed = sol(taus)
    if args.mode in ("oracle", "both"):
        # the initial state is anchored at tau = 0 (matching the closed
        # forms), so integrate outward to whatever the span requires
        states = np.empty((len(taus), 3))
        for sgn in (1.0, -1.0):
            sel = taus * sgn >= 0
            if not np.any(sel):
                continue
            lim = float(np.max(sgn * taus[sel]))
            tr = integrate_quad(params, args.rho, s0, (0.0, sgn * lim), tol=args.tol)
            states[sel] = tr.at(taus[sel])
        oracle = states

    main_states = closed if closed is not None else oracle
    if args.mode == "both":
        dev = np.max(np.abs(closed - oracle), axis=1)
        rows = [(t, *st, d) for t, st, d in zip(taus, main_states, dev)]
        text = _csv("tau,D,R,I,deviation", rows)
    else:
        rows = [(t, *st) for t, st in zip(taus, main_states)]
        text = _csv("tau,D,R,I", rows)
    _write(args.out, text)
    return EXIT_OK


def cmd_fixed_points(args) -> int:
    params = _load_params(args.params)
    if args.rho <= 0:
        raise _CliError(EXIT_BAD_INPUT, "rho must be positive")
    fps = fixed_points(params, args.rho)
    entries = []
    for pt in fps.points:
        rep = stability(params, args.rho, pt)
        entries.append(
            {
                "point": [float(v) for v in pt],
                "tangent_form_eigenvalues": list(rep.tangent_form_eigenvalues),
                "classification": rep.classification,
            }
        )
    circles = [
        {
            "center": list(c.center),
            "axis": list(c.axis),
            "radius": c.radius,
            "samples": [[float(v) for v in s] for s in c.samples()],
        }
        for c in fps.circles
    ]
    doc = {"case": classify(params).case, "points": entries, "circles": circles}
    sync = detect_sync(params, args.rho)
    doc["synchronization"] = (
        None
        if sync is None
        else {
            "point": [float(v) for v in sync.point],
            "gamma": [[sync.gamma[0].real, sync.gamma[0].imag], [sync.gamma[1].real, sync.gamma[1].imag]],
        }
    )
    _write(args.out, json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


def _load_finaldata(path: str) -> FinalData:
    try:
        raw = np.genfromtxt(path, delimiter=",", names=True)
        return FinalData(
            raw["xi"],
            raw["re_a1"] + 1j * raw["im_a1"],
            raw["re_a2"] + 1j * raw["im_a2"],
        )
    except Exception as exc:
        raise _CliError(EXIT_BAD_INPUT, f"cannot parse final data CSV: {exc}") from exc


def cmd_profile(args) -> int:
    params = _load_params(args.params)
    fd = _load_finaldata(args.finaldata)
    t_list = [float(v) for v in args.t_list.split(",")]
    xa, xb, xn = _parse_floats(args.x_grid, 3, "--x-grid")
    xs = np.linspace(xa, xb, int(xn))

    rows = []
    worst_rel = 0.0
    for t in t_list:
        for x in xs:
            u1, u2 = uapp(params, fd, t, x)
            rows.append((t, x, u1.real, u1.imag, u2.real, u2.imag))
            if args.special:
                s1, s2 = case1_profile(params.p1, params.q, fd, t, x)
                scale = max(abs(u1), abs(u2))
                worst_rel = max(worst_rel, max(abs(u1 - s1), abs(u2 - s2)) / scale)
    _write(args.out, _csv("t,x,re_u1,im_u1,re_u2,im_u2", rows))
    if args.special:
        sys.stderr.write(f"max relative deviation from the explicit profile: {worst_rel:.3e}\n")
    if args.sync_check:
        sync = detect_sync(params, 1.0)
        if sync is None:
            sys.stderr.write("no synchronization detected\n")
        else:
            xi_lo, xi_hi = fd.xi_grid[0], fd.xi_grid[-1]
            for t in t_list:
                if t > 1.0:
                    val = sync_decay(params, fd, sync.gamma, t, (xi_lo, xi_hi))
                    sys.stderr.write(f"sync observable at t={_fmt(t)}: {_fmt(val)}\n")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cubicnls",
        description="Standard-form reduction, quadratic-flow solutions and "
        "large-time profiles of two-component cubic systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_std = sub.add_parser("standardize", help="reduce a general system to standard parameters")
    p_std.add_argument("input", help="path to, or inline, JSON {\"lambda\": [12 numbers]}")
    p_std.add_argument("--out", default=None)
    p_std.set_defaults(func=cmd_standardize)

    p_solve = sub.add_parser("solve", help="sample a quadratic-flow trajectory to CSV")
    p_solve.add_argument("--params", required=True, help="path or inline JSON {\"p\": [...], \"q\": [...]}")
    p_solve.add_argument("--rho", type=float, required=True)
    p_solve.add_argument("--init", required=True, help="state D,R,I on the sphere at tau = 0")
    p_solve.add_argument("--span", required=True, help="time span a,b (use --span=-1,1 for negative a)")
    p_solve.add_argument("--samples", type=int, default=201)
    p_solve.add_argument("--mode", choices=["closed", "oracle", "both"], default="both")
    p_solve.add_argument("--tol", type=float, default=1e-10)
    p_solve.add_argument("--seed", type=int, default=0, help="seed recorded for reproducibility")
    p_solve.add_argument("--out", default=None)
    p_solve.set_defaults(func=cmd_solve)

    p_fp = sub.add_parser("fixed-points", help="fixed points and stability as JSON")
    p_fp.add_argument("--params", required=True)
    p_fp.add_argument("--rho", type=float, required=True)
    p_fp.add_argument("--out", default=None)
    p_fp.set_defaults(func=cmd_fixed_points)

    p_prof = sub.add_parser("profile", help="sample the space-time profile to CSV")
    p_prof.add_argument("--params", required=True)
    p_prof.add_argument("--finaldata", required=True, help="CSV xi,re_a1,im_a1,re_a2,im_a2")
    p_prof.add_argument("--t-list", required=True, help="comma-separated times")
    p_prof.add_argument("--x-grid", required=True, help="a,b,n for a uniform x grid")
    p_prof.add_argument("--special", action="store_true", help="cross-check the explicit p1-family profile")
    p_prof.add_argument("--sync-check", action="store_true", help="report the synchronization observable")
    p_prof.add_argument("--out", default=None)
    p_prof.set_defaults(func=cmd_profile)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        log.error("%s", exc)
        sys.stderr.write(f"error: {exc}\n")
        return exc.code
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
