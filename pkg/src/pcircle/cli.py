"""Command-line interface: ``pcircle <command> [options]``.

Every command emits a table (CSV by default, or JSON with the layout
``{command, params, columns, rows, summary}``).  Options can also come from
a ``key = value`` file given with ``--config``; flags on the command line win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .errors import (DomainError, EvaluationError, InsufficientDataError,
                     InvariantViolation, NonConvergenceError, PathRefusedError,
                     QuadratureError)
from .genbessel import (SERIES_ARG_LIMIT, GenBesselParams, gen_bessel_integral,
                        gen_bessel_series)
from .hardy import (DEFAULT_WINDOW, THREADS_ENV, HardySumConfig, convergence_trace,
                    decay_envelope, default_threads, linear_schedule)
from .numkernel import QuadratureSpec, SeriesControl
from .pgeom import PExponent, enumerate_shells, error_term_direct, p_norm

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_NONCONVERGENCE = 3
EXIT_INVARIANT = 4

# per-command defaults; None means the option is required
_OPTIONAL = object()
DEFAULTS: Dict[str, Dict[str, Any]] = {
    "count": {"q": None, "r": None},
    "bessel": {"q": None, "omega": 0.0, "x": None, "path": "auto",
               "tail_tol": 1e-17, "max_terms": 400, "rel_tol": 1e-12},
    "shells": {"q": None, "s_max": None},
    "hardy": {"q": None, "r": None, "s_max": _OPTIONAL, "schedule": _OPTIONAL,
              "window": DEFAULT_WINDOW, "checkpoints": 64},
    "verify": {"filter": "", "fast": False},
    "decay": {"q": None, "phi": math.pi / 4, "r_min": 50.0, "r_max": 400.0,
              "points": 20000},
}
COMMON = {"format": "csv", "out": None, "threads": None}


@dataclass
class RunConfig:
    command: str
    options: Dict[str, Any]
    fmt: str = "csv"
    out: Optional[str] = None
    threads: int = 1


@dataclass
class Report:
    command: str
    params: Dict[str, Any]
    columns: List[str]
    rows: List[List[Any]] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# Argument handling


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _schedule(text):
    try:
        vals = [float(t) for t in str(text).replace(";", ",").split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad schedule {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty schedule")
    return vals


def _common(sp):
    sp.add_argument("--format", choices=("csv", "json"), default=None,
                    help="output format (default csv)")
    sp.add_argument("--out", default=None, help="output path (default stdout)")
    sp.add_argument("--config", default=None, help="key = value file mirroring the flags")
    sp.add_argument("--threads", type=_positive_int, default=None,
                    help=f"worker threads (default ${THREADS_ENV} or 1)")


def build_parser() -> argparse.ArgumentParser:
    epilog = (f"environment:\n  {THREADS_ENV}  default thread count when --threads "
              f"is not given\n\nexit codes: 0 ok, 1 verification failed, 2 usage, "
              f"3 non-convergence, 4 invariant violation")
    parser = argparse.ArgumentParser(
        prog="pcircle", epilog=epilog,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        description="Lattice points in p-circles with 2/p = q a positive integer.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("count", help="lattice count, area and error term",
                        epilog=epilog, formatter_class=argparse.RawDescriptionHelpFormatter)
    sp.add_argument("--q", type=_positive_int)
    sp.add_argument("--r", type=float)
    _common(sp)

    sp = sub.add_parser("bessel", help="evaluate J_omega^[p](x)",
                        epilog=epilog, formatter_class=argparse.RawDescriptionHelpFormatter)
    sp.add_argument("--q", type=_positive_int)
    sp.add_argument("--omega", type=float)
    sp.add_argument("--x", type=float, nargs=2, metavar=("X1", "X2"))
    sp.add_argument("--path", choices=("series", "integral", "auto"))
    sp.add_argument("--tail-tol", type=float)
    sp.add_argument("--max-terms", type=_positive_int)
    sp.add_argument("--rel-tol", type=float)
    _common(sp)

    sp = sub.add_parser("shells", help="shells |n1|^p + |n2|^p = s with distorted angles",
                        epilog=epilog, formatter_class=argparse.RawDescriptionHelpFormatter)
    sp.add_argument("--q", type=_positive_int)
    sp.add_argument("--s-max", type=float)
    _common(sp)

    sp = sub.add_parser("hardy", help="partial sums of the generalized Hardy identity",
                        epilog=epilog, formatter_class=argparse.RawDescriptionHelpFormatter)
    sp.add_argument("--q", type=_positive_int)
    sp.add_argument("--r", type=float)
    sp.add_argument("--s-max", type=float)
    sp.add_argument("--schedule", type=_schedule, help="comma-separated checkpoints")
    sp.add_argument("--window", type=_positive_int, help="checkpoints in the tail average")
    sp.add_argument("--checkpoints", type=_positive_int,
                    help="number of evenly spaced checkpoints without --schedule")
    _common(sp)

    sp = sub.add_parser("verify", help="run the self-check suites",
                        epilog=epilog, formatter_class=argparse.RawDescriptionHelpFormatter)
    sp.add_argument("--filter", help="only suites whose name contains this text")
    sp.add_argument("--fast", action="store_true", default=None, help="reduced grids")
    _common(sp)

    sp = sub.add_parser("decay", help="envelope maxima of the order-zero radial function",
                        epilog=epilog, formatter_class=argparse.RawDescriptionHelpFormatter)
    sp.add_argument("--q", type=_positive_int)
    sp.add_argument("--phi", type=float)
    sp.add_argument("--r-min", type=float)
    sp.add_argument("--r-max", type=float)
    sp.add_argument("--points", type=_positive_int)
    _common(sp)
    return parser


def read_config(path: str) -> Dict[str, str]:
    """Parse ``key = value`` lines; '#' starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{n}: expected key = value")
            key, val = (t.strip() for t in line.split("=", 1))
            out[key.lstrip("-").replace("-", "_")] = val
    return out


def _coerce(key: str, text: str, default: Any):
    if key == "x":
        parts = text.replace(",", " ").split()
        if len(parts) != 2:
            raise UsageError("x needs two values")
        return [float(t) for t in parts]
    if key == "schedule":
        return _schedule(text)
    if key in ("q", "window", "points", "max_terms", "checkpoints", "threads"):
        v = int(text)
        if v < 1:
            raise UsageError(f"{key} must be a positive integer")
        return v
    if key == "fast":
        low = text.lower()
        if low not in ("1", "0", "true", "false", "yes", "no"):
            raise UsageError(f"bad boolean for fast: {text!r}")
        return low in ("1", "true", "yes")
    if isinstance(default, float) or key in ("r", "s_max", "omega", "phi", "r_min",
                                             "r_max", "tail_tol", "rel_tol"):
        return float(text)
    return text


def resolve(ns: argparse.Namespace) -> RunConfig:
    """Merge flags over config file over defaults."""
    cmd = ns.command
    defaults = dict(DEFAULTS[cmd])
    file_vals = read_config(ns.config) if ns.config else {}
    merged: Dict[str, Any] = {}
    for key in list(defaults) + list(COMMON):
        flag = getattr(ns, key, None)
        if flag is not None:
            merged[key] = flag
        elif key in file_vals:
            try:
                merged[key] = _coerce(key, file_vals[key], defaults.get(key, COMMON.get(key)))
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise UsageError(f"config value for {key}: {exc}")
        else:
            merged[key] = defaults.get(key, COMMON.get(key))
    unknown = set(file_vals) - set(defaults) - set(COMMON)
    if unknown:
        raise UsageError(f"unknown config keys for {cmd}: {', '.join(sorted(unknown))}")
    missing = [k for k in defaults if merged[k] is None and defaults[k] is None]
    if missing:
        raise UsageError("missing required option(s): "
                         + ", ".join("--" + k.replace("_", "-") for k in missing))
    for k in defaults:
        if merged[k] is _OPTIONAL:
            merged[k] = None
    fmt = merged.pop("format")
    if fmt not in ("csv", "json"):
        raise UsageError("format must be csv or json")
    out = merged.pop("out")
    threads = merged.pop("threads")
    if threads is None:
        threads = default_threads()
    return RunConfig(cmd, merged, fmt, out, threads)


# --------------------------------------------------------------------------
# Commands


def _pexp(q: int) -> PExponent:
    return PExponent(int(q))


def cmd_count(cfg: RunConfig) -> Report:
    o = cfg.options
    et = error_term_direct(_pexp(o["q"]), o["r"])
    if et.near_boundary:
        _warn(f"lattice point within {et.min_gap:.3g} of the curve; count is "
              f"sensitive to the radius")
    return Report("count", {"q": o["q"], "r": o["r"]},
                  ["q", "r", "count", "area", "error_term", "near_boundary"],
                  [[o["q"], o["r"], et.count, et.area, et.value, et.near_boundary]])


def cmd_bessel(cfg: RunConfig) -> Report:
    o = cfg.options
    params = GenBesselParams(_pexp(o["q"]), o["omega"])
    x = tuple(o["x"])
    mode = o["path"]
    if mode not in ("series", "integral", "auto"):
        raise UsageError("path must be series, integral or auto")
    if mode == "auto":
        mode = "series" if p_norm(x, params.p) <= SERIES_ARG_LIMIT else "integral"
    if mode == "series":
        ctrl = SeriesControl(max_terms=o["max_terms"], tail_tol=o["tail_tol"])
        ev = gen_bessel_series(params, x, ctrl, full_output=True)
    else:
        ev = gen_bessel_integral(params, x, QuadratureSpec(rel_tol=o["rel_tol"]),
                                 full_output=True)
    return Report("bessel", {"q": o["q"], "omega": o["omega"], "x": list(x), "path": o["path"]},
                  ["q", "omega", "x1", "x2", "value", "path", "error", "terms_used"],
                  [[o["q"], o["omega"], x[0], x[1], ev.value, ev.path, ev.error,
                    ev.terms_used]])


def cmd_shells(cfg: RunConfig) -> Report:
    o = cfg.options
    if not o["s_max"] >= 1:
        raise UsageError("s_max must be >= 1")
    shells = enumerate_shells(_pexp(o["q"]), o["s_max"])
    rows = []
    worst = 0
    for sh in shells:
        bound = sh.bound
        if sh.multiplicity > bound:
            raise InvariantViolation(
                f"shell s={sh.s!r} has {sh.multiplicity} points, above the bound {bound}")
        worst = max(worst, sh.multiplicity)
        rows.append([sh.s, sh.multiplicity, bound, sorted(sh.angles)])
    return Report("shells", {"q": o["q"], "s_max": o["s_max"]},
                  ["s", "multiplicity", "bound", "angles"], rows,
                  {"shells": len(rows), "max_multiplicity": worst})


def cmd_hardy(cfg: RunConfig) -> Report:
    o = cfg.options
    pe = _pexp(o["q"])
    if o["schedule"] is None and o["s_max"] is None:
        raise UsageError("hardy needs --s-max or --schedule")
    if o["schedule"] is not None:
        sched = sorted(set(o["schedule"]))
        s_max = sched[-1]
    else:
        s_max = o["s_max"]
        sched = linear_schedule(s_max, o["checkpoints"]) if s_max >= 1 else [s_max]
    hc = HardySumConfig(pe, o["r"], s_max, threads=cfg.threads)
    tr = convergence_trace(hc, sched, o["window"])
    if tr.near_boundary:
        _warn(f"r={o['r']!r} is close to a lattice point on the curve; the direct "
              f"count jumps there")
    rows = [[c.s_max, c.partial_sum, c.direct_error_term, c.residual, c.envelope,
             tr.tail_average] for c in tr.checkpoints]
    params = {"q": o["q"], "r": o["r"], "s_max": s_max, "schedule": sched,
              "window": o["window"]}
    summary = {"tail_average": tr.tail_average, "tail_residual": tr.tail_residual,
               "direct_error_term": tr.direct_error_term, "near_boundary": tr.near_boundary,
               "shells": tr.shells, "points": tr.points}
    return Report("hardy", params,
                  ["checkpoint", "partial_sum", "direct_error_term", "residual",
                   "envelope", "tail_average"], rows, summary)


def cmd_verify(cfg: RunConfig) -> Report:
    from .verify import run_suites

    o = cfg.options
    try:
        results = run_suites(o["filter"], bool(o["fast"]), cfg.threads)
    except KeyError as exc:
        raise UsageError(str(exc.args[0]))
    rows = [[c.suite, c.check, c.status, c.measured, c.tolerance] for c in results]
    failed = sum(not c.passed for c in results)
    return Report("verify", {"filter": o["filter"], "fast": bool(o["fast"])},
                  ["suite", "check", "status", "measured", "tolerance"], rows,
                  {"checks": len(rows), "passed": len(rows) - failed, "failed": failed})


def cmd_decay(cfg: RunConfig) -> Report:
    o = cfg.options
    if not 0 < o["r_min"] < o["r_max"] or o["points"] < 3:
        raise UsageError("need 0 < r-min < r-max and at least 3 points")
    grid = np.linspace(o["r_min"], o["r_max"], o["points"])
    fit = decay_envelope(_pexp(o["q"]), o["phi"], grid)
    rows = [[float(r), float(v)] for r, v in zip(fit.r_peaks, fit.peaks)]
    params = {k: o[k] for k in ("q", "phi", "r_min", "r_max", "points")}
    return Report("decay", params, ["r_peak", "envelope"], rows,
                  {"slope": fit.slope, "intercept": fit.intercept, "maxima": len(rows)})


COMMANDS = {"count": cmd_count, "bessel": cmd_bessel, "shells": cmd_shells,
            "hardy": cmd_hardy, "verify": cmd_verify, "decay": cmd_decay}


# --------------------------------------------------------------------------
# Output


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, (list, tuple)):
        return ";".join(_cell(t) for t in v)
    return str(v)


def render(report: Report, fmt: str) -> str:
    if fmt == "json":
        doc = {"command": report.command, "params": report.params,
               "columns": report.columns,
               "rows": [dict(zip(report.columns, r)) for r in report.rows],
               "summary": report.summary}
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(report.columns)
    for r in report.rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def _warn(msg: str) -> None:
    print(f"pcircle: warning: {msg}", file=sys.stderr)


def _fail(msg: str, code: int) -> int:
    print(f"pcircle: error: {msg}", file=sys.stderr)
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve(ns)
        report = COMMANDS[cfg.command](cfg)
    except (UsageError, DomainError, PathRefusedError, OSError) as exc:
        return _fail(str(exc), EXIT_USAGE)
    except EvaluationError as exc:
        return _fail(f"{exc} (shell s={exc.s!r}, phi={exc.phi!r})", EXIT_NONCONVERGENCE)
    except (NonConvergenceError, QuadratureError, InsufficientDataError) as exc:
        return _fail(str(exc), EXIT_NONCONVERGENCE)
    except InvariantViolation as exc:
        return _fail(str(exc), EXIT_INVARIANT)
    text = render(report, cfg.fmt)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if report.command == "verify" and report.summary["failed"]:
        return EXIT_VERIFY_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
