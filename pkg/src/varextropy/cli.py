"""Command line interface.

Exit codes: 0 success, 2 usage or parse error, 3 domain error (degenerate
window, ties, ...), 4 missing calibration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .distributions import parse_distribution
from .empirical import KdeConfig, SampleData, bandwidth, m_rule, read_sample
from .estimators import ESTIMATORS, EstimatorConfig, estimate
from .exceptions import CalibrationRequiredError, DomainError, NoClosedFormError, ParseError
from .measures import (
    ExpFamilySpec,
    Window,
    has_closed_form,
    interval_extropy,
    interval_varextropy,
    iv_lower_bound,
    iv_upper_bound,
)
from .montecarlo import SimulationPlan, resolve_workers, run_study
from .realdata import CANCER_RATE, CANCER_WINDOWS, analyze, load_embedded_dataset
from .uniformity import STATISTICS, UNIFORMITY_KDE, Calibration, calibrate, power_study, test_uniformity

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_CALIBRATION = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


# -- argument helpers ----------------------------------------------------------
def _real(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _positive_real(text: str) -> float:
    value = _real(text)
    if not (value > 0 and math.isfinite(value)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return value


def _count(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer seed: {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _list(conv):
    def parse(text: str):
        items = [t.strip() for t in text.split(",") if t.strip()]
        if not items:
            raise argparse.ArgumentTypeError("empty list")
        return [conv(t) for t in items]

    return parse


def _stat(text: str) -> str:
    token = text.strip().upper()
    if token not in STATISTICS:
        raise argparse.ArgumentTypeError(f"unknown statistic {text!r}; expected {', '.join(STATISTICS)}")
    return token


def _estimator(text: str) -> str:
    if text not in ESTIMATORS:
        raise argparse.ArgumentTypeError(f"unknown estimator {text!r}; expected {', '.join(ESTIMATORS)}")
    return text


def _add_output(p, csv_ok=False):
    group = p.add_mutually_exclusive_group()
    group.add_argument("--json", action="store_true", help="emit a single JSON document")
    if csv_ok:
        group.add_argument("--csv", action="store_true", help="emit CSV (the default)")


def _add_mc(p):
    p.add_argument("--seed", type=_seed, default=0, help="unsigned 64-bit master seed")
    p.add_argument("--workers", type=_count, default=None, help="worker processes (default $IV_WORKERS or 1)")


def _add_fixed_seed(p):
    # deterministic commands take --seed too, so scripts can pass it uniformly
    p.add_argument("--seed", type=_seed, default=0, help="accepted for interface uniformity; output is deterministic")


def _add_kde(p, default_scale):
    p.add_argument("--h", type=_positive_real, default=None, help="fixed bandwidth instead of the 1.06 s n^-1/5 rule")
    p.add_argument(
        "--kernel-scale",
        choices=("support", "sd"),
        default=default_scale,
        help="bandwidth as kernel half-width ('support') or kernel standard deviation ('sd')",
    )


def _kde_config(args) -> KdeConfig:
    return KdeConfig(bandwidth=args.h if args.h is not None else "silverman", kernel_scale=args.kernel_scale)


def _emit_json(doc, out):
    out.write(json.dumps(_clean(doc), indent=2, sort_keys=True, allow_nan=False) + "\n")


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def _num(x: float) -> str:
    return repr(float(x))


def _load_sample(args) -> SampleData:
    sample = read_sample(args.input, args.column)
    jitter = getattr(args, "jitter", None)
    if jitter:
        rng = np.random.default_rng(args.seed)
        sample = SampleData(sample.values + rng.uniform(-jitter, jitter, sample.n))
    return sample


# -- subcommands -------------------------------------------------------------
def cmd_closed_form(args, out):
    model = parse_distribution(args.dist)
    w = Window(args.t1, args.t2)
    method = "closed" if has_closed_form(model) else "quadrature"
    doc = {"dist": model.spec, "t1": w.t1, "t2": w.t2, "method": method}
    if args.measure in ("ij", "both"):
        doc["ij"] = interval_extropy(model, w)
    if args.measure in ("iv", "both"):
        doc["iv"] = interval_varextropy(model, w)
    if args.bounds:
        doc["bounds"] = _bounds(model, w)
    if args.json:
        _emit_json(doc, out)
        return
    if args.measure != "both" and not args.bounds:
        out.write(_num(doc[args.measure]) + "\n")
        return
    for key in ("ij", "iv"):
        if key in doc:
            out.write(f"{key}\t{_num(doc[key])}\n")
    if args.bounds:
        for key in ("lower", "upper"):
            value = doc["bounds"][key]
            text = _num(value) if value is not None else "n/a (" + doc["bounds"][key + "_note"] + ")"
            out.write(f"{key}_bound\t{text}\n")


def _bounds(model, w):
    res = {"lower": None, "upper": None}
    try:
        res["lower"] = iv_lower_bound(model, w)
    except DomainError as exc:
        res["lower_note"] = str(exc)
    try:
        res["upper"] = iv_upper_bound(ExpFamilySpec.for_model(model), model, w)
    except NoClosedFormError:
        res["upper_note"] = "no exponential-family form for this model"
    except DomainError as exc:
        res["upper_note"] = str(exc)
    return res


def _parse_range(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise ParseError(f"--range expects start:stop:count, got {text!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ParseError(f"--range expects start:stop:count, got {text!r}") from None
    if count < 2:
        raise ParseError("--range count must be at least 2")
    return np.linspace(start, stop, count)


def cmd_scan(args, out):
    model = parse_distribution(args.dist)
    name, _, value = args.fix.partition("=")
    if name not in ("t1", "t2") or not value:
        raise ParseError(f"--fix expects t1=<r> or t2=<r>, got {args.fix!r}")
    try:
        fixed = float(value)
    except ValueError:
        raise ParseError(f"--fix value is not a number: {value!r}") from None
    grid = _parse_range(args.range)
    measure = interval_varextropy if args.measure == "iv" else interval_extropy
    rows = []
    for t in grid:
        w = Window(fixed, t) if name == "t1" else Window(t, fixed)
        rows.append((float(t), measure(model, w)))
    if args.json:
        _emit_json({"dist": model.spec, "fixed": {name: fixed}, "measure": args.measure,
                    "rows": [{"t": t, "value": v} for t, v in rows]}, out)
        return
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["t", "value"])
    for t, v in rows:
        writer.writerow([_num(t), _num(v)])


def cmd_estimate(args, out):
    sample = _load_sample(args)
    w = Window(args.t1, args.t2)
    cfg = EstimatorConfig(args.estimator, _kde_config(args), args.m)
    value = estimate(sample, w, cfg)
    doc = {"estimator": args.estimator, "t1": w.t1, "t2": w.t2, "n": sample.n, "value": value}
    if args.estimator == "spacing":
        doc["m"] = args.m if args.m is not None else m_rule(sample.n)
    else:
        doc["h"] = bandwidth(sample, cfg.kde)
    if args.json:
        _emit_json(doc, out)
    else:
        out.write(_num(value) + "\n")


def cmd_simulate(args, out):
    model = parse_distribution(args.dist)
    plan = SimulationPlan(
        model,
        Window(args.t1, args.t2),
        args.sizes,
        args.reps,
        args.estimators,
        args.seed,
        kde=_kde_config(args),
        quad_panels=args.quad_panels,
    )
    report = run_study(plan, args.workers)
    if args.json:
        _emit_json(report.to_dict(), out)
    else:
        out.write(report.to_csv())


def _uniformity_config(args) -> EstimatorConfig:
    return EstimatorConfig(kde=_kde_config(args), m_override=getattr(args, "m", None))


def cmd_critvals(args, out):
    cal = calibrate(args.stat, args.n, args.alpha, args.reps, args.seed, _uniformity_config(args), args.workers)
    if args.output:
        cal.save(args.output)
    if args.json:
        _emit_json({"seed": args.seed, "reps": args.reps, "rows": [
            {"stat": k, "n": n, "alpha": float(a), "critical": c} for k, n, a, c in cal.rows()]}, out)
    else:
        out.write(cal.to_csv())


def cmd_power(args, out):
    cal = Calibration.load(args.calibration) if args.calibration else None
    report = power_study(
        args.stat, args.alt, args.n, args.alpha, args.reps, args.seed, cal,
        _uniformity_config(args), args.workers, args.calibration_reps,
    )
    if args.json:
        _emit_json(report.to_dict(), out)
    else:
        out.write(report.to_csv())


def cmd_test(args, out):
    if not args.calibration:
        raise CalibrationRequiredError("test needs --calibration (produce one with critvals)")
    cal = Calibration.load(args.calibration)
    sample = _load_sample(args)
    decision = test_uniformity(args.stat, sample, args.alpha, cal, _uniformity_config(args))
    if args.json:
        _emit_json(decision.to_dict(), out)
    else:
        verdict = "reject" if decision.reject else "accept"
        out.write(f"{decision.statistic}={_num(decision.statistic_value)} critical={_num(decision.critical_value)} "
                  f"alpha={decision.alpha:g} n={decision.n}: {verdict}\n")


def _parse_windows(text):
    windows = []
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        parts = chunk.split(",")
        if len(parts) != 2:
            raise ParseError(f"bad window {chunk!r}; expected t1,t2")
        try:
            windows.append(Window(float(parts[0]), float(parts[1])))
        except ValueError as exc:
            if isinstance(exc, DomainError):
                raise
            raise ParseError(f"bad window {chunk!r}") from None
    if not windows:
        raise ParseError("no windows given")
    return windows


def cmd_analyze(args, out):
    if args.input:
        sample = read_sample(args.input, args.column)
        source = str(args.input)
    else:
        sample = load_embedded_dataset()
        source = "embedded:cancer"
    windows = _parse_windows(args.windows) if args.windows else [Window(*w) for w in CANCER_WINDOWS]
    results = analyze(sample, windows, args.rate)
    if args.json:
        _emit_json({"source": source, "n": sample.n, "lambda": args.rate,
                    "windows": [r.to_dict() for r in results]}, out)
        return
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["t1", "t2", "spacing", "kde-integral", "kde-plugin", "model_iv_closed", "model_iv_numeric"])
    for r in results:
        writer.writerow([_num(r.t1), _num(r.t2)] + [
            _num(r.estimates[k]) if k in r.estimates else "nan" for k in ESTIMATORS
        ] + [_num(r.model_closed), _num(r.model_numeric)])


# -- parser --------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="varextropy", description="Interval extropy and varextropy toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("closed-form", help="exact IV / IJ of a model over a window")
    p.add_argument("--dist", required=True, help="e.g. exp:rate=1, pareto1:a=1,b=2, squarecdf, example5")
    p.add_argument("--t1", type=_real, required=True)
    p.add_argument("--t2", type=_real, required=True)
    p.add_argument("--measure", choices=("iv", "ij", "both"), default="both")
    p.add_argument("--bounds", action="store_true", help="also report the lower and upper IV bounds")
    _add_output(p)
    _add_fixed_seed(p)
    p.set_defaults(func=cmd_closed_form)

    p = sub.add_parser("scan", help="IV (or IJ) along a line of windows, CSV t,value")
    p.add_argument("--dist", required=True)
    p.add_argument("--fix", required=True, help="t1=<r> or t2=<r>")
    p.add_argument("--range", required=True, help="start:stop:count for the free endpoint")
    p.add_argument("--measure", choices=("iv", "ij"), default="iv")
    _add_output(p, csv_ok=True)
    _add_fixed_seed(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("estimate", help="estimate IV from a sample file")
    p.add_argument("--estimator", type=_estimator, required=True, help=", ".join(ESTIMATORS))
    p.add_argument("--t1", type=_real, required=True)
    p.add_argument("--t2", type=_real, required=True)
    p.add_argument("--input", type=Path, required=True, help="one value per line, or CSV with --column")
    p.add_argument("--column", default=None, help="CSV column name or 0-based index")
    p.add_argument("--m", type=_count, default=None, help="spacing order (default round(sqrt(n)))")
    p.add_argument("--jitter", type=_positive_real, default=None, help="add uniform noise in [-eps, eps]")
    p.add_argument("--seed", type=_seed, default=0, help="seed for --jitter")
    _add_kde(p, "support")
    _add_output(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("simulate", help="Monte Carlo bias / MSE of the estimators")
    p.add_argument("--dist", required=True)
    p.add_argument("--t1", type=_real, required=True)
    p.add_argument("--t2", type=_real, required=True)
    p.add_argument("--sizes", type=_list(_count), default=[10, 20, 30, 40, 50, 100])
    p.add_argument("--reps", type=_count, default=10_000)
    p.add_argument("--estimators", type=_list(_estimator), default=list(ESTIMATORS))
    p.add_argument("--quad-panels", type=_count, default=2048)
    _add_kde(p, "support")
    _add_mc(p)
    _add_output(p, csv_ok=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("critvals", help="Monte Carlo critical values, CSV stat,n,alpha,critical")
    p.add_argument("--stat", type=_list(_stat), default=list(STATISTICS))
    p.add_argument("--n", type=_list(_count), required=True)
    p.add_argument("--alpha", type=_list(_real), default=[0.05])
    p.add_argument("--reps", type=_count, default=100_000)
    p.add_argument("--m", type=_count, default=None, help="spacing order for GV")
    p.add_argument("--output", type=Path, default=None, help="also write the calibration CSV here")
    _add_kde(p, UNIFORMITY_KDE.kernel_scale)
    _add_mc(p)
    _add_output(p, csv_ok=True)
    p.set_defaults(func=cmd_critvals)

    p = sub.add_parser("power", help="power of the uniformity tests against alternatives")
    p.add_argument("--alt", type=_list(str), required=True, help="e.g. A1.5,A2,B1.5,B2,B3,C1.5,C2,U")
    p.add_argument("--stat", type=_list(_stat), default=list(STATISTICS))
    p.add_argument("--n", type=_list(_count), required=True)
    p.add_argument("--alpha", type=_real, default=0.05)
    p.add_argument("--reps", type=_count, default=100_000)
    p.add_argument("--calibration", type=Path, default=None,
                   help="calibration CSV; without it critical values are simulated first")
    p.add_argument("--calibration-reps", type=_count, default=None)
    p.add_argument("--m", type=_count, default=None, help="spacing order for GV")
    _add_kde(p, UNIFORMITY_KDE.kernel_scale)
    _add_mc(p)
    _add_output(p, csv_ok=True)
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("test", help="test a sample for uniformity on [0, 1]")
    p.add_argument("--stat", type=_stat, default="GD")
    p.add_argument("--alpha", type=_real, default=0.05)
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--column", default=None)
    p.add_argument("--calibration", type=Path, default=None)
    p.add_argument("--m", type=_count, default=None, help="spacing order for GV")
    _add_kde(p, UNIFORMITY_KDE.kernel_scale)
    _add_mc(p)
    _add_output(p)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("analyze", help="windowed estimates on a data set next to an exponential model")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--input", type=Path, default=None)
    src.add_argument("--embedded", choices=("cancer",), default="cancer")
    p.add_argument("--column", default=None)
    p.add_argument("--windows", default=None, help='e.g. "1,7;1,13;2,10"')
    p.add_argument("--lambda", dest="rate", type=_positive_real, default=CANCER_RATE)
    _add_output(p, csv_ok=True)
    _add_fixed_seed(p)
    p.set_defaults(func=cmd_analyze)
    return parser


def dispatch(argv=None, out=None, err=None) -> int:
    """Run the CLI and return its exit code."""
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "workers", None) is None and hasattr(args, "workers"):
            args.workers = resolve_workers(None)
        buf = io.StringIO()
        args.func(args, buf)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except ParseError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    except CalibrationRequiredError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_CALIBRATION
    except DomainError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_DOMAIN
    except ValueError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    out.write(buf.getvalue())
    return EXIT_OK


def main(argv=None) -> None:
    sys.exit(dispatch(argv))


if __name__ == "__main__":
    main()
