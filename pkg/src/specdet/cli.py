"""Command-line front end for specdet.

Subcommands: ``det`` (determinant of I + lambda*T), ``trace``,
``norm-profile``, ``radius`` and ``compare``.  Every subcommand reads one
JSON operator spec (see :mod:`specdet.specfile`), computes along the series
path, the brute-force oracle path, or both, and emits a text or JSON report
on stdout.  Exit codes: 0 success, 2 parse/validation error, 3 feasibility
refusal, 4 non-converged series under ``--mode series``.  In JSON mode
errors go to stderr as one-line JSON objects.

Floats in JSON reports are rounded to 12 significant digits, which makes
reports byte-stable across runs of the same build.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .bundles import bundle_trace, bundle_trace_source, bundle_determinant, flatten_symbol
from .errors import (
    FeasibilityError,
    SpecParseError,
    SpecValidationError,
    SpecdetError,
)
from .invariant import (
    block_trace,
    block_trace_source,
    invariant_determinant,
    manifold_determinant,
    spectral_trace_source,
)
from .lattice import lattice_determinant, lattice_trace, truncation_trace_source
from .linalg import mat_trace
from .oracle import (
    assemble_truncation,
    block_determinant_product,
    bundle_determinant_product,
    direct_determinant,
    spectral_determinant_product,
)
from .plemelj import DetResult, radius_estimate
from .specfile import build_operator, parse_spec
from .toroidal import growth_verdict, norm_growth_profile, poincare_norm, toroidal_determinant, toroidal_matrix

__all__ = ["run_command", "main"]


# ---------------------------------------------------------------------------
# report rendering
# ---------------------------------------------------------------------------

def _num(x):
    """Round to 12 significant digits; infinities become strings."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0.0:
        return 0.0
    return float(f"{x:.12g}")


def _cpx(z) -> list:
    z = complex(z)
    return [_num(z.real), _num(z.imag)]


def _round_tree(value):
    if isinstance(value, dict):
        return {k: _round_tree(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round_tree(v) for v in value]
    if isinstance(value, bool) or isinstance(value, (str, int)) or value is None:
        return value
    if isinstance(value, complex):
        return _cpx(value)
    if isinstance(value, float):
        return _num(value)
    return str(value)


def _det_json(r: DetResult) -> dict:
    return {
        "value": _cpx(r.value),
        "terms": [_cpx(t) for t in r.terms],
        "order_used": r.order_used,
        "cutoff_used": r.cutoff_used,
        "tail_estimate": _num(r.tail_estimate),
        "converged": r.converged,
        "diagnostics": _round_tree(r.diagnostics),
    }


def _deviation(series: complex, oracle: complex) -> dict:
    abs_dev = abs(series - oracle)
    return {
        "abs": _num(abs_dev),
        "rel": _num(abs_dev / max(1.0, abs(oracle))),
    }


def _emit_json(report: dict, stream):
    stream.write(json.dumps(report, sort_keys=True) + "\n")


def _fmt_complex(pair) -> str:
    re, im = pair
    sign = "+" if (isinstance(im, str) or im >= 0) else "-"
    mag = im if isinstance(im, str) else abs(im)
    return f"{re} {sign} {mag}i"


def _emit_text(report: dict, stream):
    cmd = report.get("command", "?")
    stream.write(f"specdet {cmd}: {report.get('label') or report.get('input')}"
                 f" ({report.get('kind')})\n")
    for key in ("lambda", "order", "cutoff", "tol", "mode"):
        if key in report and report[key] is not None:
            val = report[key]
            if key == "lambda":
                val = _fmt_complex(val)
            stream.write(f"  {key:<12} = {val}\n")
    series = report.get("series")
    if series:
        stream.write(f"  value        = {_fmt_complex(series['value'])}\n")
        stream.write(f"  converged    = {series['converged']}"
                     f"   order_used = {series['order_used']}"
                     f"   tail ~ {series['tail_estimate']}\n")
        warnings = series.get("diagnostics", {}).get("warnings", [])
        for w in warnings:
            stream.write(f"  warning: {w}\n")
        stream.write("  terms:\n")
        for i, t in enumerate(series["terms"], start=1):
            stream.write(f"    m={i:<3d} {_fmt_complex(t)}\n")
    for key in ("oracle_value", "series_value", "trace", "oracle_trace", "radius",
                "verdict"):
        if key in report and report[key] is not None:
            val = report[key]
            if isinstance(val, list) and len(val) == 2 and not isinstance(val[0], list):
                val = _fmt_complex(val)
            stream.write(f"  {key:<12} = {val}\n")
    if report.get("oracle") is not None:
        stream.write(f"  oracle_value = {_fmt_complex(report['oracle']['value'])}\n")
    for key in ("deviation",):
        if report.get(key) is not None:
            stream.write(f"  deviation    = abs {report[key]['abs']}, "
                         f"rel {report[key]['rel']}\n")
    for key in ("abs_deviation", "rel_deviation"):
        if key in report:
            stream.write(f"  {key:<13}= {report[key]}\n")
    if "points" in report:
        stream.write("  cutoff, norm:\n")
        for r, v in report["points"]:
            stream.write(f"    {r:>6d}  {v}\n")


# ---------------------------------------------------------------------------
# computation dispatch
# ---------------------------------------------------------------------------

def _series_det(spec, op, lam, order, cutoff, tol) -> DetResult:
    kind = spec.kind
    if kind == "lattice_kernel":
        return lattice_determinant(op, lam, order=order, cutoff=cutoff, tol=tol)
    if kind == "toroidal_symbol":
        return toroidal_determinant(op, lam, order=order, cutoff=cutoff, tol=tol)
    if kind == "block_symbol":
        return invariant_determinant(op, lam, order=order, tol=tol)
    if kind == "spectral_model":
        return manifold_determinant(op, spec.params["alpha"], lam, order=order,
                                    tol=tol,
                                    manifold_dim=spec.params.get("manifold_dim"))
    return bundle_determinant(op, lam, order=order, tol=tol)


def _oracle_det(spec, op, lam, cutoff) -> complex:
    kind = spec.kind
    if kind == "lattice_kernel":
        return direct_determinant(assemble_truncation(op, cutoff), lam)
    if kind == "toroidal_symbol":
        return direct_determinant(assemble_truncation(toroidal_matrix(op, cutoff),
                                                      cutoff), lam)
    if kind == "block_symbol":
        return block_determinant_product(op, lam)
    if kind == "spectral_model":
        return spectral_determinant_product(op, spec.params["alpha"], lam)
    return bundle_determinant_product(op, lam)


def _series_trace(spec, op, cutoff) -> complex:
    kind = spec.kind
    if kind == "lattice_kernel":
        return lattice_trace(op, cutoff)
    if kind == "toroidal_symbol":
        return lattice_trace(toroidal_matrix(op, cutoff), cutoff)
    if kind == "block_symbol":
        return block_trace(op)
    if kind == "spectral_model":
        return spectral_trace_source(op, spec.params["alpha"]).trace_power(1)
    return bundle_trace(op)


def _oracle_trace(spec, op, cutoff) -> complex:
    kind = spec.kind
    if kind == "lattice_kernel":
        return mat_trace(assemble_truncation(op, cutoff))
    if kind == "toroidal_symbol":
        return mat_trace(assemble_truncation(toroidal_matrix(op, cutoff), cutoff))
    if kind == "block_symbol":
        acc = 0.0j
        for b in op.blocks:
            for i in range(b.rows):
                acc += b.at(i, i)
        return acc
    if kind == "spectral_model":
        alpha = spec.params["alpha"]
        acc = 0.0
        for j in range(op.level_count):
            acc += int(op.multiplicities[j]) * (
                1.0 + float(op.eigenvalues[j])) ** (-alpha / op.nu)
        return complex(acc)
    acc = 0.0j
    for xi, d in op.dual.blocks:
        acc += d * mat_trace(flatten_symbol(op, xi))
    return acc


def _trace_source(spec, op, cutoff):
    kind = spec.kind
    if kind == "lattice_kernel":
        return truncation_trace_source(op, cutoff)
    if kind == "toroidal_symbol":
        return truncation_trace_source(toroidal_matrix(op, cutoff), cutoff)
    if kind == "block_symbol":
        return block_trace_source(op)
    if kind == "spectral_model":
        return spectral_trace_source(op, spec.params["alpha"])
    return bundle_trace_source(op)


def _profile_cutoffs(cutoff: int) -> list:
    return sorted({max(1, cutoff >> s) for s in range(5)})


def _dispatch(args, spec, op):
    lam = args.lam
    base = {
        "command": args.command,
        "input": args.input,
        "kind": spec.kind,
        "label": spec.label,
    }
    if args.command == "det":
        report = dict(base, **{"lambda": _cpx(lam), "order": args.order,
                               "cutoff": args.cutoff, "tol": _num(args.tol),
                               "mode": args.mode, "series": None,
                               "oracle": None, "deviation": None})
        code = 0
        series = None
        if args.mode in ("series", "both"):
            series = _series_det(spec, op, lam, args.order, args.cutoff, args.tol)
            report["series"] = _det_json(series)
        if args.mode in ("oracle", "both"):
            oracle = _oracle_det(spec, op, lam, args.cutoff)
            report["oracle"] = {"value": _cpx(oracle)}
            if series is not None:
                report["deviation"] = _deviation(series.value, oracle)
        if args.mode == "series" and series is not None and not series.converged:
            code = 4
        return report, code

    if args.command == "compare":
        series = _series_det(spec, op, lam, args.order, args.cutoff, args.tol)
        oracle = _oracle_det(spec, op, lam, args.cutoff)
        dev = _deviation(series.value, oracle)
        report = dict(base, **{
            "lambda": _cpx(lam), "order": args.order, "cutoff": args.cutoff,
            "tol": _num(args.tol),
            "series_value": _cpx(series.value),
            "oracle_value": _cpx(oracle),
            "abs_deviation": dev["abs"],
            "rel_deviation": dev["rel"],
            "converged": series.converged,
            "order_used": series.order_used,
        })
        return report, 0

    if args.command == "trace":
        report = dict(base, cutoff=args.cutoff, mode=args.mode,
                      trace=None, oracle_trace=None, deviation=None)
        series = oracle = None
        if args.mode in ("series", "both"):
            series = _series_trace(spec, op, args.cutoff)
            report["trace"] = _cpx(series)
        if args.mode in ("oracle", "both"):
            oracle = _oracle_trace(spec, op, args.cutoff)
            report["oracle_trace"] = _cpx(oracle)
        if series is not None and oracle is not None:
            report["deviation"] = _deviation(series, oracle)
        return report, 0

    if args.command == "radius":
        src = _trace_source(spec, op, args.cutoff)
        estimate = radius_estimate(src, args.order)
        report = dict(base, order=args.order, cutoff=args.cutoff,
                      radius=_num(estimate))
        return report, 0

    # norm-profile
    if spec.kind == "toroidal_symbol":
        profile = norm_growth_profile(op, _profile_cutoffs(args.cutoff))
    elif spec.kind == "lattice_kernel":
        points = [(r, poincare_norm(op, r)) for r in _profile_cutoffs(args.cutoff)]
        profile = growth_verdict(points)
    else:
        raise SpecValidationError(
            f"norm-profile applies to lattice_kernel or toroidal_symbol specs, "
            f"not {spec.kind}", field="kind")
    report = dict(base, cutoff=args.cutoff,
                  cutoffs=[r for r, _ in profile.points],
                  points=[[r, _num(v)] for r, v in profile.points],
                  increments=[_num(v) for v in profile.increments],
                  verdict=profile.verdict)
    return report, 0


# ---------------------------------------------------------------------------
# argument parsing and entry point
# ---------------------------------------------------------------------------

def _parse_lambda(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(
        f"expected RE or RE,IM for --lambda, got {text!r}"
    )


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", required=True, help="operator spec file (JSON)")
    common.add_argument("--lambda", dest="lam", type=_parse_lambda,
                        default=complex(0.1, 0.0), metavar="RE,IM",
                        help="evaluation point (default 0.1,0)")
    common.add_argument("--order", type=int, default=30,
                        help="series truncation order (default 30)")
    common.add_argument("--cutoff", type=int, default=8,
                        help="truncation box radius (default 8)")
    common.add_argument("--tol", type=float, default=1e-10,
                        help="series tolerance (default 1e-10)")
    common.add_argument("--mode", choices=("series", "oracle", "both"),
                        default="both", help="computation route (default both)")
    common.add_argument("--output", choices=("json", "text"), default="text",
                        help="report format (default text)")

    parser = argparse.ArgumentParser(
        prog="specdet",
        description="Determinants and traces of operators given by symbols "
                    "and kernels, with brute-force oracle cross-checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("det", parents=[common],
                   help="determinant of I + lambda*T")
    sub.add_parser("trace", parents=[common], help="trace of T")
    sub.add_parser("norm-profile", parents=[common],
                   help="summed-entry norm growth across cutoffs")
    sub.add_parser("radius", parents=[common],
                   help="root-test estimate of the series radius")
    sub.add_parser("compare", parents=[common],
                   help="series vs oracle determinant deviation")
    return parser


def _emit_error(kind: str, exc: Exception, args, stderr):
    payload = {"error": kind, "message": str(exc)}
    fld = getattr(exc, "field", None)
    if fld is not None:
        payload["field"] = fld
    if args is not None and getattr(args, "output", "text") == "json":
        stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    else:
        loc = f" [{fld}]" if fld else ""
        stderr.write(f"specdet: {kind} error{loc}: {exc}\n")


def run_command(argv=None, stdout=None, stderr=None) -> int:
    """Run one CLI invocation; returns the process exit code."""
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        spec = parse_spec(args.input)
        op = build_operator(spec)
        report, code = _dispatch(args, spec, op)
    except SpecParseError as exc:
        _emit_error("parse", exc, args, stderr)
        return 2
    except SpecValidationError as exc:
        _emit_error("validation", exc, args, stderr)
        return 2
    except FeasibilityError as exc:
        _emit_error("feasibility", exc, args, stderr)
        return 3
    except OSError as exc:
        _emit_error("io", exc, args, stderr)
        return 2
    except SpecdetError as exc:
        _emit_error("computation", exc, args, stderr)
        return 2
    if args.output == "json":
        _emit_json(report, stdout)
    else:
        _emit_text(report, stdout)
    return code


def main() -> None:
    sys.exit(run_command())
