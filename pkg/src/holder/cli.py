"""Command-line interface: ``holder <command> [flags]``.

Exit codes: 0 success, 2 input error, 3 plan failure, 4 invariant violation.
Errors are reported as one JSON line on stderr.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .approximators import (
    InvariantViolation,
    MollifierSpec,
    PlanError,
    envelope_params,
    lipschitz_envelope,
    mollify,
    pipeline_vc_to_smooth,
    truncate_compose,
)
from .c0ops import local_coordinate_dependence_check, soft_threshold_map, tensor_mollify
from .calibration import c_pipe, ceilings_for, dumps, load_calibration, run_calibration
from .fixtures import generate, parse_fixture, parse_number
from .funcgrid import (
    GridFunction,
    GridParseError,
    NormSpec,
    load_grid_function,
    save_grid_function,
    vector_norm,
)
from .maps import TruncationMap
from .meanosc import build_cube_stats, bmo_norm, meyers_compare, vmo_profiles
from .modulus import check_admissible, parse_modulus
from .oscillation import (
    classify_vanishing,
    far_profile,
    pair_table,
    seminorm,
    seminorm_scan,
)

EXIT_INPUT, EXIT_PLAN, EXIT_INVARIANT = 2, 3, 4


class InputError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _emit_error("usage", message)
        raise SystemExit(EXIT_INPUT)


def _emit_error(kind: str, message: str, **extra) -> None:
    payload = {"error": kind, "message": " ".join(str(message).split()), **extra}
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _numbers(text: str | None) -> list[float] | None:
    if text is None:
        return None
    try:
        return [parse_number(t) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse number list {text!r}") from exc


def _digest(path) -> str:
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


def _write_json(obj, path) -> None:
    text = json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def _sibling(path, suffix: str) -> Path:
    p = Path(path)
    return p.with_name(p.stem + suffix)


def _report_base(command: str, args, inputs: dict) -> dict:
    return {
        "schema": 1,
        "tool": {"name": "holder", "version": __version__},
        "command": command,
        "inputs": inputs,
    }


def _load_input(args) -> tuple[GridFunction, dict]:
    f = load_grid_function(args.input)
    if getattr(args, "norm_y", None) or getattr(args, "norm_x", None):
        f = f.with_norms(args.norm_y, args.norm_x)
    return f, {"input": {"path": str(args.input), "digest": _digest(args.input)}}


def _load_modulus(args, inputs: dict):
    m = parse_modulus(args.modulus)
    if m.kind == "table" and m.source:
        inputs["modulus_table"] = {"path": m.source, "digest": _digest(m.source)}
    return m


class _Timer:
    def __init__(self, enabled: bool):
        self.enabled = enabled
        self.marks: dict[str, float] = {}
        self._t = time.perf_counter()

    def mark(self, name: str) -> None:
        now = time.perf_counter()
        self.marks[name] = now - self._t
        self._t = now

    def attach(self, report: dict) -> None:
        if self.enabled:
            report["timings"] = self.marks


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_analyze(args) -> int:
    timer = _Timer(args.timings)
    f, inputs = _load_input(args)
    m = _load_modulus(args, inputs)
    cert = check_admissible(m)
    timer.mark("certificate")

    table = pair_table(f, m)
    scan = seminorm_scan(f, m, table)
    thresholds = _numbers(args.thresholds)
    if len(thresholds) != 3 or any(t <= 0 for t in thresholds):
        raise InputError("--thresholds needs three positive values")
    verdict = classify_vanishing(f, m, thresholds, _numbers(args.scales), _numbers(args.far_deltas),
                                 args.band, table=table)
    far_max = far_profile(f, m, _numbers(args.far_deltas), mode="max")
    timer.mark("oscillation")

    stats = build_cube_stats(f, m)
    bmo = bmo_norm(stats)
    vmo = vmo_profiles(stats, kind=f.norms.x) if len(stats.levels) >= 3 else None
    meyers = None
    if cert.dini_finite:
        # calibrated ceilings exist only for the modulus the table was built with
        calib = load_calibration()
        ceilings = ceilings_for(f.dim, calib) if m.literal == calib["modulus"] else None
        meyers = meyers_compare(f, m, cert, stats=stats, semi=scan.value, ceilings=ceilings).as_dict()
    timer.mark("meanosc")

    report = _report_base("analyze", args, inputs)
    report.update({
        "parameters": {
            "modulus": m.literal,
            "norm_y": f.norms.y,
            "norm_x": f.norms.x,
            "band": args.band,
            "thresholds": thresholds,
        },
        "grid": {"origin": f.grid.origin, "spacing": f.grid.spacing, "shape": f.grid.shape, "ycomp": f.m},
        "modulus": cert.as_dict(),
        "seminorm": scan.as_dict(),
        "profiles": {
            "scale": verdict.scale.as_dict(),
            "far_min": verdict.far_profile.as_dict(),
            "far_max": far_max.as_dict(),
        },
        "verdict": verdict.as_dict(),
        "meanosc": {
            "levels": [stats.min_level, stats.max_level],
            "base": stats.base,
            "bmo": bmo,
            "vmo": vmo.as_dict() if vmo is not None else None,
            "build_log": list(stats.build_log),
        },
        "meyers": meyers if meyers is not None else {"skipped": "Dini constant is infinite"},
    })
    timer.attach(report)

    if args.report:
        _write_json(report, args.report)
        _write_csv(_sibling(args.report, ".profile.csv"), ["delta", "value", "pairs"], verdict.scale.rows())
        _write_csv(_sibling(args.report, ".far.csv"), ["delta", "value", "pairs"], verdict.far_profile.rows())
        anchors = [f"anchor_{a}" for a in range(f.dim)]
        _write_csv(_sibling(args.report, ".cubes.csv"), ["level", *anchors, "sidelength", "count", "mean_osc"],
                   stats.rows())
        from .plotting import plot_profiles

        curves = {
            "scale profile": (verdict.scale.scales, verdict.scale.values),
            "far profile (min)": (verdict.far_profile.scales, verdict.far_profile.values),
        }
        if vmo is not None:
            curves["mean oscillation per level"] = (vmo.sidelengths, vmo.level_max)
        plot_profiles(curves, _sibling(args.report, ".svg"), title=f.label or Path(args.input).name)
    else:
        _write_json(report, None)
    return 0


def cmd_approximate(args) -> int:
    timer = _Timer(args.timings)
    f, inputs = _load_input(args)
    m = _load_modulus(args, inputs)
    table = load_calibration()
    result = pipeline_vc_to_smooth(f, m, args.epsilon, c_pipe=c_pipe(table))
    timer.mark("pipeline")
    if args.output:
        save_grid_function(result.approximant, args.output)
    if args.plan:
        _write_json(result.plan.as_dict(), args.plan)
    report = _report_base("approximate", args, inputs)
    report.update({"parameters": {"modulus": m.literal, "epsilon": args.epsilon}, **result.as_dict()})
    timer.attach(report)
    _write_json(report, args.report)
    if not result.within_bound:
        raise InvariantViolation(
            f"measured error {result.errors['seminorm_error']!r} exceeds {result.c_pipe} * epsilon"
        )
    return 0


def _fixture_from_args(args, literal: str) -> GridFunction:
    grid = {
        "lo": parse_number(args.lo) if args.lo is not None else None,
        "hi": parse_number(args.hi) if args.hi is not None else None,
        "spacing": parse_number(args.spacing) if args.spacing is not None else None,
        "dim": args.dim,
    }
    spec = parse_fixture(literal, **grid)
    if spec.family == "random_smooth" and "seed" not in spec.params and args.seed is not None:
        spec = parse_fixture(f"{literal}{',' if ':' in literal else ':'}seed={args.seed}", **grid)
    return generate(replace(spec, norms=NormSpec(args.norm_y or "l2", args.norm_x or "l2")))


def _sweep_rows(args, m):
    sweep = _numbers(args.sweep) or []
    op = args.operator
    rows = []
    if op == "sequence":
        base = parse_fixture(args.fixture)
        if "n" not in base.resolved:
            raise InputError(f"family {base.family!r} has no parameter n to sweep")
        # shared grid: the finest default spacing over the sweep unless given
        if args.spacing is None and sweep and base.family == "appendix_a3":
            args.spacing = repr(1.0 / (4.0 * max(sweep)))
        for n in sweep:
            lit = f"{base.family}:" + ",".join(
                f"{k}={v!r}" for k, v in {**base.params, "n": n}.items())
            fn = _fixture_from_args(args, lit)
            zero = fn.like(np.zeros_like(fn.values))
            rows.append((n, seminorm(fn - zero, m), fn.sup_norm()))
        return rows
    f = _fixture_from_args(args, args.fixture)
    for p in sweep:
        if op == "envelope":
            g = lipschitz_envelope(f, envelope_params(f, m, p))
        elif op == "mollify":
            g = mollify(f, MollifierSpec(p))
        elif op == "soft-threshold":
            g = soft_threshold_map(f, p)
        elif op == "truncate":
            g = truncate_compose(f, TruncationMap(p, f.norms.x))
        elif op == "tensor-mollify":
            g = tensor_mollify(f, p)
        else:  # pipeline
            g = pipeline_vc_to_smooth(f, m, p).approximant
        e = f - g
        rows.append((p, seminorm(e, m), e.sup_norm()))
    return rows


def cmd_convergence(args) -> int:
    timer = _Timer(args.timings)
    inputs: dict = {}
    m = _load_modulus(args, inputs)
    rows = _sweep_rows(args, m)
    timer.mark("sweep")
    _write_csv(args.output, ["parameter", "seminorm_error", "sup_error"], rows)
    from .plotting import plot_convergence

    plot_convergence(rows, _sibling(args.output, ".svg"), parameter=args.operator, title=args.fixture)
    if args.report:
        report = _report_base("convergence", args, inputs)
        report.update({
            "parameters": {"fixture": args.fixture, "operator": args.operator, "modulus": m.literal,
                           "sweep": _numbers(args.sweep) or []},
            "rows": [list(r) for r in rows],
            "outputs": {"curve": {"path": str(args.output), "digest": _digest(args.output)}},
        })
        timer.attach(report)
        _write_json(report, args.report)
    return 0


def cmd_fixtures(args) -> int:
    f = _fixture_from_args(args, args.family)
    save_grid_function(f, args.output)
    return 0


def cmd_c0_threshold(args) -> int:
    f, inputs = _load_input(args)
    g = soft_threshold_map(f, args.r)
    save_grid_function(g, args.output)
    if args.report:
        m = _load_modulus(args, inputs)
        sup = float(np.max(vector_norm(f.values - g.values, f.norms.y)))
        bound = m(args.r) * seminorm(f, m)
        zero = np.array(f.grid.index_of(np.zeros(f.dim)) or ())
        rng = np.random.default_rng(args.seed or 0)
        centers = [tuple(int(rng.integers(0, s)) for s in f.grid.shape) for _ in range(50)]
        loc = local_coordinate_dependence_check(g, args.r, centers) if zero.size else None
        report = _report_base("c0-threshold", args, inputs)
        report.update({
            "parameters": {"r": args.r, "modulus": m.literal},
            "sup_error": sup,
            "sup_bound": bound,
            "sup_bound_ok": sup <= bound * (1 + 1e-12),
            "locality": loc.as_dict() if loc else None,
        })
        _write_json(report, args.report)
    return 0


def cmd_c0_mollify(args) -> int:
    f, inputs = _load_input(args)
    axes = [int(a) for a in _numbers(args.axes)] if args.axes is not None else None
    h = tensor_mollify(f, args.eta, axes)
    save_grid_function(h, args.output)
    if args.report:
        m = _load_modulus(args, inputs)
        s_f, s_h = seminorm(f, m), seminorm(h, m)
        sup = float(np.max(vector_norm(f.values - h.values, f.norms.y)))
        report = _report_base("c0-mollify", args, inputs)
        report.update({
            "parameters": {"eta": args.eta, "axes": axes, "modulus": m.literal},
            "seminorm_input": s_f,
            "seminorm_output": s_h,
            "sup_error": sup,
            "sup_bound": s_f * m(args.eta),
        })
        _write_json(report, args.report)
    return 0


def cmd_calibrate(args) -> int:
    text = dumps(run_calibration())
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="holder", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"holder {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, needs_input=True):
        if needs_input:
            sp.add_argument("--input", required=True, help="grid function file")
        sp.add_argument("--modulus", default="power:0.5", help="power:A, log:c=C or table:path.csv")
        sp.add_argument("--norm-y", choices=["l2", "linf", "l1"], default=None)
        sp.add_argument("--norm-x", choices=["l2", "linf"], default=None)
        sp.add_argument("--report", default=None, help="report JSON path (default: stdout)")
        sp.add_argument("--timings", action="store_true", help="record wall-clock timings in the report")
        sp.add_argument("--seed", type=int, default=None)

    def grid_flags(sp):
        sp.add_argument("--lo", default=None)
        sp.add_argument("--hi", default=None)
        sp.add_argument("--spacing", default=None, help="e.g. 1/64")
        sp.add_argument("--dim", type=int, default=1)

    sp = sub.add_parser("analyze", help="seminorm, profiles, verdicts and mean oscillation")
    common(sp)
    sp.add_argument("--scales", default=None, help="comma-separated scales")
    sp.add_argument("--far-deltas", default=None, help="comma-separated far radii")
    sp.add_argument("--band", type=float, default=0.25)
    sp.add_argument("--thresholds", default="0.1,0.1,0.1", help="small,large,far tolerances")
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("approximate", help="truncate-then-mollify pipeline")
    common(sp)
    sp.add_argument("--epsilon", type=float, required=True)
    sp.add_argument("--output", default=None, help="approximant grid file")
    sp.add_argument("--plan", default=None, help="plan JSON path")
    sp.set_defaults(func=cmd_approximate)

    sp = sub.add_parser("convergence", help="error curve of an operator over a parameter sweep")
    common(sp, needs_input=False)
    grid_flags(sp)
    sp.add_argument("--fixture", required=True, help="fixture literal, e.g. tent:n=1")
    sp.add_argument("--operator", required=True,
                    choices=["envelope", "mollify", "tensor-mollify", "soft-threshold", "truncate",
                             "pipeline", "sequence"])
    sp.add_argument("--sweep", default="", help="comma-separated parameter values")
    sp.add_argument("--output", required=True, help="CSV curve path; the SVG figure is written alongside")
    sp.set_defaults(func=cmd_convergence)

    sp = sub.add_parser("fixtures", help="write a fixture grid function")
    grid_flags(sp)
    sp.add_argument("--family", required=True, help="fixture literal, e.g. appendix_a2:n=1,alpha=0.5")
    sp.add_argument("--norm-y", choices=["l2", "linf", "l1"], default=None)
    sp.add_argument("--norm-x", choices=["l2", "linf"], default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--output", required=True)
    sp.set_defaults(func=cmd_fixtures)

    sp = sub.add_parser("c0-threshold", help="compose with the coordinatewise soft threshold")
    common(sp)
    sp.add_argument("--r", type=float, required=True)
    sp.add_argument("--output", required=True)
    sp.set_defaults(func=cmd_c0_threshold)

    sp = sub.add_parser("c0-mollify", help="separable smoothing along selected axes")
    common(sp)
    sp.add_argument("--eta", type=float, required=True)
    sp.add_argument("--axes", default=None, help="comma-separated axes (default: all)")
    sp.add_argument("--output", required=True)
    sp.set_defaults(func=cmd_c0_mollify)

    sp = sub.add_parser("calibrate", help="regenerate the Meyers calibration table")
    sp.add_argument("--output", default="-")
    sp.set_defaults(func=cmd_calibrate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except GridParseError as exc:
        _emit_error("parse", str(exc), line=exc.line)
        return EXIT_INPUT
    except PlanError as exc:
        _emit_error("plan", str(exc), clause=exc.clause)
        return EXIT_PLAN
    except InvariantViolation as exc:
        _emit_error("invariant", str(exc))
        return EXIT_INVARIANT
    except (ValueError, OSError, KeyError) as exc:
        _emit_error("input", str(exc))
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
