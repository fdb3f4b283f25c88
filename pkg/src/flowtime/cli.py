"""Command-line surface: discover, fit, express, reduce, evaluate, simulate,
whatif, serve.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
File outputs are written atomically (temp file + rename). JSON goes to
stdout for machine consumption; human-readable durations are formatted
as ``3d 1h 42m 5s``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from typing import Sequence

import numpy as np

from . import __version__
from .errors import DataError, FlowtimeError, NumericError
from .eventlog import load_event_log, trace_durations
from .gmm import FitConfig
from .discovery import SemiMarkovFlow, discover, fit_edge_distributions, fit_edges_as_point_masses
from .express import mean_execution_time
from .reduction import ReductionConfig, TotalTimePDF, reduce_flow, simulate
from .evaluation import bin_log, bin_model, default_edges, kl_divergence, uniform_baseline
from .whatif import Scenario, apply_scenario

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".flowtime-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_json(path: str, payload: dict) -> None:
    _atomic_write(path, json.dumps(payload, indent=2) + "\n")


def _load_model(path: str) -> SemiMarkovFlow:
    with open(path, "r", encoding="utf-8") as fh:
        return SemiMarkovFlow.from_dict(json.load(fh))


def _load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _print(payload: dict) -> None:
    print(json.dumps(payload, indent=2))


def _ensure_fitted(flow: SemiMarkovFlow, point_mass: bool, cfg: FitConfig) -> SemiMarkovFlow:
    if all(m.fitted is not None for m in flow.edge_times.values()):
        return flow
    if point_mass:
        return fit_edges_as_point_masses(flow)
    if any(m.samples for m in flow.edge_times.values()):
        return fit_edge_distributions(flow, cfg)
    return fit_edges_as_point_masses(flow)


def _curve_csv(pdf: TotalTimePDF, points: int, max_hours: float | None) -> str:
    hi = max_hours if max_hours is not None else pdf.truncated.support_hint()
    grid = np.linspace(0.0, hi, points)
    density = pdf.truncated.density(grid)
    lines = ["t_hours,density"]
    lines.extend(f"{t:.9g},{d:.9g}" for t, d in zip(grid, density))
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="flowtime", description=__doc__)
    parser.add_argument("--version", action="version", version=f"flowtime {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("discover", help="discover a k-order flow from a CSV log")
    p.add_argument("--log", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--round-hours", action="store_true")
    p.add_argument("--no-samples", action="store_true", help="do not embed raw samples")
    p.add_argument("--out", required=True)

    p = sub.add_parser("fit", help="fit GMM waiting-time models to a model's samples")
    p.add_argument("--model", required=True)
    p.add_argument("--bandwidth", type=float, default=4.0)
    p.add_argument("--max-components", type=int, default=10)
    p.add_argument("--out", required=True)

    p = sub.add_parser("express", help="limiting probabilities and mean execution time")
    p.add_argument("model_pos", nargs="?", metavar="MODEL")
    p.add_argument("--model", dest="model_flag")

    p = sub.add_parser("reduce", help="full analysis: total-time PDF by state elimination")
    p.add_argument("model_pos", nargs="?", metavar="MODEL")
    p.add_argument("--model", dest="model_flag")
    p.add_argument("--threshold", type=float, default=0.001)
    p.add_argument("--jmax", type=int, default=64)
    p.add_argument("--pointmass", action="store_true",
                   help="use point masses at edge means instead of fitted GMMs")
    p.add_argument("--curve", help="also write a density curve CSV here")
    p.add_argument("--curve-points", type=int, default=512)
    p.add_argument("--curve-max-hours", type=float)
    p.add_argument("--out", help="write the total-time PDF JSON here (default: stdout)")

    p = sub.add_parser("evaluate", help="KL divergence of log vs reduced model")
    p.add_argument("--log", required=True)
    p.add_argument("--pdf", required=True, help="TotalTimePDF JSON from `reduce`")
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--max-hours", type=float, default=1000.0)
    p.add_argument("--csv", help="also write both binned vectors as CSV here")

    p = sub.add_parser("simulate", help="Monte-Carlo walks of the model")
    p.add_argument("--model", required=True)
    p.add_argument("--runs", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)

    p = sub.add_parser("whatif", help="apply a scenario and recompute the analysis")
    p.add_argument("--model", required=True)
    p.add_argument("--scenario", required=True)
    p.add_argument("--full", action="store_true", help="also run the full analysis")
    p.add_argument("--threshold", type=float, default=0.001)

    p = sub.add_parser("serve", help="run the HTTP service for the companion UI")
    p.add_argument("--model", required=True)
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")

    return parser


def _cmd_discover(args) -> int:
    log = load_event_log(args.log)
    flow = discover(log, args.k, round_hours=args.round_hours)
    _write_json(args.out, flow.to_dict(include_samples=not args.no_samples))
    print(f"discovered {flow.n_states()} states, {flow.n_transitions()} transitions -> {args.out}")
    return EXIT_OK


def _cmd_fit(args) -> int:
    flow = _load_model(args.model)
    if not any(m.samples for m in flow.edge_times.values()):
        raise DataError(
            "model carries no raw samples; rediscover without --no-samples to enable fitting"
        )
    cfg = FitConfig(bandwidth=args.bandwidth, max_components=args.max_components)
    fitted = fit_edge_distributions(flow, cfg)
    _write_json(args.out, fitted.to_dict())
    print(f"fitted {fitted.n_transitions()} edges -> {args.out}")
    return EXIT_OK


def _model_path(args) -> str:
    path = args.model_flag or args.model_pos
    if not path:
        raise DataError("a model path is required (positional or --model)")
    return path


def _cmd_express(args) -> int:
    flow = _load_model(_model_path(args))
    report = mean_execution_time(flow)
    _print(report.to_dict(flow))
    return EXIT_OK


def _cmd_reduce(args) -> int:
    flow = _load_model(_model_path(args))
    flow = _ensure_fitted(flow, args.pointmass, FitConfig())
    cfg = ReductionConfig(threshold=args.threshold, j_max=args.jmax)
    pdf = reduce_flow(flow, cfg)
    if args.curve:
        _atomic_write(args.curve, _curve_csv(pdf, args.curve_points, args.curve_max_hours))
    if args.out:
        _write_json(args.out, pdf.to_dict())
        print(
            f"reduced to {len(pdf.mixture)} components "
            f"(mean {pdf.mixture.mean():.4f} h, mass {pdf.mass_check:.6f}) -> {args.out}"
        )
    else:
        _print(pdf.to_dict())
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    log = load_event_log(args.log)
    pdf = TotalTimePDF.from_dict(_load_json(args.pdf))
    edges = default_edges(args.bins, args.max_hours)
    durations = trace_durations(log, "hours-rounded")
    L = bin_log(durations, edges)
    M = bin_model(pdf, edges)
    mean_h = float(np.mean(trace_durations(log, "seconds"))) / 3600.0
    baseline = uniform_baseline(mean_h, edges)
    result = {
        "kl": kl_divergence(L, M),
        "baseline_kl": kl_divergence(L, baseline),
        "excluded_fraction_log": L.excluded_fraction,
    }
    if args.csv:
        lines = ["bin_lo,bin_hi,log_mass,model_mass"]
        for i in range(len(L.masses)):
            lines.append(
                f"{edges[i]:.9g},{edges[i + 1]:.9g},{L.masses[i]:.9g},{M.masses[i]:.9g}"
            )
        _atomic_write(args.csv, "\n".join(lines) + "\n")
    _print(result)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    flow = _load_model(args.model)
    flow = _ensure_fitted(flow, point_mass=False, cfg=FitConfig())
    durations = simulate(flow, args.runs, args.seed)
    _print(
        {
            "runs": args.runs,
            "seed": args.seed,
            "mean_hours": float(durations.mean()),
            "std_hours": float(durations.std()),
            "min_hours": float(durations.min()),
            "max_hours": float(durations.max()),
        }
    )
    return EXIT_OK


def _cmd_whatif(args) -> int:
    flow = _load_model(args.model)
    scenario = Scenario.from_dict(_load_json(args.scenario))
    edited = apply_scenario(flow, scenario)
    baseline_report = mean_execution_time(flow)
    scenario_report = mean_execution_time(edited)
    payload = {
        "baseline": baseline_report.to_dict(flow),
        "scenario": scenario_report.to_dict(edited),
    }
    if args.full:
        cfg = ReductionConfig(threshold=args.threshold)
        fit_cfg = FitConfig()
        for name, f in (("baseline", flow), ("scenario", edited)):
            pdf = reduce_flow(_ensure_fitted(f, False, fit_cfg), cfg)
            grid = np.linspace(0.0, pdf.truncated.support_hint(), 512)
            payload[f"{name}_pdf"] = {
                "mass_check": pdf.mass_check,
                "mean_hours": pdf.mixture.mean(),
                "curve": {
                    "t_hours": [float(t) for t in grid],
                    "density": [float(d) for d in pdf.truncated.density(grid)],
                },
            }
    _print(payload)
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(_load_model(args.model))
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


_COMMANDS = {
    "discover": _cmd_discover,
    "fit": _cmd_fit,
    "express": _cmd_express,
    "reduce": _cmd_reduce,
    "evaluate": _cmd_evaluate,
    "simulate": _cmd_simulate,
    "whatif": _cmd_whatif,
    "serve": _cmd_serve,
}


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return EXIT_DATA
    except (json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: bad input: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except FlowtimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main() -> None:
    raise SystemExit(run())
