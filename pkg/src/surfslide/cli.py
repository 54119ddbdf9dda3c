"""Command-line front end.

Subcommands
-----------
solve
    Run one scenario (builtin name or file path), print a result record as
    JSON, optionally write the per-iteration CSV trace and cross-check the
    distance against the lattice oracle.
sweep
    Re-solve a scenario over a list of lambda0 values or over seeded random
    initializations and report the distance spread.
bench
    Drive a seeded random walk of small rigid perturbations of E2, solving
    each step cold (center-line start) and warm (previous step's closest
    points), and compare iteration counts.
list
    Print the builtin scenarios.

Exit codes: 0 converged, 2 max-iter, 3 lambda-floor, 4 input error,
5 overlap during bench, 6 contact, 7 overlap.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
import time
from dataclasses import dataclass, field

from .contact import analyze as contact_analyze
from .geometry import SurfaceParam, implicit_value
from .oracle import OverlapSuspectedError, oracle_min_distance
from .scenarios import (
    Scenario,
    ScenarioFormatError,
    builtin_scenarios,
    load_scenario,
)
from .slider import SolverConfig, solve

EXIT_CONVERGED = 0
EXIT_MAX_ITER = 2
EXIT_LAMBDA_FLOOR = 3
EXIT_INPUT = 4
EXIT_BENCH_OVERLAP = 5
EXIT_CONTACT = 6
EXIT_OVERLAP = 7

_STATUS_EXIT = {
    "converged": EXIT_CONVERGED,
    "max-iter": EXIT_MAX_ITER,
    "lambda-floor": EXIT_LAMBDA_FLOOR,
    "contact": EXIT_CONTACT,
    "overlap": EXIT_OVERLAP,
}

TRACE_COLUMNS = (
    "k,theta1,phi1,theta2,phi2,distance,lambda1,lambda2,eps_d,eps_n,overshoot"
)


class CliError(Exception):
    """Input-level failure mapped to exit code 4."""


def _g17(x: float) -> str:
    """17 significant digits: enough to round-trip any double exactly."""
    return f"{x:.17g}"


@dataclass
class ResultRecord:
    """One solve, serialized loss-free (floats survive a JSON round trip)."""

    scenario: str
    status: str
    distance: float
    params1: tuple[float, float]
    params2: tuple[float, float]
    closest_points: list[list[float]]
    normals: list[list[float]]
    iterations: int
    final_eps: dict
    wall_time_s: float
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        doc = {
            "scenario": self.scenario,
            "status": self.status,
            "distance": self.distance,
            "params1": list(self.params1),
            "params2": list(self.params2),
            "closest_points": self.closest_points,
            "normals": self.normals,
            "iterations": self.iterations,
            "final_eps": self.final_eps,
            "wall_time_s": self.wall_time_s,
        }
        doc.update(self.extra)
        return doc


def _record_from_result(name: str, res, wall: float) -> ResultRecord:
    p1, p2 = res.params
    eps_d, eps_n, eps_lam = res.final_eps
    return ResultRecord(
        scenario=name,
        status=res.status,
        distance=res.distance,
        params1=(p1.theta, p1.phi),
        params2=(p2.theta, p2.phi),
        closest_points=[[float(v) for v in p] for p in res.closest_points],
        normals=[[float(v) for v in n] for n in res.normals],
        iterations=res.iterations,
        final_eps={"eps_d": eps_d, "eps_n": eps_n, "eps_lambda": eps_lam},
        wall_time_s=wall,
    )


def write_trace(path: str, trace) -> None:
    lines = [TRACE_COLUMNS]
    for r in trace:
        eps_d = "nan" if r.eps_d is None else _g17(r.eps_d)
        eps_n = "nan" if r.eps_n is None else _g17(r.eps_n)
        lines.append(
            ",".join(
                (
                    str(r.k),
                    _g17(r.theta1),
                    _g17(r.phi1),
                    _g17(r.theta2),
                    _g17(r.phi2),
                    _g17(r.distance),
                    _g17(r.lambda1),
                    _g17(r.lambda2),
                    eps_d,
                    eps_n,
                    "1" if r.overshoot_flag else "0",
                )
            )
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# argument plumbing


class _Parser(argparse.ArgumentParser):
    """argparse with input errors mapped to exit code 4."""

    def error(self, message):
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lambda0", type=float, default=None, metavar="X")
    p.add_argument("--max-iter", type=int, default=None, metavar="N")
    p.add_argument("--tol-d", type=float, default=None, metavar="X")
    p.add_argument("--tol-n", type=float, default=None, metavar="X")
    p.add_argument("--tol-lambda", type=float, default=None, metavar="X")
    p.add_argument("--mode", choices=("accept", "revert"), default=None)


def build_parser() -> _Parser:
    parser = _Parser(prog="surfslide", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[], help="solve one scenario")
    p.add_argument("scenario", help="builtin name or scenario file path")
    p.add_argument("--trace", metavar="FILE", default=None)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--json", action="store_true")
    _add_config_flags(p)

    p = sub.add_parser("sweep", help="sweep lambda0 or random initializations")
    p.add_argument("scenario")
    p.add_argument("--param", choices=("lambda0", "init-seed"), required=True)
    p.add_argument("--values", default=None, metavar="X,Y,...")
    p.add_argument("--count", type=int, default=8, metavar="N")
    p.add_argument("--seed", type=int, default=0, metavar="N")
    p.add_argument("--json", action="store_true")
    _add_config_flags(p)

    p = sub.add_parser("bench", help="warm vs cold solves under perturbation")
    p.add_argument("scenario")
    p.add_argument("--steps", type=int, default=1000, metavar="N")
    p.add_argument("--perturbation", type=float, default=1e-3, metavar="X")
    p.add_argument("--seed", type=int, default=0, metavar="N")
    p.add_argument("--json", action="store_true")
    _add_config_flags(p)

    sub.add_parser("list", help="print the builtin scenarios")
    return parser


def resolve_scenario(ref: str) -> Scenario:
    for sc in builtin_scenarios():
        if sc.name == ref:
            return sc
    try:
        return load_scenario(ref)
    except FileNotFoundError:
        raise CliError(
            f"unknown scenario {ref!r}: not a builtin and not a readable file"
        ) from None
    except OSError as exc:
        raise CliError(f"cannot read {ref!r}: {exc}") from exc
    except ScenarioFormatError as exc:
        raise CliError(str(exc)) from exc


def build_config(sc: Scenario, args, record_trace: bool = False) -> SolverConfig:
    """Defaults, then scenario overrides, then command-line flags."""
    overrides = dict(sc.config_overrides or {})
    for attr, key in (
        ("lambda0", "lambda0"),
        ("max_iter", "max_iter"),
        ("tol_d", "tol_d"),
        ("tol_n", "tol_n"),
        ("tol_lambda", "tol_lambda"),
    ):
        v = getattr(args, attr, None)
        if v is not None:
            overrides[key] = v
    mode = getattr(args, "mode", None)
    if mode is not None:
        overrides["overshoot_mode"] = (
            "accept-and-continue" if mode == "accept" else "revert-and-retry"
        )
    overrides["record_trace"] = record_trace
    try:
        return SolverConfig(**overrides)
    except (TypeError, ValueError) as exc:
        raise CliError(f"invalid solver configuration: {exc}") from exc


# ---------------------------------------------------------------------------
# subcommands


def cmd_solve(args) -> int:
    sc = resolve_scenario(args.scenario)
    config = build_config(sc, args, record_trace=args.trace is not None)
    t0 = time.perf_counter()
    res = solve(sc.e1, sc.e2, sc.init, config)
    wall = time.perf_counter() - t0
    if args.trace is not None:
        write_trace(args.trace, res.trace)
    record = _record_from_result(sc.name, res, wall)
    exit_code = _STATUS_EXIT[res.status]
    # converged states can still interpenetrate (spurious stationary pairs
    # on overlapping bodies), so classify by interiority as well as status
    P1, P2 = res.closest_points
    interpenetrating = (
        implicit_value(sc.e2, P1) < 0.0 and implicit_value(sc.e1, P2) < 0.0
    )
    if res.status in ("contact", "overlap") or interpenetrating:
        report = contact_analyze(sc.e1, sc.e2, config, sc.init)
        signed = report.distance_or_depth
        if report.kind == "overlapping":
            signed = -signed
            exit_code = EXIT_OVERLAP
        elif report.kind == "in-contact":
            exit_code = EXIT_CONTACT
        record.extra["contact_kind"] = report.kind
        record.extra["contact_value"] = signed
    if args.verify:
        try:
            oracle_d, _ = oracle_min_distance(sc.e1, sc.e2)
            record.extra["oracle_distance"] = oracle_d
            record.extra["oracle_gap"] = abs(res.distance - oracle_d)
        except OverlapSuspectedError as exc:
            record.extra["oracle_distance"] = None
            record.extra["oracle_error"] = str(exc)
    if sc.expected is not None:
        record.extra["expected_distance"] = sc.expected[0]
    print(json.dumps(record.to_dict(), indent=2))
    return exit_code


def _random_init(rng: random.Random) -> tuple[SurfaceParam, SurfaceParam]:
    return (
        SurfaceParam(rng.uniform(0.0, 2.0 * math.pi), rng.uniform(0.0, math.pi)),
        SurfaceParam(rng.uniform(0.0, 2.0 * math.pi), rng.uniform(0.0, math.pi)),
    )


def cmd_sweep(args) -> int:
    sc = resolve_scenario(args.scenario)
    base = build_config(sc, args)

    runs: list[tuple[str, SolverConfig, object]] = []
    if args.param == "lambda0":
        if args.values is None:
            raise CliError("--param lambda0 requires --values X,Y,...")
        try:
            values = [float(v) for v in args.values.split(",") if v]
        except ValueError as exc:
            raise CliError(f"bad --values list: {exc}") from exc
        if not values:
            raise CliError("--values list is empty")
        for v in values:
            try:
                cfg = SolverConfig(**{**_config_dict(base), "lambda0": v})
            except ValueError as exc:
                raise CliError(f"invalid lambda0 {v!r}: {exc}") from exc
            runs.append((f"lambda0={v:g}", cfg, sc.init))
    else:
        if args.count < 1:
            raise CliError("--count must be >= 1")
        rng = random.Random(args.seed)
        for i in range(args.count):
            runs.append((f"init-seed={args.seed}/{i}", base, _random_init(rng)))

    records = []
    worst = EXIT_CONVERGED
    for label, cfg, init in runs:
        t0 = time.perf_counter()
        res = solve(sc.e1, sc.e2, init, cfg)
        wall = time.perf_counter() - t0
        rec = _record_from_result(sc.name, res, wall)
        rec.extra["run"] = label
        records.append(rec)
        worst = max(worst, _STATUS_EXIT[res.status])

    distances = [r.distance for r in records if r.status == "converged"]
    spread = (max(distances) - min(distances)) if distances else math.nan

    if args.json:
        print(
            json.dumps(
                {
                    "scenario": sc.name,
                    "runs": [r.to_dict() for r in records],
                    "distance_spread": spread,
                },
                indent=2,
            )
        )
    else:
        print(f"{'run':24s} {'status':12s} {'iterations':>10s} {'distance':>22s}")
        for r in records:
            print(
                f"{r.extra['run']:24s} {r.status:12s} {r.iterations:10d} "
                f"{_g17(r.distance):>22s}"
            )
        print(f"distance spread: {_g17(spread)}")
    return worst


def _config_dict(cfg: SolverConfig) -> dict:
    return {
        "lambda0": cfg.lambda0,
        "max_iter": cfg.max_iter,
        "tol_d": cfg.tol_d,
        "tol_n": cfg.tol_n,
        "tol_lambda": cfg.tol_lambda,
        "lambda_floor": cfg.lambda_floor,
        "overshoot_mode": cfg.overshoot_mode,
        "contact_sigma": cfg.contact_sigma,
        "record_trace": cfg.record_trace,
    }


def _separated(e1, e2, res) -> bool:
    """True when a solve result describes a genuinely separated pair."""
    if res.status in ("contact", "overlap"):
        return False
    P1, P2 = res.closest_points
    return not (implicit_value(e2, P1) < 0.0 and implicit_value(e1, P2) < 0.0)


def _perturbed(e2, rng: random.Random, magnitude: float):
    center = tuple(c + rng.uniform(-magnitude, magnitude) for c in e2.center)
    euler = tuple(a + rng.uniform(-magnitude, magnitude) for a in e2.euler)
    return type(e2)(e2.semi_axes, center, euler)


def cmd_bench(args) -> int:
    sc = resolve_scenario(args.scenario)
    config = build_config(sc, args)
    if args.steps < 0:
        raise CliError("--steps must be >= 0")
    if args.perturbation < 0.0:
        raise CliError("--perturbation must be >= 0")

    report = {
        "scenario": sc.name,
        "steps": args.steps,
        "perturbation": args.perturbation,
        "seed": args.seed,
    }
    if args.steps == 0:
        print(json.dumps(report, indent=2))
        return EXIT_CONVERGED

    rng = random.Random(args.seed)
    base = solve(sc.e1, sc.e2, sc.init, config)
    if not _separated(sc.e1, sc.e2, base):
        print("bench: initial configuration is not separated", file=sys.stderr)
        return EXIT_BENCH_OVERLAP
    warm_init = base.params

    e2 = sc.e2
    cold_iters = warm_iters = 0
    cold_time = warm_time = 0.0
    max_gap = 0.0
    for step in range(args.steps):
        e2 = _perturbed(e2, rng, args.perturbation)

        t0 = time.perf_counter()
        cold = solve(sc.e1, e2, None, config)
        cold_time += time.perf_counter() - t0

        t0 = time.perf_counter()
        warm = solve(sc.e1, e2, warm_init, config)
        warm_time += time.perf_counter() - t0

        if not (_separated(sc.e1, e2, cold) and _separated(sc.e1, e2, warm)):
            print(
                f"bench: perturbation drove the pair into contact/overlap "
                f"at step {step}",
                file=sys.stderr,
            )
            return EXIT_BENCH_OVERLAP

        gap = abs(cold.distance - warm.distance)
        max_gap = max(max_gap, gap)
        if gap > 1e-8:
            print(
                f"bench: warm/cold distance mismatch {gap:.3e} at step {step}",
                file=sys.stderr,
            )
            return 1
        cold_iters += cold.iterations
        warm_iters += warm.iterations
        warm_init = warm.params

    report.update(
        {
            "cold_mean_iterations": cold_iters / args.steps,
            "warm_mean_iterations": warm_iters / args.steps,
            "cold_mean_wall_s": cold_time / args.steps,
            "warm_mean_wall_s": warm_time / args.steps,
            "max_distance_gap": max_gap,
        }
    )
    print(json.dumps(report, indent=2))
    return EXIT_CONVERGED


def cmd_list(_args) -> int:
    for sc in builtin_scenarios():
        expected = ""
        if sc.expected is not None:
            expected = f"  expected={sc.expected[0]:g} ({sc.expected[1]})"
        print(f"{sc.name:20s}{expected}")
    return EXIT_CONVERGED


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = {
        "solve": cmd_solve,
        "sweep": cmd_sweep,
        "bench": cmd_bench,
        "list": cmd_list,
    }[args.command]
    try:
        return handler(args)
    except CliError as exc:
        print(f"surfslide: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"surfslide: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
