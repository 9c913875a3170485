"""Command-line front end.

Exit codes: 0 on success, 2 for invalid input (message names the violated
bound), 1 for computation errors or a failed ``--verify`` cross-check.
JSON goes to stdout; tabular output goes to ``--out`` as CSV.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import hexagon
from .costmodel import EvacuationOutcome, cost_C, worst_case
from .geometry import DomainError, normalize_angle, reflect_across_axis
from .optimizer import SearchSpec, TraceRow, equalization_report, optimize
from .simulator import SimConfig, SimulationDivergenceError, simulate, validate_symmetry
from .solvers import ParameterError
from .trajectories import REFERENCE_B_CHI, REFERENCE_C, Algo, AlgorithmParams, build_R1, build_R2

VERIFY_TOL = 1e-3
DECIMALS = 6
SWEEP_COLUMNS = (
    "y_rad",
    "exit_angle_rad",
    "phase",
    "closed_form_cost",
    "simulated_cost",
    "meeting_x",
    "meeting_y",
)


class VerificationError(RuntimeError):
    pass


class UsageError(ValueError):
    pass


def _round(obj):
    if isinstance(obj, float):
        return round(obj, DECIMALS) + 0.0 if math.isfinite(obj) else str(obj)
    if isinstance(obj, (np.floating, np.integer)):
        return _round(obj.item())
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def _emit(obj, stream) -> None:
    stream.write(json.dumps(_round(obj), indent=2, sort_keys=False) + "\n")


def _fmt(v) -> str:
    return "" if v is None else f"{v:.{DECIMALS}f}"


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("EVAC_JOBS", "1")))
    except ValueError:
        return 1


def _params(args) -> tuple[Algo, AlgorithmParams]:
    algo = Algo(args.algo)
    if algo is Algo.C:
        base = REFERENCE_C
    elif algo is Algo.B:
        base = AlgorithmParams.for_b(REFERENCE_B_CHI)
    else:
        base = AlgorithmParams()
    chi = base.chi if args.chi is None else args.chi
    phi = base.phi if args.phi is None else args.phi
    lam = base.lam if args.lam is None else args.lam
    p = AlgorithmParams(chi, phi, lam)
    if algo is Algo.B:
        if args.lam is not None:
            raise UsageError("--lambda is fixed to sin(chi)/cos(phi) for algorithm B")
        p = AlgorithmParams.for_b(chi, phi)
    p.validate(algo)
    return algo, p


def _exit_y(args, params: AlgorithmParams) -> tuple[float, bool]:
    """Canonical exit arc and whether it lies on R2's side of the deployment axis."""
    if args.exit_y is not None:
        y = args.exit_y
        if not 0.0 <= y <= math.pi:
            raise DomainError(f"exit y={y} outside [0, pi]")
        return y, False
    rel = normalize_angle(args.exit_angle - params.start_angle)
    if rel <= math.pi:
        return rel, False
    return 2.0 * math.pi - rel, True


def _outcome(y, params, algo, mirrored) -> dict:
    out = cost_C(y, params, algo)
    d = out.to_dict()
    if mirrored:
        m = reflect_across_axis(out.meeting_point, params.start_angle)
        d["meeting_point"] = [m.x, m.y]
        d["exit_angle"] = params.start_angle - y
    return d


def _simulate_total(job) -> float:
    params, algo, angle = job
    return simulate(params, algo, angle, SimConfig(trace=False))[0]


def _check(closed: float, simulated: float, what: str) -> float:
    gap = abs(closed - simulated)
    if not gap <= VERIFY_TOL:
        raise VerificationError(
            f"{what}: closed form {closed:.6f} vs simulated {simulated:.6f} (gap {gap:.3e})"
        )
    return gap


def cmd_eval(args, out) -> None:
    algo, params = _params(args)
    y, mirrored = _exit_y(args, params)
    d = _outcome(y, params, algo, mirrored)
    d["algo"] = algo.value
    if args.verify:
        sim = simulate(params, algo, d["exit_angle"], SimConfig(trace=False))[0]
        d["simulated_cost"] = sim
        d["abs_diff"] = _check(d["total_cost"], sim, f"exit y={y}")
    _emit(d, out)


def sweep_rows(params, algo, points, verify=False, jobs=1) -> list[dict]:
    """Closed-form (and optionally simulated) cost at ``points`` exits evenly spaced on [0, pi]."""
    ys = np.linspace(0.0, math.pi, points)
    outs: list[EvacuationOutcome] = [cost_C(float(y), params, algo) for y in ys]
    sims = [None] * len(outs)
    if verify:
        work = [(params, algo, o.exit_angle) for o in outs]
        if jobs > 1:
            with ProcessPoolExecutor(jobs) as pool:
                sims = list(pool.map(_simulate_total, work, chunksize=32))
        else:
            sims = [_simulate_total(w) for w in work]
    return [
        {
            "y_rad": o.y,
            "exit_angle_rad": o.exit_angle,
            "phase": o.phase,
            "closed_form_cost": o.total_cost,
            "simulated_cost": s,
            "meeting_x": o.meeting_point.x,
            "meeting_y": o.meeting_point.y,
        }
        for o, s in zip(outs, sims)
    ]


def write_sweep_csv(rows, stream) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in rows:
        w.writerow([r["phase"] if c == "phase" else _fmt(r[c]) for c in SWEEP_COLUMNS])


def cmd_sweep(args, out) -> None:
    algo, params = _params(args)
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    rows = sweep_rows(params, algo, args.points, args.verify, args.jobs)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_sweep_csv(rows, fh)
    best = max(rows, key=lambda r: r["closed_form_cost"])
    summary = {
        "algo": algo.value,
        "points": args.points,
        "max_cost": best["closed_form_cost"],
        "argmax_y": best["y_rad"],
        "argmax_y_over_pi": best["y_rad"] / math.pi,
    }
    if args.verify:
        gaps = [
            _check(r["closed_form_cost"], r["simulated_cost"], f"exit y={r['y_rad']:.6f}")
            for r in rows
        ]
        summary["max_abs_diff"] = max(gaps)
    if not args.out:
        buf = io.StringIO()
        write_sweep_csv(rows, buf)
        out.write(buf.getvalue())
        return
    _emit(summary, out)


def cmd_simulate(args, out) -> None:
    algo, params = _params(args)
    y, mirrored = _exit_y(args, params)
    angle = params.start_angle - y if mirrored else params.start_angle + y
    cfg = SimConfig(dt=args.dt, trace=True)
    total, trace = simulate(params, algo, angle, cfg)
    if args.trace_out:
        with open(args.trace_out, "w") as fh:
            fh.write(trace.to_jsonl())
    d = {
        "algo": algo.value,
        "y": y,
        "exit_angle": angle,
        "total_cost": total,
        "finder": trace.finder,
        "stepped_time": trace.stepped_time,
        "max_step": trace.max_step,
        "events": [e.to_dict() for e in trace.events],
    }
    if args.verify:
        closed = cost_C(y, params, algo).total_cost
        d["closed_form_cost"] = closed
        d["abs_diff"] = _check(closed, total, f"exit y={y}")
    _emit(d, out)


def cmd_optimize(args, out) -> None:
    kw = dict(grid=args.grid, points=args.points, jobs=args.jobs)
    if args.family == "B":
        spec = SearchSpec.b_family(phi=args.phi or 0.0, **kw)
    else:
        spec = SearchSpec(chi=args.chi, phi=args.phi, lam=args.lam, **kw)
    trace: list[TraceRow] = []
    params, rep = optimize(spec, trace)
    d = {
        "params": {"chi": params.chi, "phi": params.phi, "lambda": params.lam},
        "sup_cost": rep.sup_cost,
        "per_phase_sup": rep.per_phase_sup,
        "equalization": equalization_report(params),
        "evaluations": len(trace),
    }
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("stage", "chi", "phi", "lambda", "sup_cost"))
            for r in trace:
                w.writerow((r.stage, _fmt(r.chi), _fmt(r.phi), _fmt(r.lam), _fmt(r.sup_cost)))
    if args.verify:
        gaps = {}
        for phase, y in rep.per_phase_arg.items():
            closed = cost_C(y, params, Algo.C).total_cost
            sim = _simulate_total((params, Algo.C, params.start_angle + y))
            gaps[phase] = _check(closed, sim, f"{phase} worst exit")
        d["verify_abs_diff"] = gaps
    _emit(d, out)


def _verify_hex_run(alg: hexagon.HexAlgorithm, vertex: str, run: hexagon.HexRun) -> float:
    """Replay the strategy on a fine clock and confirm the reported meeting and arrival."""
    trajs = alg.trajectories()
    X = hexagon.hex_vertex(vertex)
    finder = trajs[run.finder]
    if finder.clamped_position(run.discovery_time).dist(X) > 1e-9:
        raise VerificationError(f"finder is not at {vertex} at its discovery time")
    if run.meeting_time is None:
        return 0.0
    if alg.on_find == "continue":
        a, b = trajs[0].clamped_position(run.meeting_time), trajs[1].clamped_position(run.meeting_time)
        if a.dist(b) > VERIFY_TOL:
            raise VerificationError(f"robots are {a.dist(b):.3e} apart at the reported meeting")
        ts = np.arange(run.discovery_time, run.meeting_time - 1e-4, 1e-4)
        if ts.size:
            gaps = np.hypot(*(trajs[0].positions(ts) - trajs[1].positions(ts)).T)
            if np.any(gaps < 1e-9):
                raise VerificationError("robots meet before the reported meeting time")
        M = a
    else:
        M = trajs[1 - run.finder].clamped_position(run.meeting_time)
        chase = run.meeting_time - run.discovery_time
        _check(chase, X.dist(M), "interception distance")
    # Once met, both robots walk from M to the exit together.
    return _check(run.time, run.meeting_time + M.dist(X), f"exit {vertex}")


def cmd_hexagon(args, out) -> None:
    try:
        alg = hexagon.get_algorithm(args.algo)
    except KeyError as e:
        raise UsageError(str(e.args[0])) from None
    which = args.exit.upper() if len(args.exit) == 1 else args.exit.lower()
    if which == "adversary":
        d = {"algo": alg.name, **hexagon.adversary(alg).to_dict()}
        d["bound"] = hexagon.HEX_BOUND
        vertices = list(d["inputs"])
    elif which == "none":
        order = hexagon.explore_order(alg)
        d = {
            "algo": alg.name,
            "visits": [{"vertex": v.vertex, "time": v.time, "robot": f"R{v.robot + 1}"} for v in order],
        }
        vertices = []
    elif len(which) == 1 and which in hexagon.VERTICES:
        run = hexagon.evaluate_hex(alg, which)
        d = {
            "algo": alg.name,
            "exit": which,
            "time": run.time,
            "finder": None if run.finder is None else f"R{run.finder + 1}",
            "discovery_time": run.discovery_time,
            "meeting_time": run.meeting_time,
        }
        vertices = [which]
    else:
        raise UsageError(f"--exit must be a vertex A-F, 'none' or 'adversary', got {args.exit!r}")
    if args.verify:
        for v in vertices:
            _verify_hex_run(alg, v, hexagon.evaluate_hex(alg, v))
        d["verified"] = True
    _emit(d, out)


def cmd_lower_bound(args, out) -> None:
    value = hexagon.disk_lower_bound_constant()
    d = {
        "lower_bound": value,
        "decomposition": "1 + pi/6 + 2 + sqrt(3)",
        "terms": dict(hexagon.LOWER_BOUND_TERMS),
    }
    if args.verify:
        hex_worst = max(
            hexagon.evaluate_hex(hexagon.hex_optimal_algorithm(), v).time for v in hexagon.VERTICES
        )
        _check(hexagon.HEX_BOUND, hex_worst, "hexagon strategy")
        _check(value, sum(hexagon.LOWER_BOUND_TERMS.values()), "decomposition")
        d["verified"] = True
    out.write(f"{value:.{DECIMALS}f} = 1 + pi/6 + 2 + sqrt(3)\n")
    _emit(d, out)


def cmd_dump_trajectory(args, out) -> None:
    algo, params = _params(args)
    r1, r2 = build_R1(params, algo), build_R2(params, algo)
    if args.samples:
        ts = np.linspace(0.0, max(r1.duration, r2.duration), args.samples)
        p1, p2 = r1.positions(np.minimum(ts, r1.duration)), r2.positions(np.minimum(ts, r2.duration))
        stream = open(args.out, "w", newline="") if args.out else out
        try:
            w = csv.writer(stream, lineterminator="\n")
            w.writerow(("t", "phase", "r1_x", "r1_y", "r2_x", "r2_y"))
            for t, a, b in zip(ts, p1, p2):
                w.writerow((_fmt(t), r2.phase_at(float(t)), *map(_fmt, a), *map(_fmt, b)))
        finally:
            if args.out:
                stream.close()
        if args.out is None and not args.verify:
            return
    d = {"algo": algo.value, "R1": r1.to_dict(), "R2": r2.to_dict()}
    if args.verify:
        rep = validate_symmetry(params, algo)
        if rep.max_deviation > VERIFY_TOL:
            raise VerificationError(f"R1 is not the mirror of R2 (deviation {rep.max_deviation:.3e})")
        if rep.forced_meeting_gap is not None and rep.forced_meeting_gap > VERIFY_TOL:
            raise VerificationError(f"robots miss the forced meeting by {rep.forced_meeting_gap:.3e}")
        d["symmetry_deviation"] = rep.max_deviation
    if not args.samples or args.out:
        _emit(d, out)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verify", action="store_true", help="cross-check against the simulator")
    common.add_argument("--jobs", type=int, default=_default_jobs(), help="worker processes (EVAC_JOBS)")

    algo = argparse.ArgumentParser(add_help=False)
    algo.add_argument("--algo", choices=[a.value for a in Algo], default="C")
    algo.add_argument("--chi", type=float)
    algo.add_argument("--phi", type=float)
    algo.add_argument("--lambda", dest="lam", type=float)

    exit_ = argparse.ArgumentParser(add_help=False)
    g = exit_.add_mutually_exclusive_group(required=True)
    g.add_argument("--exit-y", type=float, help="arc distance from the deployment point")
    g.add_argument("--exit-angle", type=float, help="absolute angle of the exit")

    ap = argparse.ArgumentParser(prog="disk-evac", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common, algo, exit_], help="cost for one exit")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("sweep", parents=[common, algo], help="cost over a grid of exits")
    p.add_argument("--points", type=int, default=1000)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("simulate", parents=[common, algo, exit_], help="step both robots")
    p.add_argument("--dt", type=float, default=1e-4)
    p.add_argument("--trace-out", help="write the event trace as JSON lines")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("optimize", parents=[common], help="search detour parameters")
    p.add_argument("--family", choices=("C", "B"), default="C")
    p.add_argument("--chi", type=float, help="fix chi")
    p.add_argument("--phi", type=float, help="fix phi")
    p.add_argument("--lambda", dest="lam", type=float, help="fix lambda")
    p.add_argument("--grid", type=int, default=5)
    p.add_argument("--points", type=int, default=2000)
    p.add_argument("--out", help="write the search trace as CSV")
    p.set_defaults(fn=cmd_optimize)

    p = sub.add_parser("hexagon", parents=[common], help="hexagon strategies and adversary")
    p.add_argument("--algo", default="forced-meeting", help="zoo name or JSON file")
    p.add_argument("--exit", default="adversary", help="vertex A-F, none or adversary")
    p.set_defaults(fn=cmd_hexagon)

    p = sub.add_parser("lower-bound", parents=[common], help="disk lower bound constant")
    p.set_defaults(fn=cmd_lower_bound)

    p = sub.add_parser("dump-trajectory", parents=[common, algo], help="trajectory segments")
    p.add_argument("--samples", type=int, default=0, help="also sample N positions as CSV")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_dump_trajectory)
    return ap


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if getattr(args, "jobs", 1) < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return 2
    try:
        args.fn(args, out)
    except (ParameterError, DomainError, UsageError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (VerificationError, SimulationDivergenceError, hexagon.NonExploringAlgorithmError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (RuntimeError, ArithmeticError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())
