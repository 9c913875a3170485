"""Brute-force co-motion oracle for the closed-form costs.

Both robots advance along their built trajectories.  Exit discovery uses the
exact geometric hit time, interception is solved numerically on the caught
robot's trajectory (no closed forms), and a fixed-step loop replays the motion
to produce the event trace and check the unit speed bound.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import Point, boundary_point, reflect_across_axis
from .trajectories import (
    Algo,
    AlgorithmParams,
    Phase,
    build_R1,
    build_R2,
    discovery_time,
    intercept,
)


class SimulationDivergenceError(RuntimeError):
    """The robots did not evacuate within ``max_time``."""


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1e-4
    meet_eps: float = 1e-6
    max_time: float = 12.0
    trace: bool = True

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.meet_eps > 0:
            raise ValueError("meet_eps must be positive")


@dataclass(frozen=True)
class SimEvent:
    time: float
    kind: str
    positions: tuple[Point, Point]

    def to_dict(self) -> dict:
        return {
            "time": self.time,
            "event": self.kind,
            "positions": {"R1": list(self.positions[0]), "R2": list(self.positions[1])},
        }


@dataclass
class SimTrace:
    events: list[SimEvent] = field(default_factory=list)
    finder: str = ""
    max_step: float = 0.0
    stepped_time: float | None = None

    def kinds(self) -> list[str]:
        return [e.kind for e in self.events]

    def to_jsonl(self) -> str:
        return "".join(json.dumps(e.to_dict()) + "\n" for e in self.events)


def _legs(ts, traj, t_switch, X, M, t_meet, t_end):
    """Positions of a robot that follows ``traj`` until ``t_switch``, then flies to M and on to X."""
    out = np.empty((len(ts), 2))
    k1 = int(np.searchsorted(ts, t_switch, side="right"))
    k2 = int(np.searchsorted(ts, t_meet, side="right"))
    out[:k1] = traj.positions(ts[:k1])
    start = traj.clamped_position(t_switch)
    for (a, b), (p, q), (t_a, t_b) in (
        ((k1, k2), (start, M), (t_switch, t_meet)),
        ((k2, len(ts)), (M, X), (t_meet, t_end)),
    ):
        if b > a:
            u = np.clip((ts[a:b] - t_a) / (t_b - t_a), 0.0, 1.0) if t_b > t_a else 1.0
            out[a:b, 0] = p[0] + u * (q[0] - p[0])
            out[a:b, 1] = p[1] + u * (q[1] - p[1])
    return out


def simulate(
    params: AlgorithmParams,
    algo: Algo | str,
    exit_angle: float,
    config: SimConfig = SimConfig(),
) -> tuple[float, SimTrace]:
    """Evacuation time for an exit at ``exit_angle`` and the event trace."""
    algo = Algo(algo)
    trajs = (build_R1(params, algo), build_R2(params, algo))
    X = boundary_point(exit_angle)
    found = [discovery_time(tr, exit_angle) for tr in trajs]
    if found[0] is None and found[1] is None:
        raise SimulationDivergenceError(f"no robot ever reaches exit at angle {exit_angle}")
    finder = 0 if found[1] is None or (found[0] is not None and found[0] <= found[1]) else 1
    other = 1 - finder
    t0 = found[finder]
    hit = intercept(X, t0, trajs[other])
    t_meet = t0 + hit.t
    total = t0 + 2.0 * hit.t
    if total > config.max_time:
        raise SimulationDivergenceError(f"evacuation at {total:.6f} exceeds max_time")

    trace = SimTrace(finder=("R1", "R2")[finder])

    def both(t):
        pos = [None, None]
        for i in (0, 1):
            if t <= (t0 if i == finder else t_meet):
                pos[i] = trajs[i].clamped_position(t)
            elif t <= t_meet:
                u = (t - t0) / hit.t
                pos[i] = Point(X.x + u * (hit.point.x - X.x), X.y + u * (hit.point.y - X.y))
            else:
                u = (t - t_meet) / max(hit.t, 1e-300)
                u = min(u, 1.0)
                pos[i] = Point(
                    hit.point.x + u * (X.x - hit.point.x), hit.point.y + u * (X.y - hit.point.y)
                )
        return tuple(pos)

    events = [(1.0, "deployed")]
    if algo is not Algo.A:
        t_c = trajs[1].phase_time(Phase.DETOUR_SUB3.value)
        if t_c is not None and t_c < t0:
            a, b = trajs[0].clamped_position(t_c), trajs[1].clamped_position(t_c)
            if a.dist(b) <= config.meet_eps:
                events.append((t_c, "robots-met"))
    events += [(t0, "exit-found"), (t_meet, "robots-met"), (total, "evacuated")]
    events.sort(key=lambda e: e[0])
    trace.events = [SimEvent(t, kind, both(t)) for t, kind in events]

    if config.trace:
        n = int(math.ceil(total / config.dt))
        ts = np.arange(n + 1) * config.dt
        paths = [None, None]
        paths[finder] = _legs(ts, trajs[finder], t0, X, hit.point, t_meet, total)
        paths[other] = _legs(ts, trajs[other], t_meet, X, hit.point, t_meet, total)
        if n:
            trace.max_step = max(
                float(np.sqrt(np.max(np.sum(np.diff(p, axis=0) ** 2, axis=1)))) for p in paths
            )
        # Both robots can only sit at the exit after they have met.
        tail = int(np.searchsorted(ts, t_meet - config.meet_eps))
        gap = np.max(
            [np.sum((p[tail:] - np.asarray(X)) ** 2, axis=1) for p in paths], axis=0
        )
        k = np.flatnonzero(gap <= config.meet_eps**2)
        trace.stepped_time = float(ts[tail + k[0]]) if k.size else None
    return total, trace


def simulate_y(
    y: float, params: AlgorithmParams, algo: Algo | str, config: SimConfig = SimConfig()
) -> tuple[float, SimTrace]:
    """Convenience wrapper taking the exit as arc distance from the deployment point."""
    return simulate(params, algo, params.start_angle + y, config)


@dataclass(frozen=True)
class SymmetryReport:
    max_deviation: float
    forced_meeting_time: float | None
    forced_meeting_gap: float | None


def validate_symmetry(params: AlgorithmParams, algo: Algo | str, samples: int = 4001) -> SymmetryReport:
    """Largest gap between R1 and the mirror of R2 over sampled times."""
    algo = Algo(algo)
    r1, r2 = build_R1(params, algo), build_R2(params, algo)
    ts = np.linspace(0.0, r2.duration, samples)
    p1 = r1.positions(ts)
    axis = params.start_angle
    c, s = math.cos(2 * axis), math.sin(2 * axis)
    p2 = r2.positions(ts)
    mirror = np.stack([c * p2[:, 0] + s * p2[:, 1], s * p2[:, 0] - c * p2[:, 1]], axis=-1)
    dev = float(np.max(np.hypot(*(p1 - mirror).T)))
    t_c = r2.phase_time(Phase.DETOUR_SUB3.value) if algo is not Algo.A else None
    gap = None
    if t_c is not None:
        gap = r1.position_at(t_c).dist(r2.position_at(t_c))
        dev = max(dev, r1.position_at(t_c).dist(reflect_across_axis(r2.position_at(t_c), axis)))
    return SymmetryReport(dev, t_c, gap)
