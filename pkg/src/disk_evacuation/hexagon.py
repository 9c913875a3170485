"""Evacuating a unit-radius regular hexagon whose exit sits at an unknown vertex.

A strategy gives each robot a default piecewise-linear path (followed while it
knows nothing) and a finder policy:

* ``"continue"``: the finder keeps to its default path until the robots are
  co-located, then both head straight to the exit.
* ``"intercept"``: the finder runs the meeting protocol against the partner's
  default path, then both head to the exit.

Information moves only through co-location, so every strategy expressible
here is a legal face-to-face algorithm.  The adversary below builds the two
exit placements used to show no such algorithm beats ``2 + sqrt(3)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import TWO_PI, Point, boundary_point
from .trajectories import Trajectory, intercept, line

VERTICES = "ABCDEF"
SQRT3 = math.sqrt(3.0)
HEX_BOUND = 2.0 + SQRT3
VISIT_TOL = 1e-9
MEET_TOL = 1e-9
EXPLORE_DEADLINE = 20.0
SECTOR = math.pi / 3.0


class NonExploringAlgorithmError(RuntimeError):
    """A strategy leaves some vertex unvisited by the deadline."""


class AdversaryInvariantError(AssertionError):
    """The robots met inside a window where the lower-bound argument forbids it."""


def vertex_index(v: str | int) -> int:
    return VERTICES.index(v) if isinstance(v, str) else int(v) % 6


def hex_vertex(v: str | int, rotation: float = 0.0) -> Point:
    """Vertex ``v`` of the hexagon inscribed in the unit circle, A at angle ``rotation``."""
    return boundary_point(rotation + vertex_index(v) * SECTOR)


def hex_distance(u: str | int, v: str | int) -> float:
    return hex_vertex(u).dist(hex_vertex(v))


def _as_point(w) -> Point:
    if isinstance(w, str):
        return hex_vertex(w)
    return Point(float(w[0]), float(w[1]))


@dataclass(frozen=True)
class HexAlgorithm:
    name: str
    start_vertices: tuple[str, str]
    waypoints: tuple[tuple, tuple]
    on_find: str = "continue"

    def __post_init__(self):
        if self.on_find not in ("continue", "intercept"):
            raise ValueError(f"unknown finder policy {self.on_find!r}")
        for s, path in zip(self.start_vertices, self.waypoints):
            if not path or _as_point(path[0]).dist(hex_vertex(s)) > VISIT_TOL:
                raise ValueError(f"path of {self.name} must start at vertex {s}")

    def trajectories(self) -> tuple[Trajectory, Trajectory]:
        out = []
        for path in self.waypoints:
            pts = [_as_point(w) for w in path]
            if len(pts) == 1:
                pts.append(pts[0])
            out.append(Trajectory(tuple(line(p, q) for p, q in zip(pts, pts[1:]))))
        return tuple(out)

    @classmethod
    def from_dict(cls, d: dict) -> HexAlgorithm:
        return cls(
            d["name"],
            tuple(d["start_vertices"]),
            tuple(tuple(w if isinstance(w, str) else tuple(w) for w in p) for p in d["paths"]),
            d.get("on_find", "continue"),
        )

    @classmethod
    def from_file(cls, path: str | Path) -> HexAlgorithm:
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class Visit:
    vertex: str
    time: float
    robot: int


@dataclass(frozen=True)
class HexRun:
    time: float | None
    visits: tuple[Visit, ...]
    finder: int | None = None
    discovery_time: float | None = None
    meeting_time: float | None = None


def robot_visits(traj: Trajectory) -> dict[str, float]:
    """First time the path passes through each hexagon vertex."""
    seen: dict[str, float] = {}
    for t0, seg in zip(traj.starts, traj.segments):
        a, b = np.asarray(seg.start), np.asarray(seg.end)
        d = b - a
        L2 = float(d @ d)
        for v in VERTICES:
            if v in seen:
                continue
            p = np.asarray(hex_vertex(v))
            u = 0.0 if L2 == 0.0 else float(np.clip((p - a) @ d / L2, 0.0, 1.0))
            if float(np.hypot(*(a + u * d - p))) <= VISIT_TOL:
                seen[v] = t0 + u * seg.duration
    return seen


def first_meeting(t1: Trajectory, t2: Trajectory, after: float = 0.0) -> tuple[float, Point] | None:
    """Earliest time ``>= after`` at which the two robots are co-located."""
    cuts = sorted({after, *t1.starts, *t2.starts, t1.duration, t2.duration})
    cuts = [c for c in cuts if c >= after]
    horizon = max(t1.duration, t2.duration)
    for ta, tb in zip(cuts, cuts[1:] + [horizon]):
        if tb < ta:
            continue
        pa = np.subtract(t1.clamped_position(ta), t2.clamped_position(ta))
        pb = np.subtract(t1.clamped_position(tb), t2.clamped_position(tb))
        span = tb - ta
        v = pb - pa
        s = 0.0
        if span > 0 and float(v @ v) > 0:
            s = float(np.clip(-(pa @ v) / (v @ v), 0.0, 1.0))
        gap = pa + s * v
        if float(np.hypot(*gap)) <= MEET_TOL:
            t = ta + s * span
            return t, t1.clamped_position(t)
    return None


def explore_order(alg: HexAlgorithm, deadline: float = EXPLORE_DEADLINE) -> tuple[Visit, ...]:
    """Order in which the vertices are first visited when there is no exit.

    Simultaneous visits are ordered R1 before R2.
    """
    trajs = alg.trajectories()
    best: dict[str, Visit] = {}
    for r, tr in enumerate(trajs):
        for v, t in robot_visits(tr).items():
            cur = best.get(v)
            if cur is None or t < cur.time - VISIT_TOL:
                best[v] = Visit(v, t, r)
    missing = [v for v in VERTICES if v not in best or best[v].time > deadline]
    if missing:
        raise NonExploringAlgorithmError(
            f"{alg.name} leaves {''.join(missing)} unvisited by time {deadline}"
        )
    return tuple(sorted(best.values(), key=lambda v: (round(v.time / VISIT_TOL), v.robot)))


def evaluate_hex(alg: HexAlgorithm, exit_vertex: str | None) -> HexRun:
    """Evacuation time with the exit at ``exit_vertex``; visit order alone for ``None``."""
    order = explore_order(alg)
    if exit_vertex is None:
        return HexRun(None, order)
    trajs = alg.trajectories()
    X = hex_vertex(exit_vertex)
    found = [robot_visits(tr).get(exit_vertex, math.inf) for tr in trajs]
    finder = 0 if found[0] <= found[1] else 1
    other = 1 - finder
    t0 = found[finder]
    if alg.on_find == "intercept":
        hit = intercept(X, t0, trajs[other])
        meet = (float(t0 + hit.t), hit.point)
    else:
        meet = first_meeting(trajs[0], trajs[1], t0)
    if meet is None:
        end = trajs[finder].end
        finder_arrival = max(trajs[finder].duration, t0) + end.dist(X)
        partner_arrival = found[other]
        t_meet = None
    else:
        t_meet, M = meet
        finder_arrival = t_meet + M.dist(X)
        partner_arrival = min(found[other], finder_arrival)
    return HexRun(float(max(finder_arrival, partner_arrival)), order, finder, float(t0), t_meet)


def hex_optimal_algorithm() -> HexAlgorithm:
    """Forced-meeting strategy: R1 walks A-B-D-C, R2 walks F-E-C-D.

    Both reach the crossing of BD and EC at time 1 + 2/sqrt(3) and share what
    they know there.
    """
    return HexAlgorithm(
        "forced-meeting", ("A", "F"), (("A", "B", "D", "C"), ("F", "E", "C", "D")), "continue"
    )


def _center_line_point() -> Point:
    # Crossing of FD and CE.
    F, D, C = hex_vertex("F"), hex_vertex("D"), hex_vertex("C")
    u = (C.x - F.x) / (D.x - F.x)
    return Point(C.x, F.y + u * (D.y - F.y))


def algorithm_zoo() -> dict[str, HexAlgorithm]:
    """Hand-written strategies used to exercise the adversary."""
    P = tuple(_center_line_point())
    zoo = [
        hex_optimal_algorithm(),
        HexAlgorithm(
            "forced-meeting-intercept",
            ("A", "F"),
            (("A", "B", "D", "C"), ("F", "E", "C", "D")),
            "intercept",
        ),
        HexAlgorithm(
            "perimeter-together", ("A", "A"), (tuple("ABCDEF"), tuple("ABCDEF")), "continue"
        ),
        HexAlgorithm("split-both-ways", ("A", "A"), (tuple("ABCD"), tuple("AFED")), "intercept"),
        HexAlgorithm("antipodal-sweep", ("A", "D"), (tuple("ABC"), tuple("DEF")), "intercept"),
        HexAlgorithm(
            "center-line-meeting",
            ("A", "B"),
            (("A", "F", P, "D", "E"), ("B", "C", P, "D", "E")),
            "continue",
        ),
        HexAlgorithm("single-sweeper", ("A", "A"), (tuple("ABCDEF"), ("A",)), "intercept"),
    ]
    return {a.name: a for a in zoo}


def get_algorithm(name_or_file: str) -> HexAlgorithm:
    zoo = algorithm_zoo()
    if name_or_file in zoo:
        return zoo[name_or_file]
    path = Path(name_or_file)
    if path.is_file():
        return HexAlgorithm.from_file(path)
    raise KeyError(f"unknown hexagon algorithm {name_or_file!r}; known: {', '.join(zoo)}")


@dataclass(frozen=True)
class AdversaryReport:
    worst_time: float
    worst_input: str
    inputs: dict[str, float]
    fifth_visit_time: float
    fifth_vertex: str
    last_vertex: str
    claim_checked: bool = False

    def to_dict(self) -> dict:
        return {
            "worst_time": self.worst_time,
            "worst_input": self.worst_input,
            "inputs": dict(self.inputs),
            "fifth_visit_time": self.fifth_visit_time,
            "fifth_vertex": self.fifth_vertex,
            "last_vertex": self.last_vertex,
            "claim_checked": self.claim_checked,
        }


def non_adjacent(v: str) -> tuple[str, ...]:
    i = vertex_index(v)
    return tuple(VERTICES[(i + k) % 6] for k in (2, 3, 4))


def adversary(alg: HexAlgorithm) -> AdversaryReport:
    """Run the no-exit probe and evaluate the exit placements that certify the bound.

    The first input puts the exit at the last-explored vertex.  When the fifth
    vertex is reached before ``1 + sqrt(3)`` and the last vertex is adjacent
    to it, the second input puts the exit at whichever of the three vertices
    opposite the fifth was reached last by the other robot.
    """
    order = explore_order(alg)
    v5, v6 = order[4], order[5]
    t = v5.time
    inputs = {v6.vertex: evaluate_hex(alg, v6.vertex).time}
    claim_checked = False
    far = non_adjacent(v5.vertex)
    if t < 1.0 + SQRT3 and v6.vertex not in far:
        trajs = alg.trajectories()
        other = 1 - v5.robot
        seen = robot_visits(trajs[other])
        candidates = sorted(
            (time, v) for v, time in seen.items() if v in far and time <= t + VISIT_TOL
        )
        if candidates:
            t_star, v_star = candidates[-1]
            run = evaluate_hex(alg, v_star)
            inputs[v_star] = run.time
            if run.finder == other and abs(run.discovery_time - t_star) <= VISIT_TOL:
                claim_checked = True
                if run.meeting_time is not None and t_star - VISIT_TOL <= run.meeting_time < t - MEET_TOL:
                    raise AdversaryInvariantError(
                        f"{alg.name}: robots meet at {run.meeting_time:.6f} in [{t_star:.6f}, {t:.6f})"
                    )
    worst_input = max(inputs, key=inputs.get)
    return AdversaryReport(
        inputs[worst_input], worst_input, inputs, t, v5.vertex, v6.vertex, claim_checked
    )


@dataclass(frozen=True)
class ExploredSet:
    """Closed arcs of the unit circle given as ``(start_angle, length)`` with length >= 0."""

    arcs: tuple[tuple[float, float], ...] = ()
    intervals: tuple[tuple[float, float], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pieces = []
        for start, length in self.arcs:
            if length < 0:
                start, length = start + length, -length
            if length >= TWO_PI:
                pieces = [(0.0, TWO_PI)]
                break
            s = start % TWO_PI
            if s + length <= TWO_PI:
                pieces.append((s, s + length))
            else:
                pieces += [(s, TWO_PI), (0.0, s + length - TWO_PI)]
        object.__setattr__(self, "intervals", tuple(_merge(pieces)))

    @property
    def measure(self) -> float:
        return sum(b - a for a, b in self.intervals)

    def contains(self, angle: float, tol: float = 1e-12) -> bool:
        a = angle % TWO_PI
        return any(
            lo - tol <= a <= hi + tol or lo - tol <= a - TWO_PI or a + TWO_PI <= hi + tol
            for lo, hi in self.intervals
        )


def _merge(pieces):
    out: list[list[float]] = []
    for a, b in sorted(pieces):
        if out and a <= out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return [tuple(p) for p in out]


def find_unexplored_hexagon(explored: ExploredSet) -> float | None:
    """Rotation in ``[0, pi/3)`` whose six inscribed-hexagon vertices avoid ``explored``.

    Folding every explored arc modulo ``pi/3`` leaves a free residue whenever
    the explored measure is below ``pi/3``; the midpoint of the widest free
    gap is returned.
    """
    if not explored.intervals:
        return 0.0
    folded = []
    for a, b in explored.intervals:
        if b - a >= SECTOR:
            return None
        s = a % SECTOR
        e = s + (b - a)
        if e <= SECTOR:
            folded.append((s, e))
        else:
            folded += [(s, SECTOR), (0.0, e - SECTOR)]
    blocks = _merge(folded)
    best, best_width = None, 0.0
    for (_, end), (start, _) in zip(blocks, blocks[1:] + [(blocks[0][0] + SECTOR, 0.0)]):
        width = start - end
        if width > best_width:
            best, best_width = (end + 0.5 * width) % SECTOR, width
    return best


def hexagon_is_unexplored(explored: ExploredSet, rotation: float) -> bool:
    return not any(explored.contains(rotation + k * SECTOR, tol=0.0) for k in range(6))


def disk_lower_bound_constant() -> float:
    """3 + pi/6 + sqrt(3): reach the boundary, explore, then the hexagon bound."""
    return 1.0 + math.pi / 6.0 + HEX_BOUND


LOWER_BOUND_TERMS = {
    "deployment": 1.0,
    "exploration": math.pi / 6.0,
    "hexagon": HEX_BOUND,
}
# Tight bound when robots communicate at a distance; shown for comparison only.
WIRELESS_BOUND = 1.0 + 2.0 * math.pi / 3.0 + SQRT3
