"""Unit-speed robot trajectories for the A, B and C evacuation families.

Trajectories are built in a canonical frame with the deployment point ``A`` at
angle 0 and then rotated by ``start_angle``.  R2 sweeps clockwise; R1's
trajectory is the mirror image across the diameter through ``A``.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache

import numpy as np

from .geometry import (
    ORIGIN,
    Arc,
    DomainError,
    Point,
    boundary_point,
    reflect_across_axis,
    rotate,
)
from .solvers import ParameterError, critical_arc, phi_max

SEGMENT_TOL = 1e-12
CHAIN_TOL = 1e-10
SCAN_STEP = 1e-3
INTERCEPT_TOL = 1e-12


class Algo(str, Enum):
    A = "A"
    B = "B"
    C = "C"


class Phase(str, Enum):
    DEPLOYMENT = "deployment"
    PRE_DETOUR = "pre-detour"
    DETOUR_SUB1 = "detour-sub1"
    DETOUR_SUB2 = "detour-sub2"
    DETOUR_SUB3 = "detour-sub3"
    POST_DETOUR = "post-detour"


@dataclass(frozen=True)
class AlgorithmParams:
    """Detour arc ``chi``, detour angle ``phi`` and first-leg length ``lam``."""

    chi: float = math.pi
    phi: float = 0.0
    lam: float = 0.0
    start_angle: float = 0.0

    @property
    def lam_max(self) -> float:
        return math.sin(self.chi) / math.cos(self.phi)

    @classmethod
    def for_b(cls, chi: float, phi: float = 0.0, start_angle: float = 0.0) -> AlgorithmParams:
        """The linear-detour member: first leg runs all the way to the diameter."""
        return cls(chi, phi, math.sin(chi) / math.cos(phi), start_angle)

    def for_algo(self, algo: Algo) -> AlgorithmParams:
        algo = Algo(algo)
        if algo is Algo.B:
            return replace(self, lam=self.lam_max)
        return self

    def validate(self, algo: Algo = Algo.C) -> None:
        if Algo(algo) is Algo.A:
            if not math.isfinite(self.start_angle):
                raise ParameterError("start_angle must be finite")
            return
        for name in ("chi", "phi", "lam", "start_angle"):
            if not math.isfinite(getattr(self, name)):
                raise ParameterError(f"{name} must be finite")
        tol = 1e-12
        x0 = critical_arc()
        if self.chi < math.pi / 2 - tol:
            raise ParameterError(f"chi={self.chi} below pi/2")
        if self.chi > x0 + tol:
            raise ParameterError(f"chi={self.chi} exceeds x0={x0:.6f}")
        if self.phi < -tol:
            raise ParameterError(f"phi={self.phi} is negative")
        if self.phi > phi_max(self.chi) + tol:
            raise ParameterError(
                f"phi exceeds f(chi)/2: phi={self.phi}, f(chi)/2={phi_max(self.chi):.6f}"
            )
        if self.lam < -tol:
            raise ParameterError(f"lambda={self.lam} is negative")
        if self.lam > self.lam_max + tol:
            raise ParameterError(
                f"lambda exceeds sin(chi)/cos(phi): lambda={self.lam}, bound={self.lam_max:.6f}"
            )


# Parameters reported for the triangular-detour family and the best linear
# detour with phi = 0.
REFERENCE_C = AlgorithmParams(2.631865, 0.44916, 0.05762)
REFERENCE_B_CHI = 2.62359


@dataclass(frozen=True)
class TrajectorySegment:
    kind: str
    start: Point
    end: Point
    duration: float
    arc: Arc | None = None

    def point_at(self, s: float) -> Point:
        if self.kind == "arc":
            return self.arc.point_at(s)
        if self.duration <= 0.0:
            return self.start
        u = min(max(s / self.duration, 0.0), 1.0)
        return Point(
            self.start.x + u * (self.end.x - self.start.x),
            self.start.y + u * (self.end.y - self.start.y),
        )

    def points_at(self, s: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
        """Vectorized :meth:`point_at`; writes into ``out`` when given."""
        if out is None:
            out = np.empty((len(s), 2))
        if self.kind == "arc":
            L = abs(self.arc.length)
            ang = self.arc.start_angle + (1.0 if self.arc.length >= 0 else -1.0) * np.clip(s, 0.0, L)
            np.cos(ang, out=out[:, 0])
            np.sin(ang, out=out[:, 1])
        elif self.duration <= 0.0:
            out[:] = self.start
        else:
            u = np.clip(s / self.duration, 0.0, 1.0)
            out[:, 0] = self.start.x + u * (self.end.x - self.start.x)
            out[:, 1] = self.start.y + u * (self.end.y - self.start.y)
        return out

    def transformed(self, fn_point, fn_arc) -> TrajectorySegment:
        return TrajectorySegment(
            self.kind,
            fn_point(self.start),
            fn_point(self.end),
            self.duration,
            fn_arc(self.arc) if self.arc is not None else None,
        )

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "start": [self.start.x, self.start.y],
            "end": [self.end.x, self.end.y],
            "duration": self.duration,
        }
        if self.arc is not None:
            d["start_angle"] = self.arc.start_angle
            d["arc_length"] = self.arc.length
        return d


def line(p, q) -> TrajectorySegment:
    p, q = Point(*p), Point(*q)
    return TrajectorySegment("line", p, q, p.dist(q))


def arc(start_angle: float, length: float) -> TrajectorySegment:
    a = Arc(start_angle, length)
    return TrajectorySegment(
        "arc", boundary_point(start_angle), boundary_point(a.end_angle), abs(length), a
    )


@dataclass(frozen=True)
class Trajectory:
    segments: tuple[TrajectorySegment, ...]
    phase_marks: tuple[tuple[float, str], ...] = ()
    starts: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        t, starts = 0.0, []
        for i, seg in enumerate(self.segments):
            if seg.duration < 0.0:
                raise ValueError("negative segment duration")
            if i and self.segments[i - 1].end.dist(seg.start) > CHAIN_TOL:
                raise ValueError(f"segment {i} does not start where segment {i - 1} ends")
            starts.append(t)
            t += seg.duration
        object.__setattr__(self, "starts", tuple(starts))

    @property
    def duration(self) -> float:
        if not self.segments:
            return 0.0
        return self.starts[-1] + self.segments[-1].duration

    @property
    def start(self) -> Point:
        return self.segments[0].start

    @property
    def end(self) -> Point:
        return self.segments[-1].end

    def _locate(self, t: float) -> int:
        i = bisect.bisect_right(self.starts, t) - 1
        return min(max(i, 0), len(self.segments) - 1)

    def position_at(self, t: float) -> Point:
        """Position after time ``t`` on ``[0, duration]``."""
        if not (-SEGMENT_TOL <= t <= self.duration + SEGMENT_TOL):
            raise DomainError(f"t={t} outside [0, {self.duration}]")
        return self.clamped_position(t)

    def clamped_position(self, t: float) -> Point:
        """Like :meth:`position_at` but parks the robot at the ends outside the range."""
        if not self.segments:
            raise DomainError("empty trajectory")
        if t >= self.duration:
            return self.end
        i = self._locate(t)
        return self.segments[i].point_at(t - self.starts[i])

    def positions(self, ts) -> np.ndarray:
        """Vectorized clamped positions, shape ``(len(ts), 2)``."""
        ts = np.asarray(ts, dtype=float)
        out = np.empty((len(ts), 2))
        if len(ts) > 1 and np.all(ts[1:] >= ts[:-1]):
            # Sorted times: each segment owns a contiguous slice.
            cuts = np.searchsorted(ts, self.starts[1:], side="left")
            bounds = np.concatenate(([0], cuts, [len(ts)]))
            for i, seg in enumerate(self.segments):
                a, b = bounds[i], bounds[i + 1]
                if b > a:
                    seg.points_at(ts[a:b] - self.starts[i], out[a:b])
        else:
            idx = np.clip(
                np.searchsorted(self.starts, ts, side="right") - 1, 0, len(self.segments) - 1
            )
            for i, seg in enumerate(self.segments):
                m = idx == i
                if m.any():
                    out[m] = seg.points_at(ts[m] - self.starts[i])
        out[ts >= self.duration] = np.asarray(self.end)
        return out

    def phase_at(self, t: float) -> str:
        label = self.phase_marks[0][1] if self.phase_marks else ""
        for mark, name in self.phase_marks:
            if t + SEGMENT_TOL >= mark:
                label = name
        return label

    def phase_time(self, name: str) -> float | None:
        for mark, label in self.phase_marks:
            if label == name:
                return mark
        return None

    def transformed(self, fn_point, fn_arc) -> Trajectory:
        return Trajectory(
            tuple(s.transformed(fn_point, fn_arc) for s in self.segments), self.phase_marks
        )

    def mirrored(self, axis_angle: float) -> Trajectory:
        return self.transformed(
            lambda p: reflect_across_axis(p, axis_angle),
            lambda a: Arc(2.0 * axis_angle - a.start_angle, -a.length),
        )

    def rotated(self, angle: float) -> Trajectory:
        if angle == 0.0:
            return self
        return self.transformed(
            lambda p: rotate(p, angle), lambda a: Arc(a.start_angle + angle, a.length)
        )

    def to_dict(self) -> dict:
        return {
            "duration": self.duration,
            "segments": [s.to_dict() for s in self.segments],
            "phase_marks": [{"time": t, "phase": name} for t, name in self.phase_marks],
        }


def _canonical_r2(params: AlgorithmParams, algo: Algo) -> Trajectory:
    A = Point(1.0, 0.0)
    segs = [line(ORIGIN, A)]
    marks = [(0.0, Phase.DEPLOYMENT.value), (1.0, Phase.PRE_DETOUR.value)]
    if algo is Algo.A:
        segs.append(arc(0.0, -math.pi))
        return Trajectory(tuple(segs), tuple(marks))

    chi, phi, lam = params.chi, params.phi, params.lam
    segs.append(arc(0.0, -chi))
    B = segs[-1].end
    # Leave B at angle phi off the chord BD, turned toward the centre.
    heading = Point(math.sin(phi), math.cos(phi))
    G = Point(B.x + lam * heading.x, B.y + lam * heading.y)
    C = Point(G.x, 0.0)
    t = 1.0 + chi
    for label, seg in (
        (Phase.DETOUR_SUB1, line(B, G)),
        (Phase.DETOUR_SUB2, line(G, C)),
        (Phase.DETOUR_SUB3, line(C, B)),
    ):
        if seg.duration > SEGMENT_TOL:
            marks.append((t, label.value))
            segs.append(seg)
            t += seg.duration
    marks.append((t, Phase.POST_DETOUR.value))
    segs.append(arc(-chi, -(math.pi - chi)))
    return Trajectory(tuple(segs), tuple(marks))


@lru_cache(maxsize=256)
def _build(params: AlgorithmParams, algo: Algo, robot: int) -> Trajectory:
    params = params.for_algo(algo)
    params.validate(algo)
    canonical = _canonical_r2(params, algo)
    if robot == 1:
        canonical = canonical.mirrored(0.0)
    return canonical.rotated(params.start_angle)


def build_R2(params: AlgorithmParams, algo: Algo | str) -> Trajectory:
    """R2's no-discovery trajectory: deploy, sweep clockwise, detour, finish at A'."""
    return _build(params, Algo(algo), 2)


def build_R1(params: AlgorithmParams, algo: Algo | str) -> Trajectory:
    """Mirror image of R2's trajectory across the diameter through A."""
    return _build(params, Algo(algo), 1)


def detour_duration(params: AlgorithmParams) -> float:
    """Length of the triangular detour B -> G -> C -> B."""
    chi, phi, lam = params.chi, params.phi, params.lam
    return (
        lam
        + math.sin(chi)
        - lam * math.cos(phi)
        + math.sqrt(math.sin(chi) ** 2 + (lam * math.sin(phi)) ** 2)
    )


def position_at(traj: Trajectory, t: float) -> Point:
    return traj.position_at(t)


def discovery_time(traj: Trajectory, exit_angle: float, tol: float = 1e-9) -> float | None:
    """First time the trajectory passes through the boundary point at ``exit_angle``."""
    X = boundary_point(exit_angle)
    for t0, seg in zip(traj.starts, traj.segments):
        if seg.kind == "arc":
            off = seg.arc.offset_of(exit_angle, tol)
            if off is not None:
                return t0 + off
            continue
        d = np.asarray(seg.end) - np.asarray(seg.start)
        L2 = float(d @ d)
        u = 0.0 if L2 == 0.0 else float(np.clip((np.asarray(X) - np.asarray(seg.start)) @ d / L2, 0, 1))
        # Lines meet the boundary only at their endpoints, where the adjacent
        # arc reports the exact offset; a loose test here would snap nearby
        # exits onto the endpoint.
        if seg.point_at(u * seg.duration).dist(X) <= min(tol, SEGMENT_TOL):
            return t0 + u * seg.duration
    return None


@dataclass(frozen=True)
class Interception:
    t: float
    point: Point


def intercept(finder_pos, t0: float, other: Trajectory) -> Interception:
    """Meeting protocol: least ``t >= 0`` with ``|X - other(t0 + t)| = t``.

    The caught robot parks at its trajectory's end if the chase outlasts it.
    ``g(t) = |X - other(t0 + t)| - t`` is non-increasing (unit speeds), so the
    first sign change of a coarse scan brackets the least root for bisection.
    """
    X = np.asarray(finder_pos, dtype=float)
    g0 = float(np.hypot(*(X - other.clamped_position(t0))))
    if g0 <= INTERCEPT_TOL:
        return Interception(0.0, other.clamped_position(t0))
    remaining = max(other.duration - t0, 0.0)
    ts = np.append(np.arange(0.0, remaining, SCAN_STEP), remaining)
    g = np.hypot(*(X - other.positions(t0 + ts)).T) - ts
    # g can stay at zero after the catch (the partner retreats along the chase
    # line), so "caught" means within tolerance rather than strictly negative.
    hit = np.flatnonzero(g <= INTERCEPT_TOL)
    if hit.size == 0:
        end = other.end
        return Interception(float(np.hypot(*(X - np.asarray(end)))), end)
    k = int(hit[0])
    lo, hi = (ts[k - 1], ts[k]) if k > 0 else (0.0, ts[0])

    def gfun(t):
        return math.hypot(*(X - np.asarray(other.clamped_position(t0 + t)))) - t

    while hi - lo > INTERCEPT_TOL:
        mid = 0.5 * (lo + hi)
        if gfun(mid) > INTERCEPT_TOL:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    return Interception(t, other.clamped_position(t0 + t))
