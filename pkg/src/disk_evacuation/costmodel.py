"""Closed-form evacuation cost per exit position and worst case over exits.

The exit is parameterized by ``y``, its arc distance from the deployment point
``A`` on R1's side; by symmetry this covers every exit.  R1 finds it and runs
the meeting protocol against R2.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .geometry import DomainError, Point, boundary_point, rotate
from .solvers import (
    golden_max,
    h_prime_values,
    h_values,
    solve_f,
    solve_f_many,
    solve_p,
    solve_p_many,
    solve_psi,
)
from .trajectories import Algo, AlgorithmParams, Phase, detour_duration

DEFAULT_POINTS = 100_000
PHASE_ORDER = (
    Phase.PRE_DETOUR.value,
    Phase.DETOUR_SUB1.value,
    Phase.DETOUR_SUB2.value,
    Phase.POST_DETOUR.value,
)


@dataclass(frozen=True)
class EvacuationOutcome:
    exit_angle: float
    y: float
    discovery_time: float
    catch_time: float
    meeting_point: Point
    phase: str
    total_cost: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["meeting_point"] = [self.meeting_point.x, self.meeting_point.y]
        return d


@dataclass(frozen=True)
class WorstCaseReport:
    sup_cost: float
    arg_exit: float
    per_phase_sup: dict[str, float]
    params: AlgorithmParams
    algo: str = "C"
    per_phase_arg: dict[str, float] = field(default_factory=dict)

    @property
    def worst_phase(self) -> str:
        return max(self.per_phase_sup, key=self.per_phase_sup.get)

    def to_dict(self) -> dict:
        return {
            "algo": self.algo,
            "params": asdict(self.params),
            "sup_cost": self.sup_cost,
            "arg_exit": self.arg_exit,
            "worst_phase": self.worst_phase,
            "per_phase_sup": dict(self.per_phase_sup),
            "per_phase_arg": dict(self.per_phase_arg),
        }


def meeting_arc(y: float) -> float:
    """Arc travelled by the chased robot before the finder catches it on the boundary."""
    if not (-1e-12 <= y <= math.pi + 1e-12):
        raise DomainError(f"y={y} outside [0, pi]")
    if y <= 0.0:
        return 0.0
    if y >= math.pi:
        return math.pi
    lo, hi = 0.0, math.pi
    while hi - lo > 1e-14:
        mid = 0.5 * (lo + hi)
        if mid - solve_f(mid) > y:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _outcome(y, start, discovery, catch, meeting, phase) -> EvacuationOutcome:
    return EvacuationOutcome(
        exit_angle=start + y,
        y=y,
        discovery_time=discovery,
        catch_time=catch,
        meeting_point=rotate(meeting, start),
        phase=phase,
        total_cost=discovery + 2.0 * catch,
    )


def cost_A(y: float, start_angle: float = 0.0) -> EvacuationOutcome:
    """Cost of the boundary-only algorithm for an exit at arc ``y``: 1 + x + f(x)."""
    if not (-1e-12 <= y <= math.pi + 1e-12):
        raise DomainError(f"y={y} outside [0, pi]")
    y = min(max(y, 0.0), math.pi)
    x = meeting_arc(y)
    catch = x - y
    return _outcome(y, start_angle, 1.0 + y, catch, boundary_point(-x), Phase.PRE_DETOUR.value)


def _detour_points(p: AlgorithmParams):
    B = boundary_point(-p.chi)
    heading = Point(math.sin(p.phi), math.cos(p.phi))
    G = Point(B.x + p.lam * heading.x, B.y + p.lam * heading.y)
    return B, heading, G


def cost_C(y: float, params: AlgorithmParams, algo: Algo | str = Algo.C) -> EvacuationOutcome:
    """Phase-classified cost for an exit at arc ``y`` under the B or C family.

    Past the detour (``y > chi``) the per-exit cost is exact:
    ``1 + detour + y + 2 p(y)``; it decreases in ``y`` and tends to the
    phase supremum as the exit approaches the mirror of the detour point.
    """
    algo = Algo(algo)
    if algo is Algo.A:
        return cost_A(y, params.start_angle)
    p = params.for_algo(algo)
    p.validate(algo)
    if not (-1e-12 <= y <= math.pi + 1e-12):
        raise DomainError(f"y={y} outside [0, pi]")
    y = min(max(y, 0.0), math.pi)
    chi, phi, lam, a = p.chi, p.phi, p.lam, p.start_angle
    f_chi = solve_f(chi)
    if y < chi - f_chi:
        x = meeting_arc(y)
        return _outcome(y, a, 1.0 + y, x - y, boundary_point(-x), Phase.PRE_DETOUR.value)
    if y <= chi:
        B, heading, G = _detour_points(p)
        psi = solve_psi(chi, phi, lam)
        if y <= psi:
            h = h_values(y, chi, phi)
            q = y + h - chi
            meet = Point(B.x + q * heading.x, B.y + q * heading.y)
            return _outcome(y, a, 1.0 + y, h, meet, Phase.DETOUR_SUB1.value)
        h = h_prime_values(y, chi, phi, lam)
        q = y + h - chi - lam
        return _outcome(y, a, 1.0 + y, h, Point(G.x, G.y + q), Phase.DETOUR_SUB2.value)
    z = solve_p(y)
    return _outcome(
        y,
        a,
        1.0 + detour_duration(p) + y,
        float(z),
        boundary_point(-(y + z)),
        Phase.POST_DETOUR.value,
    )


def _refine(fn, grid: np.ndarray, values: np.ndarray):
    i = int(np.argmax(values))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    best = (float(grid[i]), float(values[i]))
    if hi > lo:
        x, v = golden_max(lambda t: float(fn(t)), float(lo), float(hi), 1e-12)
        if v > best[1]:
            best = (x, float(v))
    return best


def worst_case(
    params: AlgorithmParams, algo: Algo | str = Algo.C, points: int = DEFAULT_POINTS
) -> WorstCaseReport:
    """Supremum of the evacuation time over exits, per phase and overall.

    Each phase window is scanned on a grid of ``points`` samples and the best
    bracket refined by golden-section search.
    """
    algo = Algo(algo)
    per_sup: dict[str, float] = {}
    per_arg: dict[str, float] = {}

    if algo is Algo.A:
        xs = np.linspace(0.0, math.pi, points)
        x, v = _refine(lambda x: x + solve_f_many(x), xs, xs + solve_f_many(xs))
        per_sup[Phase.PRE_DETOUR.value] = 1.0 + v
        per_arg[Phase.PRE_DETOUR.value] = x - float(solve_f(x))
        return _report(per_sup, per_arg, params, algo)

    p = params.for_algo(algo)
    p.validate(algo)
    chi, phi, lam = p.chi, p.phi, p.lam
    f_chi = float(solve_f(chi))
    psi = float(solve_psi(chi, phi, lam))
    win = 1e-12

    # Before the detour the finder meets R2 on the boundary; search over the meeting arc.
    xs = np.linspace(0.0, chi, points)
    x, v = _refine(lambda x: x + solve_f_many(x), xs, xs + solve_f_many(xs))
    per_sup[Phase.PRE_DETOUR.value] = 1.0 + v
    per_arg[Phase.PRE_DETOUR.value] = x - float(solve_f(x))

    lo = chi - f_chi
    if psi - lo > win:
        ys = np.linspace(lo, psi, points)
        fn = lambda y: y + 2.0 * h_values(y, chi, phi)
        y, v = _refine(fn, ys, fn(ys))
        per_sup[Phase.DETOUR_SUB1.value] = 1.0 + v
        per_arg[Phase.DETOUR_SUB1.value] = y

    if chi - psi > win:
        ys = np.linspace(psi, chi, points)
        fn = lambda y: y + 2.0 * h_prime_values(y, chi, phi, lam)
        y, v = _refine(fn, ys, fn(ys))
        per_sup[Phase.DETOUR_SUB2.value] = 1.0 + v
        per_arg[Phase.DETOUR_SUB2.value] = y

    if math.pi - chi > win:
        # The grid's left end is the limit as the exit approaches D from beyond.
        det = detour_duration(p)
        ys = np.linspace(chi, math.pi, points)
        vals = det + ys + 2.0 * solve_p_many(ys)
        i = int(np.argmax(vals))
        per_sup[Phase.POST_DETOUR.value] = 1.0 + float(vals[i])
        per_arg[Phase.POST_DETOUR.value] = float(ys[i])

    return _report(per_sup, per_arg, p, algo)


def _report(per_sup, per_arg, params, algo) -> WorstCaseReport:
    worst = max(per_sup, key=per_sup.get)
    return WorstCaseReport(
        sup_cost=per_sup[worst],
        arg_exit=per_arg[worst],
        per_phase_sup=per_sup,
        params=params,
        algo=Algo(algo).value,
        per_phase_arg=per_arg,
    )


def closed_form_sweep(ys, params: AlgorithmParams, algo: Algo | str = Algo.C) -> list[EvacuationOutcome]:
    """Outcomes for each exit arc in ``ys``, in input order."""
    algo = Algo(algo)
    if algo is Algo.A:
        return [cost_A(float(y), params.start_angle) for y in ys]
    return [cost_C(float(y), params, algo) for y in ys]
