"""Parameter search for the detour family.

Candidates live in normalized coordinates ``u = (u_chi, u_phi, u_lam)`` in the
unit cube.  They map onto the coupled box by sampling chi first, then
phi given chi, then lambda given both, so every candidate is admissible by
construction.  A coarse grid and a compass pattern search locate the basin.

The objective is a max of smooth phase suprema, and the optimum sits where
three or four of them meet.  Direct search crawls along such ridges, so the
last stage is a trust-region sequential linear program on the phase suprema
themselves, with finite-difference gradients.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .costmodel import WorstCaseReport, worst_case
from .solvers import ParameterError, critical_arc, phi_max
from .trajectories import Algo, AlgorithmParams

LAM_MAX = "max"


@dataclass(frozen=True)
class SearchSpec:
    """Bounds and fixings for the search.

    ``chi``, ``phi`` and ``lam`` fix a coordinate when set; ``lam="max"`` pins
    lambda to its upper bound (the B family).
    """

    chi_bounds: tuple[float, float] | None = None
    chi: float | None = None
    phi: float | None = None
    lam: float | str | None = None
    grid: int = 5
    refine_iters: int = 200
    pattern_tol: float = 0.1
    tol: float = 1e-9
    polish_iters: int = 60
    starts: int = 4
    points: int = 2000
    jobs: int = 1

    def __post_init__(self):
        lo, hi = self.bounds
        if not math.pi / 2 - 1e-12 <= lo <= hi <= critical_arc() + 1e-12:
            raise ParameterError(f"chi bounds [{lo}, {hi}] outside [pi/2, x0]")
        if self.chi is not None and not lo - 1e-12 <= self.chi <= hi + 1e-12:
            raise ParameterError(f"fixed chi={self.chi} outside [{lo}, {hi}]")
        if self.phi is not None and self.phi < 0:
            raise ParameterError(f"phi={self.phi} is negative")
        if isinstance(self.lam, str) and self.lam != LAM_MAX:
            raise ParameterError(f"lam must be a number or {LAM_MAX!r}")
        if not isinstance(self.lam, str) and self.lam is not None and self.lam < 0:
            raise ParameterError(f"lam={self.lam} is negative")
        if self.grid < 2:
            raise ParameterError("grid needs at least two points per axis")

    @property
    def bounds(self) -> tuple[float, float]:
        return self.chi_bounds or (math.pi / 2, critical_arc())

    @property
    def free(self) -> tuple[int, ...]:
        return tuple(
            i for i, v in enumerate((self.chi, self.phi, self.lam)) if v is None
        )

    def params_at(self, u) -> AlgorithmParams:
        """Map a full normalized vector onto admissible parameters."""
        lo, hi = self.bounds
        chi = self.chi if self.chi is not None else lo + u[0] * (hi - lo)
        pmax = float(phi_max(chi))
        phi = self.phi if self.phi is not None else u[1] * pmax
        if phi > pmax + 1e-12:
            raise ParameterError(f"phi exceeds f(chi)/2: {phi} > {pmax}")
        lmax = math.sin(chi) / math.cos(phi)
        if self.lam == LAM_MAX:
            lam = lmax
        elif self.lam is not None:
            lam = float(self.lam)
            if lam > lmax + 1e-12:
                raise ParameterError(f"lambda exceeds sin(chi)/cos(phi): {lam} > {lmax}")
        else:
            lam = u[2] * lmax
        return AlgorithmParams(float(chi), float(phi), float(lam))

    @classmethod
    def full(cls, **kw) -> SearchSpec:
        return cls(**kw)

    @classmethod
    def b_family(cls, phi: float = 0.0, **kw) -> SearchSpec:
        return cls(phi=phi, lam=LAM_MAX, **kw)


@dataclass(frozen=True)
class TraceRow:
    chi: float
    phi: float
    lam: float
    sup_cost: float
    stage: str


@dataclass
class _Objective:
    spec: SearchSpec
    cache: dict = field(default_factory=dict)
    trace: list | None = None

    def __call__(self, us, stage: str) -> list[float]:
        todo = [u for u in dict.fromkeys(us) if u not in self.cache]
        if todo:
            if self.spec.jobs > 1 and len(todo) > 1:
                with ProcessPoolExecutor(self.spec.jobs) as pool:
                    vals = list(pool.map(_evaluate, [self.spec] * len(todo), todo))
            else:
                vals = [_evaluate(self.spec, u) for u in todo]
            for u, v in zip(todo, vals):
                self.cache[u] = v
                if self.trace is not None:
                    p = self.spec.params_at(u)
                    self.trace.append(TraceRow(p.chi, p.phi, p.lam, v, stage))
        return [self.cache[u] for u in us]


def _evaluate(spec: SearchSpec, u) -> float:
    return worst_case(spec.params_at(u), Algo.C, spec.points).sup_cost


def optimize(
    spec: SearchSpec = SearchSpec(), trace: list | None = None
) -> tuple[AlgorithmParams, WorstCaseReport]:
    """Minimize the worst-case evacuation time over the family described by ``spec``.

    Deterministic: the grid is visited in lexicographic order, ties keep the
    earliest candidate, and poll directions follow a fixed sequence.
    Pass a list as ``trace`` to collect every evaluated candidate.
    """
    free = spec.free
    obj = _Objective(spec, trace=trace)
    axis = [i / (spec.grid - 1) for i in range(spec.grid)]

    def full(vals):
        u = [0.0, 0.0, 0.0]
        for i, v in zip(free, vals):
            u[i] = v
        return tuple(u)

    cands = [full(c) for c in itertools.product(axis, repeat=len(free))]
    vals = obj(cands, "grid")
    ranked = sorted(range(len(cands)), key=lambda i: (vals[i], i))
    best, best_val = cands[ranked[0]], vals[ranked[0]]
    if free:
        # The coupled box has boundary stationary points (e.g. the B family at
        # phi = lam = 0), so several grid leaders are refined independently.
        for k in ranked[: spec.starts]:
            u = _pattern(spec, obj, cands[k])
            u = _polish(spec, u, trace)
            v = obj([u], "polish")[0]
            if v < best_val:
                best, best_val = u, v
    params = spec.params_at(best)
    return params, worst_case(params, Algo.C, max(spec.points, 20_000))


def _pattern(spec: SearchSpec, obj: _Objective, best):
    best_val = obj([best], "refine")[0]
    step = 1.0 / (spec.grid - 1)
    for _ in range(spec.refine_iters):
        if step < spec.pattern_tol:
            break
        polls = []
        for i in spec.free:
            for sgn in (1.0, -1.0):
                u = list(best)
                u[i] = min(max(u[i] + sgn * step, 0.0), 1.0)
                if tuple(u) != best:
                    polls.append(tuple(u))
        pv = obj(polls, "refine")
        j = min(range(len(polls)), key=lambda i: (pv[i], i))
        if pv[j] < best_val:
            best, best_val = polls[j], pv[j]
        else:
            step *= 0.5
    return best


def _phase_values(spec: SearchSpec, u) -> dict[str, float]:
    return worst_case(spec.params_at(u), Algo.C, spec.points).per_phase_sup


def _polish(spec: SearchSpec, u0, trace: list | None, fd: float = 1e-6):
    """Trust-region SLP for min over u of max_i S_i(u) in the free coordinates."""
    from scipy.optimize import linprog

    free = spec.free
    u = np.array(u0, dtype=float)
    vals = _phase_values(spec, tuple(u))
    radius = 0.05
    for _ in range(spec.polish_iters):
        if radius < spec.tol:
            break
        phases = sorted(vals)
        grads = np.zeros((len(phases), len(free)))
        for c, i in enumerate(free):
            h = fd if u[i] + fd <= 1.0 else -fd
            v = u.copy()
            v[i] += h
            shifted = _phase_values(spec, tuple(v))
            for r, k in enumerate(phases):
                grads[r, c] = (shifted.get(k, vals[k]) - vals[k]) / h
        cur = max(vals.values())
        # Variables (d, t): minimize t subject to S_k + g_k . d <= t.
        A = np.hstack([grads, -np.ones((len(phases), 1))])
        b = -np.array([vals[k] - cur for k in phases])
        bounds = [(max(-radius, -u[i]), min(radius, 1.0 - u[i])) for i in free] + [(None, None)]
        lp = linprog(np.r_[np.zeros(len(free)), 1.0], A_ub=A, b_ub=b, bounds=bounds, method="highs")
        if lp.status != 0:
            break
        trial = u.copy()
        trial[list(free)] += lp.x[:-1]
        try:
            tvals = _phase_values(spec, tuple(trial))
        except ParameterError:
            radius *= 0.25
            continue
        if trace is not None:
            p = spec.params_at(tuple(trial))
            trace.append(TraceRow(p.chi, p.phi, p.lam, max(tvals.values()), "polish"))
        if max(tvals.values()) < cur:
            u, vals = trial, tvals
            radius = min(2.0 * radius, 0.1)
        else:
            radius *= 0.25
    return tuple(float(x) for x in u)


def equalization_report(
    params: AlgorithmParams, algo: Algo | str = Algo.C, points: int = 20_000
) -> dict[str, float]:
    """Per-phase supremum minus the overall supremum (all entries are <= 0)."""
    rep = worst_case(params, algo, points)
    return {k: v - rep.sup_cost for k, v in rep.per_phase_sup.items()}
