"""Scalar root finding for the interception equations and the closed-form catch-up times.

Two transcendental equations recur throughout:

* ``z = 2 sin(x - z/2)``: chord a finder covers when chasing a robot that is
  ahead of it on the boundary by an arc ``x`` measured from the deployment point.
* ``z = 2 sin(x + z/2)``: the same chase after both robots have passed the
  detour, with the exit at arc ``x``.

Both residuals are monotone in ``z`` on ``[0, 2]``, so the roots are unique and
bracketed bisection followed by a guarded Newton polish is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cache
from typing import Callable

import numpy as np

from .geometry import DomainError

ROOT_TOL = 1e-12
_BISECT_ITERS = 60
_NEWTON_STEPS = 3
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class ParameterError(ValueError):
    """Algorithm parameters violate their admissible ranges."""


class InfeasibleParametersError(ParameterError):
    """No sign change in a bracket that should contain a root."""


class Root(float):
    """A root value that remembers its back-substitution residual."""

    residual: float

    def __new__(cls, value: float, residual: float):
        obj = super().__new__(cls, value)
        obj.residual = residual
        return obj


@dataclass(frozen=True)
class RootBracket:
    lo: float
    hi: float
    tol: float = ROOT_TOL

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError(f"empty bracket [{self.lo}, {self.hi}]")


def bisect(fn: Callable[[float], float], bracket: RootBracket) -> float:
    """Root of an increasing-through-zero ``fn`` inside ``bracket``.

    Requires ``fn(lo) <= 0 <= fn(hi)`` (either sign order is accepted).
    """
    lo, hi = bracket.lo, bracket.hi
    flo, fhi = fn(lo), fn(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise InfeasibleParametersError(
            f"no sign change on [{lo}, {hi}]: f(lo)={flo:.3e}, f(hi)={fhi:.3e}"
        )
    rising = fhi > 0
    while hi - lo > bracket.tol:
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == rising:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _polish(g, dg, z, lo, hi):
    r = g(z)
    for _ in range(_NEWTON_STEPS):
        d = dg(z)
        if d <= 1e-14:
            break
        cand = z - r / d
        if not lo <= cand <= hi:
            break
        rc = g(cand)
        if abs(rc) >= abs(r):
            break
        z, r = cand, rc
    return z, r


def solve_f(x: float) -> Root:
    """Chord ``z`` with ``z = 2 sin(x - z/2)`` for ``x`` in ``[0, pi]``.

    At ``x = pi`` the root 0 is triple (the residual is ``z^3/24`` near 0), so
    it is returned exactly instead of bisected.
    """
    if not (-ROOT_TOL <= x <= math.pi + ROOT_TOL):
        raise DomainError(f"x={x} outside [0, pi]")
    x = min(max(x, 0.0), math.pi)
    if x == math.pi:
        return Root(0.0, 0.0)
    g = lambda z: z - 2.0 * math.sin(x - 0.5 * z)
    dg = lambda z: 1.0 + math.cos(x - 0.5 * z)
    z = bisect(g, RootBracket(0.0, 2.0, ROOT_TOL * 0.1))
    z, r = _polish(g, dg, z, 0.0, 2.0)
    return Root(z, abs(r))


def solve_p(x: float) -> Root:
    """Chord ``z`` with ``z = 2 sin(x + z/2)`` for ``x`` in ``(0, pi]``.

    At ``x = pi`` the only root is the degenerate ``0`` (both robots at the
    antipode); ``x <= 0`` is rejected.
    """
    if not (0.0 < x <= math.pi + ROOT_TOL):
        raise DomainError(f"x={x} outside (0, pi]")
    x = min(x, math.pi)
    g = lambda z: z - 2.0 * math.sin(x + 0.5 * z)
    dg = lambda z: 1.0 - math.cos(x + 0.5 * z)
    z = bisect(g, RootBracket(0.0, 2.0, ROOT_TOL * 0.1))
    z, r = _polish(g, dg, z, 0.0, 2.0)
    return Root(z, abs(r))


def _solve_many(xs, sign: float) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    lo = np.zeros_like(xs)
    hi = np.full_like(xs, 2.0)
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        up = mid - 2.0 * np.sin(xs + sign * 0.5 * mid) > 0
        hi = np.where(up, mid, hi)
        lo = np.where(up, lo, mid)
    z = 0.5 * (lo + hi)
    r = z - 2.0 * np.sin(xs + sign * 0.5 * z)
    for _ in range(_NEWTON_STEPS):
        d = 1.0 - sign * np.cos(xs + sign * 0.5 * z)
        ok = d > 1e-14
        cand = np.clip(z - np.where(ok, r / np.where(ok, d, 1.0), 0.0), 0.0, 2.0)
        rc = cand - 2.0 * np.sin(xs + sign * 0.5 * cand)
        better = np.abs(rc) < np.abs(r)
        z = np.where(better, cand, z)
        r = np.where(better, rc, r)
    if sign < 0:
        z = np.where(xs >= math.pi, 0.0, z)
    return z


def solve_f_many(xs) -> np.ndarray:
    """Vectorized :func:`solve_f` (no domain checks)."""
    return _solve_many(xs, -1.0)


def solve_p_many(xs) -> np.ndarray:
    """Vectorized :func:`solve_p` (no domain checks)."""
    return _solve_many(xs, 1.0)


def golden_max(fn: Callable[[float], float], a: float, b: float, tol: float = 1e-12):
    """Golden-section search for the maximum of a unimodal ``fn`` on ``[a, b]``.

    Returns ``(x, fn(x))``; the endpoints are compared too, so a monotone
    ``fn`` yields the larger endpoint.
    """
    a, b = min(a, b), max(a, b)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = fn(d)
    best = max(((c, fc), (d, fd), (a, fn(a)), (b, fn(b))), key=lambda t: t[1])
    return best


@cache
def critical_arc() -> float:
    """Meeting arc maximizing ``x + f(x)`` on ``[0, pi]`` (about 2.85344)."""
    xs = np.linspace(0.0, math.pi, 20001)
    i = int(np.argmax(xs + solve_f_many(xs)))
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
    x, _ = golden_max(lambda x: x + solve_f(x), lo, hi, 1e-13)
    return float(x)


def phi_max(chi: float) -> float:
    """Largest admissible detour angle for a given detour arc: f(chi)/2."""
    return 0.5 * solve_f(chi)


def _check_phi(chi, phi):
    if not (-ROOT_TOL <= phi <= phi_max(chi) + ROOT_TOL):
        raise ParameterError(f"phi={phi} outside [0, f(chi)/2]")


def h_values(y, chi: float, phi: float):
    """Catch-up distance on the first detour leg; no domain checks, vectorizes."""
    y = np.asarray(y, dtype=float)
    d = chi - y
    num = 2.0 + d * d - 2.0 * np.cos(chi + y) + 2.0 * d * (np.sin(phi + y) - math.sin(phi - chi))
    den = 2.0 * (d - math.sin(phi - chi) + np.sin(phi + y))
    out = num / den
    return float(out) if out.ndim == 0 else out


def h_prime_values(y, chi: float, phi: float, lam: float):
    """Catch-up distance on the perpendicular detour leg; no domain checks, vectorizes."""
    y = np.asarray(y, dtype=float)
    e = lam + chi - y
    s = math.sin(chi) + np.sin(y) - lam * math.cos(phi)
    num = (
        2.0
        + lam * lam
        + e * e
        + 2.0 * lam * (math.sin(phi - chi) - np.sin(phi + y))
        + 2.0 * e * s
        - 2.0 * np.cos(chi + y)
    )
    out = num / (2.0 * (e + s))
    return float(out) if out.ndim == 0 else out


def eval_h(y: float, chi: float, phi: float) -> float:
    """Distance the finder covers to catch its partner on the first detour leg.

    Valid for exits at arc ``y`` in ``[chi - f(chi), chi]`` from the
    deployment point, where the interception lands on the line leaving the
    detour point at angle ``phi``.
    """
    _check_phi(chi, phi)
    lo = chi - solve_f(chi)
    if not (lo - ROOT_TOL <= y <= chi + ROOT_TOL):
        raise DomainError(f"y={y} outside [{lo}, {chi}]")
    return h_values(y, chi, phi)


def solve_psi(chi: float, phi: float, lam: float) -> Root:
    """Exit arc at which interception moves from the first to the second detour leg."""
    _check_phi(chi, phi)
    lo = chi - solve_f(chi)
    if lam <= 0.0:
        return Root(lo, abs(h_values(lo, chi, phi) - (chi + lam - lo)))
    r = lambda y: h_values(y, chi, phi) + y - chi - lam
    # r(lo) equals -lam up to rounding; a non-negative value means lam is
    # below resolution and the first leg is never reached.
    if r(lo) >= 0.0:
        return Root(lo, abs(r(lo)))
    if r(chi) < 0.0:
        if r(chi) > -1e-13:
            return Root(chi, abs(r(chi)))
        raise InfeasibleParametersError(
            f"lambda={lam} exceeds sin(chi)/cos(phi)={math.sin(chi) / math.cos(phi)}"
        )
    y = bisect(r, RootBracket(lo, chi, 1e-14))
    return Root(y, abs(r(y)))


def eval_h_prime(y: float, chi: float, phi: float, lam: float) -> float:
    """Distance the finder covers to catch its partner on the perpendicular leg.

    Valid for ``y`` in ``[psi, chi]``.
    """
    psi = solve_psi(chi, phi, lam)
    if not (psi - 1e-10 <= y <= chi + ROOT_TOL):
        raise DomainError(f"y={y} outside [psi={float(psi)}, chi={chi}]")
    return h_prime_values(y, chi, phi, lam)
