"""Planar primitives on the unit disk: points, arcs, chords and reflections."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

TWO_PI = 2.0 * math.pi
GEOM_TOL = 1e-12
DERIVED_TOL = 1e-9


class DomainError(ValueError):
    """An argument lies outside the domain of a geometric or numeric operation."""


class Point(NamedTuple):
    x: float
    y: float

    def __add__(self, other):  # type: ignore[override]
        return Point(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Point(self.x - other[0], self.y - other[1])

    def scale(self, k: float) -> Point:
        return Point(k * self.x, k * self.y)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def dist(self, other) -> float:
        return math.hypot(self.x - other[0], self.y - other[1])

    def on_boundary(self, tol: float = GEOM_TOL) -> bool:
        return abs(self.x * self.x + self.y * self.y - 1.0) <= tol


ORIGIN = Point(0.0, 0.0)


@dataclass(frozen=True)
class Arc:
    """Arc of the unit circle; positive ``length`` runs counterclockwise."""

    start_angle: float
    length: float

    def __post_init__(self):
        if abs(self.length) > TWO_PI + GEOM_TOL:
            raise DomainError(f"arc length {self.length} exceeds 2*pi")

    @property
    def end_angle(self) -> float:
        return self.start_angle + self.length

    def point_at(self, s: float) -> Point:
        """Point after arc-length ``s`` from the start (clamped to the arc)."""
        s = min(max(s, 0.0), abs(self.length))
        return boundary_point(self.start_angle + math.copysign(s, self.length))

    def offset_of(self, angle: float, tol: float = DERIVED_TOL) -> float | None:
        """Arc-length offset at which the arc passes ``angle``, or None."""
        d = ((angle - self.start_angle) * (1.0 if self.length >= 0 else -1.0)) % TWO_PI
        if TWO_PI - d <= tol:
            d = 0.0
        if d <= abs(self.length) + tol:
            return min(d, abs(self.length))
        return None


def normalize_angle(angle: float) -> float:
    """Map an angle to [0, 2*pi)."""
    a = math.fmod(angle, TWO_PI)
    if a < 0.0:
        a += TWO_PI
    if a >= TWO_PI:
        a = 0.0
    return a


def chord_of_arc(arc_len: float) -> float:
    """Chord length subtending an arc of the unit circle: 2 sin(arc/2)."""
    if not (0.0 <= arc_len <= TWO_PI + GEOM_TOL) or math.isnan(arc_len):
        raise DomainError(f"arc length {arc_len} outside [0, 2*pi]")
    return max(0.0, 2.0 * math.sin(0.5 * min(arc_len, TWO_PI)))


def boundary_point(angle: float) -> Point:
    return Point(math.cos(angle), math.sin(angle))


def rotate(p, angle: float) -> Point:
    c, s = math.cos(angle), math.sin(angle)
    return Point(c * p[0] - s * p[1], s * p[0] + c * p[1])


def reflect_across_axis(p, axis_angle: float) -> Point:
    """Mirror ``p`` across the line through the origin at ``axis_angle``."""
    c, s = math.cos(2.0 * axis_angle), math.sin(2.0 * axis_angle)
    return Point(c * p[0] + s * p[1], s * p[0] - c * p[1])


def angle_of(p) -> float:
    return math.atan2(p[1], p[0])
