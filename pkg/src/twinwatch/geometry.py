"""Small 2D ground-plane geometry helpers.

Coordinates are meters in station-local axes. Azimuths are degrees in
[0, 360), measured counterclockwise from +x, so 90 degrees points along +y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class Point2D:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise DomainError(f"non-finite point ({self.x}, {self.y})")

    def distance_to(self, other: "Point2D") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle, min/max corners in meters."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self) -> None:
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise DomainError("rectangle has inverted corners")

    def contains(self, p: Point2D, tol: float = 1e-9) -> bool:
        return (self.x_min - tol <= p.x <= self.x_max + tol
                and self.y_min - tol <= p.y <= self.y_max + tol)

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    def center(self) -> Point2D:
        return Point2D((self.x_min + self.x_max) / 2, (self.y_min + self.y_max) / 2)


def unit_vector(azimuth_deg: float) -> tuple[float, float]:
    """Unit direction for an azimuth in degrees CCW from +x."""
    r = math.radians(azimuth_deg)
    return (math.cos(r), math.sin(r))


def azimuth_of(dx: float, dy: float) -> float:
    """Azimuth in [0, 360) of the vector (dx, dy)."""
    return math.degrees(math.atan2(dy, dx)) % 360.0


def angle_between(ax: float, ay: float, bx: float, by: float) -> float:
    """Angle in degrees in [0, 180] between two nonzero vectors."""
    na = math.hypot(ax, ay)
    nb = math.hypot(bx, by)
    if na == 0.0 or nb == 0.0:
        raise DomainError("angle of zero-length vector")
    c = (ax * bx + ay * by) / (na * nb)
    return math.degrees(math.acos(max(-1.0, min(1.0, c))))


def wrap_angle_deg(a: float) -> float:
    """Wrap to [0, 360)."""
    return a % 360.0


def angular_offset_deg(a: float, b: float) -> float:
    """Smallest absolute difference between two azimuths, in [0, 180]."""
    d = abs(a - b) % 360.0
    return min(d, 360.0 - d)


def point_segment_distance(p: Point2D, a: Point2D, b: Point2D) -> float:
    """Distance from p to the closed segment a-b."""
    abx, aby = b.x - a.x, b.y - a.y
    seg_len2 = abx * abx + aby * aby
    if seg_len2 == 0.0:
        return p.distance_to(a)
    t = ((p.x - a.x) * abx + (p.y - a.y) * aby) / seg_len2
    t = max(0.0, min(1.0, t))
    return math.hypot(p.x - (a.x + t * abx), p.y - (a.y + t * aby))


def point_on_segment(a: Point2D, b: Point2D, t: float) -> Point2D:
    """Point at parameter t in [0, 1] along the segment a-b."""
    return Point2D(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))
