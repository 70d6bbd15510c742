"""Scene geometry: a normalized 2D plane with named gaze regions.

The scene is the square [-1, 1] x [-1, 1] with the avatar at the origin.
Three regions matter for the task: the avatar's eye region and one object
slot on each side. All regions are closed sets (boundary points count as
inside), which keeps threshold examples exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError

AVATAR_EYES = "avatar_eyes"
OBJECT_LEFT = "object_left"
OBJECT_RIGHT = "object_right"


@dataclass(frozen=True, slots=True)
class GazeSample:
    """One timestamped gaze point; invalid samples carry no usable x/y."""

    t_ms: float
    x: float
    y: float
    valid: bool = True


@dataclass(frozen=True, slots=True)
class Circle:
    cx: float
    cy: float
    radius: float

    def contains(self, x: float, y: float) -> bool:
        dx = x - self.cx
        dy = y - self.cy
        return dx * dx + dy * dy <= self.radius * self.radius

    @property
    def center(self) -> tuple[float, float]:
        return (self.cx, self.cy)


@dataclass(frozen=True, slots=True)
class Rect:
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def contains(self, x: float, y: float) -> bool:
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max

    @property
    def center(self) -> tuple[float, float]:
        return ((self.x_min + self.x_max) / 2.0, (self.y_min + self.y_max) / 2.0)


Shape = Circle | Rect


@dataclass(frozen=True, slots=True)
class Roi:
    roi_id: str
    shape: Shape

    def __post_init__(self):
        s = self.shape
        if isinstance(s, Circle):
            if s.radius <= 0:
                raise ConfigError("roi.shape.radius", f"must be > 0 for {self.roi_id!r}")
        else:
            if s.x_min >= s.x_max or s.y_min >= s.y_max:
                raise ConfigError("roi.shape", f"rectangle min must be < max per axis for {self.roi_id!r}")

    def contains(self, x: float, y: float) -> bool:
        return self.shape.contains(x, y)

    @property
    def center(self) -> tuple[float, float]:
        return self.shape.center


def point_in_roi(sample: GazeSample, roi: Roi) -> bool:
    """Closed-region containment; callers are expected to gate on sample.valid."""
    return roi.contains(sample.x, sample.y)


def _shapes_disjoint(a: Shape, b: Shape) -> bool:
    if isinstance(a, Circle) and isinstance(b, Circle):
        d = math.hypot(a.cx - b.cx, a.cy - b.cy)
        return d > a.radius + b.radius
    if isinstance(a, Rect) and isinstance(b, Rect):
        overlap_x = a.x_min <= b.x_max and b.x_min <= a.x_max
        overlap_y = a.y_min <= b.y_max and b.y_min <= a.y_max
        return not (overlap_x and overlap_y)
    circle, rect = (a, b) if isinstance(a, Circle) else (b, a)
    nx = min(max(circle.cx, rect.x_min), rect.x_max)
    ny = min(max(circle.cy, rect.y_min), rect.y_max)
    return math.hypot(circle.cx - nx, circle.cy - ny) > circle.radius


@dataclass(frozen=True)
class Scene:
    """The fixed set of regions a session is played against."""

    rois: tuple[Roi, ...]

    def __post_init__(self):
        ids = [r.roi_id for r in self.rois]
        if len(set(ids)) != len(ids):
            raise ConfigError("scene.rois", "roi ids must be unique")
        for i, ra in enumerate(self.rois):
            for rb in self.rois[i + 1:]:
                if not _shapes_disjoint(ra.shape, rb.shape):
                    raise ConfigError("scene.rois", f"{ra.roi_id!r} and {rb.roi_id!r} overlap")

    def roi(self, roi_id: str) -> Roi:
        for r in self.rois:
            if r.roi_id == roi_id:
                return r
        raise KeyError(roi_id)

    def hit(self, x: float, y: float) -> str | None:
        """Id of the region containing (x, y), or None. Regions are disjoint."""
        for r in self.rois:
            if r.shape.contains(x, y):
                return r.roi_id
        return None


DEFAULT_SCENE = Scene((
    Roi(AVATAR_EYES, Circle(0.0, 0.30, 0.15)),
    Roi(OBJECT_LEFT, Rect(-0.78, -0.28, -0.42, 0.08)),
    Roi(OBJECT_RIGHT, Rect(0.42, -0.28, 0.78, 0.08)),
))
