"""Spatial detection-score grid for camera-coverage visualization.

Each cell holds the best score any camera would assign a lone probe agent
standing at the cell center: per camera, the probe is evaluated over the
eight compass headings and the best heading kept, then the per-camera
results are reduced with the same max rule the trajectory verdict uses.
Cells outside every camera's view are exactly zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .detection import DetectionWeights, NormalizationBounds
from .errors import ConfigError
from .geometry import Point2D, Rect, unit_vector
from .station import Camera

COMPASS_HEADINGS = tuple(float(a) for a in range(0, 360, 45))


@dataclass(frozen=True)
class HeatmapGrid:
    origin: Point2D
    cell_size: float
    width: int
    height: int
    values: tuple[float, ...]  # row-major, rows along +y

    def __post_init__(self) -> None:
        if len(self.values) != self.width * self.height:
            raise ConfigError("heatmap values do not match grid dimensions")

    def value_at(self, col: int, row: int) -> float:
        return self.values[row * self.width + col]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values).reshape(self.height, self.width)

    def to_dict(self) -> dict:
        return {
            "origin": {"x": self.origin.x, "y": self.origin.y},
            "cell_size": self.cell_size,
            "width": self.width,
            "height": self.height,
            "values": list(self.values),
        }


def compute_heatmap(bounds: Rect, cameras: list[Camera] | tuple[Camera, ...],
                    weights: DetectionWeights, norm: NormalizationBounds,
                    cell_size: float = 0.5) -> HeatmapGrid:
    """Evaluate the probe-agent score over a grid covering the bounds."""
    if cell_size <= 0:
        raise ConfigError("cell_size must be positive")
    width = max(1, math.ceil(bounds.width / cell_size))
    height = max(1, math.ceil(bounds.height / cell_size))
    xs = bounds.x_min + (np.arange(width) + 0.5) * cell_size
    ys = bounds.y_min + (np.arange(height) + 0.5) * cell_size
    gx, gy = np.meshgrid(xs, ys)  # shape (height, width)

    best = np.zeros((height, width))
    # a probe agent is alone in view: the density term counts just itself
    n_norm = min(1, norm.n_max) / norm.n_max
    if norm.inverted_dn:
        n_norm = 1.0 - n_norm

    for cam in cameras:
        dx = gx - cam.position.x
        dy = gy - cam.position.y
        dist = np.hypot(dx, dy)
        bearing = np.degrees(np.arctan2(dy, dx)) % 360.0
        offset = np.abs(bearing - cam.pan_deg) % 360.0
        offset = np.minimum(offset, 360.0 - offset)
        in_view = ((dist >= cam.min_range_m) & (dist <= cam.max_range_m)
                   & (offset <= cam.fov_deg / 2.0))
        if not in_view.any():
            continue

        ax, ay = unit_vector(cam.pan_deg)
        best_a_norm = 0.0
        for heading in COMPASS_HEADINGS:
            hx, hy = unit_vector(heading)
            cosang = max(-1.0, min(1.0, ax * hx + ay * hy))
            a_deg = 180.0 - math.degrees(math.acos(cosang))
            a_norm = 0.0 if a_deg > norm.a_max else 1.0 - a_deg / norm.a_max
            best_a_norm = max(best_a_norm, a_norm)

        d_norm = np.clip((dist - norm.d_min) / norm.d_max, 0.0, 1.0)
        if norm.inverted_dn:
            d_norm = 1.0 - d_norm
        p = (weights.w_a * best_a_norm + weights.w_d * d_norm
             + weights.w_n * n_norm)
        np.maximum(best, np.where(in_view, p, 0.0), out=best)

    return HeatmapGrid(
        origin=Point2D(bounds.x_min, bounds.y_min),
        cell_size=cell_size,
        width=width,
        height=height,
        values=tuple(float(v) for v in best.ravel()),
    )
