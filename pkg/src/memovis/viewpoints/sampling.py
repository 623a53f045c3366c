"""Deterministic orbit-viewpoint grids over a scene's bounding box.

The grid is the cross product of target positions (bin centers of the
scene bounds along each axis), latitudinal and longitudinal angles (bin
centers of the angular ranges), and orbit radii. Enumeration order is
fixed so downstream indices can identify a viewpoint by row number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..scene import SceneModel, Viewpoint


@dataclass(frozen=True)
class SamplingConfig:
    """Grid resolution for viewpoint sampling.

    bins_per_axis: target bins along each of x, y, z.
    angle_step_degrees: angular bin width; must divide both 180 and 360.
    radii: orbit radii as multiples of the scene's bounding-sphere radius.
    """

    bins_per_axis: int = 5
    angle_step_degrees: float = 30.0
    radii: tuple[float, ...] = (0.5, 1.0, 1.5)

    def __post_init__(self):
        if self.bins_per_axis < 1:
            raise ValueError("bins_per_axis must be at least 1")
        step = self.angle_step_degrees
        if step <= 0:
            raise ValueError("angle_step_degrees must be positive")
        if (180.0 / step) % 1.0 != 0.0 or (360.0 / step) % 1.0 != 0.0:
            raise ValueError(
                f"angle_step_degrees={step} does not divide 180 and 360 evenly"
            )
        radii = tuple(float(r) for r in self.radii)
        if not radii:
            raise ValueError("radii must be non-empty")
        if any(r <= 0 for r in radii):
            raise ValueError("radii must be positive")
        object.__setattr__(self, "radii", radii)

    @property
    def alpha_count(self) -> int:
        return round(180.0 / self.angle_step_degrees)

    @property
    def beta_count(self) -> int:
        return round(360.0 / self.angle_step_degrees)

    @property
    def total_viewpoints(self) -> int:
        return self.bins_per_axis**3 * self.alpha_count * self.beta_count * len(self.radii)

    def to_dict(self) -> dict:
        return {
            "bins_per_axis": self.bins_per_axis,
            "angle_step_degrees": self.angle_step_degrees,
            "radii": list(self.radii),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SamplingConfig":
        return cls(
            bins_per_axis=int(data["bins_per_axis"]),
            angle_step_degrees=float(data["angle_step_degrees"]),
            radii=tuple(data["radii"]),
        )


def _bin_centers(lo: float, hi: float, bins: int) -> list[float]:
    width = (hi - lo) / bins
    return [lo + (i + 0.5) * width for i in range(bins)]


def sample_grid(scene: SceneModel, config: SamplingConfig | None = None) -> list[Viewpoint]:
    """Enumerate the full viewpoint grid for a scene.

    Order is target-major: targets iterate x, then y, then z bins, and for
    each target alpha varies slowest, then beta, then radius. The list
    length always equals config.total_viewpoints.
    """
    config = config or SamplingConfig()
    bins = config.bins_per_axis
    xs = _bin_centers(float(scene.bounds_min[0]), float(scene.bounds_max[0]), bins)
    ys = _bin_centers(float(scene.bounds_min[1]), float(scene.bounds_max[1]), bins)
    zs = _bin_centers(float(scene.bounds_min[2]), float(scene.bounds_max[2]), bins)

    step = math.radians(config.angle_step_degrees)
    alphas = [(i + 0.5) * step for i in range(config.alpha_count)]
    betas = [(i + 0.5) * step for i in range(config.beta_count)]

    grid: list[Viewpoint] = []
    for tx in xs:
        for ty in ys:
            for tz in zs:
                target = (tx, ty, tz)
                for alpha in alphas:
                    for beta in betas:
                        for r in config.radii:
                            grid.append(Viewpoint(alpha=alpha, beta=beta, r=r, target=target))
    return grid
