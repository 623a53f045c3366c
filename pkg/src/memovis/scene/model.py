"""Scene, camera, and viewpoint data types.

A loaded scene is immutable: meshes keep stable non-negative ids assigned
in document order, so "remove mesh 3" means the same thing on every render.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class TriangleMesh:
    """One triangulated mesh with a flat base color.

    positions: float64 (N, 3) vertex positions in scene units (world space).
    triangles: int64 (M, 3) indices into positions.
    base_color: uint8 RGB used for flat shading.
    """

    mesh_id: int
    positions: np.ndarray
    triangles: np.ndarray
    base_color: tuple[int, int, int] = (200, 200, 200)

    def __post_init__(self):
        if self.mesh_id < 0:
            raise ValueError("mesh_id must be non-negative")
        if self.positions.ndim != 2 or self.positions.shape[1] != 3:
            raise ValueError("positions must be (N, 3)")
        if self.triangles.ndim != 2 or self.triangles.shape[1] != 3:
            raise ValueError("triangles must be (M, 3)")


@dataclass(frozen=True)
class SceneModel:
    """An ordered collection of triangle meshes plus the overall bounds.

    fingerprint is the SHA-256 hex digest of the source file when loaded
    from disk, or a hash of the geometry for scenes built in memory.
    """

    meshes: tuple[TriangleMesh, ...]
    bounds_min: np.ndarray
    bounds_max: np.ndarray
    fingerprint: str = ""

    @classmethod
    def from_meshes(cls, meshes, fingerprint: str = "") -> "SceneModel":
        meshes = tuple(meshes)
        if not meshes:
            raise ValueError("scene must contain at least one mesh")
        ids = [m.mesh_id for m in meshes]
        if len(set(ids)) != len(ids):
            raise ValueError("mesh ids must be unique")
        lo = np.min([m.positions.min(axis=0) for m in meshes], axis=0)
        hi = np.max([m.positions.max(axis=0) for m in meshes], axis=0)
        if not fingerprint:
            digest = hashlib.sha256()
            for m in meshes:
                digest.update(m.positions.tobytes())
                digest.update(m.triangles.tobytes())
            fingerprint = digest.hexdigest()
        return cls(meshes=meshes, bounds_min=lo, bounds_max=hi, fingerprint=fingerprint)

    @property
    def mesh_ids(self) -> set[int]:
        return {m.mesh_id for m in self.meshes}

    def mesh(self, mesh_id: int) -> TriangleMesh:
        for m in self.meshes:
            if m.mesh_id == mesh_id:
                return m
        raise KeyError(f"unknown mesh id {mesh_id}")

    @property
    def bounds_center(self) -> np.ndarray:
        return (self.bounds_min + self.bounds_max) / 2.0

    @property
    def bounding_sphere_radius(self) -> float:
        """Radius of the sphere centered at the bounds center enclosing the box."""
        return float(np.linalg.norm(self.bounds_max - self.bounds_min) / 2.0)


@dataclass(frozen=True)
class Viewpoint:
    """Orbit-camera pose: (alpha, beta, r, tx, ty, tz).

    alpha is the latitudinal angle in [0, pi] measured from the +Y axis,
    beta the longitudinal angle in [0, 2*pi), and r the orbit distance as a
    multiple of the scene bounding-sphere radius.
    """

    alpha: float
    beta: float
    r: float
    target: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if not (0.0 <= self.alpha <= math.pi):
            raise ValueError(f"alpha must be in [0, pi], got {self.alpha}")
        if not (0.0 <= self.beta < 2.0 * math.pi):
            raise ValueError(f"beta must be in [0, 2*pi), got {self.beta}")
        if self.r <= 0.0:
            raise ValueError(f"r must be positive, got {self.r}")

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "r": self.r,
            "target": list(self.target),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Viewpoint":
        return cls(
            alpha=float(d["alpha"]),
            beta=float(d["beta"]),
            r=float(d["r"]),
            target=tuple(float(x) for x in d["target"]),
        )


@dataclass(frozen=True)
class CameraPose:
    """Resolved look-at camera for rendering."""

    eye: np.ndarray
    target: np.ndarray
    up: np.ndarray
    fov_y: float = math.radians(60.0)
    width: int = 512
    height: int = 512

    def __post_init__(self):
        if np.allclose(self.eye, self.target):
            raise ValueError("eye and target must differ")
        if not math.isclose(float(np.linalg.norm(self.up)), 1.0, rel_tol=1e-6):
            raise ValueError("up must be unit length")
        fwd = self.target - self.eye
        fwd = fwd / np.linalg.norm(fwd)
        if abs(float(np.dot(fwd, self.up))) > 1.0 - 1e-9:
            raise ValueError("up must not be parallel to the view direction")
        if self.width < 1 or self.height < 1:
            raise ValueError("viewport must be at least 1x1")
