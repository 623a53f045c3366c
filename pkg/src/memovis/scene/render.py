"""Deterministic software renderer for orbit-camera views.

A z-buffered flat-shading rasterizer plus a matching raycaster. No GPU, no
lighting, no textures: the backend needs geometric fidelity and
bit-reproducible output, not photorealism (the web UI does the pretty
rendering client-side).

Conventions shared by rasterizer and raycaster:

- camera space: right = s, up = u, forward = f (unit, orthonormal); the
  depth of a point is its distance along f from the eye ("view z")
- pixel (row, col) has its center at continuous coords (col + 0.5, row + 0.5),
  row 0 at the top of the image
- depth maps are normalized linearly in view z between near = 0.01 * R_bs
  and far = 4 * R_bs (R_bs = scene bounding-sphere radius), clamped; pixels
  with no hit carry the sentinel 1.0 and actual hits clamp just below it
- coincident surfaces resolve to the lower mesh id, in both code paths
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..raster import DEPTH_HIT_MAX, DEPTH_SENTINEL
from .model import CameraPose, SceneModel, Viewpoint

NEAR_FACTOR = 0.01
FAR_FACTOR = 4.0

# Pole guard: when |cos(alpha)| exceeds this, +Y is unusable as camera up.
_POLE_COS_LIMIT = 0.999


@dataclass(frozen=True)
class RendererConfig:
    width: int = 512
    height: int = 512
    fov_degrees: float = 60.0
    background: tuple[int, int, int] = (255, 255, 255)

    @property
    def fov_y(self) -> float:
        return math.radians(self.fov_degrees)


def orbit_to_pose(
    v: Viewpoint, scene: SceneModel, config: RendererConfig = RendererConfig()
) -> CameraPose:
    """Resolve an orbit viewpoint into a renderable look-at camera.

    eye = target + (r * R_bs) * (sin a cos b, cos a, sin a sin b). Up is +Y
    except near the poles, where it switches to +Z.
    """
    r_bs = scene.bounding_sphere_radius
    if r_bs <= 0.0:
        raise ValueError("scene has a degenerate (zero-radius) bounding sphere")
    target = np.asarray(v.target, dtype=np.float64)
    direction = np.array(
        [
            math.sin(v.alpha) * math.cos(v.beta),
            math.cos(v.alpha),
            math.sin(v.alpha) * math.sin(v.beta),
        ]
    )
    eye = target + (v.r * r_bs) * direction
    if abs(math.cos(v.alpha)) > _POLE_COS_LIMIT:
        up = np.array([0.0, 0.0, 1.0])
    else:
        up = np.array([0.0, 1.0, 0.0])
    return CameraPose(
        eye=eye,
        target=target,
        up=up,
        fov_y=config.fov_y,
        width=config.width,
        height=config.height,
    )


def _camera_basis(pose: CameraPose):
    f = pose.target - pose.eye
    f = f / np.linalg.norm(f)
    s = np.cross(f, pose.up)
    s = s / np.linalg.norm(s)
    u = np.cross(s, f)
    return s, u, f


def _depth_range(scene: SceneModel) -> tuple[float, float]:
    r_bs = scene.bounding_sphere_radius
    return NEAR_FACTOR * r_bs, FAR_FACTOR * r_bs


def _normalize_depth(view_z: np.ndarray, near: float, far: float) -> np.ndarray:
    d = (view_z - near) / (far - near)
    return np.clip(d, 0.0, DEPTH_HIT_MAX).astype(np.float32)


def _clip_triangle_near(tri: np.ndarray, near: float) -> list[np.ndarray]:
    """Clip one camera-space triangle against the plane z > near.

    Returns 0, 1, or 2 triangles (the clipped polygon, fan-triangulated).
    """
    inside = tri[:, 2] > near
    if inside.all():
        return [tri]
    if not inside.any():
        return []
    poly = []
    for i in range(3):
        a, b = tri[i], tri[(i + 1) % 3]
        if inside[i]:
            poly.append(a)
        if inside[i] != inside[(i + 1) % 3]:
            t = (near - a[2]) / (b[2] - a[2])
            poly.append(a + t * (b - a))
    return [np.stack([poly[0], poly[i], poly[i + 1]]) for i in range(1, len(poly) - 1)]


def _rasterize(
    scene: SceneModel,
    pose: CameraPose,
    mesh_ids,
) -> tuple[np.ndarray, np.ndarray]:
    """Z-buffer rasterization of the given meshes.

    Returns (id_buffer, z_buffer): per-pixel winning mesh id (-1 = none) and
    its view-space depth. Meshes are processed in ascending id with a strict
    depth test, so coincident surfaces keep the lower id.
    """
    w, h = pose.width, pose.height
    s, u, f = _camera_basis(pose)
    near, _far = _depth_range(scene)
    tan_v = math.tan(pose.fov_y / 2.0)
    tan_h = tan_v * (w / h)

    z_buf = np.full((h, w), np.inf, dtype=np.float64)
    id_buf = np.full((h, w), -1, dtype=np.int32)

    for mesh in sorted(scene.meshes, key=lambda m: m.mesh_id):
        if mesh.mesh_id not in mesh_ids:
            continue
        rel = mesh.positions - pose.eye
        cam = np.column_stack([rel @ s, rel @ u, rel @ f])
        for tri_idx in mesh.triangles:
            for tri in _clip_triangle_near(cam[tri_idx], near):
                _rasterize_triangle(tri, mesh.mesh_id, tan_h, tan_v, w, h, z_buf, id_buf)

    return id_buf, z_buf


def _rasterize_triangle(tri, mesh_id, tan_h, tan_v, w, h, z_buf, id_buf):
    zs = tri[:, 2]
    px = (tri[:, 0] / (zs * tan_h) + 1.0) * (w / 2.0)
    py = (1.0 - tri[:, 1] / (zs * tan_v)) * (h / 2.0)

    area2 = (px[1] - px[0]) * (py[2] - py[0]) - (py[1] - py[0]) * (px[2] - px[0])
    if area2 == 0.0:
        return
    col0 = max(0, math.ceil(px.min() - 0.5))
    col1 = min(w - 1, math.floor(px.max() - 0.5))
    row0 = max(0, math.ceil(py.min() - 0.5))
    row1 = min(h - 1, math.floor(py.max() - 0.5))
    if col0 > col1 or row0 > row1:
        return

    cx = np.arange(col0, col1 + 1) + 0.5
    cy = np.arange(row0, row1 + 1) + 0.5
    gx, gy = np.meshgrid(cx, cy)

    def edge(ax, ay, bx, by):
        return (bx - ax) * (gy - ay) - (by - ay) * (gx - ax)

    e0 = edge(px[1], py[1], px[2], py[2])
    e1 = edge(px[2], py[2], px[0], py[0])
    e2 = edge(px[0], py[0], px[1], py[1])
    if area2 < 0:
        e0, e1, e2, a2 = -e0, -e1, -e2, -area2
    else:
        a2 = area2
    covered = (e0 >= 0) & (e1 >= 0) & (e2 >= 0)
    if not covered.any():
        return

    # Perspective-correct depth: 1/z is affine in screen space.
    inv_z = (e0 / zs[0] + e1 / zs[1] + e2 / zs[2]) / a2
    with np.errstate(divide="ignore"):
        z = 1.0 / inv_z

    rows = slice(row0, row1 + 1)
    cols = slice(col0, col1 + 1)
    closer = covered & (z < z_buf[rows, cols])
    z_buf[rows, cols][closer] = z[closer]
    id_buf[rows, cols][closer] = mesh_id


def render_rgb(
    scene: SceneModel,
    pose: CameraPose,
    exclude=frozenset(),
    background: tuple[int, int, int] = (255, 255, 255),
) -> np.ndarray:
    """Flat-shaded RGB render; excluded meshes contribute no fragments."""
    exclude = set(exclude)
    unknown = exclude - scene.mesh_ids
    if unknown:
        raise ValueError(f"exclude references unknown mesh ids: {sorted(unknown)}")
    id_buf, _ = _rasterize(scene, pose, scene.mesh_ids - exclude)

    img = np.empty((pose.height, pose.width, 3), dtype=np.uint8)
    img[:, :] = np.asarray(background, dtype=np.uint8)
    for mesh in scene.meshes:
        sel = id_buf == mesh.mesh_id
        if sel.any():
            img[sel] = np.asarray(mesh.base_color, dtype=np.uint8)
    return img


def render_depth(scene: SceneModel, pose: CameraPose, restrict=None) -> np.ndarray:
    """Normalized depth render; `restrict` limits rasterization to those meshes."""
    if restrict is not None:
        restrict = set(restrict)
        if not restrict:
            raise ValueError("restrict must be a non-empty set of mesh ids")
        unknown = restrict - scene.mesh_ids
        if unknown:
            raise ValueError(f"restrict references unknown mesh ids: {sorted(unknown)}")
        targets = restrict
    else:
        targets = scene.mesh_ids

    id_buf, z_buf = _rasterize(scene, pose, targets)
    near, far = _depth_range(scene)
    depth = np.full(id_buf.shape, DEPTH_SENTINEL, dtype=np.float32)
    hit = id_buf >= 0
    depth[hit] = _normalize_depth(z_buf[hit], near, far)
    return depth


def raycast_grid(
    scene: SceneModel,
    pose: CameraPose,
    pixels: np.ndarray,
    restrict=None,
) -> tuple[np.ndarray, np.ndarray]:
    """Cast rays through the centers of (row, col) pixels.

    Returns (mesh ids, view depths); id -1 where nothing is hit. Nearest
    triangle wins; ties go to the lower mesh id because meshes are visited
    in ascending id and replacement requires a strictly nearer hit.
    """
    pixels = np.atleast_2d(np.asarray(pixels))
    rows = pixels[:, 0].astype(np.float64)
    cols = pixels[:, 1].astype(np.float64)
    if (rows < 0).any() or (rows >= pose.height).any() or (cols < 0).any() or (cols >= pose.width).any():
        raise ValueError("pixel outside viewport")

    s, u, f = _camera_basis(pose)
    near, _far = _depth_range(scene)
    tan_v = math.tan(pose.fov_y / 2.0)
    tan_h = tan_v * (pose.width / pose.height)

    ax = (2.0 * (cols + 0.5) / pose.width - 1.0) * tan_h
    ay = (1.0 - 2.0 * (rows + 0.5) / pose.height) * tan_v
    # Directions scaled so the f-component is 1: the ray parameter t is then
    # exactly the view-space depth the rasterizer computes.
    dirs = f[None, :] + ax[:, None] * s[None, :] + ay[:, None] * u[None, :]

    n = len(dirs)
    best_t = np.full(n, np.inf)
    best_id = np.full(n, -1, dtype=np.int32)
    targets = scene.mesh_ids if restrict is None else set(restrict)

    tie_eps = 1e-12
    for mesh in sorted(scene.meshes, key=lambda m: m.mesh_id):
        if mesh.mesh_id not in targets:
            continue
        v0 = mesh.positions[mesh.triangles[:, 0]]
        v1 = mesh.positions[mesh.triangles[:, 1]]
        v2 = mesh.positions[mesh.triangles[:, 2]]
        for i in range(len(v0)):
            e1 = v1[i] - v0[i]
            e2 = v2[i] - v0[i]
            pvec = np.cross(dirs, e2)
            det = pvec @ e1
            valid = np.abs(det) > 1e-14
            if not valid.any():
                continue
            inv_det = np.where(valid, 1.0 / np.where(valid, det, 1.0), 0.0)
            tvec = pose.eye - v0[i]
            bu = (pvec @ tvec) * inv_det
            qvec = np.cross(tvec, e1)
            bv = (dirs @ qvec) * inv_det
            t = (qvec @ e2) * inv_det
            hit = (
                valid
                & (bu >= 0.0)
                & (bv >= 0.0)
                & (bu + bv <= 1.0)
                & (t > near)
                & (t < best_t - tie_eps)
            )
            best_t[hit] = t[hit]
            best_id[hit] = mesh.mesh_id

    return best_id, best_t


def raycast(scene: SceneModel, pose: CameraPose, pixel: tuple[int, int]):
    """Mesh id of the nearest surface under the pixel center, or None."""
    ids, _ = raycast_grid(scene, pose, np.array([pixel]))
    return int(ids[0]) if ids[0] >= 0 else None
