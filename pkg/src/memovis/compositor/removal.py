"""Hidden-primitive selection: drop scene meshes that sit behind generated content.

When a generated object covers most of a mesh's footprint, keeping that
mesh in the base render leaves residual slivers around the composited
object. We find such meshes by raycasting sampled mask pixels, then
checking how much of each hit mesh's solo footprint the mask covers.
"""

from __future__ import annotations

import numpy as np

from ..raster import DEPTH_SENTINEL, ensure_mask
from ..scene import RendererConfig, SceneModel, Viewpoint, orbit_to_pose, raycast_grid, render_depth, render_rgb

DEFAULT_RATIO_THRESHOLD = 0.7
DEFAULT_SAMPLE_STRIDE = 4


def _config_for(seg: np.ndarray, config: RendererConfig | None) -> RendererConfig:
    h, w = seg.shape
    if config is None:
        return RendererConfig(width=w, height=h)
    if (config.height, config.width) != (h, w):
        raise ValueError(
            f"seg is {w}x{h} but the renderer config says {config.width}x{config.height}"
        )
    return config


def select_mesh_primitives(
    scene: SceneModel,
    seg: np.ndarray,
    viewpoint: Viewpoint,
    r_th: float = DEFAULT_RATIO_THRESHOLD,
    sample_stride: int = DEFAULT_SAMPLE_STRIDE,
    config: RendererConfig | None = None,
) -> set[int]:
    """Mesh ids whose visible footprint is mostly covered by seg.

    Raycasts every sample_stride-th true pixel inside seg's bounding box to
    find candidate meshes, renders each candidate's solo depth footprint,
    and keeps the mesh when |footprint AND seg| / |footprint| exceeds r_th.
    Meshes with an empty footprint are skipped.
    """
    ensure_mask(seg, "seg")
    if not (0.0 < r_th <= 1.0):
        raise ValueError(f"r_th must be in (0, 1], got {r_th}")
    if sample_stride < 1:
        raise ValueError(f"sample_stride must be at least 1, got {sample_stride}")

    rows_any, cols_any = np.nonzero(seg)
    if rows_any.size == 0:
        return set()

    pose = orbit_to_pose(viewpoint, scene, _config_for(seg, config))
    sample_rows = np.arange(rows_any.min(), rows_any.max() + 1, sample_stride)
    sample_cols = np.arange(cols_any.min(), cols_any.max() + 1, sample_stride)
    inside = seg[np.ix_(sample_rows, sample_cols)]
    rr, cc = np.nonzero(inside)
    pixels = np.stack([sample_rows[rr], sample_cols[cc]], axis=1)
    if pixels.size == 0:
        return set()

    hit_ids, _depths = raycast_grid(scene, pose, pixels)
    candidates = sorted(int(i) for i in np.unique(hit_ids) if i >= 0)

    kept: set[int] = set()
    for mesh_id in candidates:
        solo = render_depth(scene, pose, restrict={mesh_id})
        footprint = solo < DEPTH_SENTINEL
        total = int(footprint.sum())
        if total == 0:
            continue
        overlap = int((footprint & seg).sum())
        if overlap / total > r_th:
            kept.add(mesh_id)
    return kept


def get_initial_image(
    scene: SceneModel,
    seg: np.ndarray,
    viewpoint: Viewpoint,
    r_th: float = DEFAULT_RATIO_THRESHOLD,
    sample_stride: int = DEFAULT_SAMPLE_STRIDE,
    config: RendererConfig | None = None,
) -> tuple[np.ndarray, set[int]]:
    """Base render with mostly-hidden meshes excluded, plus their ids."""
    config = _config_for(seg, config)
    removed = select_mesh_primitives(scene, seg, viewpoint, r_th, sample_stride, config)
    pose = orbit_to_pose(viewpoint, scene, config)
    image = render_rgb(scene, pose, exclude=frozenset(removed), background=config.background)
    return image, removed
