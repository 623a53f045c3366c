"""Binary mask algebra and the masked blend that builds reference images."""

from __future__ import annotations

import numpy as np

from ..raster import DEPTH_SENTINEL, ensure_depth, ensure_mask, ensure_rgb, ensure_same_shape


def mask_union(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ensure_mask(a)
    ensure_mask(b)
    ensure_same_shape(a, b)
    return a | b


def mask_subtract(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ensure_mask(a)
    ensure_mask(b)
    ensure_same_shape(a, b)
    return a & ~b


def compose(syn: np.ndarray, init: np.ndarray, seg: np.ndarray) -> np.ndarray:
    """Masked blend: syn where seg is true, init elsewhere.

    Binary specialization of syn*seg + init*(1-seg) with broadcasting over
    the color channels.
    """
    ensure_rgb(syn, "syn")
    ensure_rgb(init, "init")
    ensure_mask(seg, "seg")
    ensure_same_shape(syn, init, seg)
    return np.where(seg[..., None], syn, init)


def clear_depth_region(depth: np.ndarray, cleared: np.ndarray) -> np.ndarray:
    """Reset depth under the cleared mask to the no-hit sentinel."""
    ensure_depth(depth)
    ensure_mask(cleared, "cleared")
    ensure_same_shape(depth, cleared)
    out = depth.copy()
    out[cleared] = DEPTH_SENTINEL
    return out
