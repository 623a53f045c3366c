"""Raster conventions and PNG serialization.

Three raster kinds flow through the system, all plain numpy arrays:

- RGB image:  uint8, shape (H, W, 3)
- depth map:  float32, shape (H, W), values in [0, 1]; pixels no geometry
  reaches carry the sentinel value 1.0 exactly
- mask image: bool, shape (H, W)

All rasters exchanged within one modifier session must share dimensions;
operations that combine rasters enforce this.
"""

from __future__ import annotations

import io

import numpy as np
from PIL import Image

# No-hit sentinel for depth maps. Geometry hits are clamped to DEPTH_HIT_MAX
# so the sentinel survives 16-bit PNG quantization (65534 vs 65535).
DEPTH_SENTINEL = 1.0
DEPTH_HIT_MAX = 65534.0 / 65535.0


def ensure_rgb(img: np.ndarray, name: str = "image") -> np.ndarray:
    if not isinstance(img, np.ndarray) or img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"{name} must be an (H, W, 3) array")
    if img.dtype != np.uint8:
        raise ValueError(f"{name} must be uint8, got {img.dtype}")
    return img


def ensure_depth(depth: np.ndarray, name: str = "depth") -> np.ndarray:
    if not isinstance(depth, np.ndarray) or depth.ndim != 2:
        raise ValueError(f"{name} must be an (H, W) array")
    if depth.dtype != np.float32:
        raise ValueError(f"{name} must be float32, got {depth.dtype}")
    return depth


def ensure_mask(mask: np.ndarray, name: str = "mask") -> np.ndarray:
    if not isinstance(mask, np.ndarray) or mask.ndim != 2:
        raise ValueError(f"{name} must be an (H, W) array")
    if mask.dtype != np.bool_:
        raise ValueError(f"{name} must be bool, got {mask.dtype}")
    return mask


def ensure_same_shape(*rasters: np.ndarray) -> None:
    shapes = {r.shape[:2] for r in rasters}
    if len(shapes) > 1:
        raise ValueError(f"raster dimensions differ: {sorted(shapes)}")


def blank_rgb(width: int, height: int, color=(255, 255, 255)) -> np.ndarray:
    img = np.empty((height, width, 3), dtype=np.uint8)
    img[:, :] = np.asarray(color, dtype=np.uint8)
    return img


def blank_depth(width: int, height: int) -> np.ndarray:
    return np.full((height, width), DEPTH_SENTINEL, dtype=np.float32)


def blank_mask(width: int, height: int) -> np.ndarray:
    return np.zeros((height, width), dtype=bool)


def rgb_to_png(img: np.ndarray) -> bytes:
    ensure_rgb(img)
    buf = io.BytesIO()
    Image.fromarray(img, mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def png_to_rgb(data: bytes) -> np.ndarray:
    with Image.open(io.BytesIO(data)) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8)


def depth_to_png(depth: np.ndarray) -> bytes:
    """Encode depth as 16-bit grayscale PNG, scaled by 65535."""
    ensure_depth(depth)
    q = np.clip(np.rint(depth.astype(np.float64) * 65535.0), 0, 65535).astype("<u2")
    h, w = q.shape
    buf = io.BytesIO()
    Image.frombuffer("I;16", (w, h), q.tobytes(), "raw", "I;16", 0, 1).save(buf, format="PNG")
    return buf.getvalue()


def png_to_depth(data: bytes) -> np.ndarray:
    with Image.open(io.BytesIO(data)) as im:
        arr = np.asarray(im, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError("depth PNG must be single-channel")
    return (arr / 65535.0).astype(np.float32)


def mask_to_png(mask: np.ndarray) -> bytes:
    """Encode mask as 8-bit grayscale PNG with values 0/255."""
    ensure_mask(mask)
    buf = io.BytesIO()
    Image.fromarray(mask.astype(np.uint8) * 255, mode="L").save(buf, format="PNG")
    return buf.getvalue()


def png_to_mask(data: bytes) -> np.ndarray:
    """Decode a mask PNG; 8-bit backends are thresholded at 128."""
    with Image.open(io.BytesIO(data)) as im:
        arr = np.asarray(im.convert("L"), dtype=np.uint8)
    return arr >= 128
