"""Deterministic stand-ins for the model backends.

Every mock is a pure function of its inputs (plus the resolved seed), so
the whole pipeline test suite runs without model servers and produces
byte-identical outputs on every run.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .params import BoxPrompt, GenerationParams

MOCK_EMBED_DIM = 512
EDGE_THRESHOLD = 64.0 / 255.0

_LUMA = np.array([0.299, 0.587, 0.114])


def _expand_digest(data: bytes, n_bytes: int) -> bytes:
    """Counter-mode SHA-256 expansion of data to n_bytes."""
    seed = hashlib.sha256(data).digest()
    out = bytearray()
    counter = 0
    while len(out) < n_bytes:
        out += hashlib.sha256(seed + counter.to_bytes(8, "little")).digest()
        counter += 1
    return bytes(out[:n_bytes])


def hash_vector(data: bytes, dim: int) -> np.ndarray:
    """Map bytes to dim floats in [-1, 1], deterministically."""
    words = np.frombuffer(_expand_digest(data, dim * 4), dtype="<u4")
    return (words.astype(np.float64) / np.iinfo(np.uint32).max) * 2.0 - 1.0


def _hash_color(*parts: object) -> np.ndarray:
    """Three channel values in [32, 224) derived from the parts."""
    key = "\x1f".join(str(p) for p in parts).encode("utf-8")
    raw = np.frombuffer(_expand_digest(key, 3), dtype=np.uint8)
    return (raw % 192 + 32).astype(np.uint8)


class MockEmbedder:
    """Hash-based text/image embeddings with a fixed dimension."""

    def __init__(self, dim: int = MOCK_EMBED_DIM):
        self.dim = dim

    def embed_text(self, text: str) -> np.ndarray:
        return hash_vector(b"text\x00" + text.encode("utf-8"), self.dim)

    def embed_image(self, image: np.ndarray) -> np.ndarray:
        h, w = image.shape[:2]
        return hash_vector(f"image\x00{w}x{h}\x00".encode() + image.tobytes(), self.dim)


def sobel_edges(image: np.ndarray, threshold: float = EDGE_THRESHOLD) -> np.ndarray:
    """Gradient-magnitude edges on luma, thresholded to a binary mask.

    Central differences with Sobel weights and edge-replicated borders, so a
    uniform image yields an empty mask and a hard step marks the two columns
    straddling the boundary.
    """
    luma = image.astype(np.float64) @ _LUMA / 255.0
    p = np.pad(luma, 1, mode="edge")
    gx = (
        (p[:-2, 2:] - p[:-2, :-2])
        + 2.0 * (p[1:-1, 2:] - p[1:-1, :-2])
        + (p[2:, 2:] - p[2:, :-2])
    )
    gy = (
        (p[2:, :-2] - p[:-2, :-2])
        + 2.0 * (p[2:, 1:-1] - p[:-2, 1:-1])
        + (p[2:, 2:] - p[:-2, 2:])
    )
    return np.hypot(gx, gy) > threshold


class MockEdgeExtractor:
    def __init__(self, threshold: float = EDGE_THRESHOLD):
        self.threshold = threshold

    def edges(self, image: np.ndarray) -> np.ndarray:
        return sobel_edges(image, self.threshold)


class MockSegmenter:
    """Returns the filled box as the single candidate region, score 1.0."""

    def segment(self, image: np.ndarray, box: BoxPrompt):
        h, w = image.shape[:2]
        return [(box.fill_mask(w, h), 1.0)]


class MockGenerator:
    """False-color depth shading tinted by the prompt, scribble drawn on top."""

    def generate(
        self,
        depth: np.ndarray,
        scribble: np.ndarray | None,
        params: GenerationParams,
        seed: int,
    ) -> np.ndarray:
        tint = _hash_color("tint", params.full_prompt, params.negative_prompt, seed)
        shade = (1.0 - depth)[..., None] * tint.astype(np.float64)
        out = np.clip(np.rint(shade), 0, 255).astype(np.uint8)
        if scribble is not None:
            ink = _hash_color("ink", params.full_prompt, params.negative_prompt, seed)
            out[scribble] = ink
        return out


class MockInpainter:
    """Fills the mask with a prompt-derived solid color, leaves the rest alone."""

    def inpaint(self, image: np.ndarray, mask: np.ndarray, prompt: str) -> np.ndarray:
        out = image.copy()
        out[mask] = _hash_color("fill", prompt)
        return out
