"""HTTP clients for model backends.

All capabilities share one wire shape: POST multipart/form-data with PNG
parts ("image", "depth", "scribble", "mask") plus a JSON part "params".
Image-producing backends answer with a PNG body; segmentation answers with
a multipart body of mask PNGs (parts named "mask", in rank order) and one
JSON part "scores".
"""

from __future__ import annotations

import email.parser
import json
import threading
from dataclasses import dataclass
from typing import Optional

import httpx
import numpy as np

from ..errors import AdapterError
from ..raster import depth_to_png, mask_to_png, png_to_mask, png_to_rgb, rgb_to_png
from .params import BoxPrompt, GenerationParams


@dataclass(frozen=True)
class AdapterEndpoint:
    """Where a capability is served: a mock in-process or a remote URL."""

    capability: str
    mode: str = "mock"
    url: str = ""
    timeout: float = 60.0
    dim: Optional[int] = None  # embeddings only: dimension the endpoint declares

    def __post_init__(self):
        if self.mode not in ("mock", "remote"):
            raise ValueError(f"mode must be 'mock' or 'remote', got {self.mode!r}")
        if self.mode == "remote" and not self.url.startswith(("http://", "https://")):
            raise ValueError(f"remote endpoint for {self.capability} needs an http(s) url")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")


def _json_part(payload: dict) -> tuple:
    return (None, json.dumps(payload).encode("utf-8"), "application/json")


def _png_part(name: str, data: bytes) -> tuple:
    return (f"{name}.png", data, "image/png")


def parse_multipart(content_type: str, body: bytes) -> list[tuple[str, str, bytes]]:
    """Split a multipart body into (part_name, content_type, payload) triples."""
    header = f"Content-Type: {content_type}\r\nMIME-Version: 1.0\r\n\r\n".encode()
    msg = email.parser.BytesParser().parsebytes(header + body)
    if not msg.is_multipart():
        raise ValueError("response is not multipart")
    parts = []
    for part in msg.get_payload():
        name = part.get_param("name", header="content-disposition") or ""
        parts.append((name, part.get_content_type(), part.get_payload(decode=True)))
    return parts


class _RemoteCall:
    """Shared POST plumbing: semaphore, timeout, and error wrapping."""

    def __init__(self, endpoint: AdapterEndpoint, client: httpx.Client, gate: threading.Semaphore):
        self.endpoint = endpoint
        self._client = client
        self._gate = gate

    def post(self, files: dict) -> httpx.Response:
        cap = self.endpoint.capability
        with self._gate:
            try:
                resp = self._client.post(
                    self.endpoint.url, files=files, timeout=self.endpoint.timeout
                )
            except httpx.TimeoutException as exc:
                raise AdapterError(cap, f"timeout after {self.endpoint.timeout}s") from exc
            except httpx.HTTPError as exc:
                raise AdapterError(cap, f"transport failure: {exc}") from exc
        if resp.status_code != 200:
            raise AdapterError(cap, f"backend returned HTTP {resp.status_code}")
        return resp

    def _decode_rgb(self, resp: httpx.Response, expect_hw: tuple[int, int]) -> np.ndarray:
        try:
            image = png_to_rgb(resp.content)
        except Exception as exc:
            raise AdapterError(self.endpoint.capability, f"malformed PNG response: {exc}") from exc
        if image.shape[:2] != expect_hw:
            raise AdapterError(
                self.endpoint.capability,
                f"backend returned {image.shape[1]}x{image.shape[0]}, "
                f"expected {expect_hw[1]}x{expect_hw[0]}",
            )
        return image


class RemoteTextEmbedder(_RemoteCall):
    def embed_text(self, text: str) -> np.ndarray:
        resp = self.post({"params": _json_part({"text": text})})
        return _decode_embedding(resp, self.endpoint)


class RemoteImageEmbedder(_RemoteCall):
    def embed_image(self, image: np.ndarray) -> np.ndarray:
        files = {
            "image": _png_part("image", rgb_to_png(image)),
            "params": _json_part({}),
        }
        return _decode_embedding(self.post(files), self.endpoint)


def _decode_embedding(resp: httpx.Response, endpoint: AdapterEndpoint) -> np.ndarray:
    try:
        vec = np.asarray(resp.json()["embedding"], dtype=np.float64)
    except Exception as exc:
        raise AdapterError(endpoint.capability, f"malformed embedding response: {exc}") from exc
    if vec.ndim != 1 or vec.size == 0:
        raise AdapterError(endpoint.capability, "embedding must be a non-empty vector")
    if endpoint.dim is not None and vec.size != endpoint.dim:
        raise AdapterError(
            endpoint.capability,
            f"embedding dimension {vec.size} does not match declared {endpoint.dim}",
        )
    return vec


class RemoteEdgeExtractor(_RemoteCall):
    def edges(self, image: np.ndarray) -> np.ndarray:
        files = {
            "image": _png_part("image", rgb_to_png(image)),
            "params": _json_part({}),
        }
        resp = self.post(files)
        try:
            mask = png_to_mask(resp.content)
        except Exception as exc:
            raise AdapterError(self.endpoint.capability, f"malformed mask response: {exc}") from exc
        if mask.shape != image.shape[:2]:
            raise AdapterError(self.endpoint.capability, "mask resolution does not match input")
        return mask


class RemoteSegmenter(_RemoteCall):
    def segment(self, image: np.ndarray, box: BoxPrompt) -> list[tuple[np.ndarray, float]]:
        files = {
            "image": _png_part("image", rgb_to_png(image)),
            "params": _json_part({"box": list(box.box), "intent": box.intent}),
        }
        resp = self.post(files)
        cap = self.endpoint.capability
        try:
            parts = parse_multipart(resp.headers.get("content-type", ""), resp.content)
            masks = [png_to_mask(payload) for name, _, payload in parts if name == "mask"]
            scores_raw = [payload for name, ctype, payload in parts if name == "scores"]
            scores = json.loads(scores_raw[0])["scores"] if scores_raw else []
        except Exception as exc:
            raise AdapterError(cap, f"malformed segmentation response: {exc}") from exc
        if len(masks) != len(scores):
            raise AdapterError(cap, f"{len(masks)} masks but {len(scores)} scores in response")
        for mask in masks:
            if mask.shape != image.shape[:2]:
                raise AdapterError(cap, "mask resolution does not match input")
        return list(zip(masks, [float(s) for s in scores]))


class RemoteGenerator(_RemoteCall):
    def generate(
        self,
        depth: np.ndarray,
        scribble: Optional[np.ndarray],
        params: GenerationParams,
        seed: int,
    ) -> np.ndarray:
        files = {"depth": _png_part("depth", depth_to_png(depth))}
        if scribble is not None:
            files["scribble"] = _png_part("scribble", mask_to_png(scribble))
        files["params"] = _json_part(params.wire_dict(seed))
        return self._decode_rgb(self.post(files), depth.shape)


class RemoteInpainter(_RemoteCall):
    def inpaint(self, image: np.ndarray, mask: np.ndarray, prompt: str) -> np.ndarray:
        files = {
            "image": _png_part("image", rgb_to_png(image)),
            "mask": _png_part("mask", mask_to_png(mask)),
            "params": _json_part({"prompt": prompt}),
        }
        return self._decode_rgb(self.post(files), image.shape[:2])
