"""Capability wiring and the validated adapter facade.

Endpoint resolution order: built-in mock defaults, then entries from the
service config, then MEMOVIS_ENDPOINT_<CAPABILITY> environment variables
(which force remote mode at the given URL).
"""

from __future__ import annotations

import os
import random
import threading
from typing import Mapping, Optional

import httpx
import numpy as np

from ..errors import NoObjectError
from ..raster import ensure_depth, ensure_mask, ensure_rgb, ensure_same_shape
from ..viewpoints import l2_normalize
from .mock import MockEdgeExtractor, MockEmbedder, MockGenerator, MockInpainter, MockSegmenter
from .params import BoxPrompt, GenerationParams, GenerationResult
from .remote import (
    AdapterEndpoint,
    RemoteEdgeExtractor,
    RemoteGenerator,
    RemoteImageEmbedder,
    RemoteInpainter,
    RemoteSegmenter,
    RemoteTextEmbedder,
)

CAPABILITIES = ("text_embed", "image_embed", "edges", "segment", "generate", "inpaint")

ENV_PREFIX = "MEMOVIS_ENDPOINT_"

DEFAULT_MAX_INFLIGHT = 2


class AdapterSet:
    """Single entry point for all model calls.

    Validates rasters and parameters before any backend (and therefore any
    network) activity, normalizes embeddings, picks the best segmentation
    candidate, and resolves missing generation seeds.
    """

    def __init__(self, text_embed, image_embed, edges, segment, generate, inpaint):
        self._text_embed = text_embed
        self._image_embed = image_embed
        self._edges = edges
        self._segment = segment
        self._generate = generate
        self._inpaint = inpaint

    def encode_text(self, text: str) -> np.ndarray:
        if not text.strip():
            raise ValueError("text must be non-empty")
        return l2_normalize(self._text_embed.embed_text(text))

    def encode_image(self, image: np.ndarray) -> np.ndarray:
        ensure_rgb(image)
        return l2_normalize(self._image_embed.embed_image(image))

    def extract_edges(self, image: np.ndarray) -> np.ndarray:
        ensure_rgb(image)
        return ensure_mask(self._edges.edges(image))

    def segment_box(self, image: np.ndarray, box: BoxPrompt) -> np.ndarray:
        ensure_rgb(image)
        box.check_bounds(image.shape[1], image.shape[0])
        candidates = self._segment.segment(image, box)
        if not candidates:
            raise NoObjectError()
        best = max(range(len(candidates)), key=lambda i: (candidates[i][1], -i))
        return ensure_mask(candidates[best][0])

    def generate_depth(self, depth: np.ndarray, params: GenerationParams) -> GenerationResult:
        ensure_depth(depth)
        seed = _resolve_seed(params)
        return GenerationResult(self._generate.generate(depth, None, params, seed), seed)

    def generate_depth_scribble(
        self, depth: np.ndarray, scribble: np.ndarray, params: GenerationParams
    ) -> GenerationResult:
        ensure_depth(depth)
        ensure_mask(scribble)
        ensure_same_shape(depth, scribble)
        seed = _resolve_seed(params)
        return GenerationResult(self._generate.generate(depth, scribble, params, seed), seed)

    def inpaint(self, image: np.ndarray, mask: np.ndarray, prompt: str) -> np.ndarray:
        ensure_rgb(image)
        ensure_mask(mask)
        ensure_same_shape(image, mask)
        if not mask.any():
            raise ValueError("inpaint mask must be non-empty")
        if not prompt.strip():
            raise ValueError("prompt must be non-empty")
        out = self._inpaint.inpaint(image, mask, prompt)
        # hold the outside-mask identity guarantee regardless of backend
        return np.where(mask[..., None], out, image)


def _resolve_seed(params: GenerationParams) -> int:
    if params.seed is not None:
        return params.seed
    return random.randrange(2**31)


def resolve_endpoints(
    config: Optional[Mapping[str, Mapping]] = None,
    env: Optional[Mapping[str, str]] = None,
) -> dict[str, AdapterEndpoint]:
    """Merge config and environment into one endpoint per capability."""
    env = os.environ if env is None else env
    table = {}
    for cap in CAPABILITIES:
        entry = dict((config or {}).get(cap, {}))
        entry.pop("capability", None)
        override = env.get(ENV_PREFIX + cap.upper())
        if override:
            entry["url"] = override
            entry["mode"] = "remote"
        table[cap] = AdapterEndpoint(capability=cap, **entry)
    return table


def build_adapters(
    endpoints: Optional[Mapping[str, AdapterEndpoint]] = None,
    *,
    max_inflight: int = DEFAULT_MAX_INFLIGHT,
    transport: Optional[httpx.BaseTransport] = None,
) -> AdapterSet:
    """Wire an AdapterSet from resolved endpoints (all-mock by default).

    Remote capabilities share one HTTP client and one in-flight gate.
    transport is a hook for tests to intercept the wire traffic.
    """
    endpoints = dict(endpoints) if endpoints else resolve_endpoints(env={})
    for cap in CAPABILITIES:
        if cap not in endpoints:
            endpoints[cap] = AdapterEndpoint(capability=cap)

    remote_caps = [cap for cap in CAPABILITIES if endpoints[cap].mode == "remote"]
    client = gate = None
    if remote_caps:
        client = httpx.Client(transport=transport)
        gate = threading.Semaphore(max_inflight)

    def pick(cap: str, remote_cls, mock_factory):
        ep = endpoints[cap]
        if ep.mode == "remote":
            return remote_cls(ep, client, gate)
        return mock_factory(ep)

    def mock_embedder(ep):
        return MockEmbedder(ep.dim) if ep.dim else MockEmbedder()

    return AdapterSet(
        text_embed=pick("text_embed", RemoteTextEmbedder, mock_embedder),
        image_embed=pick("image_embed", RemoteImageEmbedder, mock_embedder),
        edges=pick("edges", RemoteEdgeExtractor, lambda ep: MockEdgeExtractor()),
        segment=pick("segment", RemoteSegmenter, lambda ep: MockSegmenter()),
        generate=pick("generate", RemoteGenerator, lambda ep: MockGenerator()),
        inpaint=pick("inpaint", RemoteInpainter, lambda ep: MockInpainter()),
    )
