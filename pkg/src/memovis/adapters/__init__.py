"""Model-backend adapters: remote HTTP clients plus deterministic mocks."""

from .mock import (
    EDGE_THRESHOLD,
    MOCK_EMBED_DIM,
    MockEdgeExtractor,
    MockEmbedder,
    MockGenerator,
    MockInpainter,
    MockSegmenter,
    hash_vector,
    sobel_edges,
)
from .params import (
    DEFAULT_STEPS,
    DEFAULT_STRENGTHS,
    NEGATIVE_PROMPT,
    POSITIVE_SUFFIX,
    REMOVAL_PROMPT,
    BoxPrompt,
    GenerationParams,
    GenerationResult,
)
from .registry import (
    CAPABILITIES,
    DEFAULT_MAX_INFLIGHT,
    ENV_PREFIX,
    AdapterSet,
    build_adapters,
    resolve_endpoints,
)
from .remote import AdapterEndpoint, parse_multipart

__all__ = [
    "AdapterEndpoint",
    "AdapterSet",
    "BoxPrompt",
    "CAPABILITIES",
    "DEFAULT_MAX_INFLIGHT",
    "DEFAULT_STEPS",
    "DEFAULT_STRENGTHS",
    "EDGE_THRESHOLD",
    "ENV_PREFIX",
    "GenerationParams",
    "GenerationResult",
    "MOCK_EMBED_DIM",
    "MockEdgeExtractor",
    "MockEmbedder",
    "MockGenerator",
    "MockInpainter",
    "MockSegmenter",
    "NEGATIVE_PROMPT",
    "POSITIVE_SUFFIX",
    "REMOVAL_PROMPT",
    "build_adapters",
    "hash_vector",
    "parse_multipart",
    "resolve_endpoints",
    "sobel_edges",
]
