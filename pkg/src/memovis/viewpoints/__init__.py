"""Viewpoint grid sampling and the rendered-view embedding index."""

from .index import (
    MAGIC,
    VERSION,
    ViewpointIndex,
    ViewSuggestion,
    build_index,
    l2_normalize,
    load_index,
    save_index,
    suggest_views,
)
from .sampling import SamplingConfig, sample_grid

__all__ = [
    "MAGIC",
    "VERSION",
    "SamplingConfig",
    "ViewSuggestion",
    "ViewpointIndex",
    "build_index",
    "l2_normalize",
    "load_index",
    "sample_grid",
    "save_index",
    "suggest_views",
]
