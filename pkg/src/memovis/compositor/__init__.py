"""Mask algebra, stroke handling, hidden-primitive removal, and the modifiers."""

from .masks import clear_depth_region, compose, mask_subtract, mask_union
from .pipelines import (
    RESULT_FILES,
    ModifierResult,
    ModifierSession,
    load_result,
    run_grab_n_go,
    run_text_paint,
    run_text_scribble,
    save_result,
)
from .removal import (
    DEFAULT_RATIO_THRESHOLD,
    DEFAULT_SAMPLE_STRIDE,
    get_initial_image,
    select_mesh_primitives,
)
from .strokes import (
    Stroke,
    StrokeSet,
    aggregate_scribbles,
    rasterize_strokes,
    strokes_bounding_box,
)

__all__ = [
    "DEFAULT_RATIO_THRESHOLD",
    "DEFAULT_SAMPLE_STRIDE",
    "ModifierResult",
    "ModifierSession",
    "RESULT_FILES",
    "Stroke",
    "StrokeSet",
    "aggregate_scribbles",
    "clear_depth_region",
    "compose",
    "get_initial_image",
    "load_result",
    "mask_subtract",
    "mask_union",
    "rasterize_strokes",
    "run_grab_n_go",
    "run_text_paint",
    "run_text_scribble",
    "save_result",
    "select_mesh_primitives",
    "strokes_bounding_box",
]
