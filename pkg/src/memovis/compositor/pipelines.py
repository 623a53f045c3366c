"""The three modifier pipelines and their shared session/result types.

A session pins the scene, the anchored camera, and the adapter set. Each
run produces a fresh ModifierResult; nothing in the session or a prior
result is mutated, so runs are replayable and safe to persist.
"""

from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from ..adapters import AdapterSet, BoxPrompt, GenerationParams, REMOVAL_PROMPT
from ..errors import AdapterError, NoObjectError, PipelineError
from ..raster import (
    blank_mask,
    ensure_same_shape,
    mask_to_png,
    png_to_mask,
    png_to_rgb,
    rgb_to_png,
)
from ..scene import RendererConfig, SceneModel, Viewpoint, orbit_to_pose, render_depth, render_rgb
from .masks import clear_depth_region, compose, mask_subtract, mask_union
from .removal import DEFAULT_RATIO_THRESHOLD, DEFAULT_SAMPLE_STRIDE, get_initial_image
from .strokes import StrokeSet, aggregate_scribbles, rasterize_strokes, strokes_bounding_box


@dataclass
class ModifierSession:
    """Everything a modifier run needs: scene, anchored camera, backends."""

    scene: SceneModel
    viewpoint: Viewpoint
    adapters: AdapterSet
    config: RendererConfig = field(default_factory=RendererConfig)
    r_th: float = DEFAULT_RATIO_THRESHOLD
    sample_stride: int = DEFAULT_SAMPLE_STRIDE

    def pose(self):
        return orbit_to_pose(self.viewpoint, self.scene, self.config)

    def render_initial(self) -> np.ndarray:
        return render_rgb(self.scene, self.pose(), background=self.config.background)

    def render_depth(self) -> np.ndarray:
        return render_depth(self.scene, self.pose())


@dataclass(frozen=True)
class ModifierResult:
    """Output of one modifier run.

    reference is the composed image shown to the user, syn the raw
    generated image, seg the accumulated generated-content mask, and
    removed_meshes the scene meshes excluded from the base render.
    """

    reference: np.ndarray
    syn: np.ndarray
    seg: np.ndarray
    removed_meshes: frozenset[int]
    provenance: dict

    def __post_init__(self):
        ensure_same_shape(self.reference, self.syn, self.seg)


class _StageClock:
    """Names pipeline stages for error reports and collects wall times."""

    def __init__(self):
        self.timings: dict[str, float] = {}

    @contextmanager
    def stage(self, name: str):
        start = time.perf_counter()
        try:
            yield
        except (NoObjectError, PipelineError):
            raise
        except AdapterError as exc:
            raise PipelineError(name, str(exc)) from exc
        except ValueError as exc:
            raise PipelineError(name, str(exc)) from exc
        finally:
            self.timings[name] = time.perf_counter() - start


def _provenance(
    modifier: str,
    session: ModifierSession,
    clock: _StageClock,
    removed: set[int],
    *,
    params: Optional[GenerationParams] = None,
    seed: Optional[int] = None,
    **extra,
) -> dict:
    out = {
        "modifier": modifier,
        "viewpoint": session.viewpoint.to_dict(),
        "r_th": session.r_th,
        "sample_stride": session.sample_stride,
        "removed_meshes": sorted(removed),
        "seed": seed,
        "timings": clock.timings,
    }
    if params is not None:
        out["params"] = {
            "prompt": params.prompt,
            "positive_suffix": params.positive_suffix,
            "negative_prompt": params.negative_prompt,
            "steps": params.steps,
            "condition_strengths": dict(params.condition_strengths),
        }
    out.update(extra)
    return out


def run_text_scribble(
    session: ModifierSession, strokes: StrokeSet, params: GenerationParams
) -> ModifierResult:
    """Scribble-conditioned generation composited over the base render.

    With no strokes at all this degrades to a pure depth-conditioned global
    edit whose output is the reference as-is. When segmentation cannot find
    an object in the scribbled region, the result keeps seg empty and the
    generated image stands alone.
    """
    clock = _StageClock()
    cfg = session.config

    with clock.stage("render"):
        init = session.render_initial()
        depth = session.render_depth()
    with clock.stage("edges"):
        auto_edges = session.adapters.extract_edges(init)
    with clock.stage("scribble"):
        scribble, cleared = aggregate_scribbles(auto_edges, strokes)
        depth_cond = clear_depth_region(depth, cleared)
    with clock.stage("generate"):
        if strokes.empty:
            gen = session.adapters.generate_depth(depth_cond, params)
        else:
            gen = session.adapters.generate_depth_scribble(depth_cond, scribble, params)
    syn = gen.image

    seg = None
    box = strokes_bounding_box(strokes.add_strokes, cfg.width, cfg.height)
    if box is not None:
        with clock.stage("segment"):
            try:
                seg = session.adapters.segment_box(syn, BoxPrompt(box, intent="keep"))
            except NoObjectError:
                seg = None

    if seg is None or not seg.any():
        result_seg = blank_mask(cfg.width, cfg.height)
        provenance = _provenance(
            "text_scribble", session, clock, set(),
            params=params, seed=gen.seed, strokes=strokes.to_dict(),
        )
        return ModifierResult(syn, syn, result_seg, frozenset(), provenance)

    with clock.stage("select"):
        base, removed = get_initial_image(
            session.scene, seg, session.viewpoint, session.r_th, session.sample_stride, cfg
        )
    with clock.stage("compose"):
        reference = compose(syn, base, seg)
    provenance = _provenance(
        "text_scribble", session, clock, removed,
        params=params, seed=gen.seed, strokes=strokes.to_dict(),
    )
    return ModifierResult(reference, syn, seg, frozenset(removed), provenance)


def run_grab_n_go(
    session: ModifierSession,
    prior: ModifierResult,
    box: BoxPrompt,
    staging: bool = False,
) -> ModifierResult:
    """Box-select content into or out of the running composition.

    keep: segment the generated image inside the box and add the region to
    seg. remove: segment the current reference and subtract the region.
    staging swaps the composition roles so a scene object selected in the
    base render stays visible atop the generated background.
    """
    clock = _StageClock()
    cfg = session.config
    ensure_same_shape(prior.syn, prior.seg)

    if staging:
        if box.intent != "keep":
            raise ValueError("staging requires a keep-intent box")
        with clock.stage("render"):
            init = session.render_initial()
        with clock.stage("segment"):
            kept = session.adapters.segment_box(init, box)
        with clock.stage("compose"):
            reference = compose(init, prior.syn, kept)
        seg = ~kept
        provenance = _provenance(
            "grab_n_go", session, clock, set(),
            box=list(box.box), intent=box.intent, staging=True,
        )
        return ModifierResult(reference, prior.syn, seg, frozenset(), provenance)

    with clock.stage("segment"):
        if box.intent == "keep":
            region = session.adapters.segment_box(prior.syn, box)
            seg = mask_union(prior.seg, region)
        else:
            region = session.adapters.segment_box(prior.reference, box)
            seg = mask_subtract(prior.seg, region)
    with clock.stage("select"):
        base, removed = get_initial_image(
            session.scene, seg, session.viewpoint, session.r_th, session.sample_stride, cfg
        )
    with clock.stage("compose"):
        reference = compose(prior.syn, base, seg)
    provenance = _provenance(
        "grab_n_go", session, clock, removed,
        box=list(box.box), intent=box.intent, staging=False,
    )
    return ModifierResult(reference, prior.syn, seg, frozenset(removed), provenance)


def run_text_paint(
    session: ModifierSession,
    paint: StrokeSet,
    params: GenerationParams,
    prior: Optional[ModifierResult] = None,
) -> ModifierResult:
    """Inpaint painted regions of the current reference.

    Primary-button paint fills with prompt-driven content; secondary-button
    paint erases to background. Pixels outside the paint are untouched and
    seg carries over from the prior result.
    """
    if paint.empty:
        raise ValueError("text+paint needs at least one stroke")
    clock = _StageClock()
    cfg = session.config

    with clock.stage("render"):
        base = prior.reference if prior is not None else session.render_initial()
    add_mask = rasterize_strokes(paint.add_strokes, cfg.width, cfg.height)
    remove_mask = rasterize_strokes(paint.remove_strokes, cfg.width, cfg.height)
    if not add_mask.any() and not remove_mask.any():
        raise PipelineError("inpaint", "paint strokes cover no pixels")

    out = base
    with clock.stage("inpaint"):
        if add_mask.any():
            out = session.adapters.inpaint(out, add_mask, params.full_prompt)
        if remove_mask.any():
            out = session.adapters.inpaint(out, remove_mask, REMOVAL_PROMPT)

    seg = prior.seg.copy() if prior is not None else blank_mask(cfg.width, cfg.height)
    removed = set(prior.removed_meshes) if prior is not None else set()
    provenance = _provenance(
        "text_paint", session, clock, removed,
        params=params, seed=None, strokes=paint.to_dict(),
    )
    return ModifierResult(out, out, seg, frozenset(removed), provenance)


RESULT_FILES = ("reference.png", "syn.png", "seg.png", "provenance.json")


def save_result(result: ModifierResult, directory) -> None:
    """Persist a result as three PNGs plus a JSON sidecar.

    Wall-clock timings stay out of the sidecar: identical inputs must
    produce identical files, and timings are diagnostics, not provenance.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / "reference.png").write_bytes(rgb_to_png(result.reference))
    (directory / "syn.png").write_bytes(rgb_to_png(result.syn))
    (directory / "seg.png").write_bytes(mask_to_png(result.seg))
    sidecar = dict(result.provenance)
    sidecar.pop("timings", None)
    sidecar["removed_meshes"] = sorted(result.removed_meshes)
    (directory / "provenance.json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n"
    )


def load_result(directory) -> ModifierResult:
    directory = Path(directory)
    provenance = json.loads((directory / "provenance.json").read_text())
    return ModifierResult(
        reference=png_to_rgb((directory / "reference.png").read_bytes()),
        syn=png_to_rgb((directory / "syn.png").read_bytes()),
        seg=png_to_mask((directory / "seg.png").read_bytes()),
        removed_meshes=frozenset(provenance.get("removed_meshes", [])),
        provenance=provenance,
    )
