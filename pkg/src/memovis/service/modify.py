"""Modifier request parsing and dispatch, shared by the HTTP API and the CLI.

A payload dict (straight from JSON) becomes a validated ModifierPlan up
front, so bad requests fail before a job is queued or a pipeline starts;
execute_plan then maps the plan onto the matching compositor pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..adapters import BoxPrompt, GenerationParams
from ..compositor import (
    ModifierResult,
    ModifierSession,
    StrokeSet,
    run_grab_n_go,
    run_text_paint,
    run_text_scribble,
)

MODIFIER_KINDS = ("text-scribble", "grab-n-go", "text-paint")

_EMPTY_STROKES = {"add_strokes": [], "remove_strokes": []}


@dataclass(frozen=True)
class ModifierPlan:
    kind: str
    strokes: Optional[StrokeSet] = None
    box: Optional[BoxPrompt] = None
    staging: bool = False
    params: Optional[GenerationParams] = None
    prior: Optional[str] = None  # caller-scoped reference: result id or path

    @property
    def needs_prior(self) -> bool:
        return self.prior is not None


def _check_strokes(strokes: StrokeSet, width: int, height: int) -> StrokeSet:
    for stroke in (*strokes.add_strokes, *strokes.remove_strokes):
        for x, y in stroke.points:
            if not (0.0 <= x < width and 0.0 <= y < height):
                raise ValueError(
                    f"stroke point ({x}, {y}) outside {width}x{height} viewport"
                )
    return strokes


def plan_modifier(
    payload: dict,
    *,
    width: int,
    height: int,
    default_prompt: str = "",
    steps: int,
    strengths,
) -> ModifierPlan:
    """Validate a modifier payload against the viewport and defaults.

    Raises ValueError on anything a client could get wrong; nothing here
    touches the scene, the disk, or a model backend.
    """
    kind = payload.get("kind")
    if kind not in MODIFIER_KINDS:
        raise ValueError(f"unknown modifier kind: {kind!r}")

    def parse_strokes() -> StrokeSet:
        return _check_strokes(
            StrokeSet.from_dict(payload.get("strokes") or _EMPTY_STROKES), width, height
        )

    def parse_params() -> GenerationParams:
        prompt = payload.get("prompt") or default_prompt
        return GenerationParams(
            prompt=prompt,
            steps=payload.get("steps") or steps,
            condition_strengths=payload.get("strengths") or strengths,
            seed=payload.get("seed"),
        )

    prior = payload.get("prior")

    if kind == "text-scribble":
        return ModifierPlan(kind, strokes=parse_strokes(), params=parse_params())

    if kind == "grab-n-go":
        if payload.get("box") is None:
            raise ValueError("grab-n-go requires a box")
        box = BoxPrompt(tuple(payload["box"]), payload.get("intent", "keep"))
        box.check_bounds(width, height)
        staging = bool(payload.get("staging", False))
        if staging and box.intent != "keep":
            raise ValueError("staging requires a keep-intent box")
        if prior is None:
            raise ValueError("grab-n-go requires a prior result")
        return ModifierPlan(kind, box=box, staging=staging, prior=prior)

    strokes = parse_strokes()
    if strokes.empty:
        raise ValueError("text-paint requires paint strokes")
    return ModifierPlan(kind, strokes=strokes, params=parse_params(), prior=prior)


def execute_plan(
    session: ModifierSession,
    plan: ModifierPlan,
    prior: Optional[ModifierResult] = None,
) -> ModifierResult:
    if plan.kind == "text-scribble":
        return run_text_scribble(session, plan.strokes, plan.params)
    if plan.kind == "grab-n-go":
        if prior is None:
            raise ValueError("grab-n-go requires a prior result")
        return run_grab_n_go(session, prior, plan.box, plan.staging)
    return run_text_paint(session, plan.strokes, plan.params, prior)
