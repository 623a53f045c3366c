"""Request/response types shared by the model adapters."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

# Prompt text appended to every positive generation prompt, and the fixed
# negative prompt. Removal edits always use REMOVAL_PROMPT verbatim.
POSITIVE_SUFFIX = "realistic, high quality, high resolution, 8k, detailed"
NEGATIVE_PROMPT = "monochrome, worst quality, low quality, blur"
REMOVAL_PROMPT = "background"

DEFAULT_STEPS = 30
DEFAULT_STRENGTHS: Mapping[str, float] = {"scribble": 0.7, "depth": 0.3}


@dataclass(frozen=True)
class GenerationParams:
    """Knobs forwarded to the image-generation backends.

    condition_strengths maps a condition name ("scribble", "depth") to a
    weight in [0, 1]. seed is optional; when absent the adapter draws one
    and reports it back so the run can be replayed.
    """

    prompt: str
    positive_suffix: str = POSITIVE_SUFFIX
    negative_prompt: str = NEGATIVE_PROMPT
    steps: int = DEFAULT_STEPS
    condition_strengths: Mapping[str, float] = field(
        default_factory=lambda: dict(DEFAULT_STRENGTHS)
    )
    seed: Optional[int] = None

    def __post_init__(self):
        if not self.prompt.strip():
            raise ValueError("prompt must be non-empty")
        if self.steps < 1:
            raise ValueError(f"steps must be at least 1, got {self.steps}")
        for name, weight in self.condition_strengths.items():
            if not (0.0 <= weight <= 1.0):
                raise ValueError(f"condition strength {name}={weight} outside [0, 1]")
        if self.seed is not None and self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")

    @property
    def full_prompt(self) -> str:
        """User prompt with the positive suffix appended."""
        if not self.positive_suffix:
            return self.prompt
        return f"{self.prompt}, {self.positive_suffix}"

    def wire_dict(self, seed: int) -> dict:
        """JSON payload sent to remote generation backends."""
        return {
            "prompt": self.prompt,
            "positive_suffix": self.positive_suffix,
            "negative_prompt": self.negative_prompt,
            "steps": self.steps,
            "condition_strengths": dict(self.condition_strengths),
            "seed": seed,
        }


@dataclass(frozen=True)
class BoxPrompt:
    """Axis-aligned pixel rectangle with a keep/remove intent.

    Coordinates are half-open: (left, top, right, bottom) covers columns
    left..right-1 and rows top..bottom-1, so (10, 10, 20, 20) selects
    exactly 100 pixels.
    """

    box: tuple[int, int, int, int]
    intent: str = "keep"

    def __post_init__(self):
        try:
            coerced = tuple(int(round(float(v))) for v in self.box)
        except (TypeError, ValueError):
            raise ValueError(f"box must hold four numbers, got {self.box!r}") from None
        if len(coerced) != 4:
            raise ValueError(f"box must hold four numbers, got {self.box!r}")
        object.__setattr__(self, "box", coerced)
        left, top, right, bottom = self.box
        if left < 0 or top < 0 or right <= left or bottom <= top:
            raise ValueError(f"box {self.box} is empty or negative")
        if self.intent not in ("keep", "remove"):
            raise ValueError(f"intent must be 'keep' or 'remove', got {self.intent!r}")

    def check_bounds(self, width: int, height: int) -> None:
        left, top, right, bottom = self.box
        if right > width or bottom > height:
            raise ValueError(f"box {self.box} exceeds image bounds {width}x{height}")

    def fill_mask(self, width: int, height: int) -> np.ndarray:
        self.check_bounds(width, height)
        left, top, right, bottom = self.box
        mask = np.zeros((height, width), dtype=bool)
        mask[top:bottom, left:right] = True
        return mask


@dataclass(frozen=True)
class GenerationResult:
    """Generated image plus the seed that actually produced it."""

    image: np.ndarray
    seed: int
