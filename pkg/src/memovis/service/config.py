"""Service configuration: a strict JSON file with a small set of keys."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

from ..adapters import DEFAULT_STEPS, DEFAULT_STRENGTHS
from ..compositor import DEFAULT_RATIO_THRESHOLD, DEFAULT_SAMPLE_STRIDE
from ..scene import RendererConfig

_KNOWN_KEYS = {
    "data_dir",
    "viewport",
    "endpoints",
    "k",
    "r_th",
    "stride",
    "strengths",
    "steps",
    "host",
    "port",
}
_VIEWPORT_KEYS = {"width", "height", "fov_degrees"}


@dataclass
class ServiceConfig:
    """Review-service settings; every field has a workable default."""

    data_dir: Path = Path("memovis-data")
    viewport: dict = field(
        default_factory=lambda: {"width": 512, "height": 512, "fov_degrees": 60.0}
    )
    endpoints: dict = field(default_factory=dict)
    k: int = 4
    r_th: float = DEFAULT_RATIO_THRESHOLD
    stride: int = DEFAULT_SAMPLE_STRIDE
    strengths: dict = field(default_factory=lambda: dict(DEFAULT_STRENGTHS))
    steps: int = DEFAULT_STEPS
    host: str = "127.0.0.1"
    port: int = 8000

    def __post_init__(self):
        self.data_dir = Path(self.data_dir)
        unknown = set(self.viewport) - _VIEWPORT_KEYS
        if unknown:
            raise ValueError(f"unknown viewport key: {sorted(unknown)[0]}")
        self.viewport = {**{"width": 512, "height": 512, "fov_degrees": 60.0}, **self.viewport}
        if self.viewport["width"] < 8 or self.viewport["height"] < 8:
            raise ValueError("viewport must be at least 8x8")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if not (0.0 < self.r_th <= 1.0):
            raise ValueError("r_th must be in (0, 1]")
        if self.stride < 1:
            raise ValueError("stride must be at least 1")
        if self.steps < 1:
            raise ValueError("steps must be at least 1")
        for name, value in self.strengths.items():
            if not (0.0 <= value <= 1.0):
                raise ValueError(f"strength {name}={value} outside [0, 1]")
        if not (0 < self.port < 65536):
            raise ValueError("port must be in 1..65535")

    def renderer_config(self) -> RendererConfig:
        return RendererConfig(
            width=int(self.viewport["width"]),
            height=int(self.viewport["height"]),
            fov_degrees=float(self.viewport["fov_degrees"]),
        )

    @classmethod
    def from_dict(cls, data: Mapping) -> "ServiceConfig":
        unknown = set(data) - _KNOWN_KEYS
        if unknown:
            raise ValueError(f"unknown config key: {sorted(unknown)[0]}")
        return cls(**dict(data))

    @classmethod
    def from_file(cls, path) -> "ServiceConfig":
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except OSError as exc:
            raise ValueError(f"config file unreadable: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ValueError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ValueError("config file must hold a JSON object")
        return cls.from_dict(data)
