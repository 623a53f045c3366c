"""Embedding index over rendered viewpoints, with exact nearest-neighbor search.

Build renders every grid viewpoint, encodes the image into a unit vector,
and stores the rows in grid order. Search scores a text embedding against
every row (no approximation) and breaks score ties toward the lower row,
so results are reproducible across rebuilds of the same scene.

File layout (little-endian):
  magic "MVVI" | u32 version | u32 dim | u32 rows | 32-byte scene digest
  | rows*dim float32 embeddings | rows*6 float64 viewpoints
where each viewpoint row is (alpha, beta, r, tx, ty, tz).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from ..errors import MemovisError
from ..scene import RendererConfig, SceneModel, Viewpoint, orbit_to_pose, render_rgb
from .sampling import SamplingConfig, sample_grid

MAGIC = b"MVVI"
VERSION = 1

_HEADER = struct.Struct("<4sIII32s")


def l2_normalize(vec: np.ndarray) -> np.ndarray:
    """Return vec scaled to unit length, as float64."""
    vec = np.asarray(vec, dtype=np.float64).reshape(-1)
    norm = float(np.linalg.norm(vec))
    if norm == 0.0 or not np.isfinite(norm):
        raise ValueError("embedding has zero or non-finite norm")
    return vec / norm


@dataclass(frozen=True)
class ViewSuggestion:
    """One ranked viewpoint hit: grid row, cosine score, and the viewpoint."""

    row: int
    score: float
    viewpoint: Viewpoint
    thumbnail: Optional[np.ndarray] = None

    def to_dict(self) -> dict:
        return {
            "row": self.row,
            "score": self.score,
            "viewpoint": self.viewpoint.to_dict(),
        }


@dataclass
class ViewpointIndex:
    """Unit-norm embedding rows paired one-to-one with grid viewpoints."""

    viewpoints: tuple[Viewpoint, ...]
    embeddings: np.ndarray  # float32 (rows, dim), unit rows
    fingerprint: str  # sha256 hex of the source scene
    _scores_matrix: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        emb = np.ascontiguousarray(self.embeddings, dtype=np.float32)
        if emb.ndim != 2:
            raise ValueError("embeddings must be a 2-D array")
        if emb.shape[0] != len(self.viewpoints):
            raise ValueError("one embedding row per viewpoint required")
        if emb.shape[0] == 0:
            raise ValueError("index must contain at least one row")
        self.embeddings = emb

    @property
    def rows(self) -> int:
        return self.embeddings.shape[0]

    @property
    def dim(self) -> int:
        return self.embeddings.shape[1]

    def scores(self, query: np.ndarray) -> np.ndarray:
        """Cosine scores of a unit query against every row, in float64."""
        query = np.asarray(query, dtype=np.float64).reshape(-1)
        if query.shape[0] != self.dim:
            raise ValueError(
                f"query dimension {query.shape[0]} does not match index dimension {self.dim}"
            )
        if self._scores_matrix is None:
            self._scores_matrix = self.embeddings.astype(np.float64)
        return self._scores_matrix @ query


ProgressFn = Callable[[int, int], None]


def build_index(
    scene: SceneModel,
    image_encoder,
    config: SamplingConfig | None = None,
    *,
    render_config: RendererConfig | None = None,
    progress: Optional[ProgressFn] = None,
) -> ViewpointIndex:
    """Render and encode every grid viewpoint of a scene, in grid order.

    image_encoder must expose encode_image(rgb) -> 1-D vector. Rows are
    l2-normalized before storage. An encoder or renderer failure aborts the
    build and names the offending viewpoint.
    """
    config = config or SamplingConfig()
    render_config = render_config or RendererConfig()
    grid = sample_grid(scene, config)
    rows: list[np.ndarray] = []
    dim = None
    for i, viewpoint in enumerate(grid):
        try:
            pose = orbit_to_pose(viewpoint, scene, render_config)
            image = render_rgb(scene, pose)
            vec = l2_normalize(image_encoder.encode_image(image))
        except MemovisError:
            raise
        except Exception as exc:
            raise MemovisError(
                f"index build failed at row {i} "
                f"(alpha={viewpoint.alpha:.6f}, beta={viewpoint.beta:.6f}, "
                f"r={viewpoint.r}, target={viewpoint.target}): {exc}"
            ) from exc
        if dim is None:
            dim = vec.shape[0]
        elif vec.shape[0] != dim:
            raise MemovisError(
                f"index build failed at row {i}: encoder returned dimension "
                f"{vec.shape[0]}, expected {dim}"
            )
        rows.append(vec.astype(np.float32))
        if progress is not None:
            progress(i + 1, len(grid))
    return ViewpointIndex(
        viewpoints=tuple(grid),
        embeddings=np.stack(rows),
        fingerprint=scene.fingerprint,
    )


def save_index(index: ViewpointIndex, path) -> None:
    """Write an index file; byte-identical for identical index contents."""
    try:
        digest = bytes.fromhex(index.fingerprint)
    except ValueError as exc:
        raise MemovisError(f"fingerprint is not a hex digest: {index.fingerprint!r}") from exc
    if len(digest) != 32:
        raise MemovisError("fingerprint must be a sha256 hex digest")
    table = np.empty((index.rows, 6), dtype="<f8")
    for i, v in enumerate(index.viewpoints):
        table[i] = (v.alpha, v.beta, v.r, *v.target)
    blob = (
        _HEADER.pack(MAGIC, VERSION, index.dim, index.rows, digest)
        + index.embeddings.astype("<f4").tobytes()
        + table.tobytes()
    )
    Path(path).write_bytes(blob)


def load_index(path) -> ViewpointIndex:
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise MemovisError(f"{path}: truncated index file")
    magic, version, dim, rows, digest = _HEADER.unpack_from(raw, 0)
    if magic != MAGIC:
        raise MemovisError(f"{path}: not a viewpoint index file")
    if version != VERSION:
        raise MemovisError(f"{path}: unsupported index version {version}")
    emb_bytes = rows * dim * 4
    table_bytes = rows * 6 * 8
    if len(raw) != _HEADER.size + emb_bytes + table_bytes:
        raise MemovisError(f"{path}: index file size does not match header")
    emb = np.frombuffer(raw, dtype="<f4", count=rows * dim, offset=_HEADER.size)
    table = np.frombuffer(raw, dtype="<f8", count=rows * 6, offset=_HEADER.size + emb_bytes)
    viewpoints = tuple(
        Viewpoint(
            alpha=float(row[0]),
            beta=float(row[1]),
            r=float(row[2]),
            target=(float(row[3]), float(row[4]), float(row[5])),
        )
        for row in table.reshape(rows, 6)
    )
    return ViewpointIndex(
        viewpoints=viewpoints,
        embeddings=emb.reshape(rows, dim).copy(),
        fingerprint=digest.hex(),
    )


def suggest_views(
    index: ViewpointIndex,
    text: str,
    text_encoder,
    k: int = 4,
    *,
    scene: SceneModel | None = None,
    thumbnail_size: int = 128,
) -> list[ViewSuggestion]:
    """Top-k viewpoints by cosine score against an encoded text query.

    The scan is exhaustive and exact; ties break toward the lower grid row.
    k is capped at the index size. When a scene is supplied each hit also
    carries a rendered thumbnail.
    """
    if not text.strip():
        raise ValueError("query text must be non-empty")
    if k < 1:
        raise ValueError("k must be at least 1")
    query = l2_normalize(text_encoder.encode_text(text))
    scores = index.scores(query)
    order = np.argsort(-scores, kind="stable")[: min(k, index.rows)]

    thumb_config = RendererConfig(width=thumbnail_size, height=thumbnail_size)
    results = []
    for row in order:
        row = int(row)
        viewpoint = index.viewpoints[row]
        thumbnail = None
        if scene is not None:
            pose = orbit_to_pose(viewpoint, scene, thumb_config)
            thumbnail = render_rgb(scene, pose)
        results.append(
            ViewSuggestion(
                row=row,
                score=float(scores[row]),
                viewpoint=viewpoint,
                thumbnail=thumbnail,
            )
        )
    return results
