import hashlib
import math

import numpy as np
import pytest

from glbkit import build_glb, cube_geometry
from memovis.errors import MemovisError
from memovis.scene import RendererConfig, Viewpoint, load_scene
from memovis.viewpoints import (
    SamplingConfig,
    ViewpointIndex,
    build_index,
    l2_normalize,
    load_index,
    save_index,
    suggest_views,
)

TINY = SamplingConfig(bins_per_axis=1, angle_step_degrees=90.0, radii=(1.0,))
SMALL_RENDER = RendererConfig(width=32, height=32)


class ConstantImageEncoder:
    """Maps every image to the same direction."""

    def __init__(self, dim=8):
        self.dim = dim

    def encode_image(self, image):
        return np.ones(self.dim, dtype=np.float64)


class ByteHashImageEncoder:
    """Deterministic image-to-vector stub: expands a digest of the pixels."""

    def __init__(self, dim=16):
        self.dim = dim

    def encode_image(self, image):
        seed = hashlib.sha256(image.tobytes()).digest()
        out = b""
        counter = 0
        while len(out) < self.dim * 4:
            out += hashlib.sha256(seed + counter.to_bytes(4, "little")).digest()
            counter += 1
        words = np.frombuffer(out[: self.dim * 4], dtype="<u4")
        return words.astype(np.float64) / np.iinfo(np.uint32).max - 0.5


class VectorTextEncoder:
    """Returns a pre-registered vector for each known query string."""

    def __init__(self, table):
        self.table = table

    def encode_text(self, text):
        return np.asarray(self.table[text], dtype=np.float64)


def synthetic_index(rows, fingerprint=None):
    """Index over hand-picked embedding rows with placeholder viewpoints."""
    rows = np.asarray(rows, dtype=np.float64)
    rows = rows / np.linalg.norm(rows, axis=1, keepdims=True)
    viewpoints = tuple(
        Viewpoint(alpha=1.0, beta=(i * 0.1) % (2 * math.pi), r=1.0) for i in range(len(rows))
    )
    return ViewpointIndex(
        viewpoints=viewpoints,
        embeddings=rows.astype(np.float32),
        fingerprint=fingerprint or hashlib.sha256(rows.tobytes()).hexdigest(),
    )


class TestBuildIndex:
    def test_one_row_per_grid_viewpoint(self, unit_cube_scene):
        index = build_index(
            unit_cube_scene, ByteHashImageEncoder(), TINY, render_config=SMALL_RENDER
        )
        assert index.rows == TINY.total_viewpoints == 8
        assert index.dim == 16
        assert len(index.viewpoints) == 8

    def test_rows_are_unit_norm(self, unit_cube_scene):
        index = build_index(
            unit_cube_scene, ByteHashImageEncoder(), TINY, render_config=SMALL_RENDER
        )
        norms = np.linalg.norm(index.embeddings.astype(np.float64), axis=1)
        assert np.allclose(norms, 1.0, atol=1e-6)

    def test_fingerprint_is_source_file_hash(self, tmp_path):
        path = tmp_path / "cube.glb"
        blob = build_glb([(*cube_geometry(), (200, 40, 40))])
        path.write_bytes(blob)
        scene = load_scene(path)
        index = build_index(scene, ConstantImageEncoder(), TINY, render_config=SMALL_RENDER)
        assert index.fingerprint == hashlib.sha256(blob).hexdigest()

    def test_progress_callback_sees_every_row(self, unit_cube_scene):
        seen = []
        build_index(
            unit_cube_scene,
            ConstantImageEncoder(),
            TINY,
            render_config=SMALL_RENDER,
            progress=lambda done, total: seen.append((done, total)),
        )
        assert seen == [(i + 1, 8) for i in range(8)]

    def test_encoder_failure_names_the_viewpoint(self, unit_cube_scene):
        class Boom:
            def encode_image(self, image):
                raise RuntimeError("no weights")

        with pytest.raises(MemovisError, match=r"row 0.*alpha="):
            build_index(unit_cube_scene, Boom(), TINY, render_config=SMALL_RENDER)

    def test_dimension_drift_is_rejected(self, unit_cube_scene):
        class Drifting:
            def __init__(self):
                self.calls = 0

            def encode_image(self, image):
                self.calls += 1
                return np.ones(4 if self.calls == 1 else 5)

        with pytest.raises(MemovisError, match="dimension"):
            build_index(unit_cube_scene, Drifting(), TINY, render_config=SMALL_RENDER)


class TestIndexFile:
    def test_round_trip(self, unit_cube_scene, tmp_path):
        index = build_index(
            unit_cube_scene, ByteHashImageEncoder(), TINY, render_config=SMALL_RENDER
        )
        path = tmp_path / "views.idx"
        save_index(index, path)
        loaded = load_index(path)
        assert loaded.fingerprint == index.fingerprint
        assert loaded.viewpoints == index.viewpoints
        assert np.array_equal(loaded.embeddings, index.embeddings)

    def test_rebuild_writes_identical_bytes(self, unit_cube_scene, tmp_path):
        a = tmp_path / "a.idx"
        b = tmp_path / "b.idx"
        for path in (a, b):
            index = build_index(
                unit_cube_scene, ByteHashImageEncoder(), TINY, render_config=SMALL_RENDER
            )
            save_index(index, path)
        assert a.read_bytes() == b.read_bytes()

    def test_rejects_foreign_file(self, tmp_path):
        path = tmp_path / "bogus.idx"
        path.write_bytes(b"PK\x03\x04" + b"\x00" * 100)
        with pytest.raises(MemovisError, match="not a viewpoint index"):
            load_index(path)

    def test_rejects_truncated_file(self, tmp_path):
        path = tmp_path / "short.idx"
        path.write_bytes(b"MV")
        with pytest.raises(MemovisError, match="truncated"):
            load_index(path)

    def test_rejects_size_mismatch(self, unit_cube_scene, tmp_path):
        index = build_index(
            unit_cube_scene, ConstantImageEncoder(), TINY, render_config=SMALL_RENDER
        )
        path = tmp_path / "cut.idx"
        save_index(index, path)
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(MemovisError, match="size"):
            load_index(path)

    def test_rejects_unknown_version(self, unit_cube_scene, tmp_path):
        index = build_index(
            unit_cube_scene, ConstantImageEncoder(), TINY, render_config=SMALL_RENDER
        )
        path = tmp_path / "vers.idx"
        save_index(index, path)
        raw = bytearray(path.read_bytes())
        raw[4] = 99
        path.write_bytes(bytes(raw))
        with pytest.raises(MemovisError, match="version"):
            load_index(path)

    def test_rejects_non_hex_fingerprint_on_save(self, tmp_path):
        index = synthetic_index(np.eye(4), fingerprint="not-a-digest")
        with pytest.raises(MemovisError, match="hex"):
            save_index(index, tmp_path / "bad.idx")


class TestSuggestViews:
    def test_self_query_scores_one(self):
        rows = np.eye(5)
        index = synthetic_index(rows)
        encoder = VectorTextEncoder({"third": rows[2]})
        hits = suggest_views(index, "third", encoder, k=1)
        assert hits[0].row == 2
        assert hits[0].score == pytest.approx(1.0)
        assert hits[0].viewpoint == index.viewpoints[2]

    def test_matches_brute_force_ranking(self):
        rng = np.random.default_rng(7)
        n, d = 300, 24
        rows = rng.normal(size=(n, d))
        index = synthetic_index(rows)
        emb = index.embeddings.astype(np.float64)

        table = {f"q{i}": rng.normal(size=d) for i in range(20)}
        encoder = VectorTextEncoder(table)
        for text, raw in table.items():
            q = l2_normalize(raw)
            scores = [float(np.dot(emb[i], q)) for i in range(n)]
            expected = sorted(range(n), key=lambda i: (-scores[i], i))[:5]
            got = [hit.row for hit in suggest_views(index, text, encoder, k=5)]
            assert got == expected

    def test_score_ties_break_toward_lower_row(self):
        v = np.array([1.0, 0.0, 0.0, 0.0])
        w = np.array([0.0, 1.0, 0.0, 0.0])
        index = synthetic_index([v, w, v, v])
        encoder = VectorTextEncoder({"q": v})
        hits = suggest_views(index, "q", encoder, k=4)
        assert [h.row for h in hits] == [0, 2, 3, 1]

    def test_smaller_k_is_a_prefix_of_larger_k(self):
        rng = np.random.default_rng(11)
        index = synthetic_index(rng.normal(size=(40, 6)))
        encoder = VectorTextEncoder({"q": rng.normal(size=6)})
        short = [h.row for h in suggest_views(index, "q", encoder, k=2)]
        long = [h.row for h in suggest_views(index, "q", encoder, k=6)]
        assert long[:2] == short

    def test_k_is_capped_at_index_size(self):
        index = synthetic_index(np.eye(3))
        encoder = VectorTextEncoder({"q": [1.0, 0.0, 0.0]})
        assert len(suggest_views(index, "q", encoder, k=50)) == 3

    def test_scores_are_non_increasing(self):
        rng = np.random.default_rng(3)
        index = synthetic_index(rng.normal(size=(64, 8)))
        encoder = VectorTextEncoder({"q": rng.normal(size=8)})
        scores = [h.score for h in suggest_views(index, "q", encoder, k=64)]
        assert all(a >= b for a, b in zip(scores, scores[1:]))

    def test_rejects_blank_text_and_bad_k(self):
        index = synthetic_index(np.eye(3))
        encoder = VectorTextEncoder({})
        with pytest.raises(ValueError, match="non-empty"):
            suggest_views(index, "   ", encoder)
        with pytest.raises(ValueError, match="k"):
            suggest_views(index, "q", VectorTextEncoder({"q": [1, 0, 0]}), k=0)

    def test_rejects_query_dimension_mismatch(self):
        index = synthetic_index(np.eye(3))
        encoder = VectorTextEncoder({"q": [1.0, 0.0]})
        with pytest.raises(ValueError, match="dimension"):
            suggest_views(index, "q", encoder)

    def test_thumbnails_render_when_scene_given(self, unit_cube_scene):
        index = build_index(
            unit_cube_scene, ConstantImageEncoder(), TINY, render_config=SMALL_RENDER
        )
        encoder = VectorTextEncoder({"q": np.ones(8)})
        with_scene = suggest_views(
            index, "q", encoder, k=2, scene=unit_cube_scene, thumbnail_size=48
        )
        without = suggest_views(index, "q", encoder, k=2)
        assert with_scene[0].thumbnail.shape == (48, 48, 3)
        assert without[0].thumbnail is None

    def test_constant_rows_rank_by_row_order(self, unit_cube_scene):
        index = build_index(
            unit_cube_scene, ConstantImageEncoder(), TINY, render_config=SMALL_RENDER
        )
        encoder = VectorTextEncoder({"q": np.ones(8)})
        hits = suggest_views(index, "q", encoder, k=4)
        assert [h.row for h in hits] == [0, 1, 2, 3]

    def test_suggestion_dict_shape(self):
        index = synthetic_index(np.eye(3))
        encoder = VectorTextEncoder({"q": [1.0, 0.0, 0.0]})
        payload = suggest_views(index, "q", encoder, k=1)[0].to_dict()
        assert payload["row"] == 0
        assert payload["score"] == pytest.approx(1.0)
        assert set(payload["viewpoint"]) == {"alpha", "beta", "r", "target"}


class TestNormalize:
    def test_rejects_zero_vector(self):
        with pytest.raises(ValueError, match="norm"):
            l2_normalize(np.zeros(4))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError, match="norm"):
            l2_normalize(np.array([np.inf, 1.0]))

    def test_unit_output(self):
        out = l2_normalize(np.array([3.0, 4.0]))
        assert np.allclose(out, [0.6, 0.8])
