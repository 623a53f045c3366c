import base64
import json
import struct

import numpy as np
import pytest

from glbkit import build_glb, cube_geometry
from memovis.errors import SceneLoadError
from memovis.scene import load_scene


def test_single_cube_roundtrip(tmp_path):
    positions, triangles = cube_geometry()
    path = tmp_path / "cube.glb"
    path.write_bytes(build_glb([(positions, triangles, (10, 20, 30))]))

    scene = load_scene(path)
    assert len(scene.meshes) == 1
    mesh = scene.meshes[0]
    assert mesh.mesh_id == 0
    assert mesh.base_color == (10, 20, 30)
    np.testing.assert_allclose(mesh.positions, positions)
    np.testing.assert_array_equal(mesh.triangles, triangles.astype(np.int64))
    np.testing.assert_allclose(scene.bounds_min, [-0.5, -0.5, -0.5])
    np.testing.assert_allclose(scene.bounds_max, [0.5, 0.5, 0.5])


def test_mesh_ids_follow_document_order(tmp_path):
    path = tmp_path / "two.glb"
    path.write_bytes(
        build_glb(
            [
                (*cube_geometry(center=(2, 0, 0)), (255, 0, 0)),
                (*cube_geometry(center=(-2, 0, 0)), (0, 0, 255)),
            ]
        )
    )
    scene = load_scene(path)
    assert [m.mesh_id for m in scene.meshes] == [0, 1]
    # Document order: first-listed cube is the +X one.
    assert scene.meshes[0].positions[:, 0].mean() > 0
    assert scene.meshes[1].positions[:, 0].mean() < 0


def test_bounds_contain_all_vertices(tmp_path):
    path = tmp_path / "two.glb"
    path.write_bytes(
        build_glb(
            [
                (*cube_geometry(center=(3, 1, 0), size=2.0), (255, 0, 0)),
                (*cube_geometry(center=(-1, 0, 4)), (0, 0, 255)),
            ]
        )
    )
    scene = load_scene(path)
    for mesh in scene.meshes:
        assert (mesh.positions >= scene.bounds_min - 1e-9).all()
        assert (mesh.positions <= scene.bounds_max + 1e-9).all()


def test_zero_mesh_file_reports_empty_geometry(tmp_path):
    doc = {"asset": {"version": "2.0"}, "scenes": [{"nodes": []}], "scene": 0, "nodes": []}
    path = tmp_path / "empty.gltf"
    path.write_text(json.dumps(doc))
    with pytest.raises(SceneLoadError, match="empty geometry"):
        load_scene(path)


def test_unreadable_path_reports_path_and_reason(tmp_path):
    missing = tmp_path / "nope.glb"
    with pytest.raises(SceneLoadError, match="nope.glb"):
        load_scene(missing)


def test_corrupt_glb_reports_parse_failure(tmp_path):
    path = tmp_path / "bad.glb"
    path.write_bytes(b"glTF" + b"\x00" * 4)
    with pytest.raises(SceneLoadError):
        load_scene(path)


def test_gltf_with_data_uri_buffer(tmp_path):
    positions, triangles = cube_geometry()
    pos_bytes = positions.astype(np.float32).tobytes()
    idx_bytes = triangles.astype(np.uint16).tobytes()
    payload = pos_bytes + idx_bytes
    doc = {
        "asset": {"version": "2.0"},
        "scene": 0,
        "scenes": [{"nodes": [0]}],
        "nodes": [{"mesh": 0}],
        "meshes": [{"primitives": [{"attributes": {"POSITION": 0}, "indices": 1}]}],
        "accessors": [
            {
                "bufferView": 0,
                "componentType": 5126,
                "count": 8,
                "type": "VEC3",
                "min": positions.min(axis=0).tolist(),
                "max": positions.max(axis=0).tolist(),
            },
            {"bufferView": 1, "componentType": 5123, "count": 36, "type": "SCALAR"},
        ],
        "bufferViews": [
            {"buffer": 0, "byteOffset": 0, "byteLength": len(pos_bytes)},
            {"buffer": 0, "byteOffset": len(pos_bytes), "byteLength": len(idx_bytes)},
        ],
        "buffers": [
            {
                "byteLength": len(payload),
                "uri": "data:application/octet-stream;base64," + base64.b64encode(payload).decode(),
            }
        ],
    }
    path = tmp_path / "embedded.gltf"
    path.write_text(json.dumps(doc))
    scene = load_scene(path)
    np.testing.assert_allclose(scene.meshes[0].positions, positions)


def test_gltf_with_external_buffer_and_node_transform(tmp_path):
    positions, triangles = cube_geometry()
    pos_bytes = positions.astype(np.float32).tobytes()
    idx_bytes = triangles.astype(np.uint16).tobytes()
    (tmp_path / "geo.bin").write_bytes(pos_bytes + idx_bytes)
    doc = {
        "asset": {"version": "2.0"},
        "scene": 0,
        "scenes": [{"nodes": [0]}],
        "nodes": [{"mesh": 0, "translation": [5.0, 0.0, 0.0], "scale": [2.0, 2.0, 2.0]}],
        "meshes": [{"primitives": [{"attributes": {"POSITION": 0}, "indices": 1}]}],
        "accessors": [
            {
                "bufferView": 0,
                "componentType": 5126,
                "count": 8,
                "type": "VEC3",
                "min": positions.min(axis=0).tolist(),
                "max": positions.max(axis=0).tolist(),
            },
            {"bufferView": 1, "componentType": 5123, "count": 36, "type": "SCALAR"},
        ],
        "bufferViews": [
            {"buffer": 0, "byteOffset": 0, "byteLength": len(pos_bytes)},
            {"buffer": 0, "byteOffset": len(pos_bytes), "byteLength": len(idx_bytes)},
        ],
        "buffers": [{"byteLength": len(pos_bytes) + len(idx_bytes), "uri": "geo.bin"}],
    }
    path = tmp_path / "external.gltf"
    path.write_text(json.dumps(doc))
    scene = load_scene(path)
    # Scaled by 2 then translated by +5 in x.
    np.testing.assert_allclose(scene.meshes[0].positions, positions * 2.0 + [5.0, 0.0, 0.0])


def test_glb_header_fields(tmp_path):
    blob = build_glb([(*cube_geometry(), (1, 2, 3))])
    magic, version, length = struct.unpack_from("<III", blob, 0)
    assert magic == 0x46546C67
    assert version == 2
    assert length == len(blob)
