"""Minimal glTF 2.0 loader (.gltf with external/embedded buffers, .glb).

Covers the subset this backend needs: triangle geometry (modes 4/5/6),
node transforms, and flat base colors from pbrMetallicRoughness. Textures,
skins, animations, and sparse accessors are out of scope.

Mesh ids are assigned in document order starting at 0: the default scene's
node tree is walked depth-first, and every (node, primitive) pair that
carries triangles becomes one mesh. Files without a scene fall back to the
meshes array in order with identity transforms.
"""

from __future__ import annotations

import base64
import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from ..errors import SceneLoadError
from .model import SceneModel, TriangleMesh

_GLB_MAGIC = 0x46546C67  # 'glTF'
_CHUNK_JSON = 0x4E4F534A
_CHUNK_BIN = 0x004E4942

_COMPONENT_DTYPES = {
    5120: np.int8,
    5121: np.uint8,
    5122: np.int16,
    5123: np.uint16,
    5125: np.uint32,
    5126: np.float32,
}
_TYPE_COUNTS = {"SCALAR": 1, "VEC2": 2, "VEC3": 3, "VEC4": 4, "MAT4": 16}

_DEFAULT_COLOR = (204, 204, 204)


def load_scene(path) -> SceneModel:
    """Load a glTF 2.0 file into an immutable SceneModel.

    Raises SceneLoadError with the offending path and reason on unreadable
    files, parse failures, or empty/unsupported geometry.
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise SceneLoadError(path, f"unreadable file: {exc}") from exc

    try:
        if raw[:4] == b"glTF":
            doc, bin_chunk = _parse_glb(raw)
        else:
            doc = json.loads(raw.decode("utf-8"))
            bin_chunk = None
    except SceneLoadError:
        raise
    except Exception as exc:
        raise SceneLoadError(path, f"parse failure: {exc}") from exc

    try:
        buffers = _load_buffers(doc, bin_chunk, path.parent)
        meshes = _extract_meshes(doc, buffers)
    except SceneLoadError:
        raise
    except Exception as exc:
        raise SceneLoadError(path, f"bad geometry data: {exc}") from exc

    if not meshes:
        raise SceneLoadError(path, "empty geometry")
    return SceneModel.from_meshes(meshes, fingerprint=hashlib.sha256(raw).hexdigest())


def _parse_glb(raw: bytes):
    if len(raw) < 12:
        raise ValueError("truncated GLB header")
    magic, version, _length = struct.unpack_from("<III", raw, 0)
    if magic != _GLB_MAGIC:
        raise ValueError("bad GLB magic")
    if version != 2:
        raise ValueError(f"unsupported GLB version {version}")
    offset = 12
    doc = None
    bin_chunk = None
    while offset + 8 <= len(raw):
        chunk_len, chunk_type = struct.unpack_from("<II", raw, offset)
        offset += 8
        data = raw[offset : offset + chunk_len]
        offset += chunk_len
        if chunk_type == _CHUNK_JSON:
            doc = json.loads(data.decode("utf-8"))
        elif chunk_type == _CHUNK_BIN:
            bin_chunk = data
    if doc is None:
        raise ValueError("GLB missing JSON chunk")
    return doc, bin_chunk


def _load_buffers(doc: dict, bin_chunk, base_dir: Path) -> list[bytes]:
    buffers = []
    for i, buf in enumerate(doc.get("buffers", [])):
        uri = buf.get("uri")
        if uri is None:
            if bin_chunk is None:
                raise ValueError(f"buffer {i} has no uri and no GLB binary chunk")
            buffers.append(bin_chunk)
        elif uri.startswith("data:"):
            _, _, payload = uri.partition(",")
            buffers.append(base64.b64decode(payload))
        else:
            buffers.append((base_dir / uri).read_bytes())
    return buffers


def _read_accessor(doc: dict, buffers: list[bytes], accessor_idx: int) -> np.ndarray:
    acc = doc["accessors"][accessor_idx]
    if "sparse" in acc:
        raise ValueError("sparse accessors are not supported")
    dtype = _COMPONENT_DTYPES[acc["componentType"]]
    ncomp = _TYPE_COUNTS[acc["type"]]
    count = acc["count"]

    view = doc["bufferViews"][acc["bufferView"]]
    data = buffers[view["buffer"]]
    start = view.get("byteOffset", 0) + acc.get("byteOffset", 0)
    elem_size = np.dtype(dtype).itemsize * ncomp
    stride = view.get("byteStride") or elem_size

    if stride == elem_size:
        arr = np.frombuffer(data, dtype=dtype, count=count * ncomp, offset=start)
        return arr.reshape(count, ncomp)
    # Interleaved: gather element by element.
    out = np.empty((count, ncomp), dtype=dtype)
    for i in range(count):
        out[i] = np.frombuffer(data, dtype=dtype, count=ncomp, offset=start + i * stride)
    return out


def _node_matrix(node: dict) -> np.ndarray:
    if "matrix" in node:
        return np.array(node["matrix"], dtype=np.float64).reshape(4, 4).T
    m = np.eye(4)
    if "scale" in node:
        m = np.diag(list(node["scale"]) + [1.0]) @ m
    if "rotation" in node:
        x, y, z, w = node["rotation"]
        rot = np.array(
            [
                [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w), 0],
                [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w), 0],
                [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y), 0],
                [0, 0, 0, 1],
            ]
        )
        m = rot @ m
    if "translation" in node:
        t = np.eye(4)
        t[:3, 3] = node["translation"]
        m = t @ m
    return m


def _triangulate(indices: np.ndarray, mode: int) -> np.ndarray:
    if mode == 4:  # TRIANGLES
        if len(indices) % 3:
            raise ValueError("triangle index count not divisible by 3")
        return indices.reshape(-1, 3)
    if mode == 5:  # TRIANGLE_STRIP
        tris = []
        for i in range(len(indices) - 2):
            a, b, c = indices[i], indices[i + 1], indices[i + 2]
            tris.append((a, c, b) if i % 2 else (a, b, c))
        return np.array(tris, dtype=np.int64).reshape(-1, 3)
    if mode == 6:  # TRIANGLE_FAN
        tris = [(indices[0], indices[i], indices[i + 1]) for i in range(1, len(indices) - 1)]
        return np.array(tris, dtype=np.int64).reshape(-1, 3)
    raise ValueError(f"unsupported primitive mode {mode}")


def _base_color(doc: dict, prim: dict) -> tuple[int, int, int]:
    mat_idx = prim.get("material")
    if mat_idx is None:
        return _DEFAULT_COLOR
    pbr = doc.get("materials", [])[mat_idx].get("pbrMetallicRoughness", {})
    factor = pbr.get("baseColorFactor")
    if factor is None:
        return _DEFAULT_COLOR
    return tuple(int(round(min(max(c, 0.0), 1.0) * 255)) for c in factor[:3])


def _extract_meshes(doc: dict, buffers: list[bytes]) -> list[TriangleMesh]:
    # (mesh index, world transform) pairs in document order.
    instances: list[tuple[int, np.ndarray]] = []
    nodes = doc.get("nodes", [])
    scenes = doc.get("scenes", [])
    if scenes:
        scene = scenes[doc.get("scene", 0)]

        def walk(node_idx: int, parent: np.ndarray):
            node = nodes[node_idx]
            world = parent @ _node_matrix(node)
            if "mesh" in node:
                instances.append((node["mesh"], world))
            for child in node.get("children", []):
                walk(child, world)

        for root in scene.get("nodes", []):
            walk(root, np.eye(4))
    else:
        for i in range(len(doc.get("meshes", []))):
            instances.append((i, np.eye(4)))

    out: list[TriangleMesh] = []
    for mesh_idx, world in instances:
        mesh = doc["meshes"][mesh_idx]
        for prim in mesh.get("primitives", []):
            if "POSITION" not in prim.get("attributes", {}):
                continue
            positions = _read_accessor(doc, buffers, prim["attributes"]["POSITION"])
            positions = positions.astype(np.float64)
            if "indices" in prim:
                indices = _read_accessor(doc, buffers, prim["indices"]).ravel().astype(np.int64)
            else:
                indices = np.arange(len(positions), dtype=np.int64)
            triangles = _triangulate(indices, prim.get("mode", 4))
            if len(triangles) == 0:
                continue
            homo = np.column_stack([positions, np.ones(len(positions))])
            world_pos = (world @ homo.T).T[:, :3]
            out.append(
                TriangleMesh(
                    mesh_id=len(out),
                    positions=np.ascontiguousarray(world_pos),
                    triangles=triangles,
                    base_color=_base_color(doc, prim),
                )
            )
    return out
