from .model import CameraPose, SceneModel, TriangleMesh, Viewpoint
from .gltf import load_scene
from .render import (
    RendererConfig,
    orbit_to_pose,
    raycast,
    raycast_grid,
    render_depth,
    render_rgb,
)

__all__ = [
    "CameraPose",
    "RendererConfig",
    "SceneModel",
    "TriangleMesh",
    "Viewpoint",
    "load_scene",
    "orbit_to_pose",
    "raycast",
    "raycast_grid",
    "render_depth",
    "render_rgb",
]
