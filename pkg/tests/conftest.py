import math

import pytest

from glbkit import build_glb, cube_geometry, quad_geometry
from memovis.scene import Viewpoint, load_scene


@pytest.fixture
def unit_cube_scene(tmp_path):
    """One unit cube centered at the origin, red."""
    path = tmp_path / "cube.glb"
    path.write_bytes(build_glb([(*cube_geometry(), (200, 40, 40))]))
    return load_scene(path)


@pytest.fixture
def two_cube_scene(tmp_path):
    """Front cube at x=+1.2 occludes back cube at x=-1.2 from a +X camera."""
    path = tmp_path / "two.glb"
    path.write_bytes(
        build_glb(
            [
                (*cube_geometry(center=(1.2, 0.0, 0.0)), (200, 40, 40)),
                (*cube_geometry(center=(-1.2, 0.0, 0.0)), (40, 40, 200)),
            ]
        )
    )
    return load_scene(path)


@pytest.fixture
def three_cube_scene(tmp_path):
    """Three well-separated cubes along Z, all visible from a +X camera."""
    path = tmp_path / "three.glb"
    path.write_bytes(
        build_glb(
            [
                (*cube_geometry(center=(0.0, 0.0, -2.5)), (200, 40, 40)),
                (*cube_geometry(center=(0.0, 0.0, 0.0)), (40, 200, 40)),
                (*cube_geometry(center=(0.0, 0.0, 2.5)), (40, 40, 200)),
            ]
        )
    )
    return load_scene(path)


@pytest.fixture
def side_view():
    """Camera on the +X axis looking at the origin, far enough to see background."""
    return Viewpoint(alpha=math.pi / 2, beta=0.0, r=3.0, target=(0.0, 0.0, 0.0))
