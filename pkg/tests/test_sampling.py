import math

import pytest

from memovis.viewpoints import SamplingConfig, sample_grid


class TestSamplingConfig:
    def test_default_total_is_27000(self):
        cfg = SamplingConfig()
        assert cfg.total_viewpoints == 27_000

    def test_total_matches_closed_form(self):
        cases = [
            SamplingConfig(),
            SamplingConfig(bins_per_axis=1, angle_step_degrees=90.0, radii=(1.0,)),
            SamplingConfig(bins_per_axis=2, angle_step_degrees=60.0, radii=(0.5, 1.0)),
            SamplingConfig(bins_per_axis=3, angle_step_degrees=45.0, radii=(2.0,)),
        ]
        for cfg in cases:
            expected = (
                cfg.bins_per_axis**3
                * round(360 / cfg.angle_step_degrees)
                * round(180 / cfg.angle_step_degrees)
                * len(cfg.radii)
            )
            assert cfg.total_viewpoints == expected

    def test_rejects_step_not_dividing_180(self):
        with pytest.raises(ValueError, match="divide"):
            SamplingConfig(angle_step_degrees=50.0)
        # 120 divides 360 but not 180 and must still be rejected
        with pytest.raises(ValueError, match="divide"):
            SamplingConfig(angle_step_degrees=120.0)

    def test_rejects_bad_values(self):
        with pytest.raises(ValueError):
            SamplingConfig(bins_per_axis=0)
        with pytest.raises(ValueError):
            SamplingConfig(angle_step_degrees=0.0)
        with pytest.raises(ValueError):
            SamplingConfig(angle_step_degrees=-30.0)
        with pytest.raises(ValueError):
            SamplingConfig(radii=())
        with pytest.raises(ValueError):
            SamplingConfig(radii=(1.0, -0.5))

    def test_round_trips_through_dict(self):
        cfg = SamplingConfig(bins_per_axis=2, angle_step_degrees=45.0, radii=(0.5, 2.0))
        assert SamplingConfig.from_dict(cfg.to_dict()) == cfg


class TestSampleGrid:
    def test_default_grid_size(self, unit_cube_scene):
        grid = sample_grid(unit_cube_scene)
        assert len(grid) == 27_000

    def test_tiny_grid_size(self, unit_cube_scene):
        cfg = SamplingConfig(bins_per_axis=1, angle_step_degrees=90.0, radii=(1.0,))
        assert len(sample_grid(unit_cube_scene, cfg)) == 8

    def test_two_bin_grid_size(self, unit_cube_scene):
        cfg = SamplingConfig(bins_per_axis=2, angle_step_degrees=60.0, radii=(0.5, 1.5))
        assert len(sample_grid(unit_cube_scene, cfg)) == 288

    def test_angles_stay_inside_their_ranges(self, unit_cube_scene):
        grid = sample_grid(unit_cube_scene, SamplingConfig(bins_per_axis=1))
        for v in grid:
            assert 0.0 < v.alpha < math.pi
            assert 0.0 <= v.beta < 2.0 * math.pi

    def test_angle_values_are_bin_centers(self, unit_cube_scene):
        cfg = SamplingConfig(bins_per_axis=1, angle_step_degrees=90.0, radii=(1.0,))
        grid = sample_grid(unit_cube_scene, cfg)
        alphas = sorted({v.alpha for v in grid})
        betas = sorted({v.beta for v in grid})
        assert alphas == pytest.approx([math.radians(45), math.radians(135)])
        assert betas == pytest.approx(
            [math.radians(45), math.radians(135), math.radians(225), math.radians(315)]
        )

    def test_targets_are_bin_centers_of_bounds(self, unit_cube_scene):
        # unit cube bounds are [-0.5, 0.5] per axis; two bins center at -0.25, +0.25
        cfg = SamplingConfig(bins_per_axis=2, angle_step_degrees=90.0, radii=(1.0,))
        targets = {v.target for v in sample_grid(unit_cube_scene, cfg)}
        expected = {
            (x, y, z)
            for x in (-0.25, 0.25)
            for y in (-0.25, 0.25)
            for z in (-0.25, 0.25)
        }
        assert targets == expected

    def test_enumeration_order(self, unit_cube_scene):
        """Targets vary slowest, then alpha, then beta, then radius."""
        cfg = SamplingConfig(bins_per_axis=1, angle_step_degrees=90.0, radii=(0.5, 1.0))
        grid = sample_grid(unit_cube_scene, cfg)
        a45, a135 = math.radians(45), math.radians(135)
        b = [math.radians(45 + 90 * i) for i in range(4)]

        head = [(v.alpha, v.beta, v.r) for v in grid[:6]]
        assert head == pytest.approx(
            [
                (a45, b[0], 0.5),
                (a45, b[0], 1.0),
                (a45, b[1], 0.5),
                (a45, b[1], 1.0),
                (a45, b[2], 0.5),
                (a45, b[2], 1.0),
            ]
        )
        assert grid[-1].alpha == pytest.approx(a135)
        assert grid[-1].beta == pytest.approx(b[3])
        assert grid[-1].r == 1.0

    def test_target_major_ordering(self, unit_cube_scene):
        cfg = SamplingConfig(bins_per_axis=2, angle_step_degrees=90.0, radii=(1.0,))
        grid = sample_grid(unit_cube_scene, cfg)
        per_target = 8  # 2 alphas x 4 betas x 1 radius
        # first block shares the first target; z bin varies before y and x
        assert {v.target for v in grid[:per_target]} == {grid[0].target}
        assert grid[0].target == (-0.25, -0.25, -0.25)
        assert grid[per_target].target == (-0.25, -0.25, 0.25)
        assert grid[2 * per_target].target == (-0.25, 0.25, -0.25)
        assert grid[4 * per_target].target == (0.25, -0.25, -0.25)

    def test_grid_is_deterministic(self, unit_cube_scene):
        cfg = SamplingConfig(bins_per_axis=2, angle_step_degrees=45.0, radii=(0.5, 1.0))
        assert sample_grid(unit_cube_scene, cfg) == sample_grid(unit_cube_scene, cfg)
