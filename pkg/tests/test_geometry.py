"""Domains, center grids, fill distance, and greedy augmentation."""

import numpy as np
import pytest

from kernelpi import (
    CenterSet,
    Domain,
    Kernel,
    fill_distance,
    greedy_augment,
    grid_centers,
    power_function,
    unit_box,
)


class TestDomain:
    def test_validation(self):
        with pytest.raises(ValueError):
            Domain(np.array([0.0, 0.0]), np.array([1.0, 0.0]))
        with pytest.raises(ValueError):
            Domain(np.array([1.0]), np.array([0.0]))

    def test_volume_and_contains(self):
        dom = unit_box(2)
        assert dom.volume == 4.0
        inside = dom.contains(np.array([[0.0, 0.0], [1.0, 1.0], [1.1, 0.0]]))
        np.testing.assert_array_equal(inside, [True, True, False])

    def test_grid_is_row_major(self):
        dom = unit_box(2)
        pts = dom.grid(3)
        # first coordinate varies slowest
        np.testing.assert_allclose(pts[0], [-1, -1])
        np.testing.assert_allclose(pts[1], [-1, 0])
        np.testing.assert_allclose(pts[3], [0, -1])

    def test_boundary_point_sets(self):
        dom = unit_box(2)
        assert len(dom.corners()) == 4
        assert len(dom.face_midpoints()) == 4
        boundary = np.vstack([dom.corners(), dom.face_midpoints()])
        assert len(boundary) == 8


class TestGridCenters:
    def test_two_per_dim_gives_corners(self):
        centers = grid_centers(unit_box(2), 2)
        expected = {(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)}
        assert {tuple(p) for p in centers.points} == expected

    def test_three_per_dim_spacing(self):
        centers = grid_centers(unit_box(2), 3)
        assert len(centers) == 9
        xs = np.unique(centers.points[:, 0])
        np.testing.assert_allclose(np.diff(xs), 1.0)

    def test_five_per_dim_spacing(self):
        centers = grid_centers(unit_box(2), 5)
        assert len(centers) == 25
        xs = np.unique(centers.points[:, 0])
        np.testing.assert_allclose(np.diff(xs), 0.5)

    def test_single_center_is_midpoint(self):
        centers = grid_centers(Domain(np.array([0.0, 0.0]), np.array([2.0, 4.0])), 1)
        np.testing.assert_allclose(centers.points, [[1.0, 2.0]])

    def test_center_set_validation(self):
        with pytest.raises(ValueError):
            CenterSet(np.empty((0, 2)))
        with pytest.raises(ValueError):
            CenterSet(np.array([[np.nan, 0.0]]))


class TestFillDistance:
    def test_single_center_at_origin(self):
        dom = unit_box(2)
        centers = CenterSet(np.zeros((1, 2)))
        assert fill_distance(centers, dom, 201) == pytest.approx(np.sqrt(2), rel=1e-12)

    @pytest.mark.parametrize("n", [3, 5, 9])
    def test_endpoint_grids(self, n):
        # brute force over the probe grid is the oracle; for endpoint grids the
        # worst point is a cell midpoint at distance sqrt(2)/(n-1), which lies
        # on a 161-point probe axis for all three grid sizes
        dom = unit_box(2)
        centers = grid_centers(dom, n)
        h = fill_distance(centers, dom, 161)
        assert h == pytest.approx(np.sqrt(2) / (n - 1), rel=1e-10)

    def test_monotone_under_center_addition(self):
        dom = unit_box(2)
        centers = grid_centers(dom, 3)
        h_before = fill_distance(centers, dom, 101)
        h_after = fill_distance(centers.add([0.5, 0.5]), dom, 101)
        assert h_after <= h_before

    def test_strictly_decreasing_in_grid_size(self):
        dom = unit_box(2)
        values = [fill_distance(grid_centers(dom, n), dom, 101) for n in (3, 5, 9)]
        assert values[0] > values[1] > values[2]

    def test_probe_validation(self):
        with pytest.raises(ValueError):
            fill_distance(CenterSet(np.zeros((1, 2))), unit_box(2), 1)


class TestGreedyAugment:
    def test_lone_center_sends_next_to_corner(self):
        # exhaustive probe-grid evaluation: power grows with distance for a
        # monotone radial kernel, so the winner is a corner; ties break to the
        # lowest row-major index, which is (-1, -1)
        dom = unit_box(2)
        k = Kernel("gaussian", 0.5)
        centers = CenterSet(np.zeros((1, 2)))
        out = greedy_augment(centers, k, dom, probe_n=41)
        np.testing.assert_allclose(out.points[-1], [-1.0, -1.0])

    def test_never_selects_existing_center(self):
        dom = unit_box(2)
        k = Kernel("matern52", 0.5)
        centers = grid_centers(dom, 3)
        out = greedy_augment(centers, k, dom, probe_n=41)
        new = out.points[-1]
        assert not any(np.allclose(new, p) for p in centers.points)

    def test_power_drops_at_selected_point(self):
        dom = unit_box(2)
        k = Kernel("matern52", 0.5)
        centers = grid_centers(dom, 3)
        out = greedy_augment(centers, k, dom, probe_n=41)
        assert power_function(k, out, out.points[-1]) <= 1e-6

    def test_sup_power_decreases(self):
        dom = unit_box(2)
        k = Kernel("matern52", 0.5)
        centers = grid_centers(dom, 3)
        probe = dom.grid(41)
        before = power_function(k, centers, probe).max()
        after = power_function(k, greedy_augment(centers, k, dom, 41), probe).max()
        assert after < before


class TestCenterCsv:
    def test_round_trip(self, tmp_path):
        centers = grid_centers(unit_box(2), 3)
        path = tmp_path / "centers.csv"
        centers.save_csv(path)
        header = path.read_text().splitlines()[0]
        assert header == "x1,x2"
        loaded = CenterSet.load_csv(path)
        np.testing.assert_allclose(loaded.points, centers.points)
