"""Array geometry, pair enumeration, grids, and TDOA tables."""

import math

import numpy as np
import pytest

from srpfast.geometry import (
    CandidateGrid,
    MicArray,
    MicPair,
    build_spherical_grid,
    build_tdoa_table,
    circular_array,
    enumerate_pairs,
    tdoa_farfield,
    tdoa_nearfield,
)

C = 340.0


def hexagon() -> MicArray:
    """The reference array: 6 mics on a 10 cm circle."""
    return circular_array(6, 0.1, center=(2.9, 3.4, 3.3), speed_of_sound=C)


class TestPairs:
    def test_pair_count(self):
        for m in (2, 3, 4, 6, 9):
            arr = circular_array(m, 0.2)
            assert arr.num_pairs == m * (m - 1) // 2

    def test_canonical_order(self):
        """Lexicographic in (m', m); the first M-1 pairs reference mic 0."""
        arr = circular_array(4, 0.2)
        idx = [(p.index_m, p.index_m_prime) for p in arr.pairs]
        assert idx == [(1, 0), (2, 0), (3, 0), (2, 1), (3, 1), (3, 2)]

    def test_hexagon_chord_lengths(self):
        # chords of a regular hexagon with radius r: r, r*sqrt(3), 2r
        arr = hexagon()
        dists = sorted(round(p.distance, 12) for p in arr.pairs)
        expected = sorted(
            [0.1] * 6 + [round(0.1 * math.sqrt(3.0), 12)] * 6 + [0.2] * 3
        )
        np.testing.assert_allclose(dists, expected, rtol=1e-12)
        assert arr.diameter == pytest.approx(0.2, rel=1e-12)

    def test_tdoa_bound_is_distance_over_speed(self):
        arr = hexagon()
        for p in arr.pairs:
            assert p.tdoa_bound == p.distance / C

    def test_pair_validation(self):
        with pytest.raises(ValueError):
            MicPair(index_m=1, index_m_prime=1, distance=0.1, tdoa_bound=1e-4)
        with pytest.raises(ValueError):
            MicPair(index_m=2, index_m_prime=0, distance=0.0, tdoa_bound=1e-4)

    def test_enumerate_pairs_rejects_coincident(self):
        with pytest.raises(ValueError, match="coincident"):
            enumerate_pairs([[0.0, 0.0, 0.0], [0.0, 0.0, 0.0]])


class TestMicArray:
    def test_validation(self):
        with pytest.raises(ValueError):
            MicArray([[0, 0, 0]])
        with pytest.raises(ValueError):
            MicArray([[0, 0], [1, 1]])
        with pytest.raises(ValueError):
            MicArray([[0, 0, 0], [1, 0, 0]], speed_of_sound=0.0)
        with pytest.raises(ValueError):
            MicArray([[0, 0, 0], [np.nan, 0, 0]])

    def test_positions_read_only(self):
        arr = hexagon()
        with pytest.raises(ValueError):
            arr.positions[0, 0] = 1.0

    def test_circular_geometry(self):
        arr = circular_array(8, 0.25, center=(1.0, 2.0, 3.0))
        radii = np.linalg.norm(arr.positions - np.array([1.0, 2.0, 3.0]), axis=1)
        np.testing.assert_allclose(radii, 0.25, rtol=1e-12)
        assert np.all(arr.positions[:, 2] == 3.0)
        np.testing.assert_allclose(arr.center, [1.0, 2.0, 3.0], atol=1e-15)


class TestTdoa:
    def test_colinear_point_hits_bound(self):
        """Source on the pair axis: TDOA equals +-distance/c exactly."""
        arr = MicArray([[0.0, 0.0, 0.0], [0.1, 0.0, 0.0]], speed_of_sound=C)
        pair = arr.pairs[0]
        # mic 1 is 0.1 m closer to a source on the +x side
        assert tdoa_nearfield(arr, pair, [1.0, 0.0, 0.0]) == pytest.approx(
            -0.1 / C, rel=1e-12
        )
        assert tdoa_nearfield(arr, pair, [-1.0, 0.0, 0.0]) == pytest.approx(
            0.1 / C, rel=1e-12
        )
        assert abs(tdoa_nearfield(arr, pair, [1.0, 0.0, 0.0])) == pytest.approx(
            pair.tdoa_bound, rel=1e-12
        )

    def test_broadside_is_zero(self):
        arr = MicArray([[0.0, 0.0, 0.0], [0.1, 0.0, 0.0]], speed_of_sound=C)
        assert tdoa_nearfield(arr, arr.pairs[0], [0.05, 2.0, 0.0]) == pytest.approx(
            0.0, abs=1e-18
        )
        assert tdoa_farfield(arr, arr.pairs[0], [0.0, 1.0, 0.0]) == 0.0

    def test_nearfield_respects_bound(self):
        rng = np.random.default_rng(101)
        for _ in range(50):
            arr = MicArray(rng.normal(size=(4, 3)), speed_of_sound=C)
            point = rng.uniform(-5, 5, size=3)
            for pair in arr.pairs:
                assert abs(tdoa_nearfield(arr, pair, point)) <= pair.tdoa_bound + 1e-12

    def test_farfield_respects_bound(self):
        rng = np.random.default_rng(102)
        for _ in range(50):
            arr = MicArray(rng.normal(size=(4, 3)), speed_of_sound=C)
            r = rng.normal(size=3)
            r /= np.linalg.norm(r)
            for pair in arr.pairs:
                assert abs(tdoa_farfield(arr, pair, r)) <= pair.tdoa_bound + 1e-12

    def test_farfield_requires_unit_direction(self):
        arr = hexagon()
        with pytest.raises(ValueError, match="unit"):
            tdoa_farfield(arr, arr.pairs[0], [0.0, 0.0, -1.0 + 1e-6])

    def test_farfield_is_far_distance_limit(self):
        """Near-field TDOA converges to the plane-wave value."""
        rng = np.random.default_rng(103)
        arr = hexagon()
        for _ in range(20):
            r = rng.normal(size=3)
            r /= np.linalg.norm(r)
            # source far away opposite the propagation direction; residual
            # wavefront curvature scales as diameter^2 / (2 R c) ~ 6e-10 s
            point = arr.center - 1e4 * r
            for pair in arr.pairs:
                near = tdoa_nearfield(arr, pair, point)
                far = tdoa_farfield(arr, pair, r)
                assert abs(near - far) < 1e-8

    def test_pair_tdoa_decomposes_over_reference_mic(self):
        """TDOA(m, m') = TDOA(m, 0) - TDOA(m', 0) for any source."""
        rng = np.random.default_rng(104)
        arr = hexagon()
        by_index = {(p.index_m, p.index_m_prime): p for p in arr.pairs}
        for _ in range(20):
            point = rng.uniform(0, 6, size=3)
            for (m, mp), pair in by_index.items():
                if mp == 0:
                    continue
                lhs = tdoa_nearfield(arr, pair, point)
                rhs = tdoa_nearfield(arr, by_index[(m, 0)], point) - tdoa_nearfield(
                    arr, by_index[(mp, 0)], point
                )
                assert lhs == pytest.approx(rhs, abs=1e-12)


class TestSphericalGrid:
    def test_default_grid_size(self):
        grid = build_spherical_grid()
        # 46 polar x 180 azimuth combinations, pole ring collapsed to 1 node
        assert grid.num_candidates == 46 * 180 - 179 == 8101

    def test_entries_are_unit(self):
        grid = build_spherical_grid()
        norms = np.linalg.norm(grid.entries, axis=1)
        assert np.max(np.abs(norms - 1.0)) <= 1e-12

    def test_no_duplicate_directions(self):
        grid = build_spherical_grid()
        unique = np.unique(grid.entries, axis=0)
        assert unique.shape[0] == grid.num_candidates

    def test_angle_bookkeeping(self):
        grid = build_spherical_grid()
        assert grid.angles_deg.shape == (8101, 2)
        # polar-major: the first 180 rows sweep azimuth at 90 degrees
        assert np.all(grid.angles_deg[:180, 0] == 90.0)
        np.testing.assert_allclose(grid.angles_deg[:180, 1], np.arange(180) * 2.0)
        # polar 180 survives once
        assert np.sum(grid.angles_deg[:, 0] == 180.0) == 1

    def test_angles_match_entries(self):
        grid = build_spherical_grid()
        t = np.radians(grid.angles_deg[:, 0])
        p = np.radians(grid.angles_deg[:, 1])
        expected = -np.stack(
            [np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)], axis=1
        )
        np.testing.assert_allclose(grid.entries, expected, atol=1e-12)

    def test_full_sphere_collapses_both_poles(self):
        grid = build_spherical_grid((0.0, 180.0), (0.0, 350.0), 10.0)
        # 19 x 36 minus 35 duplicates at each of the two poles
        assert grid.num_candidates == 19 * 36 - 2 * 35

    def test_step_validation(self):
        with pytest.raises(ValueError):
            build_spherical_grid(step_deg=0.0)
        with pytest.raises(ValueError):
            build_spherical_grid((180.0, 90.0))


class TestCandidateGrid:
    def test_farfield_entries_must_be_unit(self):
        with pytest.raises(ValueError, match="unit"):
            CandidateGrid(mode="far_field", entries=[[0.0, 0.0, 0.9]])

    def test_mode_validation(self):
        with pytest.raises(ValueError, match="mode"):
            CandidateGrid(mode="mid_field", entries=[[0.0, 0.0, 1.0]])

    def test_require_table(self):
        grid = CandidateGrid(mode="near_field", entries=[[1.0, 2.0, 0.5]])
        with pytest.raises(ValueError, match="table"):
            grid.require_table()

    def test_entries_read_only(self):
        grid = build_spherical_grid(step_deg=30.0)
        with pytest.raises(ValueError):
            grid.entries[0, 0] = 2.0


class TestTdoaTable:
    def test_farfield_table_matches_per_candidate(self):
        arr = hexagon()
        grid = build_tdoa_table(arr, build_spherical_grid(step_deg=15.0))
        rng = np.random.default_rng(105)
        for j in rng.integers(0, grid.num_candidates, size=25):
            for p, pair in enumerate(arr.pairs):
                assert grid.tdoa_table[j, p] == pytest.approx(
                    tdoa_farfield(arr, pair, grid.entries[j]), abs=1e-15
                )

    def test_nearfield_table_matches_per_candidate(self):
        rng = np.random.default_rng(106)
        arr = MicArray(rng.normal(size=(5, 3)) * 0.3, speed_of_sound=C)
        pts = rng.uniform(-4, 4, size=(40, 3))
        grid = build_tdoa_table(arr, CandidateGrid(mode="near_field", entries=pts))
        for j in range(40):
            for p, pair in enumerate(arr.pairs):
                assert grid.tdoa_table[j, p] == pytest.approx(
                    tdoa_nearfield(arr, pair, pts[j]), abs=1e-15
                )

    def test_table_within_bounds(self):
        arr = hexagon()
        grid = build_tdoa_table(arr, build_spherical_grid(step_deg=5.0))
        bounds = np.array([p.tdoa_bound for p in arr.pairs])
        assert np.all(np.abs(grid.tdoa_table) <= bounds[None, :] + 1e-12)

    def test_returns_new_grid(self):
        arr = hexagon()
        bare = build_spherical_grid(step_deg=30.0)
        filled = build_tdoa_table(arr, bare)
        assert bare.tdoa_table is None
        assert filled.tdoa_table is not None
        assert filled.tdoa_table.shape == (bare.num_candidates, arr.num_pairs)
