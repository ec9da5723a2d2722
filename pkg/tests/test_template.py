import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frf.division import HOLE_LABELS, SubcontourSplit, recompute_subcontours
from frf.errors import TemplateError
from frf.template import (ConstraintSet, HoleSpec, LayoutConfig, PRESETS,
                          TemplateSpec, build_template, target_coordinates,
                          _arc_points)


class TestBuildTemplate:
    def test_radius_ratios_exact(self, population_template):
        holes = population_template.holes
        base = holes["LIPV"].radius
        assert holes["LSPV"].radius / base == pytest.approx(1.1, abs=1e-15)
        assert holes["RIPV"].radius / base == pytest.approx(1.1, abs=1e-15)
        assert holes["RSPV"].radius / base == pytest.approx(1.35, abs=1e-15)
        assert holes["LAA"].radius / base == pytest.approx(1.35, abs=1e-15)

    def test_carina_ratio_exact(self, population_template):
        holes = population_template.holes

        def dist(a, b):
            return math.dist(holes[a].center, holes[b].center)

        left = dist("LSPV", "LIPV")
        right = dist("RSPV", "RIPV")
        assert right / left == pytest.approx(1.1, abs=1e-14)

    def test_separation_and_appendage_ratios(self, population_template):
        holes = population_template.holes

        def dist(a, b):
            return math.dist(holes[a].center, holes[b].center)

        left = dist("LSPV", "LIPV")
        assert dist("RSPV", "LSPV") / left == pytest.approx(3.75, abs=1e-12)
        assert dist("RIPV", "LIPV") / left == pytest.approx(3.75, abs=1e-12)
        assert dist("LSPV", "LAA") / left == pytest.approx(1.6, abs=1e-12)

    def test_left_rim_gap_about_half_right(self, population_template):
        holes = population_template.holes
        R = population_template.disk_radius

        def gap(side):
            edges = [np.linalg.norm(holes[h].center) + holes[h].radius
                     for h in side]
            return R - max(edges)

        ratio = gap(("LIPV", "LSPV")) / gap(("RIPV", "RSPV"))
        assert 0.45 <= ratio <= 0.55

    @pytest.mark.parametrize("name", sorted(PRESETS))
    def test_presets_build_and_validate(self, name):
        spec = build_template(name)
        assert spec.name == name
        for hole in spec.holes.values():
            assert hole.ring_orientation == -1

    def test_adapted_presets_widen_center(self):
        pop = build_template("population")
        a1 = build_template("adapted1")

        def width(spec):
            return (spec.holes["RSPV"].center[0] - spec.holes["LSPV"].center[0])

        assert width(a1) > width(pop)

    def test_unknown_preset(self):
        with pytest.raises(TemplateError, match="unknown template preset"):
            build_template("bogus")

    def test_overlapping_circles_rejected(self):
        with pytest.raises(TemplateError, match="collide"):
            build_template(LayoutConfig(lipv_radius=0.12))

    def test_escaping_circle_rejected(self):
        with pytest.raises(TemplateError, match="escapes"):
            build_template(LayoutConfig(cluster_shift=0.5))

    def test_json_round_trip(self, population_template):
        text = population_template.to_json()
        back = TemplateSpec.from_json(text)
        assert back == population_template
        assert back.spec_hash == population_template.spec_hash


def _unit_hole(paths=("a", "b", "c"), orientation=1):
    angles = [0.0, 2 * math.pi / 3, 4 * math.pi / 3]
    if orientation == -1:
        angles = [0.0, -2 * math.pi / 3, -4 * math.pi / 3]
    return HoleSpec(center=(0.0, 0.0), radius=1.0, anchor_angles=tuple(angles),
                    anchor_paths=tuple(paths), ring_orientation=orientation)


class TestRingSpacing:
    @pytest.mark.parametrize("orientation", [1, -1])
    def test_twelve_points_every_thirty_degrees(self, orientation):
        # equal sub-contours with anchors at 0/120/240 degrees put ring targets
        # on a perfect 30 degree lattice
        hole = _unit_hole(orientation=orientation)
        split = SubcontourSplit(hole="RSPV", ring=tuple(range(12)),
                                ip_positions=(0, 4, 8), ip_paths=("a", "b", "c"))
        idx, xy = [], []
        from frf.template import _ccw_span, _circle_point
        n = len(split.ring)
        positions = list(split.ip_positions) + [n]
        angles = list(hole.anchor_angles) + [hole.anchor_angles[0]]
        o = hole.ring_orientation
        for k in range(3):
            p0, p1 = positions[k], positions[k + 1]
            a0 = angles[k]
            span = _ccw_span(a0, angles[k + 1]) if o == 1 else _ccw_span(angles[k + 1], a0)
            for t in range(p0, p1):
                theta = a0 + o * span * (t - p0) / (p1 - p0)
                xy.append(_circle_point(hole.center, hole.radius, theta))
        xy = np.asarray(xy)
        got = np.degrees(np.arctan2(xy[:, 1], xy[:, 0])) % 360
        expected = (orientation * 30.0 * np.arange(12)) % 360
        assert np.allclose(got, expected, atol=1e-9)


class TestTargetCoordinates:
    def test_boundary_targets_on_circles(self, population_template, projection):
        splits = {h: recompute_subcontours(projection.splits[h]) for h in HOLE_LABELS}
        cs = target_coordinates(population_template, projection, splits)
        pos = {int(v): xy for v, xy in zip(cs.boundary_idx, cs.boundary_xy)}
        for label in HOLE_LABELS:
            hole = population_template.holes[label]
            for vtx in splits[label].ring:
                d = math.dist(pos[vtx], hole.center)
                assert abs(d - hole.radius) <= 1e-12
        for vtx in projection.mv_ring:
            assert abs(math.dist(pos[vtx], (0, 0)) - 1.0) <= 1e-12

    def test_counts(self, population_template, projection):
        splits = {h: recompute_subcontours(projection.splits[h]) for h in HOLE_LABELS}
        cs = target_coordinates(population_template, projection, splits)
        rings = sum(len(s.ring) for s in splits.values()) + len(projection.mv_ring)
        assert len(cs.boundary_idx) == rings
        interiors = sum(max(len(c) - 2, 0) for c in projection.paths.values())
        assert len(cs.regional_idx) == interiors

    def test_orientation_consistency(self, population_template, projection):
        # consecutive ring targets wind in the hole's declared orientation
        splits = {h: recompute_subcontours(projection.splits[h]) for h in HOLE_LABELS}
        cs = target_coordinates(population_template, projection, splits)
        pos = {int(v): xy for v, xy in zip(cs.boundary_idx, cs.boundary_xy)}
        for label in HOLE_LABELS:
            hole = population_template.holes[label]
            ring = splits[label].ring
            thetas = np.array([
                math.atan2(pos[v][1] - hole.center[1], pos[v][0] - hole.center[0])
                for v in ring
            ])
            steps = (hole.ring_orientation * np.diff(thetas)) % (2 * math.pi)
            assert (steps > 0).all()
            assert steps.sum() < 2 * math.pi

    def test_scaling_by_powers_of_two_is_exact(self, population_template,
                                               projection):
        splits = {h: recompute_subcontours(projection.splits[h]) for h in HOLE_LABELS}
        base = target_coordinates(population_template, projection, splits)
        for k in (0.5, 2.0, 4.0):
            scaled = target_coordinates(population_template.scaled(k),
                                        projection, splits)
            assert np.array_equal(scaled.boundary_xy, base.boundary_xy * k)
            assert np.array_equal(scaled.regional_xy, base.regional_xy * k)

    def test_orientation_mismatch_rejected(self, population_template, projection):
        splits = {h: recompute_subcontours(projection.splits[h]) for h in HOLE_LABELS}
        bad = dict(splits)
        s = splits["LIPV"]
        bad["LIPV"] = SubcontourSplit(hole="LIPV", ring=s.ring,
                                      ip_positions=s.ip_positions,
                                      ip_paths=(s.ip_paths[0], s.ip_paths[2],
                                                s.ip_paths[1]))
        with pytest.raises(TemplateError, match="ring orientation mismatch"):
            target_coordinates(population_template, projection, bad)

    def test_straight_path_midpoint(self):
        t = np.array([0.5])
        a = np.array([0.0, 0.0])
        b = np.array([0.0, 1.0])
        mid = a[None, :] + t[:, None] * (b - a)[None, :]
        assert np.allclose(mid[0], [0.0, 0.5])

    def test_arc_bulges_away_from_center(self, population_template):
        a = np.array([0.3, -0.5])
        b = np.array([0.7, -0.1])
        pts = _arc_points(a, b, np.array([0.5]), population_template)
        mid = 0.5 * (a + b)
        assert np.linalg.norm(pts[0]) > np.linalg.norm(mid)
        assert np.linalg.norm(pts[0] - a) < np.linalg.norm(b - a)

    def test_duplicate_constraint_rejected(self):
        with pytest.raises(TemplateError, match="duplicate"):
            ConstraintSet(boundary_idx=np.array([1, 1]),
                          boundary_xy=np.zeros((2, 2)),
                          regional_idx=np.array([], dtype=int),
                          regional_xy=np.zeros((0, 2)))


class TestConstraintProperties:
    @given(st.floats(min_value=0.05, max_value=0.12))
    @settings(max_examples=20, deadline=None)
    def test_radius_scaling_preserves_ratios(self, r):
        spec = build_template(LayoutConfig(lipv_radius=r * 0.5))
        base = spec.holes["LIPV"].radius
        assert spec.holes["RSPV"].radius / base == pytest.approx(1.35, rel=1e-14)
