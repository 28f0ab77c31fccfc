"""Chart, geometry, and crossing-engine tests on synthetic maps.

The folded piecewise-linear maps below play the role of Poincare maps
with known crossing structure, so every verdict has an exact expected
value.
"""
import math

import numpy as np
import pytest

from horseshoe import blocks as blk
from horseshoe import crossing as cr
from horseshoe.errors import InvalidBlocks, OutOfRange
from horseshoe.poincare import MapResult

UNIT_SQUARE = blk.Block(id=1, corners=((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)))
UPPER_SQUARE = blk.Block(id=2, corners=((0.0, 2.0), (1.0, 2.0), (1.0, 3.0), (0.0, 3.0)))
CONVEX_QUAD = blk.Block(
    id=3, corners=((0.0, 0.0), (2.0, 0.3), (2.5, 1.8), (-0.4, 1.2))
)

CFG = cr.SamplingConfig(connections=11, points_per_connection=200, grid=16)

# Piecewise-linear image paths: gamma(x) sweeps across a block interior,
# leaves, and (for the two-band paths) sweeps the other block.
XS_BOTH = np.array([0.0, 0.05, 0.45, 0.5, 0.55, 0.95, 1.0])
PX_BOTH = np.array([-0.5, -0.2, 1.2, 1.5, 1.2, -0.2, -0.5])
PY_LOW_FIRST = np.array([0.3, 0.4, 0.4, 1.5, 2.6, 2.6, 2.8])
PY_HIGH_FIRST = np.array([2.4, 2.4, 2.4, 1.5, 0.5, 0.5, 0.3])

XS_ONE = np.array([0.0, 0.05, 0.45, 0.6, 1.0])
PX_ONE = np.array([-0.5, -0.2, 1.2, 1.6, 1.8])
PY_ONE = np.array([0.55, 0.6, 0.6, 0.8, 1.2])


def _path_map(pts, lower_path, upper_path):
    pts = np.atleast_2d(pts)
    x = pts[:, 0]
    y = pts[:, 1]
    upper = y > 1.5
    yr = np.where(upper, y - 2.0, y)
    xs, px, py = lower_path
    out_x = np.interp(x, xs, px)
    out_y = np.interp(x, xs, py)
    xs, px, py = upper_path
    out_x = np.where(upper, np.interp(x, xs, px), out_x)
    out_y = np.where(upper, np.interp(x, xs, py), out_y)
    return np.column_stack((out_x, out_y + 0.1 * yr))


def full_horseshoe_map(pts):
    """Both blocks sweep across both blocks: crossing matrix [[1,1],[1,1]]."""
    return _path_map(
        pts,
        (XS_BOTH, PX_BOTH, PY_LOW_FIRST),
        (XS_BOTH, PX_BOTH, PY_HIGH_FIRST),
    )


def semi_horseshoe_map(pts):
    """Upper block only sweeps the lower one: crossing matrix [[1,1],[1,0]]."""
    return _path_map(
        pts,
        (XS_BOTH, PX_BOTH, PY_LOW_FIRST),
        (XS_ONE, PX_ONE, PY_ONE),
    )


class TestBlockValidation:
    def test_clockwise_rejected(self):
        with pytest.raises(InvalidBlocks):
            blk.Block(id=1, corners=((0, 0), (0, 1), (1, 1), (1, 0)))

    def test_collinear_rejected(self):
        with pytest.raises(InvalidBlocks):
            blk.Block(id=1, corners=((0, 0), (1, 0), (2, 0), (0, 1)))

    def test_nonconvex_rejected(self):
        with pytest.raises(InvalidBlocks):
            blk.Block(id=1, corners=((0, 0), (2, 0), (0.2, 0.2), (0, 2)))

    def test_json_round_trip(self):
        again = blk.Block.from_json(CONVEX_QUAD.to_json_dict())
        assert again == CONVEX_QUAD


class TestChart:
    def test_identity_chart_center(self):
        p = blk.chart_point(UNIT_SQUARE, 0.5, 0.5)
        np.testing.assert_allclose(p, [0.5, 0.5])

    def test_corners(self):
        for b in (UNIT_SQUARE, CONVEX_QUAD):
            np.testing.assert_array_equal(blk.chart_point(b, 0.0, 0.0), b.pts[0])
            np.testing.assert_array_equal(blk.chart_point(b, 1.0, 0.0), b.pts[1])
            np.testing.assert_array_equal(blk.chart_point(b, 1.0, 1.0), b.pts[2])
            np.testing.assert_array_equal(blk.chart_point(b, 0.0, 1.0), b.pts[3])

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            blk.chart_point(UNIT_SQUARE, 1.2, 0.5)
        with pytest.raises(OutOfRange):
            blk.chart_point(UNIT_SQUARE, 0.5, -0.01)

    def test_round_trip_random(self):
        rng = np.random.default_rng(17)
        uv = rng.uniform(0, 1, size=(100, 2))
        pts = blk.chart_point(CONVEX_QUAD, uv[:, 0], uv[:, 1])
        for (u, v), p in zip(uv, pts):
            res = blk.locate(CONVEX_QUAD, p)
            assert res is not None
            assert abs(res[0] - u) <= 1e-10
            assert abs(res[1] - v) <= 1e-10

    def test_locate_centroid_interior(self):
        centroid = CONVEX_QUAD.pts.mean(axis=0)
        res = blk.locate(CONVEX_QUAD, centroid)
        assert res is not None
        assert 0.0 < res[0] < 1.0 and 0.0 < res[1] < 1.0

    def test_locate_outside(self):
        far = CONVEX_QUAD.pts[0] + np.array([-1.0, -1.0])
        assert blk.locate(CONVEX_QUAD, far) is None

    def test_locate_designated_edge(self):
        p = blk.chart_point(CONVEX_QUAD, 0.0, 0.37)
        res = blk.locate(CONVEX_QUAD, p)
        assert res is not None
        assert res[0] <= 1e-9


class TestGeometry:
    def test_polygon_distance_inside_zero(self):
        d = blk.polygon_distance(UNIT_SQUARE, [[0.5, 0.5], [0.0, 0.0]])
        assert d[0] == 0.0 and d[1] == 0.0

    def test_polygon_distance_outside(self):
        d = blk.polygon_distance(UNIT_SQUARE, [[2.0, 0.5], [0.5, -0.25]])
        np.testing.assert_allclose(d, [1.0, 0.25])

    def test_block_pair_distance(self):
        assert blk.block_pair_distance(UNIT_SQUARE, UPPER_SQUARE) == pytest.approx(1.0)
        shifted = blk.Block(
            id=9, corners=((0.5, 0.5), (1.5, 0.5), (1.5, 1.5), (0.5, 1.5))
        )
        assert blk.block_pair_distance(UNIT_SQUARE, shifted) == 0.0

    def test_validate_disjoint(self):
        blk.validate_disjoint([UNIT_SQUARE, UPPER_SQUARE])
        overlapping = blk.Block(
            id=5, corners=((0.5, 0.5), (1.5, 0.5), (1.5, 1.5), (0.5, 1.5))
        )
        with pytest.raises(InvalidBlocks):
            blk.validate_disjoint([UNIT_SQUARE, overlapping])
        with pytest.raises(InvalidBlocks):
            blk.validate_disjoint([UNIT_SQUARE, UNIT_SQUARE])


class TestSamplingConfig:
    def test_defaults(self):
        cfg = cr.SamplingConfig()
        assert (cfg.connections, cfg.points_per_connection, cfg.grid) == (41, 400, 60)
        assert cfg.margin == 1e-3 and cfg.chart_tolerance == 0.02

    def test_validation(self):
        with pytest.raises(ValueError):
            cr.SamplingConfig(connections=1)
        with pytest.raises(ValueError):
            cr.SamplingConfig(margin=0.0)
        with pytest.raises(ValueError):
            cr.SamplingConfig(chart_tolerance=0.5)

    def test_doubled(self):
        d = CFG.doubled()
        assert d.connections == 2 * CFG.connections
        assert d.points_per_connection == 2 * CFG.points_per_connection
        assert d.grid == 2 * CFG.grid
        assert d.margin == CFG.margin


class TestVerifyCrossing:
    def test_identity_self_crossing(self):
        v = cr.verify_crossing(lambda p: p, UNIT_SQUARE, UNIT_SQUARE, CFG)
        assert v.status == cr.CROSSES
        assert v.min_clearance >= CFG.margin
        assert all(rec["passed"] for rec in v.connections)

    def test_distant_translation_not_crossing(self):
        v = cr.verify_crossing(
            lambda p: p + np.array([10.0, 0.0]), UNIT_SQUARE, UNIT_SQUARE, CFG
        )
        assert v.status == cr.UNDETERMINED
        assert v.reason == "image_misses_block"

    def test_integration_errors_never_cross(self):
        def flaky(pts):
            status = np.zeros(len(pts), dtype=np.int64)
            status[len(pts) // 2] = 1
            return MapResult(images=np.array(pts, dtype=float), status=status)

        v = cr.verify_crossing(flaky, UNIT_SQUARE, UNIT_SQUARE, CFG)
        assert v.status == cr.UNDETERMINED
        assert v.reason == "integration_error"

    def test_partial_span_fails(self):
        # Contraction into the middle: runs never reach the u ends.
        v = cr.verify_crossing(
            lambda p: 0.5 + 0.2 * (p - 0.5), UNIT_SQUARE, UNIT_SQUARE, CFG
        )
        assert v.status == cr.UNDETERMINED
        assert v.reason == "run_does_not_span_block"

    def test_side_hugging_fails_clearance(self):
        # Squash everything onto the v=0 side edge.
        def squash(pts):
            pts = np.atleast_2d(pts)
            return np.column_stack((pts[:, 0], 1e-5 * pts[:, 1]))

        v = cr.verify_crossing(squash, UNIT_SQUARE, UNIT_SQUARE, CFG)
        assert v.status == cr.UNDETERMINED
        assert v.reason == "insufficient_side_clearance"


class TestVerifyDisjoint:
    def test_translation_disjoint(self):
        v = cr.verify_disjoint(
            lambda p: p + np.array([10.0, 0.0]), UNIT_SQUARE, UNIT_SQUARE, CFG
        )
        assert v.status == cr.DISJOINT
        assert v.min_distance == pytest.approx(9.0, rel=1e-12)

    def test_identity_not_disjoint(self):
        v = cr.verify_disjoint(lambda p: p, UNIT_SQUARE, UNIT_SQUARE, CFG)
        assert v.status == cr.UNDETERMINED
        assert v.min_distance == 0.0

    def test_never_both_positive(self):
        for mapper in (lambda p: p, lambda p: p + np.array([10.0, 0.0])):
            c = cr.verify_crossing(mapper, UNIT_SQUARE, UNIT_SQUARE, CFG)
            d = cr.verify_disjoint(mapper, UNIT_SQUARE, UNIT_SQUARE, CFG)
            assert not (c.status == cr.CROSSES and d.status == cr.DISJOINT)

    def test_errors_undetermined(self):
        def broken(pts):
            n = len(np.atleast_2d(pts))
            return MapResult(
                images=np.full((n, 2), np.nan), status=np.ones(n, dtype=np.int64)
            )

        v = cr.verify_disjoint(broken, UNIT_SQUARE, UPPER_SQUARE, CFG)
        assert v.status == cr.UNDETERMINED
        assert v.reason == "integration_error"


class TestStripSeparation:
    def test_affine_stretch_passes(self):
        stretch = lambda p: np.column_stack(
            (3.0 * np.atleast_2d(p)[:, 0] - 1.0, np.atleast_2d(p)[:, 1] / 3.0 + 1.0 / 3.0)
        )
        assert cr.strip_separation_check(stretch, UNIT_SQUARE, UNIT_SQUARE, 2.0, CFG)

    def test_identity_fails(self):
        assert not cr.strip_separation_check(
            lambda p: p, UNIT_SQUARE, UNIT_SQUARE, 2.0, CFG
        )

    def test_strip_implies_not_disjoint(self):
        stretch = lambda p: np.column_stack(
            (3.0 * np.atleast_2d(p)[:, 0] - 1.0, np.atleast_2d(p)[:, 1] / 3.0 + 1.0 / 3.0)
        )
        assert (
            cr.verify_disjoint(stretch, UNIT_SQUARE, UNIT_SQUARE, CFG).status
            != cr.DISJOINT
        )

    def test_rejects_small_kappa(self):
        with pytest.raises(ValueError):
            cr.strip_separation_check(lambda p: p, UNIT_SQUARE, UNIT_SQUARE, 0.5, CFG)


class TestAssembleReport:
    def test_full_horseshoe(self):
        rep = cr.assemble_report(full_horseshoe_map, [UNIT_SQUARE, UPPER_SQUARE], CFG)
        assert rep.crossing_matrix.to_lists() == [[1, 1], [1, 1]]
        assert rep.semi is False
        assert rep.subshift.chaotic is True
        assert rep.subshift.entropy_lower_bound == pytest.approx(math.log(2.0))

    def test_semi_horseshoe(self):
        rep = cr.assemble_report(semi_horseshoe_map, [UNIT_SQUARE, UPPER_SQUARE], CFG)
        assert rep.crossing_matrix.to_lists() == [[1, 1], [1, 0]]
        assert rep.verdicts[1][1].status == cr.DISJOINT
        assert rep.semi is True
        golden = (1.0 + math.sqrt(5.0)) / 2.0
        assert rep.subshift.entropy_lower_bound == pytest.approx(
            math.log(golden), abs=1e-9
        )

    def test_relabelling_conjugates_matrix(self):
        rep = cr.assemble_report(semi_horseshoe_map, [UNIT_SQUARE, UPPER_SQUARE], CFG)
        swapped = cr.assemble_report(
            semi_horseshoe_map, [UPPER_SQUARE, UNIT_SQUARE], CFG
        )
        a = np.array(rep.crossing_matrix.to_lists())
        b = np.array(swapped.crossing_matrix.to_lists())
        perm = [1, 0]
        assert np.array_equal(b, a[np.ix_(perm, perm)])

    def test_verdict_invariants(self):
        rep = cr.assemble_report(semi_horseshoe_map, [UNIT_SQUARE, UPPER_SQUARE], CFG)
        arr = rep.crossing_matrix.to_numpy()
        for i, row in enumerate(rep.verdicts):
            for j, v in enumerate(row):
                assert (arr[i, j] == 1) == (v.status == cr.CROSSES)
        if rep.semi:
            assert any(
                v.status == cr.DISJOINT for row in rep.verdicts for v in row
            )
            assert np.all(arr.sum(axis=1) >= 1)

    def test_strip_evidence_recorded(self):
        rep = cr.assemble_report(
            full_horseshoe_map, [UNIT_SQUARE, UPPER_SQUARE], CFG, strip_kappa=3.0
        )
        for row in rep.verdicts:
            for v in row:
                if v.status == cr.CROSSES:
                    assert v.strip_separated in (True, False)

    def test_requires_two_disjoint_blocks(self):
        with pytest.raises(InvalidBlocks):
            cr.assemble_report(lambda p: p, [UNIT_SQUARE], CFG)
        overlapping = blk.Block(
            id=7, corners=((0.5, 0.5), (1.5, 0.5), (1.5, 1.5), (0.5, 1.5))
        )
        with pytest.raises(InvalidBlocks):
            cr.assemble_report(lambda p: p, [UNIT_SQUARE, overlapping], CFG)

    def test_report_json_shape(self):
        rep = cr.assemble_report(semi_horseshoe_map, [UNIT_SQUARE, UPPER_SQUARE], CFG)
        d = rep.to_json_dict()
        assert d["crossing_matrix"] == [[1, 1], [1, 0]]
        assert d["semi"] is True
        assert set(d["subshift"]) == {
            "irreducible",
            "minimal",
            "chaotic",
            "spectral_radius",
            "entropy_lower_bound",
        }
        assert d["verdicts"][1][1]["status"] == "disjoint"

    def test_stability_under_doubling(self):
        for mapper in (full_horseshoe_map, semi_horseshoe_map):
            a = cr.assemble_report(mapper, [UNIT_SQUARE, UPPER_SQUARE], CFG)
            b = cr.assemble_report(mapper, [UNIT_SQUARE, UPPER_SQUARE], CFG.doubled())
            assert a.crossing_matrix == b.crossing_matrix
