"""Domain types, geometry validation and similarity scores."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from trackscore.model import (
    Box2D,
    Detection,
    FormatError,
    InvalidGeometryError,
    Point2D,
    SequencePair,
    build_similarity,
    iou_box,
    similarity,
    similarity_point,
)

from conftest import det, make_seq


class TestGeometryValidation:
    def test_valid_box(self):
        b = Box2D(0.0, 0.0, 10.0, 5.0)
        assert b.area == 50.0

    @pytest.mark.parametrize("w,h", [(0.0, 10.0), (10.0, 0.0), (-1.0, 10.0)])
    def test_degenerate_box_rejected(self, w, h):
        with pytest.raises(InvalidGeometryError):
            Box2D(0.0, 0.0, w, h)

    @pytest.mark.parametrize("bad", [float("nan"), float("inf"), -float("inf")])
    def test_nonfinite_box_rejected(self, bad):
        with pytest.raises(InvalidGeometryError):
            Box2D(bad, 0.0, 10.0, 10.0)

    def test_nonfinite_point_rejected(self):
        with pytest.raises(InvalidGeometryError):
            Point2D(float("nan"), 0.0)

    def test_detection_frame_and_id_bounds(self):
        with pytest.raises(FormatError):
            Detection(frame=0, id=1, geometry=Box2D(0, 0, 1, 1))
        with pytest.raises(FormatError):
            Detection(frame=1, id=-1, geometry=Box2D(0, 0, 1, 1))


class TestIou:
    def test_identical_boxes(self):
        b = Box2D(3.0, 4.0, 10.0, 10.0)
        assert iou_box(b, b) == 1.0

    def test_disjoint_boxes(self):
        assert iou_box(Box2D(0, 0, 10, 10), Box2D(100, 0, 10, 10)) == 0.0

    def test_touching_boxes_have_zero_overlap(self):
        # Shared edge only: zero-area intersection.
        assert iou_box(Box2D(0, 0, 10, 10), Box2D(10, 0, 10, 10)) == 0.0

    def test_half_overlap(self):
        # 10x10 boxes offset by 5 in x: inter 50, union 150.
        got = iou_box(Box2D(0, 0, 10, 10), Box2D(5, 0, 10, 10))
        assert got == pytest.approx(1 / 3, abs=1e-15)

    def test_contained_box(self):
        got = iou_box(Box2D(0, 0, 10, 10), Box2D(2, 2, 5, 5))
        assert got == pytest.approx(25 / 100, abs=1e-15)

    @given(
        st.floats(-50, 50), st.floats(-50, 50),
        st.floats(0.5, 30), st.floats(0.5, 30),
        st.floats(-50, 50), st.floats(-50, 50),
        st.floats(0.5, 30), st.floats(0.5, 30),
    )
    def test_iou_bounds_and_symmetry(self, l1, t1, w1, h1, l2, t2, w2, h2):
        a = Box2D(l1, t1, w1, h1)
        b = Box2D(l2, t2, w2, h2)
        s = iou_box(a, b)
        assert 0.0 <= s <= 1.0 + 1e-12
        assert s == pytest.approx(iou_box(b, a), abs=1e-12)


class TestPointSimilarity:
    def test_coincident_points(self):
        assert similarity_point(Point2D(1.0, 2.0), Point2D(1.0, 2.0)) == 1.0

    def test_half_meter_apart(self):
        assert similarity_point(Point2D(0, 0), Point2D(0.5, 0)) == pytest.approx(0.5)

    def test_beyond_one_meter_clamps_to_zero(self):
        assert similarity_point(Point2D(0, 0), Point2D(3.0, 4.0)) == 0.0

    def test_mixed_variants_rejected(self):
        with pytest.raises(FormatError):
            similarity(Box2D(0, 0, 1, 1), Point2D(0, 0))


class TestSequencePair:
    def test_duplicate_id_in_frame_rejected(self):
        with pytest.raises(FormatError):
            make_seq(2, [det(1, 1), det(1, 1, slot=1)], [])

    def test_same_id_both_sides_is_fine(self):
        seq = make_seq(1, [det(1, 1)], [det(1, 1)])
        assert len(seq.gt) == 1 and len(seq.pr) == 1

    def test_frame_beyond_num_frames_rejected(self):
        with pytest.raises(FormatError):
            make_seq(2, [det(3, 1)], [])

    def test_by_frame_buckets_sorted_by_id(self):
        seq = make_seq(2, [det(2, 5), det(2, 1), det(1, 3)], [])
        frames = seq.gt_by_frame()
        assert [d.id for d in frames[0]] == [3]
        assert [d.id for d in frames[1]] == [1, 5]


class TestBuildSimilarity:
    def test_shapes_follow_frame_population(self):
        seq = make_seq(3, [det(1, 1), det(1, 2, slot=1), det(3, 1)], [det(1, 1)])
        sim = build_similarity(seq)
        assert sim[0].shape == (2, 1)
        assert sim[1].shape == (0, 0)
        assert sim[2].shape == (1, 0)

    def test_values_are_iou(self):
        seq = make_seq(1, [det(1, 1)], [det(1, 1), det(1, 2, slot=1)])
        sim = build_similarity(seq)
        assert np.allclose(sim[0], [[1.0, 0.0]])

    def test_mixed_geometry_rejected(self):
        gt = (Detection(1, 1, Box2D(0, 0, 1, 1)),)
        pr = (Detection(1, 1, Point2D(0, 0)),)
        seq = SequencePair("bad", 1, gt, pr)
        with pytest.raises(FormatError):
            build_similarity(seq)
