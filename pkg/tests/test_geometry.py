import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from twinwatch.errors import DomainError
from twinwatch.geometry import (
    Point2D,
    Rect,
    angle_between,
    angular_offset_deg,
    azimuth_of,
    point_on_segment,
    point_segment_distance,
    unit_vector,
)


class TestPoints:
    def test_distance(self):
        assert Point2D(0, 0).distance_to(Point2D(3, 4)) == 5.0

    def test_non_finite_rejected(self):
        with pytest.raises(DomainError):
            Point2D(float("nan"), 0)
        with pytest.raises(DomainError):
            Point2D(0, float("inf"))

    def test_rect_contains(self):
        r = Rect(0, 0, 10, 5)
        assert r.contains(Point2D(5, 2.5))
        assert r.contains(Point2D(0, 0))
        assert not r.contains(Point2D(11, 2))


class TestAngles:
    def test_unit_vector_cardinals(self):
        assert unit_vector(0) == pytest.approx((1, 0))
        x, y = unit_vector(90)
        assert (x, y) == pytest.approx((0, 1), abs=1e-12)

    def test_azimuth_wraps_to_positive(self):
        assert azimuth_of(0, -1) == pytest.approx(270.0)
        assert azimuth_of(1, 0) == pytest.approx(0.0)

    def test_angle_between_antiparallel(self):
        assert angle_between(1, 0, -1, 0) == pytest.approx(180.0)

    def test_angle_between_zero_vector_rejected(self):
        with pytest.raises(DomainError):
            angle_between(0, 0, 1, 0)

    @given(a=st.floats(0, 720), b=st.floats(0, 720))
    def test_angular_offset_bounds_and_symmetry(self, a, b):
        off = angular_offset_deg(a, b)
        assert 0.0 <= off <= 180.0
        assert off == pytest.approx(angular_offset_deg(b, a), abs=1e-9)

    @given(az=st.floats(0, 360))
    def test_unit_vector_roundtrips_azimuth(self, az):
        x, y = unit_vector(az)
        assert angular_offset_deg(azimuth_of(x, y), az) < 1e-6


class TestSegments:
    SEG = (Point2D(0, 0), Point2D(10, 0))

    def test_projection_inside(self):
        assert point_segment_distance(Point2D(5, 3), *self.SEG) == pytest.approx(3)

    def test_clamps_to_endpoints(self):
        assert point_segment_distance(Point2D(-4, 3), *self.SEG) == pytest.approx(5)
        assert point_segment_distance(Point2D(14, 3), *self.SEG) == pytest.approx(5)

    def test_degenerate_segment(self):
        p = Point2D(2, 2)
        assert point_segment_distance(p, Point2D(0, 0), Point2D(0, 0)) == \
            pytest.approx(math.sqrt(8))

    def test_point_on_segment_parameter(self):
        assert point_on_segment(*self.SEG, 0.25) == Point2D(2.5, 0)
        assert point_on_segment(*self.SEG, 1.0) == Point2D(10, 0)
