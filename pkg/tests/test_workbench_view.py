from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from geoforge.engine import QuantitySymbol
from geoforge.workbench import Viewport, fit_viewport, metrics_touching, nearest_point, point_details, screen_points

DETERMINED = {
    QuantitySymbol("MeasureOfAngle", ("A", "B", "C")): Fraction(40),
    QuantitySymbol("LengthOfLine", ("B", "C")): Fraction(7, 2),
    QuantitySymbol("LengthOfLine", ("A", "B")): Fraction(5),
}


def test_viewport_fills_the_box_keeping_the_aspect():
    viewport = fit_viewport((0, 0), (424, 324))
    assert viewport.unit == pytest.approx(100.0)
    assert viewport.origin == pytest.approx((12.0, 12.0))
    assert viewport.to_screen(4.0, 3.0) == pytest.approx((412.0, 312.0))


def test_wide_boxes_are_centered():
    viewport = fit_viewport((10, 20), (1024, 324))
    assert viewport.unit == pytest.approx(100.0)
    assert viewport.origin == pytest.approx((10 + (1024 - 400) / 2, 32.0))


@given(st.floats(min_value=0, max_value=4), st.floats(min_value=0, max_value=3))
def test_screen_and_canvas_round_trip(x, y):
    viewport = Viewport((37.0, -5.0), 83.5)
    assert viewport.to_canvas(*viewport.to_screen(x, y)) == pytest.approx((x, y), abs=1e-9)


def test_screen_points_maps_every_point():
    viewport = Viewport((0.0, 0.0), 10.0)
    assert screen_points({"A": (1.0, 2.0), "B": (0.5, 0.0)}, viewport) == {"A": (10.0, 20.0), "B": (5.0, 0.0)}


def test_nearest_point_within_radius():
    points = {"A": (0.0, 0.0), "B": (30.0, 0.0)}
    assert nearest_point(points, (4.0, 3.0)) == "A"
    assert nearest_point(points, (26.0, 0.0)) == "B"
    assert nearest_point(points, (15.0, 40.0)) is None
    assert nearest_point(points, (15.0, 0.0), radius=20.0) == "A"


def test_nearest_point_on_empty_canvas():
    assert nearest_point({}, (0.0, 0.0)) is None


def test_metrics_touching_a_point():
    assert metrics_touching("A", DETERMINED) == ["LengthOfLine(AB) = 5", "MeasureOfAngle(ABC) = 40"]
    assert metrics_touching("C", DETERMINED) == ["LengthOfLine(BC) = 3.5", "MeasureOfAngle(ABC) = 40"]
    assert metrics_touching("D", DETERMINED) == []


def test_point_details():
    coordinates = {"A": (0.8, 0.6), "D": (2.0, 1.25)}
    lines = point_details("A", coordinates, DETERMINED).splitlines()
    assert lines[0] == "Point A at (0.800, 0.600)"
    assert lines[1:] == ["LengthOfLine(AB) = 5", "MeasureOfAngle(ABC) = 40"]
    assert point_details("D", coordinates, DETERMINED).splitlines()[1] == "No determined metric mentions this point"
