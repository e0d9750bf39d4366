import io
from itertools import combinations

import pytest
from PIL import Image

from conftest import problem
from geoforge.layout import LayoutSolution
from geoforge.render import (
    SIZES,
    annotation_text,
    canvas_size,
    diagram_spec,
    drawn_values,
    find_label,
    length_text,
    place_labels,
    render_diagram,
)
from geoforge.cdl import MetricFact

TRIANGLE = problem(
    "Shape(AB,BC,CA)\n"
    "Equal(LengthOfLine(AB),5)\n"
    "image:Equal(LengthOfLine(BC),6)\n"
    "image:Equal(MeasureOfAngle(ABC),40)\n"
    "Value(LengthOfLine(AC))"
)

LAYOUT = LayoutSolution(
    coordinates={"A": (0.8, 0.6), "B": (3.2, 0.6), "C": (2.0, 2.4)},
    radii={},
    scale=1.0,
    report=(),
    total_loss=0.0,
    restarts_used=1,
)


@pytest.fixture(scope="module")
def diagram():
    return render_diagram(diagram_spec(TRIANGLE, LAYOUT, 224))


def test_canvas_sizes():
    assert [canvas_size(s) for s in SIZES] == [(149, 112), (299, 224), (448, 336)]
    with pytest.raises(ValueError):
        canvas_size(200)


def test_length_text_keeps_four_significant_digits():
    assert length_text(6) == "6"
    assert length_text(2.5) == "2.5"
    assert length_text(3.14159) == "3.142"
    assert length_text(12345.6) == "12346"


def test_annotation_texts():
    assert annotation_text(MetricFact("MeasureOfAngle", ("A", "B", "C"), 40)) == "40°"
    assert annotation_text(MetricFact("RadiusOfCircle", ("O",), 3)) == "r(O) = 3"
    assert annotation_text(MetricFact("AreaOf", ("A", "B", "C"), 6)) == "S(ABC) = 6"


def test_only_image_facts_are_drawn(diagram):
    assert drawn_values(diagram) == {"6": "segment", "40°": "angle"}
    assert find_label(diagram.labels, "5") is None


def test_every_point_is_labeled(diagram):
    for p in "ABC":
        label = find_label(diagram.labels, p)
        assert label is not None
        assert label.kind == "point"


def test_labels_do_not_overlap_and_stay_inside(diagram):
    boxes = [label.box for label in diagram.labels.labels]
    for a, b in combinations(boxes, 2):
        assert not (a[0] < b[2] and b[0] < a[2] and a[1] < b[3] and b[1] < a[3])
    for left, top, right, bottom in boxes:
        assert left >= 0 and top >= 0
        assert right <= diagram.width and bottom <= diagram.height


def test_png_matches_the_canvas(diagram):
    image = Image.open(io.BytesIO(diagram.png))
    assert image.size == (diagram.width, diagram.height) == (299, 224)


def test_svg_carries_the_annotations(diagram):
    assert diagram.svg.startswith("<svg")
    assert ">6<" in diagram.svg
    assert ">40°<" in diagram.svg
    assert ">5<" not in diagram.svg


def test_rendering_is_byte_deterministic(diagram):
    again = render_diagram(diagram_spec(TRIANGLE, LAYOUT, 224))
    assert again.png == diagram.png
    assert again.svg == diagram.svg


@pytest.mark.parametrize("size", SIZES)
def test_every_size_renders(size):
    rendered = render_diagram(diagram_spec(TRIANGLE, LAYOUT, size))
    assert (rendered.width, rendered.height) == canvas_size(size)


def test_goal_segment_is_drawn_even_when_not_joined():
    p = problem("Shape(AB,BC,CA)\nCollinear(BDC)\nEqual(LengthOfLine(AB),5)\nValue(LengthOfLine(AD))")
    layout = LayoutSolution(
        {"A": (0.8, 0.6), "B": (3.2, 0.6), "C": (2.0, 2.4), "D": (2.6, 1.5)}, {}, 1.0, (), 0.0, 1
    )
    spec = diagram_spec(p, layout, 224)
    assert ("A", "D") in spec.segments
    assert place_labels(spec).overflow == ()
