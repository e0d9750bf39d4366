"""
Closed predicate catalog of the Conditional Declaration Language
"""

CONSTRUCTIONS = ("Shape", "Collinear", "Cocircular")

# predicate -> number of points in each argument
RELATIONS = {
    "ParallelBetweenLine": (2, 2),
    "PerpendicularBetweenLine": (2, 2),
    "IsMidpointOfLine": (1, 2),
    "IsBisectorOfAngle": (2, 3),
    "IsAltitudeOfTriangle": (2, 3),
    "IsMedianOfTriangle": (2, 3),
    "IsoscelesTriangle": (3,),
    "EquilateralTriangle": (3,),
    "RightTriangle": (3,),
    "Parallelogram": (4,),
    "Rectangle": (4,),
    "Square": (4,),
    "IsDiameterOfCircle": (2, 1),
    "IsTangentOfCircle": (2, 1),
    "SimilarBetweenTriangle": (3, 3),
    "CongruentBetweenTriangle": (3, 3),
}

# quantity -> number of points; None means a polygon of three or more
QUANTITIES = {
    "LengthOfLine": 2,
    "MeasureOfAngle": 3,
    "LengthOfArc": 3,
    "RadiusOfCircle": 1,
    "DiameterOfCircle": 1,
    "PerimeterOf": None,
    "AreaOf": None,
}

UNITS = {
    "LengthOfLine": "length",
    "MeasureOfAngle": "degree",
    "LengthOfArc": "length",
    "RadiusOfCircle": "length",
    "DiameterOfCircle": "length",
    "PerimeterOf": "length",
    "AreaOf": "area",
}

MIN_POLYGON = 3


def quantity_arity_ok(quantity, count):
    """True if a quantity takes that many points"""
    arity = QUANTITIES[quantity]
    if arity is None:
        return count >= MIN_POLYGON
    return count == arity


def describe_arity(quantity):
    arity = QUANTITIES[quantity]
    return f"{MIN_POLYGON}+ points" if arity is None else f"{arity} point(s)"
