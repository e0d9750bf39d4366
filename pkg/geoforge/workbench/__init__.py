"""
Interactive workbench; Kivy is only imported by geoforge.workbench.app
"""

from .view import Viewport, fit_viewport, metrics_touching, nearest_point, point_details, screen_points

__all__ = ["Viewport", "fit_viewport", "metrics_touching", "nearest_point", "point_details", "screen_points"]
