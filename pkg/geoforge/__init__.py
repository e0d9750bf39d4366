"""
GeoForge - geometry problem synthesis from formalized seed problems
"""

__version__ = "1.0.0"

__all__ = ['cdl', 'engine', 'synth', 'layout', 'render', 'verbalize', 'pipeline', 'config', 'cli', 'workbench']
