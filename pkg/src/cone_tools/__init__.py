"""Cone Tools - 3D traffic-cone positions from a single camera view."""

__version__ = "0.1.0"
