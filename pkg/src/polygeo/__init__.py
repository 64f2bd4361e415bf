"""Closed simple geodesics on polyhedral surfaces."""
from .mesh import (
    AngleReport, EdgeInterior, FaceInterior, Mesh, Vertex, angle_sum,
    builtin, is_disphenoid, load_off,
)

__all__ = [
    "AngleReport", "EdgeInterior", "FaceInterior", "Mesh", "Vertex",
    "angle_sum", "builtin", "is_disphenoid", "load_off",
]
