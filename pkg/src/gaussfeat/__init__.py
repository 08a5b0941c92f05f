"""gaussfeat: machining-feature recognition for triangle meshes.

Feature submeshes are extracted from a part, pose-normalized, encoded
as area histograms over a sampled Gauss map, and classified with a
random forest trained on procedurally generated examples.
"""

from .mesh import (
    TriangleMesh,
    build_edge_adjacency,
    bounding_ball_radius,
    classify_edge_concavity,
    connected_components,
    convex_hull,
    facet_normal_area,
    vertex_angle_deficit,
)
from .meshio import load_mesh, write_obj, write_stl

__version__ = "0.1.0"

__all__ = [
    "TriangleMesh",
    "build_edge_adjacency",
    "bounding_ball_radius",
    "classify_edge_concavity",
    "connected_components",
    "convex_hull",
    "facet_normal_area",
    "load_mesh",
    "vertex_angle_deficit",
    "write_obj",
    "write_stl",
    "__version__",
]
