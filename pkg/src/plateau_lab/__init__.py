"""Research toolkit for discrete Plateau problems: triangle-mesh geometry in
Euclidean space and flat 3-tori, an area-descent solver, closed-form area
bookkeeping for the worked boundary-curve families, and example verification
pipelines."""

from .geom import (
    TAU_GEOM,
    Ambient,
    EUCLIDEAN,
    Parallelepiped,
    ClosedPolyline,
    TriSurfaceMesh,
    flat_torus,
    polyline_length,
    mesh_area,
    is_coherently_oriented,
    euler_characteristic,
    boundary_loops,
    boundary_multiplicity,
    self_intersections,
    surface_intersection,
    curve_as_polyline,
    hausdorff_distance,
    write_obj,
    read_obj,
)
from .solver import (
    SolveOptions,
    SolveReport,
    area_gradient,
    minimize_area,
    minimize_area_torus,
    triangulate_disk,
    cone_over_polyline,
)
from . import ledger
from . import constructions
from . import harness

__version__ = "0.1.0"

__all__ = [
    "TAU_GEOM", "Ambient", "EUCLIDEAN", "Parallelepiped", "ClosedPolyline",
    "TriSurfaceMesh", "flat_torus", "polyline_length", "mesh_area",
    "is_coherently_oriented", "euler_characteristic", "boundary_loops",
    "boundary_multiplicity", "self_intersections", "surface_intersection",
    "curve_as_polyline", "hausdorff_distance", "write_obj", "read_obj",
    "SolveOptions", "SolveReport", "area_gradient", "minimize_area",
    "minimize_area_torus", "triangulate_disk", "cone_over_polyline",
    "ledger", "constructions", "harness",
]
