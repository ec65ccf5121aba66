from .core import (
    TAU_GEOM,
    Ambient,
    EUCLIDEAN,
    Parallelepiped,
    ClosedPolyline,
    TriSurfaceMesh,
    flat_torus,
    polyline_length,
    edge_vector,
    mesh_area,
    is_coherently_oriented,
    euler_characteristic,
    boundary_loops,
    distance_to_polyline,
    boundary_multiplicity,
)
from .build import (
    stations,
    grid_patch,
    assemble_pieces,
    chart_torus_mesh,
    orient_coherently,
    flip_mesh_orientation,
    stitch_rings,
)
from .intersect import (
    tri_tri_intersection,
    self_intersections,
    surface_intersection,
    IntersectionCurve,
    curve_as_polyline,
)
from .distance import (
    hausdorff_distance,
    sample_mesh_points,
    point_triangle_distances,
    polyline_min_distance,
)
from .objio import write_obj, read_obj

__all__ = [
    "TAU_GEOM", "Ambient", "EUCLIDEAN", "Parallelepiped", "ClosedPolyline",
    "TriSurfaceMesh", "flat_torus", "polyline_length", "edge_vector",
    "mesh_area", "is_coherently_oriented", "euler_characteristic",
    "boundary_loops", "distance_to_polyline", "boundary_multiplicity",
    "stations", "grid_patch", "assemble_pieces", "chart_torus_mesh",
    "orient_coherently", "flip_mesh_orientation", "stitch_rings",
    "tri_tri_intersection", "self_intersections", "surface_intersection",
    "IntersectionCurve", "curve_as_polyline", "hausdorff_distance",
    "sample_mesh_points", "point_triangle_distances",
    "polyline_min_distance", "write_obj", "read_obj",
]
