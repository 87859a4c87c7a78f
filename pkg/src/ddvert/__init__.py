"""Incremental vertex enumeration and multiobjective outer approximation."""

from .polyhedron import (
    AdjacencyPolyhedron,
    ConeDD,
    Halfspace,
    Violation,
    from_double_description,
    standard_cone_dd,
    validate,
)
from .dd import (
    CutOutcome,
    init_box,
    init_cone,
    isedge,
    onlinevert,
    onlinevert2,
    ray_hyperplane_intersection,
    segment_hyperplane_intersection,
    strip_artificial,
)
from .lp import LinearProgram, LpSolution, solve_lp
from .oracle import HRep, enumerate_vertices_brute
from .benson import (
    MolpInstance,
    ScalarizationResult,
    SolveReport,
    ideal_point,
    scalarize,
    solve_molp,
    supporting_halfspace,
)
from .bench import GenSpec, generate_instance, run_benchmark, artificial_vertex_table

__all__ = [
    "AdjacencyPolyhedron",
    "ConeDD",
    "CutOutcome",
    "GenSpec",
    "Halfspace",
    "HRep",
    "LinearProgram",
    "LpSolution",
    "MolpInstance",
    "ScalarizationResult",
    "SolveReport",
    "Violation",
    "artificial_vertex_table",
    "enumerate_vertices_brute",
    "from_double_description",
    "generate_instance",
    "ideal_point",
    "init_box",
    "init_cone",
    "isedge",
    "onlinevert",
    "onlinevert2",
    "ray_hyperplane_intersection",
    "run_benchmark",
    "scalarize",
    "segment_hyperplane_intersection",
    "solve_lp",
    "solve_molp",
    "standard_cone_dd",
    "strip_artificial",
    "supporting_halfspace",
    "validate",
]

__version__ = "0.1.0"
