from .oracles import (
    DistanceBatch,
    DistanceResult,
    OracleOptions,
    UnsupportedIntersection,
    distance,
    distance_bruteforce,
    distances,
    distances_bruteforce,
    membership,
)
from .ops import hyperplane_variety, implicit_equations, intersect, resolve_intersection, section, section_in_frame, squarefree_part
from .sampling import SamplingError, ambient_probes, log_uniform_radii, sample_on_variety
from .spec import Finite, Graph, Implicit, Intersection, Parametric, VarietySpec

__all__ = [
    "DistanceBatch",
    "DistanceResult",
    "Finite",
    "Graph",
    "Implicit",
    "Intersection",
    "OracleOptions",
    "Parametric",
    "SamplingError",
    "UnsupportedIntersection",
    "VarietySpec",
    "ambient_probes",
    "distance",
    "distance_bruteforce",
    "distances",
    "distances_bruteforce",
    "hyperplane_variety",
    "implicit_equations",
    "intersect",
    "log_uniform_radii",
    "membership",
    "resolve_intersection",
    "sample_on_variety",
    "section",
    "section_in_frame",
    "squarefree_part",
]
