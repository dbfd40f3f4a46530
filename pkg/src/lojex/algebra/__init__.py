from .jets import DEFAULT_JET_ORDER, AffineMap, Jet, compose_affine, taylor_jet
from .parser import PolySyntaxError, parse_poly
from .poly import (
    ZERO_TOL,
    Poly,
    default_names,
    derivative,
    evaluate,
    homogeneous_part,
    jacobian_polys,
    leading_form,
    partial_derivative,
    to_string,
)

__all__ = [
    "AffineMap",
    "DEFAULT_JET_ORDER",
    "Jet",
    "Poly",
    "PolySyntaxError",
    "ZERO_TOL",
    "compose_affine",
    "default_names",
    "derivative",
    "evaluate",
    "homogeneous_part",
    "jacobian_polys",
    "leading_form",
    "parse_poly",
    "partial_derivative",
    "taylor_jet",
    "to_string",
]
