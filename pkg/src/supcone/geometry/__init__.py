"""Exact rational polyhedral geometry: representations, conversions, LPs."""

from .dd import DEFAULT_ROW_CAP, cone_rays
from .lp import INFEASIBLE, OPTIMAL, UNBOUNDED
from .sets import (
    ConeGen,
    GeneratorSet,
    HalfSpace,
    LpResult,
    NEG_INF,
    POS_INF,
    PolyhedronH,
    closed_conv_hull_union,
    cone,
    cone_contains,
    cone_equal,
    cone_multipliers,
    cone_polar,
    empty_generators,
    empty_polyhedron,
    generator_member,
    generator_subset_of_poly,
    generators,
    h_to_v,
    halfspace,
    intersect,
    is_empty_poly,
    lp_solve,
    minkowski_sum,
    poly_contains_generators,
    poly_contains_point,
    poly_equal,
    polyhedron,
    recession_cone,
    recession_of_generators,
    scale_generators,
    sup_distance_to_cone,
    support_function,
    translate_poly,
    v_to_h,
    whole_space,
)
from .vec import (
    Rational,
    Vec,
    dot,
    format_rat,
    is_zero_vec,
    primitive,
    rat,
    sup_norm,
    unit_vec,
    vadd,
    vec,
    vneg,
    vscale,
    vsub,
    zero_vec,
)

__all__ = [name for name in dir() if not name.startswith("_")]
