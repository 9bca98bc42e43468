"""Exact quantum invariants of biframed planar knotoids, and knot measures
of open 3D curves estimated by randomized projection."""

from .algebra import (
    DElement,
    DTensor,
    antipode,
    normal_order_mul,
    r_inverse,
    r_matrix,
    rotation_element,
)
from .diagram import (
    Biframing,
    Crossing,
    OrientedGaussCode,
    RotDecomp,
    Rotation,
    chain_decompositions,
    fixtures,
    parse_decomposition,
    parse_gauss_code,
    reverse_decomposition,
    table_rows,
    writhe,
)
from .diagram import insert_r2_pair, insert_rotation_pair
from .invariant import Comparison, InvariantValue, compare, epsilon_coefficient, evaluate_Z
from .measure import (
    MeasureEstimate,
    OpenCurve3D,
    ProjectionResult,
    builtin_curve_path,
    class_label,
    dominant_knotoid,
    estimate_measure,
    knot_to_knotoid,
    load_curve,
    perturbed,
    project,
    sample_directions,
    simplify_gauss,
)
from .rt import EndpointVectors, RepData, derive_rep, recovery_check, rt_evaluate
from .series import Caps, ScalarSeries, q_factorial

__version__ = "0.1.0"

__all__ = [
    "Biframing",
    "Caps",
    "Comparison",
    "Crossing",
    "DElement",
    "DTensor",
    "EndpointVectors",
    "InvariantValue",
    "MeasureEstimate",
    "OpenCurve3D",
    "OrientedGaussCode",
    "ProjectionResult",
    "RepData",
    "RotDecomp",
    "Rotation",
    "ScalarSeries",
    "antipode",
    "builtin_curve_path",
    "chain_decompositions",
    "class_label",
    "compare",
    "derive_rep",
    "dominant_knotoid",
    "epsilon_coefficient",
    "estimate_measure",
    "evaluate_Z",
    "fixtures",
    "insert_r2_pair",
    "insert_rotation_pair",
    "knot_to_knotoid",
    "load_curve",
    "normal_order_mul",
    "parse_decomposition",
    "parse_gauss_code",
    "perturbed",
    "project",
    "q_factorial",
    "r_inverse",
    "r_matrix",
    "recovery_check",
    "reverse_decomposition",
    "rotation_element",
    "rt_evaluate",
    "sample_directions",
    "simplify_gauss",
    "table_rows",
    "writhe",
]
