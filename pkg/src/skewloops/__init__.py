"""Skew loops: construction on cylinders, certified verification, quadric obstructions."""

from .construct import (
    HeightFunction,
    build_cylinder_loop,
    construct_height,
    construct_mu,
    cross_norm_sq,
    curvature_bound,
    cylinder_margin,
    margin_function,
)
from .curves import (
    SampledCurve,
    SmoothCurve,
    SpaceCurve,
    TrigCurve,
    acceleration,
    apply_affine,
    circle,
    eval_curve,
    stretch,
    tantrix_at,
    velocity,
)
from .kernels import BACKEND
from .oval import (
    SupportFunction,
    curvature_direct,
    curvature_from_support,
    make_support_oval,
    radius_of_curvature,
    support_parametrization,
    symmetry_analysis,
)
from .quadric import (
    QuadricModel,
    arclength_symmetry_defect,
    bisection_defect,
    connection_integral,
    noperiod_residual,
    planar_section,
    q_form,
    q_tantrix,
    sphere_connection_residual,
    symmetric_cylinder_witness,
    tantrix_homotopy,
)
from .trigpoly import BoundBox, TrigPoly, inf_bound, sup_bound
from .verify import (
    SkewCertificate,
    Status,
    defect,
    derivative_bounds,
    diagonal_band,
    find_parallel_pair,
    perturbation_stability,
    verify_skew,
)

__version__ = "0.1.0"
