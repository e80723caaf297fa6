"""Helicoidal surfaces moving self-similarly under mean curvature flow.

Generating curves are built by arc-length integration of prescribed-
curvature ODE systems (rotating solitons, minimal, constant mean
curvature), classified through period integrals and monotone root solving,
checked against the self-similar-motion algebra, and exported as SVG/OBJ/
CSV artifacts with matplotlib report figures.
"""

from .cmc import (
    ClassificationReport,
    CmcTrajectory,
    RatioOutOfRange,
    alpha,
    classify_closed,
    cmc_law,
    delta_phi,
    delta_theta,
    elliptic_E,
    excursion_period,
    find_R,
    generate_cmc_curve,
    involution_phi,
)
from .engine import (
    DomainExit,
    InitialData,
    IntegratorConfig,
    Solution,
    StepUnderflow,
    conserved_drift,
    detect_events,
    integrate_curve,
    integrate_ode,
    integrate_tau_nu,
    resample_arclength,
)
from .geometry import (
    CurvatureLaw,
    CurveState,
    GeneratingCurve,
    Pitch,
    first_fundamental_form,
    mean_curvature,
    prescribed_H_to_law,
    reconstruct_point,
    second_fundamental_form,
    surface_point,
    unit_normal,
)
from .mesh import SurfaceMesh, build_mesh, discrete_mean_curvature
from .minimal import (
    MinimalCurveSpec,
    minimal_closed_form,
    minimal_h0_curve,
    minimal_law,
    minimal_limit_family,
    wunderlich_parametrization,
)
from .motions import (
    MotionProfile,
    MotionSpec,
    dilation_rotation_profile,
    matrix_exp_skew,
    reduce_general,
    soliton_residual,
    translation_rotation_profile,
)
from .rotating import (
    ConvergenceTable,
    SolitonReport,
    convergence_experiment,
    generate_rotating_curve,
    h0_trajectory,
    rotating_law,
    verify_soliton_structure,
)

__version__ = "0.1.0"
