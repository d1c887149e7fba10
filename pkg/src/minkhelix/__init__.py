"""Helices, slant helices and spherical curves in Minkowski 3-space.

Curves built as alpha = b * integral(exp(integral k) gamma) + a from a
unit-speed generator gamma on the de Sitter sphere S12 or the hyperbolic
plane H02, together with the numerical tests that certify them.
"""

from .builder import (Branch, ConstructedCurve, ConstructionParams, Family, KgProfile, KProfile,
                      construct_alpha, cumulative_integral, integrating_factor, kg_slant_profile,
                      predicted_invariants)
from .curves import (AnalyticCurve, BUILTIN_NAMES, CurveEvaluator, DerivativeQuality,
                     FiniteDifferenceCurve, SampleGrid, SplineCurve, builtin_curve,
                     curve_from_spec, evaluate, load_curve_spec, tabulated_curve)
from .detect import (SphereFit, TheoremRun, fit_lorentz_sphere, ratio_constancy, run_theorem,
                     slant_sigma, slant_verdict, spherical_verdict, sphericity_value,
                     verify_theorem)
from .errors import *  # noqa: F401,F403
from .frenet import (CurvatureData, FrenetApparatus, frame_ode_residual, frenet_apparatus,
                     invariants, system_matrix)
from .lorentz import (CausalCharacter, as_vec3, causal_character, det3, lorentz_cross,
                      minkowski_dot, pseudo_norm)
from .report import VerificationReport
from .sabban import (SabbanFrame, SurfaceKind, SynthesizedCurve, default_initial_frame,
                     geodesic_curvature, quadratic_form, sabban_frame, sabban_ode_residual,
                     surface_membership, synthesize_spherical_curve,
                     validate_unit_speed_spherical)

__version__ = "0.1.0"
