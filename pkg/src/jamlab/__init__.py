"""jamlab: numerical laboratory for dynamic jam and canard trajectories
in planar rigid-body dynamics with a frictional point contact.

The package simulates compliantly regularized contact through the
dynamic-jam singularity, locates and classifies the singular point,
constructs the distinguished (maximally smooth) trajectory as a truncated
series with polynomial coefficients, and classifies post-singularity
outcomes (lift-off versus impact without collision) via the asymptotics
of generalized hypergeometric functions.
"""

from .canard import (CanardExpansion, ExpansionError, UnscaledPolynomial,
                     expand, residual, solve_third_order_poly, unscale)
from .contact import (ContactSystem, DerivedQuantities, ExtendedState,
                      make_extended_example, make_impact_oscillator,
                      make_simple_example)
from .gspot import (GSpotInfo, SingularFlowResult, classify_case,
                    fast_spectrum, find_gspot, painleve_lambda, singular_flow)
from .hypergeo import (ThetaEvaluator, classify_outcome, f12, gamma,
                       inner_perturbation, perturbation_exponents, theta)
from .ring import (DeltaSeries, DomainError, Jet, SPoly, jet_lift,
                   lie_derivative, poly_class_check, series_analytic,
                   series_arith)
from .sim import (SimConfig, Trajectory, eliminated_oracle,
                  relaxed_initial_state, simulate)

__version__ = "0.1.0"

__all__ = [
    "CanardExpansion", "ContactSystem", "DeltaSeries", "DerivedQuantities",
    "DomainError", "ExpansionError", "ExtendedState", "GSpotInfo", "Jet",
    "SPoly", "SimConfig", "SingularFlowResult", "ThetaEvaluator",
    "Trajectory", "UnscaledPolynomial", "classify_case", "classify_outcome",
    "eliminated_oracle", "expand", "f12", "fast_spectrum", "find_gspot",
    "gamma", "inner_perturbation", "jet_lift", "lie_derivative",
    "make_extended_example", "make_impact_oscillator", "make_simple_example",
    "painleve_lambda", "perturbation_exponents", "poly_class_check",
    "relaxed_initial_state", "residual", "series_analytic", "series_arith",
    "simulate", "singular_flow", "solve_third_order_poly", "theta", "unscale",
]
