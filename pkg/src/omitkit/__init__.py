"""Probe response, transparency and gain of a driven optomechanical cavity."""

__version__ = "0.1.0"

from .errors import (BracketError, ConfigError, ConvergenceError, DivergenceError, DomainError, OmitError,
                     RangeError, SearchError, SingularityError)
from .params import (Detuning, PhysicalParams, ReducedParams, beta_from_intracavity,
                     field_amplitude, reduce, steady_state_zeroth)
from .response import (ProbeResponse, SidebandInputs, SidebandSolution, dispersion_slope,
                       epsilon_T, epsilon_T_linearized, im_epsilon_T_closed, nonlinear_term,
                       probe_response, sideband_solution)
from .transparency import (DipConditions, WidthReport, half_max_roots, ideal_dip_conditions,
                           slope_max_and_product, width_closed, width_numeric)
from .gain import GainReport, gain_closed, gain_numeric, gain_point
from .oracle import (OracleConfig, OracleTrace, extract_sidebands, integrate_mean_equations,
                     oracle_epsilon_T, sideband_linear_solve)

__all__ = [
    "BracketError", "ConfigError", "ConvergenceError", "DivergenceError", "DomainError", "OmitError",
    "RangeError", "SearchError", "SingularityError",
    "Detuning", "PhysicalParams", "ReducedParams", "beta_from_intracavity",
    "field_amplitude", "reduce", "steady_state_zeroth",
    "ProbeResponse", "SidebandInputs", "SidebandSolution", "dispersion_slope", "epsilon_T",
    "epsilon_T_linearized", "im_epsilon_T_closed", "nonlinear_term", "probe_response",
    "sideband_solution",
    "DipConditions", "WidthReport", "half_max_roots", "ideal_dip_conditions",
    "slope_max_and_product", "width_closed", "width_numeric",
    "GainReport", "gain_closed", "gain_numeric", "gain_point",
    "OracleConfig", "OracleTrace", "extract_sidebands", "integrate_mean_equations",
    "oracle_epsilon_T", "sideband_linear_solve",
]
