"""Loop and mixed loop-smooth solitons of the Degasperis-Procesi equation.

Construction from determinant tau functions, exact-algebra field
assembly, parametric frame sampling through the hodograph map, and a
verification suite of quantified residual checks.
"""
from ._kernels import BACKEND
from .algebra import ExpPoly, PhaseSet, RationalExp, log_mixed_derivative
from .config import PRESETS, ScenarioConfig, parse_config, preset
from .errors import (
    DPLoopError,
    InvalidRegime,
    MapSingularity,
    ParameterError,
    SingularIntegrand,
    VelocityPole,
)
from .fields import (
    FieldSet,
    ParametricCurve,
    Perturbation,
    assemble_fields,
    sample_frame,
    trough_positions,
    x_closed,
    x_quadrature,
)
from .modes import ModeSpec, Regime, SolitonSpec, classify_mode, velocity
from .tau import closed_form_tau, delta_nu, det_numeric, det_symbolic
from .verify import Grid, VerificationReport, run_suite

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DPLoopError",
    "ExpPoly",
    "FieldSet",
    "Grid",
    "InvalidRegime",
    "MapSingularity",
    "ModeSpec",
    "ParametricCurve",
    "ParameterError",
    "Perturbation",
    "PhaseSet",
    "PRESETS",
    "RationalExp",
    "Regime",
    "ScenarioConfig",
    "SingularIntegrand",
    "SolitonSpec",
    "VelocityPole",
    "VerificationReport",
    "assemble_fields",
    "classify_mode",
    "closed_form_tau",
    "delta_nu",
    "det_numeric",
    "det_symbolic",
    "log_mixed_derivative",
    "parse_config",
    "preset",
    "run_suite",
    "sample_frame",
    "trough_positions",
    "velocity",
    "x_closed",
    "x_quadrature",
]
