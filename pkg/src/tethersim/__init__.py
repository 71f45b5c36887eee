"""tethersim: aerial tethered-load simulation and admittance control.

Coupled quadrotor / winch / cable-hook plant with a geometric tracking
controller, cable-space and Cartesian admittance interfaces for physical
human interaction, hook-force estimation from motion capture and a load
cell, Lyapunov stability certification for the admittance dynamics, and a
scenario harness with metrics and a comparison sweep.
"""

from ._kernels import COMPILED
from .plant import (
    CableState,
    PlantInputs,
    PlantParams,
    PlantState,
    SingularConfigurationError,
    cable_tension,
    coupled_derivative,
    default_params,
    hover_inputs,
    hover_state,
    hover_thrust,
    integrate_step,
)
from .admittance import (
    CvimParams,
    ImpedanceState,
    ShapingState,
    SvimParams,
    admittance_error,
    cvim_forcing,
    cvim_step,
    desired_motion,
    shape_commands,
    svim_forcing,
    svim_step,
)
from .estimation import ForceEstimate, HookForceEstimator, SensorStreams
from .stability import Certificate, certify, run_envelope_batch
from .tracking import (
    TrackingParams,
    TrackingTarget,
    WinchPid,
    WinchPidParams,
    quad_tracking_control,
    routh_hurwitz_check,
)

__version__ = "0.1.0"

__all__ = [
    "COMPILED",
    "CableState",
    "PlantInputs",
    "PlantParams",
    "PlantState",
    "SingularConfigurationError",
    "cable_tension",
    "coupled_derivative",
    "default_params",
    "hover_inputs",
    "hover_state",
    "hover_thrust",
    "integrate_step",
    "CvimParams",
    "ImpedanceState",
    "ShapingState",
    "SvimParams",
    "admittance_error",
    "cvim_forcing",
    "cvim_step",
    "desired_motion",
    "shape_commands",
    "svim_forcing",
    "svim_step",
    "ForceEstimate",
    "HookForceEstimator",
    "SensorStreams",
    "Certificate",
    "certify",
    "run_envelope_batch",
    "TrackingParams",
    "TrackingTarget",
    "WinchPid",
    "WinchPidParams",
    "quad_tracking_control",
    "routh_hurwitz_check",
    "__version__",
]
