"""Decoherence and error bounds for a quantum particle bouncing off a
dynamical wall: closed forms, optimizers and independent numeric oracles."""

__version__ = "0.1.0"

from .kinematics import (
    CollisionParams,
    ComCoordinates,
    GaussianProductState,
    IdealReflectedState,
    PostCollisionState,
    collision_params,
    collision_params_from_delta,
    com_inverse,
    com_transform,
    ideal_reflected_state,
    initial_state,
    post_collision_state,
)
from .error_bounds import (
    ErrorReport,
    Optimum,
    error_asymptotic,
    error_report,
    mismatch_penalty,
    optimal_lambda,
    overlap_amplitude,
)
from .entanglement import (
    EntanglementReport,
    KernelParams,
    entanglement_measure,
    entanglement_report,
    k_independence_check,
    kernel_params,
    largest_eigenvalue,
    optimal_spreads,
    oscillator_kernel_spectrum,
    reduced_kernel_eval,
    spectrum,
)
from .oracles import (
    GridSpec,
    grid_for_state,
    kernel_eigensolve,
    quadrature_overlap,
    schmidt_decompose,
)
from .propagation import (
    PropagatorSetup,
    image_propagate,
    separation_check,
    transit_time,
)
from .thermal import (
    CollisionBudget,
    ThermalDesign,
    amplitude_budget,
    backaction_ratio,
    thermal_design,
    thermal_k_sigma,
    thermal_spread,
)
