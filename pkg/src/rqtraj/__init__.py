"""Quantum trajectories of a relativistic spinless particle in one dimension.

Deterministic trajectories from the quantum Hamilton-Jacobi formulation of
the stationary Klein-Gordon problem (with a non-relativistic Schroedinger
mode): closed-form constant-potential motion with its node geometry,
general-potential trajectories by quadrature and inversion, barrier
traversal delays, and the two conservation residuals that verify every
computed trajectory.
"""

from ._kernels import BACKEND
from .basis import BasisPair, constant_basis, numeric_basis, reparametrize_constants, wronskian
from .constant_motion import (
    NodeTable,
    divergence_time,
    evanescent_position,
    evanescent_velocity,
    max_speed,
    node_table,
    propagating_position,
    propagating_velocity,
)
from .dynamics import (
    BoundaryEvent,
    KinematicState,
    TrajectoryResult,
    TrajectorySample,
    classical_reference,
    firqnl_residual,
    integrate_trajectory,
    kinematics,
    time_of_flight,
    velocity_law,
)
from .hj import (
    HJState,
    MicrostateConstants,
    conjugate_momentum,
    momentum_derivatives,
    qshje_residual,
    reduced_action,
)
from .model import (
    EnergyContext,
    PhysicalParams,
    PiecewiseConstant,
    Potential,
    RectangularBarrier,
    RegionClass,
    Tabulated,
    classify_point,
    eval_potential,
    region_of_epsilon,
    uniform_potential,
)
from .tunneling import NonRelDelayComparison, TunnelingReport, barrier_delay, nonrelativistic_delay

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BasisPair",
    "BoundaryEvent",
    "EnergyContext",
    "HJState",
    "KinematicState",
    "MicrostateConstants",
    "NodeTable",
    "NonRelDelayComparison",
    "PhysicalParams",
    "PiecewiseConstant",
    "Potential",
    "RectangularBarrier",
    "RegionClass",
    "Tabulated",
    "TrajectoryResult",
    "TrajectorySample",
    "TunnelingReport",
    "barrier_delay",
    "classical_reference",
    "classify_point",
    "conjugate_momentum",
    "constant_basis",
    "divergence_time",
    "eval_potential",
    "evanescent_position",
    "evanescent_velocity",
    "firqnl_residual",
    "integrate_trajectory",
    "kinematics",
    "max_speed",
    "momentum_derivatives",
    "node_table",
    "nonrelativistic_delay",
    "numeric_basis",
    "propagating_position",
    "propagating_velocity",
    "qshje_residual",
    "reduced_action",
    "region_of_epsilon",
    "reparametrize_constants",
    "time_of_flight",
    "uniform_potential",
    "velocity_law",
    "wronskian",
]
