"""Geometric mechanics of the planar chiral oscillator.

Brackets, Hamiltonians, SE(2) symmetry and reduction, integrators and a
numerical verification suite for the higher-order Lagrangian
``L = -(lam/2)(xdot*yddot - ydot*xddot) + (m/2)|xdot|^2``.
"""

from .core import (
    ChiralError,
    DimensionMismatch,
    FullState,
    DarbouxState,
    MomentumMismatch,
    NegativeLambda,
    NonConvergence,
    Params,
    ReducedState,
    RegularityWarning,
    SingularGramMatrix,
    Vec2,
    ZeroMomentum,
)
from .dynamics import Formulation, Method, Trajectory, integrate, project_full_to_reduced, reconstruct
from .verify import CheckResult, run_suite

__version__ = "0.1.0"

__all__ = [
    "ChiralError",
    "CheckResult",
    "DarbouxState",
    "DimensionMismatch",
    "Formulation",
    "FullState",
    "Method",
    "MomentumMismatch",
    "NegativeLambda",
    "NonConvergence",
    "Params",
    "ReducedState",
    "RegularityWarning",
    "SingularGramMatrix",
    "Trajectory",
    "Vec2",
    "ZeroMomentum",
    "integrate",
    "project_full_to_reduced",
    "reconstruct",
    "run_suite",
]
