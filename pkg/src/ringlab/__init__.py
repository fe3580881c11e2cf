"""Numerical laboratory for concentrated axisymmetric vortex rings.

Modules
-------
kernels      exact axisymmetric kernels H, S and the split H = K + L + R
fastkernels  compiled particle sums used by the blob simulator
blobs        Lagrangian blob simulator and diagnostics
reduced      limiting point-vortex system with axial drift
leapfrog     two-ring Hamiltonian analysis (levels, periods, overtakings)
experiments  convergence sweep and leapfrogging demonstration
cli          command line front end
"""

from __future__ import annotations

from .blobs import DiagnosticsFrame, ParticleSystem, RingSpec, diagnostics, init_particles, step, velocity_field
from .errors import (
    CollisionError,
    ConfigError,
    ConsistencyError,
    DegeneratePairError,
    DomainError,
    NonPeriodicLevelError,
    NotFoundError,
    QuadratureError,
    RingLabError,
    SimulationBlowup,
    SingularityError,
)
from .kernels import (
    KernelContext,
    KernelSplit,
    eval_H,
    eval_I0,
    eval_I1,
    eval_I2,
    eval_K,
    eval_L,
    eval_remainder,
    eval_S,
)
from .leapfrog import OrbitLevel, TwoRingParams, alpha_threshold, hamiltonian, level_roots, period
from .reduced import ReducedState, Trajectory, integrate_reduced, reduced_rhs

__version__ = "0.1.0"

__all__ = [
    "CollisionError",
    "ConfigError",
    "ConsistencyError",
    "DegeneratePairError",
    "DiagnosticsFrame",
    "DomainError",
    "KernelContext",
    "KernelSplit",
    "NonPeriodicLevelError",
    "NotFoundError",
    "OrbitLevel",
    "ParticleSystem",
    "QuadratureError",
    "ReducedState",
    "RingLabError",
    "RingSpec",
    "SimulationBlowup",
    "SingularityError",
    "Trajectory",
    "TwoRingParams",
    "alpha_threshold",
    "diagnostics",
    "eval_H",
    "eval_I0",
    "eval_I1",
    "eval_I2",
    "eval_K",
    "eval_L",
    "eval_S",
    "eval_remainder",
    "hamiltonian",
    "init_particles",
    "integrate_reduced",
    "level_roots",
    "period",
    "reduced_rhs",
    "step",
    "velocity_field",
]
