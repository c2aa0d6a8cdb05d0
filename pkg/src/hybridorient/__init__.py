"""Field-free orientation of a linear rigid rotor after a hybrid HCP + laser kick."""

__version__ = "0.1.0"

from .observables import (
    OrientationTrace,
    RevivalStats,
    expectation_cos_theta,
    max_orientation,
    orientation_trace,
    revival_stats,
)
from .operators import AngularBasis, BandedSymmetricOperator, build_cos2_theta, build_cos_theta, build_j_squared
from .optimal import (
    OptimalState,
    approx_optimal_state,
    approx_optimal_value,
    best_target,
    exact_optimal_states,
    optimal_duration,
    projection_probability,
    subspace_population,
)
from .propagator import (
    FinitePulseSpec,
    KickAreas,
    NumericalError,
    RotorWavefunction,
    apply_hybrid_kick,
    finite_pulse_oracle,
    free_evolve,
    kick_ground,
    kick_level,
    truncation_audit,
)
from .thermal import ThermalConfig, boltzmann_channels, thermal_orientation_trace

__all__ = [
    "AngularBasis", "BandedSymmetricOperator", "build_cos_theta", "build_cos2_theta", "build_j_squared",
    "RotorWavefunction", "KickAreas", "FinitePulseSpec", "NumericalError", "apply_hybrid_kick",
    "free_evolve", "kick_ground", "kick_level", "truncation_audit", "finite_pulse_oracle",
    "OrientationTrace", "RevivalStats", "expectation_cos_theta", "orientation_trace", "revival_stats",
    "max_orientation", "OptimalState", "exact_optimal_states", "approx_optimal_state",
    "approx_optimal_value", "optimal_duration", "projection_probability", "best_target",
    "subspace_population", "ThermalConfig", "boltzmann_channels", "thermal_orientation_trace",
]
