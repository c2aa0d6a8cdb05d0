"""Boltzmann averaging of the orientation over initial levels |j0, m0>.

The fields depend on theta only, so m is conserved and every channel is an
independent cold-molecule problem in its own m ladder. Channel traces are
averaged as Fourier series, never as maxima.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .observables import (
    DEFAULT_GAMMA,
    DEFAULT_RESOLUTION,
    FourierSeries,
    OrientationTrace,
    RevivalStats,
    orientation_series,
    revival_stats,
    trace_from_series,
)
from .propagator import DEFAULT_AUDIT_TOL, KickAreas, kick_level

# exp(-x) underflows past this
_EXP_LIMIT = 745.0


@dataclass(frozen=True)
class ThermalConfig:
    t_tilde: float
    weight_cutoff: float = 1e-6

    def __post_init__(self):
        if not self.t_tilde >= 0:
            raise ValueError(f"temperature kT/B must be nonnegative, got {self.t_tilde}")
        if not 0 < self.weight_cutoff < 1:
            raise ValueError(f"weight_cutoff must lie in (0, 1), got {self.weight_cutoff}")

    @property
    def j0_max(self) -> int:
        channels = boltzmann_channels(self)
        return max(j for j, _, _ in channels)


def partition_function(t_tilde: float) -> float:
    if t_tilde == 0:
        return 1.0
    z = 0.0
    j = 0
    while j * (j + 1) / t_tilde < _EXP_LIMIT:
        z += (2 * j + 1) * math.exp(-j * (j + 1) / t_tilde)
        j += 1
    return z


def boltzmann_channels(config: ThermalConfig) -> list[tuple[int, int, float]]:
    """(j0, m0, weight) for every retained channel, j0 ascending then m0 ascending."""
    if config.t_tilde == 0:
        return [(0, 0, 1.0)]
    z = partition_function(config.t_tilde)
    out = []
    total = 0.0
    j = 0
    while total < 1.0 - config.weight_cutoff:
        w = math.exp(-j * (j + 1) / config.t_tilde) / z
        out.extend((j, m, w) for m in range(-j, j + 1))
        total += (2 * j + 1) * w
        j += 1
    return out


@dataclass(frozen=True, eq=False)
class ThermalSeries:
    series: FourierSeries
    j_max_used: tuple[int, ...]
    n_channels: int


def thermal_series(
    areas: KickAreas, config: ThermalConfig, use_m_symmetry: bool = False,
    tol: float = DEFAULT_AUDIT_TOL,
) -> ThermalSeries:
    """Weight-averaged orientation series.

    ``use_m_symmetry`` computes only m0 >= 0 and doubles m0 > 0, since all
    matrix elements depend on m through m^2.
    """
    total = FourierSeries(np.zeros(1, dtype=complex))
    j_used = []
    channels = boltzmann_channels(config)
    for j0, m0, w in channels:
        if use_m_symmetry:
            if m0 < 0:
                continue
            if m0 > 0:
                w = 2 * w
        res = kick_level(areas, j0, m0, tol)
        j_used.append(res.state.basis.j_max)
        total = total + orientation_series(res.state).scaled(w)
    return ThermalSeries(total, tuple(j_used), len(channels))


def thermal_orientation_trace(
    areas: KickAreas, config: ThermalConfig, resolution: int = DEFAULT_RESOLUTION,
    use_m_symmetry: bool = False,
) -> OrientationTrace:
    return trace_from_series(thermal_series(areas, config, use_m_symmetry).series, resolution)


def thermal_revival_stats(trace: OrientationTrace, gamma: float = DEFAULT_GAMMA) -> RevivalStats:
    return revival_stats(trace, gamma)
