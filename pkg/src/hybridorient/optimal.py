"""Optimal oriented target states in the subspace of the N lowest levels (m = 0).

The two optimal states of dimension N are the extremal eigenvectors of the
projected operator Pi_N cos(theta) Pi_N, a tridiagonal N x N matrix. With
all couplings set to 1/2 they reduce to sine profiles with eigenvalue
+-cos(pi/(N+1)); both the exact and the approximate forms are provided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray
from scipy import linalg

from .operators import AngularBasis, cos_theta_element
from .propagator import RotorWavefunction

SIGNS = ("minus", "plus")
MAX_TARGET_N = 14
# alpha in Gamma_N = alpha (N+1)^2 - (N+1)
DURATION_ALPHA = 2.0 / 3.0 - 1.0 / math.pi**2


@dataclass(frozen=True, eq=False)
class OptimalState:
    n_dim: int
    sign: str
    amplitudes: NDArray[np.float64]
    eigenvalue: float
    approximate: bool = False

    def as_wavefunction(self, j_max: int | None = None) -> RotorWavefunction:
        j_max = self.n_dim - 1 if j_max is None else j_max
        state = RotorWavefunction(AngularBasis(0, self.n_dim - 1), self.amplitudes.astype(complex))
        return state.resized(j_max)


def _check_n(n_dim: int) -> None:
    if int(n_dim) != n_dim or n_dim < 2:
        raise ValueError(f"subspace dimension must be an integer >= 2, got {n_dim}")


def _check_sign(sign: str) -> None:
    if sign not in SIGNS:
        raise ValueError(f"sign must be 'minus' or 'plus', got {sign!r}")


def sine_profile(n_dim: int, sign: str) -> NDArray[np.float64]:
    """sqrt(2/(N+1)) (+-1)^(j+1) sin(pi (j+1)/(N+1)), j = 0 .. N-1."""
    _check_n(n_dim)
    _check_sign(sign)
    j = np.arange(n_dim)
    pattern = np.ones(n_dim) if sign == "plus" else (-1.0) ** (j + 1)
    return math.sqrt(2.0 / (n_dim + 1)) * pattern * np.sin(np.pi * (j + 1) / (n_dim + 1))


def projected_cos_theta(n_dim: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Diagonal and off-diagonal of Pi_N cos(theta) Pi_N at m = 0."""
    return np.zeros(n_dim), cos_theta_element(np.arange(n_dim - 1), 0)


@lru_cache(maxsize=64)
def exact_optimal_states(n_dim: int) -> tuple[OptimalState, OptimalState]:
    """(minus, plus) extremal eigenvectors of the projected cos(theta) matrix."""
    _check_n(n_dim)
    diag, off = projected_cos_theta(n_dim)
    w, v = linalg.eigh_tridiagonal(diag, off)
    out = []
    for sign, col in (("minus", 0), ("plus", -1)):
        vec = v[:, col].copy()
        if vec @ sine_profile(n_dim, sign) < 0:
            vec = -vec
        vec.setflags(write=False)
        out.append(OptimalState(n_dim, sign, vec, float(w[col])))
    return out[0], out[1]


def exact_optimal_state(n_dim: int, sign: str) -> OptimalState:
    _check_sign(sign)
    minus, plus = exact_optimal_states(n_dim)
    return plus if sign == "plus" else minus


def approx_optimal_value(n_dim: int, sign: str) -> float:
    _check_n(n_dim)
    _check_sign(sign)
    val = math.cos(math.pi / (n_dim + 1))
    return val if sign == "plus" else -val


def approx_optimal_state(n_dim: int, sign: str) -> OptimalState:
    """Sine-profile state; normalised exactly by a trigonometric identity."""
    amps = sine_profile(n_dim, sign)
    amps.setflags(write=False)
    return OptimalState(n_dim, sign, amps, approx_optimal_value(n_dim, sign), approximate=True)


def optimal_duration(n_dim: int, gamma: float = 0.5) -> float:
    """Second-order estimate of the time the optimal revival spends above gamma."""
    _check_n(n_dim)
    peak = math.cos(math.pi / (n_dim + 1))
    # cos(pi/3) rounds just above 1/2; treat that boundary as exact
    if gamma >= peak * (1 - 1e-12):
        return 0.0
    big_gamma = DURATION_ALPHA * (n_dim + 1) ** 2 - (n_dim + 1)
    return 2.0 / math.pi * math.sqrt((1.0 - gamma / peak) / big_gamma)


def projection_probability(state: RotorWavefunction, target: OptimalState) -> float:
    """|<target|state>|^2 over the target's subspace."""
    if state.basis.m != 0:
        raise ValueError("optimal targets live in the m = 0 ladder")
    if target.n_dim > state.basis.dimension:
        raise ValueError(
            f"target dimension {target.n_dim} exceeds state dimension {state.basis.dimension}"
        )
    amp = np.vdot(target.amplitudes, state.amplitudes[: target.n_dim])
    return float(abs(amp) ** 2)


def subspace_population(state: RotorWavefunction, n_dim: int) -> float:
    """Population in the N lowest levels of the state's basis."""
    return float(np.sum(state.populations[:n_dim]))


def best_target(state_at_smax: RotorWavefunction, n_range: tuple[int, int] = (2, MAX_TARGET_N)):
    """(n_dim, sign, P_N) maximising the projection over N in [lo, hi]; ties go to smaller N."""
    lo, hi = n_range
    if not 2 <= lo <= hi <= MAX_TARGET_N:
        raise ValueError(f"n_range must lie within [2, {MAX_TARGET_N}], got {n_range}")
    hi = min(hi, state_at_smax.basis.dimension)
    best = (lo, "minus", -1.0)
    for n in range(lo, hi + 1):
        for target in exact_optimal_states(n):
            p = projection_probability(state_at_smax, target)
            if p > best[2] + 1e-12:
                best = (n, target.sign, p)
    return best
