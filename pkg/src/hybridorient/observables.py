"""Orientation <cos theta>(s) over one rotational period and revival statistics.

After the kick the amplitudes c_j only acquire phases, so

    <cos theta>(s) = Re sum_j 2 d_j conj(c_j) c_{j+1} exp(-2 i pi (j+1) s)

is a finite real Fourier series with integer frequencies. Traces keep these
coefficients, which makes them exactly periodic, cheap to evaluate at any s
and linear under ensemble averaging.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .operators import cos_theta_element
from .propagator import RotorWavefunction

DEFAULT_RESOLUTION = 2048
MIN_RESOLUTION = 64
DEFAULT_GAMMA = 0.5


@dataclass(frozen=True, eq=False)
class FourierSeries:
    """f(s) = Re sum_k coeffs[k] exp(-2 i pi k s), k = 0 .. len(coeffs)-1."""

    coeffs: NDArray[np.complex128]

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        k = np.arange(len(self.coeffs))
        # exact periodicity: only the fractional part of s matters
        frac = np.mod(s, 1.0)
        phase = np.exp(-2j * np.pi * np.multiply.outer(frac, k))
        return np.real(phase @ self.coeffs)

    def __add__(self, other: "FourierSeries") -> "FourierSeries":
        n = max(len(self.coeffs), len(other.coeffs))
        out = np.zeros(n, dtype=complex)
        out[: len(self.coeffs)] += self.coeffs
        out[: len(other.coeffs)] += other.coeffs
        return FourierSeries(out)

    def scaled(self, w: float) -> "FourierSeries":
        return FourierSeries(w * self.coeffs)


def orientation_series(state: RotorWavefunction, coupling: str = "exact") -> FourierSeries:
    """Fourier coefficients of <cos theta>(s) for a post-pulse state.

    ``coupling='half'`` replaces every d_j by 1/2, the approximation used for
    the sign analysis of the revivals; it is a diagnostic only.
    """
    js = state.basis.j_values
    c = state.amplitudes
    if coupling == "exact":
        d = cos_theta_element(js[:-1], state.basis.m)
    elif coupling == "half":
        d = np.full(len(js) - 1, 0.5)
    else:
        raise ValueError(f"unknown coupling {coupling!r}")
    coeffs = np.zeros(js[-1] + 1, dtype=complex)
    coeffs[js[1:]] = 2 * d * np.conj(c[:-1]) * c[1:]
    return FourierSeries(coeffs)


def expectation_cos_theta(state: RotorWavefunction) -> float:
    """<state| cos theta |state>."""
    d = cos_theta_element(state.basis.j_values[:-1], state.basis.m)
    c = state.amplitudes
    return float(np.sum(2 * d * np.real(np.conj(c[:-1]) * c[1:])))


@dataclass(frozen=True, eq=False)
class OrientationTrace:
    s: NDArray[np.float64]
    values: NDArray[np.float64]
    series: FourierSeries

    @property
    def resolution(self) -> int:
        return len(self.s)

    def evaluate(self, s):
        return self.series(s)


def trace_from_series(series: FourierSeries, resolution: int = DEFAULT_RESOLUTION) -> OrientationTrace:
    if resolution < MIN_RESOLUTION:
        raise ValueError(f"resolution {resolution} < {MIN_RESOLUTION} under-resolves revivals")
    s = np.arange(resolution) / resolution
    return OrientationTrace(s, series(s), series)


def orientation_trace(
    post_kick_state: RotorWavefunction, resolution: int = DEFAULT_RESOLUTION, coupling: str = "exact"
) -> OrientationTrace:
    return trace_from_series(orientation_series(post_kick_state, coupling), resolution)


@dataclass(frozen=True)
class RevivalStats:
    max_abs: float
    s_at_max: float
    signed_value: float
    duration: float
    threshold: float
    # other stretches above threshold, excluded from ``duration``
    other_intervals: tuple[tuple[float, float], ...] = field(default=())


def _bisect(f, inside: float, outside: float, tol: float = 1e-7) -> float:
    """Boundary of {f >= 0} between a point inside and one outside."""
    while abs(outside - inside) > tol:
        mid = 0.5 * (inside + outside)
        if f(mid) >= 0:
            inside = mid
        else:
            outside = mid
    return 0.5 * (inside + outside)


def _refine_peak(trace: OrientationTrace, i: int) -> tuple[float, float]:
    n = trace.resolution
    h = 1.0 / n
    best_s, best_val = float(trace.s[i]), abs(float(trace.values[i]))
    for _ in range(4):
        y = np.abs(trace.evaluate(np.array([best_s - h, best_s, best_s + h])))
        curv = y[0] - 2 * y[1] + y[2]
        if curv >= 0:
            break
        delta = 0.5 * (y[0] - y[2]) / curv
        cand = best_s + float(np.clip(delta, -1, 1)) * h
        val = abs(float(trace.evaluate(cand)))
        if val > best_val:
            best_s, best_val = cand, val
        h /= 8
    return best_s % 1.0, best_val


def revival_stats(trace: OrientationTrace, gamma: float = DEFAULT_GAMMA) -> RevivalStats:
    if not 0 < gamma <= 1:
        raise ValueError(f"threshold must lie in (0, 1], got {gamma}")
    n = trace.resolution
    absval = np.abs(trace.values)
    i = int(np.argmax(absval))
    s_max, max_abs = _refine_peak(trace, i)
    signed = float(trace.evaluate(s_max))
    if max_abs < gamma:
        return RevivalStats(max_abs, s_max, signed, 0.0, gamma)

    h = 1.0 / n

    def f(s):
        return abs(float(trace.evaluate(s))) - gamma

    def edge(direction: int) -> float:
        # step along the sample grid from the peak until the trace drops below gamma
        inside = s_max
        k = i
        for _ in range(n):
            k += direction
            s_k = trace.s[i] + (k - i) * h
            if f(s_k) < 0:
                return _bisect(f, inside, s_k)
            inside = s_k
        raise RuntimeError("trace never drops below threshold")

    right = edge(+1)
    left = edge(-1)
    duration = right - left
    # other sampled stretches above threshold
    above = absval >= gamma
    others = []
    covered = np.zeros(n, dtype=bool)
    grid = trace.s
    inside_main = ((grid - left) % 1.0) <= duration
    covered |= inside_main
    k = 0
    while k < n:
        if above[k] and not covered[k]:
            start = k
            while k < n and above[k] and not covered[k]:
                k += 1
            others.append((float(grid[start]), float(grid[k - 1])))
        else:
            k += 1
    return RevivalStats(max_abs, s_max, signed, float(duration), gamma, tuple(others))


def max_orientation(post_kick_state: RotorWavefunction, resolution: int = DEFAULT_RESOLUTION):
    """(max_abs, s_at_max, signed_value) of the post-pulse orientation trace."""
    st = revival_stats(orientation_trace(post_kick_state, resolution), DEFAULT_GAMMA)
    return st.max_abs, st.s_at_max, st.signed_value


def half_coupling_deviation(post_kick_state: RotorWavefunction, resolution: int = DEFAULT_RESOLUTION) -> float:
    """max_s |exact trace - half-coupling trace|, a diagnostic of the d_j ~ 1/2 approximation."""
    a = orientation_trace(post_kick_state, resolution, "exact").values
    b = orientation_trace(post_kick_state, resolution, "half").values
    return float(np.max(np.abs(a - b)))

