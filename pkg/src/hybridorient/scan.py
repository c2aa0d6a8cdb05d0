"""Parameter scans over the kick areas (A_L, A_HCP).

Every grid point is a pure function of its inputs, so points run in a
process pool and rows are gathered back in index order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .observables import DEFAULT_GAMMA, DEFAULT_RESOLUTION, orientation_trace, revival_stats, trace_from_series
from .optimal import MAX_TARGET_N, best_target
from .propagator import KickAreas, free_evolve, kick_level
from .thermal import ThermalConfig, thermal_series

WORKERS_ENV = "HYBRIDORIENT_WORKERS"


@dataclass(frozen=True)
class Axis:
    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("axis bounds must be finite")
        if self.count < 2:
            raise ValueError(f"axis needs at least 2 points, got {self.count}")
        if not self.lo < self.hi:
            raise ValueError(f"axis minimum {self.lo} must be below maximum {self.hi}")

    @classmethod
    def parse(cls, text: str) -> "Axis":
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"range {text!r} is not min:max:count")
        try:
            lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise ValueError(f"range {text!r} is not min:max:count") from None
        return cls(lo, hi, count)

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)

    def __str__(self):
        return f"{self.lo:g}:{self.hi:g}:{self.count}"


@dataclass(frozen=True)
class ScanSpec:
    al_axis: Axis
    ahcp_axis: Axis
    t_tilde: float | None = None
    gamma: float = DEFAULT_GAMMA
    resolution: int = DEFAULT_RESOLUTION

    def __post_init__(self):
        if self.al_axis.lo < 0:
            raise ValueError("laser areas must be nonnegative")


@dataclass(frozen=True)
class LineScanSpec:
    ahcp_axis: Axis
    ratio: float = 2.5
    t_tilde: float | None = None
    gamma: float = DEFAULT_GAMMA
    resolution: int = DEFAULT_RESOLUTION

    def __post_init__(self):
        if not self.ratio > 0:
            raise ValueError(f"ratio must be positive, got {self.ratio}")


GRID_COLUMNS = ("a_l", "a_hcp", "max_abs", "signed_value", "s_at_max", "duration", "j_max", "error")
LINE_COLUMNS = (
    "a_hcp", "a_l", "max_abs", "signed_value", "s_at_max", "max_abs_hcp_only",
    "duration", "best_n", "best_sign", "p_n", "j_max", "error",
)


def resolve_workers(workers: int | None) -> int:
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    return max(1, workers)


def orientation_point(a_l, a_hcp, t_tilde, gamma, resolution):
    """Revival statistics at one point, plus the post-pulse state when cold."""
    areas = KickAreas(float(a_hcp), float(a_l))
    if t_tilde:
        ts = thermal_series(areas, ThermalConfig(t_tilde))
        stats = revival_stats(trace_from_series(ts.series, resolution), gamma)
        return stats, None, max(ts.j_max_used)
    res = kick_level(areas)
    stats = revival_stats(orientation_trace(res.state, resolution), gamma)
    return stats, res.state, res.state.basis.j_max


def _grid_point(args):
    a_l, a_hcp, t_tilde, gamma, resolution = args
    row = {"a_l": a_l, "a_hcp": a_hcp}
    try:
        stats, _, j_max = orientation_point(a_l, a_hcp, t_tilde, gamma, resolution)
        row.update(max_abs=stats.max_abs, signed_value=stats.signed_value, s_at_max=stats.s_at_max,
                   duration=stats.duration, j_max=j_max, error="")
    except Exception as exc:  # recorded in-row; a scan never aborts on one point
        row.update(max_abs=math.nan, signed_value=math.nan, s_at_max=math.nan, duration=math.nan,
                   j_max=0, error=f"{type(exc).__name__}: {exc}")
    return row


def _line_point(args):
    a_hcp, ratio, t_tilde, gamma, resolution = args
    a_l = a_hcp / ratio
    row = {"a_hcp": a_hcp, "a_l": a_l}
    try:
        stats, state, j_max = orientation_point(a_l, a_hcp, t_tilde, gamma, resolution)
        hcp_only, _, _ = orientation_point(0.0, a_hcp, t_tilde, gamma, resolution)
        row.update(max_abs=stats.max_abs, signed_value=stats.signed_value, s_at_max=stats.s_at_max,
                   max_abs_hcp_only=hcp_only.max_abs, duration=stats.duration)
        if state is not None:
            n, sign, p = best_target(free_evolve(state, stats.s_at_max), (2, MAX_TARGET_N))
            row.update(best_n=n, best_sign=sign, p_n=p)
        else:
            # projections onto pure target states are undefined for a mixed ensemble
            row.update(best_n="", best_sign="", p_n=math.nan)
        row.update(j_max=j_max, error="")
    except Exception as exc:
        for col in LINE_COLUMNS[2:]:
            row.setdefault(col, math.nan)
        row.update(best_n="", best_sign="", j_max=0, error=f"{type(exc).__name__}: {exc}")
    return row


def _run(fn, tasks, workers):
    workers = resolve_workers(workers)
    if workers == 1 or len(tasks) < 2:
        return [fn(t) for t in tasks]
    chunk = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=chunk))


def scan_max_orientation(spec: ScanSpec, workers: int | None = None) -> list[dict]:
    """Grid of revival statistics, rows ordered with A_L as the outer loop."""
    tasks = [
        (float(a_l), float(a_hcp), spec.t_tilde, spec.gamma, spec.resolution)
        for a_l in spec.al_axis.values
        for a_hcp in spec.ahcp_axis.values
    ]
    return _run(_grid_point, tasks, workers)


def line_scan(spec: LineScanSpec, workers: int | None = None) -> list[dict]:
    """Scan along A_L = A_HCP / ratio, with the A_L = 0 comparison and target projections."""
    tasks = [
        (float(a_hcp), spec.ratio, spec.t_tilde, spec.gamma, spec.resolution)
        for a_hcp in spec.ahcp_axis.values
    ]
    return _run(_line_point, tasks, workers)
