"""Impulsive hybrid-kick propagator and a finite-duration integration oracle.

In dimensionless time s = t / tau_rot the post-pulse propagator is

    U(s, 0) = exp(-i pi J^2 s) exp(i A_hcp cos) exp(i A_l cos^2)

so a kick is a matrix exponential of a banded symmetric operator and free
evolution is a diagonal phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray
from scipy import linalg, special

from .operators import AngularBasis, BandedSymmetricOperator, operator

DEFAULT_AUDIT_TOL = 1e-10
MAX_J = 2048


class NumericalError(RuntimeError):
    """A numerical routine failed (no convergence, norm drift, truncation)."""


class BasisMismatchError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class RotorWavefunction:
    basis: AngularBasis
    amplitudes: NDArray[np.complex128]

    def __post_init__(self):
        if self.amplitudes.shape != (self.basis.dimension,):
            raise BasisMismatchError(
                f"{self.amplitudes.shape[0]} amplitudes for basis of dimension {self.basis.dimension}"
            )

    @classmethod
    def level(cls, basis: AngularBasis, j: int) -> "RotorWavefunction":
        amps = np.zeros(basis.dimension, dtype=complex)
        amps[basis.index_of(j)] = 1.0
        return cls(basis, amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def populations(self) -> NDArray[np.float64]:
        return np.abs(self.amplitudes) ** 2

    def resized(self, j_max: int) -> "RotorWavefunction":
        """Same state on a basis with a different cutoff; dropped levels must be empty."""
        basis = AngularBasis(self.basis.m, j_max)
        amps = np.zeros(basis.dimension, dtype=complex)
        keep = min(basis.dimension, self.basis.dimension)
        amps[:keep] = self.amplitudes[:keep]
        return RotorWavefunction(basis, amps)

    def overlap(self, other: "RotorWavefunction") -> complex:
        _same_basis(self.basis, other.basis)
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class KickAreas:
    """Dimensionless pulse areas: ``a_hcp`` signed, ``a_l`` nonnegative."""

    a_hcp: float
    a_l: float

    def __post_init__(self):
        if not (math.isfinite(self.a_hcp) and math.isfinite(self.a_l)):
            raise ValueError("kick areas must be finite")
        if self.a_l < 0:
            raise ValueError(f"laser area must be nonnegative, got {self.a_l}")


@dataclass(frozen=True, eq=False)
class SpectralFactors:
    eigenvalues: NDArray[np.float64]
    eigenvectors: NDArray[np.float64]

    def exp_apply(self, vec: NDArray, area: float) -> NDArray:
        """exp(i * area * op) @ vec."""
        v = self.eigenvectors
        return v @ (np.exp(1j * area * self.eigenvalues) * (v.T @ vec))


def _same_basis(a: AngularBasis, b: AngularBasis) -> None:
    if a != b:
        raise BasisMismatchError(f"basis mismatch: {a} vs {b}")


def spectral_decompose(op: BandedSymmetricOperator) -> SpectralFactors:
    """Full eigendecomposition of a banded symmetric operator, ascending eigenvalues."""
    try:
        if op.bandwidth == 0:
            order = np.argsort(op.bands[0], kind="stable")
            w = op.bands[0][order].astype(float)
            v = np.eye(op.dimension)[:, order]
        else:
            w, v = linalg.eig_banded(op.upper_banded(), lower=False, check_finite=True)
    except (linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(
            f"eigendecomposition failed for operator {op.name or '?'} "
            f"(m={op.basis.m}, j_max={op.basis.j_max}, fingerprint {op.fingerprint()}): {exc}"
        ) from exc
    w.setflags(write=False)
    v.setflags(write=False)
    return SpectralFactors(w, v)


@lru_cache(maxsize=512)
def cached_factors(kind: str, m: int, j_max: int) -> SpectralFactors:
    return spectral_decompose(operator(kind, m, j_max))


def kick_operator_apply(
    state: RotorWavefunction, op: BandedSymmetricOperator, area: float,
    factors: SpectralFactors | None = None,
) -> RotorWavefunction:
    _same_basis(state.basis, op.basis)
    if area == 0:
        return state
    if factors is None:
        factors = spectral_decompose(op)
    return RotorWavefunction(state.basis, factors.exp_apply(state.amplitudes, area))


def apply_hybrid_kick(
    state: RotorWavefunction, areas: KickAreas, order: str = "laser-first"
) -> RotorWavefunction:
    """exp(i A_hcp cos) exp(i A_l cos^2) applied to ``state``.

    ``order='hcp-first'`` swaps the two factors; it exists to measure the
    truncation artifact of the swap.
    """
    m, j_max = state.basis.m, state.basis.j_max
    steps = [
        ("cos2", areas.a_l),
        ("cos", areas.a_hcp),
    ]
    if order == "hcp-first":
        steps.reverse()
    elif order != "laser-first":
        raise ValueError(f"unknown kick order {order!r}")
    amps = state.amplitudes
    for kind, area in steps:
        if area:
            amps = cached_factors(kind, m, j_max).exp_apply(amps, area)
    return RotorWavefunction(state.basis, amps)


def free_phases(basis: AngularBasis, s: float) -> NDArray[np.complex128]:
    js = basis.j_values
    energy = js * (js + 1)
    # j(j+1) is even, so reduce s mod 1 exactly for large s
    frac = math.fmod(s, 1.0)
    return np.exp(-1j * np.pi * energy * frac)


def free_evolve(state: RotorWavefunction, s: float) -> RotorWavefunction:
    return RotorWavefunction(state.basis, state.amplitudes * free_phases(state.basis, s))


@dataclass(frozen=True)
class TruncationAudit:
    ok: bool
    tail_population: float
    tol: float

    @property
    def status(self) -> str:
        return "ok" if self.ok else "insufficient"


def truncation_audit(state: RotorWavefunction, tol: float = DEFAULT_AUDIT_TOL) -> TruncationAudit:
    tail = float(np.sum(state.populations[-2:]))
    return TruncationAudit(tail < tol, tail, tol)


def initial_j_max(areas: KickAreas, j0: int = 0) -> int:
    return max(16, math.ceil(4 * (abs(areas.a_hcp) + 2 * areas.a_l))) + j0


@dataclass(frozen=True, eq=False)
class KickResult:
    state: RotorWavefunction
    audit: TruncationAudit
    j_max_history: tuple[int, ...] = field(default=())


def kick_level(
    areas: KickAreas, j0: int = 0, m: int = 0, tol: float = DEFAULT_AUDIT_TOL,
    j_max: int | None = None,
) -> KickResult:
    """Kick |j0, m> with an adaptive cutoff, doubling j_max until the audit passes.

    With an explicit ``j_max`` no adaptation happens and the audit is only reported.
    """
    if j0 < abs(m):
        raise ValueError(f"j0={j0} < |m|={abs(m)}")
    if j_max is not None:
        state = apply_hybrid_kick(RotorWavefunction.level(AngularBasis(m, j_max), j0), areas)
        return KickResult(state, truncation_audit(state, tol), (j_max,))
    jm = max(initial_j_max(areas, j0), abs(m) + 2, j0 + 2)
    history = []
    while True:
        history.append(jm)
        state = apply_hybrid_kick(RotorWavefunction.level(AngularBasis(m, jm), j0), areas)
        audit = truncation_audit(state, tol)
        if audit.ok:
            return KickResult(state, audit, tuple(history))
        if jm >= MAX_J:
            raise NumericalError(
                f"truncation audit failed at j_max={jm} for areas {areas}: tail {audit.tail_population:.3e}"
            )
        jm = min(2 * jm, MAX_J)


def kick_ground(areas: KickAreas, tol: float = DEFAULT_AUDIT_TOL) -> RotorWavefunction:
    """Post-pulse state of a cold molecule, |0, 0> kicked with adaptive j_max."""
    return kick_level(areas, 0, 0, tol).state


# --- finite-duration oracle -------------------------------------------------

ENVELOPES = ("sine-squared", "gaussian")


@dataclass(frozen=True)
class FinitePulseSpec:
    """Both pulses share one envelope of total length ``tau_rel`` (units of tau_rot)."""

    tau_rel: float
    areas: KickAreas
    envelope: str = "sine-squared"

    def __post_init__(self):
        if not 0 < self.tau_rel <= 0.05:
            raise ValueError(f"tau_rel must lie in (0, 0.05], got {self.tau_rel}")
        if self.envelope not in ENVELOPES:
            raise ValueError(f"envelope must be one of {ENVELOPES}, got {self.envelope!r}")

    def cumulative_area(self, s: NDArray) -> NDArray:
        """Fraction of the total area delivered by time s, s in [0, tau_rel]."""
        x = np.clip(np.asarray(s, dtype=float) / self.tau_rel, 0.0, 1.0)
        if self.envelope == "sine-squared":
            return x - np.sin(2 * np.pi * x) / (2 * np.pi)
        # Gaussian with FWHM tau/4, centred, renormalised on the window
        sigma = 0.25 / (2 * math.sqrt(2 * math.log(2)))
        lo = special.erf(-0.5 / (math.sqrt(2) * sigma))
        return (special.erf((x - 0.5) / (math.sqrt(2) * sigma)) - lo) / (-2 * lo)


@dataclass(frozen=True, eq=False)
class OracleResult:
    state: RotorWavefunction
    n_steps: int
    norm_drift: float


def finite_pulse_oracle(
    spec: FinitePulseSpec, basis: AngularBasis, initial: RotorWavefunction,
    n_steps: int | None = None, max_phase_step: float = 0.02,
) -> OracleResult:
    """Integrate i d/ds psi = [pi J^2 - g(s)(A_hcp cos + A_l cos^2)] psi over [0, tau_rel].

    Strang splitting; the interaction factor of each step uses the exact
    envelope area over that step, so only the J^2 commutator is approximated.
    """
    _same_basis(initial.basis, basis)
    if n_steps is None:
        fastest = np.pi * basis.j_max * (basis.j_max + 1)
        n_steps = max(2000, math.ceil(spec.tau_rel * fastest / max_phase_step))
    dt = spec.tau_rel / n_steps
    cos = operator("cos", basis.m, basis.j_max)
    cos2 = operator("cos2", basis.m, basis.j_max)
    coupling = spec.areas.a_hcp * cos.dense() + spec.areas.a_l * cos2.dense()
    w, v = linalg.eigh(coupling)
    half_free = free_phases(basis, dt / 2)
    cum = spec.cumulative_area(np.linspace(0.0, spec.tau_rel, n_steps + 1))
    step_area = np.diff(cum)
    psi = initial.amplitudes.astype(complex)
    for a in step_area:
        psi = half_free * psi
        psi = v @ (np.exp(1j * a * w) * (v.T @ psi))
        psi = half_free * psi
    drift = abs(np.linalg.norm(psi) - initial.norm)
    if not drift <= 1e-8:
        raise NumericalError(
            f"oracle norm drift {drift:.3e} with {n_steps} steps (dt={dt:.3e}); reduce the step"
        )
    return OracleResult(RotorWavefunction(basis, psi), n_steps, drift)


def impulsive_reference(spec: FinitePulseSpec, initial: RotorWavefunction) -> RotorWavefunction:
    """Impulsive counterpart of the oracle: kick at the pulse centre."""
    half = spec.tau_rel / 2
    kicked = apply_hybrid_kick(free_evolve(initial, half), spec.areas)
    return free_evolve(kicked, half)


@dataclass(frozen=True)
class ValidationReport:
    overlap: float
    norm_drift: float
    tail_population: float
    n_steps: int
    j_max: int


def validate_impulsive(spec: FinitePulseSpec, j_max: int | None = None) -> ValidationReport:
    """Compare the oracle and impulsive states from |0,0> via |<oracle|impulsive>|^2."""
    if j_max is None:
        j_max = kick_level(spec.areas).state.basis.j_max
    basis = AngularBasis(0, j_max)
    initial = RotorWavefunction.level(basis, 0)
    oracle = finite_pulse_oracle(spec, basis, initial)
    ref = impulsive_reference(spec, initial)
    ovl = abs(oracle.state.overlap(ref)) ** 2
    return ValidationReport(ovl, oracle.norm_drift, truncation_audit(ref).tail_population,
                            oracle.n_steps, j_max)
