import math

import numpy as np
import pytest
from scipy import linalg

from hybridorient.observables import orientation_trace, revival_stats
from hybridorient.operators import AngularBasis, build_cos_theta
from hybridorient.optimal import (
    OptimalState,
    approx_optimal_state,
    approx_optimal_value,
    best_target,
    exact_optimal_state,
    exact_optimal_states,
    optimal_duration,
    projection_probability,
    subspace_population,
)
from hybridorient.propagator import KickAreas, RotorWavefunction, free_evolve, kick_ground


def test_two_dimensional_states():
    minus, plus = exact_optimal_states(2)
    assert minus.eigenvalue == pytest.approx(-1 / math.sqrt(3), abs=1e-15)
    assert plus.eigenvalue == pytest.approx(1 / math.sqrt(3), abs=1e-15)
    assert plus.amplitudes == pytest.approx([1 / math.sqrt(2)] * 2, abs=1e-15)


def test_exact_states_against_dense_solver():
    for n in range(2, 15):
        c = build_cos_theta(AngularBasis(0, n - 1)).dense()
        w = linalg.eigvalsh(c)
        minus, plus = exact_optimal_states(n)
        assert minus.eigenvalue == pytest.approx(w[0], abs=1e-13)
        assert plus.eigenvalue == pytest.approx(w[-1], abs=1e-13)
        for st in (minus, plus):
            assert np.linalg.norm(st.amplitudes) == pytest.approx(1, abs=1e-14)
            assert np.allclose(c @ st.amplitudes, st.eigenvalue * st.amplitudes, atol=1e-13)
            assert st.amplitudes @ approx_optimal_state(n, st.sign).amplitudes > 0


def test_five_dimensional_plus_eigenvalue():
    _, plus = exact_optimal_states(5)
    # tridiagonal solve; the sine-profile estimate cos(pi/6) is 0.040 lower
    assert plus.eigenvalue == pytest.approx(0.906179845938664, abs=1e-12)
    assert plus.eigenvalue - math.cos(math.pi / 6) == pytest.approx(0.0402, abs=1e-3)


@pytest.mark.parametrize("n", range(2, 9))
def test_spectrum_symmetric(n):
    w = linalg.eigvalsh(build_cos_theta(AngularBasis(0, n - 1)).dense())
    assert np.allclose(w, -w[::-1], atol=1e-14)
    if n % 2:
        assert np.min(np.abs(w)) < 1e-14
    minus, plus = exact_optimal_states(n)
    parity = (-1.0) ** np.arange(n)
    # the sign flip c_j -> (-1)^j c_j maps chi_+ onto chi_- up to phase
    assert abs(plus.amplitudes @ (parity * minus.amplitudes)) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("n", range(2, 15))
def test_sine_profile_normalised_exactly(n):
    for sign in ("plus", "minus"):
        amps = approx_optimal_state(n, sign).amplitudes
        assert abs(np.sum(amps**2) - 1) < 1e-12


def test_sine_profile_n2():
    plus = approx_optimal_state(2, "plus").amplitudes
    assert plus == pytest.approx([math.sqrt(2 / 3) * math.sin(math.pi / 3),
                                  math.sqrt(2 / 3) * math.sin(2 * math.pi / 3)], abs=1e-15)
    assert plus == pytest.approx([1 / math.sqrt(2)] * 2, abs=1e-15)
    minus = approx_optimal_state(2, "minus").amplitudes
    assert minus == pytest.approx([-1 / math.sqrt(2), 1 / math.sqrt(2)], abs=1e-15)


def test_approx_vs_exact_overlap():
    for sign in ("plus", "minus"):
        ov = approx_optimal_state(5, sign).amplitudes @ exact_optimal_state(5, sign).amplitudes
        assert ov**2 > 0.99


def test_approx_values():
    assert approx_optimal_value(2, "plus") == pytest.approx(0.5, abs=1e-15)
    assert approx_optimal_value(2, "minus") == pytest.approx(-0.5, abs=1e-15)
    assert approx_optimal_value(5, "plus") == pytest.approx(0.8660254, abs=1e-7)
    vals = [approx_optimal_value(n, "plus") for n in range(2, 200)]
    assert np.all(np.diff(vals) > 0) and vals[-1] < 1 and vals[-1] > 0.9998


def test_exact_magnitude_exceeds_approximation():
    # the couplings exceed 1/2, so the true extremes lie outside +-cos(pi/(N+1))
    gaps = [exact_optimal_states(n)[1].eigenvalue - math.cos(math.pi / (n + 1)) for n in range(2, 11)]
    assert all(g > 0 for g in gaps)
    assert np.all(np.diff(gaps) < 0)
    assert max(gaps[4:]) < 0.035  # N >= 6


def test_optimal_duration_values():
    assert optimal_duration(2, 0.5) == 0.0
    alpha = 2 / 3 - 1 / math.pi**2
    assert alpha == pytest.approx(0.56535, abs=1e-5)
    assert alpha * 36 - 6 == pytest.approx(14.353, abs=1e-3)
    assert optimal_duration(5, 0.5) == pytest.approx(0.1092, abs=1e-4)
    assert optimal_duration(3, 0.5) == pytest.approx(0.1534, abs=1e-4)
    assert optimal_duration(3, 0.5) > optimal_duration(5, 0.5)
    assert optimal_duration(5, 0.99) == 0.0


def _duration(amps, coupling="exact"):
    n = len(amps)
    st = RotorWavefunction(AngularBasis(0, n - 1), np.asarray(amps, dtype=complex))
    return revival_stats(orientation_trace(st, 4096, coupling), 0.5).duration


@pytest.mark.parametrize("n", range(3, 7))
def test_duration_formula_matches_its_own_approximation(n):
    # the estimate is built from the sine profile and the 1/2-coupling trace
    measured = _duration(approx_optimal_state(n, "plus").amplitudes, "half")
    assert optimal_duration(n, 0.5) == pytest.approx(measured, rel=0.07)


@pytest.mark.parametrize("n", range(3, 7))
def test_exact_state_duration_exceeds_estimate(n):
    measured = _duration(exact_optimal_state(n, "plus").amplitudes)
    rel = (optimal_duration(n, 0.5) - measured) / measured
    assert -0.17 < rel < -0.14


def test_projection_probability_basics():
    minus = exact_optimal_state(4, "minus")
    st = minus.as_wavefunction(12)
    n, sign, p = best_target(st)
    assert (n, sign) == (4, "minus") and p == pytest.approx(1.0, abs=1e-12)
    phased = RotorWavefunction(st.basis, st.amplitudes * np.exp(0.7j))
    assert projection_probability(phased, minus) == pytest.approx(1.0, abs=1e-12)


def test_projection_equals_subspace_population_for_restricted_state(fig3_at_smax):
    n = 5
    head = fig3_at_smax.amplitudes[:n]
    pop = subspace_population(fig3_at_smax, n)
    target = OptimalState(n, "minus", head / math.sqrt(pop), 0.0)
    assert projection_probability(fig3_at_smax, target) == pytest.approx(pop, abs=1e-12)


def test_projection_dimension_checks():
    st = RotorWavefunction.level(AngularBasis(0, 3), 0)
    with pytest.raises(ValueError):
        projection_probability(st, exact_optimal_state(6, "plus"))
    with pytest.raises(ValueError):
        projection_probability(RotorWavefunction.level(AngularBasis(1, 8), 1), exact_optimal_state(3, "plus"))


def test_subspace_population():
    g = RotorWavefunction.level(AngularBasis(0, 9), 0)
    assert subspace_population(g, 1) == 1.0
    assert subspace_population(g, 10) == 1.0


def test_fig3_projection(fig3_at_smax):
    assert projection_probability(fig3_at_smax, exact_optimal_state(5, "minus")) == pytest.approx(0.93, abs=0.02)
    assert subspace_population(fig3_at_smax, 5) > 0.98
    assert best_target(fig3_at_smax)[:2] == (5, "minus")
    # the approximate target gives a similar projection
    approx = approx_optimal_state(5, "minus")
    assert projection_probability(fig3_at_smax, approx) == pytest.approx(0.93, abs=0.03)


def test_island_projection(island_state):
    stats = revival_stats(orientation_trace(island_state), 0.5)
    at = free_evolve(island_state, stats.s_at_max)
    assert projection_probability(at, exact_optimal_state(6, "plus")) == pytest.approx(0.86, abs=0.02)


def test_best_n_steps_up_along_the_line():
    best = []
    for a in np.linspace(1.5, 5.0, 15):
        st = kick_ground(KickAreas(a, a / 2.5))
        stats = revival_stats(orientation_trace(st), 0.5)
        best.append(best_target(free_evolve(st, stats.s_at_max))[0])
    assert all(b2 >= b1 for b1, b2 in zip(best, best[1:]))
    assert best[0] < best[-1]


def test_bad_arguments():
    with pytest.raises(ValueError):
        exact_optimal_states(1)
    with pytest.raises(ValueError):
        approx_optimal_state(3, "up")
    with pytest.raises(ValueError):
        best_target(RotorWavefunction.level(AngularBasis(0, 5), 0), (1, 4))
