import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybridorient.operators import AngularBasis, build_cos2_theta, build_cos_theta, build_j_squared
from hybridorient.propagator import (
    BasisMismatchError,
    FinitePulseSpec,
    KickAreas,
    NumericalError,
    RotorWavefunction,
    apply_hybrid_kick,
    finite_pulse_oracle,
    free_evolve,
    impulsive_reference,
    initial_j_max,
    kick_level,
    kick_operator_apply,
    spectral_decompose,
    truncation_audit,
    validate_impulsive,
)
from quadrature import kicked_ground_amplitudes


def ground(j_max=30, m=0):
    return RotorWavefunction.level(AngularBasis(m, j_max), abs(m))


def random_state(rng, basis):
    amps = rng.normal(size=basis.dimension) + 1j * rng.normal(size=basis.dimension)
    return RotorWavefunction(basis, amps / np.linalg.norm(amps))


areas_st = st.builds(
    KickAreas,
    st.floats(-6, 6, allow_nan=False),
    st.floats(0, 6, allow_nan=False),
)


def test_kick_areas_validation():
    with pytest.raises(ValueError):
        KickAreas(1.0, -0.1)
    with pytest.raises(ValueError):
        KickAreas(math.nan, 0.0)


def test_spectral_two_level():
    f = spectral_decompose(build_cos_theta(AngularBasis(0, 1)))
    assert f.eigenvalues == pytest.approx([-1 / math.sqrt(3), 1 / math.sqrt(3)], abs=1e-15)


def test_spectral_diagonal_is_identity():
    op = build_j_squared(AngularBasis(0, 6))
    f = spectral_decompose(op)
    assert np.array_equal(f.eigenvalues, op.bands[0])
    assert np.array_equal(f.eigenvectors, np.eye(7))


@pytest.mark.parametrize("builder", [build_cos_theta, build_cos2_theta])
def test_spectral_reconstruction(builder):
    op = builder(AngularBasis(0, 9))
    f = spectral_decompose(op)
    v = f.eigenvectors
    assert np.all(np.diff(f.eigenvalues) >= 0)
    assert np.max(np.abs(v @ v.T - np.eye(10))) < 1e-10
    assert np.max(np.abs(v @ np.diag(f.eigenvalues) @ v.T - op.dense())) < 1e-10


def test_kick_zero_area_is_identity():
    s = ground()
    op = build_cos_theta(s.basis)
    assert kick_operator_apply(s, op, 0.0) is s


def test_kick_inverse():
    s = ground()
    op = build_cos_theta(s.basis)
    back = kick_operator_apply(kick_operator_apply(s, op, 2.7), op, -2.7)
    assert np.max(np.abs(back.amplitudes - s.amplitudes)) < 1e-10


def test_kick_basis_mismatch():
    with pytest.raises(BasisMismatchError):
        kick_operator_apply(ground(10), build_cos_theta(AngularBasis(0, 11)), 1.0)


def test_hcp_kick_against_legendre_quadrature():
    s = apply_hybrid_kick(ground(30), KickAreas(3.0, 0.0))
    ref = kicked_ground_amplitudes(3.0, 0.0, 30)
    assert np.max(np.abs(s.populations - np.abs(ref) ** 2)) < 1e-8
    # also the phases: amplitudes are i^j sqrt(2j+1) j_j(A)
    assert np.max(np.abs(s.amplitudes - ref)) < 1e-8


@pytest.mark.parametrize("a_hcp, a_l", [(3.0, 1.2), (1.25, 3.7), (-2.0, 5.0), (0.0, 2.0)])
def test_hybrid_kick_against_legendre_quadrature(a_hcp, a_l):
    s = apply_hybrid_kick(ground(40), KickAreas(a_hcp, a_l))
    ref = kicked_ground_amplitudes(a_hcp, a_l, 40)
    assert np.max(np.abs(s.amplitudes - ref)) < 1e-8


def test_hybrid_kick_factorisation():
    s = ground()
    op_c, op_c2 = build_cos_theta(s.basis), build_cos2_theta(s.basis)
    assert np.array_equal(apply_hybrid_kick(s, KickAreas(0, 0)).amplitudes, s.amplitudes)
    np.testing.assert_allclose(
        apply_hybrid_kick(s, KickAreas(2.0, 0)).amplitudes,
        kick_operator_apply(s, op_c, 2.0).amplitudes, atol=1e-14)
    np.testing.assert_allclose(
        apply_hybrid_kick(s, KickAreas(0, 2.0)).amplitudes,
        kick_operator_apply(s, op_c2, 2.0).amplitudes, atol=1e-14)


@pytest.mark.parametrize("s", [1.0, 2.0, -1.0, 7.0])
def test_free_evolution_integer_periods(s):
    rng = np.random.default_rng(0)
    for m in (0, 1, 3):
        st_ = random_state(rng, AngularBasis(m, 40))
        assert np.max(np.abs(free_evolve(st_, s).amplitudes - st_.amplitudes)) < 1e-12


def test_free_evolution_phases():
    s = ground(5)
    amps = np.ones(6, dtype=complex) / math.sqrt(6)
    st_ = RotorWavefunction(s.basis, amps)
    out = free_evolve(st_, 0.1)
    j = np.arange(6)
    np.testing.assert_allclose(out.amplitudes, amps * np.exp(-1j * np.pi * j * (j + 1) * 0.1), atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(areas=areas_st, s=st.floats(-3, 3, allow_nan=False), m=st.integers(0, 3))
def test_unitarity(areas, s, m):
    basis = AngularBasis(m, 36)
    st_ = RotorWavefunction.level(basis, m)
    out = free_evolve(apply_hybrid_kick(st_, areas), s)
    assert abs(out.norm - 1) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(a_hcp=st.floats(0, 6), a_l=st.floats(0, 6))
def test_kick_factor_swap(a_hcp, a_l):
    s = ground(30)
    x = apply_hybrid_kick(s, KickAreas(a_hcp, a_l))
    y = apply_hybrid_kick(s, KickAreas(a_hcp, a_l), order="hcp-first")
    assert np.linalg.norm(x.amplitudes - y.amplitudes) < 1e-6


@settings(max_examples=25, deadline=None)
@given(areas=areas_st)
def test_parity_under_hcp_sign_flip(areas):
    s = ground(60)
    plus = apply_hybrid_kick(s, areas)
    minus = apply_hybrid_kick(s, KickAreas(-areas.a_hcp, areas.a_l))
    parity = (-1.0) ** np.arange(61)
    np.testing.assert_allclose(minus.amplitudes, parity * plus.amplitudes, atol=1e-12)


def test_truncation_audit():
    assert truncation_audit(ground()).ok
    assert truncation_audit(ground()).tail_population == 0
    areas = KickAreas(3.0, 1.2)
    small = kick_level(areas, j_max=6)
    assert small.audit.status == "insufficient"
    # population above j = 4 is about 2 %, so the tail at j_max = 6 is far from 1e-10
    big = kick_level(areas, j_max=40).state
    assert np.sum(big.populations[5:]) == pytest.approx(0.0177, abs=0.001)
    assert kick_level(areas, j_max=30).audit.ok


def test_adaptive_cutoff():
    assert initial_j_max(KickAreas(3.0, 1.2)) == 22
    assert initial_j_max(KickAreas(0.5, 0.0)) == 16
    res = kick_level(KickAreas(9.0, 6.0))
    assert res.audit.ok
    assert res.j_max_history[0] == 84
    res = kick_level(KickAreas(3.0, 1.2), j0=3, m=-2)
    assert res.state.basis.m == -2 and res.audit.ok


def test_kick_level_rejects_bad_initial_level():
    with pytest.raises(ValueError):
        kick_level(KickAreas(1, 1), j0=1, m=2)


def test_finite_pulse_zero_areas():
    s = ground(20)
    spec = FinitePulseSpec(0.002, KickAreas(0.0, 0.0))
    out = finite_pulse_oracle(spec, s.basis, s)
    assert abs(abs(out.state.overlap(s)) - 1) < 1e-12


def test_finite_pulse_spec_validation():
    with pytest.raises(ValueError):
        FinitePulseSpec(0.1, KickAreas(1, 1))
    with pytest.raises(ValueError):
        FinitePulseSpec(0.01, KickAreas(1, 1), envelope="square")


@pytest.mark.parametrize("envelope", ["sine-squared", "gaussian"])
def test_envelope_delivers_full_area(envelope):
    spec = FinitePulseSpec(0.004, KickAreas(1, 1), envelope)
    cum = spec.cumulative_area(np.array([0.0, 0.002, 0.004]))
    assert cum == pytest.approx([0.0, 0.5, 1.0], abs=1e-12)


@pytest.mark.parametrize("envelope", ["sine-squared", "gaussian"])
def test_finite_pulse_converges_to_impulsive(envelope):
    areas = KickAreas(3.0, 1.2)
    deficits = []
    for tau in (0.004, 0.002):
        rep = validate_impulsive(FinitePulseSpec(tau, areas, envelope))
        assert rep.norm_drift < 1e-8
        deficits.append(1 - rep.overlap)
    assert 1 - deficits[1] > 0.999
    assert deficits[1] < deficits[0]


def test_finite_pulse_nonground_initial_state():
    rng = np.random.default_rng(5)
    basis = AngularBasis(1, 28)
    init = random_state(rng, basis)
    spec = FinitePulseSpec(0.001, KickAreas(1.0, 0.5))
    out = finite_pulse_oracle(spec, basis, init)
    ref = impulsive_reference(spec, init)
    assert abs(out.state.overlap(ref)) ** 2 > 0.99


def test_finite_pulse_aborts_on_drift():
    s = ground(20)
    spec = FinitePulseSpec(0.002, KickAreas(3.0, 1.2))
    broken = RotorWavefunction(s.basis, s.amplitudes * np.nan)
    with pytest.raises(NumericalError, match="drift"):
        with np.errstate(all="ignore"):
            finite_pulse_oracle(spec, s.basis, broken, n_steps=10)
