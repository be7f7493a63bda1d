import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from nmtorus.echo import EchoSeries, afa_series
from nmtorus.errors import SizeGuardError, ValidationError
from nmtorus.maps import HarperParams, MapPair, PcmParams, harper_pair, pcm_pair
from nmtorus.nonmarkov import (
    OptimalityReport,
    PauliTransferMatrix,
    QubitState,
    channel_from_afa,
    channel_oracle,
    channel_oracle_series,
    nm_series,
    optimal_pair,
    positive_variation,
    reduced_evolution,
    trace_distance,
    verify_optimal_pair,
)
from nmtorus.torus import Basis, KickedMap, KickPhase

magnitudes = arrays(np.float64, st.integers(1, 60), elements=st.floats(0, 1))


def test_nm_examples():
    np.testing.assert_allclose(nm_series([1, 0.5, 0.8, 0.2]).m_values, [0, 0, 0.6, 0.6], atol=1e-15)
    np.testing.assert_array_equal(nm_series([1, 0.8, 0.5, 0.1]).m_values, 0)
    np.testing.assert_array_equal(nm_series(np.full(7, 0.4)).m_values, 0)


def test_positive_variation_examples():
    np.testing.assert_allclose(positive_variation([1, 0.5, 0.8]), [0, 0, 0.3], atol=1e-15)
    np.testing.assert_allclose(positive_variation([0.1, 0.2, 0.3]), [0, 0.1, 0.2], atol=1e-15)
    np.testing.assert_array_equal(positive_variation([0.9, 0.3, 0.1]), 0)


def test_nm_from_echo_series_keeps_provenance(pcm8):
    echo = afa_series(pcm8, 10)
    nm = nm_series(echo)
    np.testing.assert_array_equal(nm.times, echo.times)
    np.testing.assert_array_equal(nm.abs_f, echo.abs)
    assert nm.params["family"] == "pcm"


@given(magnitudes)
def test_nm_is_twice_positive_variation(mag):
    np.testing.assert_array_equal(nm_series(mag).m_values, 2 * positive_variation(mag))


@given(magnitudes)
def test_nm_starts_at_zero_and_never_decreases(mag):
    m = nm_series(mag).m_values
    assert m[0] == 0
    assert np.all(np.diff(m) >= 0)


@given(magnitudes, arrays(np.float64, 60, elements=st.floats(-np.pi, np.pi)))
def test_nm_ignores_phases(mag, phases):
    f = mag * np.exp(1j * phases[: mag.size])
    np.testing.assert_allclose(nm_series(f).m_values, nm_series(mag).m_values, atol=1e-12)


@given(magnitudes)
def test_monotone_decreasing_series_has_zero_measure(mag):
    np.testing.assert_array_equal(nm_series(np.sort(mag)[::-1]).m_values, 0)


def test_channel_from_afa_special_values():
    np.testing.assert_array_equal(channel_from_afa(1).matrix, np.eye(4))
    dephase = channel_from_afa(0)
    out = dephase.apply(QubitState.from_bloch(0.3, -0.4, 0.5)).bloch
    np.testing.assert_allclose(out, [0, 0, 0.5], atol=1e-15)
    rotated = channel_from_afa(1j).apply(QubitState.from_bloch(1, 0, 0))
    np.testing.assert_allclose(rotated.bloch, [0, -1, 0], atol=1e-15)
    np.testing.assert_allclose(rotated.rho[0, 1], 0.5j, atol=1e-15)
    with pytest.raises(ValidationError):
        channel_from_afa(1.1)


def test_phase_kick_pair_gives_f_equal_i():
    # U1 = U0 exp(-i pi/2) makes Tr[U1^dag U0]/N = i exactly at t = 1
    n = 8
    u0 = KickedMap((KickPhase(Basis.POSITION, lambda q: np.cos(2 * np.pi * q)),), n)
    extra = KickPhase(Basis.POSITION, lambda q: np.full_like(q, -np.pi / 2))
    u1 = KickedMap(u0.kicks + (extra,), n)
    pair = MapPair(u0, u1, 0.0)
    np.testing.assert_allclose(channel_oracle(pair, 1).matrix, channel_from_afa(1j).matrix, atol=1e-12)


def test_channel_oracle_basics(pcm8):
    np.testing.assert_allclose(channel_oracle(pcm8, 0).matrix, np.eye(4), atol=1e-12)
    f3 = afa_series(pcm8, 3).values[3]
    np.testing.assert_allclose(channel_oracle(pcm8, 3).matrix, channel_from_afa(f3).matrix, atol=1e-9)
    idle = pcm_pair(PcmParams(2.0, 0.3, 8), 0.0)
    for t in (1, 4, 9):
        np.testing.assert_allclose(channel_oracle(idle, t).matrix, np.eye(4), atol=1e-10)


def test_channel_oracle_size_guard():
    with pytest.raises(SizeGuardError):
        channel_oracle(pcm_pair(PcmParams(1.0, 0.0, 128), 0.1), 1)


def test_channel_series_matches_afa(harper8):
    echo = afa_series(harper8, 15)
    for ch, f in zip(channel_oracle_series(harper8, 15), echo.values):
        assert ch.dephasing_deviation() < 1e-9
        np.testing.assert_allclose(ch.matrix, channel_from_afa(f).matrix, atol=1e-9)
        assert ch.coherence_factor == pytest.approx(f, abs=1e-9)


@pytest.mark.parametrize("n", [8, 16])
def test_coherence_factorization(n):
    pair = harper_pair(HarperParams(0.3, 0.3, n), 0.5)
    rho0 = QubitState.from_bloch(0.2, 0.7, -0.6)
    echo = afa_series(pair, 10)
    for state, f in zip(reduced_evolution(pair, rho0, 10), echo.values):
        assert state.rho[0, 1] == pytest.approx(f * rho0.rho[0, 1], abs=1e-9)
        assert state.rho[0, 0] == pytest.approx(rho0.rho[0, 0], abs=1e-9)
        assert state.rho[1, 1] == pytest.approx(rho0.rho[1, 1], abs=1e-9)


def test_trace_distance_examples():
    r = QubitState.from_bloch(0.1, 0.2, 0.3)
    assert trace_distance(r, r) == 0
    up, down = QubitState(np.diag([1, 0])), QubitState(np.diag([0, 1]))
    assert trace_distance(up, down) == pytest.approx(1.0, abs=1e-15)
    plus, minus = optimal_pair()
    assert trace_distance(plus, minus) == pytest.approx(1.0, abs=1e-15)


@settings(max_examples=50)
@given(st.tuples(*[st.floats(-0.57, 0.57)] * 6))
def test_trace_distance_is_half_bloch_distance(coords):
    r1, r2 = np.array(coords[:3]), np.array(coords[3:])
    d = trace_distance(QubitState.from_bloch(*r1), QubitState.from_bloch(*r2))
    assert d == pytest.approx(0.5 * np.linalg.norm(r1 - r2), abs=1e-12)
    assert 0 <= d <= 1


def test_qubit_state_validation():
    with pytest.raises(ValidationError):
        QubitState(np.array([[1, 1], [0, 0]]))
    with pytest.raises(ValidationError):
        QubitState(np.eye(2))
    with pytest.raises(ValidationError):
        QubitState.from_bloch(1.0, 1.0, 0.0)
    with pytest.raises(ValidationError):
        PauliTransferMatrix(np.eye(3))
    with pytest.raises(ValidationError):
        optimal_pair(1.0, 1.0)
    np.testing.assert_allclose(QubitState.from_bloch(0.3, -0.2, 0.1).bloch, [0.3, -0.2, 0.1], atol=1e-15)


def test_optimal_pair_zero_coupling():
    report = verify_optimal_pair(pcm_pair(PcmParams(1.0, 0.25, 8), 0.0), 10, 50, seed=3)
    assert report.passed
    assert report.max_sampled == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(report.bound, 0, atol=1e-12)


def test_optimal_pair_bound_pcm8(pcm8):
    report = verify_optimal_pair(pcm8, 10, 200, seed=11)
    assert report.passed, report
    assert report.optimal_pair_error < 1e-9
    assert report.max_sampled <= report.bound[-1] + 1e-8


@pytest.mark.parametrize("phi", [0.0, 0.7, 2.0])
def test_equatorial_pairs_track_abs_f(harper8, phi):
    plus, minus = optimal_pair(np.cos(phi), np.sin(phi))
    echo = afa_series(harper8, 10)
    for ch, f in zip(channel_oracle_series(harper8, 10), echo.values):
        assert trace_distance(ch.apply(plus), ch.apply(minus)) == pytest.approx(abs(f), abs=1e-9)


def test_report_flags_violations():
    report = OptimalityReport(np.zeros(3), 0.1, 0.1, 0.0, 1, 5)
    assert not report.passed


def test_echo_series_validation():
    with pytest.raises(ValidationError):
        EchoSeries(np.arange(3), np.ones(4))
