import math

import numpy as np
import pytest
from scipy.linalg import expm, svd

from damping_dsl import Constant, Power
from mode_analysis import lambdas, phi
from propagator import (
    ENVELOPE_COLUMNS,
    ModeMatrix,
    envelope,
    expm_oracle,
    fit_decay_rate,
    log_mode_norm,
    mode_norm,
    propagate,
    sigma_max,
)
from spectrum import make_spectrum


def random_modes(n, seed=7):
    rng = np.random.default_rng(seed)
    s = 10.0 ** rng.uniform(-1.0, 1.0, n)
    f_s = 10.0 ** rng.uniform(-1.3, 0.7, n)
    t = rng.uniform(0.0, 5.0, n)
    return zip(s, f_s, t)


def test_identity_at_time_zero():
    for s, f_s in [(1.0, 1.0), (4.0, 0.5), (1.0, 3.0)]:
        np.testing.assert_array_equal(propagate(s, f_s, 0.0).as_array(), np.eye(2))
        assert mode_norm(s, f_s, 0.0) == 1.0


def test_closed_form_matches_oracle():
    for s, f_s, t in random_modes(200):
        closed = propagate(s, f_s, t).as_array()
        oracle = expm_oracle(s, f_s, t).as_array()
        np.testing.assert_allclose(closed, oracle, rtol=0.0, atol=1e-9)


def test_closed_form_matches_scipy_expm_and_svd():
    for s, f_s, t in random_modes(300, seed=11):
        reference = expm(t * ModeMatrix(float(s), float(f_s)).as_array())
        np.testing.assert_allclose(propagate(s, f_s, t).as_array(), reference, rtol=0.0, atol=1e-9)
        largest = svd(reference, compute_uv=False)[0]
        assert mode_norm(s, f_s, t) == pytest.approx(largest, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("f_s, t", [
    (1.0, 2.0),                  # exact tie
    (1.0 + 1e-8, 1.0),           # series branch
    (1.0 - 1e-8, 3.0),
    (math.sqrt(1.0 + 0.0099), 1.0),   # just inside the series switch
    (math.sqrt(1.0 + 0.0101), 1.0),   # just outside, overdamped
    (math.sqrt(1.0 - 0.0101), 1.0),   # just outside, underdamped
])
def test_branches_agree_near_critical_damping(f_s, t):
    closed = propagate(1.0, f_s, t).as_array()
    oracle = expm_oracle(1.0, f_s, t).as_array()
    np.testing.assert_allclose(closed, oracle, rtol=0.0, atol=1e-12)


def test_mode_matrix():
    matrix = ModeMatrix(4.0, 0.5)
    np.testing.assert_array_equal(matrix.as_array(), [[0.0, 2.0], [-2.0, -1.0]])
    assert matrix.trace == -1.0
    assert matrix.det == 4.0


def test_determinant_follows_trace():
    for s, f_s, t in random_modes(50, seed=3):
        assert propagate(s, f_s, t).det == pytest.approx(math.exp(-2.0 * f_s * t), rel=1e-10)


def test_propagators_are_contractions():
    for s, f_s, t in random_modes(200, seed=11):
        assert mode_norm(s, f_s, t) <= 1.0 + 1e-12


def test_semigroup_property():
    for s, f_s, t in random_modes(50, seed=5):
        whole = propagate(s, f_s, 2.0 * t).as_array()
        half = propagate(s, f_s, t).as_array()
        np.testing.assert_allclose(whole, half @ half, rtol=0.0, atol=1e-12)


@pytest.mark.parametrize("s, f_s", [(2.0, 1.0), (3.0, 2.0), (0.5, 0.1), (1e-2, 1.0)])
def test_eigenvalues_of_propagator(s, f_s):
    t = 0.7
    computed = np.sort_complex(np.linalg.eigvals(propagate(s, f_s, t).as_array()))
    expected = np.sort_complex(np.exp(np.array(lambdas(s, f_s)) * t))
    np.testing.assert_allclose(computed, expected, rtol=1e-10, atol=1e-14)


def test_sigma_max():
    assert sigma_max(3.0, 0.0, 0.0, -2.0) == pytest.approx(3.0)
    angle = 0.3
    assert sigma_max(math.cos(angle), -math.sin(angle), math.sin(angle), math.cos(angle)) == pytest.approx(1.0)
    matrix = np.array([[1.0, 2.0], [-0.5, 4.0]])
    assert sigma_max(*matrix.ravel()) == pytest.approx(np.linalg.norm(matrix, 2), rel=1e-14)


@pytest.mark.parametrize("u0, v0", [(1.0, 0.0), (0.0, 1.0), (1 / math.sqrt(2), 1 / math.sqrt(2)), (0.6, -0.8)])
def test_critically_damped_trajectory(u0, v0):
    for t in (0.0, 0.5, 1.0, 3.0, 10.0):
        x, y = propagate(1.0, 1.0, t).apply(u0, v0)
        expected = math.sqrt(u0 ** 2 + v0 ** 2 + 2 * (u0 ** 2 - v0 ** 2) * t + 2 * (u0 + v0) ** 2 * t ** 2) * math.exp(-t)
        assert math.hypot(x, y) == pytest.approx(expected, rel=1e-12)


def test_critically_damped_norm():
    for t in (0.1, 1.0, 5.0):
        assert mode_norm(1.0, 1.0, t) == pytest.approx((t + math.sqrt(1 + t * t)) * math.exp(-t), rel=1e-12)


@pytest.mark.parametrize("a", [0.1, 0.5, 0.9])
def test_subdamped_peak(a):
    omega = math.sqrt(1.0 - a * a)
    peak = math.sqrt((1.0 + a) / (1.0 - a))
    t_peak = math.pi / (2.0 * omega)
    assert mode_norm(1.0, a, t_peak) * math.exp(a * t_peak) == pytest.approx(peak, rel=1e-12)
    times = np.linspace(0.0, 20.0, 2001)
    scaled = [mode_norm(1.0, a, t) * math.exp(a * t) for t in times]
    assert max(scaled) <= peak * (1.0 + 1e-12)


def test_log_norm_survives_underflow():
    t = 2000.0
    assert mode_norm(1.0, 1.0, t) == 0.0
    assert log_mode_norm(1.0, 1.0, t) == pytest.approx(-t + math.log(t + math.sqrt(1 + t * t)), rel=1e-12)


def test_envelope_table():
    spec = make_spectrum([1.0, 4.0, 9.0])
    times = np.linspace(0.0, 30.0, 301)
    table = envelope(spec, Constant(0.5), times)
    assert list(table.columns[:3]) == ENVELOPE_COLUMNS
    assert len(table) == len(times)
    # every mode has norm 1 at t = 0; ties go to the smallest eigenvalue
    assert table["N"].iloc[0] == 1.0
    assert table["argmax_s"].iloc[0] == 1.0
    assert set(table["argmax_s"]) <= {1.0, 4.0, 9.0}
    np.testing.assert_allclose(np.exp(table["log_N"]), table["N"], rtol=1e-15)


def test_subdamped_envelope_constant():
    spec = make_spectrum([1.0, 4.0, 9.0])
    times = np.linspace(0.0, 40.0, 4001)
    table = envelope(spec, Constant(0.5), times)
    scaled = table["N"] * np.exp(0.5 * table["t"])
    assert scaled.max() <= math.sqrt(3.0) * (1.0 + 1e-12)
    assert scaled.max() == pytest.approx(math.sqrt(3.0), rel=1e-4)


def test_envelope_is_max_of_mode_norms():
    spec = make_spectrum([0.3, 1.0, 2.5, 7.0])
    f = Power(1.2, 0.75)
    times = [0.0, 0.4, 2.0, 9.0]
    table = envelope(spec, f, times)
    for row, t in zip(table.itertuples(), times):
        norms = [mode_norm(s, 1.2 * s ** 0.75, t) for s in spec.eigenvalues]
        assert row.N == pytest.approx(max(norms), rel=1e-12)


def test_fit_decay_rate_recovers_phi():
    spec = make_spectrum([1.0])
    times = np.linspace(0.0, 60.0, 601)
    table = envelope(spec, Constant(2.0), times)
    assert fit_decay_rate(table["t"], table["log_N"]) == pytest.approx(phi(1.0, 2.0), rel=1e-8)
