import math

import pytest

from damping_dsl import Constant, Power, parse_damping
from errors import RejectedTailError, SpecError, StructError
from spectrum import (
    StructuralConstants,
    Tail,
    bilaplacian_1d,
    check_structural,
    grid_spectrum,
    laplacian_1d,
    make_spectrum,
    spectrum_from_config,
)


def test_make_spectrum_sorts_and_merges_duplicates():
    spec = make_spectrum([4.0, 1.0, 4.0])
    assert spec.eigenvalues == (1.0, 4.0)
    assert spec.s0 == 1.0
    assert spec.s_max == 4.0
    assert len(spec) == 2
    assert not spec.unbounded


def test_near_duplicates_are_merged():
    spec = make_spectrum([1.0, 1.0 + 1e-15, 2.0])
    assert spec.eigenvalues == (1.0, 2.0)


@pytest.mark.parametrize("values", [[], [0.0, 1.0], [-1.0], [float("nan")], [float("inf")]])
def test_make_spectrum_rejects(values):
    with pytest.raises(SpecError):
        make_spectrum(values)


def test_laplacian_on_pi():
    spec = laplacian_1d(math.pi, 3)
    assert spec.eigenvalues == pytest.approx((1.0, 4.0, 9.0), rel=1e-14)
    assert spec.unbounded


def test_laplacian_on_unit_interval():
    spec = laplacian_1d(1.0, 2)
    assert spec.eigenvalues == pytest.approx((math.pi ** 2, 4.0 * math.pi ** 2), rel=1e-14)


def test_bilaplacian():
    assert bilaplacian_1d(math.pi, 3).eigenvalues == pytest.approx((1.0, 16.0, 81.0), rel=1e-13)
    assert bilaplacian_1d(1.0, 1).eigenvalues == pytest.approx((math.pi ** 4,), rel=1e-14)
    assert bilaplacian_1d(1.0, 1).tail is Tail.POWER


@pytest.mark.parametrize("length, n_modes", [(0.0, 3), (-1.0, 3), (1.0, 0), (1.0, 2.5)])
def test_generators_reject_bad_arguments(length, n_modes):
    with pytest.raises(SpecError):
        laplacian_1d(length, n_modes)


def test_grid_spectrum():
    assert grid_spectrum(1.0, 3.0, 3).eigenvalues == (1.0, 2.0, 3.0)
    assert grid_spectrum(1.0, 100.0, 3, "log").eigenvalues == pytest.approx((1.0, 10.0, 100.0))
    with pytest.raises(SpecError):
        grid_spectrum(2.0, 1.0, 3)
    with pytest.raises(SpecError):
        grid_spectrum(1.0, 2.0, 3, "cubic")


def test_spectrum_from_config_shapes():
    assert spectrum_from_config({"type": "list", "values": [9, 1, 4]}).eigenvalues == (1.0, 4.0, 9.0)
    laplacian = spectrum_from_config({"type": "laplacian1d", "length": math.pi, "modes": 2})
    assert laplacian.eigenvalues == pytest.approx((1.0, 4.0))
    assert laplacian.unbounded
    bounded = spectrum_from_config({"type": "laplacian1d", "length": math.pi, "modes": 2, "tail": "none"})
    assert not bounded.unbounded
    tailed = spectrum_from_config({"type": "list", "values": [1], "tail": "power"})
    assert tailed.tail is Tail.POWER


@pytest.mark.parametrize("config", [
    {"type": "hermite"},
    {"type": "list"},
    {"type": "list", "values": [1], "tail": "exponential"},
    {"type": "grid", "min": 1, "max": 2},
    [1, 2, 3],
])
def test_spectrum_from_config_rejects(config):
    with pytest.raises(SpecError):
        spectrum_from_config(config)


def test_structural_constant_damping():
    constants = check_structural(make_spectrum([1, 4, 9]), Constant(1.0))
    assert constants == StructuralConstants(f_inf=1.0, L=1.0, ell=1.0, ell_unbounded=False)
    assert not constants.subdamped


def test_structural_power_damping():
    constants = check_structural(make_spectrum([1, 4]), Power(0.5, 0.5))
    assert constants.f_inf == 0.5
    assert constants.L == 0.5
    assert constants.ell == 0.5
    assert constants.subdamped


def test_structural_negative_damping_fails():
    with pytest.raises(StructError):
        check_structural(make_spectrum([1, 4, 9]), parse_damping("s - 2"))


def test_structural_kelvin_voigt_tail():
    constants = check_structural(laplacian_1d(math.pi, 3), Power(2.0, 1.0))
    assert constants.L == 2.0
    assert constants.ell_unbounded
    assert constants.ell == math.inf
    assert constants.to_dict()["ell"] is None
    assert not constants.subdamped


def test_structural_constant_damping_on_tail_stays_bounded():
    constants = check_structural(laplacian_1d(math.pi, 3), Constant(0.5))
    assert not constants.ell_unbounded
    assert constants.ell == 0.5


def test_expression_damping_on_tail_is_rejected():
    with pytest.raises(RejectedTailError):
        check_structural(laplacian_1d(math.pi, 3), parse_damping("s/2"))
