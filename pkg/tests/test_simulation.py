import json
import math
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from damping_dsl import Constant, Power
from errors import ConfigError, OutputError
from fractional import analyze_fractional
from propagator import expm_oracle
from simulation import (
    EXIT_BOUND_VIOLATED,
    EXIT_PASS,
    TRAJECTORY_COLUMNS,
    RunConfig,
    analyze_system,
    config_from_dict,
    emit_report,
    initial_state,
    load_config,
    report_to_dict,
    run_verify,
    simulate,
)
from spectrum import make_spectrum

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def pendulum(t_max=2.0, n_points=3, explicit=None):
    return RunConfig(
        spectrum=make_spectrum([1.0]),
        damping=Constant(1.0),
        t_max=t_max,
        n_points=n_points,
        spacing="linear",
        initial_data={"explicit": [[0, 1.0, 0.0]] if explicit is None else explicit},
    )


# =============================================================================
# CONFIG
# =============================================================================

def test_config_from_dict_defaults():
    config = config_from_dict({"spectrum": {"type": "list", "values": [1, 4]}, "damping": "0.5"})
    assert config.spectrum.eigenvalues == (1.0, 4.0)
    assert config.t_max == 60.0
    assert config.n_points == 2000
    assert config.spacing == "log"
    assert config.seed == 0
    assert config.n_trials == 1000
    assert config.resonance_tol == 1e-9
    assert config.times[0] == 0.0 and config.times[-1] == 60.0


def test_config_overrides():
    config = config_from_dict({
        "spectrum": {"type": "list", "values": [1]},
        "damping": {"type": "constant", "a": 1},
        "tolerances": {"resonance": 1e-6},
        "K": "auto",
    })
    assert config.K is None
    assert config.resonance_tol == 1e-6
    changed = config.with_overrides(seed=4, t_max=None, epsilon=0.01)
    assert changed.seed == 4
    assert changed.t_max == config.t_max
    assert changed.epsilon == 0.01


@pytest.mark.parametrize("data", [
    {"damping": "1"},
    {"spectrum": {"type": "list", "values": [1]}},
    {"spectrum": {"type": "list", "values": [1]}, "damping": "1", "time_grid": {"t_max": -1}},
    {"spectrum": {"type": "list", "values": [1]}, "damping": "1", "time_grid": {"n_points": 1}},
    {"spectrum": {"type": "list", "values": [1]}, "damping": "1", "time_grid": {"spacing": "cubic"}},
    {"spectrum": {"type": "list", "values": [1]}, "damping": "1", "tolerances": {"bogus": 1}},
    {"spectrum": {"type": "list", "values": [1]}, "damping": "1",
     "initial_data": {"explicit": [], "random_trials": 3}},
    {"spectrum": {"type": "list", "values": [1]}, "damping": "1", "seed": "seven"},
    [1, 2],
])
def test_config_errors(data):
    with pytest.raises(ConfigError):
        config_from_dict(data)


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.json"))
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(str(broken))


@pytest.mark.parametrize("name", sorted(p.name for p in CONFIG_DIR.glob("*.json")))
def test_shipped_configs_load(name):
    config = load_config(str(CONFIG_DIR / name))
    assert len(config.spectrum) >= 1


def test_explicit_initial_data():
    u, v = initial_state(pendulum(explicit=[[0, 0.25, -2.0]]))
    assert u.tolist() == [0.25]
    assert v.tolist() == [-2.0]
    with pytest.raises(ConfigError):
        initial_state(pendulum(explicit=[[1, 0.0, 1.0]]))
    with pytest.raises(ConfigError):
        initial_state(pendulum(explicit=[[0, 1.0]]))


# =============================================================================
# SIMULATION
# =============================================================================

def test_pendulum_energy():
    trajectory = simulate(pendulum())
    t = trajectory.times
    assert t.tolist() == [0.0, 1.0, 2.0]
    expected = (1.0 + 2.0 * t + 2.0 * t * t) * np.exp(-2.0 * t)
    np.testing.assert_allclose(trajectory.E, expected, rtol=1e-12)
    assert trajectory.E[1] == pytest.approx(5.0 * math.exp(-2.0), rel=1e-12)
    # the critically damped mode sits in the near-critical region
    assert trajectory.regions == (3,)
    np.testing.assert_array_equal(trajectory.E_by_region[:, 3], trajectory.E)
    np.testing.assert_allclose(trajectory.N, (t + np.sqrt(1 + t * t)) * np.exp(-t), rtol=1e-10)


def test_zero_data_stays_at_rest():
    trajectory = simulate(pendulum(explicit=[]))
    assert np.all(trajectory.E == 0.0)


def test_underdamped_mode_matches_oracle():
    config = RunConfig(
        spectrum=make_spectrum([2.0]),
        damping=Constant(0.5),
        t_max=10.0,
        n_points=11,
        spacing="linear",
        initial_data={"explicit": [[0, 0.3, -0.4]]},
    )
    trajectory = simulate(config)
    x0 = math.sqrt(2.0) * 0.3
    for t, energy in zip(trajectory.times, trajectory.E):
        x, y = expm_oracle(2.0, 0.5, t).apply(x0, -0.4)
        assert energy == pytest.approx(x * x + y * y, abs=1e-10)


def test_energy_is_nonincreasing_and_additive():
    config = RunConfig(
        spectrum=make_spectrum([0.25, 1.0, 4.0, 100.0]),
        damping=Power(1.0, 1.0),
        t_max=20.0,
        n_points=400,
        seed=3,
    )
    trajectory = simulate(config)
    E = trajectory.E
    assert np.all(np.diff(E) <= 1e-12 * E[0])
    np.testing.assert_allclose(trajectory.E_by_region.sum(axis=1), E, rtol=1e-12, atol=0.0)


def test_simulation_is_deterministic():
    config = load_config(str(CONFIG_DIR / "subdamped_pendulum.json"))
    first = simulate(config)
    second = simulate(config)
    np.testing.assert_array_equal(first.E, second.E)
    np.testing.assert_array_equal(first.u, second.u)


def test_analyze_system_attaches_regions():
    report = analyze_system(load_config(str(CONFIG_DIR / "kelvin_voigt_string.json")))
    assert [mode.region for mode in report.modes] == [0, 0, 0]
    assert report.m_star == pytest.approx(0.500000125, rel=1e-12)


# =============================================================================
# OUTPUT
# =============================================================================

def test_trajectory_csv(tmp_path):
    trajectory = simulate(pendulum())
    path = tmp_path / "out" / "trajectory.csv"
    emit_report(trajectory, str(path), "csv")
    assert path.read_text(encoding="utf-8").splitlines()[0] == ",".join(TRAJECTORY_COLUMNS)
    table = pd.read_csv(path, float_precision="round_trip")
    np.testing.assert_array_equal(table["E"].to_numpy(), trajectory.E)


def test_json_report_reads_back_equal(tmp_path):
    report = analyze_system(load_config(str(CONFIG_DIR / "subdamped_pendulum.json")))
    path = tmp_path / "report.json"
    emit_report(report, str(path), "json")
    assert json.loads(path.read_text(encoding="utf-8")) == report_to_dict(report)


def test_fractional_report_json(tmp_path):
    analysis = analyze_fractional(0.5, 0.5, make_spectrum([1.0, 4.0, 9.0]))
    path = tmp_path / "fractional.json"
    emit_report(analysis, str(path))
    assert json.loads(path.read_text(encoding="utf-8"))["subdamped"] is True
    with pytest.raises(ConfigError):
        emit_report(analysis, str(tmp_path / "fractional.csv"), "csv")


def test_unwritable_path_names_the_path(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("", encoding="utf-8")
    target = str(blocker / "report.json")
    with pytest.raises(OutputError) as info:
        emit_report(simulate(pendulum()), target, "json")
    assert info.value.path == target
    assert target in str(info.value)


def test_unknown_format(tmp_path):
    with pytest.raises(ConfigError):
        emit_report(simulate(pendulum()), str(tmp_path / "x.xml"), "xml")


# =============================================================================
# VERIFICATION
# =============================================================================

def test_verify_subdamped_reports_sharp_constant():
    result = run_verify(load_config(str(CONFIG_DIR / "subdamped_pendulum.json")))
    assert result.exit_code == EXIT_PASS
    assert result.passed
    certificate = result.certificate
    assert certificate["bound"]["sharp_subdamped_C"] == pytest.approx(math.sqrt(3.0))
    assert certificate["checks"]["subdamped_sharp"]["passed"]
    assert certificate["bound"]["poly_factor"] == 0
    lemmas = {lemma["region"]: lemma for lemma in certificate["lemmas"]}
    assert not lemmas[1]["vacuous"]
    assert lemmas[0]["vacuous"] and lemmas[2]["vacuous"] and lemmas[3]["vacuous"]


def test_verify_resonant_pendulum():
    result = run_verify(load_config(str(CONFIG_DIR / "resonant_pendulum.json")))
    assert result.exit_code == EXIT_PASS
    assert result.certificate["resonant"]
    assert result.certificate["bound"]["poly_factor"] == 1
    assert result.certificate["params"]["epsilon"] == 1.0 / 32.0


def test_verify_kelvin_voigt_has_nonvacuous_region_0():
    result = run_verify(load_config(str(CONFIG_DIR / "kelvin_voigt_string.json")))
    assert result.passed
    assert result.certificate["lemmas"][0]["n_modes"] == 3


def test_corrupted_constant_fails():
    result = run_verify(load_config(str(CONFIG_DIR / "resonant_pendulum.json")), constant_override=0.5)
    assert result.exit_code == EXIT_BOUND_VIOLATED
    assert result.first_failure == "envelope"
    assert not result.certificate["passed"]


def test_verify_output_is_deterministic():
    config = load_config(str(CONFIG_DIR / "subdamped_pendulum.json")).with_overrides(n_points=200)
    first = run_verify(config, threads=1).certificate
    second = run_verify(config, threads=4).certificate
    assert json.dumps(first, allow_nan=False) == json.dumps(second, allow_nan=False)
