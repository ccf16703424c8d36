"""
Run Configuration, Simulation and Verification

Glue between the analysis modules and the CLI:

    load_config / config_from_dict   JSON run configuration -> RunConfig
    analyze_system                   DecayReport with regions attached
    simulate                         per-mode closed-form evolution -> Trajectory
    run_verify                       certificate: envelope bound plus lemma suite
    emit_report                      JSON or CSV output of any report

Author: Development Team
Created: 2026-10-17

Dependencies:
    - numpy: vectorized evolution over (time, mode) pairs
    - pandas: trajectory and mode tables
"""

# Standard library imports
import dataclasses
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

# Third-party imports
import numpy as np
import pandas as pd

# Local imports
from damping_dsl import DampingSpec, damping_from_config, eval_damping_many
from errors import ConfigError
from fractional import FractionalAnalysis
from lyapunov import DEFAULT_TRIALS, CertifiedBound, LemmaCheck, certified_constant, verify_lemma
from mode_analysis import CRITICAL_TIE_TOL, RESONANCE_TOL, DecayReport, analyze
from partition import REGIONS, PartitionParams, assign_regions, attach_regions, default_params
from propagator import envelope, scaled_entries
from spectrum import SpectrumSpec, check_structural, spectrum_from_config
from utils import get_thread_count, time_grid, write_csv, write_json

logger = logging.getLogger(__name__)

# =============================================================================
# CONFIGURATION
# =============================================================================

DEFAULT_T_MAX = 60.0
DEFAULT_N_POINTS = 2000
DEFAULT_SPACING = "log"
ENVELOPE_REL_SLACK = 1e-10
TOLERANCE_NAMES = ("resonance", "critical")
TRAJECTORY_COLUMNS = ["t", "E", "E0", "E1", "E2", "E3", "N"]
EXIT_PASS = 0
EXIT_USAGE = 1
EXIT_BOUND_VIOLATED = 2


@dataclass(frozen=True)
class RunConfig:
    spectrum: SpectrumSpec
    damping: DampingSpec
    t_max: float = DEFAULT_T_MAX
    n_points: int = DEFAULT_N_POINTS
    spacing: str = DEFAULT_SPACING
    seed: int = 0
    tolerances: Dict[str, float] = field(default_factory=dict)
    initial_data: Dict[str, Any] = field(default_factory=lambda: {"random_trials": DEFAULT_TRIALS})
    epsilon: Optional[float] = None
    K: Optional[float] = None

    def __post_init__(self):
        # time grid validation raises ConfigError on bad values
        time_grid(self.t_max, self.n_points, self.spacing)
        unknown = set(self.tolerances) - set(TOLERANCE_NAMES)
        if unknown:
            raise ConfigError(f"unknown tolerance names {sorted(unknown)}; expected {TOLERANCE_NAMES}")

    @property
    def times(self) -> np.ndarray:
        return time_grid(self.t_max, self.n_points, self.spacing)

    @property
    def resonance_tol(self) -> float:
        return float(self.tolerances.get("resonance", RESONANCE_TOL))

    @property
    def critical_tol(self) -> float:
        return float(self.tolerances.get("critical", CRITICAL_TIE_TOL))

    @property
    def n_trials(self) -> int:
        return int(self.initial_data.get("random_trials", DEFAULT_TRIALS))

    def with_overrides(self, **overrides) -> "RunConfig":
        """Copy with every non-None override applied (CLI flags win over the file)."""
        changes = {key: value for key, value in overrides.items() if value is not None}
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class Trajectory:
    """
    Solution sampled on a time grid.

    Attributes:
        times (np.ndarray): Shape (n_t,)
        u (np.ndarray): Spectral coefficients of u, shape (n_t, n_modes)
        v (np.ndarray): Spectral coefficients of u', shape (n_t, n_modes)
        regions (Tuple[int, ...]): Region of each mode
        E (np.ndarray): Total energy s u^2 + v^2 summed over modes
        E_by_region (np.ndarray): Energies of regions 0..3, shape (n_t, 4)
        N (np.ndarray): Semigroup norm envelope on the same grid
    """
    times: np.ndarray
    u: np.ndarray
    v: np.ndarray
    regions: Tuple[int, ...]
    E: np.ndarray
    E_by_region: np.ndarray
    N: np.ndarray

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame({"t": self.times, "E": self.E})
        for region in REGIONS:
            frame[f"E{region}"] = self.E_by_region[:, region]
        frame["N"] = self.N
        return frame[TRAJECTORY_COLUMNS]


@dataclass(frozen=True)
class VerifyResult:
    exit_code: int
    first_failure: Optional[str]
    certificate: Dict[str, Any]

    @property
    def passed(self) -> bool:
        return self.exit_code == EXIT_PASS


# =============================================================================
# CONFIG LOADING
# =============================================================================

def config_from_dict(data: Dict[str, Any]) -> RunConfig:
    """
    Build a RunConfig from parsed JSON.

    Raises:
        ConfigError: On missing keys or values of the wrong type
        SpecError, DampingError, ParseError: From the spectrum and damping entries
    """
    if not isinstance(data, dict):
        raise ConfigError(f"run configuration must be a JSON object, got {type(data).__name__}")
    for key in ("spectrum", "damping"):
        if key not in data:
            raise ConfigError(f"run configuration is missing {key!r}")

    grid = data.get("time_grid", {})
    initial = data.get("initial_data", {"random_trials": DEFAULT_TRIALS})
    if not isinstance(grid, dict) or not isinstance(initial, dict):
        raise ConfigError("time_grid and initial_data must be JSON objects")
    if "explicit" in initial and "random_trials" in initial:
        raise ConfigError("initial_data takes either 'explicit' or 'random_trials', not both")
    try:
        return RunConfig(
            spectrum=spectrum_from_config(data["spectrum"]),
            damping=damping_from_config(data["damping"]),
            t_max=float(grid.get("t_max", DEFAULT_T_MAX)),
            n_points=int(grid.get("n_points", DEFAULT_N_POINTS)),
            spacing=grid.get("spacing", DEFAULT_SPACING),
            seed=int(data.get("seed", 0)),
            tolerances=dict(data.get("tolerances", {})),
            initial_data=dict(initial),
            epsilon=None if data.get("epsilon") is None else float(data["epsilon"]),
            K=None if data.get("K") in (None, "auto") else float(data["K"]),
        )
    except (TypeError, ValueError) as e:
        raise ConfigError(f"malformed run configuration: {e}")


def load_config(path: str) -> RunConfig:
    """Read and validate a JSON run configuration file."""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e}")
    return config_from_dict(data)


def resolve_params(config: RunConfig) -> Tuple[PartitionParams, bool]:
    """Partition parameters from the config, filling gaps with the admissible defaults."""
    params, resonant = default_params(config.spectrum, config.damping)
    K = params.K if config.K is None else config.K
    epsilon = params.epsilon if config.epsilon is None else config.epsilon
    return PartitionParams(K, epsilon), resonant


# =============================================================================
# ANALYSIS AND SIMULATION
# =============================================================================

def analyze_system(config: RunConfig) -> DecayReport:
    """Spectral decay report with the region of every mode filled in."""
    report = analyze(config.spectrum, config.damping, config.resonance_tol, config.critical_tol)
    params, _ = resolve_params(config)
    return attach_regions(report, assign_regions(config.spectrum, config.damping, params))


def initial_state(config: RunConfig) -> Tuple[np.ndarray, np.ndarray]:
    """
    (u, v) coefficients at t = 0, one entry per mode.

    "explicit" lists [mode_index, u, v] triples (other modes start at rest);
    otherwise a single seeded uniform draw on [-1, 1] is used.

    Raises:
        ConfigError: On a mode index outside the spectrum or a malformed triple
    """
    n_modes = len(config.spectrum)
    explicit = config.initial_data.get("explicit")
    if explicit is None:
        rng = np.random.default_rng(config.seed)
        return rng.uniform(-1.0, 1.0, n_modes), rng.uniform(-1.0, 1.0, n_modes)

    u = np.zeros(n_modes)
    v = np.zeros(n_modes)
    for entry in explicit:
        try:
            index, u0, v0 = entry
            index = int(index)
        except (TypeError, ValueError):
            raise ConfigError(f"explicit initial data entries are [mode_index, u, v], got {entry!r}")
        if not 0 <= index < n_modes:
            raise ConfigError(f"mode index {index} outside 0..{n_modes - 1}")
        u[index] = float(u0)
        v[index] = float(v0)
    return u, v


def simulate(config: RunConfig) -> Trajectory:
    """
    Evolve every mode on the time grid with its exact propagator.

    Args:
        config (RunConfig): Spectrum, damping, grid and initial data

    Returns:
        Trajectory: States, total and per-region energies, and the envelope

    Raises:
        ConfigError: On malformed initial data
    """
    spec, f = config.spectrum, config.damping
    check_structural(spec, f)
    params, _ = resolve_params(config)
    regions = assign_regions(spec, f, params).regions
    times = config.times

    s = spec.as_array()
    f_s = eval_damping_many(f, spec.eigenvalues)
    root_s = np.sqrt(s)
    u0, v0 = initial_state(config)
    x0, y0 = root_s * u0, v0

    kappa, q11, q12, q21, q22 = scaled_entries(s[None, :], f_s[None, :], times[:, None])
    scale = np.exp(-kappa * times[:, None])
    x = scale * (q11 * x0 + q12 * y0)
    y = scale * (q21 * x0 + q22 * y0)

    mode_energy = x * x + y * y
    region_index = np.asarray(regions)
    E_by_region = np.stack(
        [mode_energy[:, region_index == region].sum(axis=1) for region in REGIONS], axis=1
    )
    N = envelope(spec, f, times)["N"].to_numpy()
    return Trajectory(
        times=times,
        u=x / root_s,
        v=y,
        regions=regions,
        E=mode_energy.sum(axis=1),
        E_by_region=E_by_region,
        N=N,
    )


# =============================================================================
# VERIFICATION
# =============================================================================

def _check_envelope(log_N: np.ndarray, log_bound: np.ndarray, times: np.ndarray) -> Dict[str, Any]:
    excess = log_N - log_bound
    worst = int(np.argmax(excess))
    return {
        "passed": bool(excess[worst] <= math.log1p(ENVELOPE_REL_SLACK)),
        "worst_log_excess": float(excess[worst]),
        "worst_t": float(times[worst]),
    }


def run_verify(config: RunConfig, constant_override: Optional[float] = None,
               threads: Optional[int] = None) -> VerifyResult:
    """
    Certify the decay bound of a system.

    Pipeline: analysis -> partition -> certified constant -> envelope check
    (and the sharp subdamped check when it applies) -> the four lemma
    checks, run concurrently on up to DECAYLAB_THREADS workers.

    Args:
        config (RunConfig): System, grid, seed and trial count
        constant_override (Optional[float]): Replaces C_norm (test hook)
        threads (Optional[int]): Worker count; DECAYLAB_THREADS when omitted

    Returns:
        VerifyResult: Exit code (0 pass, 2 violated), the first failing check
            and the JSON certificate
    """
    spec, f = config.spectrum, config.damping
    report = analyze_system(config)
    params, resonant = resolve_params(config)
    explicit_params = params if (config.K is not None or config.epsilon is not None) else None
    bound = certified_constant(spec, f, explicit_params)
    if constant_override is not None:
        if not constant_override > 0.0:
            raise ConfigError(f"constant override must be positive, got {constant_override!r}")
        bound = dataclasses.replace(bound, C_norm=float(constant_override),
                                    C_energy=float(constant_override) ** 2)

    times = config.times
    table = envelope(spec, f, times)
    log_N = table["log_N"].to_numpy()
    checks: List[Tuple[str, Dict[str, Any]]] = []
    checks.append(("envelope", _check_envelope(log_N, bound.log_bound(times), times)))
    if bound.sharp_subdamped_C is not None:
        sharp_log = math.log(bound.sharp_subdamped_C) - bound.rate_norm * times
        checks.append(("subdamped_sharp", _check_envelope(log_N, sharp_log, times)))

    workers = threads or get_thread_count()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(verify_lemma, spec, f, params, region, config.n_trials, times,
                        config.seed + region, report.m_star)
            for region in REGIONS
        ]
        lemmas: List[LemmaCheck] = [future.result() for future in futures]
    for lemma in lemmas:
        checks.append((f"lemma_{lemma.region}", {"passed": lemma.passed}))

    first_failure = next((name for name, check in checks if not check["passed"]), None)
    exit_code = EXIT_PASS if first_failure is None else EXIT_BOUND_VIOLATED
    certificate = {
        "passed": first_failure is None,
        "first_failure": first_failure,
        "seed": config.seed,
        "params": params.to_dict(),
        "resonant": resonant,
        "bound": bound.to_dict(),
        "checks": {name: check for name, check in checks if not name.startswith("lemma_")},
        "lemmas": [lemma.to_dict() for lemma in lemmas],
        "report": report.to_dict(),
    }
    logger.debug("verify finished with exit code %d", exit_code)
    return VerifyResult(exit_code, first_failure, certificate)


# =============================================================================
# OUTPUT
# =============================================================================

def report_to_frame(report: Any) -> pd.DataFrame:
    if isinstance(report, pd.DataFrame):
        return report
    if isinstance(report, Trajectory):
        return report.to_frame()
    if isinstance(report, DecayReport):
        rows = []
        for mode in report.modes:
            row = mode.to_dict()
            row["lambda_plus_re"], row["lambda_plus_im"] = row.pop("lambda_plus")
            row["lambda_minus_re"], row["lambda_minus_im"] = row.pop("lambda_minus")
            rows.append(row)
        return pd.DataFrame(rows)
    raise ConfigError(f"CSV output needs a tabular report, got {type(report).__name__}")


def report_to_dict(report: Any) -> Dict[str, Any]:
    if isinstance(report, dict):
        return report
    if isinstance(report, pd.DataFrame):
        return {"columns": list(report.columns), "rows": report.to_dict(orient="records")}
    if isinstance(report, Trajectory):
        return report_to_dict(report.to_frame())
    if isinstance(report, (DecayReport, FractionalAnalysis, CertifiedBound)):
        return report.to_dict()
    raise ConfigError(f"cannot serialize {type(report).__name__} as JSON")


def emit_report(report: Any, path: str, fmt: str = "json") -> None:
    """
    Write a report to path.

    Args:
        report: DecayReport, Trajectory, FractionalAnalysis, CertifiedBound,
            a certificate dict or an envelope DataFrame
        path (str): Output file
        fmt (str): "json" or "csv"

    Raises:
        ConfigError: On an unknown format or a report the format cannot hold
        OutputError: If the file cannot be written
    """
    if fmt == "json":
        write_json(report_to_dict(report), path)
    elif fmt == "csv":
        write_csv(report_to_frame(report), path)
    else:
        raise ConfigError(f"format must be 'json' or 'csv', got {fmt!r}")
    logger.debug("wrote %s report to %s", fmt, path)
