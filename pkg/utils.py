"""
Shared Utility Functions for decaylab

Common helpers used by the CLI and the simulation layer: logging setup and
the [component][step] status line, environment configuration, time grids
and report output (JSON and CSV).

Author: Development Team
Created: 2025-01-27
Modified: 2026-10-17

Dependencies:
    - pandas: CSV output formatting
    - numpy: time grids
    - python-dotenv: environment variables from .env
"""

# Standard library imports
import json
import logging
import os
from typing import Any, Dict

# Third-party imports
import numpy as np
import pandas as pd
from dotenv import load_dotenv

# Local imports
from errors import ConfigError, OutputError

# Load environment variables
load_dotenv()

# =============================================================================
# CONFIGURATION
# =============================================================================

LOG_FORMAT = '[%(asctime)s] [%(levelname)s] %(message)s'
LOG_DATEFMT = '%H:%M:%S'
DEFAULT_THREADS = 1
LOG_GRID_FLOOR = 1e-4          # first nonzero point of a log grid, relative to t_max
CSV_FLOAT_FORMAT = '%.17g'
TIME_SPACINGS = ("linear", "log")


# =============================================================================
# LOGGING
# =============================================================================

def get_log_level(verbose: bool = False) -> int:
    """
    Log level from DECAYLAB_LOG_LEVEL (default INFO); verbose forces DEBUG.

    Raises:
        ConfigError: If the variable names no logging level
    """
    if verbose:
        return logging.DEBUG
    name = os.getenv('DECAYLAB_LOG_LEVEL', 'INFO').strip().upper()
    level = logging.getLevelName(name)
    if not isinstance(level, int):
        raise ConfigError(f"DECAYLAB_LOG_LEVEL={name!r} is not a logging level")
    return level


def setup_logging(verbose: bool = False) -> None:
    """Configure the root logger once for a CLI run."""
    logging.basicConfig(
        level=get_log_level(verbose),
        format=LOG_FORMAT,
        datefmt=LOG_DATEFMT,
        force=True,
    )


def log_status(component, step, message, level='info'):
    prefix = f"[{component}][{step}]"
    if level == 'error':
        logging.error(f"{prefix} {message}")
    elif level == 'warning':
        logging.warning(f"{prefix} {message}")
    else:
        logging.info(f"{prefix} {message}")


# =============================================================================
# ENVIRONMENT
# =============================================================================

def get_thread_count() -> int:
    """
    Worker count for concurrent lemma checks, from DECAYLAB_THREADS.

    Returns:
        int: At least 1 (sequential)

    Raises:
        ConfigError: If the variable is not a positive integer
    """
    raw = os.getenv('DECAYLAB_THREADS', str(DEFAULT_THREADS)).strip()
    try:
        threads = int(raw)
    except ValueError:
        raise ConfigError(f"DECAYLAB_THREADS must be a positive integer, got {raw!r}")
    if threads < 1:
        raise ConfigError(f"DECAYLAB_THREADS must be a positive integer, got {raw!r}")
    return threads


# =============================================================================
# TIME GRIDS
# =============================================================================

def time_grid(t_max: float, n_points: int, spacing: str = "log") -> np.ndarray:
    """
    Ascending time grid on [0, t_max].

    Args:
        t_max (float): Last time, t_max > 0
        n_points (int): Number of points, at least 2
        spacing (str): "linear", or "log" (0 followed by geometric spacing
            from 1e-4 * t_max)

    Returns:
        np.ndarray: n_points times starting at 0 and ending at t_max

    Raises:
        ConfigError: On a nonpositive t_max, fewer than 2 points or an
            unknown spacing

    Example:
        >>> time_grid(2.0, 3, "linear")
        array([0., 1., 2.])
    """
    if not (np.isfinite(t_max) and t_max > 0.0):
        raise ConfigError(f"t_max must be positive, got {t_max!r}")
    if int(n_points) != n_points or n_points < 2:
        raise ConfigError(f"n_points must be an integer >= 2, got {n_points!r}")
    n_points = int(n_points)
    if spacing == "linear":
        return np.linspace(0.0, t_max, n_points)
    if spacing == "log":
        tail = np.geomspace(LOG_GRID_FLOOR * t_max, t_max, n_points - 1)
        return np.concatenate(([0.0], tail))
    raise ConfigError(f"spacing must be one of {TIME_SPACINGS}, got {spacing!r}")


# =============================================================================
# FILE OUTPUT
# =============================================================================

def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)


def write_json(data: Dict[str, Any], path: str) -> None:
    """
    Write a report dictionary as indented JSON.

    Floats are written with Python's shortest round-trip repr, so reading
    the file back gives the in-memory values exactly.

    Raises:
        OutputError: If the file cannot be written
    """
    try:
        _ensure_parent(path)
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(data, f, indent=2, allow_nan=False)
            f.write("\n")
    except (OSError, ValueError) as e:
        raise OutputError(path, str(e))


def write_csv(df: pd.DataFrame, path: str) -> None:
    """
    Write a table as CSV with 17 significant digits per float.

    Raises:
        OutputError: If the file cannot be written
    """
    try:
        _ensure_parent(path)
        df.to_csv(path, index=False, encoding='utf-8', float_format=CSV_FLOAT_FORMAT)
    except OSError as e:
        raise OutputError(path, str(e))
