"""
Per-Mode Propagators and the Semigroup Norm Envelope

On one spectral mode the damped wave equation is the first order system

    d/dt (x, y) = M_s (x, y),    M_s = [[0, sqrt(s)], [-sqrt(s), -2 f_s]]

in energy coordinates (x, y) = (sqrt(s) u, u'), so that x^2 + y^2 is the
energy of the mode. With B = M_s + f_s I one has B^2 = (f_s^2 - s) I, hence

    exp(t M_s) = e^{-f_s t} (c(t) I + S(t) B)

with (c, S) = (cosh, sinh/rho), (cos, sin/omega) or a short series in
(f_s^2 - s) t^2 near the critical tie. Every propagator is kept as
P = e^{-kappa t} Q with kappa = phi(s) on overdamped modes and f_s otherwise,
so operator norms are also available in log space long after e^{-f_s t}
underflows.

expm_oracle computes the same exponential by Taylor series with scaling and
squaring and never looks at the discriminant. It exists to check the closed
forms.

Author: Development Team
Created: 2026-10-17

Dependencies:
    - numpy: broadcast evaluation over (time, mode) pairs
    - pandas: envelope table
"""

# Standard library imports
import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

# Third-party imports
import numpy as np
import pandas as pd

# Local imports
from damping_dsl import DampingSpec, eval_damping_many
from spectrum import SpectrumSpec

logger = logging.getLogger(__name__)

# =============================================================================
# CONFIGURATION
# =============================================================================

CRITICAL_TIE_TOL = 1e-12     # |f^2 - s| <= tol*max(1, s): exact double root
SERIES_SWITCH = 1e-2         # |f^2 - s| t^2 below this: series for (c, S)
SERIES_TERMS = 6
ORACLE_TAYLOR_ORDER = 16
ORACLE_SCALED_NORM = 0.5
ENVELOPE_COLUMNS = ["t", "N", "argmax_s"]


@dataclass(frozen=True)
class ModeMatrix:
    """Generator M_s of one mode in energy coordinates."""
    s: float
    f_s: float

    @property
    def entries(self) -> Tuple[float, float, float, float]:
        root_s = math.sqrt(self.s)
        return 0.0, root_s, -root_s, -2.0 * self.f_s

    @property
    def trace(self) -> float:
        return -2.0 * self.f_s

    @property
    def det(self) -> float:
        return self.s

    def as_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=float).reshape(2, 2)


@dataclass(frozen=True)
class Propagator2:
    """
    P_s(t) = exp(t M_s), stored as P = e^{-kappa t} Q.

    Attributes:
        q11, q12, q21, q22 (float): Entries of the scaled matrix Q
        kappa (float): Decay exponent pulled out of the entries
        t (float): Time
    """
    q11: float
    q12: float
    q21: float
    q22: float
    kappa: float
    t: float

    @property
    def scale(self) -> float:
        return math.exp(-self.kappa * self.t)

    @property
    def p11(self) -> float:
        return self.scale * self.q11

    @property
    def p12(self) -> float:
        return self.scale * self.q12

    @property
    def p21(self) -> float:
        return self.scale * self.q21

    @property
    def p22(self) -> float:
        return self.scale * self.q22

    @property
    def det(self) -> float:
        return self.scale ** 2 * (self.q11 * self.q22 - self.q12 * self.q21)

    def as_array(self) -> np.ndarray:
        return np.array([[self.p11, self.p12], [self.p21, self.p22]])

    def apply(self, x: float, y: float) -> Tuple[float, float]:
        """Image of the energy-coordinate state (x, y)."""
        return self.p11 * x + self.p12 * y, self.p21 * x + self.p22 * y


# =============================================================================
# CLOSED FORMS
# =============================================================================

def scaled_entries(s, f_s, t):
    """
    Closed-form exp(t M_s) as (kappa, Q11, Q12, Q21, Q22) with P = e^{-kappa t} Q.

    All arguments broadcast against each other (numpy semantics), so the
    same code serves a single mode, a spectrum at one time or a full
    (time, mode) grid.
    """
    s = np.asarray(s, dtype=float)
    f_s = np.asarray(f_s, dtype=float)
    t = np.asarray(t, dtype=float)
    root_s = np.sqrt(s)
    q = (f_s - root_s) * (f_s + root_s)
    qt2 = q * t * t

    tie = np.abs(q) <= CRITICAL_TIE_TOL * np.maximum(1.0, s)
    series = ~tie & (np.abs(qt2) < SERIES_SWITCH)
    over = ~tie & ~series & (q > 0.0)
    under = ~tie & ~series & (q < 0.0)

    rho = np.sqrt(np.where(q > 0.0, q, 0.0))
    omega = np.sqrt(np.where(q < 0.0, -q, 0.0))
    safe_rho = np.where(over, rho, 1.0)
    safe_omega = np.where(under, omega, 1.0)

    # series in q t^2: c = sum (qt^2)^k/(2k)!, S = t sum (qt^2)^k/(2k+1)!
    c_series = np.zeros(np.broadcast(s, f_s, t).shape)
    s_series = np.zeros_like(c_series)
    power = np.ones_like(c_series)
    for k in range(SERIES_TERMS):
        c_series = c_series + power / math.factorial(2 * k)
        s_series = s_series + power / math.factorial(2 * k + 1)
        power = power * qt2
    s_series = s_series * t

    with np.errstate(over="ignore", invalid="ignore"):
        decay = np.exp(-2.0 * safe_rho * t)
        c_over = 0.5 * (1.0 + decay)
        s_over = -np.expm1(-2.0 * safe_rho * t) / (2.0 * safe_rho)
        c_under = np.cos(safe_omega * t)
        s_under = np.sin(safe_omega * t) / safe_omega

    c = np.select([tie, series, over], [np.ones_like(c_series), c_series, c_over], c_under)
    S = np.select([tie, series, over], [t + np.zeros_like(c_series), s_series, s_over], s_under)

    phi = s / (f_s + rho)
    kappa = np.where(over, phi, f_s) + np.zeros_like(c)
    return kappa, c + S * f_s, S * root_s, -S * root_s, c - S * f_s


def propagate(s: float, f_s: float, t: float) -> Propagator2:
    """
    Exact propagator of one mode over time t.

    Args:
        s (float): Eigenvalue, s > 0
        f_s (float): Damping at s, f_s > 0
        t (float): Time, t >= 0

    Returns:
        Propagator2: exp(t M_s) in energy coordinates

    Example:
        >>> propagate(1.0, 1.0, 0.0).as_array()
        array([[1., 0.],
               [0., 1.]])
    """
    kappa, q11, q12, q21, q22 = scaled_entries(s, f_s, t)
    return Propagator2(float(q11), float(q12), float(q21), float(q22), float(kappa), float(t))


def sigma_max(a, b, c, d):
    """Largest singular value of [[a, b], [c, d]] in closed form (broadcasts)."""
    return 0.5 * (np.hypot(a + d, b - c) + np.hypot(a - d, b + c))


def log_mode_norm(s: float, f_s: float, t: float) -> float:
    """log ||exp(t M_s)||, finite even where the norm itself underflows."""
    kappa, q11, q12, q21, q22 = scaled_entries(s, f_s, t)
    return float(-kappa * t + np.log(sigma_max(q11, q12, q21, q22)))


def mode_norm(s: float, f_s: float, t: float) -> float:
    """Operator norm of one mode's propagator; 1.0 at t = 0, never above 1."""
    return math.exp(log_mode_norm(s, f_s, t))


# =============================================================================
# MATRIX-EXPONENTIAL ORACLE
# =============================================================================

def _matmul(x: Tuple[float, ...], y: Tuple[float, ...]) -> Tuple[float, ...]:
    return (
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    )


def expm_oracle(s: float, f_s: float, t: float) -> Propagator2:
    """
    exp(t M_s) by truncated Taylor series with scaling and squaring.

    tM is scaled by 2^-k until its infinity norm is at most 1/2, the Taylor
    sum of order 16 is taken, and the result is squared k times.
    """
    x = tuple(t * entry for entry in ModeMatrix(s, f_s).entries)
    norm = max(abs(x[0]) + abs(x[1]), abs(x[2]) + abs(x[3]))
    squarings = 0
    if norm > ORACLE_SCALED_NORM:
        squarings = int(math.ceil(math.log2(norm / ORACLE_SCALED_NORM)))
    x = tuple(entry / 2.0 ** squarings for entry in x)

    result = (1.0, 0.0, 0.0, 1.0)
    term = (1.0, 0.0, 0.0, 1.0)
    for k in range(1, ORACLE_TAYLOR_ORDER + 1):
        term = tuple(entry / k for entry in _matmul(term, x))
        result = tuple(r + e for r, e in zip(result, term))
    for _ in range(squarings):
        result = _matmul(result, result)
    return Propagator2(*result, kappa=0.0, t=float(t))


# =============================================================================
# ENVELOPE
# =============================================================================

def envelope(spec: SpectrumSpec, f: DampingSpec, times: Sequence[float]) -> pd.DataFrame:
    """
    Semigroup norm N(t) = sup over modes of the mode norm.

    The spectral decomposition is orthogonal, so ||S(t)|| is the largest
    per-mode norm. Ties go to the smallest eigenvalue.

    Args:
        spec (SpectrumSpec): Spectrum that passed the structural check
        f (DampingSpec): Damping
        times (Sequence[float]): Nonnegative ascending times

    Returns:
        pd.DataFrame: Columns t, N, argmax_s and log_N (log of N, finite
            even where N underflows)
    """
    times = np.asarray(times, dtype=float)
    s = spec.as_array()
    f_s = eval_damping_many(f, spec.eigenvalues)

    kappa, q11, q12, q21, q22 = scaled_entries(s[None, :], f_s[None, :], times[:, None])
    log_norms = -kappa * times[:, None] + np.log(sigma_max(q11, q12, q21, q22))
    best = np.argmax(log_norms, axis=1)
    log_N = log_norms[np.arange(len(times)), best]

    logger.debug("envelope over %d times x %d modes", len(times), len(s))
    return pd.DataFrame({
        "t": times,
        "N": np.exp(log_N),
        "argmax_s": s[best],
        "log_N": log_N,
    })


def fit_decay_rate(times: Sequence[float], log_N: Sequence[float], tail_fraction: float = 0.5) -> float:
    """
    Least-squares decay rate from the last tail_fraction of an envelope.

    Returns:
        float: -slope of log N against t
    """
    times = np.asarray(times, dtype=float)
    log_N = np.asarray(log_N, dtype=float)
    start = int(len(times) * (1.0 - tail_fraction))
    start = min(start, len(times) - 2)
    slope, _ = np.polyfit(times[start:], log_N[start:], 1)
    return float(-slope)
