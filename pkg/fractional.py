"""
Fractional Damping f(s) = a * s^theta

Closed-form case analysis of the family f(s) = a s^theta, 0 <= theta <= 1.
The mode with f(s) = sqrt(s) sits at the critical point

    s_c = a^{2/(1 - 2 theta)}      (theta != 1/2)

and the shape of phi around it decides m*, resonance and the subdamped
constant:

    theta in [0, 1/2)   phi increasing; m* = phi(s0)
    theta = 1/2         ratio f/sqrt(s) = a everywhere; resonant iff a = 1
    theta in (1/2, 1)   phi rises to s_c, dips to a minimum at s_m, then
                        diverges; phi returns to phi(s_c) at s_b > s_c
    theta = 1           phi peaks at 1/a (s = 1/a^2) and tends to 1/(2a)

With s = s_c x the dip no longer depends on a: phi(s) = sqrt(s_c) psi(x), and
s_m / s_c, s_b / s_c are functions of theta alone. Everything is computed in
log s, so s_c and s_b may lie far outside the float range; such values are
reported as 0 or inf next to their finite logarithms.

Author: Development Team
Created: 2026-10-17

Dependencies:
    - scipy: brentq for the s_b root find
"""

# Standard library imports
import logging
import math
import sys
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

# Third-party imports
from scipy.optimize import brentq

# Local imports
from errors import BracketError, DomainError
from mode_analysis import RESONANCE_TOL, phi
from spectrum import SpectrumSpec

logger = logging.getLogger(__name__)

# =============================================================================
# CONFIGURATION
# =============================================================================

ROOT_REL_TOL = 1e-14
LOG_FLOAT_MAX = math.log(sys.float_info.max)
LN2 = math.log(2.0)


@dataclass(frozen=True)
class FractionalAnalysis:
    a: float
    theta: float
    s0: float
    sM: Optional[float]
    m_star: float
    resonant: bool
    s_m: Optional[float]
    s_b: Optional[float]
    subdamped_C: Optional[float]
    critical_point: Optional[float]
    phi_at_s_m: Optional[float] = None
    log_critical_point: Optional[float] = None
    log_s_b: Optional[float] = None

    @property
    def subdamped(self) -> bool:
        return self.subdamped_C is not None

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready dict; values beyond the float range become None."""
        result = {key: (None if isinstance(value, float) and not math.isfinite(value) else value)
                  for key, value in asdict(self).items()}
        result["subdamped"] = self.subdamped
        return result


def _exp(x: float) -> float:
    """e^x, inf past the float range."""
    return math.inf if x > LOG_FLOAT_MAX else math.exp(x)


def log_critical_point(a: float, theta: float) -> float:
    """log s_c = 2 log(a) / (1 - 2 theta)."""
    if theta == 0.5:
        raise DomainError("the critical point is not defined for theta = 1/2")
    return 2.0 * math.log(a) / (1.0 - 2.0 * theta)


def critical_point(a: float, theta: float) -> float:
    """s with a s^theta = sqrt(s); undefined at theta = 1/2."""
    return _exp(log_critical_point(a, theta))


def _check_domain(a: float, theta: float) -> None:
    if not (math.isfinite(theta) and 0.0 <= theta <= 1.0):
        raise DomainError(f"theta must lie in [0, 1], got {theta!r}")
    if not (math.isfinite(a) and a > 0.0):
        raise DomainError(f"a must be positive, got {a!r}")


def _check_dip(a: float, theta: float, name: str) -> None:
    if not 0.5 < theta < 1.0:
        raise DomainError(f"{name} exists only for 1/2 < theta < 1, got {theta!r}")
    _check_domain(a, theta)


def _phi_power(a: float, theta: float, s: float) -> float:
    return phi(s, a * s ** theta)


def _touches(a: float, theta: float, s: float) -> bool:
    """f(s) = sqrt(s) within the resonance tolerance."""
    root_s = math.sqrt(s)
    return abs(a * s ** theta - root_s) <= RESONANCE_TOL * root_s


# =============================================================================
# THE DIP FOR 1/2 < THETA < 1
# =============================================================================

def _log_cosh(z: float) -> float:
    if z < 1.0:
        return math.log1p(2.0 * math.sinh(0.5 * z) ** 2)
    return z + math.log1p(math.exp(-2.0 * z)) - LN2


def log_s_b_ratio(theta: float) -> float:
    """
    log(s_b / s_c), a function of theta alone.

    h(s) = s - 2 a^{(2-2theta)/(1-2theta)} s^theta + s_c equals
    s_c (x - 2 x^theta + 1) with x = s / s_c. Writing x = e^{2z}, the root
    x > 1 solves log cosh z = (2 theta - 1) z. The left side minus the right
    is convex, negative at z = atanh(2 theta - 1) and positive at
    4 log 2 / (2 - 2 theta), which brackets the root.

    Args:
        theta (float): Exponent in (1/2, 1)

    Returns:
        float: log(s_b / s_c) > 0

    Raises:
        DomainError: If theta is outside (1/2, 1)
        BracketError: If the bracket does not change sign
    """
    _check_dip(1.0, theta, "s_b")
    c = 2.0 * theta - 1.0

    def gap(z: float) -> float:
        return _log_cosh(z) - c * z

    low = math.atanh(c)
    high = 4.0 * LN2 / (1.0 - c)
    if not (gap(low) < 0.0 < gap(high)):
        raise BracketError(f"no sign change in [{low!r}, {high!r}] for theta={theta!r}")
    z = brentq(gap, low, high, xtol=1e-300, rtol=ROOT_REL_TOL, maxiter=500)
    return 2.0 * z


def log_s_m_ratio(theta: float) -> float:
    """log(s_m / s_c) = -log(1 - c^2) / c with c = 2 theta - 1."""
    _check_dip(1.0, theta, "s_m")
    c = 2.0 * theta - 1.0
    return -math.log1p(-c * c) / c


def find_s_b(a: float, theta: float) -> float:
    """
    Larger root of h(s) = s - 2 a^{(2-2theta)/(1-2theta)} s^theta + a^{2/(1-2theta)}.

    Args:
        a (float): Damping amplitude
        theta (float): Exponent in (1/2, 1)

    Returns:
        float: s_b > s_c, inf when it lies beyond the float range

    Raises:
        DomainError: If theta is outside (1/2, 1)

    Example:
        >>> round(find_s_b(1.0, 0.75), 4)
        11.4445
    """
    _check_dip(a, theta, "s_b")
    return _exp(log_critical_point(a, theta) + log_s_b_ratio(theta))


def find_s_m(a: float, theta: float) -> float:
    """Minimizer of phi on (s_c, inf) for theta in (1/2, 1)."""
    _check_dip(a, theta, "s_m")
    return _exp(log_critical_point(a, theta) + log_s_m_ratio(theta))


def _log_phi_at_s_m(a: float, theta: float) -> float:
    # psi(x_m) = x_m^{1 - theta} / (1 + c)
    c = 2.0 * theta - 1.0
    return (0.5 * log_critical_point(a, theta)
            + (1.0 - theta) * log_s_m_ratio(theta) - math.log1p(c))


# =============================================================================
# CASE ANALYSIS
# =============================================================================

def _subdamped_C(ell: float) -> Optional[float]:
    return math.sqrt((1.0 + ell) / (1.0 - ell)) if ell < 1.0 else None


def analyze_fractional(a: float, theta: float, spec: SpectrumSpec) -> FractionalAnalysis:
    """
    m*, resonance and the subdamped constant of f(s) = a s^theta on a spectrum.

    Args:
        a (float): Damping amplitude, a > 0
        theta (float): Exponent in [0, 1]
        spec (SpectrumSpec): Spectrum; its tail counts as unbounded

    Returns:
        FractionalAnalysis: Case results, plus s_m and s_b for theta in (1/2, 1)

    Raises:
        DomainError: If theta is outside [0, 1] or a <= 0

    Example:
        >>> analyze_fractional(0.5, 0.5, make_spectrum([1, 4, 9])).subdamped_C
        1.7320508075688772
    """
    _check_domain(a, theta)
    s0 = spec.s0
    sM = None if spec.unbounded else spec.s_max
    s_m = s_b = phi_at_s_m = log_s_c = log_s_b = None

    if theta < 0.5:
        log_s_c = log_critical_point(a, theta)
        m_star = _phi_power(a, theta, s0)
        resonant = _touches(a, theta, s0)
        gap = s0 ** (0.5 - theta)
        subdamped_C = None
        # s0 > s_c exactly when a < s0^{1/2 - theta}
        if not resonant and gap > a:
            subdamped_C = math.sqrt((gap + a) / (gap - a))
    elif theta == 0.5:
        m_star = _phi_power(a, theta, s0)
        resonant = abs(a - 1.0) <= RESONANCE_TOL
        subdamped_C = _subdamped_C(a) if not resonant else None
    elif theta < 1.0:
        log_s_c = log_critical_point(a, theta)
        log_s_b = log_s_c + log_s_b_ratio(theta)
        s_m = find_s_m(a, theta)
        s_b = _exp(log_s_b)
        phi_at_s_m = _exp(_log_phi_at_s_m(a, theta))
        m_star = min(_phi_power(a, theta, s) for s in spec.eigenvalues)
        inside_dip = any(log_s_c + RESONANCE_TOL < math.log(s) < log_s_b - RESONANCE_TOL
                         for s in spec.eigenvalues[1:])
        resonant = _touches(a, theta, s0) and not inside_dip
        subdamped_C = None if sM is None else _subdamped_C(a * sM ** (theta - 0.5))
    else:
        log_s_c = log_critical_point(a, theta)
        if sM is None:
            m_star = min(a * s0, 1.0 / (2.0 * a))
        else:
            m_star = min(a * s0, _phi_power(a, theta, sM))
        resonant = len(spec) == 1 and sM is not None and _touches(a, theta, s0)
        subdamped_C = None if sM is None else _subdamped_C(a * math.sqrt(sM))

    logger.debug("fractional a=%r theta=%r: m*=%r resonant=%s", a, theta, m_star, resonant)
    return FractionalAnalysis(
        a=a,
        theta=theta,
        s0=s0,
        sM=sM,
        m_star=m_star,
        resonant=resonant,
        s_m=s_m,
        s_b=s_b,
        subdamped_C=subdamped_C,
        critical_point=None if log_s_c is None else _exp(log_s_c),
        phi_at_s_m=phi_at_s_m,
        log_critical_point=log_s_c,
        log_s_b=log_s_b,
    )
