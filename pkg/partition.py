"""
Spectral Partition and Admissible Parameters

Splits sigma(A) by the ratio f(s)/sqrt(s) into four disjoint regions

    region 0:  ratio > K                   (strongly overdamped)
    region 1:  ratio <= 1 - eps            (underdamped)
    region 2:  1 + eps <= ratio <= K       (moderately overdamped)
    region 3:  1 - eps < ratio < 1 + eps   (near critical)

and picks the pair (K, eps) the decay lemmas need: K from the doubling
sequence 2, 4, 8, ... and eps by bisection on (0, 1/16).

Author: Development Team
Created: 2026-10-17

Dependencies:
    - numpy: vectorized ratios
"""

# Standard library imports
import dataclasses
import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

# Third-party imports
import numpy as np

# Local imports
from damping_dsl import DampingSpec, eval_damping_many
from errors import DomainError, ResonantInputError
from mode_analysis import DecayReport, compute_m_star, detect_resonance, phi_array
from spectrum import SpectrumSpec, check_structural

logger = logging.getLogger(__name__)

# =============================================================================
# CONFIGURATION
# =============================================================================

REGIONS = (0, 1, 2, 3)
K_START = 2.0
K_LIMIT = 2.0 ** 200
EPSILON_CEILING = 1.0 / 16.0
EPSILON_BISECTION_STEPS = 40
RESONANT_EPS_STAR = 1.0 / 32.0   # fixed eps* used when the system is resonant


@dataclass(frozen=True)
class PartitionParams:
    K: float
    epsilon: float

    def __post_init__(self):
        if not (math.isfinite(self.K) and self.K >= 2.0):
            raise DomainError(f"K must be at least 2, got {self.K!r}")
        if not (0.0 < self.epsilon < 1.0):
            raise DomainError(f"epsilon must lie in (0, 1), got {self.epsilon!r}")

    def to_dict(self) -> Dict[str, float]:
        return {"K": self.K, "epsilon": self.epsilon}


@dataclass(frozen=True)
class RegionAssignment:
    eigenvalues: Tuple[float, ...]
    regions: Tuple[int, ...]
    params: PartitionParams

    def members(self, region: int) -> Tuple[int, ...]:
        """Indices of the eigenvalues in one region."""
        return tuple(i for i, r in enumerate(self.regions) if r == region)

    def counts(self) -> Dict[int, int]:
        return {region: len(self.members(region)) for region in REGIONS}


# =============================================================================
# REGIONS
# =============================================================================

def region_of_ratio(ratio: float, params: PartitionParams) -> int:
    """Region index of a mode with f(s)/sqrt(s) = ratio. Boundaries as in the module docstring."""
    if ratio > params.K:
        return 0
    if ratio <= 1.0 - params.epsilon:
        return 1
    if ratio >= 1.0 + params.epsilon:
        return 2
    return 3


def damping_ratios(spec: SpectrumSpec, f: DampingSpec) -> np.ndarray:
    return eval_damping_many(f, spec.eigenvalues) / np.sqrt(spec.as_array())


def assign_regions(spec: SpectrumSpec, f: DampingSpec, params: PartitionParams) -> RegionAssignment:
    """
    Classify every eigenvalue into region 0, 1, 2 or 3.

    Example:
        >>> assign_regions(make_spectrum([1, 4, 9]), Constant(0.5), PartitionParams(2, 0.25)).regions
        (1, 1, 1)
    """
    regions = tuple(region_of_ratio(float(r), params) for r in damping_ratios(spec, f))
    return RegionAssignment(spec.eigenvalues, regions, params)


def attach_regions(report: DecayReport, assignment: RegionAssignment) -> DecayReport:
    """Copy of report whose mode records carry their region index."""
    modes = [dataclasses.replace(mode, region=region)
             for mode, region in zip(report.modes, assignment.regions)]
    return dataclasses.replace(report, modes=modes)


# =============================================================================
# ADMISSIBLE PARAMETERS
# =============================================================================

def k_conditions_hold(K: float, L: float, m_star: float) -> bool:
    """K >= L^2, K sqrt(K) - m*/2 >= m* and K >= 20 m*^2."""
    return (
        K >= L * L
        and K * math.sqrt(K) - m_star / 2.0 >= m_star
        and K >= 20.0 * m_star * m_star
    )


def smallest_admissible_K(L: float, m_star: float) -> float:
    K = K_START
    while not k_conditions_hold(K, L, m_star):
        K *= 2.0
        if K > K_LIMIT:
            raise DomainError(f"no admissible K for L={L!r}, m*={m_star!r}")
    return K


def admissible_K(spec: SpectrumSpec, f: DampingSpec) -> float:
    """
    Smallest K in 2, 4, 8, ... meeting the three conditions of the
    strongly overdamped decay estimate.

    Example:
        >>> smallest_admissible_K(L=1.0, m_star=0.5)
        8.0
    """
    structural = check_structural(spec, f)
    return smallest_admissible_K(structural.L, compute_m_star(spec, f))


def m3(spec: SpectrumSpec, f: DampingSpec, epsilon: float) -> float:
    """min phi over the near-critical band (1 - eps, 1 + eps); +inf when it is empty."""
    s = spec.as_array()
    f_s = eval_damping_many(f, spec.eigenvalues)
    ratios = f_s / np.sqrt(s)
    band = (ratios > 1.0 - epsilon) & (ratios < 1.0 + epsilon)
    if not band.any():
        return math.inf
    return float(np.min(phi_array(s[band], f_s[band])))


def admissible_epsilon(spec: SpectrumSpec, f: DampingSpec,
                       m_star: Optional[float] = None) -> Optional[float]:
    """
    Largest eps in (0, 1/16) with m3(eps) (1 - 4 sqrt(eps)) >= m*.

    The test is monotone in eps, so the answer is the largest float below
    1/16 when that passes and otherwise the passing end of a 40-step
    bisection.

    Args:
        spec (SpectrumSpec): Spectrum
        f (DampingSpec): Damping
        m_star (Optional[float]): Precomputed m*

    Returns:
        Optional[float]: The admissible eps, or None when no eps > 0 on the
            bisection grid passes

    Raises:
        ResonantInputError: If the system is resonant
    """
    if m_star is None:
        m_star = compute_m_star(spec, f)
    resonant, s_star = detect_resonance(spec, f, m_star=m_star)
    if resonant:
        raise ResonantInputError(f"system is resonant at s*={s_star!r}; no admissible epsilon")

    def passes(epsilon: float) -> bool:
        return m3(spec, f, epsilon) * (1.0 - 4.0 * math.sqrt(epsilon)) >= m_star

    ceiling = math.nextafter(EPSILON_CEILING, 0.0)
    if passes(ceiling):
        return ceiling

    low, high = 0.0, ceiling
    for _ in range(EPSILON_BISECTION_STEPS):
        middle = 0.5 * (low + high)
        if passes(middle):
            low = middle
        else:
            high = middle
    if low == 0.0:
        logger.warning("no admissible epsilon above 2^-%d", EPSILON_BISECTION_STEPS)
        return None
    return low


def default_params(spec: SpectrumSpec, f: DampingSpec) -> Tuple[PartitionParams, bool]:
    """
    Admissible (K, eps) for a system, and whether it is resonant.

    A resonant system gets the fixed eps* = 1/32.
    """
    m_star = compute_m_star(spec, f)
    K = smallest_admissible_K(check_structural(spec, f).L, m_star)
    resonant, _ = detect_resonance(spec, f, m_star=m_star)
    if resonant:
        return PartitionParams(K, RESONANT_EPS_STAR), True
    epsilon = admissible_epsilon(spec, f, m_star)
    if epsilon is None:
        # only reachable when m3 and m* agree to within the bisection grid
        epsilon = 2.0 ** -EPSILON_BISECTION_STEPS * EPSILON_CEILING
    return PartitionParams(K, epsilon), False
