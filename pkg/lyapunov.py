"""
Lyapunov Functionals and Certified Decay Constants

Each region of the spectral partition carries its own energy-like
functional F and dissipation term G with

    dF/dt + 2 * rate * F + 2 G = 0,    G >= 0,    lo * E <= F <= hi * E

along solutions, so that E(t) <= (hi/lo) E(0) e^{-2 rate t}. Functions of A
act diagonally on the spectral decomposition, so everything here is a
per-mode scalar formula in (s, f(s), u, u').

    region   F                                            rate           hi/lo
    0        E + 2 m*^2 u^2 + 4 m* u u'                   m*             3
    1        E + 2 f u u'                                 m*             (2 - eps)/eps
    2        E + 2 (f^2 - s) u^2 + 2 f u u'               m*             9 K^2/eps
    3        E + 2 c f u u' + 8 sqrt(eps) c f^2 u^2       m3 (1 - 4 sqrt(eps))   8/eps

with c = 1 + 4 sqrt(eps) and m3 = min phi over region 3.

Author: Development Team
Created: 2026-10-17

Dependencies:
    - numpy: random initial data and vectorized energy sweeps
"""

# Standard library imports
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

# Third-party imports
import numpy as np

# Local imports
from damping_dsl import DampingSpec, eval_damping_many
from errors import DomainError, RegionMismatchError
from mode_analysis import compute_m_star
from partition import (
    EPSILON_CEILING,
    PartitionParams,
    assign_regions,
    default_params,
    m3,
    region_of_ratio,
)
from propagator import propagate, scaled_entries, sigma_max
from spectrum import SpectrumSpec, check_structural

logger = logging.getLogger(__name__)

# =============================================================================
# CONFIGURATION
# =============================================================================

FD_STEP = 1e-4
DEFAULT_TRIALS = 1000
LEMMA_REL_SLACK = 1e-9


@dataclass(frozen=True)
class ModeState:
    s: float
    f_s: float
    u: float
    v: float

    @property
    def energy(self) -> float:
        return self.s * self.u ** 2 + self.v ** 2


@dataclass(frozen=True)
class LyapunovSample:
    region: int
    E: float
    F: float
    G: float
    params: PartitionParams
    m_ref: float


@dataclass(frozen=True)
class LemmaCheck:
    """
    Outcome of one lemma check.

    Attributes:
        region (int): Region index
        worst_ratio (float): sup of E(t) e^{2 rate t} / E(0) over trials and times
        operator_ratio (float): Same sup over all initial data in the region
        constant (float): The lemma constant the ratios are held to
        rate (float): Energy rate is 2 * rate
        n_modes (int): Eigenvalues in the region (0 means vacuous pass)
        passed (bool): worst_ratio <= constant
    """
    region: int
    worst_ratio: float
    operator_ratio: float
    constant: float
    rate: float
    n_modes: int
    passed: bool

    @property
    def vacuous(self) -> bool:
        return self.n_modes == 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "region": self.region,
            "worst_ratio": self.worst_ratio,
            "operator_ratio": self.operator_ratio,
            "constant": self.constant,
            "rate": self.rate,
            "n_modes": self.n_modes,
            "vacuous": self.vacuous,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class CertifiedBound:
    """N(t) <= C_norm (1 + t)^poly_factor e^{-rate_norm t}."""
    rate_norm: float
    C_norm: float
    C_energy: float
    poly_factor: int
    sharp_subdamped_C: Optional[float]
    K_used: float
    eps_used: float

    def log_bound(self, t):
        """log of the certified norm bound at t (broadcasts over arrays)."""
        t = np.asarray(t, dtype=float)
        return math.log(self.C_norm) + self.poly_factor * np.log1p(t) - self.rate_norm * t

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rate_norm": self.rate_norm,
            "C_norm": self.C_norm,
            "C_energy": self.C_energy,
            "poly_factor": self.poly_factor,
            "sharp_subdamped_C": self.sharp_subdamped_C,
            "K_used": self.K_used,
            "eps_used": self.eps_used,
        }


# =============================================================================
# CONSTANTS
# =============================================================================

def rho_epsilon(epsilon: float) -> float:
    """Lower equivalence gap of region 2: 2 eps (6 - eps - 3 eps^2) / (3 (3 - eps))."""
    return 2.0 * epsilon * (6.0 - epsilon - 3.0 * epsilon ** 2) / (3.0 * (3.0 - epsilon))


def sigma3_bracket(epsilon: float) -> float:
    """Positivity margin of the region-3 equivalence; > 0 on (0, 1/16)."""
    root = math.sqrt(epsilon)
    c = 1.0 + 4.0 * root
    return (1.0 - epsilon) / (1.0 + epsilon) ** 2 + 8.0 * root * c - c ** 2 / (1.0 - epsilon)


def equivalence_bracket(region: int, params: PartitionParams) -> Tuple[float, float]:
    """(lo, hi) with lo E <= F <= hi E on the region."""
    eps, K = params.epsilon, params.K
    brackets = {
        0: (0.5, 1.5),
        1: (eps, 2.0 - eps),
        2: (eps / 3.0, 3.0 * K * K),
        3: (eps, 8.0),
    }
    if region not in brackets:
        raise DomainError(f"region must be 0, 1, 2 or 3, got {region!r}")
    return brackets[region]


def lemma_constant(region: int, params: PartitionParams) -> float:
    """E_i(t) <= constant * E_i(0) * e^{-2 rate t}: 3, (2-eps)/eps, 9K^2/eps, 8/eps."""
    lo, hi = equivalence_bracket(region, params)
    return hi / lo


def lemma_rate(region: int, m_ref: float, params: PartitionParams) -> float:
    """m* on regions 0-2; m3 (1 - 4 sqrt(eps)) on region 3 (m_ref = m3 there)."""
    if region == 3:
        return m_ref * (1.0 - 4.0 * math.sqrt(params.epsilon))
    return m_ref


# =============================================================================
# FUNCTIONALS
# =============================================================================

def _functionals(region: int, s: float, f: float, u: float, v: float,
                 params: PartitionParams, m: float) -> Tuple[float, float]:
    """(F, G) of one mode; no region membership check."""
    E = s * u * u + v * v
    if region == 0:
        g = f - m / 2.0
        F = E + 2.0 * m * m * u * u + 4.0 * m * u * v
        G = m * (s - 2.0 * m * g) * u * u + 2.0 * (g - m) * (m * u + v) ** 2
    elif region == 1:
        F = E + 2.0 * f * u * v
        G = (f - m) * (s - f * f) * u * u + (f - m) * (f * u + v) ** 2
    elif region == 2:
        F = E + 2.0 * (f * f - s) * u * u + 2.0 * f * u * v
        G = ((s * f + m * s - 2.0 * m * f * f) * u * u + (f - m) * v * v
             + 2.0 * (s - m * f) * u * v)
    elif region == 3:
        root = math.sqrt(params.epsilon)
        c = 1.0 + 4.0 * root
        d = 1.0 - 4.0 * root
        narrow = 1.0 - 16.0 * params.epsilon
        p = c * s * f - m * d * s - 8.0 * m * root * narrow * f * f
        F = E + 2.0 * c * f * u * v + 8.0 * root * c * f * f * u * u
        G = p * u * u + d * (f - m) * v * v + 2.0 * narrow * f * (f - m) * u * v
    else:
        raise DomainError(f"region must be 0, 1, 2 or 3, got {region!r}")
    return F, G


def eval_F_G(state: ModeState, region: int, params: PartitionParams, m_ref: float) -> LyapunovSample:
    """
    Evaluate the region's functional and dissipation term on one mode.

    Args:
        state (ModeState): Mode and its (u, u') coefficients
        region (int): Region the mode belongs to
        params (PartitionParams): K and eps of the partition
        m_ref (float): m* for regions 0-2, m3 for region 3

    Returns:
        LyapunovSample: E, F and G

    Raises:
        RegionMismatchError: If the mode's ratio f/sqrt(s) puts it in another region

    Example:
        >>> eval_F_G(ModeState(4.0, 0.5, 1.0, 0.0), 1, PartitionParams(2, 0.25), 0.5)
        LyapunovSample(region=1, E=4.0, F=4.0, G=0.0, ...)
    """
    actual = region_of_ratio(state.f_s / math.sqrt(state.s), params)
    if actual != region:
        raise RegionMismatchError(
            f"mode s={state.s!r} with f={state.f_s!r} lies in region {actual}, not {region}"
        )
    F, G = _functionals(region, state.s, state.f_s, state.u, state.v, params, m_ref)
    return LyapunovSample(region, state.energy, F, G, params, m_ref)


def _evolve(state: ModeState, t: float) -> Tuple[float, float]:
    """(u, u') at time t from the closed-form propagator."""
    root_s = math.sqrt(state.s)
    x, y = propagate(state.s, state.f_s, t).apply(root_s * state.u, state.v)
    return x / root_s, y


def verify_identity(state: ModeState, region: int, params: PartitionParams, m_ref: float,
                    t_grid: Sequence[float], h: float = FD_STEP) -> float:
    """
    Largest residual of dF/dt + 2 rate F + 2 G along the exact trajectory.

    dF/dt is a central difference with step h, so the residual is O(h^2).
    Near t = 0 the backward point uses the propagator at negative time,
    which is the same matrix exponential.

    Returns:
        float: max over t_grid of |dF/dt + 2 rate F + 2 G|
    """
    eval_F_G(state, region, params, m_ref)
    rate = lemma_rate(region, m_ref, params)
    worst = 0.0
    for t in t_grid:
        values = {}
        for shift in (-h, 0.0, h):
            u, v = _evolve(state, t + shift)
            values[shift] = _functionals(region, state.s, state.f_s, u, v, params, m_ref)
        dF = (values[h][0] - values[-h][0]) / (2.0 * h)
        F, G = values[0.0]
        worst = max(worst, abs(dF + 2.0 * rate * F + 2.0 * G))
    return worst


# =============================================================================
# LEMMA CHECKS
# =============================================================================

def verify_lemma(spec: SpectrumSpec, f: DampingSpec, params: PartitionParams, region: int,
                 n_trials: int, t_grid: Sequence[float],
                 seed: int = 0, m_star: Optional[float] = None) -> LemmaCheck:
    """
    Check one region's decay estimate on random initial data.

    Initial coefficients are i.i.d. uniform on [-1, 1] for every mode of the
    region (zero elsewhere), seeded. For each trial the sup over t_grid of
    E(t) e^{2 rate t} / E(0) is compared with the lemma constant. The sup
    over all initial data (largest squared mode norm, rescaled) is reported
    alongside as operator_ratio.

    Args:
        spec (SpectrumSpec): Spectrum
        f (DampingSpec): Damping
        params (PartitionParams): Partition parameters; eps < 1/16 for a nonempty region 3
        region (int): 0, 1, 2 or 3
        n_trials (int): Random initial data per check
        t_grid (Sequence[float]): Nonnegative times
        seed (int): Generator seed
        m_star (Optional[float]): Precomputed m*

    Returns:
        LemmaCheck: Worst ratios, constant, rate and verdict (vacuous pass
            with ratio 0 when the region is empty)

    Raises:
        DomainError: If a nonempty region 3 is checked with eps >= 1/16
    """
    constant = lemma_constant(region, params)
    members = list(assign_regions(spec, f, params).members(region))
    if region == 3 and members and params.epsilon >= EPSILON_CEILING:
        raise DomainError(f"region 3 needs eps < 1/16, got {params.epsilon!r}")
    if region == 3:
        m_ref = m3(spec, f, params.epsilon)
    else:
        m_ref = compute_m_star(spec, f) if m_star is None else m_star
    if not members:
        rate = lemma_rate(region, m_ref, params) if math.isfinite(m_ref) else 0.0
        return LemmaCheck(region, 0.0, 0.0, constant, rate, 0, True)
    rate = lemma_rate(region, m_ref, params)

    s = spec.as_array()[members]
    f_s = eval_damping_many(f, spec.eigenvalues)[members]
    times = np.asarray(t_grid, dtype=float)

    kappa, q11, q12, q21, q22 = scaled_entries(s[None, :], f_s[None, :], times[:, None])
    weight = np.exp(2.0 * (rate - kappa) * times[:, None])
    a = weight * (q11 ** 2 + q21 ** 2)
    b = weight * (q11 * q12 + q21 * q22)
    c = weight * (q12 ** 2 + q22 ** 2)

    rng = np.random.default_rng(seed)
    u = rng.uniform(-1.0, 1.0, size=(n_trials, len(members)))
    v = rng.uniform(-1.0, 1.0, size=(n_trials, len(members)))
    x = np.sqrt(s)[None, :] * u
    y = v
    energy0 = np.sum(x * x + y * y, axis=1)
    scaled = (x * x) @ a.T + 2.0 * (x * y) @ b.T + (y * y) @ c.T
    worst_ratio = float(np.max(scaled / energy0[:, None]))

    operator_ratio = float(np.max(weight * sigma_max(q11, q12, q21, q22) ** 2))
    passed = worst_ratio <= constant * (1.0 + LEMMA_REL_SLACK)
    logger.debug("region %d: %d modes, worst=%r, constant=%r", region, len(members), worst_ratio, constant)
    return LemmaCheck(region, worst_ratio, operator_ratio, constant, rate, len(members), passed)


# =============================================================================
# CERTIFICATE
# =============================================================================

def certified_constant(spec: SpectrumSpec, f: DampingSpec,
                       params: Optional[PartitionParams] = None) -> CertifiedBound:
    """
    Constant C with ||S(t)|| <= C (1 + t)^poly e^{-m* t}.

    Non-resonant: C_energy = 9 K^2 / eps with admissible (K, eps), no
    polynomial factor. Resonant: eps* = 1/32 and
    C_energy = (9 K^2 / eps*) e^{8 m* sqrt(eps*)} with one factor (1 + t)
    on the norm. Subdamped systems (ell < 1) also get the sharp constant
    sqrt((1 + ell)/(1 - ell)).

    Args:
        spec (SpectrumSpec): Spectrum
        f (DampingSpec): Damping
        params (Optional[PartitionParams]): Override of the admissible (K, eps)

    Returns:
        CertifiedBound: Rate, constants and the parameters they came from
    """
    structural = check_structural(spec, f)
    m_star = compute_m_star(spec, f)
    chosen, resonant = default_params(spec, f)
    if params is not None:
        chosen = params
    K, eps = chosen.K, chosen.epsilon

    if resonant:
        C_energy = 9.0 * K * K / eps * math.exp(8.0 * m_star * math.sqrt(eps))
        poly_factor = 1
    else:
        C_energy = 9.0 * K * K / eps
        poly_factor = 0

    sharp = None
    if structural.subdamped:
        sharp = math.sqrt((1.0 + structural.ell) / (1.0 - structural.ell))
    return CertifiedBound(
        rate_norm=m_star,
        C_norm=math.sqrt(C_energy),
        C_energy=C_energy,
        poly_factor=poly_factor,
        sharp_subdamped_C=sharp,
        K_used=K,
        eps_used=eps,
    )
