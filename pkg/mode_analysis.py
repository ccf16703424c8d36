"""
Per-Mode Spectral Analysis of the Damped Wave Equation

For every eigenvalue s of A the damped wave equation reduces to the scalar
oscillator  u'' + 2 f(s) u' + s u = 0  whose characteristic roots are

    lambda^2 + 2 f(s) lambda + s = 0.

This module computes, per mode, the decay rate

    phi(s) = f(s)                        if f(s) <= sqrt(s)
    phi(s) = f(s) - sqrt(f(s)^2 - s)     if f(s) >  sqrt(s)

and, over the whole spectrum, m* = inf phi, the spectral bound
sigma* = -m*, the set Lambda of accumulation points created by an unbounded
tail, the resonance verdict and the SDG/SSDG classification.

Rate conventions: the operator norm ||S(t)|| decays like e^{-m* t}
(rate_norm = m*) and the energy ||S(t)u0||^2 like e^{-2 m* t}
(rate_energy = 2 m*). Both are reported.

Author: Development Team
Created: 2026-10-17

Dependencies:
    - numpy: vectorized phi for envelope and test sweeps
"""

# Standard library imports
import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

# Third-party imports
import numpy as np

# Local imports
from damping_dsl import Constant, DampingSpec, Power, eval_damping
from errors import RejectedTailError
from spectrum import SpectrumSpec, StructuralConstants, check_structural, require_closed_form_tail

logger = logging.getLogger(__name__)

# =============================================================================
# CONFIGURATION
# =============================================================================

CRITICAL_TIE_TOL = 1e-12      # relative tie tolerance on f^2 - s (scaled by max(1, s))
RESONANCE_TOL = 1e-9          # relative tolerance of the resonance equalities
SPECTRUM_DEDUP_TOL = 1e-12    # union-dedup tolerance for sigma(generator)


class DampingClass(enum.Enum):
    UNDERDAMPED = "underdamped"   # f < sqrt(s): complex pair
    CRITICAL = "critical"         # f = sqrt(s): double real root
    OVERDAMPED = "overdamped"     # f > sqrt(s): two real roots


@dataclass(frozen=True)
class ModeRecord:
    s: float
    f_s: float
    phi_s: float
    lambda_plus: complex
    lambda_minus: complex
    damping_class: DampingClass
    region: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "s": self.s,
            "f_s": self.f_s,
            "phi_s": self.phi_s,
            "lambda_plus": [self.lambda_plus.real, self.lambda_plus.imag],
            "lambda_minus": [self.lambda_minus.real, self.lambda_minus.imag],
            "damping_class": self.damping_class.value,
            "region": self.region,
        }


@dataclass(frozen=True)
class DecayReport:
    """
    Spectral decay analysis of one (spectrum, damping) system.

    Attributes:
        m_star (float): inf of phi over the spectrum (and its tail)
        sigma_star (float): Spectral bound of the generator, always -m_star
        resonant (bool): Whether some s* has f(s*) = sqrt(s*) and phi(s*) = m*
        s_star (Optional[float]): The resonant eigenvalue, if any
        Lambda (List[float]): Negative reals added to the spectrum by the tail
        structural (StructuralConstants): f_inf, L and ell
        ssdg (bool): Strong spectrum determined growth, i.e. not resonant
        modes (List[ModeRecord]): Per-eigenvalue records in spectrum order
    """
    m_star: float
    sigma_star: float
    resonant: bool
    s_star: Optional[float]
    Lambda: List[float]
    structural: StructuralConstants
    ssdg: bool
    modes: List[ModeRecord] = field(default_factory=list)

    @property
    def rate_norm(self) -> float:
        return self.m_star

    @property
    def rate_energy(self) -> float:
        return 2.0 * self.m_star

    def to_dict(self) -> Dict[str, Any]:
        structural = self.structural.to_dict()
        return {
            "m_star": self.m_star,
            "sigma_star": self.sigma_star,
            "rate_norm": self.rate_norm,
            "rate_energy": self.rate_energy,
            "resonant": self.resonant,
            "s_star": self.s_star,
            "Lambda": list(self.Lambda),
            "ell": structural["ell"],
            "ell_unbounded": structural["ell_unbounded"],
            "L": structural["L"],
            "f_inf": structural["f_inf"],
            "ssdg": self.ssdg,
            "modes": [mode.to_dict() for mode in self.modes],
        }


# =============================================================================
# SCALAR MODE QUANTITIES
# =============================================================================

def _overdamped_gap(s: float, f_s: float) -> float:
    """sqrt(f^2 - s) computed as sqrt((f - sqrt s)(f + sqrt s)) for f > sqrt(s)."""
    root_s = math.sqrt(s)
    return math.sqrt(max((f_s - root_s) * (f_s + root_s), 0.0))


def phi(s: float, f_s: float, tie_tol: float = CRITICAL_TIE_TOL) -> float:
    """
    Decay rate of a single mode.

    Args:
        s (float): Eigenvalue, s > 0
        f_s (float): Damping at s, f_s > 0
        tie_tol (float): Critical tie band, as in classify

    Returns:
        float: f_s when f_s <= sqrt(s) or the mode is critical, else
            f_s - sqrt(f_s^2 - s), evaluated in the cancellation-free form
            s / (f_s + sqrt(f_s^2 - s))

    Example:
        >>> phi(3.0, 2.0)
        1.0
    """
    if f_s <= math.sqrt(s) or f_s * f_s - s <= tie_tol * max(1.0, s):
        return f_s
    return s / (f_s + _overdamped_gap(s, f_s))


def classify(s: float, f_s: float, tie_tol: float = CRITICAL_TIE_TOL) -> DampingClass:
    """Sign of f^2 - s with an absolute tie band tie_tol*max(1, s)."""
    discriminant = f_s * f_s - s
    if abs(discriminant) <= tie_tol * max(1.0, s):
        return DampingClass.CRITICAL
    if discriminant < 0.0:
        return DampingClass.UNDERDAMPED
    return DampingClass.OVERDAMPED


def lambdas(s: float, f_s: float, tie_tol: float = CRITICAL_TIE_TOL) -> Tuple[complex, complex]:
    """
    Roots (lambda+, lambda-) of lambda^2 + 2 f_s lambda + s = 0.

    lambda+ is the root closer to zero. In the overdamped branch it is
    computed from the product of the roots (lambda+ * lambda- = s) so that it
    equals -phi(s, f_s) exactly.
    """
    damping_class = classify(s, f_s, tie_tol)
    if damping_class is DampingClass.CRITICAL:
        return complex(-f_s, 0.0), complex(-f_s, 0.0)
    if damping_class is DampingClass.UNDERDAMPED:
        omega = math.sqrt(s - f_s * f_s)
        return complex(-f_s, omega), complex(-f_s, -omega)
    far = f_s + _overdamped_gap(s, f_s)
    return complex(-s / far, 0.0), complex(-far, 0.0)


def f_from_phi(s: float, phi_s: float, overdamped: bool) -> float:
    """Recover f(s) from phi(s): phi itself, or s/(2 phi) + phi/2 when overdamped."""
    if overdamped:
        return s / (2.0 * phi_s) + phi_s / 2.0
    return phi_s


def overdamped_bound_holds(s: float, f_s: float, m_star: float, rel_tol: float = 1e-12) -> bool:
    """Check f(s)/s <= 1/(2 m*) + m*/(2 s), the overdamped form of phi(s) >= m*."""
    bound = 1.0 / (2.0 * m_star) + m_star / (2.0 * s)
    return f_s / s <= bound * (1.0 + rel_tol)


def phi_array(s: np.ndarray, f_s: np.ndarray, tie_tol: float = CRITICAL_TIE_TOL) -> np.ndarray:
    """Vectorized phi over matching arrays of eigenvalues and damping values."""
    s = np.asarray(s, dtype=float)
    f_s = np.asarray(f_s, dtype=float)
    root_s = np.sqrt(s)
    gap = np.sqrt(np.maximum((f_s - root_s) * (f_s + root_s), 0.0))
    not_overdamped = (f_s <= root_s) | (f_s * f_s - s <= tie_tol * np.maximum(1.0, s))
    return np.where(not_overdamped, f_s, s / (f_s + gap))


def mode_record(s: float, f_s: float, tie_tol: float = CRITICAL_TIE_TOL) -> ModeRecord:
    plus, minus = lambdas(s, f_s, tie_tol)
    return ModeRecord(
        s=s,
        f_s=f_s,
        phi_s=phi(s, f_s, tie_tol),
        lambda_plus=plus,
        lambda_minus=minus,
        damping_class=classify(s, f_s, tie_tol),
    )


# =============================================================================
# SPECTRUM-WIDE QUANTITIES
# =============================================================================

def liminf_phi_limit(f: DampingSpec) -> float:
    """
    Limit of phi(s) as s -> inf for the closed-form families.

    Constant damping a (and a*s^0): phi = a for s >= a^2, limit a.
    Power damping with theta = 1: phi -> 1/(2a).
    Any other exponent: phi diverges.
    """
    if isinstance(f, Constant):
        return float(f.a)
    if isinstance(f, Power):
        if f.theta == 0.0:
            return float(f.a)
        if f.theta == 1.0:
            return 1.0 / (2.0 * f.a)
        return math.inf
    raise RejectedTailError("tail limits exist in closed form only for constant and power damping")


def phi_values(spec: SpectrumSpec, f: DampingSpec) -> List[float]:
    """phi at every eigenvalue, in spectrum order."""
    return [phi(s, eval_damping(f, s)) for s in spec.eigenvalues]


def compute_m_star(spec: SpectrumSpec, f: DampingSpec) -> float:
    """
    m* = inf phi over the spectrum.

    For a finite list this is an exact minimum. With an unbounded tail the
    closed-form limit of phi along s -> inf joins the minimum.

    Args:
        spec (SpectrumSpec): Spectrum that passed check_structural
        f (DampingSpec): Damping

    Returns:
        float: m* > 0

    Raises:
        RejectedTailError: If the tail is unbounded and f is an expression

    Example:
        >>> compute_m_star(make_spectrum([1.0, 100.0]), Constant(2.0))
        0.2679491924311228
    """
    require_closed_form_tail(spec, f)
    m_star = math.inf
    for value in phi_values(spec, f):
        m_star = min(m_star, value)
    if spec.unbounded:
        m_star = min(m_star, liminf_phi_limit(f))
    return m_star


def compute_Lambda(spec: SpectrumSpec, f: DampingSpec) -> List[float]:
    """
    Negative reals lambda with f(s_n)/s_n -> -1/(2 lambda) along s_n -> inf.

    Empty for a bounded spectrum. With an unbounded tail only a*s (theta = 1)
    has a nonzero limit a of f(s)/s, giving Lambda = {-1/(2a)}.

    Raises:
        RejectedTailError: If the tail is unbounded and f is an expression
    """
    if not spec.unbounded:
        return []
    require_closed_form_tail(spec, f)
    if isinstance(f, Power) and f.theta == 1.0:
        return [-1.0 / (2.0 * f.a)]
    return []


def spectrum_of_generator(spec: SpectrumSpec, f: DampingSpec) -> List[complex]:
    """sigma(generator) = Sigma u Lambda, with near-equal points (1e-12) merged."""
    points: List[complex] = []
    candidates = []
    for s in spec.eigenvalues:
        candidates.extend(lambdas(s, eval_damping(f, s)))
    candidates.extend(complex(value, 0.0) for value in compute_Lambda(spec, f))
    for z in candidates:
        if any(abs(z - w) <= SPECTRUM_DEDUP_TOL * max(1.0, abs(z)) for w in points):
            continue
        points.append(z)
    return points


def detect_resonance(spec: SpectrumSpec, f: DampingSpec, tol: float = RESONANCE_TOL,
                     m_star: Optional[float] = None) -> Tuple[bool, Optional[float]]:
    """
    Look for the eigenvalue s* with f(s*) = sqrt(s*) and phi(s*) = m*.

    Args:
        spec (SpectrumSpec): Spectrum
        f (DampingSpec): Damping
        tol (float): Relative tolerance applied to both equalities
        m_star (Optional[float]): Precomputed m*, recomputed when omitted

    Returns:
        Tuple[bool, Optional[float]]: (resonant, s*) with s* the first match
            in increasing order (the resonant point is unique)
    """
    if m_star is None:
        m_star = compute_m_star(spec, f)
    for s in spec.eigenvalues:
        f_s = eval_damping(f, s)
        root_s = math.sqrt(s)
        if abs(f_s - root_s) <= tol * root_s and abs(phi(s, f_s) - m_star) <= tol * m_star:
            return True, s
    return False, None


def analyze(spec: SpectrumSpec, f: DampingSpec, tol: float = RESONANCE_TOL,
            tie_tol: float = CRITICAL_TIE_TOL) -> DecayReport:
    """
    Full spectral decay report of one system.

    Args:
        spec (SpectrumSpec): Spectrum
        f (DampingSpec): Damping
        tol (float): Resonance tolerance
        tie_tol (float): Critical-damping tie tolerance

    Returns:
        DecayReport: m*, sigma*, resonance, Lambda, structural constants,
            SSDG verdict and per-mode records (regions left unset)

    Raises:
        StructError: If the structural assumptions fail
        RejectedTailError: If an unbounded tail meets an expression damping
    """
    structural = check_structural(spec, f)
    m_star = compute_m_star(spec, f)
    resonant, s_star = detect_resonance(spec, f, tol, m_star)
    modes = [mode_record(s, eval_damping(f, s), tie_tol) for s in spec.eigenvalues]
    logger.debug("analyzed %d modes: m*=%r resonant=%s", len(modes), m_star, resonant)
    return DecayReport(
        m_star=m_star,
        sigma_star=-m_star,
        resonant=resonant,
        s_star=s_star,
        Lambda=compute_Lambda(spec, f),
        structural=structural,
        ssdg=not resonant,
        modes=modes,
    )
