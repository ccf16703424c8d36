"""
Spectrum of the Elastic Operator

Represents sigma(A) as a finite, strictly increasing list of positive
eigenvalues, optionally flagged as the visible part of an unbounded spectrum
(a "power tail"). Generates the spectra of the 1D Dirichlet Laplacian and the
hinged 1D Bilaplacian, and checks the structural assumptions

    inf f(s) > 0    and    sup f(s)/s < inf

returning the constants every later analysis needs.

Continuous spectra are handled by dense sampling: the caller builds a grid
(type "grid" in the config schema) and all analysis stays per eigenvalue.
How well a grid recovers inf/sup for a damping with narrow dips between grid
points is plain discretization error and is not corrected for.

Author: Development Team
Created: 2026-10-17

Dependencies:
    - numpy: grid generation
"""

# Standard library imports
import enum
import math
from dataclasses import dataclass
from typing import Any, Dict, Iterable, Tuple

# Third-party imports
import numpy as np

# Local imports
from damping_dsl import DampingSpec, Expr, Power, eval_damping
from errors import EvalError, RejectedTailError, SpecError, StructError

# =============================================================================
# CONFIGURATION
# =============================================================================

DEDUP_REL_TOL = 1e-12          # eigenvalues closer than this (relative) are merged
SPECTRUM_TYPES = ("list", "grid", "laplacian1d", "bilaplacian1d")


class Tail(enum.Enum):
    """Behaviour of sigma(A) beyond the listed eigenvalues."""
    NONE = "none"       # bounded operator, the list is the whole spectrum
    POWER = "power"     # unbounded above; limits taken in closed form


@dataclass(frozen=True)
class SpectrumSpec:
    eigenvalues: Tuple[float, ...]
    tail: Tail = Tail.NONE

    @property
    def s0(self) -> float:
        """Minimum of the spectrum."""
        return self.eigenvalues[0]

    @property
    def s_max(self) -> float:
        return self.eigenvalues[-1]

    @property
    def unbounded(self) -> bool:
        return self.tail is Tail.POWER

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.eigenvalues, dtype=float)


@dataclass(frozen=True)
class StructuralConstants:
    """
    Constants of the structural assumptions.

    Attributes:
        f_inf (float): inf f(s)
        L (float): sup f(s)/s
        ell (float): sup f(s)/sqrt(s); math.inf when the tail makes it unbounded
        ell_unbounded (bool): True when f(s)/sqrt(s) diverges along the tail
    """
    f_inf: float
    L: float
    ell: float
    ell_unbounded: bool = False

    @property
    def subdamped(self) -> bool:
        return (not self.ell_unbounded) and self.ell < 1.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "f_inf": self.f_inf,
            "L": self.L,
            "ell": None if self.ell_unbounded else self.ell,
            "ell_unbounded": self.ell_unbounded,
        }


# =============================================================================
# CONSTRUCTION
# =============================================================================

def make_spectrum(values: Iterable[float], tail: Tail = Tail.NONE) -> SpectrumSpec:
    """
    Build a spectrum from raw eigenvalues.

    Args:
        values (Iterable[float]): Eigenvalues in any order, repeats allowed
        tail (Tail): Tail semantics beyond the largest listed eigenvalue

    Returns:
        SpectrumSpec: Sorted eigenvalues with near-duplicates (relative 1e-12) merged

    Raises:
        SpecError: If the list is empty or any value is not a finite positive real

    Example:
        >>> make_spectrum([4.0, 1.0, 4.0]).eigenvalues
        (1.0, 4.0)
    """
    raw = [float(v) for v in values]
    if not raw:
        raise SpecError("spectrum needs at least one eigenvalue")
    for value in raw:
        if not (math.isfinite(value) and value > 0.0):
            raise SpecError(f"eigenvalues must be finite and positive, got {value!r}")
    kept = []
    for value in sorted(raw):
        if kept and value - kept[-1] <= DEDUP_REL_TOL * value:
            continue
        kept.append(value)
    return SpectrumSpec(tuple(kept), Tail(tail))


def _check_generator_args(length: float, n_modes: int) -> None:
    if not (math.isfinite(length) and length > 0.0):
        raise SpecError(f"length must be positive, got {length!r}")
    if int(n_modes) != n_modes or n_modes < 1:
        raise SpecError(f"n_modes must be a positive integer, got {n_modes!r}")


def laplacian_1d(length: float, n_modes: int) -> SpectrumSpec:
    """Dirichlet Laplacian on (0, length): s_k = (k*pi/length)^2, unbounded tail."""
    _check_generator_args(length, n_modes)
    k = np.arange(1, int(n_modes) + 1, dtype=float)
    return make_spectrum((k * math.pi / length) ** 2, Tail.POWER)


def bilaplacian_1d(length: float, n_modes: int) -> SpectrumSpec:
    """Hinged Bilaplacian on (0, length): the squares of the Laplacian eigenvalues."""
    _check_generator_args(length, n_modes)
    laplacian = laplacian_1d(length, n_modes).as_array()
    return make_spectrum(laplacian ** 2, Tail.POWER)


def grid_spectrum(s_min: float, s_max: float, n: int, scale: str = "linear",
                  tail: Tail = Tail.NONE) -> SpectrumSpec:
    """Sample a continuous spectrum [s_min, s_max] on n points (linear or log spacing)."""
    if not (0.0 < s_min <= s_max):
        raise SpecError(f"grid needs 0 < min <= max, got min={s_min!r}, max={s_max!r}")
    if int(n) != n or n < 1:
        raise SpecError(f"grid needs a positive point count, got {n!r}")
    if scale == "linear":
        points = np.linspace(s_min, s_max, int(n))
    elif scale == "log":
        points = np.geomspace(s_min, s_max, int(n))
    else:
        raise SpecError(f"grid scale must be 'linear' or 'log', got {scale!r}")
    return make_spectrum(points, tail)


def spectrum_from_config(config: Dict[str, Any]) -> SpectrumSpec:
    """
    Build a spectrum from its JSON description.

    Accepted shapes:
        {"type": "list", "values": [...]}
        {"type": "grid", "min": m, "max": M, "n": N, "scale": "linear"|"log"}
        {"type": "laplacian1d", "length": L, "modes": N}
        {"type": "bilaplacian1d", "length": L, "modes": N}
    each with an optional "tail": "power" (or "none").

    Raises:
        SpecError: On an unknown type, missing keys or invalid values
    """
    if not isinstance(config, dict):
        raise SpecError(f"spectrum config must be an object, got {config!r}")
    kind = config.get("type")
    if kind not in SPECTRUM_TYPES:
        raise SpecError(f"unknown spectrum type {kind!r}; expected one of {SPECTRUM_TYPES}")
    try:
        tail = Tail(config["tail"]) if "tail" in config else None
    except ValueError:
        raise SpecError(f"unknown tail {config['tail']!r}; expected 'power' or 'none'")
    try:
        if kind == "list":
            spec = make_spectrum(config["values"], tail or Tail.NONE)
        elif kind == "grid":
            spec = grid_spectrum(float(config["min"]), float(config["max"]), config["n"],
                                 config.get("scale", "linear"), tail or Tail.NONE)
        elif kind == "laplacian1d":
            spec = laplacian_1d(float(config["length"]), config["modes"])
        else:
            spec = bilaplacian_1d(float(config["length"]), config["modes"])
    except KeyError as e:
        raise SpecError(f"spectrum config of type {kind!r} is missing {e}")
    if tail is not None and spec.tail is not tail:
        spec = SpectrumSpec(spec.eigenvalues, tail)
    return spec


# =============================================================================
# STRUCTURAL ASSUMPTIONS
# =============================================================================

def require_closed_form_tail(spec: SpectrumSpec, f: DampingSpec) -> None:
    """Raise RejectedTailError when an unbounded tail meets an expression damping."""
    if spec.unbounded and isinstance(f, Expr):
        raise RejectedTailError(
            "an unbounded ('power') tail needs constant or power damping; "
            f"got expression {f.render()!r}"
        )


def check_structural(spec: SpectrumSpec, f: DampingSpec) -> StructuralConstants:
    """
    Evaluate f on the spectrum and return inf f, sup f/s and sup f/sqrt(s).

    With an unbounded tail and power damping a*s^theta the s -> inf limits
    are added in closed form: theta = 1 contributes a to sup f/s, and
    theta > 1/2 makes sup f/sqrt(s) infinite (never subdamped).

    Args:
        spec (SpectrumSpec): The spectrum
        f (DampingSpec): The damping

    Returns:
        StructuralConstants: f_inf, L, ell (and the unbounded flag)

    Raises:
        StructError: If f is not positive or fails to evaluate on an eigenvalue
        RejectedTailError: If the tail is unbounded and f is an expression

    Example:
        >>> check_structural(make_spectrum([1, 4, 9]), Constant(1.0))
        StructuralConstants(f_inf=1.0, L=1.0, ell=1.0, ell_unbounded=False)
    """
    require_closed_form_tail(spec, f)
    values = []
    for s in spec.eigenvalues:
        try:
            values.append(eval_damping(f, s))
        except EvalError as e:
            raise StructError(f"structural assumption inf f > 0 fails: {e}")

    f_inf = min(values)
    L = max(value / s for value, s in zip(values, spec.eigenvalues))
    ell = max(value / math.sqrt(s) for value, s in zip(values, spec.eigenvalues))
    ell_unbounded = False

    if spec.unbounded and isinstance(f, Power):
        if f.theta == 1.0:
            L = max(L, float(f.a))
        if f.theta > 0.5:
            ell = math.inf
            ell_unbounded = True
    # constant damping: f/s and f/sqrt(s) decrease to 0 along the tail

    return StructuralConstants(f_inf=f_inf, L=L, ell=ell, ell_unbounded=ell_unbounded)
