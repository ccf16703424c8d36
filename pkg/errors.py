"""
Exception Hierarchy for decaylab

Every error raised on purpose by the library derives from DecayLabError so
that the CLI can report it in one line and exit with the usage-error code.

Author: Development Team
Created: 2026-10-17
"""

from typing import Optional


class DecayLabError(Exception):
    """Base class for all decaylab errors."""


class ParseError(DecayLabError):
    """Malformed damping expression.

    Attributes:
        offset (int): Byte offset into the UTF-8 encoded input where parsing failed
        message (str): Short description such as "expected expression"
    """

    def __init__(self, offset: int, message: str):
        self.offset = offset
        self.message = message
        super().__init__(f"{message} at offset {offset}")


class EvalError(DecayLabError):
    """Damping evaluation produced a non-finite, non-positive or non-real value."""


class DampingError(DecayLabError):
    """Invalid parameters for a Constant or Power damping."""


class SpecError(DecayLabError):
    """Invalid eigenvalue list."""


class StructError(DecayLabError):
    """The structural assumptions inf f > 0 and sup f(s)/s < inf are violated."""


class RejectedTailError(DecayLabError):
    """An unbounded tail was combined with a damping that has no closed-form limit."""


class RegionMismatchError(DecayLabError):
    """A mode was evaluated with the functional of a region it does not belong to."""


class ResonantInputError(DecayLabError):
    """An operation that needs a non-resonant system received a resonant one."""


class BracketError(DecayLabError):
    """No sign change was found while bracketing a root."""


class DomainError(DecayLabError):
    """Parameter outside the domain an analysis is defined on."""


class ConfigError(DecayLabError):
    """Malformed run configuration."""


class OutputError(DecayLabError):
    """A report could not be written.

    Attributes:
        path (str): The path that failed
    """

    def __init__(self, path: str, reason: Optional[str] = None):
        self.path = path
        super().__init__(f"cannot write {path}: {reason}" if reason else f"cannot write {path}")
