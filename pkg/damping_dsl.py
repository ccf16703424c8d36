"""
Damping Functions and the Damping Expression Language

Represents the damping function f on the spectrum of A. Two families have
closed forms (constant damping and the fractional power a*s^theta); anything
else is written in a small infix language and parsed into an expression tree.

The grammar is documented in DAMPING_GRAMMAR.md. Parsing is Pratt-style:
every token has a left binding power, prefix handlers ("nud") start an
expression and infix handlers ("led") extend it.

Author: Development Team
Created: 2026-10-17

Usage:
    from damping_dsl import parse_damping, eval_damping
    f = parse_damping("min(s, 4)/2")
    eval_damping(f, 9.0)   # 2.0
"""

# Standard library imports
import math
import re
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Sequence, Tuple, Union

# Third-party imports
import numpy as np

# Local imports
from errors import DampingError, EvalError, ParseError

# =============================================================================
# GRAMMAR CONFIGURATION
# =============================================================================

# Left binding powers of the infix operators; '^' is right associative
BINARY_BINDING_POWER = {
    "+": 10,
    "-": 10,
    "*": 20,
    "/": 20,
    "^": 40,
}
UNARY_MINUS_BINDING_POWER = 30   # between '*' and '^': -2^2 == -4

# Accepted function names and their arity
FUNCTION_ARITY = {
    "sqrt": 1,
    "exp": 1,
    "log": 1,
    "abs": 1,
    "min": 2,
    "max": 2,
}

VARIABLE_NAME = "s"

TOKEN_PATTERN = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),])"
    r")"
)


# =============================================================================
# EXPRESSION TREE
# =============================================================================

@dataclass(frozen=True)
class Number:
    value: float

    def evaluate(self, s: float) -> float:
        return self.value

    def render(self) -> str:
        return repr(self.value)


@dataclass(frozen=True)
class Variable:
    def evaluate(self, s: float) -> float:
        return s

    def render(self) -> str:
        return VARIABLE_NAME


@dataclass(frozen=True)
class Negate:
    operand: "ExprNode"

    def evaluate(self, s: float) -> float:
        return -self.operand.evaluate(s)

    def render(self) -> str:
        return f"(-{self.operand.render()})"


@dataclass(frozen=True)
class BinaryOp:
    op: str
    left: "ExprNode"
    right: "ExprNode"

    def evaluate(self, s: float) -> float:
        x = self.left.evaluate(s)
        y = self.right.evaluate(s)
        if self.op == "+":
            value = x + y
        elif self.op == "-":
            value = x - y
        elif self.op == "*":
            value = x * y
        elif self.op == "/":
            if y == 0.0:
                raise EvalError(f"division by zero at s={s!r}")
            value = x / y
        else:
            return _real_power(x, y, s)
        if not math.isfinite(value):
            raise EvalError(f"overflow in {x!r} {self.op} {y!r} at s={s!r}")
        return value

    def render(self) -> str:
        return f"({self.left.render()}{self.op}{self.right.render()})"


@dataclass(frozen=True)
class Call:
    name: str
    args: Tuple["ExprNode", ...]

    def evaluate(self, s: float) -> float:
        values = [arg.evaluate(s) for arg in self.args]
        return FUNCTIONS[self.name](values, s)

    def render(self) -> str:
        return f"{self.name}({', '.join(arg.render() for arg in self.args)})"


ExprNode = Union[Number, Variable, Negate, BinaryOp, Call]


def _real_power(base: float, exponent: float, s: float) -> float:
    # Real Hilbert space: a negative base only takes integer exponents
    if base < 0.0 and not float(exponent).is_integer():
        raise EvalError(f"non-real power {base!r}^{exponent!r} at s={s!r}")
    if base == 0.0 and exponent < 0.0:
        raise EvalError(f"zero raised to negative power at s={s!r}")
    try:
        return math.pow(base, exponent)
    except OverflowError:
        raise EvalError(f"overflow in {base!r}^{exponent!r} at s={s!r}")


def _sqrt(values: List[float], s: float) -> float:
    if values[0] < 0.0:
        raise EvalError(f"sqrt of negative value {values[0]!r} at s={s!r}")
    return math.sqrt(values[0])


def _log(values: List[float], s: float) -> float:
    if values[0] <= 0.0:
        raise EvalError(f"log of non-positive value {values[0]!r} at s={s!r}")
    return math.log(values[0])


def _exp(values: List[float], s: float) -> float:
    try:
        return math.exp(values[0])
    except OverflowError:
        raise EvalError(f"overflow in exp({values[0]!r}) at s={s!r}")


FUNCTIONS: Dict[str, Callable[[List[float], float], float]] = {
    "sqrt": _sqrt,
    "exp": _exp,
    "log": _log,
    "abs": lambda values, s: abs(values[0]),
    "min": lambda values, s: min(values),
    "max": lambda values, s: max(values),
}


# =============================================================================
# DAMPING SPECIFICATIONS
# =============================================================================

@dataclass(frozen=True)
class Constant:
    """Constant damping f(s) = a (telegrapher's equation)."""
    a: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0.0):
            raise DampingError(f"constant damping needs a > 0, got {self.a!r}")

    def render(self) -> str:
        return repr(float(self.a))


@dataclass(frozen=True)
class Power:
    """Fractional damping f(s) = a * s^theta with 0 <= theta <= 1."""
    a: float
    theta: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0.0):
            raise DampingError(f"power damping needs a > 0, got {self.a!r}")
        if not 0.0 <= self.theta <= 1.0:
            raise DampingError(f"power damping needs 0 <= theta <= 1, got {self.theta!r}")

    def render(self) -> str:
        return f"{float(self.a)!r}*s^{float(self.theta)!r}"


@dataclass(frozen=True)
class Expr:
    """Damping given by a parsed expression tree; positivity is checked lazily."""
    ast: ExprNode
    text: str = ""

    def render(self) -> str:
        return self.text or self.ast.render()


DampingSpec = Union[Constant, Power, Expr]


def telegraph(a: float) -> Constant:
    """Weakly damped wave equation, f = a."""
    return Constant(a)


def kelvin_voigt(a: float) -> Power:
    """Strongly damped wave equation, f(s) = a*s."""
    return Power(a, 1.0)


def fractional(a: float, theta: float) -> Power:
    return Power(a, theta)


# =============================================================================
# TOKENIZER AND PARSER
# =============================================================================

@dataclass(frozen=True)
class _Token:
    kind: str       # "number", "name", "op" or "end"
    text: str
    offset: int     # byte offset in the UTF-8 encoding


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


def _tokenize(text: str) -> List[_Token]:
    tokens = []
    position = 0
    while True:
        match = TOKEN_PATTERN.match(text, position)
        if match is None:
            rest = text[position:]
            stripped = rest.lstrip()
            if not stripped:
                break
            index = position + (len(rest) - len(stripped))
            raise ParseError(_byte_offset(text, index), f"unexpected character {stripped[0]!r}")
        kind = match.lastgroup
        start = match.start(kind)
        tokens.append(_Token(kind, match.group(kind), _byte_offset(text, start)))
        position = match.end()
    tokens.append(_Token("end", "", _byte_offset(text, len(text))))
    return tokens


class _PrattParser:
    """Pratt parser over the token list of one expression."""

    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.index = 0

    def peek(self) -> _Token:
        return self.tokens[self.index]

    def advance(self) -> _Token:
        token = self.tokens[self.index]
        if token.kind != "end":
            self.index += 1
        return token

    def expect(self, op: str, message: str) -> _Token:
        token = self.peek()
        if token.kind != "op" or token.text != op:
            raise ParseError(token.offset, message)
        return self.advance()

    def left_binding_power(self, token: _Token) -> int:
        if token.kind == "op":
            return BINARY_BINDING_POWER.get(token.text, 0)
        return 0

    def parse(self) -> ExprNode:
        if self.peek().kind == "end":
            raise ParseError(self.peek().offset, "empty expression")
        node = self.expression(0)
        trailing = self.peek()
        if trailing.kind != "end":
            raise ParseError(trailing.offset, f"unexpected trailing token {trailing.text!r}")
        return node

    def expression(self, right_binding_power: int) -> ExprNode:
        left = self.nud(self.advance())
        while right_binding_power < self.left_binding_power(self.peek()):
            left = self.led(self.advance(), left)
        return left

    def nud(self, token: _Token) -> ExprNode:
        if token.kind == "number":
            return Number(float(token.text))
        if token.kind == "name":
            if token.text == VARIABLE_NAME:
                return Variable()
            if token.text in FUNCTION_ARITY:
                return self.call(token)
            raise ParseError(token.offset, f"unknown identifier {token.text!r}")
        if token.kind == "op" and token.text == "-":
            return Negate(self.expression(UNARY_MINUS_BINDING_POWER))
        if token.kind == "op" and token.text == "(":
            inner = self.expression(0)
            self.expect(")", "expected ')'")
            return inner
        raise ParseError(token.offset, "expected expression")

    def led(self, token: _Token, left: ExprNode) -> ExprNode:
        power = BINARY_BINDING_POWER[token.text]
        if token.text == "^":
            # one less than its own power makes '^' right associative
            return BinaryOp("^", left, self.expression(power - 1))
        return BinaryOp(token.text, left, self.expression(power))

    def call(self, name: _Token) -> ExprNode:
        self.expect("(", f"expected '(' after {name.text}")
        args = [self.expression(0)]
        while self.peek().kind == "op" and self.peek().text == ",":
            self.advance()
            args.append(self.expression(0))
        self.expect(")", "expected ')'")
        arity = FUNCTION_ARITY[name.text]
        if len(args) != arity:
            raise ParseError(name.offset, f"{name.text} takes {arity} argument(s), got {len(args)}")
        return Call(name.text, tuple(args))


def parse_damping(text: str) -> Expr:
    """
    Parse a damping expression into an AST-backed damping specification.

    Args:
        text (str): Infix expression in the variable s, e.g. "2*s^0.5"

    Returns:
        Expr: Damping backed by the parsed tree (no constant folding)

    Raises:
        ParseError: On empty input, unknown identifiers, unbalanced
            parentheses, wrong arity or trailing tokens; carries the byte offset

    Example:
        >>> parse_damping("s*(1+")
        Traceback (most recent call last):
        errors.ParseError: expected expression at offset 5
    """
    if not isinstance(text, str):
        raise ParseError(0, "expression must be text")
    try:
        return Expr(_PrattParser(text).parse(), text)
    except RecursionError:
        raise ParseError(0, "expression nested too deeply")


# =============================================================================
# EVALUATION
# =============================================================================

def eval_damping(spec: DampingSpec, s: float) -> float:
    """
    Evaluate f(s) for a damping specification.

    Args:
        spec (DampingSpec): Constant, Power or Expr damping
        s (float): Positive spectral value

    Returns:
        float: The finite, positive value f(s)

    Raises:
        EvalError: If s <= 0, the expression hits a domain violation, or the
            result is non-finite or not positive
    """
    if not s > 0.0:
        raise EvalError(f"damping is only defined for s > 0, got {s!r}")
    if isinstance(spec, Constant):
        value = float(spec.a)
    elif isinstance(spec, Power):
        value = spec.a * s ** spec.theta
    else:
        value = spec.ast.evaluate(s)
    if not math.isfinite(value):
        raise EvalError(f"f({s!r}) = {value!r} is not finite")
    if value <= 0.0:
        raise EvalError(f"f({s!r}) = {value!r} is not positive")
    return value


def eval_damping_many(spec: DampingSpec, values: Sequence[float]) -> np.ndarray:
    """Evaluate f on every value of a sequence, in order."""
    return np.array([eval_damping(spec, float(s)) for s in values], dtype=float)


def damping_from_config(source: Any) -> DampingSpec:
    """
    Build a damping from a run-configuration entry.

    Args:
        source: Either expression text, or a dict with "type" in
            {"constant", "power", "expr"} and the matching fields

    Returns:
        DampingSpec: The damping described by the entry

    Raises:
        DampingError: If the entry has an unknown shape or invalid parameters
        ParseError: If expression text is malformed
    """
    if isinstance(source, str):
        return parse_damping(source)
    if isinstance(source, (int, float)) and not isinstance(source, bool):
        return Constant(float(source))
    if not isinstance(source, dict):
        raise DampingError(f"unsupported damping entry {source!r}")
    kind = source.get("type")
    try:
        if kind == "constant":
            return Constant(float(source["a"]))
        if kind == "power":
            return Power(float(source["a"]), float(source["theta"]))
        if kind == "expr":
            return parse_damping(source["text"])
    except KeyError as e:
        raise DampingError(f"damping entry {source!r} is missing {e}")
    raise DampingError(f"unknown damping type {kind!r}")
