"""Recursive-descent parser for scalar, phase-space and operator expressions.

Grammar::

    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := '-' unary | factor
    factor   := base ('^' exponent)?
    base     := number | identifier | 'sqrt' '(' expr ')' | '(' expr ')'
              | '{' expr ',' expr '}' | '[' expr ',' expr ']'
    exponent := integer | '-' integer | '(' '-'? integer ('/' '2')? ')'

Identifiers resolve against an :class:`Environment`: coordinates,
parameters, momenta ``p1..pn`` (classical mode), derivative tokens
``d1, d12, d112 ...`` (quantum mode) and bound names such as ``H`` or ``K2``.
Braces are the Poisson bracket in classical mode and the anticommutator in
quantum mode; square brackets are the commutator (quantum only).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Mapping

from .errors import DegenerateInputError, ParseError
from .operators import DifferentialOperator, anticommutator, commutator
from .phase import MomentumPolynomial, poisson_bracket
from .scalar import FunctionField, Scalar

__all__ = [
    "Node",
    "Num",
    "Name",
    "Neg",
    "BinOp",
    "Pow",
    "Sqrt",
    "Brace",
    "Bracket",
    "parse",
    "Environment",
    "evaluate",
    "parse_expression",
    "weight",
    "names",
]

MODES = ("scalar", "classical", "quantum")


# -- syntax tree ---------------------------------------------------------------

class Node:
    line: int = 1
    column: int = 1


@dataclass
class Num(Node):
    value: Fraction


@dataclass
class Name(Node):
    name: str
    line: int = 1
    column: int = 1


@dataclass
class Neg(Node):
    arg: Node


@dataclass
class BinOp(Node):
    op: str
    left: Node
    right: Node


@dataclass
class Pow(Node):
    base: Node
    exponent: Fraction


@dataclass
class Sqrt(Node):
    arg: Node


@dataclass
class Brace(Node):
    left: Node
    right: Node


@dataclass
class Bracket(Node):
    left: Node
    right: Node


# -- tokenizer -----------------------------------------------------------------

_TOKEN = re.compile(r"(\d+(?:\.\d+)?)|([A-Za-z][A-Za-z0-9_]*)")


@dataclass
class _Tok:
    kind: str  # "num", "id", "op", "end"
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        ch = text[pos]
        if ch == "\n":
            line, line_start, pos = line + 1, pos + 1, pos + 1
            continue
        if ch.isspace():
            pos += 1
            continue
        col = pos - line_start + 1
        m = _TOKEN.match(text, pos)
        if m:
            kind = "num" if m.group(1) else "id"
            toks.append(_Tok(kind, m.group(0), line, col))
            pos = m.end()
            continue
        if ch == "\u2212":
            ch = "-"
        if ch not in "+-*/^(){}[],":
            raise ParseError(f"unexpected character {ch!r}", line, col)
        toks.append(_Tok("op", ch, line, col))
        pos += 1
    toks.append(_Tok("end", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.column)

    def accept(self, text):
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.accept(text):
            found = self.tok.text or "end of input"
            self.error(f"expected {text!r}, found {found!r}")

    def parse(self) -> Node:
        if self.tok.kind == "end":
            self.error("empty expression")
        node = self.expr()
        if self.tok.kind != "end":
            self.error(f"unexpected {self.tok.text!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.accept("-"):
            return Neg(self.unary())
        if self.accept("+"):
            return self.unary()
        return self.factor()

    def factor(self) -> Node:
        node = self.base()
        if self.accept("^"):
            node = Pow(node, self.exponent())
        return node

    def _integer(self) -> int:
        sign = -1 if self.accept("-") else 1
        tok = self.tok
        if tok.kind != "num" or "." in tok.text:
            self.error("exponent must be an integer or k/2")
        self.i += 1
        return sign * int(tok.text)

    def exponent(self) -> Fraction:
        start = self.tok
        if self.accept("("):
            k = self._integer()
            if self.accept("/"):
                den = self._integer()
                if den != 2:
                    self.error("unsupported exponent: only k/2 fractions are allowed", start)
                e = Fraction(k, 2)
            else:
                e = Fraction(k)
            self.expect(")")
            return e
        return Fraction(self._integer())

    def base(self) -> Node:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Num(Fraction(tok.text))
        if tok.kind == "id":
            self.i += 1
            if tok.text == "sqrt" and self.accept("("):
                arg = self.expr()
                self.expect(")")
                return Sqrt(arg)
            return Name(tok.text, tok.line, tok.column)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        for open_, close, cls in (("{", "}", Brace), ("[", "]", Bracket)):
            if self.accept(open_):
                a = self.expr()
                self.expect(",")
                b = self.expr()
                self.expect(close)
                return cls(a, b)
        if tok.kind == "end":
            self.error("unexpected end of input")
        self.error(f"unexpected {tok.text!r}")


def parse(text: str) -> Node:
    """Parse ``text`` into a syntax tree (no name resolution)."""
    return _Parser(text).parse()


# -- evaluation ----------------------------------------------------------------

_DERIV = re.compile(r"d([1-9]+)$")
_MOM = re.compile(r"p([1-9][0-9]*)$")


@dataclass
class Environment:
    """Name resolution and product semantics for one expression mode."""

    field: FunctionField
    mode: str = "classical"
    bindings: Mapping[str, object] = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.field.momenta:
            self.field = self.field.without_momenta()

    def resolve(self, node: Name):
        name = node.name
        f = self.field
        if name in self.bindings:
            return self.bindings[name]
        if name in f.coords:
            return f.coord(name)
        if name in f.params:
            return f.param(name)
        m = _MOM.match(name)
        if m and self.mode == "classical" and int(m.group(1)) <= f.n:
            return MomentumPolynomial.momentum(int(m.group(1)) - 1, f)
        m = _DERIV.match(name)
        if m and self.mode == "quantum":
            idx = [int(c) - 1 for c in m.group(1)]
            if max(idx) < f.n:
                return DifferentialOperator.partial(*idx, field=f)
        raise ParseError(f"unknown identifier {name!r}", node.line, node.column)


def _is_scalar(v) -> bool:
    return isinstance(v, Scalar)


def _lift_number(v, env: Environment):
    return env.field(v) if isinstance(v, Fraction) else v


def _bracket(a, b, env: Environment, kind: str):
    if env.mode == "quantum":
        a = a if isinstance(a, DifferentialOperator) else DifferentialOperator.multiplication(_lift_number(a, env))
        b = b if isinstance(b, DifferentialOperator) else DifferentialOperator.multiplication(_lift_number(b, env))
        return anticommutator(a, b) if kind == "brace" else commutator(a, b)
    if kind == "bracket":
        raise ParseError("commutator brackets are only available in quantum mode")
    if env.mode == "scalar":
        raise ParseError("Poisson brackets need classical mode")
    a = a if not isinstance(a, Fraction) else env.field(a)
    b = b if not isinstance(b, Fraction) else env.field(b)
    if isinstance(a, Scalar) and not a.field.momenta:
        a = MomentumPolynomial.constant(a, a.field)
    if isinstance(b, Scalar) and not b.field.momenta:
        b = MomentumPolynomial.constant(b, b.field)
    return poisson_bracket(a, b)


def _divide(a, b, env: Environment):
    if isinstance(b, Fraction):
        if b == 0:
            raise DegenerateInputError("division by zero")
        return a / b
    if isinstance(a, Fraction):
        a = env.field(a)
    if isinstance(b, MomentumPolynomial):
        if b.degree() <= 0:
            b = b.coefficient((0,) * b.n)
        else:
            a = a.to_phase() if isinstance(a, MomentumPolynomial) else a
            return a / b.to_phase()
    if isinstance(b, DifferentialOperator):
        if not b.is_multiplication():
            raise ParseError("division by a differential operator")
        b = b.coefficient((0,) * b.n)
    if isinstance(b, Scalar) and not b:
        raise DegenerateInputError("division by zero")
    return a / b


def _power(v, e: Fraction, env: Environment, node: Pow):
    if e.denominator != 1:
        # half-integer power: only of a bare coordinate
        if isinstance(node.base, Name) and node.base.name in env.field.coords:
            s = env.field.sqrt_coord(node.base.name)
            k = e.numerator
            return s ** k if k >= 0 else s.inverse() ** (-k)
        raise ParseError("half-integer powers apply to coordinates only", node.base.line, node.base.column)
    k = int(e)
    if isinstance(v, Fraction):
        return v ** k
    if k < 0:
        if isinstance(v, Scalar):
            return v.inverse() ** (-k)
        if isinstance(v, MomentumPolynomial) and v.degree() <= 0:
            return v.coefficient((0,) * v.n).inverse() ** (-k)
        raise ParseError("negative powers apply to functions only")
    return v ** k


def _eval(node: Node, env: Environment):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Name):
        return env.resolve(node)
    if isinstance(node, Neg):
        return -_eval(node.arg, env)
    if isinstance(node, BinOp):
        a, b = _eval(node.left, env), _eval(node.right, env)
        if node.op == "+":
            return _add(a, b, env)
        if node.op == "-":
            return _add(a, -b, env)
        if node.op == "*":
            if isinstance(a, Fraction) and isinstance(b, Fraction):
                return a * b
            a, b = _lift_number(a, env), _lift_number(b, env)
            return a * b
        return _divide(a, b, env)
    if isinstance(node, Pow):
        return _power(_eval(node.base, env), node.exponent, env, node)
    if isinstance(node, Sqrt):
        arg = node.arg
        if isinstance(arg, Name) and arg.name in env.field.coords:
            return env.field.sqrt_coord(arg.name)
        raise ParseError("sqrt applies to a single coordinate")
    if isinstance(node, Brace):
        return _bracket(_eval(node.left, env), _eval(node.right, env), env, "brace")
    if isinstance(node, Bracket):
        return _bracket(_eval(node.left, env), _eval(node.right, env), env, "bracket")
    raise TypeError(f"unknown node {node!r}")


def _add(a, b, env):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a + b
    a, b = _lift_number(a, env), _lift_number(b, env)
    if isinstance(a, Scalar) and not isinstance(b, Scalar):
        return b + a
    return a + b


def evaluate(node: Node, env: Environment):
    """Evaluate a syntax tree; numbers become Scalars of ``env.field``."""
    v = _eval(node, env)
    return env.field(v) if isinstance(v, Fraction) else v


def parse_expression(text: str, field: FunctionField, mode: str = "classical",
                     bindings: Mapping[str, object] | None = None):
    """Parse and evaluate ``text`` to a Scalar, MomentumPolynomial or DifferentialOperator."""
    return evaluate(parse(text), Environment(field, mode, dict(bindings or {})))


def weight(node: Node, weights: Mapping[str, int], mode: str = "classical") -> frozenset[int]:
    """Possible grading weights of a relation expression over named generators.

    Numbers weigh 0, each entry of ``weights`` its value; products add,
    sums collect; a bracket of weights ``u, v`` has weight ``u + v - 1``.
    """
    if isinstance(node, Num):
        return frozenset({0})
    if isinstance(node, Name):
        if node.name not in weights:
            raise ParseError(f"no weight for {node.name!r}", node.line, node.column)
        return frozenset({weights[node.name]})
    if isinstance(node, Neg):
        return weight(node.arg, weights, mode)
    if isinstance(node, BinOp):
        a, b = weight(node.left, weights, mode), weight(node.right, weights, mode)
        if node.op in "+-":
            return a | b
        if node.op == "*":
            return frozenset(x + y for x in a for y in b)
        return frozenset(x - y for x in a for y in b)
    if isinstance(node, Pow):
        if node.exponent.denominator != 1:
            raise ParseError("fractional power in a relation")
        return frozenset(x * int(node.exponent) for x in weight(node.base, weights, mode))
    if isinstance(node, Brace) and mode == "quantum":
        a, b = weight(node.left, weights, mode), weight(node.right, weights, mode)
        return frozenset(x + y for x in a for y in b)
    if isinstance(node, (Brace, Bracket)):
        a, b = weight(node.left, weights, mode), weight(node.right, weights, mode)
        return frozenset(x + y - 1 for x in a for y in b)
    raise ParseError(f"cannot weigh {type(node).__name__}")


def names(node: Node) -> set[str]:
    """Identifiers used in a syntax tree."""
    if isinstance(node, Name):
        return {node.name}
    out: set[str] = set()
    for child in vars(node).values():
        if isinstance(child, Node):
            out |= names(child)
    return out
