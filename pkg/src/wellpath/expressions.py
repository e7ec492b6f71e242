"""Arithmetic expressions over named variables.

Potentials and confinement minorants arrive as strings; this module turns
them into small ASTs and evaluates those on floats or numpy arrays.

Grammar (standard precedence, ^ binds tightest and associates right):

    expr    : term (('+' | '-') term)*
    term    : factor (('*' | '/') factor)*
    factor  : ('+' | '-') factor | power
    power   : atom (('^' | '**') factor)?
    atom    : NUMBER | NAME | NAME '(' expr (',' expr)* ')' | '(' expr ')'

Known functions: abs, sqrt, exp, log, sin, cos, tanh (unary) and min, max
(two or more arguments).  Every intermediate value is checked to be finite
and real; anything else raises EvalDomainError instead of propagating NaNs.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import reduce
from typing import Union

import numpy as np

from .errors import EvalDomainError, ParseError

__all__ = [
    "Num",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "ExprNode",
    "parse_expression",
    "evaluate",
    "free_variables",
    "to_source",
]


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "ExprNode"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "ExprNode"
    right: "ExprNode"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


ExprNode = Union[Num, Var, Neg, BinOp, Call]

_UNARY_FUNCS = ("abs", "sqrt", "exp", "log", "sin", "cos", "tanh")
_VARIADIC_FUNCS = ("min", "max")
FUNCTIONS = _UNARY_FUNCS + _VARIADIC_FUNCS

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\*\*|[-+*/^(),])
    """,
    re.VERBOSE,
)


def _tokenize(source):
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", pos)
        if m.lastgroup != "ws":
            kind = m.lastgroup
            text = m.group()
            if kind == "op" and text == "**":
                text = "^"
            tokens.append((kind, text, m.start()))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source, variables):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0
        self.variables = frozenset(variables)

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        kind, got, pos = self.peek()
        if kind != "op" or got != text:
            shown = got if kind != "end" else "end of input"
            raise ParseError(f"expected {text!r}, found {shown!r}", pos)
        return self.advance()

    def parse(self):
        node = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {text!r} after expression", pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.advance()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[:2] in (("op", "*"), ("op", "/")):
            op = self.advance()[1]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        kind, text, _ = self.peek()
        if kind == "op" and text in ("+", "-"):
            self.advance()
            operand = self.factor()
            return operand if text == "+" else Neg(operand)
        return self.power()

    def power(self):
        base = self.atom()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.advance()
            # right-associative, and -x^2 parses as -(x^2)
            return BinOp("^", base, self.factor())
        return base

    def atom(self):
        kind, text, pos = self.advance()
        if kind == "num":
            return Num(float(text))
        if kind == "name":
            if self.peek()[:2] == ("op", "("):
                return self.call(text, pos)
            if text not in self.variables:
                raise ParseError(f"unknown variable {text!r}", pos)
            return Var(text)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        shown = text if kind != "end" else "end of input"
        raise ParseError(f"expected a value, found {shown!r}", pos)

    def call(self, name, pos):
        if name not in FUNCTIONS:
            raise ParseError(f"unknown function {name!r}", pos)
        self.expect("(")
        args = [self.expr()]
        while self.peek()[:2] == ("op", ","):
            self.advance()
            args.append(self.expr())
        self.expect(")")
        if name in _UNARY_FUNCS and len(args) != 1:
            raise ParseError(f"{name} takes exactly 1 argument, got {len(args)}", pos)
        if name in _VARIADIC_FUNCS and len(args) < 2:
            raise ParseError(f"{name} takes at least 2 arguments, got {len(args)}", pos)
        return Call(name, tuple(args))


def parse_expression(source, variables):
    """Parse ``source`` into an ExprNode; names outside ``variables`` are errors."""
    if not isinstance(source, str):
        raise ParseError(f"expression must be a string, got {type(source).__name__}")
    if not source.strip():
        raise ParseError("empty expression")
    return _Parser(source, variables).parse()


def free_variables(node):
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Neg):
        return free_variables(node.operand)
    if isinstance(node, BinOp):
        return free_variables(node.left) | free_variables(node.right)
    if isinstance(node, Call):
        out = set()
        for a in node.args:
            out |= free_variables(a)
        return out
    return set()


def _bad(what):
    raise EvalDomainError(f"non-real or non-finite value in {what}")


def _checked(value, what):
    if isinstance(value, np.ndarray):
        if not np.isfinite(value).all():
            _bad(what)
    elif not math.isfinite(value):
        _bad(what)
    return value


_SCALAR_FUNCS = {
    "abs": abs,
    "sqrt": math.sqrt,
    "exp": math.exp,
    "log": math.log,
    "sin": math.sin,
    "cos": math.cos,
    "tanh": math.tanh,
}

_ARRAY_FUNCS = {
    "abs": np.abs,
    "sqrt": np.sqrt,
    "exp": np.exp,
    "log": np.log,
    "sin": np.sin,
    "cos": np.cos,
    "tanh": np.tanh,
}


def _eval(node, env):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Neg):
        return -_eval(node.operand, env)
    if isinstance(node, BinOp):
        a = _eval(node.left, env)
        b = _eval(node.right, env)
        op = node.op
        if op == "+":
            return _checked(a + b, "'+'")
        if op == "-":
            return _checked(a - b, "'-'")
        if op == "*":
            return _checked(a * b, "'*'")
        if op == "/":
            if isinstance(b, np.ndarray):
                if np.any(b == 0.0):
                    raise EvalDomainError("division by zero")
            elif b == 0.0:
                raise EvalDomainError("division by zero")
            return _checked(a / b, "'/'")
        # power
        if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
            with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
                return _checked(np.power(a, b), "'^'")
        try:
            return _checked(math.pow(a, b), "'^'")
        except (ValueError, OverflowError) as exc:
            raise EvalDomainError(f"'^' out of domain: {exc}") from None
    if isinstance(node, Call):
        vals = [_eval(a, env) for a in node.args]
        name = node.func
        if name == "min" or name == "max":
            if any(isinstance(v, np.ndarray) for v in vals):
                fn = np.minimum if name == "min" else np.maximum
                return reduce(fn, vals)
            return min(vals) if name == "min" else max(vals)
        v = vals[0]
        if isinstance(v, np.ndarray):
            with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
                return _checked(_ARRAY_FUNCS[name](v), name)
        try:
            return _checked(_SCALAR_FUNCS[name](v), name)
        except (ValueError, OverflowError) as exc:
            raise EvalDomainError(f"{name} out of domain: {exc}") from None
    raise TypeError(f"not an expression node: {node!r}")


def evaluate(node, env):
    """Evaluate ``node``.  ``env`` maps variable names to floats or arrays.

    Array values must share a common broadcast shape; the result is a float
    when every input is a float (a constant expression stays a float even
    under an array environment, callers broadcast if they need to).
    """
    return _eval(node, env)


_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_NEG_PREC = 3  # between '*' and '^', matching the parser


def _render(node, min_prec):
    """Emit ``node`` with parentheses exactly where ``min_prec`` demands them."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({', '.join(_render(a, 0) for a in node.args)})"
    if isinstance(node, Neg):
        text = f"-{_render(node.operand, _NEG_PREC)}"
        return f"({text})" if _NEG_PREC < min_prec else text
    prec = _PRECEDENCE[node.op]
    if node.op == "^":
        # right-associative: the left child needs parens on equal precedence
        text = f"{_render(node.left, prec + 1)} ^ {_render(node.right, prec)}"
    else:
        text = f"{_render(node.left, prec)} {node.op} {_render(node.right, prec + 1)}"
    return f"({text})" if prec < min_prec else text


def to_source(node):
    """Render an AST back to a string that parses to an equivalent tree."""
    return _render(node, 0)
