"""A small arithmetic expression language for exponent, weight and profile formulas.

Grammar (lowest to highest precedence)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' unary)?          # right associative
    atom   := NUMBER | NAME | NAME '(' expr (',' expr)* ')' | '(' expr ')'

Variables are ``x1 .. xn`` (coordinates of the evaluation point) and ``r``
(its Euclidean norm).  Constants are ``pi`` and ``e``.  Functions are
``exp, log, abs, sqrt`` (one argument) and ``min, max`` (two arguments).

Evaluation is vectorised over an ``(N, n)`` array of points and never returns
a silent ``inf``/``nan``: singular operations raise :class:`EvalError`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "ExprError",
    "ExprSyntaxError",
    "UnknownIdentifierError",
    "ArityError",
    "EvalError",
    "DimensionError",
    "Num",
    "Var",
    "Const",
    "Neg",
    "BinOp",
    "Call",
    "Expr",
    "parse",
    "to_string",
    "evaluate",
    "eval_expr",
    "grad_numeric",
    "grad_numeric_array",
    "max_var_index",
    "is_constant",
]


class ExprError(Exception):
    """Base class for expression errors."""


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, offset: int, expected=()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = f" (expected one of: {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"{message} at offset {offset}{detail}")


class UnknownIdentifierError(ExprSyntaxError):
    pass


class ArityError(ExprSyntaxError):
    pass


class EvalError(ExprError, ArithmeticError):
    """Raised on a mathematical singularity during evaluation."""


class DimensionError(ExprError, ValueError):
    pass


# --------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    # 1-based coordinate index; 0 means r = |x|
    index: int


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


Expr = Union[Num, Var, Const, Neg, BinOp, Call]

_CONSTANTS = {"pi": math.pi, "e": math.e}
_ARITY = {"exp": 1, "log": 1, "abs": 1, "sqrt": 1, "min": 2, "max": 2}


# --------------------------------------------------------------------------
# Tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str  # 'num', 'name', 'op', 'end'
    text: str
    offset: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos,
                                  {"number", "identifier", "operator", "("})
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), pos))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        if self.tok.text != text or self.tok.kind not in ("op",):
            raise ExprSyntaxError(f"unexpected {self._describe(self.tok)}", self.tok.offset, {text})
        return self.advance()

    @staticmethod
    def _describe(tok: _Tok) -> str:
        return "end of input" if tok.kind == "end" else f"token {tok.text!r}"

    def parse(self) -> Expr:
        node = self.expr()
        if self.tok.kind != "end":
            raise ExprSyntaxError(f"unexpected {self._describe(self.tok)}", self.tok.offset,
                                  {"+", "-", "*", "/", "^", "end of input"})
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.tok.kind == "op" and self.tok.text == "-":
            self.advance()
            return Neg(self.unary())
        if self.tok.kind == "op" and self.tok.text == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            return Num(float(tok.text))
        if tok.kind == "name":
            self.advance()
            name = tok.text
            if self.tok.kind == "op" and self.tok.text == "(":
                if name not in _ARITY:
                    raise UnknownIdentifierError(f"unknown function {name!r}", tok.offset,
                                                 set(_ARITY))
                self.advance()
                args = [self.expr()]
                while self.tok.kind == "op" and self.tok.text == ",":
                    self.advance()
                    args.append(self.expr())
                self.expect(")")
                if len(args) != _ARITY[name]:
                    raise ArityError(
                        f"{name} takes {_ARITY[name]} argument(s), got {len(args)}",
                        tok.offset)
                return Call(name, tuple(args))
            if name in _CONSTANTS:
                return Const(name)
            if name == "r":
                return Var(0)
            m = re.fullmatch(r"x([1-9]\d*)", name)
            if m:
                return Var(int(m.group(1)))
            if name in _ARITY:
                raise ExprSyntaxError(f"function {name!r} needs arguments", self.tok.offset, {"("})
            raise UnknownIdentifierError(f"unknown identifier {name!r}", tok.offset,
                                         {"x1..xn", "r", "pi", "e"})
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        raise ExprSyntaxError(f"unexpected {self._describe(tok)}", tok.offset,
                              {"number", "identifier", "(", "-"})


def parse(text: str) -> Expr:
    """Parse ``text`` into an expression tree."""
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0, {"number", "identifier", "(", "-"})
    return _Parser(text).parse()


# --------------------------------------------------------------------------
# Pretty printing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}


def _prec(node: Expr) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _PREC["neg"]
    return _PREC["atom"]


def _fmt_num(v: float) -> str:
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def to_string(node: Expr) -> str:
    """Render with the minimal parentheses needed to re-parse to the same tree."""
    if isinstance(node, Num):
        return _fmt_num(node.value)
    if isinstance(node, Var):
        return "r" if node.index == 0 else f"x{node.index}"
    if isinstance(node, Const):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({', '.join(to_string(a) for a in node.args)})"
    if isinstance(node, Neg):
        inner = to_string(node.operand)
        if _prec(node.operand) < _PREC["neg"]:
            inner = f"({inner})"
        return f"-{inner}"
    p = _PREC[node.op]
    left, right = to_string(node.left), to_string(node.right)
    if node.op == "^":
        # base must be an atom; exponent is parsed as unary
        if _prec(node.left) <= p:
            left = f"({left})"
        if _prec(node.right) < _PREC["neg"]:
            right = f"({right})"
    else:
        if _prec(node.left) < p:
            left = f"({left})"
        if _prec(node.right) <= p:
            right = f"({right})"
    return f"{left} {node.op} {right}"


# --------------------------------------------------------------------------
# Evaluation


def max_var_index(node: Expr) -> int:
    """Highest coordinate index used (0 if only ``r`` or no variables)."""
    if isinstance(node, Var):
        return node.index
    if isinstance(node, Neg):
        return max_var_index(node.operand)
    if isinstance(node, BinOp):
        return max(max_var_index(node.left), max_var_index(node.right))
    if isinstance(node, Call):
        return max(max_var_index(a) for a in node.args)
    return 0


def is_constant(node: Expr) -> bool:
    """True when the tree contains no variable at all."""
    if isinstance(node, Var):
        return False
    if isinstance(node, Neg):
        return is_constant(node.operand)
    if isinstance(node, BinOp):
        return is_constant(node.left) and is_constant(node.right)
    if isinstance(node, Call):
        return all(is_constant(a) for a in node.args)
    return True


def _eval(node: Expr, X: np.ndarray, norm: np.ndarray) -> np.ndarray:
    if isinstance(node, Num):
        return np.full(X.shape[0], node.value)
    if isinstance(node, Const):
        return np.full(X.shape[0], _CONSTANTS[node.name])
    if isinstance(node, Var):
        return norm if node.index == 0 else X[:, node.index - 1]
    if isinstance(node, Neg):
        return -_eval(node.operand, X, norm)
    if isinstance(node, Call):
        args = [_eval(a, X, norm) for a in node.args]
        a = args[0]
        if node.func == "exp":
            out = np.exp(a)
        elif node.func == "log":
            bad = a <= 0
            if np.any(bad):
                raise EvalError(f"log of non-positive value {a[bad][0]!r}")
            out = np.log(a)
        elif node.func == "sqrt":
            bad = a < 0
            if np.any(bad):
                raise EvalError(f"sqrt of negative value {a[bad][0]!r}")
            out = np.sqrt(a)
        elif node.func == "abs":
            out = np.abs(a)
        elif node.func == "min":
            out = np.minimum(a, args[1])
        else:
            out = np.maximum(a, args[1])
        return _checked(out, node.func)
    left = _eval(node.left, X, norm)
    right = _eval(node.right, X, norm)
    if node.op == "+":
        return _checked(left + right, "+")
    if node.op == "-":
        return _checked(left - right, "-")
    if node.op == "*":
        return _checked(left * right, "*")
    if node.op == "/":
        if np.any(right == 0):
            raise EvalError("division by zero")
        return _checked(left / right, "/")
    # '^'
    integral = right == np.round(right)
    bad = (left < 0) & ~integral
    if np.any(bad):
        raise EvalError(f"negative base {left[bad][0]!r} with non-integer exponent")
    bad = (left == 0) & (right < 0)
    if np.any(bad):
        raise EvalError("zero raised to a negative power")
    with np.errstate(over="ignore", invalid="ignore"):
        out = np.power(left, right)
    return _checked(out, "^")


def _checked(values: np.ndarray, what: str) -> np.ndarray:
    if not np.all(np.isfinite(values)):
        raise EvalError(f"non-finite result in {what!r}")
    return values


def evaluate(node: Expr, X) -> np.ndarray:
    """Evaluate at every row of ``X`` (shape ``(N, n)``); returns shape ``(N,)``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    need = max_var_index(node)
    if need > X.shape[1]:
        raise DimensionError(f"expression uses x{need} but points have dimension {X.shape[1]}")
    norm = np.sqrt(np.einsum("ij,ij->i", X, X))
    with np.errstate(all="ignore"):
        return _eval(node, X, norm)


def eval_expr(node: Expr, point) -> float:
    """Evaluate at a single point."""
    return float(evaluate(node, np.atleast_1d(np.asarray(point, dtype=float))[None, :])[0])


def _steps(X: np.ndarray, h) -> np.ndarray:
    if h is None:
        return 1e-5 * np.maximum(1.0, np.abs(X))
    return np.broadcast_to(np.asarray(h, dtype=float), X.shape)


def grad_numeric_array(node: Expr, X, h=None) -> np.ndarray:
    """Central-difference gradient at every row of ``X``; shape ``(N, n)``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    H = _steps(X, h)
    out = np.empty_like(X)
    for i in range(X.shape[1]):
        step = np.zeros_like(X)
        step[:, i] = H[:, i]
        try:
            out[:, i] = (evaluate(node, X + step) - evaluate(node, X - step)) / (2 * H[:, i])
        except EvalError as exc:
            raise EvalError(f"singularity within difference stencil: {exc}") from exc
    return out


def grad_numeric(node: Expr, point, h=None) -> np.ndarray:
    """Central-difference gradient at one point.

    The default step is ``1e-5 * max(1, |x_i|)`` per coordinate.
    """
    point = np.atleast_1d(np.asarray(point, dtype=float))
    return grad_numeric_array(node, point[None, :], h)[0]
