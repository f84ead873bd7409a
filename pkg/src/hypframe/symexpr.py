"""Closed-form expression DSL in one variable t with exact symbolic derivatives.

Grammar (whitespace insignificant, ^ binds tighter than unary minus,
then * /, then + -; same-precedence binary operators associate left):

    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := '-' unary | power
    power    := atom ('^' exponent)*
    exponent := '-'? INTEGER | '(' expr ')'     (must fold to an integer)
    atom     := NUMBER | 't' | FUNC '(' expr ')' | '(' expr ')'
    FUNC     := sin cos tan sinh cosh tanh exp log sqrt atan artanh

Only light simplification is applied when trees are built (constant
folding plus 0/1 identities); evaluation follows IEEE semantics with
domain violations reported against the offending sub-expression.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import HypframeError, NumericError

__all__ = [
    "Expr", "Num", "Var", "Neg", "Add", "Sub", "Mul", "Div", "Pow", "Fun",
    "parse_expr", "diff_expr", "eval_expr", "to_source", "vectorized",
    "ExprSyntaxError", "UnknownIdentifierError", "NonIntegerExponentError",
    "ExprDomainError",
    "add", "sub", "mul", "div", "neg", "pow_", "fun", "num",
    "T", "ZERO", "ONE",
]


class ExprSyntaxError(HypframeError, ValueError):
    """Parse failure; `column` is the 1-based offset into the source."""

    def __init__(self, message, column):
        super().__init__(f"{message} (column {column})")
        self.column = column


class UnknownIdentifierError(ExprSyntaxError):
    pass


class NonIntegerExponentError(ExprSyntaxError):
    pass


class ExprDomainError(NumericError):
    """Evaluation hit a domain violation; carries the offending sub-expression."""

    def __init__(self, message, subexpr):
        super().__init__(f"{message} in {to_source(subexpr)!r}")
        self.subexpr = subexpr


# ---------------------------------------------------------------------------
# AST


class Expr:
    __slots__ = ()

    def __call__(self, t):
        return eval_expr(self, t)

    def __str__(self):
        return to_source(self)


@dataclass(frozen=True, slots=True)
class Num(Expr):
    value: float


@dataclass(frozen=True, slots=True)
class Var(Expr):
    pass


@dataclass(frozen=True, slots=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True, slots=True)
class Add(Expr):
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True, slots=True)
class Sub(Expr):
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True, slots=True)
class Mul(Expr):
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True, slots=True)
class Div(Expr):
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True, slots=True)
class Pow(Expr):
    base: Expr
    exponent: int


@dataclass(frozen=True, slots=True)
class Fun(Expr):
    name: str
    arg: Expr


T = Var()
ZERO = Num(0.0)
ONE = Num(1.0)

FUNCTIONS = ("sin", "cos", "tan", "sinh", "cosh", "tanh",
             "exp", "log", "sqrt", "atan", "artanh")


# ---------------------------------------------------------------------------
# Smart constructors: constant folding and 0/1 identities only.


def num(v) -> Num:
    return Num(float(v))


def _is_const(e, v):
    return isinstance(e, Num) and e.value == v


def add(x: Expr, y: Expr) -> Expr:
    if isinstance(x, Num) and isinstance(y, Num):
        return Num(x.value + y.value)
    if _is_const(x, 0.0):
        return y
    if _is_const(y, 0.0):
        return x
    return Add(x, y)


def sub(x: Expr, y: Expr) -> Expr:
    if isinstance(x, Num) and isinstance(y, Num):
        return Num(x.value - y.value)
    if _is_const(y, 0.0):
        return x
    if _is_const(x, 0.0):
        return neg(y)
    return Sub(x, y)


def mul(x: Expr, y: Expr) -> Expr:
    if isinstance(x, Num) and isinstance(y, Num):
        return Num(x.value * y.value)
    if _is_const(x, 0.0) or _is_const(y, 0.0):
        return ZERO
    if _is_const(x, 1.0):
        return y
    if _is_const(y, 1.0):
        return x
    if _is_const(x, -1.0):
        return neg(y)
    if _is_const(y, -1.0):
        return neg(x)
    return Mul(x, y)


def div(x: Expr, y: Expr) -> Expr:
    if isinstance(x, Num) and isinstance(y, Num) and y.value != 0.0:
        return Num(x.value / y.value)
    if _is_const(y, 1.0):
        return x
    if _is_const(x, 0.0) and not _is_const(y, 0.0):
        return ZERO
    return Div(x, y)


def neg(x: Expr) -> Expr:
    if isinstance(x, Num):
        return Num(-x.value)
    if isinstance(x, Neg):
        return x.arg
    return Neg(x)


def pow_(base: Expr, exponent: int) -> Expr:
    exponent = int(exponent)
    if exponent == 0:
        return ONE
    if exponent == 1:
        return base
    if isinstance(base, Num) and not (base.value == 0.0 and exponent < 0):
        return Num(float(base.value ** exponent))
    return Pow(base, exponent)


def fun(name: str, arg: Expr) -> Expr:
    if name not in FUNCTIONS:
        raise ValueError(f"unknown function {name!r}")
    if isinstance(arg, Num):
        try:
            return Num(_apply(name, arg.value, arg))
        except ExprDomainError:
            pass  # keep the node; evaluation will report it
    return Fun(name, arg)


# ---------------------------------------------------------------------------
# Tokenizer / parser


class _Token:
    __slots__ = ("kind", "text", "column", "value", "is_int")

    def __init__(self, kind, text, column, value=None, is_int=False):
        self.kind = kind
        self.text = text
        self.column = column
        self.value = value
        self.is_int = is_int


def _tokenize(source: str):
    tokens = []
    i, n = 0, len(source)
    while i < n:
        c = source[i]
        col = i + 1
        if c.isspace():
            i += 1
            continue
        if c in "+-*/^()":
            tokens.append(_Token(c, c, col))
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and source[i + 1].isdigit()):
            j = i
            while j < n and source[j].isdigit():
                j += 1
            is_int = True
            if j < n and source[j] == ".":
                is_int = False
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
            if j < n and source[j] in "eE":
                k = j + 1
                if k < n and source[k] in "+-":
                    k += 1
                if k < n and source[k].isdigit():
                    is_int = False
                    j = k
                    while j < n and source[j].isdigit():
                        j += 1
            text = source[i:j]
            tokens.append(_Token("number", text, col, float(text), is_int=is_int))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            tokens.append(_Token("ident", source[i:j], col))
            i = j
            continue
        raise ExprSyntaxError(f"unexpected character {c!r}", col)
    tokens.append(_Token("end", "", n + 1))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.tokens = _tokenize(source)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.peek()
        if tok.kind != kind:
            raise ExprSyntaxError(
                f"expected {kind!r}, found {tok.text or 'end of input'!r}", tok.column)
        return self.advance()

    def parse(self) -> Expr:
        e = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ExprSyntaxError(f"unexpected trailing input {tok.text!r}", tok.column)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek().kind in ("+", "-"):
            op = self.advance().kind
            rhs = self.term()
            e = add(e, rhs) if op == "+" else sub(e, rhs)
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.peek().kind in ("*", "/"):
            op = self.advance().kind
            rhs = self.unary()
            e = mul(e, rhs) if op == "*" else div(e, rhs)
        return e

    def unary(self) -> Expr:
        if self.peek().kind == "-":
            self.advance()
            return neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        e = self.atom()
        while self.peek().kind == "^":
            self.advance()
            e = pow_(e, self.exponent())
        return e

    def exponent(self) -> int:
        tok = self.peek()
        sign = 1
        if tok.kind == "-":
            self.advance()
            sign = -1
            tok = self.peek()
        if tok.kind == "number":
            self.advance()
            if not tok.is_int:
                raise NonIntegerExponentError(
                    f"exponent must be an integer, found {tok.text!r}", tok.column)
            return sign * int(tok.value)
        if tok.kind == "(":
            self.advance()
            inner = self.expr()
            self.expect(")")
            if isinstance(inner, Num) and float(inner.value).is_integer():
                return sign * int(inner.value)
            raise NonIntegerExponentError(
                "exponent must fold to an integer literal", tok.column)
        raise NonIntegerExponentError(
            f"exponent must be an integer, found {tok.text or 'end of input'!r}",
            tok.column)

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            return Num(tok.value)
        if tok.kind == "ident":
            self.advance()
            if tok.text == "t":
                return T
            if tok.text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return fun(tok.text, arg)
            raise UnknownIdentifierError(f"unknown identifier {tok.text!r}", tok.column)
        if tok.kind == "(":
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        raise ExprSyntaxError(
            f"expected expression, found {tok.text or 'end of input'!r}", tok.column)


def parse_expr(source: str) -> Expr:
    """Parse a DSL expression in the variable t."""
    return _Parser(source).parse()


# ---------------------------------------------------------------------------
# Differentiation


def _diff1(e: Expr) -> Expr:
    match e:
        case Num():
            return ZERO
        case Var():
            return ONE
        case Neg(arg=u):
            return neg(_diff1(u))
        case Add(lhs=x, rhs=y):
            return add(_diff1(x), _diff1(y))
        case Sub(lhs=x, rhs=y):
            return sub(_diff1(x), _diff1(y))
        case Mul(lhs=x, rhs=y):
            return add(mul(_diff1(x), y), mul(x, _diff1(y)))
        case Div(lhs=x, rhs=y):
            return div(sub(mul(_diff1(x), y), mul(x, _diff1(y))), pow_(y, 2))
        case Pow(base=u, exponent=k):
            return mul(mul(num(k), pow_(u, k - 1)), _diff1(u))
        case Fun(name=name, arg=u):
            return mul(_dfun(name, u), _diff1(u))
    raise TypeError(f"not an Expr: {e!r}")


def _dfun(name: str, u: Expr) -> Expr:
    if name == "sin":
        return fun("cos", u)
    if name == "cos":
        return neg(fun("sin", u))
    if name == "tan":
        return add(ONE, pow_(fun("tan", u), 2))
    if name == "sinh":
        return fun("cosh", u)
    if name == "cosh":
        return fun("sinh", u)
    if name == "tanh":
        return sub(ONE, pow_(fun("tanh", u), 2))
    if name == "exp":
        return fun("exp", u)
    if name == "log":
        return div(ONE, u)
    if name == "sqrt":
        return div(ONE, mul(num(2), fun("sqrt", u)))
    if name == "atan":
        return div(ONE, add(ONE, pow_(u, 2)))
    if name == "artanh":
        return div(ONE, sub(ONE, pow_(u, 2)))
    raise ValueError(f"unknown function {name!r}")


def diff_expr(e: Expr, order: int = 1) -> Expr:
    """The order-th symbolic derivative with respect to t (order >= 1)."""
    if order < 1:
        raise ValueError("derivative order must be >= 1")
    for _ in range(order):
        e = _diff1(e)
    return e


# ---------------------------------------------------------------------------
# Evaluation (scalar reference path, IEEE semantics, located domain errors)


def _apply(name: str, x: float, node: Expr) -> float:
    try:
        if name == "sin":
            return math.sin(x)
        if name == "cos":
            return math.cos(x)
        if name == "tan":
            return math.tan(x)
        if name == "sinh":
            return math.sinh(x)
        if name == "cosh":
            return math.cosh(x)
        if name == "tanh":
            return math.tanh(x)
        if name == "exp":
            return math.exp(x)
        if name == "log":
            if x <= 0.0:
                raise ExprDomainError(f"log of non-positive value {x!r}", node)
            return math.log(x)
        if name == "sqrt":
            if x < 0.0:
                raise ExprDomainError(f"sqrt of negative value {x!r}", node)
            return math.sqrt(x)
        if name == "atan":
            return math.atan(x)
        if name == "artanh":
            if abs(x) >= 1.0:
                raise ExprDomainError(f"artanh of value {x!r} outside (-1, 1)", node)
            return math.atanh(x)
    except OverflowError:
        # IEEE semantics: saturate instead of raising
        if name == "sinh":
            return math.copysign(math.inf, x)
        return math.inf
    raise ValueError(f"unknown function {name!r}")


def eval_expr(e: Expr, t: float) -> float:
    """Evaluate at the scalar t; deterministic for identical tree and t."""
    match e:
        case Num(value=v):
            return v
        case Var():
            return float(t)
        case Neg(arg=u):
            return -eval_expr(u, t)
        case Add(lhs=x, rhs=y):
            return eval_expr(x, t) + eval_expr(y, t)
        case Sub(lhs=x, rhs=y):
            return eval_expr(x, t) - eval_expr(y, t)
        case Mul(lhs=x, rhs=y):
            return eval_expr(x, t) * eval_expr(y, t)
        case Div(lhs=x, rhs=y):
            den = eval_expr(y, t)
            if den == 0.0:
                raise ExprDomainError("division by zero", e)
            return eval_expr(x, t) / den
        case Pow(base=u, exponent=k):
            b = eval_expr(u, t)
            if b == 0.0 and k < 0:
                raise ExprDomainError("zero raised to a negative power", e)
            try:
                return float(b ** k)
            except OverflowError:
                sign = -1.0 if (b < 0 and k % 2 == 1) else 1.0
                return sign * math.inf
        case Fun(name=name, arg=u):
            return _apply(name, eval_expr(u, t), e)
    raise TypeError(f"not an Expr: {e!r}")


# ---------------------------------------------------------------------------
# Canonical printing (parse -> print -> parse is structurally idempotent)

_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _prec(e: Expr) -> int:
    match e:
        case Add() | Sub():
            return _PREC_ADD
        case Mul() | Div():
            return _PREC_MUL
        case Neg():
            return _PREC_NEG
        case Num(value=v) if v < 0:
            return _PREC_NEG
        case Pow():
            return _PREC_POW
        case _:
            return _PREC_ATOM


def _fmt_num(v: float) -> str:
    if math.isfinite(v) and v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def to_source(e: Expr) -> str:
    """Canonical DSL text for the tree."""

    def paren(child, minimum):
        s = to_source(child)
        return f"({s})" if _prec(child) < minimum else s

    match e:
        case Num(value=v):
            return _fmt_num(v)
        case Var():
            return "t"
        case Neg(arg=u):
            return "-" + paren(u, _PREC_NEG)
        case Add(lhs=x, rhs=y):
            return f"{paren(x, _PREC_ADD)}+{paren(y, _PREC_ADD + 1)}"
        case Sub(lhs=x, rhs=y):
            return f"{paren(x, _PREC_ADD)}-{paren(y, _PREC_ADD + 1)}"
        case Mul(lhs=x, rhs=y):
            return f"{paren(x, _PREC_MUL)}*{paren(y, _PREC_MUL + 1)}"
        case Div(lhs=x, rhs=y):
            return f"{paren(x, _PREC_MUL)}/{paren(y, _PREC_MUL + 1)}"
        case Pow(base=u, exponent=k):
            ks = str(k) if k >= 0 else f"({k})"
            return f"{paren(u, _PREC_ATOM)}^{ks}"
        case Fun(name=name, arg=u):
            return f"{name}({to_source(u)})"
    raise TypeError(f"not an Expr: {e!r}")


# ---------------------------------------------------------------------------
# Vectorized evaluation for bulk paths (integration nodes, grids, scans).
# Domain violations surface as non-finite values; callers that need a
# located error re-evaluate the offending point through eval_expr.

_NP_FUNCS = {
    "sin": np.sin, "cos": np.cos, "tan": np.tan,
    "sinh": np.sinh, "cosh": np.cosh, "tanh": np.tanh,
    "exp": np.exp, "log": np.log, "sqrt": np.sqrt,
    "atan": np.arctan, "artanh": np.arctanh,
}


def _vec(e: Expr):
    match e:
        case Num(value=v):
            return lambda t: v
        case Var():
            return lambda t: t
        case Neg(arg=u):
            f = _vec(u)
            return lambda t: -f(t)
        case Add(lhs=x, rhs=y):
            fx, fy = _vec(x), _vec(y)
            return lambda t: fx(t) + fy(t)
        case Sub(lhs=x, rhs=y):
            fx, fy = _vec(x), _vec(y)
            return lambda t: fx(t) - fy(t)
        case Mul(lhs=x, rhs=y):
            fx, fy = _vec(x), _vec(y)
            return lambda t: fx(t) * fy(t)
        case Div(lhs=x, rhs=y):
            fx, fy = _vec(x), _vec(y)
            return lambda t: fx(t) / fy(t)
        case Pow(base=u, exponent=k):
            f = _vec(u)
            return lambda t: f(t) ** k
        case Fun(name=name, arg=u):
            f = _vec(u)
            g = _NP_FUNCS[name]
            return lambda t: g(f(t))
    raise TypeError(f"not an Expr: {e!r}")


def vectorized(e: Expr):
    """Compile the tree to a NumPy-backed callable over scalars or arrays."""
    f = _vec(e)

    def call(t):
        arr = np.asarray(t, dtype=float)
        with np.errstate(all="ignore"):
            out = f(arr)
        out = np.asarray(out, dtype=float)
        if out.shape != arr.shape:
            out = np.broadcast_to(out, arr.shape).copy()
        return out if arr.ndim else float(out)

    return call
