"""Expression ASTs with value and truncated-Taylor (jet) evaluation.

Jets carry coefficients t_j = f^(j)(x0)/j!, propagated through the tree by
exact series recurrences; no symbolic differentiation and no finite
differences anywhere.  Coefficients may be floats or numpy arrays, so a whole
grid of expansion points can be evaluated in one call.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .errors import DomainError, ExprSyntaxError, OrderOverflow

MAX_JET_ORDER = 32

_UNARY_FUNCS = ("sin", "cos", "exp", "log", "sqrt")


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Unary:
    op: str  # neg | sin | cos | exp | log | sqrt
    arg: "ExprNode"


@dataclass(frozen=True)
class Binary:
    op: str  # + - * / ^
    left: "ExprNode"
    right: "ExprNode"


ExprNode = Union[Const, Var, Unary, Binary]


@dataclass(frozen=True)
class Jet:
    """Truncated Taylor expansion at x0: coeffs[j] = f^(j)(x0)/j!."""

    x0: float
    coeffs: tuple

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def derivative(self, j: int):
        """f^(j)(x0), recovered from the j-th coefficient."""
        fact = 1.0
        for i in range(2, j + 1):
            fact *= i
        return self.coeffs[j] * fact

    def truncate(self, m: int) -> "Jet":
        if m > self.order:
            raise ValueError("cannot extend a jet by truncation")
        return Jet(self.x0, self.coeffs[: m + 1])


# ---------------------------------------------------------------------------
# tokenizer / parser
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise ExprSyntaxError(f"unexpected character {text[pos:].lstrip()[0]!r}",
                                  len(text) - len(text[pos:].lstrip()))
        kind = m.lastgroup
        value = m.group(kind)
        tokens.append((kind, value, m.start(kind)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is not None:
            self.i += 1
        return tok

    def error(self, message):
        tok = self.peek()
        pos = tok[2] if tok is not None else len(self.text)
        raise ExprSyntaxError(message, pos)

    def expect(self, op):
        tok = self.next()
        if tok is None or tok[0] != "op" or tok[1] != op:
            self.i -= tok is not None
            self.error(f"expected {op!r}")

    def parse(self):
        node = self.expr()
        if self.peek() is not None:
            self.error("trailing input")
        return node

    def expr(self):
        node = self.term()
        while (tok := self.peek()) and tok[0] == "op" and tok[1] in "+-":
            self.next()
            node = Binary(tok[1], node, self.term())
        return node

    def term(self):
        node = self.factor()
        while (tok := self.peek()) and tok[0] == "op" and tok[1] in "*/":
            self.next()
            node = Binary(tok[1], node, self.factor())
        return node

    def factor(self):
        tok = self.peek()
        if tok and tok[0] == "op" and tok[1] == "-":
            self.next()
            return Unary("neg", self.power())
        return self.power()

    def power(self):
        base = self.atom()
        tok = self.peek()
        if tok and tok[0] == "op" and tok[1] == "^":
            self.next()
            # right-associative; allow a sign on the exponent
            return Binary("^", base, self.factor())
        return base

    def atom(self):
        tok = self.next()
        if tok is None:
            self.error("unexpected end of input")
        kind, value, pos = tok
        if kind == "num":
            try:
                v = float(value)
            except ValueError:
                raise ExprSyntaxError(f"malformed number {value!r}", pos) from None
            if not np.isfinite(v):
                raise ExprSyntaxError(f"non-finite number {value!r}", pos)
            return Const(v)
        if kind == "ident":
            if value == "x":
                return Var()
            if value in _UNARY_FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Unary(value, arg)
            raise ExprSyntaxError(f"unknown identifier {value!r}", pos)
        if value == "(":
            node = self.expr()
            self.expect(")")
            return node
        self.i -= 1
        self.error(f"unexpected {value!r}")


def parse(text: str) -> ExprNode:
    """Parse an expression in the single variable x into an AST."""
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def to_string(node: ExprNode) -> str:
    """Render an AST back to parseable text (round-trips structurally)."""
    return _render(node, 0)


def _render(node, parent_prec):
    if isinstance(node, Const):
        v = node.value
        s = str(int(v)) if float(v).is_integer() and abs(v) < 1e15 else repr(v)
        if v < 0 and parent_prec > 1:
            s = f"({s})"
        return s
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Unary):
        if node.op == "neg":
            # nested negation needs parens: "--x" does not reparse
            inner = _render(node.arg, _PREC["neg"] + 1)
            s = f"-{inner}"
            return f"({s})" if parent_prec > _PREC["neg"] else s
        return f"{node.op}({_render(node.arg, 0)})"
    prec = _PREC[node.op]
    # ^ is right-associative, the rest left-associative
    lp = prec if node.op != "^" else prec + 1
    rp = prec + 1 if node.op != "^" else prec
    s = f"{_render(node.left, lp)} {node.op} {_render(node.right, rp)}" \
        if node.op in "+-" else f"{_render(node.left, lp)}{node.op}{_render(node.right, rp)}"
    return f"({s})" if prec < parent_prec else s


# ---------------------------------------------------------------------------
# rational-exponent detection
# ---------------------------------------------------------------------------

def _as_rational(node):
    """Fraction value of a constant subtree, or None if not recognizably rational."""
    if isinstance(node, Const):
        v = node.value
        if float(v).is_integer():
            return Fraction(int(v))
        fr = Fraction(v).limit_denominator(10 ** 6)
        return fr if float(fr) == v else None
    if isinstance(node, Unary) and node.op == "neg":
        fr = _as_rational(node.arg)
        return None if fr is None else -fr
    if isinstance(node, Binary):
        lf = _as_rational(node.left)
        rf = _as_rational(node.right)
        if lf is None or rf is None:
            return None
        if node.op == "+":
            return lf + rf
        if node.op == "-":
            return lf - rf
        if node.op == "*":
            return lf * rf
        if node.op == "/":
            return lf / rf if rf != 0 else None
        if node.op == "^" and rf.denominator == 1 and (lf != 0 or rf >= 0):
            return lf ** rf
        return None
    return None


# ---------------------------------------------------------------------------
# plain evaluation
# ---------------------------------------------------------------------------

def evaluate(f: ExprNode, x):
    """Evaluate f at x (scalar or numpy array)."""
    return _eval(f, x)


def _fail(node, why):
    where = f" in {to_string(node)!r}" if node is not None else ""
    raise DomainError(f"{why}{where}")


def _eval(node, x):
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return x
    if isinstance(node, Unary):
        if node.op == "neg":
            return -_eval(node.arg, x)
        u = _eval(node.arg, x)
        if node.op == "sin":
            return np.sin(u)
        if node.op == "cos":
            return np.cos(u)
        if node.op == "exp":
            return np.exp(u)
        if node.op == "log":
            if np.any(u <= 0):
                _fail(node, "log of nonpositive value")
            return np.log(u)
        if np.any(u < 0):
            _fail(node, "sqrt of negative value")
        return np.sqrt(u)
    l = _eval(node.left, x)
    if node.op == "^":
        return _pow_value(l, node.right, x, node)
    r = _eval(node.right, x)
    if node.op == "+":
        return l + r
    if node.op == "-":
        return l - r
    if node.op == "*":
        return l * r
    if np.any(r == 0):
        _fail(node, "division by zero")
    return l / r


def _pow_value(base, exp_node, x, node):
    fr = _as_rational(exp_node)
    if fr is not None:
        if fr.denominator == 1:
            n = fr.numerator
            if n < 0 and np.any(base == 0):
                _fail(node, "zero base with negative exponent")
            return base ** float(n)
        if fr.denominator % 2 == 1:
            # odd root: sign-aware, defined for negative bases
            if fr < 0 and np.any(base == 0):
                _fail(node, "zero base with negative exponent")
            mag = np.abs(base) ** float(fr)
            return np.sign(base) * mag if fr.numerator % 2 else mag
        if np.any(base < 0):
            _fail(node, "negative base with even-root exponent")
        return base ** float(fr)
    e = _eval(exp_node, x)
    if np.any(base <= 0):
        _fail(node, "nonpositive base with non-rational exponent")
    return np.exp(e * np.log(base))


# ---------------------------------------------------------------------------
# jet arithmetic (coefficient lists, truncation-consistent recurrences)
# ---------------------------------------------------------------------------

def _add(a, b):
    return [ai + bi for ai, bi in zip(a, b)]

def _sub(a, b):
    return [ai - bi for ai, bi in zip(a, b)]

def _neg(a):
    return [-ai for ai in a]

def _mul(a, b):
    return [sum(a[j] * b[k - j] for j in range(k + 1)) for k in range(len(a))]

def _div(a, b, node=None):
    if np.any(b[0] == 0):
        _fail(node, "division by zero")
    c = []
    for k in range(len(a)):
        s = a[k]
        for j in range(k):
            s = s - c[j] * b[k - j]
        c.append(s / b[0])
    return c

def _ipow(a, n):
    # repeated squaring keeps jet division out of integer powers
    result = [1.0] + [0.0] * (len(a) - 1)
    base = a
    while n:
        if n & 1:
            result = _mul(result, base)
        base = _mul(base, base)
        n >>= 1
    return result

def _exp(a):
    e = [np.exp(a[0])]
    for k in range(1, len(a)):
        s = sum(j * a[j] * e[k - j] for j in range(1, k + 1))
        e.append(s / k)
    return e

def _log(a, node=None):
    if np.any(a[0] <= 0):
        _fail(node, "log of nonpositive value")
    l = [np.log(a[0])]
    for k in range(1, len(a)):
        s = k * a[k] - sum(j * l[j] * a[k - j] for j in range(1, k))
        l.append(s / (k * a[0]))
    return l

def _sqrt(a, node=None):
    if np.any(a[0] <= 0):
        _fail(node, "sqrt of nonpositive value (derivative undefined at 0)")
    q = [np.sqrt(a[0])]
    for k in range(1, len(a)):
        s = a[k]
        for j in range(1, k):
            s = s - q[j] * q[k - j]
        q.append(s / (2.0 * q[0]))
    return q

def _sincos(a):
    s = [np.sin(a[0])]
    c = [np.cos(a[0])]
    for k in range(1, len(a)):
        sk = sum(j * a[j] * c[k - j] for j in range(1, k + 1)) / k
        ck = -sum(j * a[j] * s[k - j] for j in range(1, k + 1)) / k
        s.append(sk)
        c.append(ck)
    return s, c


def _jet(node, x0, n):
    width = n + 1
    if isinstance(node, Const):
        return [node.value] + [0.0] * (width - 1)
    if isinstance(node, Var):
        coeffs = [x0] + [0.0] * (width - 1)
        if n >= 1:
            coeffs[1] = 1.0
        return coeffs
    if isinstance(node, Unary):
        if node.op == "neg":
            return _neg(_jet(node.arg, x0, n))
        u = _jet(node.arg, x0, n)
        if node.op == "sin":
            return _sincos(u)[0]
        if node.op == "cos":
            return _sincos(u)[1]
        if node.op == "exp":
            return _exp(u)
        if node.op == "log":
            return _log(u, node)
        return _sqrt(u, node)
    if node.op == "^":
        return _pow_jet(_jet(node.left, x0, n), node, x0, n)
    l = _jet(node.left, x0, n)
    r = _jet(node.right, x0, n)
    if node.op == "+":
        return _add(l, r)
    if node.op == "-":
        return _sub(l, r)
    if node.op == "*":
        return _mul(l, r)
    return _div(l, r, node)


def _scale_jet(a, s):
    return [ai * s for ai in a]


def _pow_jet(u, node, x0, n):
    fr = _as_rational(node.right)
    if fr is not None and fr.denominator == 1:
        m = fr.numerator
        if m >= 0:
            return _ipow(u, m)
        one = [1.0] + [0.0] * (len(u) - 1)
        return _div(one, _ipow(u, -m), node)
    if fr is not None and fr.denominator % 2 == 1:
        if np.any(u[0] == 0):
            _fail(node, "root of zero (derivative undefined)")
        sgn = np.sign(u[0])
        w = [sgn * ui for ui in u]
        res = _exp(_scale_jet(_log(w, node), float(fr)))
        if fr.numerator % 2:
            res = [sgn * ri for ri in res]
        return res
    if np.any(u[0] <= 0):
        _fail(node, "nonpositive base with non-odd-rational exponent")
    e = _jet(node.right, x0, n)
    return _exp(_mul(e, _log(u, node)))


def jet_eval(f: ExprNode, x0, n: int, max_order: int = MAX_JET_ORDER) -> Jet:
    """Taylor coefficients of f at x0 up to order n, by jet arithmetic."""
    if n < 0:
        raise ValueError("jet order must be nonnegative")
    if n > max_order:
        raise OrderOverflow(f"jet order {n} exceeds maximum {max_order}")
    coeffs = _jet(f, x0, n)
    flat = np.concatenate([np.atleast_1d(np.asarray(c, dtype=float)).ravel() for c in coeffs])
    if not np.all(np.isfinite(flat)):
        raise DomainError("non-finite jet coefficient")
    return Jet(x0, tuple(coeffs))


def vanishing_order(coeffs, tol: float = 1e-9, start: int = 0):
    """Index of the first coefficient above the relative threshold, else None."""
    scale = max(1.0, max(abs(float(c)) for c in coeffs))
    for j in range(start, len(coeffs)):
        if abs(float(coeffs[j])) > tol * scale:
            return j
    return None


def order_of_vanishing(f: ExprNode, x0: float, kmax: int = 16, tol: float = 1e-9):
    """Smallest j with |t_j| above tol * scale at x0, or None up to kmax."""
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    jet = jet_eval(f, x0, kmax)
    return vanishing_order(jet.coeffs, tol)
