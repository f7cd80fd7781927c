"""Expression mini-language for user-defined sequences and functions.

Grammar (precedence ``^`` > unary ``-`` > ``* /`` > ``+ -``, ``^`` right
associative, everything else left associative)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | atom ('^' factor)?
    atom   := number | variable | ident '(' expr (',' expr)* ')' | '(' expr ')'

Identifiers: sqrt, ln, log10, sin, cos, abs, floor, pow.  Numbers are
decimal literals with an optional exponent.  The variable is ``n`` for
sequences and ``x`` for functions.

``(-1)^e`` is normalized to a dedicated alternating-sign node evaluated
by parity of the (integer-valued) exponent, never through ``pow`` of a
negative base.  ``-c`` applied to a literal folds into the constant, so
printing and re-parsing an AST is a fixed point.
"""

import re
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import ExprError

FUNCTIONS = {
    "sqrt": 1,
    "ln": 1,
    "log10": 1,
    "sin": 1,
    "cos": 1,
    "abs": 1,
    "floor": 1,
    "pow": 2,
}

_PREC_ADD = 1
_PREC_MUL = 2
_PREC_NEG = 3
_PREC_POW = 4
_PREC_ATOM = 5


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    child: "Node"


@dataclass(frozen=True)
class Bin:
    op: str  # one of + - * / ^
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    fn: str
    args: Tuple["Node", ...]


@dataclass(frozen=True)
class AltSign:
    """(-1) raised to an integer-valued exponent, evaluated by parity."""

    exponent: "Node"


Node = (Const, Var, Neg, Bin, Call, AltSign)


def _neg(child):
    if isinstance(child, Const):
        return Const(-child.value)
    return Neg(child)


def _pow(base, exponent):
    if isinstance(base, Const) and base.value == -1.0:
        return AltSign(exponent)
    return Bin("^", base, exponent)


# ------------------------------------------------------------------ parsing

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            at = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ExprError(f"unexpected character {text[at]!r}", at)
        if m.lastgroup == "num":
            tokens.append(("num", m.group("num"), m.start("num")))
        elif m.lastgroup == "ident":
            tokens.append(("ident", m.group("ident"), m.start("ident")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens, var_name, constants):
        self.tokens = tokens
        self.i = 0
        self.var_name = var_name
        self.constants = constants

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, val, off = self.peek()
        if kind != "op" or val != op:
            raise ExprError(f"expected {op!r}", off)
        return self.advance()

    def expr(self):
        node = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                node = Bin(val, node, self.term())
            else:
                return node

    def term(self):
        node = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.advance()
                node = Bin(val, node, self.factor())
            else:
                return node

    def factor(self):
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.advance()
            return _neg(self.factor())
        node = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.advance()
            return _pow(node, self.factor())
        return node

    def atom(self):
        kind, val, off = self.advance()
        if kind == "num":
            return Const(float(val))
        if kind == "ident":
            nxt_kind, nxt_val, _ = self.peek()
            if nxt_kind == "op" and nxt_val == "(":
                return self.call(val, off)
            if val == self.var_name:
                return Var(val)
            if val in self.constants:
                return Const(float(self.constants[val]))
            raise ExprError(f"unknown identifier {val!r}", off)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ExprError("expected a number, identifier or '('", off)

    def call(self, name, off):
        if name not in FUNCTIONS:
            raise ExprError(f"unknown identifier {name!r}", off)
        self.expect_op("(")
        args = [self.expr()]
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == ",":
                self.advance()
                args.append(self.expr())
            else:
                break
        self.expect_op(")")
        arity = FUNCTIONS[name]
        if len(args) != arity:
            raise ExprError(
                f"{name} takes {arity} argument(s), got {len(args)}", off)
        if name == "pow":
            return _pow(args[0], args[1])
        return Call(name, tuple(args))


def parse_expr(text, var_name, constants=None):
    """Parse `text` into an AST over the single free variable `var_name`."""
    if not text.strip():
        raise ExprError("empty expression", 0)
    if not text.isascii():
        at = next(i for i, ch in enumerate(text) if not ch.isascii())
        raise ExprError("non-ASCII input", at)
    parser = _Parser(_tokenize(text), var_name, constants or {})
    node = parser.expr()
    kind, val, off = parser.peek()
    if kind != "end":
        raise ExprError(f"unexpected trailing {val!r}", off)
    return node


def parse_sequence_expr(text, constants=None):
    """Parse a sequence expression in the index variable ``n``."""
    return parse_expr(text, "n", constants)


def parse_function_expr(text, constants=None):
    """Parse a real-function expression in the variable ``x``."""
    return parse_expr(text, "x", constants)


# ----------------------------------------------------------------- printing

def _prec(node):
    if isinstance(node, (Const, Var, Call)):
        return _PREC_NEG if isinstance(node, Const) and node.value < 0 else _PREC_ATOM
    if isinstance(node, Neg):
        return _PREC_NEG
    if isinstance(node, AltSign):
        return _PREC_POW
    return {"+": _PREC_ADD, "-": _PREC_ADD,
            "*": _PREC_MUL, "/": _PREC_MUL, "^": _PREC_POW}[node.op]


def _wrap(text, need):
    return f"({text})" if need else text


def to_text(node):
    """Render an AST back to source; parse(to_text(ast)) == ast."""
    if isinstance(node, Const):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return "-" + _wrap(to_text(node.child), _prec(node.child) < _PREC_NEG)
    if isinstance(node, Call):
        return node.fn + "(" + ", ".join(to_text(a) for a in node.args) + ")"
    if isinstance(node, AltSign):
        return "(-1)^" + _wrap(to_text(node.exponent),
                               _prec(node.exponent) < _PREC_POW)
    if node.op == "^":
        left = _wrap(to_text(node.left), _prec(node.left) < _PREC_ATOM)
        right = _wrap(to_text(node.right), _prec(node.right) < _PREC_POW)
        return f"{left}^{right}"
    p = _prec(node)
    left = _wrap(to_text(node.left), _prec(node.left) < p)
    right = _wrap(to_text(node.right), _prec(node.right) <= p)
    return f"{left} {node.op} {right}"


# --------------------------------------------------------------- evaluation

def eval_expr_array(node, values, var_name):
    """Evaluate over an array of variable values.

    Returns raw float64 results; non-finite entries are the caller's
    responsibility to flag (sequence evaluation turns them into errors).
    """
    values = np.asarray(values, dtype=np.float64)
    with np.errstate(all="ignore"):
        return _eval(node, values, var_name)


def _eval(node, values, var_name):
    if isinstance(node, Const):
        return np.full(values.shape, node.value)
    if isinstance(node, Var):
        if node.name != var_name:
            raise ExprError(f"unbound variable {node.name!r}", 0)
        return values.copy()
    if isinstance(node, Neg):
        return -_eval(node.child, values, var_name)
    if isinstance(node, AltSign):
        e = _eval(node.exponent, values, var_name)
        integral = np.floor(e) == e
        parity = np.mod(e, 2.0)
        return np.where(integral, 1.0 - 2.0 * parity, np.nan)
    if isinstance(node, Call):
        a = _eval(node.args[0], values, var_name)
        if node.fn == "sqrt":
            return np.sqrt(a)
        if node.fn == "ln":
            return np.log(a)
        if node.fn == "log10":
            return np.log10(a)
        if node.fn == "sin":
            return np.sin(a)
        if node.fn == "cos":
            return np.cos(a)
        if node.fn == "abs":
            return np.abs(a)
        if node.fn == "floor":
            return np.floor(a)
        raise ExprError(f"unknown function {node.fn!r}", 0)
    left = _eval(node.left, values, var_name)
    right = _eval(node.right, values, var_name)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if node.op == "/":
        return left / right
    return np.power(left, right)
