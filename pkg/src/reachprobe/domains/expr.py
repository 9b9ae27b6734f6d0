"""A small expression language for implicit domain functions.

Grammar (usual precedence, ``^`` binds tighter than unary minus and is
right-associative)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | '+' unary | power
    power   := atom ('^' unary)?
    atom    := NUMBER | NAME | NAME '(' expr (',' expr)* ')' | '(' expr ')'

Names are the coordinates ``x1 .. xN`` (``x, y, z`` are aliases for the
first three) and the constants ``pi`` and ``e``.  Functions: ``sqrt``,
``exp``, ``abs`` and ``smin(a, b, k)``, the C^2 cubic smooth minimum
(``smax`` is its mirror).  Evaluation carries forward-mode derivatives, so
every compiled expression provides its exact gradient.
"""

from dataclasses import dataclass
import math
import re

import numpy as np

from .._validation import InvalidInputError


class ExpressionError(InvalidInputError):
    def __init__(self, message, line, column):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


_TOKEN = re.compile(r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))")

_FUNCS = {"sqrt": 1, "exp": 1, "abs": 1, "smin": 3, "smax": 3}
_CONSTS = {"pi": math.pi, "e": math.e}
_ALIASES = {"x": 0, "y": 1, "z": 2}


@dataclass(frozen=True)
class Node:
    op: str
    args: tuple = ()
    value: float = 0.0


def _position(text, offset):
    line = text.count("\n", 0, offset) + 1
    column = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, column


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ExpressionError(f"unexpected character {text[start]!r}", *_position(text, start))
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, dim):
        self.text = text
        self.dim = dim
        self.tokens = _tokenize(text)
        self.i = 0

    def error(self, message, token=None):
        token = token or self.tokens[self.i]
        raise ExpressionError(message, *_position(self.text, token[2]))

    def peek(self):
        return self.tokens[self.i]

    def take(self, value=None):
        tok = self.tokens[self.i]
        if value is not None and tok[1] != value:
            self.error(f"expected {value!r}, found {tok[1] or 'end of input'!r}")
        self.i += 1
        return tok

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected {self.peek()[1]!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            node = Node(op, (node, self.term()))
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            node = Node(op, (node, self.unary()))
        return node

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            return Node("neg", (self.unary(),))
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            return Node("^", (base, self.unary()))
        return base

    def atom(self):
        tok = self.peek()
        kind, text, _ = tok
        if kind == "num":
            self.take()
            return Node("const", value=float(text))
        if kind == "name":
            self.take()
            if self.peek()[1] == "(":
                if text not in _FUNCS:
                    self.error(f"unknown function {text!r}", tok)
                self.take("(")
                starts = [self.peek()]
                args = [self.expr()]
                while self.peek()[1] == ",":
                    self.take()
                    starts.append(self.peek())
                    args.append(self.expr())
                self.take(")")
                if len(args) != _FUNCS[text]:
                    self.error(f"{text} takes {_FUNCS[text]} argument(s), got {len(args)}", tok)
                if text in ("smin", "smax") and _uses_variables(args[2]):
                    self.error(f"{text} blend width must be a constant", starts[2])
                return Node(text, tuple(args))
            if text in _CONSTS:
                return Node("const", value=_CONSTS[text])
            index = _variable_index(text)
            if index is None or index >= self.dim:
                self.error(f"unknown name {text!r} for dimension {self.dim}", tok)
            return Node("var", value=index)
        if text == "(":
            self.take()
            node = self.expr()
            self.take(")")
            return node
        self.error(f"unexpected {text or 'end of input'!r}")


def _uses_variables(node):
    return node.op == "var" or any(_uses_variables(a) for a in node.args)


def _variable_index(name):
    if name in _ALIASES:
        return _ALIASES[name]
    m = re.fullmatch(r"x([1-9]\d*)", name)
    return int(m.group(1)) - 1 if m else None


def parse(text, dim):
    if not isinstance(text, str):
        raise InvalidInputError("expression must be a string")
    return _Parser(text, dim).parse()


def smooth_max(a, b, k):
    """Cubic smooth maximum: exact max once ``|a - b| >= k``, C^2 everywhere."""
    h = np.maximum(k - np.abs(a - b), 0.0) / k
    return np.maximum(a, b) + h ** 3 * k / 6.0


def smooth_max_grad(a, b, k):
    """Partial derivatives of :func:`smooth_max` with respect to ``a`` and ``b``."""
    d = a - b
    h = np.maximum(k - np.abs(d), 0.0) / k
    w = np.where(d > 0, 1.0, np.where(d < 0, 0.0, 0.5))
    corr = 0.5 * h ** 2 * np.sign(d)
    return w - corr, (1.0 - w) + corr


def _eval(node, X):
    """Value and gradient (last axis = coordinates) of ``node`` at points ``X``."""
    shape = X.shape[:-1]
    op = node.op
    if op == "const":
        return np.full(shape, node.value), np.zeros(X.shape)
    if op == "var":
        g = np.zeros(X.shape)
        g[..., int(node.value)] = 1.0
        return X[..., int(node.value)].copy(), g
    vals = [_eval(a, X) for a in node.args]
    if op == "neg":
        v, g = vals[0]
        return -v, -g
    if op in "+-*/^":
        (a, ga), (b, gb) = vals
        if op == "+":
            return a + b, ga + gb
        if op == "-":
            return a - b, ga - gb
        if op == "*":
            return a * b, ga * b[..., None] + a[..., None] * gb
        if op == "/":
            return a / b, (ga * b[..., None] - a[..., None] * gb) / (b ** 2)[..., None]
        # Power: constant integer exponents avoid log of negative bases.
        if node.args[1].op == "const" or not np.any(gb):
            expo = b
            v = a ** expo
            return v, (expo * a ** (expo - 1))[..., None] * ga
        v = a ** b
        return v, v[..., None] * (gb * np.log(a)[..., None] + (b / a)[..., None] * ga)
    if op == "sqrt":
        a, ga = vals[0]
        v = np.sqrt(a)
        return v, ga / (2 * v)[..., None]
    if op == "exp":
        a, ga = vals[0]
        v = np.exp(a)
        return v, v[..., None] * ga
    if op == "abs":
        a, ga = vals[0]
        return np.abs(a), np.sign(a)[..., None] * ga
    if op in ("smin", "smax"):
        (a, ga), (b, gb), (k, gk) = vals
        if np.any(gk):
            raise InvalidInputError(f"{op} blend width must be constant")
        if np.any(k <= 0):
            raise InvalidInputError(f"{op} blend width must be positive")
        sign = 1.0 if op == "smax" else -1.0
        v = sign * smooth_max(sign * a, sign * b, k)
        da, db = smooth_max_grad(sign * a, sign * b, k)
        return v, da[..., None] * ga + db[..., None] * gb
    raise InvalidInputError(f"unsupported node {op!r}")


class CompiledExpression:
    """Vectorised callable for a parsed expression: ``value(X)`` and ``grad(X)``."""

    def __init__(self, text, dim):
        self.text = text
        self.dim = dim
        self.tree = parse(text, dim)

    def value_and_grad(self, X):
        X = np.asarray(X, dtype=float)
        with np.errstate(all="ignore"):
            return _eval(self.tree, X)

    def __call__(self, X):
        return self.value_and_grad(X)[0]

    def grad(self, X):
        return self.value_and_grad(X)[1]
