"""Expression language for user-supplied nonlinearities.

Grammar (EBNF)::

    expr   = term , { ("+" | "-") , term } ;
    term   = unary , { ("*" | "/") , unary } ;
    unary  = "-" , unary | power ;
    power  = atom , [ "^" , unary ] ;
    atom   = NUMBER | VARIABLE | FUNCTION , "(" , expr , { "," , expr } , ")"
           | "(" , expr , ")" ;

"+", "-", "*", "/" are left associative, "^" is right associative and binds
tighter than unary minus (so ``-y^2`` means ``-(y^2)``).  There is no implicit
multiplication.  Variables are exactly ``t``, ``y`` and ``yp`` (the solver
binds the state value to ``y`` and the state derivative to ``yp``).  The
supported functions are ``exp``, ``sqrt``, ``abs``, ``atan``, ``sin``,
``cos``, ``log`` (one argument) and ``min``, ``max`` (two arguments).

Parsing is total: any input yields either an :class:`Expr` or a
:class:`ParseError` carrying the character offset of the problem.  Evaluation
is pure; domain violations (square root or logarithm of a negative number,
division by zero) and non-finite results raise :class:`EvalError`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "Expr",
    "ParseError",
    "EvalError",
    "parse",
    "evaluate",
    "to_source",
    "SamplingPlan",
    "NonnegativityReport",
    "check_nonnegative_sampled",
    "VARIABLES",
    "FUNCTIONS",
]

VARIABLES = ("t", "y", "yp")

#: function name -> (arity, numpy ufunc)
FUNCTIONS = {
    "exp": (1, np.exp),
    "sqrt": (1, np.sqrt),
    "abs": (1, np.abs),
    "atan": (1, np.arctan),
    "sin": (1, np.sin),
    "cos": (1, np.cos),
    "log": (1, np.log),
    "min": (2, np.minimum),
    "max": (2, np.maximum),
}


class ParseError(ValueError):
    """Syntax or name error, positioned at a character offset of the source."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class EvalError(ArithmeticError):
    """Domain violation or non-finite result during evaluation."""


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class Bin:
    op: str
    lhs: "Node"
    rhs: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple["Node", ...]


Node = Union[Num, Var, Neg, Bin, Call]


@dataclass(frozen=True)
class Expr:
    """Parsed expression; immutable, evaluation has no side effects."""

    root: Node

    def __call__(self, t: float, y: float, yp: float) -> float:
        return evaluate(self, t, y, yp)

    def eval_array(self, t, y, yp) -> np.ndarray:
        """Vectorized evaluation over broadcastable numpy arrays."""
        t, y, yp = np.broadcast_arrays(
            np.asarray(t, float), np.asarray(y, float), np.asarray(yp, float)
        )
        env = {"t": t, "y": y, "yp": yp}
        with np.errstate(divide="raise", invalid="raise", over="raise"):
            try:
                out = _eval_node(self.root, env)
            except FloatingPointError as err:
                raise EvalError(f"domain error while evaluating expression: {err}") from err
        out = np.broadcast_to(np.asarray(out, float), t.shape)
        if not np.all(np.isfinite(out)):
            raise EvalError("expression produced a non-finite value")
        return out.copy()

    def __str__(self) -> str:
        return to_source(self)


def _eval_node(node: Node, env: dict) -> np.ndarray:
    if isinstance(node, Num):
        return np.asarray(node.value)
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Neg):
        return -_eval_node(node.operand, env)
    if isinstance(node, Bin):
        a = _eval_node(node.lhs, env)
        b = _eval_node(node.rhs, env)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            return a / b
        return np.power(a, b)
    fn = FUNCTIONS[node.func][1]
    return fn(*(_eval_node(arg, env) for arg in node.args))


def evaluate(e: Expr, t: float, y: float, yp: float) -> float:
    """Evaluate at a single point; raises :class:`EvalError` on domain faults."""
    return float(e.eval_array(t, y, yp))


# ---------------------------------------------------------------------------
# Tokenizer / parser
# ---------------------------------------------------------------------------

_OPS = set("+-*/^(),")


def _tokenize(src: str) -> list[tuple[str, str, int]]:
    """Return (kind, text, offset) triples; kinds: num, ident, op, end."""
    tokens = []
    i, n = 0, len(src)
    while i < n:
        c = src[i]
        if c.isspace():
            i += 1
            continue
        if c in _OPS:
            tokens.append(("op", c, i))
            i += 1
            continue
        if c.isdigit() or c == ".":
            j = i
            while j < n and (src[j].isdigit() or src[j] == "."):
                j += 1
            if j < n and src[j] in "eE":
                k = j + 1
                if k < n and src[k] in "+-":
                    k += 1
                if k < n and src[k].isdigit():
                    j = k
                    while j < n and src[j].isdigit():
                        j += 1
            text = src[i:j]
            try:
                float(text)
            except ValueError:
                raise ParseError(f"malformed number {text!r}", i) from None
            tokens.append(("num", text, i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            tokens.append(("ident", src[i:j], i))
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", i)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = _tokenize(src)
        self.pos = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def next(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str) -> None:
        kind, text, offset = self.peek()
        if kind != "op" or text != op:
            raise ParseError(f"expected {op!r}", offset)
        self.next()

    def parse(self) -> Node:
        node = self.expr()
        kind, text, offset = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected trailing input {text!r}", offset)
        return node

    def expr(self) -> Node:
        node = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.next()
                node = Bin(text, node, self.term())
            else:
                return node

    def term(self) -> Node:
        node = self.unary()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.next()
                node = Bin(text, node, self.unary())
            else:
                return node

    def unary(self) -> Node:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.next()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.next()
            return Bin("^", base, self.unary())  # right associative
        return base

    def atom(self) -> Node:
        kind, text, offset = self.next()
        if kind == "num":
            return Num(float(text))
        if kind == "ident":
            if text in VARIABLES:
                return Var(text)
            if text in FUNCTIONS:
                arity = FUNCTIONS[text][0]
                self.expect_op("(")
                args = [self.expr()]
                while True:
                    k, t2, _ = self.peek()
                    if k == "op" and t2 == ",":
                        self.next()
                        args.append(self.expr())
                    else:
                        break
                self.expect_op(")")
                if len(args) != arity:
                    raise ParseError(
                        f"{text} expects {arity} argument(s), got {len(args)}", offset
                    )
                return Call(text, tuple(args))
            raise ParseError(f"unknown identifier {text!r}", offset)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        shown = text if text else "end of input"
        raise ParseError(f"expected a value, found {shown!r}", offset)


def parse(src: str) -> Expr:
    """Parse source text into an :class:`Expr`; errors carry the offset."""
    if not src or not src.strip():
        raise ParseError("empty expression", 0)
    return Expr(_Parser(src).parse())


# ---------------------------------------------------------------------------
# Printer (inverse of parse up to tree identity)
# ---------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}


def _prec(node: Node) -> int:
    if isinstance(node, Bin):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _PREC["neg"]
    return _PREC["atom"]


def _print(node: Node) -> str:
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        inner = _print(node.operand)
        if _prec(node.operand) < _PREC["neg"]:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, Call):
        return f"{node.func}({', '.join(_print(a) for a in node.args)})"
    my = _PREC[node.op]
    left, right = _print(node.lhs), _print(node.rhs)
    if _prec(node.lhs) < my or (node.op == "^" and _prec(node.lhs) <= my):
        left = f"({left})"
    # left-associative ops need parens around an equal-precedence right child
    if _prec(node.rhs) < my or (node.op != "^" and _prec(node.rhs) == my):
        right = f"({right})"
    return f"{left}{node.op}{right}"


def to_source(e: Expr) -> str:
    """Render the expression; ``parse(to_source(e))`` rebuilds an identical tree.

    Assumes number literals are nonnegative (the parser never produces
    negative ones; negation is an explicit node).
    """
    return _print(e.root)


# ---------------------------------------------------------------------------
# Sampled nonnegativity check
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SamplingPlan:
    """Lattice over [0,1] x [0,bound]^2 used to probe an expression's sign."""

    bound: float = 10.0
    n_t: int = 10
    n_y: int = 10
    n_yp: int = 10

    def __post_init__(self) -> None:
        if self.bound <= 0 or min(self.n_t, self.n_y, self.n_yp) < 2:
            raise ValueError("bound must be positive and each axis needs >= 2 samples")


@dataclass(frozen=True)
class NonnegativityReport:
    min_value: float
    argmin: tuple[float, float, float]
    violation: bool
    samples: int


def check_nonnegative_sampled(e: Expr, plan: SamplingPlan = SamplingPlan()) -> NonnegativityReport:
    """Scan the sampling lattice; reports the minimum value and its location.

    A negative minimum flags a violation.  Evaluation faults are re-raised as
    :class:`EvalError` annotated with the offending sample coordinates.
    """
    tg = np.linspace(0.0, 1.0, plan.n_t)
    yg = np.linspace(0.0, plan.bound, plan.n_y)
    pg = np.linspace(0.0, plan.bound, plan.n_yp)
    T, Y, P = (a.ravel() for a in np.meshgrid(tg, yg, pg, indexing="ij"))
    try:
        vals = e.eval_array(T, Y, P)
    except EvalError as err:
        t0, y0, p0 = _first_faulting_sample(e, T, Y, P)
        raise EvalError(f"{err} at sample (t={t0:g}, y={y0:g}, yp={p0:g})") from err
    i = int(np.argmin(vals))
    mn = float(vals[i])
    return NonnegativityReport(
        min_value=mn,
        argmin=(float(T[i]), float(Y[i]), float(P[i])),
        violation=mn < 0.0,
        samples=T.size,
    )


def _first_faulting_sample(e: Expr, T, Y, P) -> tuple[float, float, float]:
    for t0, y0, p0 in zip(T, Y, P):
        try:
            evaluate(e, t0, y0, p0)
        except EvalError:
            return float(t0), float(y0), float(p0)
    return float(T[0]), float(Y[0]), float(P[0])
