"""
Arithmetic expression language for user-supplied angle profiles and chart functions.

Grammar (whitespace-insensitive):

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := '-' unary | power
    power := atom ('^' unary)?
    atom  := number | ident | ident '(' expr ')' | '(' expr ')'

'^' is right-associative and binds tighter than unary minus, so -x^2 is -(x^2)
and 2^-x is 2^(-x). Identifiers are the variables x and y, the constants pi
and e, and the functions listed in FUNCTION_NAMES.
"""

import math
import re
from dataclasses import dataclass
from functools import partial

from . import jet
from .errors import ExprNameError, ExprSyntaxError, ExprVariableError
from .jet import Jet2

VARIABLES = frozenset({"x", "y"})
CONSTANTS = {"pi": math.pi, "e": math.e}
FUNCTION_NAMES = frozenset(jet.FUNCTIONS)


@dataclass(frozen=True)
class Num:
    value: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.value) or self.value < 0.0:
            raise ValueError(f"numeric literal must be finite and non-negative, got {self.value}")


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Num | Var | Const | Neg | BinOp | Call


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


@dataclass(frozen=True)
class _Token:
    kind: str  # "num", "ident", "op", "end"
    text: str
    offset: int


def _tokenize(src: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while True:
        while pos < len(src) and src[pos].isspace():
            pos += 1
        if pos >= len(src):
            break
        m = _TOKEN_RE.match(src, pos)
        if m is None or m.lastgroup is None:
            raise ExprSyntaxError(f"unexpected character {src[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append(_Token(kind, m.group(kind), start))
        pos = m.end()
    tokens.append(_Token("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.tokens = _tokenize(src)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def check(self, *ops: str) -> bool:
        tok = self.peek()
        return tok.kind == "op" and tok.text in ops

    def expect(self, op: str) -> None:
        tok = self.peek()
        if not self.check(op):
            found = tok.text or "end of input"
            raise ExprSyntaxError(f"unexpected {found!r}", tok.offset, frozenset({op}))
        self.advance()

    def parse(self) -> Expr:
        node = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ExprSyntaxError(
                f"unexpected {tok.text!r}", tok.offset, frozenset({"+", "-", "*", "/", "^", "end of input"})
            )
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.check("+", "-"):
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.check("*", "/"):
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.check("-"):
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.check("^"):
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "num":
            self.advance()
            return Num(float(tok.text))
        if tok.kind == "ident":
            self.advance()
            name = tok.text
            if name in FUNCTION_NAMES:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(name, arg)
            if self.check("("):
                raise ExprNameError(name, tok.offset)
            if name in VARIABLES:
                return Var(name)
            if name in CONSTANTS:
                return Const(name)
            raise ExprNameError(name, tok.offset)
        if self.check("("):
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        found = tok.text or "end of input"
        raise ExprSyntaxError(f"unexpected {found!r}", tok.offset, frozenset({"number", "identifier", "(", "-"}))


def parse(src: str) -> Expr:
    """Parse expression text into an immutable syntax tree."""
    return _Parser(src).parse()


_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(node: Expr) -> int:
    if isinstance(node, BinOp):
        return 4 if node.op == "^" else _PRECEDENCE[node.op]
    if isinstance(node, Neg):
        return 3
    return 5


def to_text(node: Expr) -> str:
    """Print a tree back to text; parse(to_text(e)) == e."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var | Const):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    if isinstance(node, Neg):
        inner = to_text(node.arg)
        return f"-{inner}" if _prec(node.arg) >= 3 else f"-({inner})"

    p = _prec(node)
    left, right = to_text(node.left), to_text(node.right)
    if node.op == "^":
        # base must be an atom; the exponent may be any unary-level expression
        if _prec(node.left) <= 4:
            left = f"({left})"
        if _prec(node.right) < 3:
            right = f"({right})"
        return f"{left}^{right}"
    if _prec(node.left) < p:
        left = f"({left})"
    if _prec(node.right) <= p:
        right = f"({right})"
    return f"{left} {node.op} {right}"


def free_variables(node: Expr) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Neg | Call):
        return free_variables(node.arg)
    if isinstance(node, BinOp):
        return free_variables(node.left) | free_variables(node.right)
    return set()


def require_variables(node: Expr, allowed: set[str]) -> Expr:
    """Validation pass for contexts that only bind some of the chart variables."""
    extra = free_variables(node) - allowed
    if extra:
        raise ExprVariableError(extra, allowed)
    return node


def eval_jet(node: Expr, x: Jet2, y: Jet2) -> Jet2:
    """Evaluate a tree over jets; value and partials to second order propagate exactly."""
    if isinstance(node, Num):
        return Jet2(node.value)
    if isinstance(node, Var):
        return x if node.name == "x" else y
    if isinstance(node, Const):
        return Jet2(CONSTANTS[node.name])
    if isinstance(node, Neg):
        return -eval_jet(node.arg, x, y)
    if isinstance(node, Call):
        return jet.FUNCTIONS[node.func](eval_jet(node.arg, x, y))

    a = eval_jet(node.left, x, y)
    b = eval_jet(node.right, x, y)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        return a / b
    return a**b


def evaluate(node: Expr, x: float, y: float = 0.0) -> float:
    return eval_jet(node, Jet2(x), Jet2(y)).val


def field(node: Expr) -> "partial[Jet2]":
    """Bind a tree as a scalar field (x, y) -> Jet2."""
    return partial(eval_jet, node)


def parse_in(src: str, allowed: set[str]) -> Expr:
    return require_variables(parse(src), allowed)
