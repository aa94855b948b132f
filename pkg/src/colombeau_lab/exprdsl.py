"""Expression language for building representatives from text.

Grammar (LL(1), recursive descent, single-token lookahead):

    expr   := term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := ['-'] number | func | '(' expr ')'
    func   := 'iota' '(' dist ')' | 'sigma' '(' smooth ')'
            | 'D' '(' expr ')' | 'hatD' '[' smooth ']' '(' expr ')'
    dist   := 'delta' ['(' number ')'] | 'ddelta' '(' int [',' number] ')'
            | 'H' ['(' number ')'] | 'reg' '(' smooth ')'
    smooth := 'sin' | 'cos' | 'exp'
            | 'poly' '(' number {',' number} ')' | 'bump' '(' number ')'

'*' binds tighter than '+'/'-'; both levels associate left.  Syntax
errors carry the 1-based character position and the expected token set.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Tuple

from .errors import DslSyntaxError
from .funcspace import FULL_LINE, Domain, catalog
from . import distribution as dist_mod
from . import genfunc as gf


# ---------------------------------------------------------------------------
# AST: plain data with structural equality; smooth functions and
# distributions appear as catalog specs, not live objects.

@dataclass(frozen=True)
class Lit:
    value: float


@dataclass(frozen=True)
class Iota:
    dist: Tuple  # ('delta', x0) | ('ddelta', k, x0) | ('H', x0) | ('reg', spec)


@dataclass(frozen=True)
class SigmaF:
    smooth: Tuple


@dataclass(frozen=True)
class Add:
    left: object
    right: object


@dataclass(frozen=True)
class Sub:
    left: object
    right: object


@dataclass(frozen=True)
class Mul:
    left: object
    right: object


@dataclass(frozen=True)
class Deriv:
    child: object


@dataclass(frozen=True)
class HatDeriv:
    smooth: Tuple
    child: object


# ---------------------------------------------------------------------------
# Tokenizer.

_TOKEN_RE = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+)"
                       r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
                       r"|(?P<punct>[()\[\],+\-*]))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            at = len(text) - len(stripped) + 1
            raise DslSyntaxError(f"unexpected character {stripped[0]!r}", at)
        if m.end() == m.start():
            break
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind) + 1))
        pos = m.end()
    tokens.append(("end", "", len(text) + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected):
        kind, value, pos = self.peek()
        shown = value if kind != "end" else "end of input"
        raise DslSyntaxError(f"unexpected {shown!r}", pos, expected)

    def expect(self, value):
        kind, got, pos = self.peek()
        if got != value:
            self.fail({value})
        return self.advance()

    def number(self):
        sign = 1.0
        kind, value, pos = self.peek()
        if kind == "punct" and value in "+-":
            if value == "-":
                sign = -1.0
            self.advance()
            kind, value, pos = self.peek()
        if kind != "num":
            self.fail({"number"})
        self.advance()
        return sign * float(value)

    # grammar -------------------------------------------------------------

    def parse(self):
        node = self.expr()
        kind, value, pos = self.peek()
        if kind != "end":
            self.fail({"+", "-", "*", "end of input"})
        return node

    def expr(self):
        node = self.term()
        while True:
            kind, value, _ = self.peek()
            if kind == "punct" and value in "+-":
                self.advance()
                right = self.term()
                node = Add(node, right) if value == "+" else Sub(node, right)
            else:
                return node

    def term(self):
        node = self.factor()
        while True:
            kind, value, _ = self.peek()
            if kind == "punct" and value == "*":
                self.advance()
                node = Mul(node, self.factor())
            else:
                return node

    def factor(self):
        kind, value, pos = self.peek()
        if kind == "num":
            self.advance()
            return Lit(float(value))
        if kind == "punct" and value == "-" \
                and self.tokens[self.i + 1][0] == "num":
            return Lit(self.number())
        if kind == "punct" and value == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        if kind == "name":
            return self.func()
        self.fail({"number", "(", "iota", "sigma", "D", "hatD"})

    def func(self):
        kind, value, pos = self.advance()
        if value == "iota":
            self.expect("(")
            d = self.dist()
            self.expect(")")
            return Iota(d)
        if value == "sigma":
            self.expect("(")
            s = self.smooth()
            self.expect(")")
            return SigmaF(s)
        if value == "D":
            self.expect("(")
            node = self.expr()
            self.expect(")")
            return Deriv(node)
        if value == "hatD":
            self.expect("[")
            s = self.smooth()
            self.expect("]")
            self.expect("(")
            node = self.expr()
            self.expect(")")
            return HatDeriv(s, node)
        raise DslSyntaxError(f"unknown function {value!r}", pos,
                             {"iota", "sigma", "D", "hatD"})

    def dist(self):
        kind, value, pos = self.peek()
        if kind != "name":
            self.fail({"delta", "ddelta", "H", "reg"})
        self.advance()
        if value == "delta":
            x0 = 0.0
            if self.peek()[1] == "(":
                self.advance()
                x0 = self.number()
                self.expect(")")
            return ("delta", x0)
        if value == "ddelta":
            self.expect("(")
            kind, kval, kpos = self.peek()
            if kind != "num":
                self.fail({"integer"})
            self.advance()
            if "." in kval or "e" in kval.lower():
                raise DslSyntaxError("derivative order must be an integer",
                                     kpos, {"integer"})
            k = int(kval)
            x0 = 0.0
            if self.peek()[1] == ",":
                self.advance()
                x0 = self.number()
            self.expect(")")
            return ("ddelta", k, x0)
        if value == "H":
            x0 = 0.0
            if self.peek()[1] == "(":
                self.advance()
                x0 = self.number()
                self.expect(")")
            return ("H", x0)
        if value == "reg":
            self.expect("(")
            s = self.smooth()
            self.expect(")")
            return ("reg", s)
        raise DslSyntaxError(f"unknown distribution {value!r}", pos,
                             {"delta", "ddelta", "H", "reg"})

    def smooth(self):
        kind, value, pos = self.peek()
        if kind != "name":
            self.fail({"sin", "cos", "exp", "poly", "bump"})
        self.advance()
        if value in ("sin", "cos", "exp"):
            return (value,)
        if value == "poly":
            self.expect("(")
            coeffs = [self.number()]
            while self.peek()[1] == ",":
                self.advance()
                coeffs.append(self.number())
            self.expect(")")
            return ("poly", tuple(coeffs))
        if value == "bump":
            self.expect("(")
            r = self.number()
            self.expect(")")
            return ("bump", r)
        raise DslSyntaxError(f"unknown smooth function {value!r}", pos,
                             {"sin", "cos", "exp", "poly", "bump"})


def parse(text: str):
    """Parse DSL text into an AST."""
    return _Parser(text).parse()


def parse_smooth(text: str):
    """Parse a single smooth-function literal, e.g. 'sin' or 'poly(0,0,0,1)'."""
    p = _Parser(text)
    spec = p.smooth()
    if p.peek()[0] != "end":
        p.fail({"end of input"})
    return _smooth_obj(spec)


# ---------------------------------------------------------------------------
# Formatting with minimal parentheses.

def _num(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _smooth_text(spec: Tuple) -> str:
    if spec[0] == "poly":
        return "poly(" + ", ".join(_num(c) for c in spec[1]) + ")"
    if spec[0] == "bump":
        return f"bump({_num(spec[1])})"
    return spec[0]


def _dist_text(d: Tuple) -> str:
    if d[0] == "delta":
        return "delta" if d[1] == 0.0 else f"delta({_num(d[1])})"
    if d[0] == "ddelta":
        if d[2] == 0.0:
            return f"ddelta({d[1]})"
        return f"ddelta({d[1]}, {_num(d[2])})"
    if d[0] == "H":
        return "H" if d[1] == 0.0 else f"H({_num(d[1])})"
    return f"reg({_smooth_text(d[1])})"


def _level(node) -> int:
    if isinstance(node, (Add, Sub)):
        return 1
    if isinstance(node, Mul):
        return 2
    return 3


def _fmt(node, parent_level: int, right_side: bool) -> str:
    level = _level(node)
    if isinstance(node, Lit):
        text = _num(node.value)
    elif isinstance(node, Iota):
        text = f"iota({_dist_text(node.dist)})"
    elif isinstance(node, SigmaF):
        text = f"sigma({_smooth_text(node.smooth)})"
    elif isinstance(node, Deriv):
        text = f"D({_fmt(node.child, 0, False)})"
    elif isinstance(node, HatDeriv):
        text = (f"hatD[{_smooth_text(node.smooth)}]"
                f"({_fmt(node.child, 0, False)})")
    elif isinstance(node, (Add, Sub)):
        op = " + " if isinstance(node, Add) else " - "
        text = (_fmt(node.left, 1, False) + op + _fmt(node.right, 1, True))
    elif isinstance(node, Mul):
        text = _fmt(node.left, 2, False) + "*" + _fmt(node.right, 2, True)
    else:
        raise TypeError(f"not an AST node: {node!r}")
    # left associativity: a right-hand child at the parent's own level
    # still needs parentheses (a - (b + c), a*(b*c) stay as written)
    if level < parent_level or (level == parent_level and right_side
                                and parent_level in (1, 2)):
        return "(" + text + ")"
    return text


def format(node) -> str:
    """Render an AST with canonical spacing and minimal parentheses."""
    return _fmt(node, 0, False)


# ---------------------------------------------------------------------------
# Lowering to representatives.

def _smooth_obj(spec: Tuple):
    if spec[0] == "poly":
        return catalog("poly", *spec[1])
    return catalog(*spec)


def _dist_obj(d: Tuple):
    if d[0] == "delta":
        return dist_mod.delta(d[1])
    if d[0] == "ddelta":
        return dist_mod.delta_derivative(d[1], d[2])
    if d[0] == "H":
        return dist_mod.heaviside(d[1])
    return dist_mod.regular(_smooth_obj(d[1]))


def _lower(node):
    if isinstance(node, Lit):
        return gf.Const(node.value)
    if isinstance(node, Iota):
        return gf.Embed(_dist_obj(node.dist))
    if isinstance(node, SigmaF):
        return gf.Sigma(_smooth_obj(node.smooth))
    if isinstance(node, Add):
        return gf.Sum(_lower(node.left), _lower(node.right))
    if isinstance(node, Sub):
        return gf.Sum(_lower(node.left),
                      gf.Scale(-1.0, _lower(node.right)))
    if isinstance(node, Mul):
        return gf.Product(_lower(node.left), _lower(node.right))
    if isinstance(node, Deriv):
        return gf.PartialD(_lower(node.child))
    if isinstance(node, HatDeriv):
        return gf.HatD(_smooth_obj(node.smooth), _lower(node.child))
    raise TypeError(f"not an AST node: {node!r}")


def to_representative(node, domain: Domain = FULL_LINE) -> gf.Representative:
    return gf.Representative(_lower(node), domain)


def parse_expr(text: str, domain: Domain = FULL_LINE) -> gf.Representative:
    return to_representative(parse(text), domain)


# ---------------------------------------------------------------------------
# PosPoly text form: "3*y0^2*z1 + 0.5*z0".

_VAR_RE = re.compile(r"^([yz])(\d+)(?:\^(\d+))?$")


def parse_pospoly(text: str, k: int):
    from .seminorm import PosPoly

    monomials = []
    for chunk in text.split("+"):
        chunk = chunk.strip()
        if not chunk or chunk == "0":
            continue
        coeff = 1.0
        alpha = [0] * (k + 1)
        beta = [0] * (k + 1)
        seen_coeff = False
        for factor in chunk.split("*"):
            factor = factor.strip()
            m = _VAR_RE.match(factor)
            if m:
                kind, idx, exp = m.group(1), int(m.group(2)), m.group(3)
                e = int(exp) if exp else 1
                if idx > k:
                    raise DslSyntaxError(
                        f"variable index {idx} exceeds k={k}", 1)
                (alpha if kind == "y" else beta)[idx] += e
            else:
                try:
                    coeff *= float(factor)
                except ValueError:
                    raise DslSyntaxError(
                        f"bad factor {factor!r} in positive polynomial", 1)
                seen_coeff = True
        monomials.append((tuple(alpha), tuple(beta), coeff))
    return PosPoly(k, tuple(monomials))
