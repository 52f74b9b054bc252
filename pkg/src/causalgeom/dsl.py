"""Region DSL: a small recursive-descent parser and a canonical printer.

    region     := term {('∪' | '|') term}
    term       := factor {('∩' | '&') factor}
    factor     := call | keyword | constraint | '(' region ')'
    call       := 'union' '(' region {',' region} ')' | 'inter' '(' ... ')'
                | 'compl' '(' region ')' | 'closure' '(' region ')'
                | 'translate' '(' region ',' vector ')'
                | 'dcone' '(' vector ',' vector ')'
                | 'wedge' '(' vector ',' number ',' vector ',' number ')'
                | 'timeslice' '(' number ',' number ')' | 'shell' '(' number ',' number ')'
                | 'halfspace' '(' vector ',' number ')' | 'points' '(' vector {',' vector} ')'
    keyword    := 'w1' | 'lhp' | 'full' | 'empty'
    constraint := '{' linear cmp linear '}'      e.g. {x₀ - 0.5*x1 > 0}
    vector     := '(' number {',' number} ')'

Lines starting with '#' are comments. The dimension comes from the first
vector (or the largest constraint index, or the caller's default).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .regions import (CausalComplement, ConeComplement, DoubleCone, Empty, Full, HalfSpace,
                      Intersection, LightlikeHalfPlane, LightlikeHalfPlaneComplement, PointSet,
                      Region, Shell, TimeSlice, Translate, Union, Wedge)


class DSLError(ValueError):
    def __init__(self, message, line, col, expected=()):
        self.line, self.col = line, col
        self.expected = sorted(set(expected))
        extra = f"; expected one of {', '.join(self.expected)}" if self.expected else ""
        super().__init__(f"{line}:{col}: {message}{extra}")
        self.message = message

    def to_json(self) -> dict:
        return {"error": type(self).__name__, "message": self.message, "line": self.line,
                "column": self.col, "expected": self.expected}


class DSLSyntaxError(DSLError):
    pass


class DSLSemanticError(DSLError):
    pass


_SUBSCRIPTS = str.maketrans("₀₁₂₃₄₅₆₇₈₉", "0123456789")
_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+|\#[^\n]*)
  | (?P<nl>\n)
  | (?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)
  | (?P<var>x[0-9₀-₉]+)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>>=|<=|≥|≤|[(),{}+\-*<>∪∩|&])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(src: str) -> list[Token]:
    out, line, start, pos = [], 1, 0, 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m:
            raise DSLSyntaxError(f"unexpected character {src[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, start = line + 1, m.end()
        elif kind != "ws":
            text = m.group()
            if kind == "op":
                text = {"≥": ">=", "≤": "<=", "|": "∪", "&": "∩"}.get(text, text)
            out.append(Token(kind, text, line, pos - start + 1))
        pos = m.end()
    out.append(Token("eof", "", line, pos - start + 1))
    return out


CALLS = ("union", "inter", "compl", "closure", "translate", "dcone", "wedge", "timeslice",
         "shell", "halfspace", "points")
KEYWORDS = ("w1", "lhp", "full", "empty")
_FACTOR_START = set(CALLS) | set(KEYWORDS) | {"{", "("}


class _Parser:
    def __init__(self, src: str):
        self.toks = tokenize(src)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def fail(self, expected, what=None):
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise DSLSyntaxError(what or f"unexpected {found}", t.line, t.col, expected)

    def expect(self, text):
        if self.tok.text != text or self.tok.kind == "eof":
            self.fail([repr(text)])
        self.i += 1
        return self.toks[self.i - 1]

    def accept(self, text) -> bool:
        if self.tok.text == text and self.tok.kind != "eof":
            self.i += 1
            return True
        return False

    # region expressions are returned as (kind, pos, args) tuples
    def region(self):
        node = self.term()
        while self.tok.text == "∪":
            t = self.tok
            self.i += 1
            node = ("union", (t.line, t.col), [node, self.term()])
        return node

    def term(self):
        node = self.factor()
        while self.tok.text == "∩":
            t = self.tok
            self.i += 1
            node = ("inter", (t.line, t.col), [node, self.factor()])
        return node

    def factor(self):
        t = self.tok
        pos = (t.line, t.col)
        if t.kind == "name" and t.text in KEYWORDS:
            self.i += 1
            return (t.text, pos, [])
        if t.kind == "name" and t.text in CALLS:
            self.i += 1
            self.expect("(")
            args = getattr(self, "_args_" + t.text)()
            self.expect(")")
            return (t.text, pos, args)
        if t.text == "{":
            return self.constraint()
        if t.text == "(":
            self.i += 1
            node = self.region()
            self.expect(")")
            return node
        self.fail(sorted(repr(x) for x in _FACTOR_START))

    def _regions(self, n=None):
        out = [self.region()]
        while (n is None or len(out) < n) and self.accept(","):
            out.append(self.region())
        return out

    def _args_union(self):
        return self._regions()

    _args_inter = _args_union

    def _args_compl(self):
        return [self.region()]

    _args_closure = _args_compl

    def _args_translate(self):
        r = self.region()
        self.expect(",")
        return [r, self.vector()]

    def _args_dcone(self):
        a = self.vector()
        self.expect(",")
        return [a, self.vector()]

    def _args_wedge(self):
        n1 = self.vector()
        self.expect(",")
        d1 = self.number()
        self.expect(",")
        n2 = self.vector()
        self.expect(",")
        return [n1, d1, n2, self.number()]

    def _args_timeslice(self):
        a = self.number()
        self.expect(",")
        return [a, self.number()]

    _args_shell = _args_timeslice

    def _args_halfspace(self):
        n = self.vector()
        self.expect(",")
        return [n, self.number()]

    def _args_points(self):
        out = [self.vector()]
        while self.accept(","):
            out.append(self.vector())
        return out

    def number(self) -> float:
        sign = 1.0
        while self.tok.text in "+-" and self.tok.kind == "op":
            sign *= -1.0 if self.tok.text == "-" else 1.0
            self.i += 1
        if self.tok.kind != "num":
            self.fail(["number"])
        self.i += 1
        return sign * float(self.toks[self.i - 1].text)

    def vector(self):
        t = self.tok
        self.expect("(")
        v = [self.number()]
        while self.accept(","):
            v.append(self.number())
        self.expect(")")
        return ("vec", (t.line, t.col), v)

    def linear(self):
        """Sum of terms c*xk or constants; returns ({k: c}, constant)."""
        coef, const = {}, 0.0
        first = True
        while True:
            sign = 1.0
            if self.tok.text in ("+", "-"):
                while self.tok.text in ("+", "-"):
                    sign *= -1.0 if self.tok.text == "-" else 1.0
                    self.i += 1
            elif not first:
                break
            c = 1.0
            if self.tok.kind == "num":
                c = float(self.tok.text)
                self.i += 1
                if self.accept("*"):
                    pass
                elif self.tok.kind != "var":
                    const += sign * c
                    first = False
                    continue
            if self.tok.kind != "var":
                self.fail(["variable x0..xs", "number"])
            k = int(self.tok.text[1:].translate(_SUBSCRIPTS))
            self.i += 1
            coef[k] = coef.get(k, 0.0) + sign * c
            first = False
        return coef, const

    def constraint(self):
        t = self.expect("{")
        lhs, c1 = self.linear()
        op = self.tok.text
        if op not in (">", ">=", "<", "<="):
            self.fail(["'>'", "'>='", "'<'", "'<='"])
        self.i += 1
        rhs, c2 = self.linear()
        self.expect("}")
        coef = {k: lhs.get(k, 0.0) - rhs.get(k, 0.0) for k in set(lhs) | set(rhs)}
        const = c2 - c1
        if op in ("<", "<="):
            coef = {k: -v for k, v in coef.items()}
            const = -const
        return ("constraint", (t.line, t.col), [coef, const, op in (">=", "<=")])


def _first_dim(node) -> Optional[int]:
    kind, _, args = node
    if kind == "vec":
        return len(args) - 1
    if kind == "constraint":
        return None
    for a in args:
        if isinstance(a, tuple):
            d = _first_dim(a)
            if d is not None:
                return d
    return None


def _max_index(node) -> int:
    kind, _, args = node
    if kind == "constraint":
        return max(args[0], default=0)
    return max([_max_index(a) for a in args if isinstance(a, tuple) and a[0] != "vec"],
               default=0)


class _Builder:
    def __init__(self, s: int):
        self.s = s

    def vec(self, node):
        _, (line, col), v = node
        if len(v) != self.s + 1:
            raise DSLSemanticError(f"vector has dimension {len(v)}, expected {self.s + 1}",
                                   line, col)
        return np.array(v)

    def build(self, node) -> Region:
        kind, (line, col), args = node
        try:
            return getattr(self, "b_" + kind)(*args)
        except DSLError:
            raise
        except ValueError as e:
            raise DSLSemanticError(str(e), line, col) from None

    def b_union(self, *parts):
        return Union([self.build(p) for p in parts])

    def b_inter(self, *parts):
        return Intersection([self.build(p) for p in parts])

    def b_compl(self, r):
        return CausalComplement(self.build(r))

    def b_closure(self, r):
        return self.build(r).closure()

    def b_translate(self, r, v):
        return Translate(self.build(r), self.vec(v))

    def b_dcone(self, a, b):
        return DoubleCone(self.vec(a), self.vec(b))

    def b_wedge(self, n1, d1, n2, d2):
        return Wedge(self.vec(n1), d1, self.vec(n2), d2)

    def b_timeslice(self, a, b):
        return TimeSlice(a, b)

    def b_shell(self, lo, hi):
        return Shell(lo, hi)

    def b_halfspace(self, n, c):
        return HalfSpace(self.vec(n), c)

    def b_points(self, *vs):
        return PointSet([self.vec(v) for v in vs])

    def b_w1(self):
        return Wedge.w1(self.s)

    def b_lhp(self):
        return LightlikeHalfPlane(self.s)

    def b_full(self):
        return Full()

    def b_empty(self):
        return Empty()

    def b_constraint(self, coef, const, closed):
        if max(coef, default=0) > self.s:
            raise ValueError(f"constraint uses x{max(coef)} in dimension 1+{self.s}")
        n = np.zeros(self.s + 1)
        for k, c in coef.items():
            n[k] = c
        if not n.any():
            raise ValueError("constraint has no variables")
        return HalfSpace(n, const, closed)


def parse_region(src: str, s: Optional[int] = None) -> Region:
    p = _Parser(src)
    if p.tok.kind == "eof":
        p.fail(sorted(repr(x) for x in _FACTOR_START), "empty region script")
    node = p.region()
    if p.tok.kind != "eof":
        p.fail(["'∪'", "'∩'", "end of input"])
    dim = _first_dim(node)
    if dim is None:
        dim = s if s is not None else max(2, _max_index(node))
    elif s is not None and dim != s:
        raise DSLSemanticError(f"script dimension 1+{dim} differs from requested 1+{s}",
                               *node[1])
    if dim < 1:
        raise DSLSemanticError("need at least one space dimension", *node[1])
    return _Builder(dim).build(node)


# ----------------------------------------------------------------- printer

def fmt_number(x: float) -> str:
    x = float(x)
    if x == 0:
        return "0"
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _fmt_vec(v) -> str:
    return "(" + ",".join(fmt_number(c) for c in v) + ")"


def print_region(R: Region) -> str:
    if isinstance(R, Union):
        return "union(" + ", ".join(print_region(p) for p in R.parts) + ")"
    if isinstance(R, Intersection):
        return "inter(" + ", ".join(print_region(p) for p in R.parts) + ")"
    if isinstance(R, CausalComplement):
        return f"compl({print_region(R.inner)})"
    if isinstance(R, Translate):
        return f"translate({print_region(R.inner)}, {_fmt_vec(R.v)})"
    if isinstance(R, ConeComplement):
        cone = f"dcone({_fmt_vec(R.a)}, {_fmt_vec(R.b)})"
        return f"compl({cone})" if R.closed else f"compl(closure({cone}))"
    if isinstance(R, LightlikeHalfPlaneComplement):
        return "compl(lhp)"
    if isinstance(R, DoubleCone):
        out = f"dcone({_fmt_vec(R.a)}, {_fmt_vec(R.b)})"
    elif isinstance(R, Wedge):
        if Wedge(R.nplus, R.dplus, R.nminus, R.dminus) == Wedge.w1(R.s):
            return "closure(w1)" if R.closed else "w1"
        out = (f"wedge({_fmt_vec(R.nplus)}, {fmt_number(R.dplus)}, "
               f"{_fmt_vec(R.nminus)}, {fmt_number(R.dminus)})")
    elif isinstance(R, TimeSlice):
        return f"timeslice({fmt_number(R.t0)}, {fmt_number(R.t1)})"
    elif isinstance(R, Shell):
        out = f"shell({fmt_number(R.lo)}, {fmt_number(R.hi)})"
    elif isinstance(R, HalfSpace):
        terms = [f"{fmt_number(c)}*x{k}" for k, c in enumerate(R.normal) if c != 0]
        op = ">=" if R.closed else ">"
        return "{" + " + ".join(terms) + f" {op} {fmt_number(R.offset)}" + "}"
    elif isinstance(R, LightlikeHalfPlane):
        out = "lhp"
    elif isinstance(R, PointSet):
        return "points(" + ", ".join(_fmt_vec(p) for p in R.points) + ")"
    elif isinstance(R, Full):
        return "full"
    elif isinstance(R, Empty):
        return "empty"
    else:
        raise TypeError(f"{type(R).__name__} has no DSL form")
    return f"closure({out})" if R.closed else out


def bind_window(R: Region, G) -> Region:
    """Copy of R whose lazy complements sample on window G when needed."""
    if isinstance(R, CausalComplement):
        return CausalComplement(bind_window(R.inner, G), G)
    if isinstance(R, Union):
        return Union([bind_window(p, G) for p in R.parts])
    if isinstance(R, Intersection):
        return Intersection([bind_window(p, G) for p in R.parts])
    if isinstance(R, Translate):
        return Translate(bind_window(R.inner, G), R.v)
    return R
