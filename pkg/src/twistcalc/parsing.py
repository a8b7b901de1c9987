"""Text syntax for polynomials and operator expressions.

Grammar::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor (['*'|'/'] factor)*        -- juxtaposition means '*'
    factor := '-' factor | atom ['^' int]
    atom   := int | 'x'i | 'd'i | 'dp[' int (',' int)* ']'
            | 'q' | 'q'i | '(' expr ')' | '(' expr ')_q' | '(' expr ')_q'i

``q`` and ``qi`` name the q-parameters of the configured twists and
``(n)_q`` is the q-integer 1 + q + ... + q^(n-1).  Products are read left to
right as composition, so ``d1 x1`` is the operator f -> d1(x1 f).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .coefficients import q_integer
from .errors import ParseError
from .operators import Coeff, D, DP, OperatorWord
from .poly import Poly, format_poly

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9]*)|(\S))", re.S)

FACTOR_START = ("integer", "variable", "operator", "(", "-")


@dataclass
class Token:
    kind: str  # 'int', 'ident', or the punctuation character, or 'end'
    text: str
    line: int
    column: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    line, col0 = 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.lastindex is None:
            break
        start = m.start(m.lastindex)
        skipped = text[pos:start]
        for ch_i, ch in enumerate(skipped):
            if ch == "\n":
                line += 1
                col0 = pos + ch_i + 1
        col = start - col0 + 1
        if m.group(1):
            tokens.append(Token("int", m.group(1), line, col))
        elif m.group(2):
            tokens.append(Token("ident", m.group(2), line, col))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()[],_":
                raise ParseError(f"unexpected character {ch!r}", line, col, FACTOR_START)
            tokens.append(Token(ch, ch, line, col))
        pos = m.end()
    # position of the end marker
    tail = text[pos:]
    for ch_i, ch in enumerate(tail):
        if ch == "\n":
            line += 1
            col0 = pos + ch_i + 1
    tokens.append(Token("end", "", line, len(text) - col0 + 1))
    return tokens


Words = List[Tuple[object, ...]]
Value = Union[Poly, "WordSum"]


class WordSum:
    """Sum of words during parsing; each word is a tuple of atoms."""

    __slots__ = ("words",)

    def __init__(self, words: Words):
        self.words = words


def _merge(word: Sequence[object]) -> Tuple[object, ...]:
    """Multiply adjacent coefficient atoms and drop unit coefficients."""
    out: List[object] = []
    for a in word:
        if isinstance(a, Coeff) and out and isinstance(out[-1], Coeff):
            out[-1] = Coeff(out[-1].poly * a.poly)
        else:
            out.append(a)
    if any(isinstance(a, Coeff) and a.poly.is_zero() for a in out):
        return ()
    out = [a for a in out if not (isinstance(a, Coeff) and a.poly == 1)] or [out[0]]
    return tuple(out)


class _Parser:
    def __init__(self, text: str, d: int, scalars: Mapping[str, Fraction], allow_ops: bool):
        self.tokens = tokenize(text)
        self.pos = 0
        self.d = d
        self.scalars = scalars
        self.allow_ops = allow_ops

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def error(self, message, expected=()):
        t = self.tok
        raise ParseError(message, t.line, t.column, expected)

    def expect(self, kind: str):
        if self.tok.kind != kind:
            self.error(f"unexpected {self._describe(self.tok)}", (kind,))
        return self.advance()

    @staticmethod
    def _describe(t: Token) -> str:
        return "end of input" if t.kind == "end" else repr(t.text)

    # values -----------------------------------------------------------------
    def const(self, c) -> Poly:
        return Poly.const(c, self.d)

    def to_words(self, v: Value) -> Words:
        if isinstance(v, Poly):
            return [(Coeff(v),)] if not v.is_zero() else []
        return v.words

    def add(self, a: Value, b: Value) -> Value:
        if isinstance(a, Poly) and isinstance(b, Poly):
            return a + b
        return WordSum(self.to_words(a) + self.to_words(b))

    def mul(self, a: Value, b: Value) -> Value:
        if isinstance(a, Poly) and isinstance(b, Poly):
            return a * b
        out = []
        for w1 in self.to_words(a):
            for w2 in self.to_words(b):
                w = _merge(w1 + w2)
                if w:
                    out.append(w)
        return WordSum(out)

    def neg(self, a: Value) -> Value:
        return self.mul(self.const(-1), a)

    # grammar ----------------------------------------------------------------
    def parse(self) -> Value:
        v = self.expr()
        if self.tok.kind != "end":
            self.error(f"unexpected {self._describe(self.tok)}", ("+", "-", "*", "/", "^", "end of input"))
        return v

    def expr(self) -> Value:
        sign = None
        if self.tok.kind in ("+", "-"):
            sign = self.advance().kind
        v = self.term()
        if sign == "-":
            v = self.neg(v)
        while self.tok.kind in ("+", "-"):
            op = self.advance().kind
            rhs = self.term()
            v = self.add(v, rhs if op == "+" else self.neg(rhs))
        return v

    def starts_factor(self) -> bool:
        t = self.tok
        return t.kind in ("int", "ident", "(")

    def term(self) -> Value:
        v = self.factor()
        while True:
            if self.tok.kind == "*":
                self.advance()
                v = self.mul(v, self.factor())
            elif self.tok.kind == "/":
                t = self.advance()
                rhs = self.factor()
                if not isinstance(rhs, Poly) or not rhs.is_constant() or rhs.is_zero():
                    raise ParseError("division only by a nonzero constant", t.line, t.column)
                v = self.mul(v, self.const(1 / rhs.constant_term()))
            elif self.starts_factor():
                v = self.mul(v, self.factor())
            else:
                return v

    def factor(self) -> Value:
        if self.tok.kind == "-":
            self.advance()
            return self.neg(self.factor())
        base = self.atom()
        if self.tok.kind == "^":
            self.advance()
            t = self.expect("int")
            n = int(t.text)
            out: Value = self.const(1)
            for _ in range(n):
                out = self.mul(out, base)
            return out
        return base

    def atom(self) -> Value:
        t = self.tok
        if t.kind == "int":
            self.advance()
            return self.const(int(t.text))
        if t.kind == "ident":
            self.advance()
            return self.ident(t)
        if t.kind == "(":
            self.advance()
            inner = self.expr()
            self.expect(")")
            if self.tok.kind == "_":
                return self.q_integer(inner)
            return inner
        self.error(f"unexpected {self._describe(t)}", FACTOR_START)

    def q_integer(self, inner: Value) -> Poly:
        us = self.advance()
        name = self.expect("ident")
        if not re.fullmatch(r"q\d*", name.text):
            raise ParseError(f"expected a q-parameter after '_', got {name.text!r}", name.line, name.column, ("q",))
        if not isinstance(inner, Poly) or not inner.is_constant():
            raise ParseError("q-integer needs a constant argument", us.line, us.column)
        n = inner.constant_term()
        if n.denominator != 1 or n < 0:
            raise ParseError("q-integer needs a nonnegative integer", us.line, us.column)
        return self.const(q_integer(int(n), self.q_value(name)))

    def q_value(self, t: Token) -> Fraction:
        if t.text not in self.scalars:
            raise ParseError(f"unknown parameter {t.text!r} (no matching q-twist configured)", t.line, t.column)
        return self.scalars[t.text]

    def ident(self, t: Token) -> Value:
        s = t.text
        m = re.fullmatch(r"x(\d+)", s)
        if m:
            i = int(m.group(1))
            if not 1 <= i <= self.d:
                raise ParseError(f"variable {s} outside x1..x{self.d}", t.line, t.column)
            return Poly.var(i, self.d)
        if re.fullmatch(r"q\d*", s):
            return self.const(self.q_value(t))
        m = re.fullmatch(r"d(\d+)", s)
        if m:
            self.require_ops(t)
            i = int(m.group(1))
            if not 1 <= i <= self.d:
                raise ParseError(f"operator {s} outside d1..d{self.d}", t.line, t.column)
            return WordSum([(D(i),)])
        if s == "dp":
            self.require_ops(t)
            self.expect("[")
            k = [int(self.expect("int").text)]
            while self.tok.kind == ",":
                self.advance()
                k.append(int(self.expect("int").text))
            close = self.expect("]")
            if len(k) != self.d:
                raise ParseError(f"dp needs {self.d} entries, got {len(k)}", close.line, close.column)
            return WordSum([(DP(tuple(k)),)])
        raise ParseError(f"unknown identifier {s!r}", t.line, t.column, ("variable", "operator", "q"))

    def require_ops(self, t: Token):
        if not self.allow_ops:
            raise ParseError(f"operator {t.text!r} not allowed in a polynomial", t.line, t.column,
                             ("integer", "variable", "("))


def infer_dimension(text: str) -> int:
    """Largest variable index mentioned (x_i, d_i or dp[...] length); at least 1."""
    d = 1
    for t in tokenize(text):
        if t.kind == "ident":
            m = re.fullmatch(r"[xd](\d+)", t.text)
            if m:
                d = max(d, int(m.group(1)))
    m = re.findall(r"dp\s*\[([^\]]*)\]", text)
    for body in m:
        d = max(d, body.count(",") + 1)
    return d


def parse_poly(text: str, d: Optional[int] = None, scalars: Mapping[str, Fraction] | None = None) -> Poly:
    """Parse a polynomial such as ``3/2*x1^2*x3 - x2 + 5``."""
    if d is None:
        d = infer_dimension(text)
    v = _Parser(text, d, dict(scalars or {}), allow_ops=False).parse()
    assert isinstance(v, Poly)
    return v


def parse_operator(text: str, d: Optional[int] = None,
                   scalars: Mapping[str, Fraction] | None = None) -> List[OperatorWord]:
    """Parse an operator expression into a sum of words."""
    if d is None:
        d = infer_dimension(text)
    p = _Parser(text, d, dict(scalars or {}), allow_ops=True)
    v = p.parse()
    return [OperatorWord(w) for w in p.to_words(v)]


# printing ---------------------------------------------------------------------

def _single_positive(p: Poly) -> bool:
    return len(p.terms) == 1 and next(iter(p.terms.values())) > 0


def format_atom(a) -> str:
    if isinstance(a, Coeff):
        s = format_poly(a.poly)
        return s if _single_positive(a.poly) else f"({s})"
    if isinstance(a, D):
        return f"d{a.i}"
    return "dp[" + ",".join(str(x) for x in a.k) + "]"


def format_word(word: OperatorWord) -> Tuple[bool, str]:
    """(negative, text) with a leading negative single-term coefficient pulled out as a sign."""
    atoms = list(word.atoms)
    neg = False
    first = atoms[0]
    if isinstance(first, Coeff) and len(first.poly.terms) == 1 and not _single_positive(first.poly):
        neg = True
        flipped = -first.poly
        if flipped == 1 and len(atoms) > 1:
            atoms = atoms[1:]
        else:
            atoms[0] = Coeff(flipped)
    return neg, " ".join(format_atom(a) for a in atoms)


def format_words(words: Sequence[OperatorWord]) -> str:
    if not words:
        return "0"
    first = words[0].atoms
    if len(words) == 1 and len(first) == 1 and isinstance(first[0], Coeff):
        return format_poly(first[0].poly)
    out = []
    for w in words:
        neg, s = format_word(w)
        if not out:
            out.append(("-" if neg else "") + s)
        else:
            out.append((" - " if neg else " + ") + s)
    return "".join(out)


def scalars_for(spec) -> Dict[str, Fraction]:
    """Names q, q1, q2, ... bound to the q-parameters of a spec.

    ``q`` alone is bound when all q-twists share the same parameter.
    """
    out: Dict[str, Fraction] = {}
    qs = []
    for i, tw in enumerate(spec.twists, start=1):
        if tw.kind == "q":
            out[f"q{i}"] = tw.param
            qs.append(tw.param)
    if qs and all(q == qs[0] for q in qs):
        out["q"] = qs[0]
    return out
