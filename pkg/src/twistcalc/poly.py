"""Sparse multivariate polynomials over Q in variables x1..xd."""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterator, Mapping, Tuple

from .coefficients import format_scalar, scalar
from .errors import IndivisibleError

Exponent = Tuple[int, ...]


def grlex_key(e: Exponent):
    """Graded lexicographic sort key (total degree first, then lex with x1 > x2 > ...)."""
    return (sum(e), e)


def unit_vector(i: int, d: int) -> Exponent:
    """Exponent vector of x_i (1-based index)."""
    return tuple(1 if j == i - 1 else 0 for j in range(d))


def exponents_up_to(d: int, degree: int):
    """All exponent vectors of total degree <= ``degree``, in grlex order."""
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            for a in range(remaining + 1):
                out.append(prefix + (a,))
            return
        for a in range(remaining + 1):
            rec(prefix + (a,), remaining - a, slots - 1)

    if d == 0:
        return [()]
    rec((), degree, d)
    out.sort(key=grlex_key)
    return out


class Poly:
    """Immutable sparse polynomial.

    ``terms`` maps exponent vectors (length ``d``) to nonzero Fractions.
    """

    __slots__ = ("d", "_t", "_hash")

    def __init__(self, d: int, terms: Mapping[Exponent, object] | None = None):
        self.d = d
        t: Dict[Exponent, Fraction] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(a) for a in e)
            if len(e) != d or any(a < 0 for a in e):
                raise ValueError(f"bad exponent {e} for {d} variables")
            c = scalar(c)
            if c:
                t[e] = t.get(e, Fraction(0)) + c
                if not t[e]:
                    del t[e]
        self._t = t
        self._hash = None

    @classmethod
    def _raw(cls, d: int, t: Dict[Exponent, Fraction]) -> "Poly":
        p = cls.__new__(cls)
        p.d = d
        p._t = t
        p._hash = None
        return p

    # constructors
    @classmethod
    def zero(cls, d: int) -> "Poly":
        return cls._raw(d, {})

    @classmethod
    def const(cls, c, d: int) -> "Poly":
        c = scalar(c)
        return cls._raw(d, {(0,) * d: c} if c else {})

    @classmethod
    def one(cls, d: int) -> "Poly":
        return cls.const(1, d)

    @classmethod
    def var(cls, i: int, d: int) -> "Poly":
        if not 1 <= i <= d:
            raise ValueError(f"variable x{i} out of range for d={d}")
        return cls._raw(d, {unit_vector(i, d): Fraction(1)})

    @classmethod
    def monomial(cls, e: Exponent, c=1) -> "Poly":
        return cls(len(e), {tuple(e): c})

    # inspection
    @property
    def terms(self) -> Mapping[Exponent, Fraction]:
        return self._t

    def items(self) -> Iterator[Tuple[Exponent, Fraction]]:
        """Terms in ascending grlex order."""
        for e in sorted(self._t, key=grlex_key):
            yield e, self._t[e]

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self):
        return bool(self._t)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._t)

    def constant_term(self) -> Fraction:
        return self._t.get((0,) * self.d, Fraction(0))

    def coefficient(self, e: Exponent) -> Fraction:
        return self._t.get(tuple(e), Fraction(0))

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._t), default=-1)

    def degree_in(self, i: int) -> int:
        return max((e[i - 1] for e in self._t), default=-1)

    def variables(self):
        return sorted({j + 1 for e in self._t for j, a in enumerate(e) if a})

    def is_univariate_in(self, i: int) -> bool:
        return all(a == 0 for e in self._t for j, a in enumerate(e) if j != i - 1)

    # arithmetic
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.d != self.d:
                raise ValueError(f"dimension mismatch: {self.d} vs {other.d}")
            return other
        return Poly.const(other, self.d)

    def __add__(self, other):
        other = self._coerce(other)
        t = dict(self._t)
        for e, c in other._t.items():
            v = t.get(e)
            if v is None:
                t[e] = c
            else:
                v += c
                if v:
                    t[e] = v
                else:
                    del t[e]
        return Poly._raw(self.d, t)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.d, {e: -c for e, c in self._t.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "Poly":
        c = scalar(c)
        if not c:
            return Poly.zero(self.d)
        return Poly._raw(self.d, {e: v * c for e, v in self._t.items()})

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        other = self._coerce(other)
        if len(self._t) > len(other._t):
            a, b = other._t, self._t
        else:
            a, b = self._t, other._t
        t: Dict[Exponent, Fraction] = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                v = t.get(e)
                t[e] = c1 * c2 if v is None else v + c1 * c2
        return Poly._raw(self.d, {e: c for e, c in t.items() if c})

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result = Poly.one(self.d)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.d == other.d and self._t == other._t
        if isinstance(other, (int, Fraction)):
            return self._t == ({(0,) * self.d: Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.d, frozenset(self._t.items())))
        return self._hash

    # substitution and calculus
    def substitute(self, i: int, g: "Poly", power_cache: list | None = None) -> "Poly":
        """Replace x_i by the polynomial ``g``.

        ``power_cache`` (a list starting ``[1, g]``) may be shared between calls
        with the same ``g`` to avoid recomputing powers.
        """
        g = self._coerce(g)
        k = i - 1
        powers = power_cache if power_cache is not None else [Poly.one(self.d), g]
        if not powers:
            powers.extend([Poly.one(self.d), g])
        groups: Dict[int, Dict[Exponent, Fraction]] = {}
        for e, c in self._t.items():
            rest = e[:k] + (0,) + e[k + 1:]
            groups.setdefault(e[k], {})[rest] = c
        result = Poly.zero(self.d)
        for a, rest in groups.items():
            while len(powers) <= a:
                powers.append(powers[-1] * g)
            result = result + Poly._raw(self.d, rest) * powers[a]
        return result

    def diff(self, i: int) -> "Poly":
        """Classical partial derivative with respect to x_i."""
        k = i - 1
        t = {}
        for e, c in self._t.items():
            if e[k]:
                t[e[:k] + (e[k] - 1,) + e[k + 1:]] = c * e[k]
        return Poly._raw(self.d, t)

    def divide_univariate(self, i: int, g: "Poly") -> "Poly":
        """Exact quotient by ``g``, a polynomial in x_i alone with rational coefficients.

        Raises IndivisibleError when the remainder is nonzero.
        """
        g = self._coerce(g)
        if g.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if not g.is_univariate_in(i):
            raise ValueError(f"divisor must involve x{i} only")
        k = i - 1
        gcoef = {e[k]: c for e, c in g._t.items()}
        gdeg = max(gcoef)
        lead = gcoef[gdeg]
        groups: Dict[Exponent, Dict[int, Fraction]] = {}
        for e, c in self._t.items():
            rest = e[:k] + (0,) + e[k + 1:]
            groups.setdefault(rest, {})[e[k]] = c
        quotient: Dict[Exponent, Fraction] = {}
        for rest, coeffs in groups.items():
            rem = dict(coeffs)
            while rem:
                top = max(rem)
                if top < gdeg:
                    raise IndivisibleError(
                        f"{self} is not divisible by {g} in x{i}"
                    )
                qc = rem[top] / lead
                shift = top - gdeg
                quotient[rest[:k] + (shift,) + rest[k + 1:]] = qc
                for a, c in gcoef.items():
                    j = a + shift
                    v = rem.get(j, Fraction(0)) - qc * c
                    if v:
                        rem[j] = v
                    else:
                        rem.pop(j, None)
        return Poly._raw(self.d, quotient)

    def evaluate(self, point) -> Fraction:
        total = Fraction(0)
        point = [scalar(v) for v in point]
        for e, c in self._t.items():
            term = c
            for v, a in zip(point, e):
                if a:
                    term *= v ** a
            total += term
        return total

    def truncate(self, degree: int) -> "Poly":
        return Poly._raw(self.d, {e: c for e, c in self._t.items() if sum(e) <= degree})

    # printing
    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({self.d}, {format_poly(self)!r})"


def format_monomial(e: Exponent, names=None) -> str:
    parts = []
    for j, a in enumerate(e):
        if a == 0:
            continue
        name = names[j] if names else f"x{j + 1}"
        parts.append(name if a == 1 else f"{name}^{a}")
    return "*".join(parts)


def format_poly(p: Poly, names=None) -> str:
    """Canonical text: terms in descending grlex order, e.g. ``3/2*x1^2*x3 - x2 + 5``."""
    if p.is_zero():
        return "0"
    out = []
    for e in sorted(p.terms, key=grlex_key, reverse=True):
        c = p.terms[e]
        mono = format_monomial(e, names)
        mag = abs(c)
        if not mono:
            body = format_scalar(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{format_scalar(mag)}*{mono}"
        if not out:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)
