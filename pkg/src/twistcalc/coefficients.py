"""Exact scalars, non-archimedean norms in log domain and q-analogues.

Scalars are :class:`fractions.Fraction`.  Norms are never evaluated as real
numbers: a norm is stored through its valuation ``v`` with ``|x| = p**(-v)``,
so every comparison below is an exact rational comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Union

from .errors import NormBoundViolation, ZeroDenominatorError

Scalar = Fraction
Valuation = Union[Fraction, float]  # float only ever holds math.inf

INF = math.inf


def scalar(x) -> Fraction:
    """Coerce ints, strings like ``"3/2"`` and Fractions to a Scalar."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floating point values are not exact scalars")
    return Fraction(x)


def format_scalar(x: Fraction) -> str:
    """Canonical text form: ``"5"``, ``"-3/2"``."""
    x = scalar(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def format_valuation(v: Valuation) -> str:
    if v == INF:
        return "inf"
    if v == -INF:
        return "-inf"
    return format_scalar(v)


def parse_valuation(text: str) -> Valuation:
    text = text.strip()
    if text in ("inf", "+inf"):
        return INF
    if text == "-inf":
        return -INF
    return Fraction(text)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _int_valuation(n: int, p: int) -> int:
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def padic_valuation(x, p: int) -> Valuation:
    """p-adic valuation of a rational number; ``+inf`` for zero."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    x = scalar(x)
    if x == 0:
        return INF
    return Fraction(_int_valuation(x.numerator, p) - _int_valuation(x.denominator, p))


@total_ordering
@dataclass(frozen=True)
class NormValue:
    """A norm value ``p**(-valuation)``.

    Ordering follows the *norm*: ``a <= b`` means ``|a| <= |b|``, i.e.
    ``a.valuation >= b.valuation``.  Multiplication multiplies norms.
    """

    valuation: Valuation

    def __post_init__(self):
        v = self.valuation
        if v != INF and v != -INF:
            object.__setattr__(self, "valuation", scalar(v))

    @property
    def is_zero(self) -> bool:
        return self.valuation == INF

    def __lt__(self, other: "NormValue") -> bool:
        return self.valuation > other.valuation

    def __mul__(self, other: "NormValue") -> "NormValue":
        return NormValue(self.valuation + other.valuation)

    def __str__(self):
        return f"|.| = p^-({format_valuation(self.valuation)})"


ZERO_NORM = NormValue(INF)
UNIT_NORM = NormValue(Fraction(0))


@dataclass(frozen=True)
class NormContext:
    """Either the p-adic norm for a prime ``p`` or the trivial norm."""

    kind: str = "trivial"
    p: int | None = None

    def __post_init__(self):
        if self.kind == "padic":
            if self.p is None or not is_prime(self.p):
                raise ValueError(f"p-adic norm needs a prime, got {self.p!r}")
        elif self.kind == "trivial":
            if self.p is not None:
                raise ValueError("trivial norm takes no prime")
        else:
            raise ValueError(f"unknown norm kind {self.kind!r}")

    @classmethod
    def padic(cls, p: int) -> "NormContext":
        return cls("padic", p)

    @classmethod
    def trivial(cls) -> "NormContext":
        return cls("trivial")

    @property
    def is_padic(self) -> bool:
        return self.kind == "padic"

    def valuation(self, x) -> Valuation:
        x = scalar(x)
        if x == 0:
            return INF
        if self.kind == "trivial":
            return Fraction(0)
        return padic_valuation(x, self.p)

    def norm(self, x) -> NormValue:
        return NormValue(self.valuation(x))

    def describe(self) -> str:
        return f"padic:{self.p}" if self.is_padic else "trivial"


def q_integer(n: int, q) -> Fraction:
    """``(n)_q = 1 + q + ... + q**(n-1)``; ``(0)_q = 0``."""
    if n < 0:
        raise ValueError("q-integers need n >= 0")
    q = scalar(q)
    total = Fraction(0)
    power = Fraction(1)
    for _ in range(n):
        total += power
        power *= q
    return total


def q_factorial(n: int, q) -> Fraction:
    if n < 0:
        raise ValueError("q-factorials need n >= 0")
    result = Fraction(1)
    for j in range(1, n + 1):
        result *= q_integer(j, q)
    return result


def q_binomial(n: int, k: int, q) -> Fraction:
    """Gaussian binomial ``(n)_q! / ((k)_q! (n-k)_q!)`` evaluated at a rational q."""
    if not 0 <= k <= n:
        raise ValueError(f"q_binomial needs 0 <= k <= n, got n={n}, k={k}")
    q = scalar(q)
    for j in range(1, max(k, n - k) + 1):
        if q_integer(j, q) == 0:
            raise ZeroDenominatorError(f"({j})_q vanishes for q = {format_scalar(q)}")
    k = min(k, n - k)
    result = Fraction(1)
    for j in range(1, k + 1):
        result = result * q_integer(n - k + j, q) / q_integer(j, q)
    return result


def q_binomial_norm_check(n: int, k: int, q, ctx: NormContext) -> NormValue:
    """Norm of a Gaussian binomial, asserting it is at most 1.

    Requires a p-adic context and ``|q - 1| < 1``.
    """
    if not ctx.is_padic:
        raise ValueError("q_binomial_norm_check needs a p-adic context")
    q = scalar(q)
    if not ctx.valuation(q - 1) > 0:
        raise ValueError("q_binomial_norm_check needs |q - 1| < 1")
    value = ctx.norm(q_binomial(n, k, q))
    if value > UNIT_NORM:
        raise NormBoundViolation(
            f"|binom({n},{k})_q| > 1 for q = {format_scalar(q)} ({value})"
        )
    return value
