"""Twisted differential operators in divided-power normal form.

A :class:`TwistedOperator` is a finite sum sum_k z_k d^[k] with polynomial
coefficients z_k.  Its action on A is read off the Taylor jet:
d^[k](f) is the coefficient of taylor(f, |k|) at k.

Composition and conversion of words go through the action on monomials, which
is triangular: d^[k](x^k) = 1 and d^[k](x^m) = 0 unless k <= m.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable, Dict, Iterable, List, Mapping, Sequence, Tuple, Union

from .coefficients import q_factorial
from .errors import ReconstructionError
from .poly import Poly, exponents_up_to, format_poly, grlex_key
from .principal_parts import MultiIndex, _add_into, taylor
from .twist import TwistSpec, require_divided_powers, sigma_apply, twisted_partial


def _index_text(k: Sequence[int]) -> str:
    return "dp[" + ",".join(str(a) for a in k) + "]"


class TwistedOperator:
    """sum_k z_k d^[k] over a fixed twist spec."""

    __slots__ = ("spec", "terms")

    def __init__(self, spec: TwistSpec, terms: Mapping[MultiIndex, object] | None = None):
        self.spec = spec
        t: Dict[MultiIndex, Poly] = {}
        for k, c in (terms or {}).items():
            k = tuple(k)
            if len(k) != spec.d or any(a < 0 for a in k):
                raise ValueError(f"bad multi-index {k}")
            if not isinstance(c, Poly):
                c = Poly.const(c, spec.d)
            if c.d != spec.d:
                raise ValueError("coefficient dimension mismatch")
            _add_into(t, k, c)
        self.terms = t

    @classmethod
    def _raw(cls, spec, terms):
        op = cls.__new__(cls)
        op.spec = spec
        op.terms = terms
        return op

    # constructors
    @classmethod
    def identity(cls, spec: TwistSpec) -> "TwistedOperator":
        return cls(spec, {(0,) * spec.d: 1})

    @classmethod
    def multiplication(cls, g: Poly, spec: TwistSpec) -> "TwistedOperator":
        return cls(spec, {(0,) * spec.d: g})

    @classmethod
    def divided_power(cls, k: Sequence[int], spec: TwistSpec, coeff=1) -> "TwistedOperator":
        return cls(spec, {tuple(k): coeff})

    @classmethod
    def derivation(cls, i: int, spec: TwistSpec) -> "TwistedOperator":
        return cls.divided_power(tuple(1 if j == i - 1 else 0 for j in range(spec.d)), spec)

    # inspection
    @property
    def order(self) -> int:
        return max((sum(k) for k in self.terms), default=0)

    @property
    def coefficient_degree(self) -> int:
        return max((c.degree() for c in self.terms.values()), default=0)

    def __getitem__(self, k) -> Poly:
        return self.terms.get(tuple(k), Poly.zero(self.spec.d))

    def items(self):
        for k in sorted(self.terms, key=grlex_key):
            yield k, self.terms[k]

    def is_zero(self) -> bool:
        return not self.terms

    # linear structure
    def __add__(self, other: "TwistedOperator") -> "TwistedOperator":
        self._same(other)
        t = dict(self.terms)
        for k, c in other.terms.items():
            _add_into(t, k, c)
        return TwistedOperator._raw(self.spec, t)

    def __neg__(self):
        return TwistedOperator._raw(self.spec, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def left_multiply(self, g) -> "TwistedOperator":
        """The operator g . P (coefficients multiplied on the left)."""
        if not isinstance(g, Poly):
            g = Poly.const(g, self.spec.d)
        t = {}
        for k, c in self.terms.items():
            v = g * c
            if not v.is_zero():
                t[k] = v
        return TwistedOperator._raw(self.spec, t)

    def _same(self, other):
        if not isinstance(other, TwistedOperator) or other.spec != self.spec:
            raise ValueError("operators must share a twist spec")

    def __eq__(self, other):
        return isinstance(other, TwistedOperator) and self.spec == other.spec and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __str__(self):
        return format_operator(self)

    def __repr__(self):
        return f"TwistedOperator({format_operator(self)!r})"

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "terms": [{"k": list(k), "coeff": format_poly(c)} for k, c in self.items()],
        }


def format_operator(op: TwistedOperator) -> str:
    """Canonical text, e.g. ``1 + 6*x1*dp[1]``; terms in increasing grlex order of k."""
    if not op.terms:
        return "0"
    out = []
    for k, c in op.items():
        sym = _index_text(k) if any(k) else ""
        if not sym:
            body, neg = format_poly(-c if _leading_negative(c) else c), _leading_negative(c)
            if len(c.terms) > 1 and out:
                body, neg = f"({format_poly(c)})", False
        elif len(c.terms) == 1:
            (e, v), = c.terms.items()
            neg = v < 0
            mono = format_poly(Poly._raw(c.d, {e: abs(v)}))
            body = sym if mono == "1" else f"{mono}*{sym}"
        else:
            body, neg = f"({format_poly(c)})*{sym}", False
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


def _leading_negative(c: Poly) -> bool:
    if len(c.terms) != 1:
        return False
    return next(iter(c.terms.values())) < 0


# action --------------------------------------------------------------------

def apply(op: TwistedOperator, f: Poly) -> Poly:
    """sum_k z_k d^[k](f)."""
    if f.d != op.spec.d:
        raise ValueError("dimension mismatch")
    if op.is_zero():
        return Poly.zero(f.d)
    n = op.order
    require_divided_powers(op.spec, n)
    jet = taylor(f, n, op.spec)
    total = Poly.zero(f.d)
    for k, z in op.terms.items():
        c = jet.terms.get(k)
        if c is not None:
            total = total + z * c
    return total


def _monomial_jet(spec: TwistSpec, e: Tuple[int, ...], n: int):
    """Divided powers of x^e: {k: d^[k](x^e)} for |k| <= n."""
    cache = spec._cache.setdefault("mono-jet", {})
    key = (e, n)
    if key not in cache:
        cache[key] = taylor(Poly.monomial(e), n, spec).terms
    return cache[key]


@dataclass
class Recovery:
    operator: TwistedOperator
    exact: bool
    checked_degree: int


def recover(action: Callable[[Poly], Poly], spec: TwistSpec, N: int, D: int,
            strict: bool = True) -> Recovery:
    """Solve for z_k, |k| <= N, from the action on monomials of degree <= N.

    The residual on degrees N < |m| <= N + D is then tested; with ``strict``
    a nonzero residual raises ReconstructionError, otherwise it is reported
    through ``exact``.
    """
    if N < 0 or D < 0:
        raise ValueError("bounds must be >= 0")
    require_divided_powers(spec, N)
    d = spec.d
    z: Dict[MultiIndex, Poly] = {}
    for m in exponents_up_to(d, N):
        jet = _monomial_jet(spec, m, sum(m))
        value = action(Poly.monomial(m))
        for k, c in jet.items():
            if k != m and k in z:
                value = value - z[k] * c
        if not value.is_zero():
            z[m] = value
    op = TwistedOperator._raw(spec, z)
    exact = True
    for m in exponents_up_to(d, N + D):
        if sum(m) <= N:
            continue
        expected = action(Poly.monomial(m))
        jet = _monomial_jet(spec, m, N)
        got = Poly.zero(d)
        for k, zk in z.items():
            c = jet.get(k)
            if c is not None:
                got = got + zk * c
        if got != expected:
            exact = False
            if strict:
                raise ReconstructionError(
                    f"action is not reproduced by an operator of order <= {N}: "
                    f"residual on x^{list(m)}"
                )
            break
    return Recovery(op, exact, N + D)


def recover_from_action(action: Callable[[Poly], Poly], spec: TwistSpec, N: int, D: int) -> TwistedOperator:
    """The unique operator of order <= N reproducing ``action`` up to degree N + D."""
    return recover(action, spec, N, D, strict=True).operator


def compose(p: TwistedOperator, q: TwistedOperator, D: int | None = None) -> TwistedOperator:
    """p o q, recovered from the composed action at order order(p) + order(q).

    The residual is checked on degrees up to N + D, by default with
    D = deg p + deg q + 1.  Twists of degree > 1 make the action on high
    degree monomials very expensive (sigma^j(x) has degree deg(s)^j), so for
    them the default check stops at N + 2.
    """
    p._same(q)
    if p.is_zero() or q.is_zero():
        return TwistedOperator(p.spec)
    N = p.order + q.order
    if D is None:
        D = p.coefficient_degree + q.coefficient_degree + 1
        if any(p.spec.image_degree(i) > 1 for i in range(1, p.spec.d + 1)):
            D = min(D, 2)
    return recover_from_action(lambda f: apply(p, apply(q, f)), p.spec, N, D)


# words ------------------------------------------------------------------------

@dataclass(frozen=True)
class Coeff:
    poly: Poly


@dataclass(frozen=True)
class D:
    i: int


@dataclass(frozen=True)
class DP:
    k: Tuple[int, ...]


Atom = Union[Coeff, D, DP]


class OperatorWord:
    """A product of atoms, read as composition from left to right."""

    __slots__ = ("atoms",)

    def __init__(self, atoms: Iterable[Atom]):
        self.atoms: Tuple[Atom, ...] = tuple(atoms)
        if not self.atoms:
            raise ValueError("an operator word needs at least one atom")
        for a in self.atoms:
            if not isinstance(a, (Coeff, D, DP)):
                raise TypeError(f"bad atom {a!r}")
            if isinstance(a, D) and a.i < 1:
                raise ValueError(f"bad variable index {a.i}")

    def __eq__(self, other):
        return isinstance(other, OperatorWord) and self.atoms == other.atoms

    def __hash__(self):
        return hash(self.atoms)

    def __iter__(self):
        return iter(self.atoms)

    def __len__(self):
        return len(self.atoms)

    def __repr__(self):
        return f"OperatorWord({list(self.atoms)!r})"

    def check(self, spec: TwistSpec):
        for a in self.atoms:
            if isinstance(a, D) and a.i > spec.d:
                raise ValueError(f"d{a.i} refers to a variable beyond d={spec.d}")
            if isinstance(a, DP) and len(a.k) != spec.d:
                raise ValueError(f"{_index_text(a.k)} needs {spec.d} entries")
            if isinstance(a, Coeff) and a.poly.d != spec.d:
                raise ValueError("coefficient dimension mismatch")


def evaluate_word(word: OperatorWord, f: Poly, spec: TwistSpec) -> Poly:
    """Literal right-to-left evaluation of a word on f."""
    word.check(spec)
    for a in reversed(word.atoms):
        if isinstance(a, Coeff):
            f = a.poly * f
        elif isinstance(a, D):
            f = twisted_partial(f, a.i, spec)
        else:
            f = apply(TwistedOperator.divided_power(a.k, spec), f)
    return f


def _power_sum_to_dp(powers: Dict[MultiIndex, Poly], spec: TwistSpec) -> TwistedOperator:
    """Convert sum_a c_a d^a (ordinary powers) to divided powers."""
    closed = all(t.kind in ("q", "identity") for t in spec.twists)
    out: Dict[MultiIndex, Poly] = {}
    if closed:
        require_divided_powers(spec, max((sum(a) for a in powers), default=0))
        for a, c in powers.items():
            scale = Fraction(1)
            for i, ai in enumerate(a):
                tw = spec.twists[i]
                scale *= factorial(ai) if tw.kind == "identity" else q_factorial(ai, tw.param)
            _add_into(out, a, c.scale(scale))
        return TwistedOperator._raw(spec, out)
    result = TwistedOperator(spec)
    cache = spec._cache.setdefault("power-dp", {})
    for a, c in powers.items():
        if a not in cache:
            def act(f, a=a):
                for i, ai in enumerate(a, start=1):
                    for _ in range(ai):
                        f = twisted_partial(f, i, spec)
                return f
            cache[a] = recover_from_action(act, spec, sum(a), max(2, sum(a)))
        result = result + cache[a].left_multiply(c)
    return result


def _rewrite_segment(atoms: Sequence[Atom], spec: TwistSpec) -> Dict[MultiIndex, Poly]:
    """Push coefficients left through derivations.

    Uses d_i a = d_i(a) + sigma_i(a) d_i and the commutation of the d_i;
    returns {a: c_a} meaning sum c_a d^a with ordinary powers.
    """
    d = spec.d
    acc: Dict[MultiIndex, Poly] = {(0,) * d: Poly.one(d)}
    for atom in reversed(atoms):
        new: Dict[MultiIndex, Poly] = {}
        if isinstance(atom, Coeff):
            for a, c in acc.items():
                _add_into(new, a, atom.poly * c)
        else:
            i = atom.i
            for a, c in acc.items():
                _add_into(new, a, twisted_partial(c, i, spec))
                up = tuple(x + 1 if j == i - 1 else x for j, x in enumerate(a))
                _add_into(new, up, sigma_apply(c, i, spec))
        acc = new
    return acc


def normal_form(word: OperatorWord, spec: TwistSpec) -> TwistedOperator:
    """Divided-power normal form of a word.

    Runs of coefficients and single derivations are rewritten with the
    commutation rules; the resulting powers d^a become (a)_q! d^[a] for q
    twists (a! for identity twists) and are recovered from their action for
    the other kinds.  Explicit divided-power atoms are composed in.
    """
    word.check(spec)
    segments: List[object] = []
    run: List[Atom] = []
    for a in word.atoms:
        if isinstance(a, DP):
            if run:
                segments.append(run)
                run = []
            segments.append(a)
        else:
            run.append(a)
    if run:
        segments.append(run)
    result = None
    for seg in segments:
        if isinstance(seg, DP):
            op = TwistedOperator.divided_power(seg.k, spec)
        else:
            op = _power_sum_to_dp(_rewrite_segment(seg, spec), spec)
        result = op if result is None else compose(result, op)
    return result


def normal_form_sum(words: Sequence[OperatorWord], spec: TwistSpec) -> TwistedOperator:
    total = TwistedOperator(spec)
    for w in words:
        total = total + normal_form(w, spec)
    return total
