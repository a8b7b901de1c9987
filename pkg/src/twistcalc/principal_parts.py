"""Twisted principal parts: the twisted basis, Taylor jets and their structure maps.

An element of A[xi] (xi = (xi_1..xi_d) auxiliary variables) is stored as an
:class:`XiPoly` mapping xi-exponents to coefficients in A.  The twisted basis is

    xi^(k) = prod_i prod_{j < k_i} (xi_i + x_i - sigma_i^j(x_i)),

and a :class:`Jet` of order n stores coefficients in that basis for |k| <= n.
Because each twist acts on its own variable the basis factors variable by
variable, so every conversion reduces to small univariate tables.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from math import comb
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

from .errors import NonClassicalWarning
from .poly import Poly, format_poly, grlex_key
from .twist import TwistSpec, derivation, sigma_power_apply

MultiIndex = Tuple[int, ...]


def _add_into(target: Dict, key, value: Poly):
    cur = target.get(key)
    value = value if cur is None else cur + value
    if value.is_zero():
        target.pop(key, None)
    else:
        target[key] = value


def _index_str(k: Sequence[int]) -> str:
    return "[" + ",".join(str(a) for a in k) + "]"


class XiPoly:
    """Polynomial in xi_1..xi_d with coefficients in A = K[x_1..x_d], monomial basis."""

    __slots__ = ("d", "terms")

    def __init__(self, d: int, terms: Mapping[MultiIndex, Poly] | None = None):
        self.d = d
        t: Dict[MultiIndex, Poly] = {}
        for k, c in (terms or {}).items():
            k = tuple(k)
            if len(k) != d or any(a < 0 for a in k):
                raise ValueError(f"bad xi-exponent {k}")
            if not isinstance(c, Poly):
                c = Poly.const(c, d)
            if c.d != d:
                raise ValueError("coefficient dimension mismatch")
            _add_into(t, k, c)
        self.terms = t

    @classmethod
    def one(cls, d: int) -> "XiPoly":
        return cls(d, {(0,) * d: Poly.one(d)})

    @classmethod
    def xi(cls, i: int, d: int) -> "XiPoly":
        return cls(d, {tuple(1 if j == i - 1 else 0 for j in range(d)): Poly.one(d)})

    @classmethod
    def constant(cls, f: Poly) -> "XiPoly":
        return cls(f.d, {(0,) * f.d: f})

    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "XiPoly") -> "XiPoly":
        t = dict(self.terms)
        for k, c in other.terms.items():
            _add_into(t, k, c)
        out = XiPoly(self.d)
        out.terms = t
        return out

    def __neg__(self):
        out = XiPoly(self.d)
        out.terms = {k: -c for k, c in self.terms.items()}
        return out

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other) -> "XiPoly":
        if isinstance(other, Poly):
            other = XiPoly.constant(other)
        elif not isinstance(other, XiPoly):
            other = XiPoly.constant(Poly.const(other, self.d))
        t: Dict[MultiIndex, Poly] = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                _add_into(t, tuple(a + b for a, b in zip(k1, k2)), c1 * c2)
        out = XiPoly(self.d)
        out.terms = t
        return out

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "XiPoly":
        out = XiPoly.one(self.d)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, XiPoly) and self.d == other.d and self.terms == other.terms

    def __hash__(self):
        return hash((self.d, frozenset(self.terms.items())))

    def __str__(self):
        return format_xi(self.terms, "xi")

    def __repr__(self):
        return f"XiPoly({self})"


def format_xi(terms: Mapping[MultiIndex, Poly], name: str) -> str:
    """Readable form such as ``xi1^2 + (x1 - 1)*xi1``; ``name`` is the basis symbol."""
    if not terms:
        return "0"
    parts = []
    for k in sorted(terms, key=grlex_key, reverse=True):
        c = terms[k]
        if name == "xi":
            sym = "*".join(
                f"xi{j + 1}" if a == 1 else f"xi{j + 1}^{a}" for j, a in enumerate(k) if a
            )
        else:
            sym = f"{name}{_index_str(k)}" if any(k) else ""
        cs = format_poly(c)
        if not sym:
            parts.append(cs)
        elif cs == "1":
            parts.append(sym)
        elif len(c.terms) == 1 and not cs.startswith("-"):
            parts.append(f"{cs}*{sym}")
        else:
            parts.append(f"({cs})*{sym}")
    return " + ".join(parts)


# per-variable conversion tables -------------------------------------------

def _table(spec: TwistSpec, name: str, i: int, upto: int, step, width=None):
    """Rows 0..upto of a recursively defined triangular table, cached on the spec.

    With ``width`` only the columns j <= width are kept; the recurrences used
    here never read a column to the right of the one being computed.
    """
    key = (name, i, width)
    rows = spec._cache.setdefault(key, [])
    while len(rows) <= upto:
        rows.append(step(rows, len(rows)))
    return rows


def _columns(row: int, width: Optional[int]) -> int:
    return row + 1 if width is None else min(row, width) + 1


def monomial_to_twisted_row(spec: TwistSpec, i: int, m: int, width: Optional[int] = None):
    """xi_i^m = sum_j T[m][j] xi_i^(j) with T[m+1][j] = T[m][j-1] + (sigma^j(x) - x) T[m][j]."""
    x = Poly.var(i, spec.d)

    def step(rows, m):
        if m == 0:
            return [Poly.one(spec.d)]
        prev = rows[m - 1]
        row = []
        for j in range(_columns(m, width)):
            v = prev[j - 1] if j >= 1 else Poly.zero(spec.d)
            if j < len(prev):
                v = v + (spec.iterate(i, j) - x) * prev[j]
            row.append(v)
        return row

    return _table(spec, "m2t", i, m, step, width)[m]


def twisted_to_monomial_row(spec: TwistSpec, i: int, k: int):
    """xi_i^(k) = sum_m U[k][m] xi_i^m with U[k+1][m] = U[k][m-1] + (x - sigma^k(x)) U[k][m]."""
    x = Poly.var(i, spec.d)

    def step(rows, k):
        if k == 0:
            return [Poly.one(spec.d)]
        prev = rows[k - 1]
        g = x - spec.iterate(i, k - 1)
        row = []
        for m in range(k + 1):
            v = prev[m - 1] if m >= 1 else Poly.zero(spec.d)
            if m < len(prev):
                v = v + g * prev[m]
            row.append(v)
        return row

    return _table(spec, "t2m", i, k, step)[k]


def taylor_row(spec: TwistSpec, i: int, e: int, width: Optional[int] = None):
    """(x_i + xi_i)^e = sum_j B[e][j] xi_i^(j) with B[e+1][j] = B[e][j-1] + sigma^j(x) B[e][j]."""

    def step(rows, e):
        if e == 0:
            return [Poly.one(spec.d)]
        prev = rows[e - 1]
        row = []
        for j in range(_columns(e, width)):
            v = prev[j - 1] if j >= 1 else Poly.zero(spec.d)
            if j < len(prev):
                v = v + spec.iterate(i, j) * prev[j]
            row.append(v)
        return row

    return _table(spec, "taylor", i, e, step, width)[e]


def _bounded_indices(limits: Sequence[int], n: int) -> Iterable[MultiIndex]:
    """All k with 0 <= k_i <= limits[i] and |k| <= n."""
    def rec(pos, remaining):
        if pos == len(limits):
            yield ()
            return
        for a in range(min(limits[pos], remaining) + 1):
            for rest in rec(pos + 1, remaining - a):
                yield (a,) + rest

    return rec(0, n)


def multi_indices(d: int, n: int):
    """All k in N^d with |k| <= n in grlex order."""
    from .poly import exponents_up_to

    return exponents_up_to(d, n)


# basis elements and conversions -------------------------------------------

def twisted_basis_element(k: Sequence[int], spec: TwistSpec) -> XiPoly:
    """The expanded product prod_i prod_{j<k_i} (xi_i + x_i - sigma_i^j(x_i))."""
    k = tuple(k)
    if len(k) != spec.d or any(a < 0 for a in k):
        raise ValueError(f"bad multi-index {k}")
    rows = [twisted_to_monomial_row(spec, i + 1, a) for i, a in enumerate(k)]
    terms: Dict[MultiIndex, Poly] = {}
    for m in itertools.product(*(range(a + 1) for a in k)):
        c = Poly.one(spec.d)
        for i, mi in enumerate(m):
            c = c * rows[i][mi]
            if c.is_zero():
                break
        if not c.is_zero():
            terms[m] = c
    out = XiPoly(spec.d)
    out.terms = terms
    return out


class Jet:
    """Element of the order-n principal parts, coefficients in the twisted basis."""

    __slots__ = ("order", "terms", "spec")

    def __init__(self, order: int, terms: Mapping[MultiIndex, Poly], spec: TwistSpec):
        if order < 0:
            raise ValueError("order must be >= 0")
        self.order = order
        self.spec = spec
        t: Dict[MultiIndex, Poly] = {}
        for k, c in terms.items():
            k = tuple(k)
            if len(k) != spec.d or any(a < 0 for a in k):
                raise ValueError(f"bad multi-index {k}")
            if sum(k) > order:
                raise ValueError(f"index {k} exceeds order {order}")
            if not isinstance(c, Poly):
                c = Poly.const(c, spec.d)
            _add_into(t, k, c)
        self.terms = t

    @classmethod
    def _raw(cls, order, terms, spec):
        j = cls.__new__(cls)
        j.order = order
        j.terms = terms
        j.spec = spec
        return j

    def __getitem__(self, k) -> Poly:
        return self.terms.get(tuple(k), Poly.zero(self.spec.d))

    def items(self):
        for k in sorted(self.terms, key=grlex_key):
            yield k, self.terms[k]

    def truncate(self, n: int) -> "Jet":
        return Jet._raw(n, {k: c for k, c in self.terms.items() if sum(k) <= n}, self.spec)

    def __add__(self, other: "Jet") -> "Jet":
        if other.spec != self.spec or other.order != self.order:
            raise ValueError("jets must share spec and order")
        t = dict(self.terms)
        for k, c in other.terms.items():
            _add_into(t, k, c)
        return Jet._raw(self.order, t, self.spec)

    def __eq__(self, other):
        return (isinstance(other, Jet) and self.order == other.order
                and self.spec == other.spec and self.terms == other.terms)

    def __hash__(self):
        return hash((self.order, frozenset(self.terms.items())))

    def __str__(self):
        return format_xi(self.terms, "xi^")

    def __repr__(self):
        return f"Jet(order={self.order}, {format_xi(self.terms, 'xi^')})"

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "terms": [{"k": list(k), "coeff": format_poly(c)} for k, c in self.items()],
        }

    @classmethod
    def from_json(cls, data: dict, spec: TwistSpec) -> "Jet":
        from .parsing import parse_poly

        return cls(
            int(data["order"]),
            {tuple(t["k"]): parse_poly(t["coeff"], d=spec.d) for t in data["terms"]},
            spec,
        )


def to_twisted_basis(p: XiPoly, n: int, spec: TwistSpec) -> Jet:
    """Convert a monomial-basis xi-polynomial to a jet of order n.

    Twisted basis elements with |k| > n lie in the ideal defining the order-n
    principal parts and are dropped.
    """
    if p.d != spec.d:
        raise ValueError("dimension mismatch")
    out: Dict[MultiIndex, Poly] = {}
    for m, c in p.terms.items():
        rows = [monomial_to_twisted_row(spec, i + 1, a, n) for i, a in enumerate(m)]
        for k in _bounded_indices(m, n):
            coeff = c
            for i, ki in enumerate(k):
                if m[i]:
                    coeff = coeff * rows[i][ki]
                    if coeff.is_zero():
                        break
            if not coeff.is_zero():
                _add_into(out, k, coeff)
    return Jet._raw(n, out, spec)


def from_twisted_basis(j: Jet) -> XiPoly:
    """Expanded monomial-basis representative of a jet."""
    spec = j.spec
    out: Dict[MultiIndex, Poly] = {}
    for k, c in j.terms.items():
        for m, u in twisted_basis_element(k, spec).terms.items():
            _add_into(out, m, c * u)
    res = XiPoly(spec.d)
    res.terms = out
    return res


def taylor(f: Poly, n: int, spec: TwistSpec) -> Jet:
    """Order-n twisted Taylor expansion: f(x + xi) written in the twisted basis.

    The coefficient at k is the divided-power derivative d^[k](f).
    """
    if f.d != spec.d:
        raise ValueError("dimension mismatch")
    if n < 0:
        raise ValueError("order must be >= 0")
    out: Dict[MultiIndex, Poly] = {}
    for e, c in f.terms.items():
        rows = [taylor_row(spec, i + 1, a, n) for i, a in enumerate(e)]
        for k in _bounded_indices(e, n):
            coeff = Poly.const(c, spec.d)
            for i, ki in enumerate(k):
                coeff = coeff * rows[i][ki]
            if not coeff.is_zero():
                _add_into(out, k, coeff)
    return Jet._raw(n, out, spec)


def taylor_derivation_agreement(f: Poly, spec: TwistSpec) -> bool:
    """Check that the order-one Taylor coefficients equal the twisted derivations.

    Emits :class:`NonClassicalWarning` on mismatch.
    """
    t = taylor(f, 1, spec)
    ok = True
    for i in range(1, spec.d + 1):
        if spec.is_identity(i):
            expected = f.diff(i)
        else:
            expected = derivation(f, i, spec)
        e = tuple(1 if j == i - 1 else 0 for j in range(spec.d))
        if t[e] != expected:
            ok = False
            warnings.warn(
                f"Taylor coefficient and difference quotient differ in x{i}",
                NonClassicalWarning,
                stacklevel=2,
            )
    return ok


def jet_multiply(a: Jet, b: Jet, n: Optional[int] = None) -> Jet:
    """Product in the order-n principal parts."""
    if a.spec != b.spec:
        raise ValueError("jets must share a spec")
    if n is None:
        if a.order != b.order:
            raise ValueError("jets must share an order")
        n = a.order
    prod = from_twisted_basis(a) * from_twisted_basis(b)
    return to_twisted_basis(prod, n, a.spec)


class BiJet:
    """Element of P_(n) (x)' P_(m); coefficients indexed by pairs (k, k')."""

    __slots__ = ("n", "m", "terms", "spec")

    def __init__(self, n: int, m: int, terms: Mapping[Tuple[MultiIndex, MultiIndex], Poly], spec: TwistSpec):
        self.n, self.m, self.spec = n, m, spec
        t: Dict = {}
        for (k, kk), c in terms.items():
            k, kk = tuple(k), tuple(kk)
            if sum(k) > n or sum(kk) > m:
                raise ValueError(f"index {(k, kk)} out of bounds ({n}, {m})")
            if not isinstance(c, Poly):
                c = Poly.const(c, spec.d)
            _add_into(t, (k, kk), c)
        self.terms = t

    def __eq__(self, other):
        return (isinstance(other, BiJet) and (self.n, self.m) == (other.n, other.m)
                and self.spec == other.spec and self.terms == other.terms)

    def __hash__(self):
        return hash((self.n, self.m, frozenset(self.terms.items())))

    def __getitem__(self, key) -> Poly:
        k, kk = key
        return self.terms.get((tuple(k), tuple(kk)), Poly.zero(self.spec.d))

    def items(self):
        for key in sorted(self.terms, key=lambda p: (grlex_key(p[0]), grlex_key(p[1]))):
            yield key, self.terms[key]

    def to_json(self) -> dict:
        return {
            "orders": [self.n, self.m],
            "terms": [{"k": list(k), "k2": list(kk), "coeff": format_poly(c)}
                      for (k, kk), c in self.items()],
        }

    def __repr__(self):
        body = " + ".join(
            f"({format_poly(c)})*xi^{_index_str(k)}*xi'^{_index_str(kk)}" for (k, kk), c in self.items()
        )
        return f"BiJet(({self.n}, {self.m}), {body or '0'})"


def _classical_shift(f: Poly) -> XiPoly:
    """f(x + xi) in the monomial xi basis."""
    d = f.d
    out: Dict[MultiIndex, Poly] = {}
    for e, c in f.terms.items():
        for a in itertools.product(*(range(ei + 1) for ei in e)):
            coeff = c
            for ei, ai in zip(e, a):
                coeff = coeff * comb(ei, ai)
            rest = tuple(ei - ai for ei, ai in zip(e, a))
            _add_into(out, a, Poly._raw(d, {rest: coeff}))
    res = XiPoly(d)
    res.terms = out
    return res


def comultiplication(j: Jet, n: int, m: int) -> BiJet:
    """Image of a jet under xi -> xi (x) 1 + 1 (x) xi'.

    The jet must have order >= n + m.  After substitution, each monomial
    xi'^b is rewritten in the twisted basis of the right factor; the A-valued
    coefficients this produces act on the left factor through the right
    structure of P_(n), that is through the Taylor map f -> f(x + xi).
    """
    if j.order < n + m:
        raise ValueError(f"jet of order {j.order} cannot be split into ({n}, {m})")
    spec = j.spec
    d = spec.d
    expanded = from_twisted_basis(j)
    left: Dict[MultiIndex, XiPoly] = {}
    shifted_cache: Dict[Poly, XiPoly] = {}
    for mono, c in expanded.terms.items():
        for beta in itertools.product(*(range(a + 1) for a in mono)):
            alpha = tuple(a - b for a, b in zip(mono, beta))
            coeff = c
            for a, b in zip(mono, beta):
                coeff = coeff * comb(a, b)
            rows = [monomial_to_twisted_row(spec, i + 1, b, m) for i, b in enumerate(beta)]
            for kk in _bounded_indices(beta, m):
                t = Poly.one(d)
                for i, ki in enumerate(kk):
                    if beta[i]:
                        t = t * rows[i][ki]
                if t.is_zero():
                    continue
                if t not in shifted_cache:
                    shifted_cache[t] = _classical_shift(t)
                piece = XiPoly(d, {alpha: coeff}) * shifted_cache[t]
                left[kk] = left[kk] + piece if kk in left else piece
    terms: Dict = {}
    for kk, poly in left.items():
        for k, c in to_twisted_basis(poly, n, spec).terms.items():
            _add_into(terms, (k, kk), c)
    out = BiJet(n, m, {}, spec)
    out.terms = terms
    return out


@dataclass
class SymmetryResult:
    ok: bool
    n: int
    m: int
    differing_index: Optional[Tuple[MultiIndex, MultiIndex]] = None

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {
            "symmetric_up_to": [self.n, self.m],
            "holds": self.ok,
            "differing_index": [list(self.differing_index[0]), list(self.differing_index[1])]
            if self.differing_index else None,
        }


def symmetric_rhs(f: Poly, n: int, m: int, spec: TwistSpec) -> BiJet:
    """1 (x)' taylor(f, m): every right coefficient a_k moved left as taylor(a_k, n)."""
    terms: Dict = {}
    for kk, a in taylor(f, m, spec).terms.items():
        for k, c in taylor(a, n, spec).terms.items():
            terms[(k, kk)] = c
    out = BiJet(n, m, {}, spec)
    out.terms = terms
    return out


def symmetric_check(f: Poly, n: int, m: int, spec: TwistSpec) -> SymmetryResult:
    """Compare comultiplication(taylor(f, n+m)) with 1 (x)' taylor(f, m)."""
    lhs = comultiplication(taylor(f, n + m, spec), n, m)
    rhs = symmetric_rhs(f, n, m, spec)
    if lhs == rhs:
        return SymmetryResult(True, n, m)
    keys = sorted(set(lhs.terms) | set(rhs.terms), key=lambda p: (grlex_key(p[0]), grlex_key(p[1])))
    for key in keys:
        if lhs[key] != rhs[key]:
            return SymmetryResult(False, n, m, key)
    return SymmetryResult(False, n, m)  # pragma: no cover


def evaluate_pi(j: Jet, k: Sequence[int]) -> Poly:
    """Substitute xi_i -> sigma_i^{k_i}(x_i) - x_i in the jet.

    The factor (xi_i + x_i - sigma_i^l(x_i)) then becomes
    sigma_i^{k_i}(x_i) - sigma_i^l(x_i), so basis elements with some l_i > k_i
    vanish.  On taylor(f) this returns sigma^k(f).
    """
    k = tuple(k)
    spec = j.spec
    if len(k) != spec.d or any(a < 0 for a in k):
        raise ValueError(f"bad multi-index {k}")
    if sum(k) > j.order:
        raise ValueError(f"|k| = {sum(k)} exceeds the jet order {j.order}")
    total = Poly.zero(spec.d)
    factors = {}
    for l, c in j.terms.items():
        if any(li > ki for li, ki in zip(l, k)):
            continue
        term = c
        for i, li in enumerate(l):
            for s in range(li):
                key = (i, s)
                if key not in factors:
                    factors[key] = spec.iterate(i + 1, k[i]) - spec.iterate(i + 1, s)
                term = term * factors[key]
        total = total + term
    return total


def pi_matches_sigma(f: Poly, k: Sequence[int], spec: TwistSpec) -> bool:
    return evaluate_pi(taylor(f, sum(k), spec), k) == sigma_power_apply(f, k, spec)
