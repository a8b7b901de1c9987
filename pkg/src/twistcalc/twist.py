"""Transverse substitution twists on K[x1..xd] and their twisted derivations.

Each variable x_i carries an endomorphism sigma_i which substitutes
x_i -> s_i(x_i) and fixes the other variables.  The twisted derivation is the
difference quotient (sigma_i(f) - f) / (s_i - x_i), computed by exact division.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .coefficients import INF, NormContext, format_scalar, q_integer, scalar
from .errors import IdentityTwistError, RootOfUnityError
from .poly import Exponent, Poly, exponents_up_to, format_poly

KINDS = ("q", "shift", "mahler", "custom", "identity")


@dataclass(frozen=True)
class VariableTwist:
    """The twist acting on one variable.

    ``param`` is q for the q kind, h for shift, l for mahler and the image
    polynomial (in x1 only, a template) for custom; ``None`` for identity.
    """

    kind: str
    param: object = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown twist kind {self.kind!r}")
        if self.kind == "q":
            q = scalar(self.param)
            if q == 0:
                raise ValueError("q = 0 does not define a ring endomorphism")
            if q == 1:
                raise ValueError("q = 1 is the identity twist; use the identity kind")
            object.__setattr__(self, "param", q)
        elif self.kind == "shift":
            h = scalar(self.param)
            if h == 0:
                raise ValueError("h = 0 is the identity twist; use the identity kind")
            object.__setattr__(self, "param", h)
        elif self.kind == "mahler":
            if not isinstance(self.param, int) or isinstance(self.param, bool) or self.param < 2:
                raise ValueError("mahler exponent must be an integer >= 2")
        elif self.kind == "custom":
            p = self.param
            if not isinstance(p, Poly) or p.d != 1:
                raise ValueError("custom image must be a univariate Poly in x1")
            if p == Poly.var(1, 1):
                raise ValueError("custom image x -> x is the identity twist")
        elif self.param is not None:
            raise ValueError("identity twist takes no parameter")

    def image(self, i: int, d: int) -> Poly:
        """s_i(x_i) as a polynomial in d variables."""
        x = Poly.var(i, d)
        if self.kind == "q":
            return x.scale(self.param)
        if self.kind == "shift":
            return x + self.param
        if self.kind == "mahler":
            return x ** self.param
        if self.kind == "custom":
            return _embed_univariate(self.param, i, d)
        return x

    def describe(self) -> str:
        if self.kind == "identity":
            return "identity"
        if self.kind == "custom":
            return f"custom:{format_poly(self.param)}"
        if self.kind == "mahler":
            return f"mahler:{self.param}"
        return f"{self.kind}:{format_scalar(self.param)}"


def _embed_univariate(p: Poly, i: int, d: int) -> Poly:
    t = {}
    for e, c in p.terms.items():
        t[tuple(e[0] if j == i - 1 else 0 for j in range(d))] = c
    return Poly(d, t)


def parse_kind(text: str) -> VariableTwist:
    """Parse ``q:6``, ``shift:1/2``, ``mahler:2``, ``custom:x1^2+1`` or ``identity``."""
    text = text.strip()
    if text == "identity":
        return VariableTwist("identity")
    kind, sep, arg = text.partition(":")
    kind = kind.strip()
    if not sep or kind not in KINDS:
        raise ValueError(f"bad twist kind {text!r}")
    arg = arg.strip()
    if kind == "mahler":
        return VariableTwist("mahler", int(arg))
    if kind == "custom":
        from .parsing import parse_poly

        return VariableTwist("custom", parse_poly(arg, d=1))
    return VariableTwist(kind, Fraction(arg))


class TwistSpec:
    """Dimension, per-variable twists and a norm context."""

    def __init__(self, twists: Sequence[VariableTwist], ctx: NormContext | None = None):
        self.twists: Tuple[VariableTwist, ...] = tuple(twists)
        if not self.twists:
            raise ValueError("a twist spec needs at least one variable")
        self.d = len(self.twists)
        self.ctx = ctx if ctx is not None else NormContext.trivial()
        self.images: Tuple[Poly, ...] = tuple(
            t.image(i + 1, self.d) for i, t in enumerate(self.twists)
        )
        self._iterates: Dict[int, List[Poly]] = {i: [Poly.var(i, self.d)] for i in range(1, self.d + 1)}
        self._cache: dict = {}

    # constructors
    @classmethod
    def q(cls, qs, ctx: NormContext | None = None) -> "TwistSpec":
        if not isinstance(qs, (list, tuple)):
            qs = [qs]
        return cls([VariableTwist("q", q) for q in qs], ctx)

    @classmethod
    def shift(cls, hs, ctx: NormContext | None = None) -> "TwistSpec":
        if not isinstance(hs, (list, tuple)):
            hs = [hs]
        return cls([VariableTwist("shift", h) for h in hs], ctx)

    @classmethod
    def mahler(cls, ls, ctx: NormContext | None = None) -> "TwistSpec":
        if not isinstance(ls, (list, tuple)):
            ls = [ls]
        return cls([VariableTwist("mahler", l) for l in ls], ctx)

    @classmethod
    def custom(cls, images, ctx: NormContext | None = None) -> "TwistSpec":
        if not isinstance(images, (list, tuple)):
            images = [images]
        return cls([VariableTwist("custom", p) for p in images], ctx)

    @classmethod
    def identity(cls, d: int, ctx: NormContext | None = None) -> "TwistSpec":
        return cls([VariableTwist("identity")] * d, ctx)

    @classmethod
    def from_kinds(cls, kinds: Sequence[str], ctx: NormContext | None = None) -> "TwistSpec":
        return cls([parse_kind(k) for k in kinds], ctx)

    def with_ctx(self, ctx: NormContext) -> "TwistSpec":
        return TwistSpec(self.twists, ctx)

    def identity_like(self) -> "TwistSpec":
        return TwistSpec.identity(self.d, self.ctx)

    # comparison
    def __eq__(self, other):
        return isinstance(other, TwistSpec) and self.twists == other.twists and self.ctx == other.ctx

    def __hash__(self):
        return hash((self.twists, self.ctx))

    def __repr__(self):
        kinds = ", ".join(t.describe() for t in self.twists)
        return f"TwistSpec([{kinds}], {self.ctx.describe()})"

    def kind(self, i: int) -> str:
        return self.twists[i - 1].kind

    def is_identity(self, i: int) -> bool:
        return self.twists[i - 1].kind == "identity"

    @property
    def all_identity(self) -> bool:
        return all(t.kind == "identity" for t in self.twists)

    def image_degree(self, i: int) -> int:
        return self.images[i - 1].degree()

    def iterate(self, i: int, j: int) -> Poly:
        """sigma_i^j(x_i), cached."""
        its = self._iterates[i]
        while len(its) <= j:
            its.append(its[-1].substitute(i, self.images[i - 1]))
        return its[j]

    def _check_index(self, i: int):
        if not 1 <= i <= self.d:
            raise ValueError(f"variable index {i} out of range 1..{self.d}")


def _check_dim(f: Poly, spec: TwistSpec):
    if f.d != spec.d:
        raise ValueError(f"polynomial has {f.d} variables, spec has {spec.d}")


def sigma_apply(f: Poly, i: int, spec: TwistSpec) -> Poly:
    """Apply sigma_i: substitute x_i -> s_i(x_i)."""
    spec._check_index(i)
    _check_dim(f, spec)
    tw = spec.twists[i - 1]
    if tw.kind == "identity":
        return f
    if tw.kind == "q":
        q = tw.param
        k = i - 1
        return Poly._raw(f.d, {e: c * q ** e[k] for e, c in f.terms.items()})
    return f.substitute(i, spec.images[i - 1])


def sigma_power_apply(f: Poly, k: Sequence[int], spec: TwistSpec) -> Poly:
    """Apply sigma^k = prod_i sigma_i^{k_i}."""
    _check_dim(f, spec)
    if len(k) != spec.d or any(a < 0 for a in k):
        raise ValueError(f"bad multi-index {tuple(k)}")
    out = f
    for i, a in enumerate(k, start=1):
        if a and not spec.is_identity(i):
            tw = spec.twists[i - 1]
            if tw.kind == "q":
                qa = tw.param ** a
                out = Poly._raw(out.d, {e: c * qa ** e[i - 1] for e, c in out.terms.items()})
            else:
                out = out.substitute(i, spec.iterate(i, a))
    return out


def derivation(f: Poly, i: int, spec: TwistSpec) -> Poly:
    """Twisted derivation (sigma_i(f) - f) / (s_i - x_i).

    For the identity twist this is the classical partial derivative, which
    :func:`classical_derivation` exposes directly.
    """
    spec._check_index(i)
    _check_dim(f, spec)
    tw = spec.twists[i - 1]
    if tw.kind == "identity":
        raise IdentityTwistError(
            f"x{i} carries the identity twist; use classical_derivation instead"
        )
    if tw.kind == "q":
        q = tw.param
        k = i - 1
        t = {}
        for e, c in f.terms.items():
            if e[k]:
                v = c * q_integer(e[k], q)
                if v:
                    t[e[:k] + (e[k] - 1,) + e[k + 1:]] = v
        return Poly._raw(f.d, t)
    num = sigma_apply(f, i, spec) - f
    return num.divide_univariate(i, spec.images[i - 1] - Poly.var(i, spec.d))


def classical_derivation(f: Poly, i: int) -> Poly:
    return f.diff(i)


def twisted_partial(f: Poly, i: int, spec: TwistSpec) -> Poly:
    """``derivation`` for twisted variables, ``d/dx_i`` for identity ones."""
    if spec.is_identity(i):
        _check_dim(f, spec)
        return f.diff(i)
    return derivation(f, i, spec)


def gauss_norm(f: Poly, ctx: NormContext):
    """Gauss norm of f in log domain: the minimum coefficient valuation (+inf for 0)."""
    from .coefficients import NormValue

    return NormValue(gauss_valuation(f, ctx))


def gauss_valuation(f: Poly, ctx: NormContext):
    return min((ctx.valuation(c) for c in f.terms.values()), default=INF)


@dataclass
class VariableReport:
    index: int
    twist: str
    kind: bool
    strong: bool
    classical: bool
    classical_checked_to_degree: int
    classicality_verified: bool
    witness: Optional[Tuple[int, int, int]] = None
    leibniz_witness: Optional[Tuple[Exponent, Exponent]] = None
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "i": self.index,
            "twist": self.twist,
            "kind": self.kind,
            "strong": self.strong,
            "classical": self.classical,
            "classical_checked_to_degree": self.classical_checked_to_degree,
            "classicality_verified": self.classicality_verified,
            "witness": list(self.witness) if self.witness else None,
            "leibniz_witness": [list(e) for e in self.leibniz_witness] if self.leibniz_witness else None,
            "notes": list(self.notes),
        }


@dataclass
class CoordinateReport:
    bound: int
    variables: List[VariableReport]

    @property
    def kind(self) -> bool:
        return all(v.kind for v in self.variables)

    @property
    def strong(self) -> bool:
        return all(v.strong for v in self.variables)

    @property
    def classical(self) -> bool:
        return all(v.classical for v in self.variables)

    def to_json(self) -> dict:
        return {
            "bound": self.bound,
            "kind": self.kind,
            "strong": self.strong,
            "classical": self.classical,
            "variables": [v.to_json() for v in self.variables],
        }


def check_coordinates(spec: TwistSpec, bound: int) -> CoordinateReport:
    """Kind/strong tests on iterate differences and a bounded Leibniz/classicality check.

    Kind: sigma_i^n(x_i) - sigma_i^k(x_i) != 0 for 0 <= k < n <= bound.
    Strong: the same differences are units (nonzero constants in K[x]).
    Classicality: the twisted Leibniz rule and sigma_i(f) = f + (s_i - x_i) d_i(f)
    on monomial pairs whose product has degree <= bound.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    reports = []
    monos = exponents_up_to(spec.d, bound)
    for i in range(1, spec.d + 1):
        tw = spec.twists[i - 1]
        notes = []
        if tw.kind == "identity":
            notes.append("identity twist: classical partial derivative, kind/strong not applicable")
            reports.append(VariableReport(i, tw.describe(), True, True, True, bound, True, notes=notes))
            continue
        kind = strong = True
        witness = None
        for n in range(1, bound + 1):
            for k in range(n):
                diff = spec.iterate(i, n) - spec.iterate(i, k)
                if diff.is_zero():
                    if kind:
                        witness = (i, n, k)
                    kind = strong = False
                elif not diff.is_constant() and strong:
                    strong = False
                    if witness is None:
                        witness = (i, n, k)
        classical = True
        leib = None
        gap = spec.images[i - 1] - Poly.var(i, spec.d)
        polys = {e: Poly.monomial(e) for e in monos}
        ders = {e: derivation(p, i, spec) for e, p in polys.items()}
        sig = {e: sigma_apply(p, i, spec) for e, p in polys.items()}
        for e, p in polys.items():
            if sig[e] != p + gap * ders[e]:
                classical = False
                leib = (e, e)
                break
        if classical:
            for a in monos:
                for b in monos:
                    if sum(a) + sum(b) > bound:
                        continue
                    prod = tuple(x + y for x, y in zip(a, b))
                    lhs = derivation(Poly.monomial(prod), i, spec)
                    rhs = polys[a] * ders[b] + sig[b] * ders[a]
                    if lhs != rhs:
                        classical = False
                        leib = (a, b)
                        break
                if not classical:
                    break
        verified = tw.kind != "mahler"
        if not verified:
            notes.append("mahler twist: classicality unverified beyond the checked degree")
        reports.append(VariableReport(i, tw.describe(), kind, strong, classical, bound, verified,
                                      witness, leib, notes))
    return CoordinateReport(bound, reports)


@dataclass
class ContractivityResult:
    ok: bool
    witness: Optional[Tuple[int, Exponent]] = None

    def __bool__(self):
        return self.ok


def contractivity_check(spec: TwistSpec, ctx: NormContext | None = None, bound: int = 6) -> ContractivityResult:
    """Check |sigma_i(m)| <= |m| in the Gauss norm for monomials m of degree <= bound."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    ctx = ctx if ctx is not None else spec.ctx
    for e in exponents_up_to(spec.d, bound):
        if not any(e):
            continue
        m = Poly.monomial(e)
        for i in range(1, spec.d + 1):
            if gauss_valuation(sigma_apply(m, i, spec), ctx) < 0:
                return ContractivityResult(False, (i, e))
    return ContractivityResult(True)


def require_divided_powers(spec: TwistSpec, order: int) -> None:
    """Reject twists for which divided powers up to ``order`` are not well behaved.

    q twists need (j)_q != 0 for 1 <= j <= order; other kinds need the iterate
    differences sigma^n(x) - sigma^k(x), 0 <= k < n <= order, to be nonzero.
    """
    if order < 1:
        return
    key = ("dp-ok", order)
    if spec._cache.get(key):
        return
    for i, tw in enumerate(spec.twists, start=1):
        if tw.kind == "identity":
            continue
        if tw.kind == "q":
            for j in range(1, order + 1):
                if q_integer(j, tw.param) == 0:
                    raise RootOfUnityError(
                        f"({j})_q vanishes for q{i} = {format_scalar(tw.param)}: "
                        f"divided powers of order {order} are undefined"
                    )
            continue
        for n in range(1, order + 1):
            for k in range(n):
                if spec.iterate(i, n) == spec.iterate(i, k):
                    raise RootOfUnityError(
                        f"sigma_{i}^{n}(x{i}) = sigma_{i}^{k}(x{i}): twist has finite order"
                    )
    spec._cache[key] = True
