"""eta-norms, the x-radius and bounded-degree convergence diagnostics.

Everything is kept in the log domain.  A radius eta = p**(-ell) is stored as
its exponent ``ell``; a norm is stored as a valuation v with |.| = p**(-v).
Then ||z xi^k||_eta = p**-(v(z) + |k| ell) and ||z d^[k]||_eta = p**-(v(z) - |k| ell).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Dict, List, Mapping, Union

from .coefficients import INF, NormContext, NormValue, format_valuation, scalar
from .errors import BasisNormMismatch, DomainError
from .operators import TwistedOperator
from .poly import Poly
from .principal_parts import Jet, XiPoly, from_twisted_basis, taylor, to_twisted_basis
from .twist import TwistSpec, contractivity_check, gauss_valuation


@dataclass(frozen=True, order=True)
class EtaRadius:
    """eta = p**(-ell) with ell >= 0 (so eta <= 1)."""

    ell: Fraction

    def __post_init__(self):
        ell = scalar(self.ell)
        if ell < 0:
            raise ValueError("eta must satisfy eta <= 1, i.e. ell >= 0")
        object.__setattr__(self, "ell", ell)

    def check_context(self, ctx: NormContext):
        if not ctx.is_padic and self.ell != 0:
            raise ValueError("under the trivial norm the only radius is eta = 1 (ell = 0)")

    def at_least(self, rho: NormValue) -> bool:
        """eta >= rho, i.e. ell <= v(rho)."""
        return self.ell <= rho.valuation

    def __str__(self):
        return f"eta = p^-({format_valuation(self.ell)})"


def rho_sigma(spec: TwistSpec, ctx: NormContext | None = None, check: bool = False) -> NormValue:
    """x-radius: max_i |x_i - sigma_i(x_i)| in the Gauss norm (min of valuations)."""
    ctx = ctx if ctx is not None else spec.ctx
    if check and not contractivity_check(spec, ctx, 4):
        raise DomainError("the twist is not contractive for this norm")
    vals = [gauss_valuation(Poly.var(i, spec.d) - spec.images[i - 1], ctx) for i in range(1, spec.d + 1)]
    return NormValue(min(vals))


def rho_sigma_power(spec: TwistSpec, n: int, ctx: NormContext | None = None) -> NormValue:
    """x-radius of the iterated twist sigma^n."""
    ctx = ctx if ctx is not None else spec.ctx
    vals = [gauss_valuation(Poly.var(i, spec.d) - spec.iterate(i, n), ctx) for i in range(1, spec.d + 1)]
    return NormValue(min(vals))


def _log_sup(terms: Mapping, ctx: NormContext, weight) -> Union[Fraction, float]:
    return min((gauss_valuation(c, ctx) + weight(sum(k)) for k, c in terms.items()), default=INF)


def eta_norm_monomial(series: XiPoly, eta: EtaRadius, ctx: NormContext) -> NormValue:
    return NormValue(_log_sup(series.terms, ctx, lambda n: n * eta.ell))


def eta_norm_twisted(series: Jet, eta: EtaRadius, ctx: NormContext) -> NormValue:
    return NormValue(_log_sup(series.terms, ctx, lambda n: n * eta.ell))


def eta_norm(series: Union[Jet, XiPoly], eta: EtaRadius, ctx: NormContext | None = None,
             spec: TwistSpec | None = None, cross_check: bool = True) -> NormValue:
    """Sup norm on xi-series: max |z_k| eta^|k|, in the basis the series is given in.

    When eta >= rho(sigma) the other basis is computed as well and a
    disagreement raises BasisNormMismatch.
    """
    if isinstance(series, Jet):
        spec = series.spec
        ctx = ctx if ctx is not None else spec.ctx
        eta.check_context(ctx)
        value = eta_norm_twisted(series, eta, ctx)
        if cross_check and eta.at_least(rho_sigma(spec, ctx)):
            other = eta_norm_monomial(from_twisted_basis(series), eta, ctx)
            if other != value:
                raise BasisNormMismatch(f"twisted {value} vs monomial {other}")
        return value
    if ctx is None:
        ctx = spec.ctx if spec is not None else NormContext.trivial()
    eta.check_context(ctx)
    value = eta_norm_monomial(series, eta, ctx)
    if cross_check and spec is not None and eta.at_least(rho_sigma(spec, ctx)):
        jet = to_twisted_basis(series, max(series.degree(), 0), spec)
        other = eta_norm_twisted(jet, eta, ctx)
        if other != value:
            raise BasisNormMismatch(f"monomial {value} vs twisted {other}")
    return value


def operator_eta_norm(op: TwistedOperator, eta: EtaRadius, ctx: NormContext | None = None) -> NormValue:
    """max |z_k| / eta^|k|, i.e. min of v(z_k) - |k| ell."""
    ctx = ctx if ctx is not None else op.spec.ctx
    eta.check_context(ctx)
    return NormValue(_log_sup(op.terms, ctx, lambda n: -n * eta.ell))


@dataclass
class RadiusRow:
    deg: int
    min_valuation: Union[Fraction, float]
    evidence: Union[Fraction, float]

    def to_json(self) -> dict:
        return {"deg": self.deg, "min_valuation": format_valuation(self.min_valuation),
                "evidence": format_valuation(self.evidence)}


@dataclass
class RadiusReport:
    """Bounded-degree evidence for the radius of convergence.

    Row evidence is -v/deg, the log-radius suggested by that degree; the lower
    bound is the largest evidence, clamped at 0 (radii are taken <= 1).
    """

    D: int
    rows: List[RadiusRow]

    @property
    def lower_bound_log_radius(self) -> Fraction:
        finite = [r.evidence for r in self.rows if r.evidence not in (INF, -INF)]
        return max([Fraction(0)] + finite)

    @property
    def everywhere_convergent(self) -> bool:
        return all(r.min_valuation == INF for r in self.rows)

    def lower_bound(self) -> EtaRadius:
        return EtaRadius(self.lower_bound_log_radius)

    def to_json(self) -> dict:
        return {
            "D": self.D,
            "rows": [r.to_json() for r in self.rows],
            "lower_bound_log_radius": format_valuation(self.lower_bound_log_radius),
        }


def _degree_table(jet_terms: Mapping, D: int, ctx: NormContext) -> Dict[int, Union[Fraction, float]]:
    table: Dict[int, Union[Fraction, float]] = {n: INF for n in range(1, D + 1)}
    for k, c in jet_terms.items():
        n = sum(k)
        if 1 <= n <= D:
            table[n] = min(table[n], gauss_valuation(c, ctx))
    return table


def radius_estimate(f: Poly, spec: TwistSpec, ctx: NormContext | None = None, D: int = 6) -> RadiusReport:
    if D < 1:
        raise ValueError("D must be >= 1")
    ctx = ctx if ctx is not None else spec.ctx
    table = _degree_table(taylor(f, D, spec).terms, D, ctx)
    rows = []
    for n in range(1, D + 1):
        v = table[n]
        rows.append(RadiusRow(n, v, -INF if v == INF else -v / n))
    return RadiusReport(D, rows)


@dataclass
class ConvergenceResult:
    ok: bool
    ell: Fraction
    table: List[tuple] = field(default_factory=list)
    reason: str = ""

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {"eta_convergent_evidence": self.ok, "ell": format_valuation(self.ell), "reason": self.reason,
                "table": [{"deg": n, "value": format_valuation(v)} for n, v in self.table]}


def eta_convergence_check(f: Union[Poly, Jet], eta: EtaRadius, spec: TwistSpec,
                          ctx: NormContext | None = None, D: int = 6) -> ConvergenceResult:
    """Tabulate v(d^[k] f) + |k| ell by degree and judge eta-convergence.

    A polynomial of degree <= D has a finite Taylor series, so it is
    eta-convergent outright.  Otherwise (a truncated jet, or D below the
    degree) the values must be nondecreasing over the upper half of the
    degrees up to D.
    """
    ctx = ctx if ctx is not None else spec.ctx
    eta.check_context(ctx)
    rho = rho_sigma(spec, ctx)
    if not eta.at_least(rho):
        raise ValueError("eta must be >= rho(sigma)")
    if isinstance(f, Jet):
        terms, exact = f.terms, False
    else:
        terms, exact = taylor(f, D, spec).terms, f.degree() <= D
    raw = _degree_table(terms, D, ctx)
    table = [(n, raw[n] + n * eta.ell if raw[n] != INF else INF) for n in range(1, D + 1)]
    if exact:
        return ConvergenceResult(True, eta.ell, table, "finite Taylor series")
    tail = [v for n, v in table if n >= ceil(D / 2)]
    ok = all(a <= b for a, b in zip(tail, tail[1:]))
    return ConvergenceResult(ok, eta.ell, table, "tail nondecreasing" if ok else "tail decreases")
