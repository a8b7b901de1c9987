"""Passing between twisted operators and classical differential operators.

Both kinds of operator act on the same polynomial ring, so an operator is
transported by recovering, in the other divided-power basis, the operator
with the same action.  A twisted operator usually has infinite order on the
classical side (d_q = sum_k (q-1)^(k-1) x^(k-1) d^[k]), so conversions return
the order <= N truncation, which agrees with the source on every monomial of
degree <= N.  The ``exact`` flag records whether agreement also holds up to
degree N + D.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, List

from .banach import EtaRadius, operator_eta_norm, rho_sigma
from .coefficients import NormContext, format_scalar, format_valuation
from .operators import TwistedOperator, apply, recover
from .poly import format_poly
from .twist import TwistSpec


@dataclass
class ConfluencePair:
    source: TwistedOperator
    target: TwistedOperator
    N: int
    D: int
    exact: bool

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "D": self.D,
            "exact_to_degree": self.N + self.D if self.exact else self.N,
            "source": self.source.to_json(),
            "target": self.target.to_json(),
        }


def _transport(op: TwistedOperator, target: TwistSpec, N: int, D: int, strict: bool) -> ConfluencePair:
    if target.d != op.spec.d:
        raise ValueError("dimension mismatch")
    rec = recover(lambda f: apply(op, f), target, N, D, strict=strict)
    return ConfluencePair(op, rec.operator, N, D, rec.exact)


def to_classical_pair(op: TwistedOperator, N: int, D: int, strict: bool = False) -> ConfluencePair:
    return _transport(op, op.spec.identity_like(), N, D, strict)


def to_classical(op: TwistedOperator, N: int, D: int, strict: bool = False) -> TwistedOperator:
    """Classical operator (identity twist) of order <= N with the action of ``op`` up to degree N.

    With ``strict`` a ReconstructionError is raised unless the actions agree
    up to degree N + D.
    """
    return to_classical_pair(op, N, D, strict).target


def from_classical_pair(op: TwistedOperator, spec: TwistSpec, N: int, D: int, strict: bool = False) -> ConfluencePair:
    if not op.spec.all_identity:
        raise ValueError("from_classical expects an operator over the identity twist")
    pair = _transport(op, spec, N, D, strict)
    return ConfluencePair(pair.target, op, N, D, pair.exact)


def from_classical(op: TwistedOperator, spec: TwistSpec, N: int, D: int, strict: bool = False) -> TwistedOperator:
    return from_classical_pair(op, spec, N, D, strict).source


@dataclass
class SweepRow:
    q: Fraction
    operator: TwistedOperator
    eta_norm_valuation: object

    def to_json(self) -> dict:
        return {
            "q": format_scalar(self.q),
            "coefficients": [{"k": list(k), "poly": format_poly(c)} for k, c in self.operator.items()],
            "eta_norm_valuation": format_valuation(self.eta_norm_valuation),
        }


def confluence_sweep(family: Callable[[Fraction], TwistedOperator], qs: Iterable, N: int, D: int,
                     eta: EtaRadius | None = None, ctx: NormContext | None = None) -> List[SweepRow]:
    """Classical images of a q-indexed family of operators, one exact row per q."""
    eta = eta if eta is not None else EtaRadius(Fraction(0))
    rows = []
    for q in qs:
        q = Fraction(q)
        op = family(q)
        c = ctx if ctx is not None else op.spec.ctx
        classical = to_classical(op, N, D)
        rows.append(SweepRow(q, classical, operator_eta_norm(classical, eta, c).valuation))
    return rows


@dataclass
class IsometryReport:
    source_valuation: object
    target_valuation: object
    ell: Fraction
    caveat: str = "norms compared on computed terms only"

    @property
    def equal(self) -> bool:
        return self.source_valuation == self.target_valuation

    def to_json(self) -> dict:
        return {
            "ell": format_valuation(self.ell),
            "source_valuation": format_valuation(self.source_valuation),
            "target_valuation": format_valuation(self.target_valuation),
            "equal": self.equal,
            "caveat": self.caveat,
        }


def isometry_witness(pair: ConfluencePair, eta: EtaRadius, ctx: NormContext | None = None) -> IsometryReport:
    """Compare the operator eta-norms of both sides of a conversion."""
    ctx = ctx if ctx is not None else pair.source.spec.ctx
    if not eta.at_least(rho_sigma(pair.source.spec, ctx)):
        raise ValueError("eta must be >= rho(sigma)")
    return IsometryReport(
        operator_eta_norm(pair.source, eta, ctx).valuation,
        operator_eta_norm(pair.target, eta, ctx).valuation,
        eta.ell,
    )
