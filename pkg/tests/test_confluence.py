from fractions import Fraction

import pytest
import sympy as sp

from twistcalc.banach import EtaRadius
from twistcalc.coefficients import NormContext
from twistcalc.confluence import (
    confluence_sweep,
    from_classical,
    isometry_witness,
    to_classical,
    to_classical_pair,
)
from twistcalc.errors import ReconstructionError
from twistcalc.operators import TwistedOperator, apply, compose
from twistcalc.poly import Poly, exponents_up_to
from twistcalc.twist import TwistSpec

from helpers import random_poly
from oracles import Q as QS, X as XS, from_sympy, q_binomial_symbolic

P = 5
P5 = NormContext.padic(P)
Q = Fraction(1 + P)
X = Poly.var(1, 1)


def random_operator(rng, spec, order=2):
    return TwistedOperator(spec, {k: random_poly(rng, spec.d, 2, 2) for k in rng.sample(exponents_up_to(spec.d, order), 2)})


def classical_derivative_in_q_basis(q, N):
    """Solve sum_k c_k binom(n,k)_q x^(n-k) = n x^(n-1), n <= N, with sympy."""
    x = XS[0]
    unknowns = []
    cs = []
    for k in range(N + 1):
        coeffs = sp.symbols(f"a{k}_0:{k + 1}")
        unknowns += coeffs
        cs.append(sum(c * x ** i for i, c in enumerate(coeffs)))
    eqs = []
    for n in range(N + 1):
        lhs = sum(cs[k] * q_binomial_symbolic(n, k).subs(QS, q) * x ** (n - k) for k in range(n + 1))
        eqs += sp.Poly(sp.expand(lhs - n * x ** max(n - 1, 0)), x).coeffs()
    sol = sp.solve(eqs, unknowns, dict=True)[0]
    return {k: from_sympy(cs[k].subs(sol).subs({u: 0 for u in unknowns}), 1) for k in range(N + 1)}


class TestToClassical:
    @pytest.mark.parametrize("q", [Q, Fraction(1 + P * P), Fraction(2, 3)])
    def test_q_derivation(self, q):
        s = TwistSpec.q(q, P5)
        got = to_classical(TwistedOperator.derivation(1, s), 6, 6)
        want = {(k,): (q - 1) ** (k - 1) * X ** (k - 1) for k in range(1, 7)}
        assert dict(got.terms) == want
        assert got.spec.all_identity

    def test_exact_flag(self):
        s = TwistSpec.q(Q, P5)
        assert not to_classical_pair(TwistedOperator.derivation(1, s), 4, 4).exact
        assert to_classical_pair(TwistedOperator.multiplication(X, s), 4, 4).exact
        with pytest.raises(ReconstructionError):
            to_classical(TwistedOperator.derivation(1, s), 4, 4, strict=True)

    def test_action_equality(self, rng):
        s = TwistSpec.q([Q, 1 + 2 * P], P5)
        for _ in range(4):
            op = random_operator(rng, s)
            pair = to_classical_pair(op, 6, 6)
            for e in exponents_up_to(2, 6):
                m = Poly.monomial(e)
                assert apply(op, m) == apply(pair.target, m)


class TestFromClassical:
    def test_derivative_matches_solve(self):
        s = TwistSpec.q(Q, P5)
        ident = s.identity_like()
        d = TwistedOperator.derivation(1, ident)
        got = from_classical(d, s, 4, 4)
        want = {(k,): c for k, c in classical_derivative_in_q_basis(sp.Integer(6), 4).items() if not c.is_zero()}
        assert dict(got.terms) == want
        assert got[(1,)] == Poly.one(1)

    def test_rejects_twisted_source(self):
        s = TwistSpec.q(Q, P5)
        with pytest.raises(ValueError):
            from_classical(TwistedOperator.derivation(1, s), s, 2, 2)

    def test_round_trip(self, rng):
        for s in [TwistSpec.q([Q, Q], P5), TwistSpec.shift([P, 2 * P], P5)]:
            for _ in range(4):
                op = random_operator(rng, s)
                back = from_classical(to_classical(op, 6, 6), s, 6, 6)
                assert back == op
                classical = to_classical(op, 6, 6)
                assert to_classical(from_classical(classical, s, 6, 6), 6, 6) == classical

    def test_ring_map(self, rng):
        # Terms of order > 6 in the factors feed the order <= 6 part of the
        # product, so the factors are taken to a higher order before comparing.
        s = TwistSpec.q(Q, P5)
        for _ in range(4):
            a, b = random_operator(rng, s), random_operator(rng, s)
            lhs = to_classical(compose(a, b), 6, 6)
            rhs = compose(to_classical(a, 10, 4), to_classical(b, 10, 4))
            assert lhs.terms == {k: c for k, c in rhs.terms.items() if sum(k) <= 6}

    def test_linearity_over_coefficients(self, rng):
        s = TwistSpec.q(Q, P5)
        for _ in range(4):
            a, op = random_poly(rng, 1, 2), random_operator(rng, s)
            assert to_classical(op.left_multiply(a), 5, 5) == to_classical(op, 5, 5).left_multiply(a)


class TestSweep:
    def test_q_family(self):
        qs = [1 + P, 1 + P ** 2, 1 + P ** 3]
        rows = confluence_sweep(lambda q: TwistedOperator.derivation(1, TwistSpec.q(q, P5)), qs, 5, 5)
        for row, q in zip(rows, qs):
            vals = [row.operator[(k,)] for k in range(1, 6)]
            assert vals == [(q - 1) ** (k - 1) * X ** (k - 1) for k in range(1, 6)]
        assert [r.to_json()["eta_norm_valuation"] for r in rows] == ["0", "0", "0"]

    def test_constant_family(self):
        rows = confluence_sweep(lambda q: TwistedOperator.multiplication(X + 1, TwistSpec.q(q, P5)), [2, 3], 3, 3)
        assert all(dict(r.operator.terms) == {(0,): X + 1} for r in rows)

    def test_sigma_minus_identity(self):
        def family(q):
            s = TwistSpec.q(q, P5)
            return TwistedOperator(s, {(1,): (q - 1) * X})

        for row in confluence_sweep(family, [Q, 1 + P * P], 4, 4):
            assert (0,) not in row.operator.terms


class TestIsometry:
    def test_q_derivation(self):
        s = TwistSpec.q(Q, P5)
        pair = to_classical_pair(TwistedOperator.derivation(1, s), 6, 6)
        rep = isometry_witness(pair, EtaRadius(Fraction(1, 2)))
        assert rep.equal and rep.source_valuation == Fraction(-1, 2)

    def test_multiplication(self):
        s = TwistSpec.q(Q, P5)
        g = P * X + 1
        rep = isometry_witness(to_classical_pair(TwistedOperator.multiplication(g, s), 3, 3), EtaRadius(1))
        assert rep.equal and rep.source_valuation == 0

    def test_random(self, rng):
        s = TwistSpec.q(Q, P5)
        for _ in range(4):
            rep = isometry_witness(to_classical_pair(random_operator(rng, s), 6, 6), EtaRadius(Fraction(1, 2)))
            assert rep.equal

    def test_radius_required(self):
        s = TwistSpec.q(Q, P5)
        with pytest.raises(ValueError):
            isometry_witness(to_classical_pair(TwistedOperator.derivation(1, s), 2, 2), EtaRadius(2))
