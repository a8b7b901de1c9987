"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -s`` or
``python tests/test_acceptance.py``; the lines are also repeated in the
pytest terminal summary.
"""

import random
import time
from contextlib import contextmanager
from fractions import Fraction

import sympy as sp

from twistcalc.banach import EtaRadius, eta_norm, operator_eta_norm, rho_sigma
from twistcalc.coefficients import NormContext
from twistcalc.confluence import from_classical, to_classical
from twistcalc.connections import ConnectionModule, de_rham_dims, integrability_check
from twistcalc.errors import NonIntegrableError
from twistcalc.operators import Coeff, D, DP, OperatorWord, TwistedOperator, apply, compose, evaluate_word, normal_form
from twistcalc.poly import Poly, exponents_up_to
from twistcalc.principal_parts import XiPoly, jet_multiply, symmetric_check, taylor, to_twisted_basis
from twistcalc.twist import TwistSpec, derivation, sigma_apply

import acceptance_log
from cli_cases import CASES, OUTPUTS, invoke, render
from conftest import SEED
from oracles import Q as QS, X as XS, from_sympy, q_binomial_symbolic

P = 5
P5 = NormContext.padic(P)
Q = Fraction(1 + P)


@contextmanager
def criterion(number, detail, limit=None):
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        if ok and limit is not None and elapsed >= limit:
            ok = False
            detail += f" (too slow: {elapsed:.1f}s >= {limit}s)"
        acceptance_log.record(number, ok, f"{detail} [{elapsed:.2f}s]")
    assert ok, f"criterion {number} exceeded its time limit"


def rand_q(rng):
    return Fraction(rng.randint(-9, 9), rng.randint(1, 4))


def rand_poly(rng, d, degree, terms=5):
    monos = exponents_up_to(d, degree)
    return Poly(d, {rng.choice(monos): rand_q(rng) for _ in range(rng.randint(1, terms))})


def padic_poly(rng, d, degree, terms=3):
    monos = exponents_up_to(d, degree)
    out = {}
    for _ in range(rng.randint(1, terms)):
        c = Fraction(rng.choice([1, 2, 3, 4]) * rng.choice([1, -1]), rng.choice([1, 2, 3]))
        out[rng.choice(monos)] = c * Fraction(P) ** rng.randint(-1, 3)
    return Poly(d, out)


def kinds(d):
    return {
        "q": TwistSpec.q([Q] * d, P5),
        "shift": TwistSpec.shift([P] * d, P5),
        "mahler": TwistSpec.mahler([2] * d, P5),
    }


def test_criterion_01_twisted_leibniz():
    rng = random.Random(SEED + 1)
    with criterion(1, "twisted Leibniz rule, 100 pairs per twist kind, degree <= 6, d <= 3", limit=10):
        for name in ("q", "shift", "mahler"):
            for _ in range(100):
                d = rng.randint(1, 3)
                spec = kinds(d)[name]
                f, g = rand_poly(rng, d, 6), rand_poly(rng, d, 6)
                i = rng.randint(1, d)
                lhs = derivation(f * g, i, spec)
                assert lhs == f * derivation(g, i, spec) + sigma_apply(g, i, spec) * derivation(f, i, spec)


def test_criterion_02_taylor_is_ring_morphism():
    rng = random.Random(SEED + 2)
    with criterion(2, "taylor(fg, n) = taylor(f, n) * taylor(g, n), 100 pairs, n <= 4", limit=30):
        for t in range(100):
            d = rng.randint(1, 2)
            spec = list(kinds(d).values())[t % 3]
            n = rng.randint(0, 4)
            f, g = rand_poly(rng, d, 4), rand_poly(rng, d, 4)
            assert taylor(f * g, n, spec) == jet_multiply(taylor(f, n, spec), taylor(g, n, spec))


def test_criterion_03_divided_power_formula():
    qs = (Q, Fraction(1 + 2 * P))
    spec = TwistSpec.q(list(qs), P5)
    binom = {}

    def qb(n, k, q):
        if (n, k) not in binom:
            binom[(n, k)] = q_binomial_symbolic(n, k)
        value = binom[(n, k)].subs(QS, sp.Rational(q.numerator, q.denominator))
        return Fraction(int(value.p), int(value.q))

    with criterion(3, "taylor(x^n)[k] = prod binom(n_i, k_i)_q x^(n-k), |n| <= 6, d = 2; valuations >= 0"):
        for n in exponents_up_to(2, 6):
            jet = taylor(Poly.monomial(n), sum(n), spec)
            for k in exponents_up_to(2, sum(n)):
                if all(a <= b for a, b in zip(k, n)):
                    c = qb(n[0], k[0], qs[0]) * qb(n[1], k[1], qs[1])
                    want = Poly.monomial(tuple(a - b for a, b in zip(n, k)), c)
                    assert P5.valuation(c) >= 0
                else:
                    want = Poly.zero(2)
                assert jet[k] == want


def test_criterion_04_normal_form():
    rng = random.Random(SEED + 4)
    x = Poly.var(1, 1)
    with criterion(4, "normal_form(d x) = 1 + q x d; 50 random words of length <= 5 match literal evaluation"):
        spec = TwistSpec.q(Q, P5)
        assert normal_form(OperatorWord([D(1), Coeff(x)]), spec) == TwistedOperator(spec, {(0,): 1, (1,): Q * x})
        for t in range(50):
            d = rng.randint(1, 2)
            spec = list(kinds(d).values())[t % 3] if t % 5 else TwistSpec.q([Q, Fraction(3, 2)][:d], P5)
            atoms = []
            for _ in range(rng.randint(1, 5)):
                r = rng.random()
                if r < 0.4:
                    atoms.append(Coeff(rand_poly(rng, d, 2, 2)))
                elif r < 0.8:
                    atoms.append(D(rng.randint(1, d)))
                else:
                    atoms.append(DP(rng.choice(exponents_up_to(d, 2))))
            word = OperatorWord(atoms)
            nf = normal_form(word, spec)
            f = rand_poly(rng, d, 6)
            assert apply(nf, f) == evaluate_word(word, f, spec)


def test_criterion_05_powers_of_the_derivation():
    q = Q
    spec = TwistSpec.q(q, P5)
    x = XS[0]
    with criterion(5, "d^k = (k)_q! d^[k] for k <= 5 on monomials of degree <= 8"):
        for k in range(1, 6):
            factorial = 1
            for j in range(1, k + 1):
                factorial *= sum(q ** t for t in range(j))
            dp = TwistedOperator.divided_power((k,), spec, factorial)
            for n in range(9):
                m = Poly.monomial((n,))
                assert evaluate_word(OperatorWord([D(1)] * k), m, spec) == apply(dp, m)
                # independent check with the difference quotient written out in sympy
                expr = x ** n
                qq = sp.Rational(q.numerator, q.denominator)
                for _ in range(k):
                    expr = sp.cancel((expr.subs(x, qq * x) - expr) / ((qq - 1) * x))
                assert from_sympy(expr, 1) == apply(dp, m)


def test_criterion_06_schwarz():
    specs = dict(kinds(3))
    specs["mixed"] = TwistSpec.from_kinds(["q:6", "shift:5", "mahler:2"], P5)
    with criterion(6, "d_i d_j = d_j d_i and sigma_i d_j = d_j sigma_i, d = 3, degree <= 6"):
        for spec in specs.values():
            for e in exponents_up_to(3, 6):
                m = Poly.monomial(e)
                for i in range(1, 4):
                    for j in range(1, 4):
                        if i == j:
                            continue
                        assert derivation(derivation(m, j, spec), i, spec) == derivation(derivation(m, i, spec), j, spec)
                        assert sigma_apply(derivation(m, j, spec), i, spec) == derivation(sigma_apply(m, i, spec), j, spec)


def test_criterion_07_twisted_basis_isometry():
    rng = random.Random(SEED + 7)
    with criterion(7, "monomial and twisted bases give equal eta-norms, ell = 1, 100 random xi-polynomials"):
        eta = EtaRadius(1)
        for t in range(100):
            d = rng.randint(1, 2)
            spec = [TwistSpec.q([Q, Fraction(1 + 2 * P)][:d], P5), TwistSpec.shift([P, Fraction(2 * P, 3)][:d], P5)][t % 2]
            assert eta.at_least(rho_sigma(spec))
            n = rng.randint(1, 4)
            p = XiPoly(d, {k: padic_poly(rng, d, 2) for k in rng.sample(exponents_up_to(d, n), min(3, len(exponents_up_to(d, n))))})
            assert eta_norm(p, eta, spec=spec, cross_check=False) == eta_norm(to_twisted_basis(p, n, spec), eta, cross_check=False)


def test_criterion_08_operator_norm():
    rng = random.Random(SEED + 8)
    spec = TwistSpec.q([Q, Q], P5)
    with criterion(8, "||p o q|| <= ||p|| ||q|| on 50 pairs; ||d^[k]|| = eta^-|k|"):
        for ell in (Fraction(0), Fraction(1, 2), Fraction(1)):
            for k in exponents_up_to(2, 4):
                assert operator_eta_norm(TwistedOperator.divided_power(k, spec), EtaRadius(ell)).valuation == -sum(k) * ell
        eta = EtaRadius(Fraction(1, 2))
        for _ in range(50):
            a, b = (TwistedOperator(spec, {k: padic_poly(rng, 2, 2) for k in rng.sample(exponents_up_to(2, 2), 2)})
                    for _ in range(2))
            lhs = operator_eta_norm(compose(a, b), eta).valuation
            assert lhs >= operator_eta_norm(a, eta).valuation + operator_eta_norm(b, eta).valuation


def _classical_image_of_dq(q, N):
    """Solve sum_k c_k binom(n, k) x^(n-k) = (n)_q x^(n-1), n <= N, for c_k of degree < k."""
    x = XS[0]
    unknowns, cs = [], []
    for k in range(N + 1):
        coeffs = sp.symbols(f"c{k}_0:{k + 1}")
        unknowns += coeffs
        cs.append(sum(c * x ** i for i, c in enumerate(coeffs)))
    eqs = []
    for n in range(N + 1):
        lhs = sum(cs[k] * sp.binomial(n, k) * x ** (n - k) for k in range(n + 1))
        rhs = sum(q ** t for t in range(n)) * x ** max(n - 1, 0)
        eqs += sp.Poly(sp.expand(lhs - rhs), x).coeffs()
    sol = sp.solve(eqs, unknowns, dict=True)[0]
    return {k: from_sympy(cs[k].subs(sol).subs({u: 0 for u in unknowns}), 1) for k in range(N + 1)}


def test_criterion_09_confluence():
    rng = random.Random(SEED + 9)
    with criterion(9, "to_classical then from_classical is the identity on 25 operators (N = D = 6); image of d_q", limit=60):
        for t in range(25):
            d = 1 + t % 2
            spec = TwistSpec.q([Q, Fraction(1 + 2 * P)][:d], P5) if t % 3 else TwistSpec.shift([P, 2 * P][:d], P5)
            op = TwistedOperator(spec, {k: rand_poly(rng, d, 2, 2) for k in rng.sample(exponents_up_to(d, 2), 2)})
            assert from_classical(to_classical(op, 6, 6), spec, 6, 6) == op
        spec = TwistSpec.q(Q, P5)
        image = to_classical(TwistedOperator.derivation(1, spec), 6, 6)
        oracle = _classical_image_of_dq(sp.Integer(int(Q)), 6)
        assert dict(image.terms) == {(k,): c for k, c in oracle.items() if not c.is_zero()}
        x = Poly.var(1, 1)
        assert all(image[(k,)] == (Q - 1) ** (k - 1) * x ** (k - 1) for k in range(1, 7))


def test_criterion_10_de_rham():
    with criterion(10, "de Rham ranks: line H = [1, 0] at D = 12; plane H0 = 1 at D = 8; nabla^2 = 0; non-integrable rejected"):
        assert de_rham_dims(ConnectionModule.trivial(TwistSpec.q(Q, P5)), 12).cohomology == [1, 0]
        plane = TwistSpec.q([Q, Q], P5)
        res = de_rham_dims(ConnectionModule.trivial(plane), 8)
        assert res.cohomology[0] == 1 and res.nabla_squared_zero
        x1, x2 = Poly.var(1, 2), Poly.var(2, 2)
        for mats in ([[[0]], [[x2]]], [[[x1]], [[0]]], [[[x1 + 1]], [[x2 ** 2]]]):
            mod = ConnectionModule(plane, 1, mats)
            assert integrability_check(mod, 4)
            assert de_rham_dims(mod, 4).nabla_squared_zero
        bad = ConnectionModule(plane, 1, [[[x2]], [[0]]])
        try:
            de_rham_dims(bad, 4)
        except NonIntegrableError:
            pass
        else:
            raise AssertionError("non-integrable connection accepted")


def test_criterion_11_symmetric_coordinates():
    specs = [TwistSpec.q(Q, P5), TwistSpec.shift(P, P5), TwistSpec.q([Q, 3], P5), TwistSpec.shift([P, 1], P5)]
    with criterion(11, "symmetric-coordinate identity for q and shift, monomials of degree <= 4, n + m <= 4"):
        for spec in specs:
            for e in exponents_up_to(spec.d, 4):
                for n in range(5):
                    for m in range(5 - n):
                        assert symmetric_check(Poly.monomial(e), n, m, spec)


def test_criterion_12_cli_golden():
    from twistcalc.cli import COMMANDS

    with criterion(12, f"CLI golden files for all {len(COMMANDS)} commands; JSON byte-identical across runs"):
        assert {argv[0] for _, argv, code in CASES if code == 0} == set(COMMANDS)
        for name, argv, _ in CASES:
            first = render(*invoke(argv))
            assert first == (OUTPUTS / f"{name}.txt").read_text(encoding="utf-8")
            assert render(*invoke(argv)) == first


if __name__ == "__main__":
    import sys

    import pytest

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
