from fractions import Fraction

import pytest

from twistcalc.coefficients import NormContext, q_binomial, q_factorial, q_integer
from twistcalc.errors import ReconstructionError, RootOfUnityError
from twistcalc.operators import (
    Coeff,
    D,
    DP,
    OperatorWord,
    TwistedOperator,
    apply,
    compose,
    evaluate_word,
    format_operator,
    normal_form,
    recover,
    recover_from_action,
)
from twistcalc.poly import Poly, exponents_up_to
from twistcalc.twist import TwistSpec, VariableTwist, derivation, sigma_apply

from helpers import random_poly

P5 = NormContext.padic(5)
Q = Fraction(6)
X = Poly.var(1, 1)


def specs(d):
    return [
        TwistSpec.q([Q] * d, P5),
        TwistSpec.shift([5] * d, P5),
        TwistSpec.mahler([2] * d, P5),
        TwistSpec([VariableTwist("q", Fraction(3, 2)), VariableTwist("shift", 7)][:d], P5),
    ]


def random_operator(rng, spec, order=2, degree=2):
    terms = {k: random_poly(rng, spec.d, degree, 2) for k in rng.sample(exponents_up_to(spec.d, order), 2)}
    return TwistedOperator(spec, terms)


def random_word(rng, spec, length):
    atoms = []
    for _ in range(length):
        r = rng.random()
        if r < 0.4:
            atoms.append(Coeff(random_poly(rng, spec.d, 2, 2)))
        elif r < 0.8:
            atoms.append(D(rng.randint(1, spec.d)))
        else:
            atoms.append(DP(rng.choice(exponents_up_to(spec.d, 2))))
    return OperatorWord(atoms)


class TestApply:
    def test_fixtures(self):
        s = TwistSpec.q(Q)
        assert apply(TwistedOperator.divided_power((1,), s), X ** 3) == q_integer(3, Q) * X ** 2
        assert apply(TwistedOperator.divided_power((2,), s), X ** 2) == Poly.one(1)
        assert apply(TwistedOperator.divided_power((3,), s), X ** 5) == q_binomial(5, 3, Q) * X ** 2

    def test_first_divided_power_is_derivation(self, rng):
        for s in specs(2):
            for i in (1, 2):
                op = TwistedOperator.derivation(i, s)
                for _ in range(5):
                    f = random_poly(rng, 2, 5)
                    assert apply(op, f) == derivation(f, i, s)

    def test_root_of_unity_guard(self):
        s = TwistSpec.q(-1)
        with pytest.raises(RootOfUnityError):
            apply(TwistedOperator.divided_power((2,), s), X ** 3)


class TestRecover:
    def test_sigma_q(self):
        s = TwistSpec.q(Q)
        op = recover_from_action(lambda f: sigma_apply(f, 1, s), s, 3, 3)
        assert op == TwistedOperator(s, {(0,): 1, (1,): (Q - 1) * X})

    def test_sigma_mahler(self):
        s = TwistSpec.mahler(2)
        op = recover_from_action(lambda f: sigma_apply(f, 1, s), s, 2, 4)
        assert op == TwistedOperator(s, {(0,): 1, (1,): X ** 2 - X})

    def test_round_trip(self, rng):
        for s in specs(2):
            for _ in range(3):
                op = random_operator(rng, s)
                assert recover_from_action(lambda f: apply(op, f), s, 2, 3) == op

    def test_residual_detected(self):
        s = TwistSpec.q(Q)
        dq = TwistedOperator.derivation(1, s)
        ident = s.identity_like()
        with pytest.raises(ReconstructionError):
            recover(lambda f: apply(dq, f), ident, 2, 3)
        rec = recover(lambda f: apply(dq, f), ident, 2, 3, strict=False)
        assert not rec.exact


class TestCompose:
    def test_commutation_rule(self):
        s = TwistSpec.q(Q)
        got = compose(TwistedOperator.derivation(1, s), TwistedOperator.multiplication(X, s))
        assert got == TwistedOperator(s, {(0,): 1, (1,): Q * X})

    def test_divided_powers_square(self):
        s = TwistSpec.q(Q)
        d1 = TwistedOperator.derivation(1, s)
        assert compose(d1, d1) == TwistedOperator.divided_power((2,), s, q_integer(2, Q))

    def test_action(self, rng):
        for s in specs(2):
            for _ in range(3):
                a, b = random_operator(rng, s), random_operator(rng, s)
                c = compose(a, b)
                for _ in range(3):
                    f = random_poly(rng, 2, 5)
                    assert apply(c, f) == apply(a, apply(b, f))

    def test_associative(self, rng):
        s = TwistSpec.q([Q, 2])
        for _ in range(3):
            a, b, c = (random_operator(rng, s, 1) for _ in range(3))
            assert compose(compose(a, b), c) == compose(a, compose(b, c))


class TestNormalForm:
    def test_commutation_word(self):
        s = TwistSpec.q(Q)
        w = OperatorWord([D(1), Coeff(X)])
        assert normal_form(w, s) == TwistedOperator(s, {(0,): 1, (1,): Q * X})
        assert format_operator(normal_form(w, s)) == "1 + 6*x1*dp[1]"

    def test_shift_commutation(self):
        s = TwistSpec.shift(5)
        assert format_operator(normal_form(OperatorWord([D(1), Coeff(X)]), s)) == "1 + (x1 + 5)*dp[1]"

    @pytest.mark.parametrize("k", range(1, 6))
    def test_powers_of_derivation(self, k):
        s = TwistSpec.q(Q)
        nf = normal_form(OperatorWord([D(1)] * k), s)
        assert nf == TwistedOperator.divided_power((k,), s, q_factorial(k, Q))

    def test_random_words(self, rng):
        for s in specs(2):
            for _ in range(6):
                w = random_word(rng, s, rng.randint(1, 5))
                nf = normal_form(w, s)
                for _ in range(2):
                    f = random_poly(rng, 2, 6)
                    assert apply(nf, f) == evaluate_word(w, f, s)

    def test_word_checks(self):
        with pytest.raises(ValueError):
            normal_form(OperatorWord([D(3)]), TwistSpec.q([Q, Q]))
        with pytest.raises(ValueError):
            OperatorWord([])


class TestFormatting:
    def test_format(self):
        s = TwistSpec.q([Q, 2])
        x1 = Poly.var(1, 2)
        op = TwistedOperator(s, {(0, 0): -1, (1, 0): x1 + 5, (0, 2): Fraction(-1, 2)})
        assert format_operator(op) == "-1 + (x1 + 5)*dp[1,0] - 1/2*dp[0,2]"
        assert format_operator(TwistedOperator(s)) == "0"

    def test_json(self):
        s = TwistSpec.q(Q)
        op = TwistedOperator(s, {(0,): 1, (1,): Q * X})
        assert op.to_json() == {"order": 1, "terms": [{"k": [0], "coeff": "1"}, {"k": [1], "coeff": "6*x1"}]}
