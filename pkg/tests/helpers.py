"""Random generators shared by the tests."""

from fractions import Fraction

from twistcalc.poly import Poly, exponents_up_to


def random_rational(rng, num=9, den=4):
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


def random_poly(rng, d, degree, terms=4):
    monos = exponents_up_to(d, degree)
    out = {}
    for _ in range(rng.randint(1, terms)):
        out[rng.choice(monos)] = random_rational(rng)
    return Poly(d, out)


def random_multi_index(rng, d, n):
    return rng.choice(exponents_up_to(d, n))
