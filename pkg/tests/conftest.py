import random
from fractions import Fraction

import pytest

from mzlab import Polynomial, field


@pytest.fixture
def c1():
    return field(1)


@pytest.fixture
def c2():
    return field(2)


@pytest.fixture
def c3():
    return field(3)


@pytest.fixture
def c4():
    return field(4)


@pytest.fixture
def xs(c1):
    return tuple(Polynomial.variable(3, c1, i) for i in (1, 2, 3))


def random_scalar(rng: random.Random, config, zero_ok=True):
    while True:
        coeffs = [
            Fraction(rng.randint(-4, 4), rng.randint(1, 3))
            for _ in range(config.phi_m)
        ]
        s = config.scalar(0)
        z = config.zeta()
        for i, c in enumerate(coeffs):
            s = s + z**i * c
        if zero_ok or not s.is_zero():
            return s


def random_poly(rng: random.Random, n, config, max_terms=4, max_deg=3, zero_ok=True):
    terms = {}
    for _ in range(rng.randint(0 if zero_ok else 1, max_terms)):
        beta = [0] * n
        for _ in range(rng.randint(0, max_deg)):
            beta[rng.randrange(n)] += 1
        terms[tuple(beta)] = random_scalar(rng, config)
    p = Polynomial(n, config, terms)
    if not zero_ok and p.is_zero():
        return random_poly(rng, n, config, max_terms, max_deg, zero_ok=False)
    return p
