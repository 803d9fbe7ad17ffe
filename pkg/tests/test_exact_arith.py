from fractions import Fraction
from math import prod

import pytest
from hypothesis import given, strategies as st

from kspgal.exact_arith import (
    bernoulli,
    bernoulli_mod_p,
    bernoulli_mod_p_power_sum,
    divisors,
    euler_phi,
    factorize,
    is_prime,
    numerator_prime_divisors,
    prime_factors,
    prime_power,
    primes_up_to,
    primitive_root,
    rational_from_json,
    rational_to_json,
    von_staudt_denominator,
    zeta_neg,
)

# frozen from the textbook table; b_12 is the 691 anchor
KNOWN = {
    0: Fraction(1),
    1: Fraction(-1, 2),
    2: Fraction(1, 6),
    4: Fraction(-1, 30),
    6: Fraction(1, 42),
    8: Fraction(-1, 30),
    10: Fraction(5, 66),
    12: Fraction(-691, 2730),
    14: Fraction(7, 6),
    16: Fraction(-3617, 510),
}


@pytest.mark.parametrize("n,value", sorted(KNOWN.items()))
def test_bernoulli_table(n, value):
    assert bernoulli(n) == value


def test_odd_bernoulli_vanish():
    assert all(bernoulli(n) == 0 for n in range(3, 60, 2))


def test_zeta_values():
    assert zeta_neg(1) == Fraction(-1, 12)
    assert zeta_neg(2) == Fraction(1, 120)
    assert zeta_neg(6) == Fraction(691, 32760)
    with pytest.raises(ValueError):
        zeta_neg(0)


def _staudt_oracle(n):
    # product of primes p with (p - 1) | n, by brute force
    return prod(p for p in range(2, n + 2) if all(p % d for d in range(2, p)) and n % (p - 1) == 0)


@pytest.mark.parametrize("n", range(2, 81, 2))
def test_von_staudt(n):
    assert bernoulli(n).denominator == _staudt_oracle(n) == von_staudt_denominator(n)


@given(st.integers(1, 40).map(lambda k: 2 * k))
def test_von_staudt_clausen_integrality(n):
    s = bernoulli(n) + sum(Fraction(1, p) for p in primes_up_to(n + 1) if n % (p - 1) == 0)
    assert s.denominator == 1


@pytest.mark.parametrize("p", [5, 7, 11, 13, 37, 59, 67, 101])
def test_mod_p_recursion_vs_power_sum(p):
    rec = bernoulli_mod_p(p)
    for n in range(2, p - 2, 2):
        assert rec[n] == bernoulli_mod_p_power_sum(p, n)


@pytest.mark.parametrize("p", [5, 7, 11, 37, 41])
def test_mod_p_recursion_vs_exact(p):
    rec = bernoulli_mod_p(p)
    for n in range(p - 2):
        b = bernoulli(n)
        assert rec[n] == b.numerator * pow(b.denominator, -1, p) % p


def test_mod_p_range_guard():
    with pytest.raises(ValueError):
        bernoulli_mod_p(11, 9)
    with pytest.raises(ValueError):
        bernoulli_mod_p_power_sum(11, 3)


def test_numerator_prime_divisors():
    assert numerator_prime_divisors(bernoulli(12), 1000) == ({691}, False)
    ps, flag = numerator_prime_divisors(Fraction(691 * 3617), 100)
    assert ps == set() and flag
    with pytest.raises(ValueError):
        numerator_prime_divisors(Fraction(0), 10)


@given(st.integers(2, 10**6))
def test_factorize_roundtrip(n):
    f = factorize(n)
    assert prod(p**e for p, e in f.items()) == n
    assert all(is_prime(p) for p in f)
    assert set(f) == prime_factors(n)


@given(st.integers(1, 3000))
def test_phi_matches_count(n):
    from math import gcd

    assert euler_phi(n) == sum(1 for a in range(1, n + 1) if gcd(a, n) == 1)


def test_prime_power_and_divisors():
    assert prime_power(27) == (3, 3)
    assert prime_power(12) is None
    assert prime_power(1) is None
    assert divisors(12) == [1, 2, 3, 4, 6, 12]


@pytest.mark.parametrize("q", [3, 5, 7, 9, 25, 27, 37, 49, 121])
def test_primitive_root_generates(q):
    g = primitive_root(q)
    phi = euler_phi(q)
    assert len({pow(g, k, q) for k in range(phi)}) == phi


@given(st.fractions())
def test_rational_json_roundtrip(r):
    assert rational_from_json(rational_to_json(r)) == r
