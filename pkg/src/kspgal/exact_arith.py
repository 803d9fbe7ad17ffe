"""Bernoulli numbers, zeta values at negative odd integers, and small
number-theoretic helpers.

Rationals are :class:`fractions.Fraction` throughout; they are always stored
in lowest terms with a positive denominator.
"""
from __future__ import annotations

import threading
from fractions import Fraction
from math import comb, gcd, isqrt

Rational = Fraction

_bern_lock = threading.Lock()
_bern_cache: list[Fraction] = [Fraction(1)]


def bernoulli(n: int) -> Fraction:
    """Return B_n (convention B_1 = -1/2).

    Uses ``sum_{j=0}^{n} C(n+1, j) B_j = 0`` and memoizes every value
    computed so far.  The denominator of each even-index value is checked
    against von Staudt--Clausen before it is cached.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    with _bern_lock:
        cache = _bern_cache
        for m in range(len(cache), n + 1):
            if m > 1 and m % 2 == 1:
                cache.append(Fraction(0))
                continue
            s = Fraction(0)
            for j in range(m):
                bj = cache[j]
                if bj:
                    s += comb(m + 1, j) * bj
            bm = -s / (m + 1)
            if m >= 2 and bm.denominator != von_staudt_denominator(m):
                raise ArithmeticError(f"von Staudt-Clausen check failed at n={m}")
            cache.append(bm)
        return cache[n]


def von_staudt_denominator(n: int) -> int:
    """Product of the primes p with (p - 1) | n, for even n >= 2."""
    if n < 2 or n % 2:
        raise ValueError("defined for even n >= 2")
    out = 1
    for d in divisors(n):
        if is_prime(d + 1):
            out *= d + 1
    return out


def zeta_neg(k: int) -> Fraction:
    """zeta(1 - 2k) = -B_{2k} / (2k)."""
    if k < 1:
        raise ValueError("k must be positive")
    return -bernoulli(2 * k) / (2 * k)


def bernoulli_mod_p(p: int, nmax: int | None = None) -> list[int]:
    """B_0, ..., B_nmax reduced mod the prime p, via the defining recursion
    carried out in Z/p.

    Valid for nmax <= p - 3, where no B_j with j <= nmax has p in its
    denominator and (m + 1) is invertible mod p.
    """
    if nmax is None:
        nmax = p - 3
    if nmax > p - 3 and p > 3:
        raise ValueError("recursion mod p only valid up to index p - 3")
    out = [1 % p]
    inv = [0] + [pow(i, -1, p) for i in range(1, min(nmax + 2, p))]
    for m in range(1, nmax + 1):
        if m > 1 and m % 2:
            out.append(0)
            continue
        s = 0
        c = 1  # C(m+1, j) mod p, updated in place
        for j in range(m):
            if out[j]:
                s += c * out[j]
            c = c * (m + 1 - j) * inv[j + 1] % p
        out.append((-s * inv[m + 1]) % p)
    return out


def bernoulli_mod_p_power_sum(p: int, n: int) -> int:
    """B_n mod p from the power sum sum_{a<p} a^n = p B_n (mod p^2).

    Independent of the recursion; valid for even n with 2 <= n <= p - 3.
    """
    if n % 2 or not 2 <= n <= p - 3:
        raise ValueError("need even n with 2 <= n <= p - 3")
    p2 = p * p
    s = sum(pow(a, n, p2) for a in range(1, p)) % p2
    if s % p:
        raise ArithmeticError("power sum not divisible by p")
    return (s // p) % p


def numerator_prime_divisors(r: Fraction, bound: int) -> tuple[set[int], bool]:
    """Primes <= bound dividing the numerator of r, by trial division.

    The flag is True iff a cofactor > 1 is left after removing all primes
    up to ``bound``.
    """
    r = Fraction(r)
    if r == 0:
        raise ValueError("zero has no finite numerator factorization")
    primes, rest = _trial_divide(abs(r.numerator), bound)
    return primes, rest > 1


def prime_factors(n: int) -> set[int]:
    """All prime factors of n by complete trial division (up to sqrt of the
    remaining cofactor, which is then certified prime)."""
    n = abs(n)
    if n == 0:
        raise ValueError("zero")
    primes, rest = _trial_divide(n, None)
    if rest > 1:
        primes.add(rest)
    return primes


def _trial_divide(n: int, bound: int | None) -> tuple[set[int], int]:
    found: set[int] = set()
    d = 2
    while d * d <= n and (bound is None or d <= bound):
        if n % d == 0:
            found.add(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    # n is now 1 or has no prime factor below d; if d*d > n it is prime
    if n > 1 and d * d > n and (bound is None or n <= bound):
        found.add(n)
        n = 1
    return found, n


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for d in range(3, isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, n + 1, i)))
    return [i for i in range(n + 1) if sieve[i]]


def divisors(n: int) -> list[int]:
    small, large = [], []
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
    return small + large[::-1]


def prime_power(q: int) -> tuple[int, int] | None:
    """Return (p, n) with q = p**n, or None if q is not a prime power."""
    if q < 2:
        return None
    for p in range(2, isqrt(q) + 1):
        if q % p == 0:
            n = 0
            while q % p == 0:
                q //= p
                n += 1
            return (p, n) if q == 1 else None
    return q, 1


def euler_phi(n: int) -> int:
    out = n
    for p in prime_factors(n) if n > 1 else ():
        out -= out // p
    return out


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of a positive integer as {p: exponent}."""
    out: dict[int, int] = {}
    for p in sorted(prime_factors(n)) if n > 1 else ():
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out[p] = e
    return out


def primitive_root(q: int) -> int:
    """Smallest generator of (Z/q)^x for q an odd prime power (or 2, 4)."""
    phi = euler_phi(q)
    ps = prime_factors(phi) if phi > 1 else set()
    for g in range(1, q):
        if gcd(g, q) != 1:
            continue
        if all(pow(g, phi // r, q) != 1 for r in ps):
            return g
    raise ValueError(f"(Z/{q})^x is not cyclic")


def rational_to_json(r: Fraction) -> list[str]:
    return [str(r.numerator), str(r.denominator)]


def rational_from_json(obj) -> Fraction:
    num, den = obj
    return Fraction(int(num), int(den))
