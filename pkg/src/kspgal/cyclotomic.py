"""Exact arithmetic in Q(zeta_q) for odd prime powers q.

Elements are coefficient vectors in the power basis 1, zeta, ...,
zeta^(phi(q)-1), reduced modulo the q-th cyclotomic polynomial.  The
embedding j_a sends zeta to exp(2 pi i a / q).
"""
from __future__ import annotations

import os
import threading
from fractions import Fraction
from functools import lru_cache
from math import gcd

import mpmath

from .exact_arith import euler_phi, prime_power, rational_from_json, rational_to_json

SIGN_PREC_ENV = "KSPGAL_SIGN_PREC"
_MAX_PREC = 1 << 16
_iv_lock = threading.Lock()


def check_modulus(q: int) -> tuple[int, int]:
    """Return (p, n) for an odd prime power q = p**n, else raise."""
    pp = prime_power(q) if isinstance(q, int) else None
    if pp is None or pp[0] == 2:
        raise ValueError(f"q={q} must be an odd prime power")
    return pp


@lru_cache(maxsize=None)
def _reduction_rule(q: int) -> tuple[int, int, int]:
    p, n = check_modulus(q)
    step = q // p  # p^(n-1)
    return euler_phi(q), p, step


def _reduce_cyclic(vec: list, q: int) -> tuple:
    """Reduce a length-q vector (a polynomial mod x^q - 1) modulo Phi_q."""
    phi, p, step = _reduction_rule(q)
    vec = list(vec)
    # x^phi = -(1 + x^step + ... + x^((p-2) step)); process top degrees first.
    for k in range(q - 1, phi - 1, -1):
        c = vec[k]
        if c:
            vec[k] = 0
            base = k - phi
            for i in range(p - 1):
                vec[base + i * step] -= c
    return tuple(Fraction(c) for c in vec[:phi])


class CycElem:
    """An element of Q(zeta_q) in canonical power-basis form."""

    __slots__ = ("q", "coeffs")

    def __init__(self, q: int, coeffs):
        phi, _, _ = _reduction_rule(q)
        coeffs = [Fraction(c) for c in coeffs]
        if len(coeffs) > phi:
            # accept any polynomial: fold exponents mod q, then reduce
            folded = [Fraction(0)] * q
            for k, c in enumerate(coeffs):
                folded[k % q] += c
            coeffs = list(_reduce_cyclic(folded, q))
        else:
            coeffs = coeffs + [Fraction(0)] * (phi - len(coeffs))
        self.q = q
        self.coeffs = tuple(coeffs)

    # constructors
    @classmethod
    def zero(cls, q: int) -> CycElem:
        return cls(q, [])

    @classmethod
    def one(cls, q: int) -> CycElem:
        return cls(q, [1])

    @classmethod
    def from_int(cls, q: int, c) -> CycElem:
        return cls(q, [c])

    @classmethod
    def zeta(cls, q: int, k: int = 1) -> CycElem:
        """zeta_q ** k for any integer k."""
        vec = [0] * q
        vec[k % q] = 1
        return cls(q, _reduce_cyclic(vec, q))

    # arithmetic
    def _coerce(self, other) -> CycElem:
        if isinstance(other, CycElem):
            if other.q != self.q:
                raise ValueError("elements of different cyclotomic fields")
            return other
        if isinstance(other, (int, Fraction)):
            return CycElem.from_int(self.q, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycElem(self.q, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycElem(self.q, [-a for a in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycElem(self.q, [a * other for a in self.coeffs])
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        q = self.q
        vec = [Fraction(0)] * q
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    vec[(i + j) % q] += a * b
        return CycElem(q, _reduce_cyclic(vec, q))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out, base = CycElem.one(self.q), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycElem(self.q, [a / other for a in self.coeffs])
        return self * self._coerce(other).inverse()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycElem.from_int(self.q, other)
        if not isinstance(other, CycElem):
            return NotImplemented
        return self.q == other.q and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.q, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def __repr__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if k == 0 else f"{c}*z^{k}")
        return f"CycElem(q={self.q}, {' + '.join(terms) or '0'})"

    # structure
    def galois(self, a: int) -> CycElem:
        """Image under the automorphism zeta -> zeta^a, gcd(a, q) = 1."""
        q = self.q
        vec = [Fraction(0)] * q
        for k, c in enumerate(self.coeffs):
            if c:
                vec[(a * k) % q] += c
        return CycElem(q, _reduce_cyclic(vec, q))

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def mult_matrix(self) -> list[list[Fraction]]:
        """Matrix of y -> self*y on the power basis (columns are images)."""
        phi = len(self.coeffs)
        cols = [(self * CycElem.zeta(self.q, k)).coeffs for k in range(phi)]
        return [[cols[j][i] for j in range(phi)] for i in range(phi)]

    def inverse(self) -> CycElem:
        if not self:
            raise ZeroDivisionError("inverse of zero")
        m = self.mult_matrix()
        rhs = [Fraction(1)] + [Fraction(0)] * (len(m) - 1)
        return CycElem(self.q, _solve(m, rhs))

    def to_json(self) -> dict:
        return {"q": self.q, "coeffs": [rational_to_json(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj: dict) -> CycElem:
        return cls(int(obj["q"]), [rational_from_json(c) for c in obj["coeffs"]])


def conjugate(x: CycElem) -> CycElem:
    """Complex conjugation zeta -> zeta^{-1}."""
    return x.galois(-1)


@lru_cache(maxsize=None)
def _power_traces(q: int) -> tuple[int, ...]:
    """Tr(zeta^k) for k = 0..phi-1 (Ramanujan sums c_q(k))."""
    p, n = check_modulus(q)
    phi = euler_phi(q)
    step = q // p
    out = []
    for k in range(phi):
        if k % q == 0:
            out.append(phi)
        elif k % step == 0:
            out.append(-step)
        else:
            out.append(0)
    return tuple(out)


def trace_to_Q(x: CycElem) -> Fraction:
    """Sum of x over all embeddings into C."""
    t = _power_traces(x.q)
    return sum((c * tk for c, tk in zip(x.coeffs, t)), Fraction(0))


def matrix_trace(x: CycElem) -> Fraction:
    """Trace of multiplication-by-x; an independent check of trace_to_Q."""
    m = x.mult_matrix()
    return sum((m[i][i] for i in range(len(m))), Fraction(0))


def norm_to_Q(x: CycElem) -> Fraction:
    return _det(x.mult_matrix())


def discriminant_abs(q: int) -> int:
    """|disc Q(zeta_q)| = p^(p^(n-1) (n p - n - 1))."""
    p, n = check_modulus(q)
    return p ** (p ** (n - 1) * (n * p - n - 1))


def different_generator(q: int) -> CycElem:
    """delta = (1+zeta)^(q/p) * q / (zeta^(q/p) - 1), a purely imaginary
    generator of the different of Z[zeta_q]."""
    p, _ = check_modulus(q)
    s = q // p
    w = CycElem.one(q) + CycElem.zeta(q)
    delta = (w ** s) * q * (CycElem.zeta(q, s) - 1).inverse()
    if conjugate(delta) != -delta:
        raise ArithmeticError("delta is not purely imaginary")
    if not delta.is_integral():
        raise ArithmeticError("delta is not integral")
    if abs(norm_to_Q(delta)) != discriminant_abs(q):
        raise ArithmeticError("|N(delta)| differs from |disc|")
    return delta


def start_precision() -> int:
    try:
        return max(16, int(os.environ.get(SIGN_PREC_ENV, "64")))
    except ValueError:
        return 64


def _embedding_interval(x: CycElem, a: int, prec: int, part: str):
    iv = mpmath.iv
    # the interval context keeps a global precision
    with _iv_lock:
        saved = iv.prec
        iv.prec = prec
        try:
            two_pi_over_q = 2 * iv.pi / x.q
            total = iv.mpf(0)
            f = iv.sin if part == "im" else iv.cos
            for k, c in enumerate(x.coeffs):
                if c:
                    ck = iv.mpf(c.numerator) / c.denominator
                    total += ck * f(two_pi_over_q * ((a * k) % x.q))
            return total
        finally:
            iv.prec = saved


def _sign_of_part(x: CycElem, a: int, part: str) -> int:
    prec = start_precision()
    while prec <= _MAX_PREC:
        val = _embedding_interval(x, a, prec, part)
        if val.a > 0:
            return 1
        if val.b < 0:
            return -1
        prec *= 2
    raise ArithmeticError("precision escalation did not separate zero")


def embedding_sign(x: CycElem, a: int) -> int:
    """Sign (+1, -1, 0) of Im j_a(x), decided rigorously.

    Zero is detected exactly: Im j_a(x) = 0 iff x equals its conjugate.
    """
    if a % x.q == 0 or gcd(a, x.q) != 1:
        raise ValueError("a must be a unit mod q")
    if x == conjugate(x):
        return 0
    return _sign_of_part(x, a, "im")


def real_embedding_sign(x: CycElem, a: int) -> int:
    """Sign of j_a(x) for x fixed by conjugation (a real element)."""
    if x != conjugate(x):
        raise ValueError("element is not real")
    if not x:
        return 0
    return _sign_of_part(x, a, "re")


def embedding_value(x: CycElem, a: int, prec: int = 53) -> complex:
    """Numerical j_a(x) (diagnostics and cross-checks only)."""
    with mpmath.workprec(prec):
        v = sum(
            (mpmath.mpf(c.numerator) / c.denominator) * mpmath.expjpi(2 * a * k / mpmath.mpf(x.q))
            for k, c in enumerate(x.coeffs)
            if c
        )
        return complex(v)


def _solve(m: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(m)
    a = [row[:] + [rhs[i]] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


def _det(m: list[list[Fraction]]) -> Fraction:
    a = [row[:] for row in m]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, n):
            if a[r][col]:
                f = a[r][col] * inv
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return det
