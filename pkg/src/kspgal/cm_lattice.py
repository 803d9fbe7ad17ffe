"""Integral symplectic lattices from skew-Hermitian forms on Z[zeta_q].

A form is b(x, y) = v * x * conj(y) with v totally imaginary.  Its
symplectic pairing is (x, y) -> -Tr(b(x, y)); all matrices are written in
the power basis and are row-major.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cm_types import CMType, units
from .cyclotomic import (
    CycElem,
    conjugate,
    embedding_sign,
    real_embedding_sign,
    trace_to_Q,
)

IntMatrix = list[list[int]]


class FormError(ValueError):
    """The multiplier does not give a perfect integral symplectic lattice."""


@dataclass(frozen=True)
class SkewHermitianForm:
    q: int
    v: CycElem

    def __post_init__(self):
        if self.v.q != self.q:
            raise ValueError("multiplier lives in a different field")
        if not self.v:
            raise ValueError("multiplier must be nonzero")
        if conjugate(self.v) != -self.v:
            raise ValueError("multiplier must be totally imaginary")

    def pairing(self, x: CycElem, y: CycElem) -> Fraction:
        return -trace_to_Q(self.v * x * conjugate(y))

    def to_json(self) -> dict:
        return {"q": self.q, "v": self.v.to_json()}


def symplectic_gram(f: SkewHermitianForm) -> IntMatrix:
    """G[i][j] = -Tr(v zeta^i zeta^-j); rejects forms that are not integral,
    skew and unimodular."""
    phi = len(f.v.coeffs)
    basis = [CycElem.zeta(f.q, k) for k in range(phi)]
    gram = [[f.pairing(basis[i], basis[j]) for j in range(phi)] for i in range(phi)]
    if any(x.denominator != 1 for row in gram for x in row):
        raise FormError("pairing is not integral: v is not in the inverse different")
    g = [[int(x) for x in row] for row in gram]
    if any(g[i][j] != -g[j][i] for i in range(phi) for j in range(phi)):
        raise FormError("pairing is not skew-symmetric")
    d = int_det(g)
    if d != 1:
        raise FormError(f"pairing is not perfect (det = {d})")
    return g


def zeta_action_matrix(f: SkewHermitianForm) -> IntMatrix:
    """Matrix S of multiplication by zeta, with S^T G S = G and exact order q."""
    g = symplectic_gram(f)
    q = f.q
    s = [[int(x) for x in row] for row in CycElem.zeta(q).mult_matrix()]
    if mat_mul(transpose(s), mat_mul(g, s)) != g:
        raise ArithmeticError("zeta does not preserve the symplectic form")
    n = len(s)
    ident = identity(n)
    p = _smallest_prime_factor(q)
    if mat_pow(s, q) != ident or mat_pow(s, q // p) == ident:
        raise ArithmeticError("zeta does not act with exact order q")
    return s


def tensor_multiplier(t: CycElem, v: CycElem) -> CycElem:
    """Multiplier of the tensor product of a Hermitian form with multiplier t
    and a skew-Hermitian one with multiplier v."""
    if conjugate(t) != t:
        raise ValueError("t must be fixed by conjugation")
    if conjugate(v) != -v:
        raise ValueError("v must be totally imaginary")
    out = t * v
    assert conjugate(out) == -out
    return out


def cm_type_of_form(f: SkewHermitianForm) -> CMType:
    """Embeddings sending v (equivalently b(x, x)) to the upper half-plane."""
    members = []
    for a in units(f.q):
        s = embedding_sign(f.v, a)
        if s == 0:
            raise ArithmeticError("multiplier has a real embedding value")
        if s > 0:
            members.append(a)
    return CMType(f.q, tuple(members))


def sign_flips(t: CycElem) -> set[int]:
    """Units a with j_a(t) < 0 for a real element t."""
    return {a for a in units(t.q) if real_embedding_sign(t, a) < 0}


def standard_form(q: int) -> SkewHermitianForm:
    """The form with multiplier delta^{-1}."""
    from .cyclotomic import different_generator

    return SkewHermitianForm(q, different_generator(q).inverse())


# small exact integer matrix helpers


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(a: IntMatrix) -> IntMatrix:
    return [list(r) for r in zip(*a)]


def mat_mul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def mat_pow(a: IntMatrix, k: int) -> IntMatrix:
    out, base = identity(len(a)), a
    while k:
        if k & 1:
            out = mat_mul(out, base)
        base = mat_mul(base, base)
        k >>= 1
    return out


def int_det(a: IntMatrix) -> int:
    """Bareiss fraction-free determinant."""
    m = [row[:] for row in a]
    n = len(m)
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            piv = next((r for r in range(k + 1, n) if m[r][k]), None)
            if piv is None:
                return 0
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1] if n else 1


def _smallest_prime_factor(n: int) -> int:
    d = 2
    while n % d:
        d += 1
    return d


def matrix_to_json(a: IntMatrix) -> list[list[str]]:
    return [[str(x) for x in row] for row in a]
