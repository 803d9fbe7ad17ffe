"""Arithmetic tables: irregular pairs, structure of KSp_i(Z; Z_p), minus class
numbers, metabelian models of the Galois group of the Hilbert class field
of Q(zeta_p), CM classes and the Chern-number divisibility oracle.

Every record carries a provenance tag:

* ``proved-by-paper-formula``: a formula or theorem we evaluate exactly,
* ``model-hypothesis``: the class group is modelled with one Z/p per
  irregular index, in the omega^(1-2k) eigenspace,
* ``conjectural``: orders that need Vandiver-type input.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from .cm_lattice import int_det
from .cm_types import CMType, act_cyclotomic, hodge_sum
from .exact_arith import (
    bernoulli,
    bernoulli_mod_p,
    euler_phi,
    factorize,
    is_prime,
    numerator_prime_divisors,
    prime_power,
    primitive_root,
    zeta_neg,
)
from .extensions import Section, make_section, taniyama_element
from .groups import Group, GModule, Semidirect, _reduce_rows, semidirect_product, unit_group
from .smith import Subquotient, subquotient

PROVED = "proved-by-paper-formula"
MODEL = "model-hypothesis"
CONJECTURAL = "conjectural"

H_MINUS_PHI_LIMIT = 400


# --------------------------------------------------------------------------
# irregular pairs


@dataclass(frozen=True)
class IrregularPair:
    p: int
    index: int  # even 2k with p | numerator(B_2k)

    def __post_init__(self):
        if self.index % 2 or not 2 <= self.index <= self.p - 3:
            raise ValueError("index must be even in [2, p - 3]")

    def to_json(self) -> dict:
        return {"p": str(self.p), "index": self.index, "provenance": PROVED}


def irregular_pairs(p: int, method: str = "modp") -> list[IrregularPair]:
    """All (p, 2k) with 2 <= 2k <= p - 3 and p | numerator(B_2k).

    ``method="modp"`` runs the Bernoulli recursion in Z/p (exact, and fast
    for large p); ``method="exact"`` reduces the rational B_2k.
    """
    if p < 3 or not is_prime(p):
        raise ValueError("p must be an odd prime")
    if p < 5:
        return []
    if method == "exact":
        return [IrregularPair(p, n) for n in range(2, p - 2, 2) if bernoulli(n).numerator % p == 0]
    b = bernoulli_mod_p(p)
    return [IrregularPair(p, n) for n in range(2, p - 2, 2) if b[n] == 0]


# --------------------------------------------------------------------------
# KSp_i(Z; Z_p)


@dataclass(frozen=True)
class KSpStructure:
    degree: int
    p: int
    shape: str  # "zero" | "K_plus_Zp" | "K_only"
    kernel_nonvanishing: bool | None
    galois: str | None  # "trivial" | "universal_extension_of_Zp(2k-1)"
    eigenspaces: dict
    conjectural_order: int | None = None

    def to_json(self) -> dict:
        out = {
            "degree": self.degree,
            "p": str(self.p),
            "shape": self.shape,
            "kernel_nonvanishing": self.kernel_nonvanishing,
            "galois": self.galois,
            "eigenspaces": dict(self.eigenspaces),
            "provenance": PROVED,
        }
        if self.conjectural_order is not None:
            out["conjectural_order"] = {"value": str(self.conjectural_order), "provenance": CONJECTURAL,
                                        "note": "Vandiver-type input"}
        return out


def ksp_structure(i: int, p: int) -> KSpStructure:
    """Shape of KSp_i(Z; Z_p) for odd p by i mod 4.

    For i = 4k - 2 the group is K_i(Z; Z_p) (+ eigenspace of psi^-1) plus
    Z_p (- eigenspace), the first summand being nonzero exactly when p
    divides the numerator of zeta(1 - 2k).
    """
    if i < 2:
        raise ValueError("degree must be at least 2")
    if p < 3 or not is_prime(p):
        raise ValueError("p must be an odd prime")
    r = i % 4
    if r in (0, 1):
        return KSpStructure(i, p, "zero", False, None, {})
    if r == 2:
        k = (i + 2) // 4
        num = abs(zeta_neg(k).numerator)
        nz = num % p == 0
        v = 0
        while num % p == 0:
            num //= p
            v += 1
        order = p**v
        return KSpStructure(i, p, "K_plus_Zp", nz, "universal_extension_of_Zp(2k-1)",
                            {"K": "+", "Zp": "-"}, order)
    return KSpStructure(i, p, "K_only", None, "trivial", {"K": "+"})


# --------------------------------------------------------------------------
# minus class numbers


def cyclotomic_polynomial(n: int) -> list[int]:
    """Coefficients (constant term first) of Phi_n."""
    num = [1]
    den = [1]
    for d in range(1, n + 1):
        if n % d:
            continue
        mu = _mobius(n // d)
        f = [-1] + [0] * (d - 1) + [1]
        if mu == 1:
            num = _pmul(num, f)
        elif mu == -1:
            den = _pmul(den, f)
    q, r = _pdivmod(num, den)
    assert not any(r)
    return q


def _mobius(n):
    f = factorize(n) if n > 1 else {}
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def _pmul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _pdivmod(a, b):
    """Division by a monic (or unit-leading) integer polynomial."""
    a = list(a)
    db = len(b) - 1
    lead = b[-1]
    if abs(lead) != 1:
        raise ValueError("divisor must have unit leading coefficient")
    q = [0] * max(len(a) - db, 1)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i] * lead
        if c:
            q[i - db] = c
            for j, y in enumerate(b):
                a[i - db + j] -= c * y
    return q, a[:db]


def poly_norm(h: list[int], phi: list[int]) -> int:
    """Res(phi, h) = det of multiplication by h on Z[x]/(phi), phi monic."""
    d = len(phi) - 1
    _, h = _pdivmod(h + [0] * max(0, d - len(h)), phi)
    cols = []
    cur = h + [0] * (d - len(h))
    for _ in range(d):
        cols.append(cur)
        shifted = [0] + cur
        _, cur = _pdivmod(shifted, phi)
        cur = cur + [0] * (d - len(cur))
    mat = [[cols[j][i] for j in range(d)] for i in range(d)]
    return int_det(mat)


def sylvester_resultant(f: list[int], g: list[int]) -> int:
    """Res(f, g) from the Sylvester matrix (oracle for ``poly_norm``)."""
    m, n = len(f) - 1, len(g) - 1
    size = m + n
    rows = []
    for i in range(n):
        rows.append([0] * i + f[::-1] + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + g[::-1] + [0] * (size - n - 1 - i))
    return int_det(rows)


@dataclass(frozen=True)
class _Orbit:
    order: int  # order n of the characters in the orbit
    conductor: int
    poly: tuple[int, ...]  # h with B_{1,chi} = h(zeta_n) / f for a representative chi


def _odd_orbits(q: int) -> list[_Orbit]:
    pp = prime_power(q)
    if pp is None or pp[0] == 2:
        raise ValueError("q must be an odd prime power")
    p, _ = pp
    phi = euler_phi(q)
    g = primitive_root(q)
    out = []
    for n in sorted(d for d in range(1, phi + 1) if phi % d == 0):
        k = phi // n  # chi = chi_1^k has order n; odd iff k odd
        if k % 2 == 0:
            continue
        s = factorize(n).get(p, 0)
        f = p ** (s + 1)
        ind = {}
        x = 1
        gf = g % f
        for e in range(euler_phi(f)):
            ind[x] = e
            x = x * gf % f
        poly = [0] * n
        for a in range(1, f):
            if a % p:
                poly[ind[a] % n] += a
        out.append(_Orbit(n, f, tuple(poly)))
    return out


def h_minus(q: int, check: bool = True) -> int:
    """Relative class number of Q(zeta_q), q an odd prime power.

    h^- = w * prod over odd chi of (-B_{1,chi} / 2) with w = 2q; each Galois
    orbit of characters of order n contributes the norm from Q(zeta_n) of
    -h(zeta_n) / (2 f), computed as a resultant.
    """
    if q < 3:
        raise ValueError("q must be at least 3")
    if euler_phi(q) > H_MINUS_PHI_LIMIT:
        raise ValueError(f"phi({q}) exceeds the bound {H_MINUS_PHI_LIMIT}")
    val = Fraction(2 * q)
    for orb in _odd_orbits(q):
        deg = euler_phi(orb.order)
        res = poly_norm(list(orb.poly), cyclotomic_polynomial(orb.order))
        val *= Fraction(res) * Fraction(-1, 2 * orb.conductor) ** deg
    if val.denominator != 1 or val <= 0:
        raise ArithmeticError(f"analytic class number formula gave {val}")
    h = int(val)
    if check:
        lo, hi = h_minus_interval(q)
        if not lo <= h <= hi or hi - lo >= 1:
            raise ArithmeticError("interval evaluation disagrees with the exact value")
    return h


_iv_lock = threading.Lock()


def h_minus_interval(q: int, prec: int = 128) -> tuple[Fraction, Fraction]:
    """Certified real enclosure of w * prod over all odd chi of (-B_{1,chi}/2)
    by complex interval arithmetic, one character at a time."""
    from mpmath import iv
    from mpmath.libmp import to_rational

    with _iv_lock:
        old = iv.prec
        iv.prec = prec
        try:
            total = iv.mpc(2 * q, 0)
            for orb in _odd_orbits(q):
                n, f = orb.order, orb.conductor
                for t in range(1, n + 1):
                    if gcd(t, n) != 1:
                        continue
                    acc = iv.mpc(0, 0)
                    for e, c in enumerate(orb.poly):
                        if c:
                            ang = 2 * iv.pi * iv.mpf(e * t % n) / n
                            acc += c * iv.mpc(iv.cos(ang), iv.sin(ang))
                    total *= -acc / (2 * f)
            re = total.real
            lo, hi = (Fraction(*to_rational(x)) for x in re._mpi_)
        finally:
            iv.prec = old
    return lo, hi


# --------------------------------------------------------------------------
# metabelian Galois models


@dataclass
class GaloisModel:
    p: int
    G: Group
    H: tuple[int, int]  # (e, c)
    A: GModule  # class-group model as a module over Q = (Z/p)^x
    indices: tuple[int, ...]  # irregular 2k
    exponents: tuple[int, ...]  # (1 - 2k) mod (p - 1)
    degenerate: bool
    provenance: str = MODEL

    @property
    def Q(self):
        return self.G.structure.Q

    def to_json(self) -> dict:
        return {
            "p": str(self.p),
            "order": str(self.G.order),
            "A_factors": [str(d) for d in self.A.factors],
            "irregular_indices": list(self.indices),
            "action_exponents": list(self.exponents),
            "c": str(self.H[1]),
            "degenerate": self.degenerate,
            "provenance": MODEL,
        }


def metabelian_model(q: int, exponents, lazy: bool | None = None) -> tuple[Group, tuple[int, int]]:
    """A x| (Z/q)^x with A = sum of Z/q on which x acts by x^e_i; returns
    (G, (e, c)) where c is the image of -1 in the complement."""
    Q = unit_group(q)
    exps = [int(e) for e in exponents]
    r = len(exps)

    def act(x):
        u = Q.label(x)
        return np.diag([pow(u, e, q) for e in exps]).reshape(r, r)

    G = semidirect_product([q] * r, Q, act, lazy=lazy)
    c = G.structure.complement(Q.labels.index(q - 1))
    return G, (G.identity, c)


def galois_model(p: int, lazy: bool | None = None) -> GaloisModel:
    """G = A x| (Z/p)^x with one Z/p(omega^(1 - 2k)) per irregular pair."""
    pairs = irregular_pairs(p)
    idx = tuple(pp.index for pp in pairs)
    exps = tuple((1 - n) % (p - 1) for n in idx)
    G, H = metabelian_model(p, exps, lazy=lazy)
    sd: Semidirect = G.structure
    A = GModule(sd.Q, [p] * len(exps), sd.action)
    return GaloisModel(p, G, H, A, idx, exps, degenerate=not idx)


def twisted_coinvariants(model: GaloisModel, j: int) -> Subquotient:
    """(A (x) mu_p^{(x) j})_Q."""
    sd: Semidirect = model.G.structure
    p = model.p
    Q = sd.Q
    r = len(sd.A_factors)
    rel = []
    for x in Q.generators:
        u = Q.label(x)
        K = sd.action[x] * pow(u, j % (p - 1), p) - np.eye(r, dtype=np.int64)
        K = _reduce_rows(K, [p] * r)
        rel.extend(K[:, i].tolist() for i in range(r))
    return subquotient([p] * r, rel=rel)


# --------------------------------------------------------------------------
# CM classes


@dataclass(frozen=True)
class CMClass:
    q: int
    k: int
    phi: CMType
    label: tuple[int, ...] = ()

    def __post_init__(self):
        if self.phi.q != self.q:
            raise ValueError("CM type for a different q")
        if self.k < 1:
            raise ValueError("k must be positive")

    def to_json(self) -> dict:
        return {"q": self.q, "k": self.k, "phi": list(self.phi.members), "label": [str(x) for x in self.label]}


def cm_class_hodge(x: CMClass) -> int:
    """Hodge coordinate: sum over a in phi of a^(2k - 1), mod q."""
    return hodge_sum(x.phi, 2 * x.k - 1)


def cm_class_betti(x: CMClass, model: GaloisModel) -> dict:
    """Image of label (x) zeta^(2k - 1) in (A (x) mu^{(x)(2k - 1)})_Q."""
    if x.q != model.p:
        raise ValueError("model is for a different prime")
    co = twisted_coinvariants(model, 2 * x.k - 1)
    label = list(x.label) if x.label else [0] * len(model.A.factors)
    if len(label) != len(model.A.factors):
        raise ValueError("label does not lie in A")
    return {"factors": list(co.factors), "coords": co.coords(label), "provenance": MODEL}


def galois_act_cm(sigma: int, x: CMClass, model: GaloisModel, w: Section | None = None) -> CMClass:
    """sigma . (phi, label) = (sigma phi, label + Taniyama element)."""
    G = model.G
    sd: Semidirect = G.structure
    if x.q != model.p:
        raise ValueError("model is for a different prime")
    w = make_section(G) if w is None else w
    s = int(sd.Q.label(sd.decode(sigma)[1]))
    shift = taniyama_element(G, sigma, x.phi, w)
    label = list(x.label) if x.label else [0] * len(sd.A_factors)
    new = tuple((a + b) % d for a, b, d in zip(label, shift, sd.A_factors))
    return CMClass(x.q, x.k, act_cyclotomic(s, x.phi), new)


# --------------------------------------------------------------------------
# Chern numbers


@dataclass
class ChernReport:
    partition: tuple[int, ...]
    primes: dict  # part -> sorted primes
    residual: dict  # part -> True if an unfactored cofactor remained

    def to_json(self) -> dict:
        return {
            "partition": list(self.partition),
            "primes": {str(n): [str(p) for p in ps] for n, ps in self.primes.items()},
            "residual": {str(n): f for n, f in self.residual.items()},
            "provenance": PROVED,
        }


def _certified_divisors(num: int, bound: int) -> tuple[set[int], bool]:
    """Prime divisors of num by trial division up to ``bound``; a leftover
    cofactor below (bound + 1)^2 is prime and is added."""
    found, flag = numerator_prime_divisors(Fraction(num), bound)
    if flag:
        rest = abs(num)
        for p in found:
            while rest % p == 0:
                rest //= p
        if rest < (bound + 1) ** 2:
            found.add(rest)
            flag = False
    return found, flag


def chern_divisibility(partition, bound: int = 10**6) -> ChernReport:
    """For each part n, the primes p >= max(partition) dividing the
    numerator of B_{n+1}."""
    parts = tuple(int(n) for n in partition)
    if not parts:
        raise ValueError("empty partition")
    if any(n <= 0 or n % 2 == 0 for n in parts):
        raise ValueError("all parts must be odd positive integers")
    mx = max(parts)
    primes, resid = {}, {}
    for n in parts:
        found, flag = _certified_divisors(bernoulli(n + 1).numerator, bound)
        primes[n] = sorted(p for p in found if p >= mx)
        resid[n] = flag
    return ChernReport(parts, primes, resid)


__all__ = [
    "PROVED", "MODEL", "CONJECTURAL", "IrregularPair", "irregular_pairs", "KSpStructure", "ksp_structure",
    "h_minus", "h_minus_interval", "cyclotomic_polynomial", "poly_norm", "sylvester_resultant", "GaloisModel",
    "galois_model", "metabelian_model", "twisted_coinvariants", "CMClass", "cm_class_hodge", "cm_class_betti",
    "galois_act_cm", "ChernReport", "chern_divisibility",
]
