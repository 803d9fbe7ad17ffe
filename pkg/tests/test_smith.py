import itertools
from math import gcd, prod

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kspgal.smith import (
    EchelonLattice,
    invariant_factors,
    lattice_kernel,
    matmul,
    mod_smith,
    smith_normal_form,
    subquotient,
)

matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(st.lists(st.integers(-30, 30), min_size=c, max_size=c), min_size=r, max_size=r)))


@given(matrices)
def test_snf_identities(a):
    s = smith_normal_form(a)
    assert matmul(matmul(s.U, a), s.V) == s.D
    assert matmul(matmul(s.Uinv, s.D), s.Vinv) == a
    d = s.diagonal
    nz = [x for x in d if x]
    assert all(x > 0 for x in nz)
    assert all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))
    # off-diagonal zero
    assert all(s.D[i][j] == 0 for i in range(len(a)) for j in range(len(a[0])) if i != j)


def test_snf_known():
    assert smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]).diagonal == [2, 6, 12]
    assert smith_normal_form([[0, 0], [0, 0]]).diagonal == [0, 0]


def test_invariant_factors():
    assert invariant_factors([4, 6]) == [2, 12]
    assert invariant_factors([1, 1, 5]) == [5]
    assert invariant_factors([0, 3]) == [3, 0]


@given(st.lists(st.lists(st.integers(-9, 9), min_size=3, max_size=3), min_size=1, max_size=5))
def test_echelon_membership(vs):
    lat = EchelonLattice(3)
    for v in vs:
        lat.add(v)
    for v in vs:
        c = lat.solve(v)
        assert c is not None
        b = lat.basis()
        assert [sum(ci * bi[j] for ci, bi in zip(c, b)) for j in range(3)] == v


def test_lattice_kernel():
    ker = lattice_kernel([[2, 3]], 2, [6])
    # every generator lies in the kernel and (3, 0), (0, 2) are reachable
    assert all((2 * x + 3 * y) % 6 == 0 for x, y in ker)
    lat = EchelonLattice(2)
    for g in ker:
        lat.add(g)
    assert lat.solve([3, 0]) is not None and lat.solve([0, 2]) is not None


def test_mod_smith():
    a = np.array([[4, 2], [6, 8]])
    ms = mod_smith(a, 2, 5, rows=True, cols=True)
    d = (ms.U @ a @ ms.V) % 32
    assert sorted(ms.vals) == [1, 1]  # SNF is diag(2, 10)
    assert d[0, 1] == d[1, 0] == 0


def _brute(dX, F, dY, rel):
    """Invariant-factor profile of ker F / <rel> by enumeration."""
    X = list(itertools.product(*[range(d) for d in dX]))
    red = lambda v: tuple(x % d for x, d in zip(v, dX))
    ker = [x for x in X if all(sum(f * xi for f, xi in zip(row, x)) % dy == 0 for row, dy in zip(F, dY))]
    span = {red([0] * len(dX))}
    frontier = list(span)
    while frontier:
        new = []
        for s in frontier:
            for r in rel:
                t = red([a + b for a, b in zip(s, r)])
                if t not in span:
                    span.add(t)
                    new.append(t)
        frontier = new
    order = len(ker) // len(span)
    torsion = {}
    for d in range(1, max(dX) + 1):
        cnt = sum(1 for x in ker if red([d * v for v in x]) in span)
        torsion[d] = cnt // len(span)
    return order, torsion


@st.composite
def finite_problems(draw):
    k = draw(st.integers(1, 3))
    dX = [draw(st.sampled_from([2, 3, 4, 6, 8, 9, 12])) for _ in range(k)]
    l = draw(st.integers(0, 2))
    dY = [draw(st.sampled_from([2, 3, 4, 6])) for _ in range(l)]
    # F must be well defined: F_ij dX_j = 0 mod dY_i
    F = [[draw(st.integers(0, 11)) * (dY[i] // gcd(dY[i], dX[j])) for j in range(k)] for i in range(l)]
    rel = []
    for _ in range(draw(st.integers(0, 2))):
        rel.append([draw(st.integers(0, 11)) for _ in range(k)])
    ker_ = [r for r in rel if all(sum(f * x for f, x in zip(row, r)) % dy == 0 for row, dy in zip(F, dY))]
    return dX, F, dY, ker_


@given(finite_problems(), st.sampled_from(["int", "modp"]))
def test_subquotient_vs_enumeration(prob, engine):
    dX, F, dY, rel = prob
    sq = subquotient(dX, F, dY, rel, engine=engine)
    order, torsion = _brute(dX, F, dY, rel)
    assert sq.order == order
    for d, cnt in torsion.items():
        assert prod(gcd(d, f) for f in sq.factors) == cnt
    # coordinates of generators are unit vectors, relations go to zero
    for i, g in enumerate(sq.gens):
        assert sq.coords(g) == [int(i == j) for j in range(len(sq.factors))]
    for r in rel:
        assert not any(sq.coords(r))


@given(finite_problems())
def test_engines_agree(prob):
    dX, F, dY, rel = prob
    assert subquotient(dX, F, dY, rel, engine="int").factors == subquotient(dX, F, dY, rel, engine="modp").factors


def test_free_part():
    sq = subquotient([0, 0], rel=[[2, 0]])
    assert sq.factors == [2, 0]
    with pytest.raises(ValueError):
        subquotient([0], engine="modp")


def test_large_prime_power_object_path():
    p = 100003
    sq = subquotient([p * p], rel=[[p]])
    assert sq.factors == [p]
