import numpy as np
import pytest

from kspgal.cm_types import CMType, enumerate_cm_types, hodge_sum
from kspgal.extensions import (
    CocycleError,
    Extension,
    canonical_morphism,
    check_section,
    cocycle_from_extension,
    extension_from_cocycle,
    hom_MT_H_is_zero,
    is_split_over_G,
    make_section,
    model_conjugation,
    pushout,
    split_extension,
    splitting_analysis,
    taniyama_element,
    taniyama_reduce,
    universal_extension,
)
from kspgal.group_homology import reduce_cycle, relative_bar_homology
from kspgal.groups import cyclic_group, trivial_module, twist_module, unit_group
from kspgal.invariants import galois_model, metabelian_model
from models import enumerate_cocycles


@pytest.fixture(scope="module")
def model37():
    return galois_model(37)


def test_split_and_trivial():
    G = cyclic_group(1)
    M = trivial_module(G, [5])
    u = universal_extension(G, [G.identity], M)
    assert u.T == () and (u.projection().shape[1] == u.module().rank)
    U = unit_group(5)
    M5 = twist_module(U, 5, 1)
    assert universal_extension(U, list(range(4)), M5).T == ()
    s = split_extension(M5, (5,), [U.identity])
    assert not s.alpha.any() and is_split_over_G(s)


def test_bad_cocycle_has_witness():
    U = unit_group(5)
    M = twist_module(U, 5, 1)
    alpha = np.zeros((4, 1, 1), dtype=np.int64)
    alpha[1, 0, 0] = 1
    with pytest.raises(CocycleError) as ei:
        extension_from_cocycle((5,), alpha, M)
    assert ei.value.witness is not None
    with pytest.raises(CocycleError):
        extension_from_cocycle((5,), np.ones((4, 1, 1), dtype=np.int64), M)


def test_universal_model37(model37):
    G = model37.G
    u = universal_extension(G, model37.H, twist_module(G, 37, 31))
    assert u.T == (37,)
    assert not is_split_over_G(u)
    mor = canonical_morphism(u, u)
    assert mor.matrix.tolist() == [[1]] and mor.unique and mor.method == "brute-force"
    assert universal_extension(G, model37.H, twist_module(G, 37, 1)).T == ()


def test_roundtrip_extension(model37):
    G = model37.G
    u = universal_extension(G, model37.H, twist_module(G, 37, 31))
    V = u.module()
    T, alpha = cocycle_from_extension(V, u.projection(), u.section(), u.M, u.H, iota=u.inclusion())
    assert T == u.T and (alpha == u.alpha).all()
    T2, alpha2 = cocycle_from_extension(V, u.projection(), u.section(), u.M, u.H)
    assert T2 == u.T
    # without iota the kernel basis may differ by a unit
    assert any((alpha2 == (k * alpha) % 37).all() for k in range(1, 37))


def test_split_roundtrip_and_nonequivariant_section(model37):
    G, H = metabelian_model(5, [2])
    M = twist_module(G, 5, 2)
    s = split_extension(M, (5,), H)
    T, alpha = cocycle_from_extension(s.module(), s.projection(), s.section(), M, H, iota=s.inclusion())
    assert not alpha.any()
    G = model37.G
    M = twist_module(G, 37, 31)
    u = universal_extension(G, model37.H, M)
    bad = u.section().copy()
    bad[M.rank :, 0] = 1  # s(m) + f(m): c acts by -1 on M, so s is no longer c-equivariant
    with pytest.raises((ValueError, CocycleError)):
        cocycle_from_extension(u.module(), u.projection(), bad, M, model37.H, iota=u.inclusion())


def test_random_roundtrip():
    rng = np.random.default_rng(5)
    G, H = metabelian_model(5, [2])
    M = twist_module(G, 5, 2)
    cocs = enumerate_cocycles(G, H, M, (5,))
    for k in rng.choice(len(cocs), 8, replace=False):
        ext = extension_from_cocycle((5,), cocs[k], M, H)
        T, alpha = cocycle_from_extension(ext.module(), ext.projection(), ext.section(), M, H, iota=ext.inclusion())
        assert (alpha == cocs[k]).all()


def test_canonical_morphism_cases():
    G, H = metabelian_model(5, [2])
    M = twist_module(G, 5, 2)
    u = universal_extension(G, H, M)
    assert u.T == (5, 5)
    zero = canonical_morphism(split_extension(M, (5,), H), u)
    assert not zero.matrix.any() and zero.unique
    phi = np.array([[2, 3]])
    target = pushout(u, phi, (5,))
    mor = canonical_morphism(target, u)
    assert (mor.matrix == phi).all() and mor.unique
    assert not mor.hom_MT_H_zero  # c acts trivially on mu^2


def test_initiality_against_cocycle_enumeration():
    # |{cocycles alpha vanishing on H}| == |Hom(T^univ, T)| and each one is a pushout
    from kspgal.extensions import hom_count

    for q, exps, j, T in [(5, [2], 2, (5,)), (5, [2], 2, (25,)), (7, [1], 5, (7,)), (3, [0, 1], 1, (3,)),
                          (5, [0], 1, (5,)), (3, [1], 1, (9,))]:
        G, H = metabelian_model(q, exps)
        M = twist_module(G, q, j)
        u = universal_extension(G, H, M)
        cocs = enumerate_cocycles(G, H, M, T)
        assert len(cocs) == hom_count(u.T, T), (q, exps, j, T)
        for a in cocs[:10]:
            mor = canonical_morphism(extension_from_cocycle(T, a, M, H), u)
            assert mor.unique


def test_splitting_analysis():
    U = unit_group(7)
    c = U.labels.index(6)
    rep = splitting_analysis(U, [U.identity, c], twist_module(U, 7, 3))
    assert rep.unique_H_splitting and rep.forgetful_equivalence
    rep = splitting_analysis(U, [U.identity], twist_module(U, 7, 3))
    assert not rep.unique_H_splitting and not rep.forgetful_equivalence
    U5 = unit_group(5)
    rep = splitting_analysis(U5, list(range(4)), twist_module(U5, 5, 1))
    assert rep.unique_H_splitting and rep.forgetful_equivalence
    assert hom_MT_H_is_zero(twist_module(U, 7, 3), [U.identity, c], (7,))


def test_json_roundtrip(model37):
    import json

    G, H = metabelian_model(5, [2])
    M = twist_module(G, 5, 2)
    u = universal_extension(G, H, M)
    back = Extension.from_json(G, json.loads(json.dumps(u.to_json())))
    assert back.T == u.T and (back.alpha == u.alpha).all()


# Taniyama identity on toy models


def _sections(G, rng, n=3):
    sd = G.structure
    q = int(sd.Q.structure[1])
    out = [make_section(G)]
    while len(out) < n:
        choices = {a: [int(x) for x in rng.integers(0, q, len(sd.A_factors))] for a in range(1, q) if a < q - a}
        out.append(make_section(G, choices))
    return out


@pytest.mark.parametrize("q,exps", [(5, [2]), (7, [1]), (7, [3])])
def test_taniyama_identity(q, exps):
    rng = np.random.default_rng(q)
    G, H = metabelian_model(q, exps)
    for j in range(q - 1):
        M = twist_module(G, q, j)
        hg = relative_bar_homology(G, H, M)
        for w in _sections(G, rng):
            for phi in enumerate_cm_types(q):
                for sigma in range(G.order):
                    taniyama_reduce(hg, sigma, phi, w)  # raises if the identity fails


def test_taniyama_examples():
    G, H = metabelian_model(5, [2])
    M = twist_module(G, 5, 1)
    hg = relative_bar_homology(G, H, M)
    w = make_section(G)
    phi = CMType(5, (1, 2))
    assert taniyama_reduce(hg, G.identity, phi, w) == [0] * len(hg.factors)
    c = model_conjugation(G)
    assert taniyama_reduce(hg, c, phi, w) == [0] * len(hg.factors)
    sd = G.structure
    sigma = sd.complement(sd.Q.generators[0])
    expect = reduce_cycle({(sigma,): [hodge_sum(phi, 1)]}, hg)
    assert taniyama_reduce(hg, sigma, phi, w) == expect
    assert taniyama_element(G, G.identity, phi, w) == (0,)


def test_section_checks():
    G, H = metabelian_model(5, [2])
    w = make_section(G, {1: [3], 2: [1]})
    check_section(G, w)
    bad = dict(w.values)
    bad[4] = G.identity
    from kspgal.extensions import Section

    with pytest.raises(ValueError):
        check_section(G, Section(5, bad))
