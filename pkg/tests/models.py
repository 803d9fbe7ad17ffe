"""Small random groups and modules shared by the tests."""
import numpy as np

from kspgal.groups import GModule, cyclic_group, direct_sum, semidirect_product, twist_module, unit_group
from kspgal.invariants import metabelian_model

# (q, max rank of A) keeping |A x| (Z/q)^x| <= 200
METABELIAN_SHAPES = [(3, 3), (5, 2), (7, 1), (9, 1), (11, 1), (13, 1)]


def random_metabelian(rng, max_order=200):
    while True:
        q, rmax = METABELIAN_SHAPES[rng.integers(len(METABELIAN_SHAPES))]
        phi = len([a for a in range(1, q) if np.gcd(a, q) == 1])
        r = int(rng.integers(1, rmax + 1))
        if q**r * phi > max_order:
            continue
        exps = [int(e) for e in rng.integers(0, phi, size=r)]
        G, H = metabelian_model(q, exps)
        return q, exps, G, H


def symmetric_group_3():
    import itertools

    perms = list(itertools.permutations(range(3)))
    pos = {p: i for i, p in enumerate(perms)}
    table = [[pos[tuple(a[b[i]] for i in range(3))] for b in perms] for a in perms]
    return perms, table


def sign_module(G, perms, n):
    def sign(p):
        inv = sum(1 for i in range(3) for j in range(i + 1, 3) if p[i] > p[j])
        return -1 if inv % 2 else 1

    return GModule(G, [n], np.array([[[sign(p) % n if n else sign(p)]] for p in perms]))


def hom_matrices(mfac, T):
    """All t x r integer matrices giving homomorphisms Z^r/diag(mfac) -> T."""
    import itertools

    t, r = len(T), len(mfac)
    choices = []
    for i in range(t):
        for j in range(r):
            step = T[i] // np.gcd(T[i], mfac[j]) if mfac[j] else T[i]
            choices.append(range(0, T[i], step) if step else range(1))
    for vals in itertools.product(*choices):
        yield np.array(vals, dtype=np.int64).reshape(t, r)


def enumerate_cocycles(G, H, M, T):
    """Every alpha: G -> Hom(M, T) with alpha(g h) = alpha(g) M(h) + alpha(h)
    and alpha|H = 0, found by choosing values on generators and propagating.
    Independent of the homology engine."""
    import itertools

    T = tuple(T)
    mods = np.array(T, dtype=np.int64).reshape(-1, 1)
    homs = list(hom_matrices(M.factors, T))
    gens = list(G.generators)
    out = []
    for vals in itertools.product(homs, repeat=len(gens)):
        alpha = {G.identity: np.zeros((len(T), M.rank), dtype=np.int64)}
        frontier = [G.identity]
        ok = True
        while frontier and ok:
            nxt = []
            for g in frontier:
                for s, a in zip(gens, vals):
                    sg = G.mul(s, g)
                    v = (a @ M.matrix(g) + alpha[g]) % mods
                    if sg in alpha:
                        if (alpha[sg] != v).any():
                            ok = False
                            break
                    else:
                        alpha[sg] = v
                        nxt.append(sg)
                if not ok:
                    break
            frontier = nxt
        if not ok:
            continue
        arr = np.array([alpha[g] for g in range(G.order)])
        if any(arr[h].any() for h in H):
            continue
        good = all(
            ((arr[G.mul(g, h)] - arr[g] @ M.matrix(h) - arr[h]) % mods == 0).all()
            for g in range(G.order) for h in range(G.order))
        if good:
            out.append(arr)
    return out


__all__ = [
    "hom_matrices", "enumerate_cocycles",
    "METABELIAN_SHAPES", "random_metabelian", "symmetric_group_3", "sign_module", "cyclic_group", "unit_group",
    "semidirect_product", "twist_module", "direct_sum", "GModule",
]
