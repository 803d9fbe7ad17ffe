"""Extensions 0 -> T -> V -> M -> 0 of G-modules with T a trivial module and
an H-equivariant splitting s, encoded by cocycles.

With V = M x T and s(m) = (m, 0) the action is g.(m, t) = (g m, t + alpha(g, m)),
so alpha(g g', m) = alpha(g, g' m) + alpha(g', m) and alpha(h, m) = 0 on H.
A cocycle is stored as an array ``alpha[g]`` of shape (rank T, rank M)
whose column j is alpha(g, e_j); it is extended additively in m.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd, lcm
from typing import Sequence

import numpy as np

from .cm_types import CMType
from .groups import FiniteGroup, GModule, Group, Semidirect, _reduce_rows, cyclotomic_character
from .group_homology import (
    HomologyGroup,
    bar_homology,
    coinvariants,
    reduce_cycle,
    relative_bar_homology,
)
from .smith import EchelonLattice, subquotient

BRUTE_FORCE_LIMIT = 125


class CocycleError(ValueError):
    def __init__(self, msg, witness=None):
        super().__init__(msg if witness is None else f"{msg}: witness {witness}")
        self.witness = witness


@dataclass
class Extension:
    M: GModule
    H: tuple[int, ...]
    T: tuple[int, ...]  # invariant factors of the trivial module
    alpha: np.ndarray  # (|G|, rank T, rank M)

    @property
    def G(self) -> FiniteGroup:
        return self.M.group

    def value(self, g: int, m) -> tuple[int, ...]:
        v = self.alpha[g].astype(object) @ np.array([int(x) for x in m], dtype=object)
        return _red(v, self.T)

    def module(self) -> GModule:
        """V = M x T with the twisted action."""
        r, t = self.M.rank, len(self.T)
        mats = np.zeros((self.G.order, r + t, r + t), dtype=np.int64)
        mats[:, :r, :r] = self.M.matrices
        mats[:, r:, :r] = self.alpha
        mats[:, r:, r:] = np.eye(t, dtype=np.int64)
        return GModule(self.G, tuple(self.M.factors) + tuple(self.T), mats)

    def projection(self) -> np.ndarray:
        r, t = self.M.rank, len(self.T)
        return np.hstack([np.eye(r, dtype=np.int64), np.zeros((r, t), dtype=np.int64)])

    def section(self) -> np.ndarray:
        r, t = self.M.rank, len(self.T)
        return np.vstack([np.eye(r, dtype=np.int64), np.zeros((t, r), dtype=np.int64)])

    def inclusion(self) -> np.ndarray:
        r, t = self.M.rank, len(self.T)
        return np.vstack([np.zeros((r, t), dtype=np.int64), np.eye(t, dtype=np.int64)])

    def to_json(self) -> dict:
        return {
            "module": self.M.to_json(),
            "H": list(self.H),
            "T": [str(d) for d in self.T],
            "cocycle": {str(g): [[str(int(x)) for x in row] for row in self.alpha[g]] for g in range(self.G.order)},
        }

    @classmethod
    def from_json(cls, group: FiniteGroup, obj: dict) -> Extension:
        M = GModule.from_json(group, obj["module"])
        T = tuple(int(d) for d in obj["T"])
        table = {int(g): [[int(x) for x in row] for row in v] for g, v in obj["cocycle"].items()}
        return extension_from_cocycle(T, table, M, obj["H"])


def _red(v, mods) -> tuple[int, ...]:
    return tuple(int(x) % d if d else int(x) for x, d in zip(v, mods))


def _alpha_array(G, T, M, alpha) -> np.ndarray:
    t, r = len(T), M.rank
    if callable(alpha):
        arr = np.array([np.array(alpha(g), dtype=np.int64).reshape(t, r) for g in range(G.order)])
    elif isinstance(alpha, np.ndarray):
        arr = alpha.astype(np.int64)
    else:
        d = {int(k): np.array(v, dtype=np.int64).reshape(t, r) for k, v in dict(alpha).items()}
        arr = np.array([d.get(g, np.zeros((t, r), dtype=np.int64)) for g in range(G.order)])
    return _reduce_rows(arr.reshape(G.order, t, r), T)


def check_cocycle(M: GModule, T, alpha: np.ndarray, H) -> None:
    """Raise CocycleError (with a witness) unless alpha is a valid cocycle."""
    G = M.group
    t, r = len(T), M.rank
    for j, d in enumerate(M.factors):
        if d:
            bad = np.nonzero(_reduce_rows(alpha[:, :, j : j + 1] * d, T).any(axis=(1, 2)))[0] if t else []
            if len(bad):
                raise CocycleError("alpha(g, .) is not additive on M", (int(bad[0]), j))
    for h in H:
        if alpha[h].any():
            raise CocycleError("alpha does not vanish on H", (int(h),))
    # alpha(g g') = alpha(g) A_{g'} + alpha(g')  for all g, g'
    A = M.matrices
    for g in range(G.order):
        lhs = alpha[G.table[g]]  # over g'
        rhs = _reduce_rows(np.einsum("ij,njk->nik", alpha[g], A) + alpha, T)
        diff = (lhs != rhs).any(axis=(1, 2))
        if diff.any():
            gp = int(np.nonzero(diff)[0][0])
            j = int(np.nonzero((lhs[gp] != rhs[gp]).any(axis=0))[0][0])
            raise CocycleError("cocycle condition fails", (g, gp, j))


def extension_from_cocycle(T: Sequence[int], alpha, M: GModule, H: Sequence[int] = ()) -> Extension:
    G = M.group
    T = tuple(int(d) for d in T)
    H = tuple(sorted(set(int(h) for h in H) | {G.identity}))
    if not G.is_subgroup(H):
        raise ValueError("H is not a subgroup")
    arr = _alpha_array(G, T, M, alpha)
    check_cocycle(M, T, arr, H)
    return Extension(M, H, T, arr)


def cocycle_from_extension(V: GModule, pi, s, M: GModule, H: Sequence[int] = (), iota=None):
    """Extract (T, alpha) from (V, pi, s) with alpha(g, m) = g.s(m) - s(g.m).

    T is ker(pi); with ``iota`` (an injective matrix T -> V onto ker(pi))
    coordinates are taken in that basis, otherwise a basis is computed.
    Returns (T factors, alpha array).
    """
    G = M.group
    pi = np.array(pi, dtype=np.int64)
    s = np.array(s, dtype=np.int64)
    ps = _reduce_rows(pi @ s, M.factors)
    if not (ps == _reduce_rows(np.eye(M.rank, dtype=np.int64), M.factors)).all():
        raise ValueError("pi o s is not the identity")
    for g in G.generators:
        if not (_reduce_rows(pi @ V.matrix(g), M.factors) == _reduce_rows(M.matrix(g) @ pi, M.factors)).all():
            raise ValueError("pi is not G-equivariant")
    if iota is None:
        K = subquotient(V.factors, _reduce_rows(pi, M.factors).tolist(), M.factors)
        Tf = tuple(K.factors)
        kgens = [np.array(g, dtype=np.int64) for g in K.gens]
        coords = K.coords
    else:
        iota = np.array(iota, dtype=np.int64)
        Tf = None
        kgens = [iota[:, i] for i in range(iota.shape[1])]
        coords = _iota_coords(iota, V.factors)
    # trivial action on the kernel
    for g in G.generators:
        for k in kgens:
            if V.act(g, k) != V.reduce(k):
                raise ValueError("ker(pi) does not carry the trivial action")
    if Tf is None:
        Tf = _iota_factors(iota, V.factors)
    t = len(Tf)
    alpha = np.zeros((G.order, t, M.rank), dtype=np.int64)
    for g in range(G.order):
        for j in range(M.rank):
            ej = np.zeros(M.rank, dtype=np.int64)
            ej[j] = 1
            v = V.matrix(g) @ (s @ ej) - s @ M.matrix(g)[:, j]
            alpha[g, :, j] = coords(V.reduce(v))
    H = tuple(sorted(set(int(h) for h in H) | {G.identity}))
    for h in H:
        if alpha[h].any():
            raise ValueError("s is not H-equivariant")
    check_cocycle(M, Tf, alpha, H)
    return Tf, alpha


def _iota_factors(iota, vf) -> tuple[int, ...]:
    """Order in V of each column of iota."""
    out = []
    for i in range(iota.shape[1]):
        o = 1
        for x, d in zip(iota[:, i], vf):
            if d:
                o = lcm(o, d // gcd(int(x) % d, d))
        out.append(o)
    return tuple(out)


def _iota_coords(iota, vf):
    t = iota.shape[1]
    orders = _iota_factors(iota, vf)
    k = len(vf)

    def coords(v):
        # lattice spanned by iota columns and diag(vf); find c
        aug = EchelonLattice(k + t)
        for i in range(t):
            aug.add(list(iota[:, i]) + [int(j == i) for j in range(t)])
        for i, d in enumerate(vf):
            if d:
                aug.add([d if j == i else 0 for j in range(k)] + [0] * t)
        # reduce (v, 0) against the echelon basis restricted to V-coordinates
        x = list(v) + [0] * t
        for r in sorted(aug.rows):
            if r >= k:
                break
            b = aug.rows[r]
            if x[r] % b[r]:
                raise ValueError("vector not in the image of iota")
            c = x[r] // b[r]
            x = [xv - c * bv for xv, bv in zip(x, b)]
        if any(x[:k]):
            raise ValueError("vector not in the image of iota")
        return [(-x[k + i]) % o for i, o in enumerate(orders)]

    return coords


def split_extension(M: GModule, T: Sequence[int], H: Sequence[int] = ()) -> Extension:
    T = tuple(int(d) for d in T)
    return extension_from_cocycle(T, np.zeros((M.group.order, len(T), M.rank), dtype=np.int64), M, H)


def universal_extension(G: FiniteGroup, H: Sequence[int], M: GModule, budget=None) -> Extension:
    """The initial extension: T = H_1(G, H; M), alpha(g, m) = [g (x) m]."""
    hg = relative_bar_homology(G, H, M, 1, budget=budget)
    T = tuple(hg.factors)
    alpha = np.zeros((G.order, len(T), M.rank), dtype=np.int64)
    for g in range(G.order):
        if g == G.identity:
            continue
        for j in range(M.rank):
            if M.factors[j] == 1:
                continue
            m = [int(i == j) for i in range(M.rank)]
            alpha[g, :, j] = reduce_cycle({(g,): m}, hg)
    ext = extension_from_cocycle(T, alpha, M, H)
    ext.homology = hg
    return ext


@dataclass
class Morphism:
    matrix: np.ndarray  # T_source -> T_target
    unique: bool
    method: str  # "brute-force" or "generation"
    hom_MT_H_zero: bool  # Hom(M, T)^H = 0


def _homs(src: Sequence[int], dst: Sequence[int]):
    """All homomorphisms Z^a/diag(src) -> Z^b/diag(dst) as b x a matrices."""
    choices = []
    for d in src:
        # images of a generator of order d: elements y with d y = 0
        col_choices = []
        ranges = [range(e) for e in dst]
        for y in itertools.product(*ranges):
            if all((d * yi) % e == 0 for yi, e in zip(y, dst)):
                col_choices.append(y)
        choices.append(col_choices)
    for cols in itertools.product(*choices):
        yield np.array(cols, dtype=np.int64).T.reshape(len(dst), len(src))


def hom_count(src, dst) -> int:
    out = 1
    for a in src:
        for b in dst:
            out *= gcd(a, b) if a and b else (b if a == 0 else 1)
    return out


def canonical_morphism(target: Extension, universal: Extension | None = None) -> Morphism:
    """The unique map T^univ -> T_target pushing alpha^univ to alpha_target."""
    M, G = target.M, target.G
    univ = universal if universal is not None else universal_extension(G, target.H, M)
    if univ.M is not M or tuple(univ.H) != tuple(target.H):
        raise ValueError("extensions live over different (G, H, M)")
    hg: HomologyGroup = univ.homology
    Tu, Tt = univ.T, target.T
    phi = np.zeros((len(Tt), len(Tu)), dtype=np.int64)
    for k, z in enumerate(hg.generators):
        acc = np.zeros(len(Tt), dtype=object)
        for (g,), m in z.items():
            acc += np.array(target.value(g, m), dtype=object)
        phi[:, k] = _red(acc, Tt)
    # phi must be a homomorphism and push alpha^univ onto alpha_target
    for k, d in enumerate(Tu):
        if any(_red(phi[:, k] * d, Tt)):
            raise ArithmeticError("induced map is not well defined")
    pushed = _reduce_rows(np.einsum("ij,njk->nik", phi, univ.alpha), Tt)
    if not (pushed == target.alpha).all():
        raise ArithmeticError("pushforward of the universal cocycle differs from the target")
    # uniqueness
    hom_zero = hom_MT_H_is_zero(M, target.H, Tt)
    n_homs = hom_count(Tu, Tt)
    if n_homs <= BRUTE_FORCE_LIMIT:
        sols = 0
        for f in _homs(Tu, Tt):
            if (_reduce_rows(np.einsum("ij,njk->nik", f, univ.alpha), Tt) == target.alpha).all():
                sols += 1
        return Morphism(phi, sols == 1, "brute-force", hom_zero)
    # the values alpha^univ(g, e_j) generate T^univ, which forces uniqueness
    vals = [univ.alpha[g][:, j].tolist() for g in range(G.order) for j in range(M.rank)]
    gen = subquotient(Tu, rel=vals).is_zero()
    return Morphism(phi, gen, "generation", hom_zero)


def hom_MT_H_is_zero(M: GModule, H, T) -> bool:
    """Hom(M, T)^H = Hom(M_H, T) = 0 for a trivial module T."""
    G = M.group
    sub, emb = G.subgroup(sorted(set(H) | {G.identity}))
    co = coinvariants(M.restrict(sub, emb))
    return hom_count(co.factors, T) == 1


def pushout(ext: Extension, phi, T2: Sequence[int]) -> Extension:
    phi = np.array(phi, dtype=np.int64)
    T2 = tuple(int(d) for d in T2)
    alpha = _reduce_rows(np.einsum("ij,njk->nik", phi, ext.alpha), T2)
    return extension_from_cocycle(T2, alpha, ext.M, ext.H)


def is_split_over_G(ext: Extension) -> bool:
    """Is there f in Hom(M, T) with alpha(g, m) = f(g m) - f(m)?

    Both sides are cocycles, so it suffices to match them on generators.
    """
    M, G, T = ext.M, ext.G, ext.T
    t, r = len(T), M.rank
    # unknown f: t x r, entries f[:, j] in T with d_j f[:, j] = 0
    # Hom(M, T) generators as flattened t*r vectors
    nvar = t * r
    dX = [T[i] for j in range(r) for i in range(t)]  # variable (j, i) -> index j*t + i
    F = []
    dY = []
    for j, d in enumerate(M.factors):
        for i in range(t):
            row = [0] * nvar
            row[j * t + i] = d
            F.append(row)
            dY.append(T[i])
    hom = subquotient(dX, F, dY)
    # linear map L: f -> (f A_s - f)_{s}, flattened over (s, j, i)
    gens = G.generators
    images = []
    for g in hom.gens:
        f = np.array(g, dtype=np.int64).reshape(r, t).T
        img = []
        for s in gens:
            v = _reduce_rows(f @ M.matrix(s) - f, T)
            img.extend(v.T.reshape(-1).tolist())
        images.append(img)
    target = []
    for s in gens:
        target.extend(ext.alpha[s].T.reshape(-1).tolist())
    dZ = [T[i] for _ in gens for j in range(r) for i in range(t)]
    return _in_span(dZ, images, target)


def _in_span(mods, gens, x) -> bool:
    k = len(mods)
    lat = EchelonLattice(k)
    for g in gens:
        lat.add(g)
    for i, d in enumerate(mods):
        if d:
            lat.add([d if j == i else 0 for j in range(k)])
    return lat.solve(x) is not None


@dataclass
class SplittingReport:
    H0: list[int]
    H1: list[int]
    unique_H_splitting: bool
    forgetful_equivalence: bool

    def to_json(self) -> dict:
        return {
            "H0": [str(d) for d in self.H0],
            "H1": [str(d) for d in self.H1],
            "unique_H_splitting": self.unique_H_splitting,
            "forgetful_equivalence": self.forgetful_equivalence,
        }


def splitting_analysis(G: FiniteGroup, H: Sequence[int], M: GModule) -> SplittingReport:
    sub, emb = G.subgroup(sorted(set(int(h) for h in H) | {G.identity}))
    MH = M.restrict(sub, emb)
    h0 = bar_homology(sub, MH, 0).factors
    h1 = bar_homology(sub, MH, 1).factors
    return SplittingReport(h0, h1, not h0, not h0 and not h1)


# --------------------------------------------------------------------------
# Taniyama cocycle on metabelian models


@dataclass(frozen=True)
class Section:
    """Units mod q -> elements of G = A x| (Z/q)^x, with w(-a) = c w(a)."""

    q: int
    values: dict  # unit -> group index

    def __call__(self, a: int) -> int:
        return self.values[a % self.q]


def make_section(G: Group, choices: dict | None = None) -> Section:
    """Section determined by w(a) = (t_a, a) for the smaller member a of each
    pair (default t_a = 0); then w(-a) = c w(a)."""
    sd: Semidirect = G.structure
    Q = sd.Q
    q = int(Q.structure[1])
    c = model_conjugation(G)
    vals = {}
    zero = [0] * len(sd.A_factors)
    for a in Q.labels:
        if a < q - a:
            t = zero if choices is None else list(choices.get(a, zero))
            w = sd.encode(t, Q.labels.index(a))
            vals[a] = w
            vals[q - a] = G.mul(c, w)
    sec = Section(q, vals)
    check_section(G, sec)
    return sec


def check_section(G: Group, w: Section) -> None:
    sd: Semidirect = G.structure
    c = model_conjugation(G)
    for a in sd.Q.labels:
        wa = w(a)
        if sd.Q.label(sd.decode(wa)[1]) != a:
            raise ValueError(f"w({a}) does not lie over {a}")
        if w(-a) != G.mul(c, wa):
            raise ValueError(f"w(-{a}) != c w({a})")


def model_conjugation(G: Group) -> int:
    sd: Semidirect = G.structure
    q = int(sd.Q.structure[1])
    return sd.complement(sd.Q.labels.index(q - 1))


def taniyama_chain(G: Group, sigma: int, phi: CMType, w: Section, m) -> dict:
    """sum over a in phi of the cell w(sigma a)^{-1} sigma w(a), tensored with m."""
    chi = cyclotomic_character(G)
    sb = chi(sigma)
    z: dict = {}
    for a in phi.members:
        tau = G.mul(G.inverse(w(sb * a)), G.mul(sigma, w(a)))
        key = (tau,)
        z[key] = tuple(int(x) for x in np.add(z.get(key, (0,) * len(m)), m))
    return z


def taniyama_element(G: Group, sigma: int, phi: CMType, w: Section) -> tuple[int, ...]:
    """sum over a in phi of w(sigma a)^{-1} sigma w(a), as an element of A."""
    sd: Semidirect = G.structure
    acc = [0] * len(sd.A_factors)
    chi = cyclotomic_character(G)
    sb = chi(sigma)
    for a in phi.members:
        tau = G.mul(G.inverse(w(sb * a)), G.mul(sigma, w(a)))
        av, x = sd.decode(tau)
        if x != sd.Q.identity:
            raise ArithmeticError("Taniyama term does not lie in A")
        acc = [u + v for u, v in zip(acc, av)]
    return tuple(v % d for v, d in zip(acc, sd.A_factors))


def taniyama_reduce(hg: HomologyGroup, sigma: int, phi: CMType, w: Section, check: bool = True) -> list[int]:
    """Coordinates in H_1(G, <c>; mu_q^{(x) j}) of the Taniyama chain.

    With ``check`` the identity with [sigma (x) S_phi(j) zeta] is verified.
    """
    ctx = hg._ctx
    G, M = ctx.G, ctx.M
    check_section(G, w)
    zeta = [1]
    coords = reduce_cycle(taniyama_chain(G, sigma, phi, w, zeta), hg)
    if check:
        expected = reduce_cycle({(sigma,): [hodge_weight(M, phi)]}, hg)
        if coords != expected:
            raise ArithmeticError("Taniyama identity fails")
    return coords


def hodge_weight(M: GModule, phi: CMType) -> int:
    """S_phi(j) for the twist module mu_q^{(x) j}, read off from the action."""
    G = M.group
    q = M.factors[0]
    sd = G.structure
    total = 0
    for a in phi.members:
        x = sd.complement(sd.Q.labels.index(a))
        total += int(M.matrix(x)[0, 0])
    return total % q
