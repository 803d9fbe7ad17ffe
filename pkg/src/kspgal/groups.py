"""Finite groups as multiplication tables and finite(ly generated) abelian
coefficient modules with a group action.

Elements are indices 0..n-1.  Module elements are integer column vectors
reduced modulo the invariant factors (a factor 0 is a copy of Z).
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Callable, Iterable, Sequence

import numpy as np

from .exact_arith import euler_phi

TABLE_LIMIT = 3000


class GroupLawError(ValueError):
    pass


@dataclass(frozen=True)
class Semidirect:
    """Structure tag of A x| Q: element index = a_index * |Q| + x."""

    A_factors: tuple[int, ...]
    Q: "FiniteGroup"
    action: np.ndarray  # (|Q|, r, r) matrices of Q acting on A

    @property
    def A_order(self) -> int:
        return int(np.prod(self.A_factors)) if self.A_factors else 1

    def decode(self, g: int) -> tuple[tuple[int, ...], int]:
        ia, x = divmod(int(g), self.Q.order)
        if not self.A_factors:
            return (), x
        return tuple(int(v) for v in np.unravel_index(ia, self.A_factors)), x

    def encode(self, a: Sequence[int], x: int) -> int:
        if not self.A_factors:
            return int(x)
        a = tuple(int(v) % d for v, d in zip(a, self.A_factors))
        return int(np.ravel_multi_index(a, self.A_factors)) * self.Q.order + int(x)

    def A_generators(self) -> list[int]:
        e = self.Q.identity
        r = len(self.A_factors)
        return [self.encode([int(i == j) for j in range(r)], e) for i in range(r) if self.A_factors[i] > 1]

    def complement(self, x: int) -> int:
        return self.encode([0] * len(self.A_factors), x)


class Group:
    """Common interface; subclasses implement ``mul`` and ``inverse``."""

    order: int
    identity: int
    structure = None
    labels: list | None = None

    def mul(self, g: int, h: int) -> int:
        raise NotImplementedError

    def inverse(self, g: int) -> int:
        raise NotImplementedError

    def power(self, g: int, k: int) -> int:
        out, base = self.identity, g
        if k < 0:
            base, k = self.inverse(g), -k
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def element_order(self, g: int) -> int:
        k, x = 1, g
        while x != self.identity:
            x = self.mul(x, g)
            k += 1
        return k

    def closure(self, gens: Iterable[int]) -> list[int]:
        gens = [int(g) for g in gens]
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for h in frontier:
                for s in gens:
                    y = self.mul(s, h)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return sorted(seen)

    def is_subgroup(self, subset: Iterable[int]) -> bool:
        sub = set(int(h) for h in subset)
        if self.identity not in sub:
            return False
        return all(self.mul(a, b) in sub for a in sub for b in sub)

    def label(self, g: int):
        return self.labels[g] if self.labels is not None else g


class FiniteGroup(Group):
    """Group given by an n x n multiplication table, verified on construction."""

    def __init__(self, table, identity: int | None = None, labels=None, structure=None,
                 generators: Sequence[int] | None = None, verify: bool = True):
        t = np.asarray(table, dtype=np.int64)
        if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
            raise GroupLawError("table must be a nonempty square array")
        n = t.shape[0]
        if t.min() < 0 or t.max() >= n:
            raise GroupLawError("table entries out of range")
        self.table = t
        self.order = n
        if identity is None:
            ids = [i for i in range(n) if (t[i] == np.arange(n)).all() and (t[:, i] == np.arange(n)).all()]
            if not ids:
                raise GroupLawError("no identity element")
            identity = ids[0]
        self.identity = int(identity)
        self.labels = list(labels) if labels is not None else None
        self.structure = structure
        if verify:
            self._verify_latin()
        inv = np.argmax(t == self.identity, axis=1)
        self._inv = inv
        self.generators = list(generators) if generators is not None else self._greedy_generators()
        if verify:
            self._verify_associative()

    def _verify_latin(self):
        t, n, e = self.table, self.order, self.identity
        ar = np.arange(n)
        if not ((t[e] == ar).all() and (t[:, e] == ar).all()):
            raise GroupLawError("identity row/column wrong")
        srt = np.sort(t, axis=1)
        if not (srt == ar).all():
            raise GroupLawError("a row is not a permutation (no cancellation)")
        if not (np.sort(t, axis=0) == ar[:, None]).all():
            raise GroupLawError("a column is not a permutation")

    def _verify_associative(self):
        # Light's test on a generating set suffices
        t = self.table
        if self.closure(self.generators) != list(range(self.order)):
            raise GroupLawError("generators do not generate")
        for s in self.generators:
            left = t[t[:, s], :]  # (x s) y
            right = t[:, t[s, :]]  # x (s y)
            if not (left == right).all():
                x, y = np.argwhere(left != right)[0]
                raise GroupLawError(f"associativity fails at ({int(x)}, {s}, {int(y)})")

    def _greedy_generators(self) -> list[int]:
        orders = [self.element_order(g) for g in range(self.order)]
        cand = sorted(range(self.order), key=lambda g: (-orders[g], g))
        gens: list[int] = []
        have = {self.identity}
        for g in cand:
            if len(have) == self.order:
                break
            if g not in have:
                gens.append(g)
                have = set(self.closure(gens))
        return gens

    def mul(self, g, h):
        return int(self.table[g, h])

    def inverse(self, g):
        return int(self._inv[g])

    @property
    def inverses(self) -> np.ndarray:
        return self._inv

    def element_order(self, g):
        k, x = 1, int(g)
        while x != self.identity:
            x = int(self.table[x, g])
            k += 1
        return k

    def closure(self, gens):
        gens = [int(g) for g in gens]
        seen = np.zeros(self.order, dtype=bool)
        seen[self.identity] = True
        frontier = np.array([self.identity])
        while frontier.size:
            nxt = np.unique(self.table[np.array(gens, dtype=np.int64)[:, None], frontier[None, :]].ravel()) if gens else np.array([], dtype=np.int64)
            nxt = nxt[~seen[nxt]]
            seen[nxt] = True
            frontier = nxt
        return [int(i) for i in np.nonzero(seen)[0]]

    def is_subgroup(self, subset):
        sub = np.unique(np.asarray(list(subset), dtype=np.int64))
        if sub.size == 0 or self.identity not in sub:
            return False
        prods = self.table[np.ix_(sub, sub)]
        return bool(np.isin(prods, sub).all())

    def center(self) -> list[int]:
        t = self.table
        gens = np.array(self.generators, dtype=np.int64)
        return [g for g in range(self.order) if (t[g, gens] == t[gens, g]).all()]

    def subgroup(self, subset: Sequence[int]) -> tuple[FiniteGroup, list[int]]:
        """The subgroup on ``subset`` as its own group, with the embedding."""
        sub = sorted(int(h) for h in subset)
        if not self.is_subgroup(sub):
            raise GroupLawError("subset is not a subgroup")
        pos = {g: i for i, g in enumerate(sub)}
        tab = [[pos[int(self.table[a, b])] for b in sub] for a in sub]
        labels = [self.label(g) for g in sub]
        return FiniteGroup(tab, identity=pos[self.identity], labels=labels), sub

    def to_json(self) -> dict:
        out = {"order": self.order, "identity": self.identity, "table": self.table.tolist()}
        if self.labels is not None:
            out["labels"] = [str(x) for x in self.labels]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> FiniteGroup:
        return cls(obj["table"], identity=obj.get("identity"), labels=obj.get("labels"))


class LazySemidirect(Group):
    """A x| Q without a stored table (for groups too large to tabulate)."""

    def __init__(self, sd: Semidirect):
        self.structure = sd
        self.order = sd.A_order * sd.Q.order
        self.identity = sd.encode([0] * len(sd.A_factors), sd.Q.identity)
        self.generators = sd.A_generators() + [sd.complement(x) for x in sd.Q.generators]

    def _a_mul(self, x, a):
        sd = self.structure
        v = sd.action[x] @ np.array(a, dtype=np.int64)
        return [int(c) % d for c, d in zip(v, sd.A_factors)]

    def mul(self, g, h):
        sd = self.structure
        a1, x1 = sd.decode(g)
        a2, x2 = sd.decode(h)
        b = self._a_mul(x1, a2)
        return sd.encode([u + w for u, w in zip(a1, b)], sd.Q.mul(x1, x2))

    def inverse(self, g):
        sd = self.structure
        a, x = sd.decode(g)
        xi = sd.Q.inverse(x)
        b = self._a_mul(xi, a)
        return sd.encode([-c for c in b], xi)


# --------------------------------------------------------------------------
# constructors


def cyclic_group(n: int) -> FiniteGroup:
    ar = np.arange(n)
    return FiniteGroup((ar[:, None] + ar[None, :]) % n, identity=0, generators=[1 % n] if n > 1 else [],
                       structure=("cyclic", n))


def unit_group(q: int) -> FiniteGroup:
    """(Z/q)^x with elements listed in increasing order of their residues."""
    us = [a for a in range(1, q) if gcd(a, q) == 1] if q > 1 else [0]
    if q == 2:
        us = [1]
    pos = {a: i for i, a in enumerate(us)}
    tab = [[pos[(a * b) % q] for b in us] for a in us]
    return FiniteGroup(tab, identity=pos[1 % q], labels=us, structure=("units", q))


def _check_action_hom(Q: FiniteGroup, factors, act: np.ndarray):
    mods = np.array([d if d else 0 for d in factors], dtype=np.int64)
    for s in Q.generators:
        prod = np.einsum("ij,njk->nik", act[s], act)
        prod = _reduce_rows(prod, factors)
        if not (prod == act[Q.table[s]]).all():
            raise GroupLawError("action is not a homomorphism")
    e = np.eye(len(factors), dtype=np.int64)
    if not (_reduce_rows(act[Q.identity], factors) == _reduce_rows(e, factors)).all():
        raise GroupLawError("identity does not act trivially")
    del mods


def semidirect_product(A_factors: Sequence[int], Q: FiniteGroup, action, lazy: bool | None = None) -> Group:
    """A x| Q with law (a, x)(a', x') = (a + x.a', x x').

    ``action`` gives one integer matrix per element of Q (dict or array) or
    per generator of Q (dict restricted to generators), acting on column
    vectors of A = Z^r / diag(A_factors).
    """
    A_factors = tuple(int(d) for d in A_factors)
    if any(d <= 0 for d in A_factors):
        raise ValueError("A must be finite")
    r = len(A_factors)
    act = _complete_action(Q, A_factors, action)
    _check_action_hom(Q, A_factors, act)
    sd = Semidirect(A_factors, Q, act)
    n = sd.A_order * Q.order
    if lazy is None:
        lazy = n > TABLE_LIMIT
    if lazy:
        return LazySemidirect(sd)
    nA, nQ = sd.A_order, Q.order
    if r:
        avec = np.array(np.unravel_index(np.arange(nA), A_factors)).T  # (nA, r)
        mods = np.array(A_factors, dtype=np.int64)
        # x . a for all x, a
        xa = np.einsum("xij,aj->xai", act, avec) % mods  # (nQ, nA, r)
        xa_idx = np.ravel_multi_index(tuple(xa.reshape(-1, r).T), A_factors).reshape(nQ, nA)
    else:
        avec = np.zeros((1, 0), dtype=np.int64)
        xa_idx = np.zeros((nQ, 1), dtype=np.int64)
    g = np.arange(n)
    ia, x = np.divmod(g, nQ)
    # product of (ia1, x1) and (ia2, x2)
    b_idx = xa_idx[x[:, None], ia[None, :]]  # (n, n)
    if r:
        s = (avec[ia][:, None, :] + avec[b_idx]) % mods
        sidx = np.ravel_multi_index(tuple(np.moveaxis(s, -1, 0)), A_factors)
    else:
        sidx = np.zeros((n, n), dtype=np.int64)
    table = sidx * nQ + Q.table[x[:, None], x[None, :]]
    labels = [(tuple(int(v) for v in avec[i]), Q.label(xx)) for i, xx in zip(ia, x)]
    gens = sd.A_generators() + [sd.complement(y) for y in Q.generators]
    G = FiniteGroup(table, identity=sd.encode([0] * r, Q.identity), labels=labels, structure=sd,
                    generators=gens or None)
    return G


def _complete_action(Q: FiniteGroup, factors, action) -> np.ndarray:
    r = len(factors)
    if callable(action):
        return np.array([_reduce_rows(np.array(action(x), dtype=np.int64).reshape(r, r), factors)
                         for x in range(Q.order)], dtype=np.int64).reshape(Q.order, r, r)
    if isinstance(action, np.ndarray) and action.shape == (Q.order, r, r):
        return _reduce_rows(action.astype(np.int64), factors)
    action = {int(k): np.array(v, dtype=np.int64).reshape(r, r) for k, v in dict(action).items()}
    if len(action) == Q.order:
        return _reduce_rows(np.array([action[x] for x in range(Q.order)]).reshape(Q.order, r, r), factors)
    return extend_on_generators(Q, factors, action)


def extend_on_generators(G: FiniteGroup, factors, gen_action: dict) -> np.ndarray:
    """Extend matrices given on generators to all of G along a BFS tree."""
    r = len(factors)
    out = np.zeros((G.order, r, r), dtype=np.int64)
    done = np.zeros(G.order, dtype=bool)
    out[G.identity] = np.eye(r, dtype=np.int64)
    done[G.identity] = True
    gens = [s for s in gen_action]
    if set(G.closure(gens)) != set(range(G.order)):
        raise GroupLawError("action not given on a generating set")
    frontier = [G.identity]
    while frontier:
        nxt = []
        for h in frontier:
            for s in gens:
                y = G.mul(s, h)
                if not done[y]:
                    out[y] = _reduce_rows(gen_action[s] @ out[h], factors)
                    done[y] = True
                    nxt.append(y)
        frontier = nxt
    return out


def _reduce_rows(m: np.ndarray, factors) -> np.ndarray:
    m = np.array(m, dtype=np.int64)
    for i, d in enumerate(factors):
        if d:
            m[..., i, :] %= d
    return m


# --------------------------------------------------------------------------
# modules


class GModule:
    """Abelian group Z^r / diag(factors) with a left action of ``group``.

    ``action`` is a (|G|, r, r) array, a dict over all elements or over a
    generating set, or (for untabulated groups) a callable g -> matrix.
    """

    def __init__(self, group: Group, factors: Sequence[int], action, verify: bool = True, spot_checks: int = 64):
        self.group = group
        self.factors = tuple(int(d) for d in factors)
        if any(d < 0 for d in self.factors):
            raise ValueError("factors must be nonnegative")
        r = self.rank
        self._fn: Callable | None = None
        if callable(action) and not isinstance(group, FiniteGroup):
            self._fn = action
            self.matrices = None
        elif callable(action):
            self.matrices = np.array([np.array(action(g), dtype=np.int64).reshape(r, r) for g in range(group.order)],
                                     dtype=np.int64).reshape(group.order, r, r)
        elif isinstance(action, np.ndarray):
            self.matrices = np.array(action, dtype=np.int64).reshape(group.order, r, r)
        else:
            d = {int(k): np.array(v, dtype=np.int64).reshape(r, r) for k, v in dict(action).items()}
            if len(d) == group.order:
                self.matrices = np.array([d[g] for g in range(group.order)], dtype=np.int64).reshape(group.order, r, r)
            else:
                self.matrices = extend_on_generators(group, self.factors, d)
        if self.matrices is not None:
            self.matrices = _reduce_rows(self.matrices, self.factors)
        if verify:
            self._verify(spot_checks)

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def order(self) -> int | None:
        if any(d == 0 for d in self.factors):
            return None
        return int(np.prod(self.factors)) if self.factors else 1

    def matrix(self, g: int) -> np.ndarray:
        if self.matrices is not None:
            return self.matrices[g]
        return _reduce_rows(np.array(self._fn(g), dtype=np.int64).reshape(self.rank, self.rank), self.factors)

    def reduce(self, v) -> tuple[int, ...]:
        return tuple(int(x) % d if d else int(x) for x, d in zip(v, self.factors))

    def act(self, g: int, v) -> tuple[int, ...]:
        return self.reduce(self.matrix(g) @ np.array(v, dtype=np.int64))

    def _valid_matrix(self, m) -> bool:
        f = self.factors
        for i, di in enumerate(f):
            for j, dj in enumerate(f):
                if dj == 0:
                    continue
                if di == 0:
                    if m[i][j]:
                        return False
                elif (int(m[i][j]) * dj) % di:
                    return False
        return True

    def _verify(self, spot_checks):
        G = self.group
        if self.matrices is not None:
            if not all(self._valid_matrix(self.matrices[s]) for s in G.generators):
                raise GroupLawError("action matrix not well defined modulo the factors")
            e = _reduce_rows(np.eye(self.rank, dtype=np.int64), self.factors)
            if not (self.matrices[G.identity] == e).all():
                raise GroupLawError("identity does not act trivially")
            for s in G.generators:
                prod = _reduce_rows(np.einsum("ij,njk->nik", self.matrices[s], self.matrices), self.factors)
                if not (prod == self.matrices[G.table[s]]).all():
                    raise GroupLawError("action is not a homomorphism")
            return
        rng = np.random.default_rng(0)
        pairs = [(s, t) for s in G.generators for t in G.generators]
        pairs += [tuple(int(x) for x in rng.integers(0, G.order, 2)) for _ in range(spot_checks)]
        for g, h in pairs:
            lhs = self.matrix(G.mul(g, h))
            rhs = _reduce_rows(self.matrix(g) @ self.matrix(h), self.factors)
            if not (lhs == rhs).all():
                raise GroupLawError("action is not a homomorphism")

    def restrict(self, sub: FiniteGroup, embedding: Sequence[int]) -> GModule:
        return GModule(sub, self.factors, np.array([self.matrix(g) for g in embedding]))

    def to_json(self) -> dict:
        G = self.group
        elems = range(G.order) if self.matrices is not None else G.generators
        return {
            "factors": [str(d) for d in self.factors],
            "action": {str(g): [[str(int(x)) for x in row] for row in self.matrix(g)] for g in elems},
        }

    @classmethod
    def from_json(cls, group: FiniteGroup, obj: dict) -> GModule:
        act = {int(k): [[int(x) for x in row] for row in v] for k, v in obj["action"].items()}
        return cls(group, [int(d) for d in obj["factors"]], act)


def trivial_module(G: Group, factors: Sequence[int]) -> GModule:
    r = len(factors)
    if isinstance(G, FiniteGroup):
        return GModule(G, factors, np.broadcast_to(np.eye(r, dtype=np.int64), (G.order, r, r)).copy())
    return GModule(G, factors, lambda g: np.eye(r, dtype=np.int64))


def character_module(G: Group, q: int, chi: Callable[[int], int]) -> GModule:
    """Z/q with g acting by multiplication by the unit chi(g)."""
    if isinstance(G, FiniteGroup):
        return GModule(G, [q], np.array([[[chi(g) % q]] for g in range(G.order)], dtype=np.int64))
    return GModule(G, [q], lambda g: [[chi(g) % q]])


def direct_sum(*mods: GModule) -> GModule:
    G = mods[0].group
    factors = [d for m in mods for d in m.factors]
    r = len(factors)

    def mat(g):
        out = np.zeros((r, r), dtype=np.int64)
        o = 0
        for m in mods:
            out[o : o + m.rank, o : o + m.rank] = m.matrix(g)
            o += m.rank
        return out

    if isinstance(G, FiniteGroup):
        return GModule(G, factors, np.array([mat(g) for g in range(G.order)]).reshape(G.order, r, r))
    return GModule(G, factors, mat)


def cyclotomic_character(G: Group) -> Callable[[int], int]:
    """Image in (Z/q)^x for the unit group and for semidirect products over it."""
    sd = G.structure
    if isinstance(sd, Semidirect):
        Q = sd.Q
        return lambda g: int(Q.label(sd.decode(g)[1]))
    if isinstance(sd, tuple) and sd[0] == "units":
        return lambda g: int(G.label(g))
    raise ValueError("group has no cyclotomic character")


def twist_module(G: Group, q: int, j: int) -> GModule:
    """mu_q^{(x) j}: Z/q with g acting through chi_cyc(g)^j."""
    chi = cyclotomic_character(G)
    e = j % euler_phi(q) if q > 2 else 0
    return character_module(G, q, lambda g: pow(chi(g), e, q))
