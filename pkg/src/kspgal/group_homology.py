"""Homology of finite groups with coefficients, in degrees 0, 1, 2.

Chains live in the normalized bar complex: C_n has one copy of M for each
cell [g_1|...|g_n] with all g_i != e, and

    d[g] m       = g m - m
    d[g|h] m     = [g] h m - [gh] m + [h] m
    d[g|h|k] m   = [g|h] k m - [g|hk] m + [gh|k] m - [h|k] m.

Rather than eliminating the full complex, chains are first pushed onto
cells whose first entry is a generator.  Fix a spanning tree of the Cayley
graph (left multiplication by generators).  For a tree edge x = s g the
boundary of [s|g] (resp. [s|g|h]) rewrites [x] (resp. [x|h]) through cells
with shorter first entry, so every chain is homologous to one supported on
generator cells.  The images of boundaries of cells [s|...] with s a
generator span all boundaries (induct on word length with d d = 0), which
gives a small presentation of H_d.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .groups import FiniteGroup, GModule, Group, GroupLawError, Semidirect, _reduce_rows
from .smith import Subquotient, subquotient

# cell budgets |G|^max(d,1) * rank(M); the defaults admit |G| <= 1500 in
# degree <= 1 and |G| <= 60 in degree 2 for modules of rank <= 8
DEFAULT_BUDGET = {0: 1500 * 8, 1: 1500 * 8, 2: 60 * 60 * 8}


class BudgetExceeded(RuntimeError):
    pass


class HypothesisError(ValueError):
    """The shortcut's hypotheses fail; fall back to the bar complex."""


Chain = Mapping  # cell (tuple of group elements) -> module vector


@dataclass
class HomologyGroup:
    degree: int
    factors: list[int]  # invariant factors, 0 = Z, trivial ones dropped
    generators: list[dict]  # representative cycles
    relative_to: tuple[int, ...] | None = None
    _ctx: object = field(default=None, repr=False)

    @property
    def order(self) -> int | None:
        if any(d == 0 for d in self.factors):
            return None
        out = 1
        for d in self.factors:
            out *= d
        return out

    def is_zero(self) -> bool:
        return not self.factors

    def reduce(self, z) -> list[int]:
        return reduce_cycle(z, self)

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "factors": [str(d) for d in self.factors],
            "relative_to": None if self.relative_to is None else list(self.relative_to),
            "generators": [_chain_to_json(z) for z in self.generators],
        }


def _chain_to_json(z) -> list:
    return [[list(cell), [str(x) for x in m]] for cell, m in sorted(z.items())]


# --------------------------------------------------------------------------
# spanning tree


@dataclass
class _Tree:
    gens: list[int]
    parent: np.ndarray  # g = gens[edge[g]] * parent[g]
    edge: np.ndarray
    order: list[int]  # BFS order starting at e


def _tree(G: FiniteGroup) -> _Tree:
    gens = [s for s in dict.fromkeys(G.generators) if s != G.identity]
    n = G.order
    parent = np.full(n, -1, dtype=np.int64)
    edge = np.full(n, -1, dtype=np.int64)
    seen = np.zeros(n, dtype=bool)
    seen[G.identity] = True
    order = [G.identity]
    # generators hang directly off the identity so that cells [s] are fixed
    for i, s in enumerate(gens):
        if not seen[s]:
            seen[s] = True
            parent[s], edge[s] = G.identity, i
            order.append(s)
    head = 1
    while head < len(order):
        h = order[head]
        head += 1
        for i, s in enumerate(gens):
            y = int(G.table[s, h])
            if not seen[y]:
                seen[y] = True
                parent[y], edge[y] = h, i
                order.append(y)
    if len(order) != n:
        raise GroupLawError("generators do not generate")
    return _Tree(gens, parent, edge, order)


def _path(tree: _Tree, x: int, e: int) -> list[tuple[int, int]]:
    """[(s_index, g)] with x = s_1 g_1, g_1 = s_2 g_2, ..., reaching e."""
    out = []
    while x != e:
        g = int(tree.parent[x])
        out.append((int(tree.edge[x]), g))
        x = g
    return out


# --------------------------------------------------------------------------
# contexts


@dataclass
class _Ctx:
    G: FiniteGroup
    M: GModule
    degree: int
    H: tuple[int, ...] | None
    tree: _Tree | None
    sq: Subquotient
    rho: object  # chain -> ambient vector
    boundary: object  # chain -> boundary (dict) or None for relative
    to_chain: object  # ambient vector -> chain


def _budget_check(G: Group, M: GModule, d: int, budget):
    b = dict(DEFAULT_BUDGET)
    if budget is not None:
        b.update(budget if isinstance(budget, dict) else {d: budget})
    cells = G.order ** max(d, 1) * max(M.rank, 1)
    if b.get(d) is not None and cells > b[d]:
        raise BudgetExceeded(f"degree {d} needs {cells} cells, budget {b[d]}")
    if not isinstance(G, FiniteGroup):
        raise BudgetExceeded("group has no multiplication table")


def _mods(M: GModule, copies: int) -> list[int]:
    return list(M.factors) * copies


def bar_homology(G: FiniteGroup, M: GModule, d: int, budget=None, engine: str = "auto") -> HomologyGroup:
    """H_d(G; M) for d in {0, 1, 2}."""
    if M.group is not G:
        raise ValueError("module is over a different group")
    if d not in (0, 1, 2):
        raise ValueError("degree must be 0, 1 or 2")
    _budget_check(G, M, d, budget)
    if d == 0:
        ctx = _h0(G, M, None, engine)
    elif d == 1:
        ctx = _h1(G, M, None, engine)
    else:
        ctx = _h2(G, M, engine)
    return _finish(ctx)


def relative_bar_homology(G: FiniteGroup, H: Sequence[int], M: GModule, d: int = 1, budget=None,
                          engine: str = "auto") -> HomologyGroup:
    """H_d(G, H; M), the homology of C(G; M) / C(H; M), for d in {0, 1}."""
    if M.group is not G:
        raise ValueError("module is over a different group")
    H = tuple(sorted(set(int(h) for h in H)))
    if not G.is_subgroup(H):
        raise GroupLawError("H is not a subgroup")
    if d not in (0, 1):
        raise ValueError("relative homology is implemented in degrees 0 and 1")
    _budget_check(G, M, d, budget)
    if d == 0:
        ctx = _Ctx(G, M, 0, H, None, subquotient([]), lambda z: [], None, lambda x: {})
    else:
        ctx = _h1(G, M, H, engine)
    return _finish(ctx)


def _finish(ctx: _Ctx) -> HomologyGroup:
    gens = [ctx.to_chain(g) for g in ctx.sq.gens]
    return HomologyGroup(ctx.degree, list(ctx.sq.factors), gens, ctx.H, ctx)


def _vec(m, r):
    v = np.zeros(r, dtype=np.int64)
    v[: len(m)] = [int(x) for x in m]
    return v


# degree 0 -------------------------------------------------------------------


def _h0(G, M, H, engine) -> _Ctx:
    r = M.rank
    eye = np.eye(r, dtype=np.int64)
    rel = []
    for s in G.generators:
        A = M.matrix(s) - eye
        rel.extend(A[:, i].tolist() for i in range(r))
    sq = subquotient(M.factors, rel=rel, engine=engine)

    def rho(z):
        v = np.zeros(r, dtype=object)
        for cell, m in z.items():
            if tuple(cell) != ():
                raise ValueError("0-chains live on the empty cell ()")
            v += _vec(m, r)
        return [int(x) for x in v]

    return _Ctx(G, M, 0, H, None, sq, rho, None, lambda x: {(): M.reduce(x)})


# degree 1 -------------------------------------------------------------------


def _fox1(G: FiniteGroup, M: GModule, tree: _Tree) -> np.ndarray:
    """R[g] with g (x) m homologous to sum_s [s] (x) (block_s of R[g] m)."""
    n, r, S = G.order, M.rank, len(tree.gens)
    R = np.zeros((n, S * r, r), dtype=np.int64)
    mods = _mods(M, S)
    for g in tree.order[1:]:
        h, i = int(tree.parent[g]), int(tree.edge[g])
        Rg = R[h].copy()
        Rg[i * r : (i + 1) * r] += M.matrix(h)
        R[g] = _reduce_rows(Rg, mods)
    return R


def _h1(G, M, H, engine) -> _Ctx:
    tree = _tree(G)
    n, r, S = G.order, M.rank, len(tree.gens)
    R = _fox1(G, M, tree)
    mods = _mods(M, S)
    rel = []
    for i, s in enumerate(tree.gens):
        blk = R - R[G.table[s]]  # (n, S r, r): R[h] - R[s h]
        blk[:, i * r : (i + 1) * r, :] += M.matrices
        blk = _reduce_rows(blk, mods)
        cols = blk.transpose(0, 2, 1).reshape(-1, S * r)
        rel.append(cols)
    if H is not None:
        hs = [h for h in H if h != G.identity]
        if hs:
            rel.append(_reduce_rows(R[hs], mods).transpose(0, 2, 1).reshape(-1, S * r))
    rel = np.concatenate(rel) if rel else np.zeros((0, S * r), dtype=np.int64)
    rel = np.unique(rel[rel.any(axis=1)], axis=0)
    if H is None:
        eye = np.eye(r, dtype=np.int64)
        F = np.concatenate([M.matrix(s) - eye for s in tree.gens], axis=1) if S else np.zeros((r, 0), dtype=np.int64)
        F = _reduce_rows(F, M.factors).tolist()
        sq = subquotient(mods, F, M.factors, rel.tolist(), engine=engine)
    else:
        sq = subquotient(mods, rel=rel.tolist(), engine=engine)

    def rho(z):
        v = np.zeros(S * r, dtype=object)
        for cell, m in z.items():
            (g,) = _cell(cell, 1)
            v += R[g].astype(object) @ _vec(m, r).astype(object)
        return [int(x) % d if d else int(x) for x, d in zip(v, mods)]

    def boundary(z):
        out = np.zeros(r, dtype=object)
        for cell, m in z.items():
            (g,) = _cell(cell, 1)
            mv = _vec(m, r).astype(object)
            out += M.matrix(g).astype(object) @ mv - mv
        return {(): M.reduce(out)}

    def to_chain(x):
        z = {}
        for i, s in enumerate(tree.gens):
            m = M.reduce(x[i * r : (i + 1) * r])
            if any(m):
                z[(s,)] = m
        return z

    return _Ctx(G, M, 1, H, tree, sq, rho, None if H is not None else boundary, to_chain)


def _cell(cell, d):
    if isinstance(cell, (int, np.integer)):
        cell = (int(cell),)
    cell = tuple(int(c) for c in cell)
    if len(cell) != d:
        raise ValueError(f"expected a cell with {d} entries, got {cell}")
    return cell


# degree 2 -------------------------------------------------------------------


def _h2(G, M, engine) -> _Ctx:
    tree = _tree(G)
    n, r, S, e = G.order, M.rank, len(tree.gens), G.identity
    T = G.table
    ne = [g for g in range(n) if g != e]
    pos = np.full(n, -1, dtype=np.int64)
    pos[ne] = np.arange(n - 1)
    D = S * (n - 1) * r  # ambient: cells [s|y] (x) M
    mods = _mods(M, S * (n - 1))

    def cell_index(i, y):  # first coordinate of block [s_i|y]
        return (i * (n - 1) + int(pos[y])) * r

    # P[x, h] : D x r, [x|h] m homologous to P[x, h] m on generator cells
    P = np.zeros((n, n, D, r), dtype=np.int64)
    for x in tree.order[1:]:
        g, i = int(tree.parent[x]), int(tree.edge[x])
        Px = P[g].copy()
        for h in ne:
            gh = int(T[g, h])
            if gh != e:
                c = cell_index(i, gh)
                Px[h, c : c + r, :] += np.eye(r, dtype=np.int64)
            if g != e:
                c = cell_index(i, g)
                Px[h, c : c + r, :] -= M.matrix(h)
        Px[e] = 0
        P[x] = _reduce_rows(Px, mods)

    rels = []
    for i, s in enumerate(tree.gens):
        for g in ne:
            sg = int(T[s, g])
            blk = P[sg] - P[g]  # (n, D, r) over h
            c = cell_index(i, g)
            blk[:, c : c + r, :] += M.matrices
            for h in ne:
                gh = int(T[g, h])
                if gh != e:
                    c2 = cell_index(i, gh)
                    blk[h, c2 : c2 + r, :] -= np.eye(r, dtype=np.int64)
            blk[e] = 0
            blk = _reduce_rows(blk, mods)
            rels.append(blk.transpose(0, 2, 1).reshape(-1, D))
    rel = np.concatenate(rels) if rels else np.zeros((0, D), dtype=np.int64)
    rel = np.unique(rel[rel.any(axis=1)], axis=0)

    # boundary of generator cells into normalized C_1 (cells g != e)
    F = np.zeros(((n - 1) * r, D), dtype=np.int64)
    eye = np.eye(r, dtype=np.int64)
    for i, s in enumerate(tree.gens):
        for y in ne:
            c = cell_index(i, y)
            ps = int(pos[s]) * r
            F[ps : ps + r, c : c + r] += M.matrix(y)
            sy = int(T[s, y])
            if sy != e:
                q = int(pos[sy]) * r
                F[q : q + r, c : c + r] -= eye
            q = int(pos[y]) * r
            F[q : q + r, c : c + r] += eye
    F = _reduce_rows(F, _mods(M, n - 1))
    sq = subquotient(mods, F.tolist(), _mods(M, n - 1), rel.tolist(), engine=engine)

    def rho(z):
        v = np.zeros(D, dtype=object)
        for cell, m in z.items():
            x, h = _cell(cell, 2)
            if x == e or h == e:
                continue
            v += P[x, h].astype(object) @ _vec(m, r).astype(object)
        return [int(a) % d if d else int(a) for a, d in zip(v, mods)]

    def boundary(z):
        out: dict = {}
        for cell, m in z.items():
            x, h = _cell(cell, 2)
            if x == e or h == e:
                continue
            mv = _vec(m, r)
            for g, w in (((x,), M.matrix(h) @ mv), ((int(T[x, h]),), -mv), ((h,), mv)):
                if g[0] == e:
                    continue
                out[g] = out.get(g, 0) + np.asarray(w, dtype=object)
        out = {g: M.reduce(w) for g, w in out.items()}
        return {g: w for g, w in out.items() if any(w)}

    def to_chain(x):
        z = {}
        for i, s in enumerate(tree.gens):
            for y in ne:
                c = cell_index(i, y)
                m = M.reduce(x[c : c + r])
                if any(m):
                    z[(s, y)] = m
        return z

    return _Ctx(G, M, 2, None, tree, sq, rho, boundary, to_chain)


# --------------------------------------------------------------------------
# cycles


def _normalize_chain(z, d) -> dict:
    if isinstance(z, Mapping):
        items = z.items()
    else:
        items = z
    out: dict = {}
    for cell, m in items:
        c = _cell(cell, d) if d else ()
        out[c] = out.get(c, 0) + np.asarray([int(x) for x in m], dtype=object)
    return out


def reduce_cycle(z, hg: HomologyGroup) -> list[int]:
    """Coordinates of the class of the cycle z in the invariant-factor basis
    of ``hg``; chains are dicts cell -> module vector (cells are tuples)."""
    ctx: _Ctx = hg._ctx
    if ctx is None:
        raise ValueError("homology group carries no reduction data")
    z = _normalize_chain(z, ctx.degree)
    if ctx.degree == 0 and ctx.H is not None:
        return []
    if ctx.boundary is not None:
        b = ctx.boundary(z)
        if any(any(v) for v in b.values()):
            raise ValueError("chain is not a cycle")
    return ctx.sq.coords(ctx.rho(z))


def chain_boundary(G: FiniteGroup, M: GModule, w, d: int) -> dict:
    """Boundary of a d-chain (d = 1, 2, 3) in the normalized complex."""
    w = _normalize_chain(w, d)
    e, T = G.identity, G.table
    out: dict = {}

    def add(cell, m):
        if any(c == e for c in cell):
            return
        out[cell] = out.get(cell, 0) + np.asarray(m, dtype=object)

    for cell, m in w.items():
        if any(c == e for c in cell):
            continue
        mv = np.asarray(m, dtype=object)
        if d == 1:
            add((), M.matrix(cell[0]).astype(object) @ mv - mv)
        elif d == 2:
            g, h = cell
            add((g,), M.matrix(h).astype(object) @ mv)
            add((int(T[g, h]),), -mv)
            add((h,), mv)
        elif d == 3:
            g, h, k = cell
            add((g, h), M.matrix(k).astype(object) @ mv)
            add((g, int(T[h, k])), -mv)
            add((int(T[g, h]), k), mv)
            add((h, k), -mv)
        else:
            raise ValueError("d must be 1, 2 or 3")
    out = {c: M.reduce(v) for c, v in out.items()}
    return {c: v for c, v in out.items() if any(v)}


def add_chains(*zs) -> dict:
    out: dict = {}
    for z in zs:
        for c, m in z.items():
            out[c] = out.get(c, 0) + np.asarray([int(x) for x in m], dtype=object)
    return {c: tuple(int(x) for x in v) for c, v in out.items()}


# --------------------------------------------------------------------------
# coinvariants and the metabelian shortcut


def coinvariants(M: GModule, elements: Sequence[int] | None = None) -> Subquotient:
    """M modulo the span of (g - 1) m over ``elements`` (default: generators)."""
    G = M.group
    elements = G.generators if elements is None else elements
    r = M.rank
    eye = np.eye(r, dtype=np.int64)
    rel = []
    for g in elements:
        A = M.matrix(g) - eye
        rel.extend(A[:, i].tolist() for i in range(r))
    return subquotient(M.factors, rel=rel)


def _is_bijective(M: GModule, A: np.ndarray) -> bool:
    if M.order is None:
        return False
    ker = subquotient(M.factors, _reduce_rows(A, M.factors).tolist(), M.factors)
    return ker.order is not None and ker.order == 1


def center_kills_element(G: Group, M: GModule) -> int | None:
    """A central element z of the complement Q with z - 1 invertible on M."""
    sd = G.structure
    Q = sd.Q
    eye = np.eye(M.rank, dtype=np.int64)
    for z in Q.center():
        if _is_bijective(M, M.matrix(sd.complement(z)) - eye):
            return z
    return None


def hs_shortcut_h1(G: Group, M: GModule, H: Sequence[int] | None = None) -> HomologyGroup:
    """H_1(G; M) = (A (x) M)_Q for G = A x| Q when A acts trivially on M and
    some central z in Q has z - 1 invertible on M.

    With H (a subgroup of the complement), the relative group H_1(G, H; M)
    is returned; this additionally requires H_0(H; M) = H_1(H; M) = 0, in
    which case the long exact sequence identifies it with H_1(G; M).
    """
    sd = G.structure
    if not isinstance(sd, Semidirect):
        raise HypothesisError("group is not tagged as a semidirect product")
    if M.order is None:
        raise HypothesisError("module must be finite")
    eye = np.eye(M.rank, dtype=np.int64)
    for a in sd.A_generators():
        if not (M.matrix(a) == _reduce_rows(eye, M.factors)).all():
            raise HypothesisError("A does not act trivially on M")
    z = center_kills_element(G, M)
    if z is None:
        raise HypothesisError("no central element of Q acts without fixed points")
    if H is not None:
        _check_h_vanishing(G, M, H)
    Q = sd.Q
    ra, rm = len(sd.A_factors), M.rank
    tf = [int(np.gcd(a, m)) for a in sd.A_factors for m in M.factors]
    rel = []
    for x in Q.generators:
        K = np.kron(sd.action[x], M.matrix(sd.complement(x))) - np.eye(ra * rm, dtype=np.int64)
        K = _reduce_rows(K, tf)
        rel.extend(K[:, i].tolist() for i in range(ra * rm))
    sq = subquotient(tf, rel=rel)

    def to_chain(x):
        z: dict = {}
        for i in range(ra):
            m = M.reduce([int(x[i * rm + j]) for j in range(rm)])
            if any(m):
                cell = (sd.encode([int(k == i) for k in range(ra)], Q.identity),)
                z[cell] = m
        return z

    gens = [to_chain(g) for g in sq.gens]
    return HomologyGroup(1, list(sq.factors), gens, None if H is None else tuple(sorted(H)), None)


def _check_h_vanishing(G, M, H):
    if not isinstance(G, FiniteGroup):
        # H is small; build it from the law directly
        Hs = sorted(set(int(h) for h in H))
        if not G.is_subgroup(Hs):
            raise GroupLawError("H is not a subgroup")
        pos = {g: i for i, g in enumerate(Hs)}
        sub = FiniteGroup([[pos[G.mul(a, b)] for b in Hs] for a in Hs], identity=pos[G.identity])
        MH = GModule(sub, M.factors, np.array([M.matrix(g) for g in Hs]))
    else:
        sub, emb = G.subgroup(H)
        MH = M.restrict(sub, emb)
    if not (bar_homology(sub, MH, 0).is_zero() and bar_homology(sub, MH, 1).is_zero()):
        raise HypothesisError("H_0(H; M) or H_1(H; M) is nonzero")


# --------------------------------------------------------------------------
# oracle: the full (unnormalized) bar complex


def naive_bar_homology(G: FiniteGroup, M: GModule, d: int, H: Sequence[int] | None = None,
                       max_cells: int = 5000) -> list[int]:
    """Invariant factors of H_d(G[, H]; M) from the full bar complex by
    dense integer linear algebra.  Only for tiny groups."""
    import itertools

    n, r = G.order, M.rank
    Hs = set(H) if H is not None else None

    def cells(k):
        cs = list(itertools.product(range(n), repeat=k))
        if Hs is not None:
            cs = [c for c in cs if not all(x in Hs for x in c)]
        return cs

    Cd, Cd1, Cdm = cells(d), cells(d + 1), cells(d - 1) if d > 0 else []
    if (len(Cd) + len(Cd1)) * r > max_cells:
        raise BudgetExceeded("oracle too large")
    idx = {c: i for i, c in enumerate(Cd)}
    idxm = {c: i for i, c in enumerate(Cdm)}

    def faces(cell):
        # (coefficient sign, face cell, module matrix or None)
        k = len(cell)
        out = []
        for i in range(k + 1):
            sign = (-1) ** (k - i)
            if i == 0:
                out.append((sign, cell[1:], None))
            elif i == k:
                out.append((sign, cell[:-1], cell[-1]))
            else:
                out.append((sign, cell[: i - 1] + (int(G.table[cell[i - 1], cell[i]]),) + cell[i + 1 :], None))
        return out

    def column(cell, j, target_idx):
        v = [0] * (len(target_idx) * r)
        for sign, face, g in faces(cell):
            if face not in target_idx:
                continue
            base = target_idx[face] * r
            col = M.matrix(g)[:, j] if g is not None else np.eye(r, dtype=np.int64)[:, j]
            for t in range(r):
                v[base + t] += sign * int(col[t])
        return v

    mods_d = list(M.factors) * len(Cd)
    rel = [column(c, j, idx) for c in Cd1 for j in range(r)]
    if d > 0 and Cdm:
        cols = [column(c, j, idxm) for c in Cd for j in range(r)]
        F = [list(row) for row in zip(*cols)]
        dY = list(M.factors) * len(Cdm)
    else:
        F, dY = [], []
    F = [[x % m if m else x for x in row] for row, m in zip(F, dY)]
    rel = [[x % m if m else x for x, m in zip(v, mods_d)] for v in rel]
    return subquotient(mods_d, F, dY, rel, engine="int").factors
