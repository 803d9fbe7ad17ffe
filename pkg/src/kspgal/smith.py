"""Smith normal forms and subquotients of finitely generated abelian groups.

Two independent engines are provided:

* an integer engine on Python ints (handles free summands, used for small
  problems and as an oracle), and
* a prime-power engine on numpy arrays over Z/p^E, used for finite groups.

Abelian groups are written ``Z^k / diag(d)``; a factor ``d_i = 0`` means a
free summand.  Vectors are columns; matrices are lists of rows (integer
engine) or 2-d arrays (modular engine).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exact_arith import factorize

# largest modulus for which products of two residues fit in int64
_INT64_SAFE = 3_000_000_000


# --------------------------------------------------------------------------
# integer Smith normal form


@dataclass
class SmithForm:
    """``U @ A @ V == D`` with U, V unimodular; ``Uinv``/``Vinv`` are the inverses.

    Hence ``A == Uinv @ D @ Vinv``.  V and Vinv are None when column
    transforms were not requested.
    """

    D: list[list[int]]
    U: list[list[int]]
    Uinv: list[list[int]]
    V: list[list[int]] | None
    Vinv: list[list[int]] | None

    @property
    def diagonal(self) -> list[int]:
        n = min(len(self.D), len(self.D[0]) if self.D else 0)
        return [self.D[i][i] for i in range(n)]


def _eye(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a, b):
    if not a:
        return []
    bt = list(zip(*b)) if b else []
    if not bt:
        return [[] for _ in a]
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def smith_normal_form(a: Sequence[Sequence[int]], columns: bool = True, check: bool = True) -> SmithForm:
    """Smith normal form over Z with transforms.

    Diagonal entries are nonnegative and each divides the next.  Pivots are
    chosen by minimal absolute value.  With ``check`` the identities
    U A V = D and Uinv D Vinv = A are verified exactly.
    """
    A = [list(map(int, r)) for r in a]
    m = len(A)
    n = len(A[0]) if m else 0
    U, Ui = _eye(m), _eye(m)
    V = _eye(n) if columns else None
    Vi = _eye(n) if columns else None

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]
        for r in Ui:
            r[i], r[j] = r[j], r[i]

    def swap_cols(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        if columns:
            for r in V:
                r[i], r[j] = r[j], r[i]
            Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_row(dst, src, c):  # row_dst += c * row_src
        if not c:
            return
        A[dst] = [x + c * y for x, y in zip(A[dst], A[src])]
        U[dst] = [x + c * y for x, y in zip(U[dst], U[src])]
        for r in Ui:
            r[src] -= c * r[dst]

    def add_col(dst, src, c):  # col_dst += c * col_src
        if not c:
            return
        for r in A:
            r[dst] += c * r[src]
        if columns:
            for r in V:
                r[dst] += c * r[src]
            Vi[src] = [x - c * y for x, y in zip(Vi[src], Vi[dst])]

    def neg_row(i):
        A[i] = [-x for x in A[i]]
        U[i] = [-x for x in U[i]]
        for r in Ui:
            r[i] = -r[i]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                x = A[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            dirty = False
            p = A[t][t]
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
                    dirty = dirty or A[i][t] != 0
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    dirty = dirty or A[t][j] != 0
            if dirty:
                # move the smallest nonzero remainder into the pivot
                cands = [(abs(A[i][t]), i, t) for i in range(t, m) if A[i][t]]
                cands += [(abs(A[t][j]), t, j) for j in range(t, n) if A[t][j]]
                _, i, j = min(cands)
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            neg_row(t)

    out = SmithForm(A, U, Ui, V, Vi)
    if check:
        _check_smith(a, out)
    return out


def _check_smith(a, s: SmithForm):
    a = [list(map(int, r)) for r in a]
    m = len(a)
    n = len(a[0]) if m else 0
    if matmul(s.U, s.Uinv) != _eye(m):
        raise ArithmeticError("row transform is not unimodular")
    if s.V is not None:
        if matmul(s.V, s.Vinv) != _eye(n):
            raise ArithmeticError("column transform is not unimodular")
        if matmul(matmul(s.U, a), s.V) != s.D:
            raise ArithmeticError("U A V != D")
        if matmul(matmul(s.Uinv, s.D), s.Vinv) != a:
            raise ArithmeticError("Uinv D Vinv != A")
    diag = s.diagonal
    off = any(s.D[i][j] for i in range(m) for j in range(n) if i != j)
    if off:
        raise ArithmeticError("Smith form is not diagonal")
    for x, y in zip(diag, diag[1:]):
        if x == 0 and y != 0 or (x and y % x):
            raise ArithmeticError("diagonal entries do not divide in sequence")


# --------------------------------------------------------------------------
# integer lattices


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


class EchelonLattice:
    """Sublattice of Z^k kept as an echelon basis (one vector per pivot row,
    zeros above the pivot, positive pivot)."""

    def __init__(self, k: int):
        self.k = k
        self.rows: dict[int, list[int]] = {}

    def add(self, x: Sequence[int]) -> None:
        x = list(map(int, x))
        for r in range(self.k):
            if not x[r]:
                continue
            b = self.rows.get(r)
            if b is None:
                if x[r] < 0:
                    x = [-v for v in x]
                self.rows[r] = self._size_reduce(x, r + 1)
                return
            g, s, t = _xgcd(b[r], x[r])
            if x[r] % b[r] == 0:
                c = x[r] // b[r]
                x = [xv - c * bv for xv, bv in zip(x, b)]
                x = self._size_reduce(x, r + 1)
                continue
            nb = [s * bv + t * xv for bv, xv in zip(b, x)]
            u, w = b[r] // g, x[r] // g
            x = [u * xv - w * bv for xv, bv in zip(x, b)]
            if nb[r] < 0:
                nb = [-v for v in nb]
            self.rows[r] = self._size_reduce(nb, r + 1)
            x = self._size_reduce(x, r + 1)
        # x reduced to zero

    def _size_reduce(self, x: list[int], start: int) -> list[int]:
        # subtract lattice rows so entries at later pivot columns lie in
        # [0, pivot); keeps coefficients from growing during elimination
        for j in range(start, self.k):
            b = self.rows.get(j)
            if b is None or not x[j]:
                continue
            c = x[j] // b[j]
            if c:
                x = [xv - c * bv for xv, bv in zip(x, b)]
        return x

    def basis(self) -> list[list[int]]:
        return [self.rows[r] for r in sorted(self.rows)]

    def solve(self, x: Sequence[int]) -> list[int] | None:
        """Coefficients of x in ``basis()`` or None if x is not in the lattice."""
        x = list(map(int, x))
        piv = sorted(self.rows)
        coef = []
        for r in piv:
            b = self.rows[r]
            if any(x[i] for i in range(r)):
                return None
            if x[r] % b[r]:
                return None
            c = x[r] // b[r]
            coef.append(c)
            if c:
                x = [xv - c * bv for xv, bv in zip(x, b)]
        if any(x):
            return None
        return coef


def lattice_kernel(F: Sequence[Sequence[int]], k: int, mods: Sequence[int]) -> list[list[int]]:
    """Generators of {x in Z^k : F x = 0 modulo diag(mods)}."""
    l = len(F)
    if l == 0:
        return _eye(k)
    aug = [list(map(int, F[i])) + [mods[i] if i == j else 0 for j in range(l)] for i in range(l)]
    s = smith_normal_form(aug, columns=True, check=False)
    rank = sum(1 for d in s.diagonal if d)
    nc = k + l
    return [[s.V[r][c] for r in range(k)] for c in range(rank, nc)]


# --------------------------------------------------------------------------
# modular Smith normal form over Z/p^E


def _val(x: int, p: int, E: int) -> int:
    if x == 0:
        return E
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def _dtype(P: int):
    return np.int64 if P < _INT64_SAFE else object


@dataclass
class ModSmith:
    vals: list[int]  # p-adic valuations of the diagonal (E means zero)
    U: np.ndarray | None
    Uinv: np.ndarray | None
    V: np.ndarray | None


def mod_smith(A: np.ndarray, p: int, E: int, rows: bool = True, cols: bool = False) -> ModSmith:
    """Smith form of an integer matrix over Z/p^E.

    Pivots are entries of minimal valuation, which over this local ring
    already yields the divisibility chain.  U A V = diag(p^vals) mod p^E.
    """
    P = p**E
    dt = _dtype(P)
    A = np.array(A, dtype=dt) % P
    m, n = A.shape
    U = np.eye(m, dtype=dt) if rows else None
    Ui = np.eye(m, dtype=dt) if rows else None
    V = np.eye(n, dtype=dt) if cols else None
    vals: list[int] = []
    pk = [p**i for i in range(E + 1)]
    for t in range(min(m, n)):
        sub = A[t:, t:]
        if not sub.any():
            break
        v = next(i for i in range(E) if (sub % pk[i + 1]).any())
        idx = np.argwhere(sub % pk[v + 1] != 0)[0]
        i, j = int(idx[0]) + t, int(idx[1]) + t
        if i != t:
            A[[t, i]] = A[[i, t]]
            if rows:
                U[[t, i]] = U[[i, t]]
                Ui[:, [t, i]] = Ui[:, [i, t]]
        if j != t:
            A[:, [t, j]] = A[:, [j, t]]
            if cols:
                V[:, [t, j]] = V[:, [j, t]]
        unit = int(A[t, t]) // pk[v]
        uinv = pow(unit, -1, P)
        A[t] = (A[t] * uinv) % P
        if rows:
            U[t] = (U[t] * uinv) % P
            Ui[:, t] = (Ui[:, t] * unit) % P
        f = A[t + 1 :, t] // pk[v]
        if f.any():
            A[t + 1 :] = (A[t + 1 :] - np.outer(f, A[t]) % P) % P
            if rows:
                U[t + 1 :] = (U[t + 1 :] - np.outer(f, U[t]) % P) % P
                Ui[:, t] = (Ui[:, t] + ((Ui[:, t + 1 :] * f[None, :]) % P).sum(axis=1)) % P
        g = A[t, t + 1 :] // pk[v]
        if g.any():
            if cols:
                V[:, t + 1 :] = (V[:, t + 1 :] - np.outer(V[:, t], g) % P) % P
            A[t, t + 1 :] = 0
        vals.append(v)
    return ModSmith(vals, U, Ui, V)


# --------------------------------------------------------------------------
# subquotients


@dataclass
class _PrimePart:
    p: int
    E: int
    coords_idx: list[int]  # ambient coordinates with positive p-exponent
    exps: list[int]  # p-exponents of those coordinates
    UK: np.ndarray  # K-basis transform (rows)
    UKinv: np.ndarray
    kv: list[int]  # valuations of the K-basis
    kept: list[int]  # K-basis components with kv < E
    U2: np.ndarray
    U2inv: np.ndarray
    w: list[int]  # output exponents (all positive), ascending
    w_idx: list[int]  # rows of U2 giving the output components


@dataclass
class Subquotient:
    """The group ker(F) / <rel> inside X = Z^k / diag(dX).

    ``factors`` are invariant factors d_1 | d_2 | ... (0 = free, 1s dropped);
    ``gens[i]`` is an ambient vector representing the i-th generator.
    """

    dX: list[int]
    factors: list[int]
    gens: list[list[int]]
    _coords: object = field(repr=False, default=None)

    def coords(self, x: Sequence[int]) -> list[int]:
        return self._coords(list(map(int, x)))

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


def subquotient(dX, F=None, dY=None, rel=(), engine: str = "auto") -> Subquotient:
    """ker(F: X -> Y) modulo the span of ``rel`` (vectors in X, assumed to be
    in the kernel).  ``engine`` is "int", "modp" or "auto"."""
    dX = [int(d) for d in dX]
    F = [] if F is None else [list(map(int, r)) for r in F]
    dY = [] if dY is None else [int(d) for d in dY]
    rel = [list(map(int, r)) for r in rel]
    if len(F) != len(dY):
        raise ValueError("F rows must match Y factors")
    if F and any(len(r) != len(dX) for r in F):
        raise ValueError("F columns must match X factors")
    finite = all(d > 0 for d in dX) and all(d > 0 for d in dY)
    if engine == "auto":
        engine = "modp" if finite else "int"
    if engine == "modp":
        if not finite:
            raise ValueError("modular engine needs finite groups")
        return _subquotient_modp(dX, F, dY, rel)
    return _subquotient_int(dX, F, dY, rel)


def _subquotient_int(dX, F, dY, rel) -> Subquotient:
    k = len(dX)
    lat = EchelonLattice(k)
    for i, d in enumerate(dX):  # always in the kernel for valid F
        if d:
            lat.add([d if j == i else 0 for j in range(k)])
    for g in lattice_kernel(F, k, dY):
        lat.add(g)
    B = lat.basis()
    kk = len(B)

    def in_basis(x):
        c = lat.solve(x)
        if c is None:
            raise ValueError("vector is not in the kernel")
        return c

    rl = EchelonLattice(kk)
    for i, d in enumerate(dX):
        if d:
            rl.add(in_basis([d if j == i else 0 for j in range(k)]))
    for x in rel:
        rl.add(in_basis(x))
    C = rl.basis()  # rows are relation vectors in K-coordinates
    M = [[C[c][r] for c in range(len(C))] for r in range(kk)] if C else [[] for _ in range(kk)]
    if kk and not C:
        M = [[0] for _ in range(kk)]
    s = smith_normal_form(M, columns=False, check=False) if kk else None
    diag = s.diagonal if s else []
    diag = diag + [0] * (kk - len(diag))
    comps = [i for i in range(kk) if diag[i] != 1]
    factors = [diag[i] for i in comps]
    gens = []
    for i in comps:
        col = [s.Uinv[r][i] for r in range(kk)]
        v = [sum(col[b] * B[b][j] for b in range(kk)) for j in range(k)]
        gens.append([x % d if d else x for x, d in zip(v, dX)])

    def coords(x):
        c = in_basis(x)
        y = [sum(s.U[i][r] * c[r] for r in range(kk)) for i in comps]
        return [yi % d if d else yi for yi, d in zip(y, factors)]

    return Subquotient(dX, factors, gens, coords)


def _subquotient_modp(dX, F, dY, rel) -> Subquotient:
    parts = []
    primes = sorted({p for d in dX if d > 1 for p in factorize(d)})
    for p in primes:
        part = _prime_part(p, dX, F, dY, rel)
        if part is not None:
            parts.append(part)
    nfac = max((len(pp.w) for pp in parts), default=0)
    factors = [1] * nfac
    for pp in parts:
        off = nfac - len(pp.w)
        for i, w in enumerate(pp.w):
            factors[off + i] *= pp.p**w
    k = len(dX)
    gens = [[0] * k for _ in range(nfac)]
    for pp in parts:
        off = nfac - len(pp.w)
        for i in range(len(pp.w)):
            y = _part_generator(pp, i)
            for ci, val in zip(pp.coords_idx, y):
                gens[off + i][ci] += _crt_lift(val, pp.p, dX[ci])
    gens = [[x % d for x, d in zip(g, dX)] for g in gens]

    def coords(x):
        out = [0] * nfac
        mods = [1] * nfac
        for pp in parts:
            off = nfac - len(pp.w)
            c = _part_coords(pp, x)
            for i, ci in enumerate(c):
                q = pp.p ** pp.w[i]
                j = off + i
                # CRT combine out[j] mod mods[j] with ci mod q
                t = ((ci - out[j]) * pow(mods[j], -1, q)) % q
                out[j] += mods[j] * t
                mods[j] *= q
        return [o % f for o, f in zip(out, factors)]

    return Subquotient(dX, factors, gens, coords)


def _crt_lift(val: int, p: int, d: int) -> int:
    """Integer congruent to val mod the p-part of d and to 0 mod the rest."""
    pe = 1
    while d % (pe * p) == 0:
        pe *= p
    rest = d // pe
    if rest == 1:
        return val % d
    return (val * rest * pow(rest, -1, pe)) % d


def _pexp(d, p):
    e = 0
    while d % p == 0:
        d //= p
        e += 1
    return e


def _prime_part(p, dX, F, dY, rel) -> _PrimePart | None:
    xi = [i for i, d in enumerate(dX) if d % p == 0]
    if not xi:
        return None
    ex = [_pexp(dX[i], p) for i in xi]
    yi = [j for j, d in enumerate(dY) if d % p == 0]
    ey = [_pexp(dY[j], p) for j in yi]
    E = max(ex + ey)
    P = p**E
    dt = _dtype(P)
    k = len(xi)
    # (a) generators of the lifted kernel in (Z/p^E)^k
    if yi:
        l = len(yi)
        A = np.zeros((l, k + l), dtype=dt)
        Fa = np.array([[F[j][i] for i in xi] for j in yi], dtype=object) % P
        A[:, :k] = Fa.astype(dt)
        for r, e in enumerate(ey):
            A[r, k + r] = p**e
        s = mod_smith(A, p, E, rows=False, cols=True)
        colscale = [p ** (E - v) for v in s.vals] + [1] * (k + l - len(s.vals))
        gensK = (s.V[:k, :] * np.array(colscale, dtype=dt)[None, :]) % P
    else:
        gensK = np.eye(k, dtype=dt)
    # (b) adapted basis of the kernel
    sK = mod_smith(gensK, p, E, rows=True, cols=False)
    kv = sK.vals + [E] * (k - len(sK.vals))
    kept = [i for i in range(k) if kv[i] < E]
    # (c) relations in K-coordinates
    relv = [[r[i] for i in xi] for r in rel]
    relv += [[p**e if j == i else 0 for j in range(k)] for i, e in enumerate(ex)]
    R = np.array(relv, dtype=object).T % P if relv else np.zeros((k, 0), dtype=object)
    Y = _matmul_mod(sK.U, R.astype(dt), P)
    C = np.zeros((len(kept), Y.shape[1] + len(kept)), dtype=dt)
    for a, i in enumerate(kept):
        row = Y[i]
        if (row % p**kv[i]).any():
            raise ValueError("relation is not a cycle")
        C[a, : Y.shape[1]] = (row // p**kv[i]) % p ** (E - kv[i])
        C[a, Y.shape[1] + a] = p ** (E - kv[i])
    s2 = mod_smith(C, p, E, rows=True, cols=False)
    vals2 = s2.vals + [E] * (len(kept) - len(s2.vals))
    w_idx = [i for i in range(len(kept)) if vals2[i] > 0]
    w = [vals2[i] for i in w_idx]
    return _PrimePart(p, E, xi, ex, sK.U, sK.Uinv, kv, kept, s2.U, s2.Uinv, w, w_idx)


def _matmul_mod(a, b, P):
    if a.dtype == object or b.dtype == object:
        return np.dot(a.astype(object), b.astype(object)) % P
    # keep partial sums below 2^63
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for j in range(a.shape[1]):
        out = (out + np.outer(a[:, j], b[j]) % P) % P
    return out


def _part_coords(pp: _PrimePart, x) -> list[int]:
    P = pp.p**pp.E
    xv = np.array([x[i] % P for i in pp.coords_idx], dtype=object)
    y = np.dot(pp.UK.astype(object), xv) % P
    c = []
    for i in pp.kept:
        if y[i] % pp.p ** pp.kv[i]:
            raise ValueError("vector is not in the kernel")
        c.append(int(y[i]) // pp.p ** pp.kv[i])
    z = np.dot(pp.U2.astype(object), np.array(c, dtype=object)) % P if c else []
    return [int(z[i]) % pp.p**w for i, w in zip(pp.w_idx, pp.w)]


def _part_generator(pp: _PrimePart, i: int) -> list[int]:
    P = pp.p**pp.E
    col = pp.U2inv.astype(object)[:, pp.w_idx[i]]
    y = np.zeros(len(pp.coords_idx), dtype=object)
    for a, ki in enumerate(pp.kept):
        y[ki] = (int(col[a]) * pp.p ** pp.kv[ki]) % P
    x = np.dot(pp.UKinv.astype(object), y) % P
    return [int(v) % pp.p**e for v, e in zip(x, pp.exps)]


def invariant_factors(dX: Sequence[int]) -> list[int]:
    """Invariant factors of Z^k / diag(dX)."""
    return subquotient(dX, engine="int").factors
