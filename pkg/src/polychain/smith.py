"""Smith normal form and sparse elimination over Z and Z/p.

Matrices are either dense lists of int rows or sparse ``{row: {col: value}}``
dicts.  Nothing here knows about simplices.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np


def _norm(v: int, p: int | None) -> int:
    return v % p if p else v


# --- dense SNF with transforms ---------------------------------------------

@dataclass
class SNF:
    """``U @ A @ V == D`` with ``U``, ``V`` invertible over the ring."""
    D: list
    U: list
    Uinv: list
    V: list
    Vinv: list
    rank: int
    p: int | None

    @property
    def diagonal(self) -> list[int]:
        return [self.D[i][i] for i in range(self.rank)]


def _eye(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(A, p: int | None = None) -> SNF:
    """Smith normal form of a dense integer matrix, over Z (p=None) or Z/p.

    Over Z the diagonal is positive and forms a divisibility chain.  Entries
    are Python ints held in numpy object arrays, so row and column updates
    are vectorized without losing exactness.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    D = np.array([[_norm(int(x), p) for x in row] for row in A], dtype=object).reshape(m, n)
    U, Uinv, V, Vinv = (np.array(_eye(k), dtype=object).reshape(k, k) for k in (m, m, n, n))

    def red(M):
        if p:
            M %= p

    def rows_add(I, t, c):  # row_i += c_i * row_t for i in I
        D[I, :] += np.multiply.outer(c, D[t, :])
        U[I, :] += np.multiply.outer(c, U[t, :])
        Uinv[:, t] -= Uinv[:, I].dot(c)
        for M in (D, U, Uinv):
            red(M)

    def cols_add(J, t, c):  # col_j += c_j * col_t for j in J
        D[:, J] += np.multiply.outer(D[:, t], c)
        V[:, J] += np.multiply.outer(V[:, t], c)
        Vinv[t, :] -= c.dot(Vinv[J, :])
        for M in (D, V, Vinv):
            red(M)

    def row_swap(i, j):
        if i != j:
            for M in (D, U):
                M[[i, j], :] = M[[j, i], :]
            Uinv[:, [i, j]] = Uinv[:, [j, i]]

    def col_swap(i, j):
        if i != j:
            for M in (D, V):
                M[:, [i, j]] = M[:, [j, i]]
            Vinv[[i, j], :] = Vinv[[j, i], :]

    def row_scale(i, c):  # c a unit
        D[i, :] *= c
        U[i, :] *= c
        Uinv[:, i] *= c if p is None else pow(c, -1, p)
        for M in (D, U, Uinv):
            red(M)

    def quotients(x, piv):
        if p:
            return (x * pow(int(piv), -1, p)) % p
        return x // piv

    t = 0
    while t < min(m, n):
        # pivot: first smallest nonzero |entry| of the remaining block (row-major)
        block = D[t:, t:]
        nz = np.argwhere(block != 0)
        if not len(nz):
            break
        vals = np.abs(block[nz[:, 0], nz[:, 1]]).astype(object)
        k = int(np.argmin(vals))
        row_swap(t, t + int(nz[k, 0]))
        col_swap(t, t + int(nz[k, 1]))
        while True:
            piv = D[t, t]
            I = np.nonzero(D[t + 1:, t] != 0)[0] + t + 1
            if len(I):
                rows_add(I, t, -quotients(D[I, t], piv))
            J = np.nonzero(D[t, t + 1:] != 0)[0] + t + 1
            if len(J):
                cols_add(J, t, -quotients(D[t, J], piv))
            col_left = np.nonzero(D[t + 1:, t] != 0)[0]
            row_left = np.nonzero(D[t, t + 1:] != 0)[0]
            if not len(col_left) and not len(row_left):
                if p is None and abs(piv) != 1:
                    # divisibility: fold in any entry not divisible by the pivot
                    rest = D[t + 1:, t + 1:]
                    bad = np.argwhere(rest % piv != 0) if rest.size else []
                    if len(bad):
                        rows_add(np.array([t]), t + 1 + int(bad[0][0]), np.array([1], dtype=object))
                        continue
                break
            # move the smallest remainder into the pivot position
            cands = [(abs(D[i, t]), i, t) for i in range(t, m) if D[i, t]]
            cands += [(abs(D[t, j]), t, j) for j in range(t, n) if D[t, j]]
            best = min(cands, key=lambda c: c[0])
            row_swap(t, best[1])
            col_swap(t, best[2])
        if p is None and D[t, t] < 0:
            row_scale(t, -1)
        elif p is not None and D[t, t] != 1:
            row_scale(t, pow(int(D[t, t]), -1, p))
        t += 1
    tolist = lambda M: [[int(x) for x in row] for row in M.tolist()]
    return SNF(tolist(D), tolist(U), tolist(Uinv), tolist(V), tolist(Vinv), t, p)


# --- sparse elimination ----------------------------------------------------

def _to_sparse_rows(A):
    if isinstance(A, dict):
        return {i: dict(r) for i, r in A.items() if r}
    return {i: {j: int(x) for j, x in enumerate(r) if x} for i, r in enumerate(A)}


def invariant_factors(A, p: int | None = None) -> list[int]:
    """Nonzero Smith invariants of a (sparse or dense) matrix.

    Over Z/p every invariant is 1 and the length is the rank.  Unit pivots are
    eliminated sparsely; whatever block has no unit entry left is handed to
    the dense SNF.
    """
    rows = {}
    for i, r in _to_sparse_rows(A).items():
        rr = {j: _norm(v, p) for j, v in r.items() if _norm(v, p)}
        if rr:
            rows[i] = rr
    cols: dict[int, set] = {}
    for i, r in rows.items():
        for j in r:
            cols.setdefault(j, set()).add(i)
    ones = 0
    progress = True
    while progress:
        progress = False
        for j in sorted(cols):
            if j not in cols or not cols[j]:
                continue
            cand = [i for i in cols[j] if p is not None or rows[i][j] in (1, -1)]
            if not cand:
                continue
            i = min(cand, key=lambda i: (len(rows[i]), i))
            _eliminate(rows, cols, i, j, p)
            ones += 1
            progress = True
    return _finish(rows, ones, p)


def _eliminate(rows, cols, i, j, p):
    """Pivot on (i, j) and drop that row and column; the pivot is a unit."""
    prow = rows.pop(i)
    pv = prow[j]
    inv = pow(pv, -1, p) if p else pv  # pv is +-1 over Z
    for c in prow:
        cols[c].discard(i)
    for k in list(cols[j]):
        r = rows[k]
        f = _norm(r[j] * inv, p)
        for c, v in prow.items():
            nv = _norm(r.get(c, 0) - f * v, p)
            if nv:
                if c not in r:
                    cols[c].add(k)
                r[c] = nv
            elif c in r:
                del r[c]
                cols[c].discard(k)
        if not r:
            del rows[k]
    del cols[j]


def _finish(rows, ones, p):
    if not rows:
        return [1] * ones
    ridx = sorted(rows)
    cidx = sorted({c for r in rows.values() for c in r})
    cpos = {c: k for k, c in enumerate(cidx)}
    dense = []
    for i in ridx:
        row = [0] * len(cidx)
        for c, v in rows[i].items():
            row[cpos[c]] = v
        dense.append(row)
    snf = smith_normal_form(dense, p)
    return [1] * ones + snf.diagonal


def rank(A, p: int | None = None) -> int:
    return len(invariant_factors(A, p))


class Echelon:
    """Incremental sparse echelon basis of a subspace of (Z/p)^n.

    Each stored row may carry a ``tag`` dict recording which tagged input
    vectors it is a combination of; :meth:`reduce` returns the residual and
    the accumulated tag combination.
    """

    def __init__(self, p: int):
        self.p = p
        self.rows: dict[int, tuple[dict, dict]] = {}

    def __len__(self):
        return len(self.rows)

    def reduce(self, vec: dict, tag: dict | None = None):
        p = self.p
        v = {k: x % p for k, x in vec.items() if x % p}
        t = dict(tag) if tag else {}
        out = {}
        heap = list(v)
        heapq.heapify(heap)
        while heap:
            k = heapq.heappop(heap)
            c = v.pop(k, None)
            if c is None:
                continue
            row = self.rows.get(k)
            if row is None:
                out[k] = c
                continue
            rv, rt = row  # rv[k] == 1
            for key, val in rv.items():
                if key == k:
                    continue
                nv = (v.get(key, 0) - c * val) % p
                if nv:
                    if key not in v:
                        heapq.heappush(heap, key)
                    v[key] = nv
                else:
                    v.pop(key, None)
            for key, val in rt.items():
                nv = (t.get(key, 0) - c * val) % p
                if nv:
                    t[key] = nv
                else:
                    t.pop(key, None)
        return out, t

    def add(self, vec: dict, tag: dict | None = None) -> bool:
        r, t = self.reduce(vec, tag)
        if not r:
            return False
        k = min(r)
        inv = pow(r[k], -1, self.p)
        r = {key: (val * inv) % self.p for key, val in r.items()}
        t = {key: (val * inv) % self.p for key, val in t.items()}
        self.rows[k] = (r, t)
        return True

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)[0]


def kernel_mod_p(rows: dict, ncols: int, p: int) -> list[dict]:
    """Basis of the null space of a sparse matrix over Z/p (as sparse vectors)."""
    E = Echelon(p)
    for i in sorted(rows):
        E.add(rows[i])
    # back-substitute to reduced row echelon form
    piv = sorted(E.rows)
    red: dict[int, dict] = {}
    for k in reversed(piv):
        r = dict(E.rows[k][0])
        for key in sorted(r):
            if key != k and key in red:
                c = r.get(key, 0)
                if not c:
                    continue
                for kk, vv in red[key].items():
                    nv = (r.get(kk, 0) - c * vv) % p
                    if nv:
                        r[kk] = nv
                    else:
                        r.pop(kk, None)
        red[k] = r
    pivset = set(piv)
    # column view of non-pivot entries
    colmap: dict[int, list] = {}
    for k, r in red.items():
        for key, val in r.items():
            if key != k:
                colmap.setdefault(key, []).append((k, val))
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = {f: 1}
        for k, val in colmap.get(f, ()):
            v[k] = (-val) % p
        basis.append(v)
    return basis
