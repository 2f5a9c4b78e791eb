"""Simplicial (co)homology over Z and Z/p.

Homology groups come from Smith invariants of the boundary matrices.  Cochains
are sparse ``{simplex: value}`` maps on sorted vertex tuples; products use the
vertex-id order of the complex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import smith
from .simplicial import ComplexError, InvariantViolation, SimplicialComplex, orient

# dense SNF with transforms is only attempted below this many cells per degree
MAX_DENSE_CELLS = 600


def ring_name(p: int | None) -> str:
    return "Z" if p is None else f"Z{p}"


def parse_ring(s: str | int | None) -> int | None:
    if s is None:
        return None
    if isinstance(s, int):
        return s
    s = s.strip().lower()
    if s in ("z", "zz", "integers"):
        return None
    if s.startswith("z"):
        s = s[1:]
    p = int(s)
    if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
        raise ValueError(f"coefficient ring Z{p}: {p} is not prime")
    return p


# --- chain-level matrices ----------------------------------------------------

def boundary_matrix(K: SimplicialComplex, k: int, exclude: set | frozenset = frozenset()) -> dict:
    """Sparse boundary matrix d_k : C_k -> C_{k-1} as ``{row: {col: +-1}}``.

    Rows index (k-1)-simplices and columns k-simplices of K, both by their
    position in ``K.simplices``.  Simplices in ``exclude`` are dropped (this is
    how relative chains are formed).
    """
    rows: dict[int, dict] = {}
    if k <= 0:
        return rows
    for j, s in enumerate(K.simplices(k)):
        if s in exclude:
            continue
        for i in range(len(s)):
            f = s[:i] + s[i + 1:]
            if f in exclude:
                continue
            rows.setdefault(K.index(f), {})[j] = (-1) ** i
    return rows


def _transpose(rows: dict) -> dict:
    out: dict[int, dict] = {}
    for i, r in rows.items():
        for j, v in r.items():
            out.setdefault(j, {})[i] = v
    return out


def _matmul_is_zero(A: dict, B: dict) -> bool:
    Bt = B
    for i, r in A.items():
        acc: dict[int, int] = {}
        for k, v in r.items():
            for j, w in Bt.get(k, {}).items():
                acc[j] = acc.get(j, 0) + v * w
        if any(acc.values()):
            return False
    return True


def check_dd_zero(K: SimplicialComplex) -> bool:
    return all(_matmul_is_zero(boundary_matrix(K, k), boundary_matrix(K, k + 1))
               for k in range(1, K.dim))


# --- homology groups ---------------------------------------------------------

@dataclass
class HomologyGroups:
    """Per-degree free rank and torsion coefficients over a ring."""
    ring: str
    betti: list[int]
    torsion: list[list[int]]

    def group(self, k: int) -> str:
        if k < 0 or k >= len(self.betti):
            return "0"
        parts = []
        b = self.betti[k]
        base = "Z" if self.ring == "Z" else self.ring
        if b == 1:
            parts.append(base)
        elif b > 1:
            parts.append(f"{base}^{b}")
        parts.extend(f"Z{t}" for t in self.torsion[k])
        return " + ".join(parts) if parts else "0"

    def as_dict(self, prefix: str = "H") -> dict:
        return {f"{prefix}{k}": self.group(k) for k in range(len(self.betti))}

    def __eq__(self, other):
        if isinstance(other, HomologyGroups):
            n = max(len(self.betti), len(other.betti))
            return self.ring == other.ring and all(self.group(k) == other.group(k) for k in range(n))
        return NotImplemented


def _groups(K: SimplicialComplex, p: int | None, exclude=frozenset()) -> HomologyGroups:
    n = K.dim
    counts = [sum(1 for s in K.simplices(k) if s not in exclude) for k in range(n + 2)]
    inv = [[] for _ in range(n + 2)]
    for k in range(1, n + 1):
        inv[k] = smith.invariant_factors(boundary_matrix(K, k, exclude), p)
    betti, torsion = [], []
    for k in range(n + 1):
        rk = len(inv[k])
        rk1 = len(inv[k + 1])
        betti.append(counts[k] - rk - rk1)
        torsion.append(sorted(d for d in inv[k + 1] if d > 1) if p is None else [])
    return HomologyGroups(ring_name(p), betti, torsion)


def homology(K: SimplicialComplex, p: int | None = None) -> HomologyGroups:
    return _groups(K, p)


def relative_homology(K: SimplicialComplex, L: SimplicialComplex, p: int | None = None) -> HomologyGroups:
    missing = [s for s in L.all_simplices() if s not in K]
    if missing:
        raise ComplexError(f"L is not a subcomplex of K: {missing[0]} not in K")
    return _groups(K, p, frozenset(L.all_simplices()))


def uct_predicted_dims(hz: HomologyGroups, p: int) -> list[int]:
    """dim H_n(K; Z/p) predicted by universal coefficients from H_*(K; Z)."""
    out = []
    for n in range(len(hz.betti)):
        t_n = sum(1 for d in hz.torsion[n] if d % p == 0)
        t_prev = sum(1 for d in hz.torsion[n - 1] if d % p == 0) if n > 0 else 0
        out.append(hz.betti[n] + t_n + t_prev)
    return out


# --- cochains ----------------------------------------------------------------

@dataclass
class Cochain:
    """Integer or mod-p valued cochain of a fixed degree on a complex."""
    complex: SimplicialComplex
    degree: int
    values: dict = field(default_factory=dict)
    p: int | None = None

    def __post_init__(self):
        vals = {}
        for s, v in self.values.items():
            s = tuple(sorted(s))
            if len(s) != self.degree + 1:
                raise ComplexError(f"cochain of degree {self.degree} given a value on {s}")
            v = int(v) % self.p if self.p else int(v)
            if v:
                vals[s] = v
        self.values = vals

    def __call__(self, s) -> int:
        return self.values.get(tuple(sorted(s)), 0)

    def _check(self, other: "Cochain"):
        if other.complex is not self.complex and other.complex != self.complex:
            raise ComplexError("cochains live on different complexes")
        if other.p != self.p:
            raise ComplexError(f"ring mismatch: {ring_name(self.p)} vs {ring_name(other.p)}")

    def __add__(self, other: "Cochain") -> "Cochain":
        self._check(other)
        if other.degree != self.degree:
            raise ComplexError("cannot add cochains of different degree")
        vals = dict(self.values)
        for s, v in other.values.items():
            vals[s] = vals.get(s, 0) + v
        return Cochain(self.complex, self.degree, vals, self.p)

    def __neg__(self) -> "Cochain":
        return Cochain(self.complex, self.degree, {s: -v for s, v in self.values.items()}, self.p)

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, c: int) -> "Cochain":
        return Cochain(self.complex, self.degree, {s: c * v for s, v in self.values.items()}, self.p)

    def is_zero(self) -> bool:
        return not self.values

    def reduce(self, p: int) -> "Cochain":
        return Cochain(self.complex, self.degree, self.values, p)

    def lift(self) -> "Cochain":
        """Integer cochain with values in [0, p)."""
        return Cochain(self.complex, self.degree, self.values, None)

    def coboundary(self) -> "Cochain":
        return coboundary(self)

    def is_cocycle(self) -> bool:
        return coboundary(self).is_zero()

    def vector(self) -> dict:
        """Sparse vector indexed by simplex position."""
        K = self.complex
        return {K.index(s): v for s, v in self.values.items()}

    def __eq__(self, other):
        if not isinstance(other, Cochain):
            return NotImplemented
        return (self.degree == other.degree and self.p == other.p and self.values == other.values)

    def to_json(self) -> dict:
        return {"degree": self.degree, "ring": ring_name(self.p),
                "values": [{"simplex": list(s), "value": v} for s, v in sorted(self.values.items())]}


def unit_cochain(K: SimplicialComplex, p: int | None = None) -> Cochain:
    return Cochain(K, 0, {s: 1 for s in K.simplices(0)}, p)


def from_vector(K: SimplicialComplex, degree: int, vec: dict, p: int | None) -> Cochain:
    sims = K.simplices(degree)
    return Cochain(K, degree, {sims[i]: v for i, v in vec.items()}, p)


def coboundary(c: Cochain) -> Cochain:
    K, n = c.complex, c.degree
    out: dict[tuple, int] = {}
    if not c.values:
        return Cochain(K, n + 1, {}, c.p)
    for s in K.simplices(n + 1):
        acc = 0
        for i in range(n + 2):
            v = c.values.get(s[:i] + s[i + 1:])
            if v:
                acc += v if i % 2 == 0 else -v
        if acc:
            out[s] = acc
    return Cochain(K, n + 1, out, c.p)


def cup_product(a: Cochain, b: Cochain) -> Cochain:
    """Alexander-Whitney cup product on the vertex-id order."""
    a._check(b)
    K = a.complex
    i, j = a.degree, b.degree
    out = {}
    if a.values and b.values:
        for s in K.simplices(i + j):
            x = a.values.get(s[:i + 1])
            if x:
                y = b.values.get(s[i:])
                if y:
                    out[s] = x * y
    return Cochain(K, i + j, out, a.p)


def bockstein(c: Cochain, lift: Cochain | None = None) -> Cochain:
    """Mod-p Bockstein: lift to Z/p^2, take coboundary, divide by p, reduce.

    ``lift`` may supply a different integer lift of ``c``; the class of the
    result does not depend on it.
    """
    p = c.p
    if p is None:
        raise ComplexError("Bockstein needs a mod-p cochain")
    if not c.is_cocycle():
        raise ComplexError("Bockstein of a non-cocycle")
    base = lift if lift is not None else c.lift()
    if base.p is not None:
        base = base.lift()
    if base.reduce(p) != c:
        raise ComplexError("supplied lift does not reduce to the cochain")
    d = coboundary(base)
    vals = {}
    for s, v in d.values.items():
        if v % p:
            raise InvariantViolation("coboundary of a lifted cocycle is not divisible by p")
        vals[s] = v // p
    return Cochain(c.complex, c.degree + 1, vals, p)


# --- cohomology with representatives -------------------------------------

@dataclass
class CohomologyClassBasis:
    degree: int
    p: int | None
    generators: list[Cochain]
    orders: list[int]  # 0 means infinite order


class ModPCohomology:
    """Cohomology of K with Z/p coefficients and class-level bookkeeping."""

    def __init__(self, K: SimplicialComplex, p: int):
        self.K = K
        self.p = p
        self._cache: dict[int, tuple] = {}

    def _delta_rows(self, n: int) -> dict:
        # delta_n : C^n -> C^{n+1}; rows indexed by (n+1)-simplices
        return _transpose(boundary_matrix(self.K, n + 1))

    def _degree(self, n: int):
        if n in self._cache:
            return self._cache[n]
        K, p = self.K, self.p
        E = smith.Echelon(p)
        if n >= 1:
            d_prev = boundary_matrix(K, n)  # row i = delta of the i-th (n-1)-simplex
            for col in sorted(d_prev):
                E.add(d_prev[col])
        nb = len(E)
        cocycles = smith.kernel_mod_p(self._delta_rows(n), K.count(n), p) if K.count(n) else []
        reps = []
        for z in cocycles:
            if E.add(z, {len(reps): 1}):
                reps.append(z)
        if len(E) - nb != len(reps):
            raise InvariantViolation("cohomology basis bookkeeping failed")
        self._cache[n] = (E, reps)
        return self._cache[n]

    def dim(self, n: int) -> int:
        return len(self._degree(n)[1])

    def basis(self, n: int) -> list[Cochain]:
        return [from_vector(self.K, n, z, self.p) for z in self._degree(n)[1]]

    def coordinates(self, c: Cochain) -> tuple:
        """Coordinates of the class of cocycle ``c`` in :meth:`basis`."""
        if c.p != self.p:
            raise ComplexError("ring mismatch")
        if not c.is_cocycle():
            raise ComplexError("not a cocycle")
        E, reps = self._degree(c.degree)
        resid, tag = E.reduce(c.vector())
        if resid:
            raise InvariantViolation("cocycle not in span of coboundaries and basis")
        # the tag accumulates minus the combination of basis classes that cancels c
        return tuple(-tag.get(i, 0) % self.p for i in range(len(reps)))

    def is_coboundary(self, c: Cochain) -> bool:
        return not any(self.coordinates(c))

    def same_class(self, a: Cochain, b: Cochain) -> bool:
        return self.is_coboundary(a - b)


def cohomology(K: SimplicialComplex, p: int | None = None):
    """Cohomology groups with explicit cocycle representatives per generator.

    Returns ``(groups, bases)`` where ``bases[n]`` is a CohomologyClassBasis.
    Over Z the representatives need a dense Smith form and are only computed
    for complexes with at most MAX_DENSE_CELLS cells per degree.
    """
    n = K.dim
    if p is not None:
        H = ModPCohomology(K, p)
        dims = [H.dim(k) for k in range(n + 1)]
        groups = HomologyGroups(ring_name(p), dims, [[] for _ in dims])
        bases = [CohomologyClassBasis(k, p, H.basis(k), [p] * dims[k]) for k in range(n + 1)]
        return groups, bases
    hz = homology(K)
    betti = hz.betti
    torsion = [[]] + [list(hz.torsion[k - 1]) for k in range(1, n + 1)]
    groups = HomologyGroups("Z", betti, torsion)
    if max(K.count(k) for k in range(n + 1)) > MAX_DENSE_CELLS:
        return groups, None
    bases = [_integral_basis(K, k) for k in range(n + 1)]
    for k, b in enumerate(bases):
        free = sum(1 for o in b.orders if o == 0)
        tors = sorted(o for o in b.orders if o > 1)
        if free != betti[k] or tors != torsion[k]:
            raise InvariantViolation(f"integral cohomology representatives disagree in degree {k}")
    return groups, bases


def _dense(rows: dict, m: int, n: int) -> list[list[int]]:
    A = [[0] * n for _ in range(m)]
    for i, r in rows.items():
        for j, v in r.items():
            A[i][j] = v
    return A


def _integral_basis(K: SimplicialComplex, n: int) -> CohomologyClassBasis:
    cn = K.count(n)
    # delta_n as a dense (c_{n+1} x c_n) matrix
    dn = _dense(boundary_matrix(K, n + 1), cn, K.count(n + 1))
    dn = [list(r) for r in zip(*dn)]
    if dn:
        snf = smith.smith_normal_form(dn)
        r = snf.rank
        V, Vinv = snf.V, snf.Vinv
    else:
        r = 0
        V = Vinv = [[int(i == j) for j in range(cn)] for i in range(cn)]
    zdim = cn - r
    kernel = [[V[i][j] for j in range(r, cn)] for i in range(cn)]  # cn x zdim
    if n >= 1 and K.count(n - 1):
        # coords = Vinv @ delta_{n-1}, with delta_{n-1} sparse: row j of the
        # boundary matrix lists the n-simplices k having face j
        Vi = np.array(Vinv, dtype=object).reshape(cn, cn)
        coords = np.zeros((cn, K.count(n - 1)), dtype=object)
        for j, row in boundary_matrix(K, n).items():
            for k, v in row.items():
                coords[:, j] += Vi[:, k] * v
        if coords[:r].any():
            raise InvariantViolation("coboundaries are not cocycles")
        M = [[int(x) for x in rw] for rw in coords[r:].tolist()]
    else:
        M = []
    if M and M[0]:
        snf2 = smith.smith_normal_form(M)
        Pinv, diag, rank2 = snf2.Uinv, snf2.diagonal, snf2.rank
    else:
        Pinv = [[int(i == j) for j in range(zdim)] for i in range(zdim)]
        diag, rank2 = [], 0
    gens, orders = [], []
    for i in range(zdim):
        order = diag[i] if i < rank2 else 0
        if order == 1:
            continue
        vec = {}
        for row in range(cn):
            v = sum(kernel[row][k] * Pinv[k][i] for k in range(zdim))
            if v:
                vec[row] = v
        gens.append(from_vector(K, n, vec, None))
        orders.append(order)
    return CohomologyClassBasis(n, None, gens, orders)


def is_integral_coboundary(c: Cochain) -> bool:
    """Whether an integer cocycle is a coboundary (dense; desk-scale only)."""
    K, n = c.complex, c.degree
    if n == 0:
        return c.is_zero()
    A = _dense(boundary_matrix(K, n), K.count(n - 1), K.count(n))
    A = [list(r) for r in zip(*A)]  # delta_{n-1}: c_n x c_{n-1}
    snf = smith.smith_normal_form(A)
    b = [0] * K.count(n)
    for i, v in c.vector().items():
        b[i] = v
    # U A V = D, solve D y = U b
    Ub = [sum(snf.U[i][k] * b[k] for k in range(len(b))) for i in range(len(b))]
    for i, v in enumerate(Ub):
        d = snf.D[i][i] if i < snf.rank else 0
        if d == 0:
            if v:
                return False
        elif v % d:
            return False
    return True


def betti_numbers(K: SimplicialComplex, p: int | None = None) -> list[int]:
    return homology(K, p).betti


def reduced_betti_zero(K: SimplicialComplex, p: int | None = None) -> bool:
    h = homology(K, p)
    return h.betti[0] == 1 and all(b == 0 for b in h.betti[1:]) and not any(h.torsion)


def cochain_from_pairs(K: SimplicialComplex, degree: int, pairs: Iterable, p: int | None) -> Cochain:
    return Cochain(K, degree, {tuple(s): v for s, v in pairs}, p)


def pullback(c: Cochain, source: SimplicialComplex, vertex_map: Sequence[int]) -> Cochain:
    """f^* c for the simplicial map given by ``vertex_map`` on source vertices.

    Simplices collapsed by the map get 0; otherwise the value picks up the
    sign of the permutation sorting the image.
    """
    n = c.degree
    vals = {}
    for s in source.simplices(n):
        img = [vertex_map[v] for v in s]
        if len(set(img)) < n + 1:
            continue
        key, sign = orient(img)
        v = c.values.get(key)
        if v:
            vals[s] = sign * v
    return Cochain(source, n, vals, c.p)
