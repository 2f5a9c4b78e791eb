"""Simplicial integral flat norm.

F(T) = min M(R) + M(S) over T = R + dS, with R a k-chain and S a (k+1)-chain
of the host complex.  The LP relaxation is solved exactly over the rationals;
a brute-force search over bounded integer S serves as the oracle.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .chains import Chain, ChainError, boundary, mass, simplex_volume
from .lp import OPTIMAL, linprog_exact
from .polytope import GuardExceeded
from .simplicial import VOLUME_PREC, SimplicialComplex

LP_EXACT = "lp-exact"
LP_FRACTIONAL = "lp-fractional"
BRUTE_FORCE = "brute-force"

BRUTE_MAX_SIMPLICES = int(os.environ.get("POLYCHAIN_BRUTE_MAX_SIMPLICES", 30))
BRUTE_MAX_CANDIDATES = int(os.environ.get("POLYCHAIN_BRUTE_MAX_CANDIDATES", 20_000_000))
OBJECTIVE_DENOMINATOR = 2 ** 64


@dataclass
class FlatDecomposition:
    value: mpmath.mpf
    R: Chain
    S: Chain
    status: str
    lp_value: Fraction | None = None

    @property
    def mass_R(self):
        return mass(self.R)

    @property
    def mass_S(self):
        return mass(self.S)

    def residual_is_zero(self, T: Chain) -> bool:
        """T - R - dS == 0 exactly (only meaningful for integral witnesses)."""
        return (T - self.R - boundary(self.S)) == Chain.zero(T.complex, T.dim)

    def to_json(self) -> dict:
        return {
            "value": float(self.value),
            "mass_R": float(self.mass_R),
            "mass_S": float(self.mass_S),
            "status": self.status,
            "R": self.R.to_json(),
            "S": self.S.to_json(),
        }

    def csv_row(self) -> str:
        return f"{float(self.value)!r},{float(self.mass_R)!r},{float(self.mass_S)!r},{self.status}"


def _rational_weight(v: mpmath.mpf) -> Fraction:
    with mpmath.workprec(VOLUME_PREC):
        return Fraction(int(mpmath.nint(v * OBJECTIVE_DENOMINATOR)), OBJECTIVE_DENOMINATOR)


def _setup(T: Chain, K: SimplicialComplex):
    if T.complex is not K and T.complex != K:
        raise ChainError("chain is not supported on the given complex")
    k = T.dim
    rows = K.simplices(k)
    cols = K.simplices(k + 1)
    ridx = {s: i for i, s in enumerate(rows)}
    B = [[0] * len(cols) for _ in rows]
    for j, tau in enumerate(cols):
        for i in range(len(tau)):
            B[ridx[tau[:i] + tau[i + 1:]]][j] += (-1) ** i
    t = [T.terms.get(s, 0) for s in rows]
    return rows, cols, B, t


def flat_norm_lp(T: Chain, K: SimplicialComplex) -> FlatDecomposition:
    """Exact LP with |r| and |s| split into positive and negative parts.

    Volumes enter the objective rationalized to 2^-64; the constraint
    T = R + dS is exact.  A non-integral optimum is reported as such and its
    relaxation value returned.
    """
    k = T.dim
    rows, cols, B, t = _setup(T, K)
    n, m = len(rows), len(cols)
    if not any(t):
        return FlatDecomposition(mpmath.mpf(0), Chain.zero(K, k), Chain.zero(K, k + 1), LP_EXACT, Fraction(0))
    w = [_rational_weight(simplex_volume(K, s)) for s in rows]
    v = [_rational_weight(simplex_volume(K, s)) for s in cols]
    c = w + w + v + v
    A = []
    for i in range(n):
        row = [0] * (2 * n + 2 * m)
        row[i] = 1
        row[n + i] = -1
        for j in range(m):
            if B[i][j]:
                row[2 * n + j] = B[i][j]
                row[2 * n + m + j] = -B[i][j]
        A.append(row)
    res = linprog_exact(c, A, t)
    if res.status != OPTIMAL:
        raise RuntimeError(f"flat-norm LP ended {res.status}")
    x = res.x
    r = [x[i] - x[n + i] for i in range(n)]
    s = [x[2 * n + j] - x[2 * n + m + j] for j in range(m)]
    integral = all(q.denominator == 1 for q in r + s)
    if integral:
        R = Chain(K, k, {rows[i]: int(r[i]) for i in range(n) if r[i]})
        S = Chain(K, k + 1, {cols[j]: int(s[j]) for j in range(m) if s[j]})
        with mpmath.workprec(VOLUME_PREC):
            value = mass(R) + mass(S)
        return FlatDecomposition(value, R, S, LP_EXACT, res.value)
    # fractional vertex: report the relaxation, keep the trivial witness
    with mpmath.workprec(VOLUME_PREC):
        value = mpmath.mpf(res.value.numerator) / res.value.denominator
    return FlatDecomposition(value, T, Chain.zero(K, k + 1), LP_FRACTIONAL, res.value)


def flat_norm_bruteforce(T: Chain, K: SimplicialComplex, coeff_bound: int) -> FlatDecomposition:
    """Exhaustive search over integer S with |s_j| <= coeff_bound.

    Costs are compared in float64 and near-ties (1e-9 relative) are broken by
    the lexicographically smallest S; the winner is re-evaluated at full
    precision.
    """
    k = T.dim
    rows, cols, B, t = _setup(T, K)
    n, m = len(rows), len(cols)
    if n + m > BRUTE_MAX_SIMPLICES:
        raise GuardExceeded(f"{n + m} simplices > {BRUTE_MAX_SIMPLICES} for brute force")
    if coeff_bound < max((abs(x) for x in t), default=0):
        raise ValueError("coefficient bound below the largest chain coefficient")
    side = 2 * coeff_bound + 1
    total = side ** m
    if total > BRUTE_MAX_CANDIDATES:
        raise GuardExceeded(f"{total} candidate S chains > {BRUTE_MAX_CANDIDATES}")
    w = np.array([float(simplex_volume(K, s)) for s in rows])
    v = np.array([float(simplex_volume(K, s)) for s in cols])
    Bm = np.array(B, dtype=np.int64).reshape(n, m)
    tv = np.array(t, dtype=np.int64)
    vals = np.arange(-coeff_bound, coeff_bound + 1, dtype=np.int64)
    best_cost = np.inf
    best_S = None
    chunk = 1 << 16
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        # mixed-radix digits, most significant first = lexicographic order
        S = np.empty((len(idx), m), dtype=np.int64)
        rem = idx.copy()
        for j in range(m - 1, -1, -1):
            S[:, j] = vals[rem % side]
            rem //= side
        R = tv[None, :] - S @ Bm.T if m else np.broadcast_to(tv, (len(idx), n))
        cost = np.abs(R) @ w + (np.abs(S) @ v if m else 0)
        lo = cost.min()
        if lo < best_cost * (1 - 1e-9) or best_S is None:
            best_cost = lo
            near = np.nonzero(cost <= lo * (1 + 1e-9) + 1e-15)[0]
            best_S = S[near[0]].copy()
        # earlier chunks are lexicographically smaller, so equal costs keep best_S
    s = [int(x) for x in best_S] if m else []
    S_chain = Chain(K, k + 1, {cols[j]: s[j] for j in range(m) if s[j]})
    R_chain = T - boundary(S_chain) if m else T
    with mpmath.workprec(VOLUME_PREC):
        value = mass(R_chain) + mass(S_chain)
    return FlatDecomposition(value, R_chain, S_chain, BRUTE_FORCE)


def flat_norm(T: Chain, K: SimplicialComplex) -> FlatDecomposition:
    return flat_norm_lp(T, K)


def boundary_triangle_complex(points) -> tuple[SimplicialComplex, Chain]:
    """A single triangle with its faces, and T = boundary of it."""
    K = SimplicialComplex([(0, 1, 2)], coords=points)
    sigma = Chain(K, 2, {(0, 1, 2): 1})
    return K, boundary(sigma)


def crossover_scale(base, lo: Fraction = Fraction(1, 64), hi: Fraction = Fraction(64), iters: int = 40) -> Fraction:
    """Scale lambda at which F(d(lambda*T0)) switches from the area witness
    (S = T0) to the perimeter witness (S = 0), located by bisection on the LP."""
    def area_wins(lam):
        pts = [[lam * c for c in p] for p in base]
        K, T = boundary_triangle_complex(pts)
        return bool(flat_norm_lp(T, K).S)

    if not area_wins(lo) or area_wins(hi):
        raise ValueError("crossover not bracketed")
    for _ in range(iters):
        mid = (lo + hi) / 2
        if area_wins(mid):
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2
