"""Quantitative pieces of the squashing construction, in flat charts.

* graded neighbourhoods V_delta(K^j): union of balls of radius C0^-i delta
  around the i-simplices of the j-skeleton, with an exact membership test and
  a sampling audit of how many balls meet at boundary points;
* the piecewise linear profile phi, its mollification psi and the radial map
  Psi_mu(x) = psi(|x|) x / |x|;
* a mollified distance-to-boundary function on the standard simplex built
  from dyadic shells and a partition of unity;
* the mass-contraction experiment for Phi(x, y) = (x, Psi_gamma(y)).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from . import exact
from .chains import Chain
from .simplicial import SimplicialComplex

# --- graded neighbourhoods ---------------------------------------------------


def _face_projection_sq(x, pts) -> Fraction | None:
    """Squared distance from x to aff(pts) if the foot lies in conv(pts)."""
    p0 = pts[0]
    E = [exact.sub(p, p0) for p in pts[1:]]
    d = exact.sub(x, p0)
    if not E:
        return exact.dot(d, d)
    G = [[exact.dot(a, b) for b in E] for a in E]
    rhs = [exact.dot(a, d) for a in E]
    lam = exact.solve(G, rhs)
    if lam is None or any(v < 0 for v in lam) or sum(lam) > 1:
        return None
    foot = list(p0)
    for c, e in zip(lam, E):
        foot = [f + c * ei for f, ei in zip(foot, e)]
    r = exact.sub(x, foot)
    return exact.dot(r, r)


def squared_distance_to_simplex(x: Sequence, pts: Sequence[Sequence]) -> Fraction:
    """Exact squared Euclidean distance from a rational point to a simplex."""
    x = exact.point(x)
    pts = [exact.point(p) for p in pts]
    best = None
    for k in range(1, len(pts) + 1):
        for face in itertools.combinations(pts, k):
            v = _face_projection_sq(x, list(face))
            if v is not None and (best is None or v < best):
                best = v
    return best


@dataclass
class GradedNeighborhood:
    """V_delta(K^j) with radii r_i = C0^-i delta around i-simplices."""
    complex: SimplicialComplex
    j: int
    delta: Fraction
    C0: Fraction = Fraction(4)

    def __post_init__(self):
        self.delta = exact.to_q(self.delta)
        self.C0 = exact.to_q(self.C0)
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.C0 < 1:
            raise ValueError("C0 must be at least 1")
        if not 0 <= self.j <= self.complex.dim:
            raise ValueError("skeleton index out of range")

    def radius(self, i: int) -> Fraction:
        return self.delta / self.C0 ** i

    @property
    def radii(self) -> list[Fraction]:
        return [self.radius(i) for i in range(self.j + 1)]

    def strata(self):
        for i in range(self.j + 1):
            for s in self.complex.simplices(i):
                yield i, s


def v_delta_contains(N: GradedNeighborhood, p: Sequence) -> bool:
    """True iff dist(p, sigma) < C0^-i delta for some i-simplex sigma, i <= j
    (exact squared-distance comparison)."""
    p = exact.point(p)
    K = N.complex
    for i, s in N.strata():
        r = N.radius(i)
        if squared_distance_to_simplex(p, K.vertex_points(s)) < r * r:
            return True
    return False


def default_delta(K: SimplicialComplex) -> Fraction:
    """Minimum edge length over 8, rounded down to a dyadic rational."""
    best = None
    for e in K.simplices(1):
        a, b = K.vertex_points(e)
        d = exact.dot(exact.sub(a, b), exact.sub(a, b))
        if best is None or d < best:
            best = d
    length = math.sqrt(float(best))
    return Fraction(math.floor(length / 8 * 2 ** 20), 2 ** 20)


class _FloatSimplices:
    """Vectorized float distances from many points to many simplices of one
    dimension (face enumeration with projection)."""

    def __init__(self, simplices_pts: list):
        self.faces = []  # per face size: (origins, pinv, E)
        pts = np.array(simplices_pts, dtype=float)  # (S, k+1, N)
        self.S = len(pts)
        k1 = pts.shape[1] if len(pts) else 0
        for size in range(1, k1 + 1):
            for idx in itertools.combinations(range(k1), size):
                sub = pts[:, list(idx), :]
                o = sub[:, 0, :]
                if size == 1:
                    self.faces.append((o, None, None))
                    continue
                E = sub[:, 1:, :] - o[:, None, :]  # (S, size-1, N)
                G = np.einsum("sin,sjn->sij", E, E)
                Ginv = np.linalg.inv(G)
                self.faces.append((o, Ginv, E))

    def distances(self, X: np.ndarray) -> np.ndarray:
        """(P, S) array of distances."""
        best = np.full((len(X), self.S), np.inf)
        for o, Ginv, E in self.faces:
            D = X[:, None, :] - o[None, :, :]  # (P, S, N)
            if E is None:
                dist = np.linalg.norm(D, axis=2)
                best = np.minimum(best, dist)
                continue
            rhs = np.einsum("psn,sin->psi", D, E)
            lam = np.einsum("sij,psj->psi", Ginv, rhs)
            ok = (lam >= -1e-12).all(axis=2) & (lam.sum(axis=2) <= 1 + 1e-12)
            foot = np.einsum("psi,sin->psn", lam, E)
            dist = np.linalg.norm(D - foot, axis=2)
            dist = np.where(ok, dist, np.inf)
            best = np.minimum(best, dist)
        return best


@dataclass
class AuditReport:
    samples: int
    violations: int
    max_touching: dict
    examples: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_json(self) -> dict:
        return {"samples": self.samples, "violations": self.violations,
                "max_touching": {str(k): v for k, v in sorted(self.max_touching.items())},
                "passed": self.passed}


class _FloatNeighborhood:
    def __init__(self, N: GradedNeighborhood):
        K = N.complex
        self.levels = []
        for i in range(N.j + 1):
            sims = [[list(map(float, p)) for p in K.vertex_points(s)] for s in K.simplices(i)]
            self.levels.append((float(N.radius(i)), _FloatSimplices(sims)))

    def gap(self, X):
        """min over strata of dist - r (negative inside V)."""
        g = np.full(len(X), np.inf)
        for r, fs in self.levels:
            g = np.minimum(g, fs.distances(X).min(axis=1) - r)
        return g

    def touching(self, X, tol):
        return [((fs.distances(X) - r) <= tol).sum(axis=1) for r, fs in self.levels]


def _exit_points(F: _FloatNeighborhood, starts, dirs, step, tmax):
    """First t > 0 with starts + t dirs on the boundary of V, by marching
    then bisection."""
    n = len(starts)
    lo = np.zeros(n)
    hi = np.full(n, np.nan)
    t = 0.0
    alive = np.ones(n, dtype=bool)
    while alive.any() and t < tmax:
        t += step
        g = F.gap(starts[alive] + t * dirs[alive])
        idx = np.nonzero(alive)[0]
        out = g > 0
        hi[idx[out]] = t
        lo[idx[~out]] = t
        alive[idx[out]] = False
    found = ~np.isnan(hi)
    lo, hi = lo[found], hi[found]
    s, d = starts[found], dirs[found]
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        g = F.gap(s + mid[:, None] * d)
        inside = g <= 0
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    return s + lo[:, None] * d


def boundary_regularity_audit(N: GradedNeighborhood, samples: int = 10_000, rng: np.random.Generator | None = None,
                              adversarial: bool = False, tol: float | None = None) -> AuditReport:
    """Sample boundary points of V_delta and count, per dimension i, the
    i-simplices whose ball has the point on its boundary.  More than one in
    any dimension is a violation.

    Random mode shoots rays from random skeleton points in random directions.
    Adversarial mode shoots along the bisectors between pairs of simplices
    sharing a vertex, where a flat grading (C0 = 1) creates double contacts.
    """
    rng = rng or np.random.default_rng(0)
    K = N.complex
    F = _FloatNeighborhood(N)
    dim = K.ambient_dim
    delta = float(N.delta)
    tol = tol if tol is not None else 1e-9 * delta
    if adversarial:
        starts, dirs = _bisector_rays(N)
    else:
        strata = list(N.strata())
        pick = rng.integers(0, len(strata), size=samples)
        starts = np.empty((samples, dim))
        for a, q in enumerate(pick):
            _, s = strata[q]
            pts = np.array([[float(c) for c in p] for p in K.vertex_points(s)])
            w = rng.dirichlet(np.ones(len(pts)))
            starts[a] = w @ pts
        dirs = rng.normal(size=(samples, dim))
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    step = float(N.radius(N.j)) / 8
    X = _exit_points(F, starts, dirs, step, tmax=4 * delta)
    counts = F.touching(X, tol)
    viol = np.zeros(len(X), dtype=bool)
    max_touch = {}
    for i, c in enumerate(counts):
        viol |= c > 1
        max_touch[i] = int(c.max()) if len(c) else 0
    ex = X[viol][:5].tolist()
    return AuditReport(len(X), int(viol.sum()), max_touch, ex)


def _bisector_rays(N: GradedNeighborhood):
    K = N.complex
    starts, dirs = [], []
    for v in K.simplices(0):
        x = np.array([float(c) for c in K.coords[v[0]]])
        for i in range(1, N.j + 1):
            sims = [s for s in K.simplices(i) if v[0] in s]
            for a, b in itertools.combinations(sims, 2):
                ca = np.mean([[float(c) for c in p] for p in K.vertex_points(a)], axis=0) - x
                cb = np.mean([[float(c) for c in p] for p in K.vertex_points(b)], axis=0) - x
                u = ca / np.linalg.norm(ca) + cb / np.linalg.norm(cb)
                for d in (u, -u):
                    nrm = np.linalg.norm(d)
                    if nrm > 1e-12:
                        starts.append(x)
                        dirs.append(d / nrm)
    return np.array(starts).reshape(-1, K.ambient_dim), np.array(dirs).reshape(-1, K.ambient_dim)


# --- profiles ------------------------------------------------------------------

_BUMP_PREC = 60


def _bump(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1
    out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    return out


def _bump_mass() -> float:
    with mpmath.workdps(_BUMP_PREC):
        return float(mpmath.quad(lambda t: mpmath.exp(-1 / (1 - t * t)), [-1, 0, 1]))


BUMP_MASS = _bump_mass()
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(160)


def _kernel_cdf_and_moment(u, r):
    """For the bump kernel of radius r: P(S <= u) and E[S; S <= u]."""
    u = np.clip(np.asarray(u, dtype=float), -r, r)
    a = -r
    half = (u - a) / 2
    s = a + half[..., None] * (_GL_NODES + 1)  # nodes mapped to [a, u]
    rho = _bump(s / r) / (BUMP_MASS * r)
    w = half[..., None] * _GL_WEIGHTS
    cdf = (rho * w).sum(axis=-1)
    mom = (rho * s * w).sum(axis=-1)
    return cdf, mom


@dataclass(frozen=True)
class ProfileParams:
    mu: float
    delta_a: float
    eta: float

    def __post_init__(self):
        if not 0 <= self.mu <= 1:
            raise ValueError("mu must lie in [0, 1]")
        if self.delta_a <= 0:
            raise ValueError("delta_a must be positive")
        if not 3 * self.delta_a < self.eta:
            raise ValueError("profile needs 3*delta_a < eta")

    @property
    def middle_slope(self) -> float:
        d, e, m = self.delta_a, self.eta, self.mu
        return (e - d - 2 * m * d) / (e - 3 * d)

    @property
    def slope_bound(self) -> float:
        return max(self.mu, self.eta / (self.eta - 3 * self.delta_a))

    @property
    def kernel_radius(self) -> float:
        return self.delta_a / 2

    def breakpoints(self):
        """Odd extension of phi: x + sum_k jump_k (x - b_k)_+ ."""
        d, e, m, s = self.delta_a, self.eta, self.mu, self.middle_slope
        b = [-(e - d), -2 * d, 2 * d, e - d]
        jump = [s - 1, m - s, s - m, 1 - s]
        return b, jump


def phi_profile(params: ProfileParams, t):
    """Piecewise linear profile: mu t, then the connecting slope, then t."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("profile is defined for t >= 0")
    d, e, m = params.delta_a, params.eta, params.mu
    s = params.middle_slope
    out = np.where(t <= 2 * d, m * t, np.where(t <= e - d, s * (t - 2 * d) + 2 * m * d, t))
    return out if out.ndim else float(out)


def smooth_profile(params: ProfileParams, t, derivative: bool = False):
    """psi = (odd extension of phi) convolved with the bump kernel of radius
    delta_a/2; exactly mu t on [0, delta_a] and t beyond eta - delta_a/2."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("profile is defined for t >= 0")
    r = params.kernel_radius
    b, jump = params.breakpoints()
    if derivative:
        val = np.ones_like(t)
    else:
        val = t.copy()
    for bk, jk in zip(b, jump):
        u = t - bk
        if derivative:
            # d/dt E[(u - S)_+] = P(S <= u)
            cdf, _ = _kernel_cdf_and_moment(u, r)
            val = val + jk * np.where(u >= r, 1.0, np.where(u <= -r, 0.0, cdf))
        else:
            cdf, mom = _kernel_cdf_and_moment(u, r)
            g = np.where(u >= r, u, np.where(u <= -r, 0.0, u * cdf - mom))
            val = val + jk * g
    # exact on the linear pieces, where the convolution reproduces phi
    lin_lo = t <= params.delta_a
    lin_hi = t >= params.eta - params.delta_a / 2
    if derivative:
        val = np.where(lin_lo, params.mu, np.where(lin_hi, 1.0, val))
    else:
        val = np.where(lin_lo, params.mu * t, np.where(lin_hi, t, val))
    return val if val.ndim else float(val)


def smooth_profile_quad(params: ProfileParams, t: float) -> float:
    """Independent route for psi(t): adaptive quadrature of the convolution."""
    from scipy.integrate import quad

    r = params.kernel_radius

    def phi_odd(x):
        return math.copysign(float(phi_profile(params, abs(x))), x)

    def integrand(s):
        return phi_odd(t - s) * math.exp(-1.0 / (1.0 - (s / r) ** 2)) / (BUMP_MASS * r)

    b, _ = params.breakpoints()
    pts = sorted({t - bk for bk in b if -r < t - bk < r})
    val, _ = quad(integrand, -r, r, points=pts or None, epsabs=1e-13, epsrel=1e-12, limit=200)
    return val


def radial_squash(params: ProfileParams, x):
    """Psi_mu(x) = psi(|x|) x/|x| row-wise; the origin maps to itself."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    r = np.linalg.norm(x, axis=1)
    out = np.zeros_like(x)
    nz = r > 0
    if nz.any():
        psi = smooth_profile(params, r[nz])
        out[nz] = x[nz] * (psi / r[nz])[:, None]
    return out


def radial_squash_jacobian(params: ProfileParams, x):
    """D Psi at each row of x: (psi/r)(I - yy^T) + psi'(r) yy^T."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    n, d = x.shape
    r = np.linalg.norm(x, axis=1)
    J = np.empty((n, d, d))
    eye = np.eye(d)
    safe = np.where(r > 0, r, 1.0)
    psi = smooth_profile(params, r)
    dpsi = smooth_profile(params, r, derivative=True)
    ratio = np.where(r > 0, psi / safe, params.mu)
    y = x / safe[:, None]
    yy = np.einsum("ni,nj->nij", y, y)
    yy[r == 0] = 0
    J[:] = ratio[:, None, None] * (eye - yy) + dpsi[:, None, None] * yy
    J[r == 0] = params.mu * eye
    return J


def sampled_lipschitz(f, dim: int, rng: np.random.Generator, n: int = 10_000, scale: float = 1.0) -> float:
    """max |f(x) - f(y)| / |x - y| over random nearby pairs."""
    x = rng.uniform(-scale, scale, size=(n, dim))
    h = rng.normal(size=(n, dim))
    h *= (scale * 1e-3 * rng.uniform(0.1, 1, size=n))[:, None] / np.linalg.norm(h, axis=1)[:, None]
    y = x + h
    num = np.linalg.norm(f(x) - f(y), axis=1)
    return float((num / np.linalg.norm(h, axis=1)).max())


# --- mollified distance on the standard simplex ---------------------------------

def dist_to_boundary(x) -> np.ndarray:
    """Distance to the boundary of conv(0, e_1, ..., e_m) for interior points."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    m = x.shape[1]
    far = (1 - x.sum(axis=1)) / math.sqrt(m)
    return np.minimum(x.min(axis=1), far)


def _shell_weights(d, kmax):
    """Partition of unity in u = -log2 d: phi_0 lives on u < 1, phi_k on
    (k, k+2) for k >= 1."""
    u = -np.log2(np.maximum(d, 1e-300))
    chi = []
    t = 1 - u
    chi.append(np.where(t > 0, np.exp(-1 / np.where(t > 0, t, 1)), 0.0))
    for k in range(1, kmax + 1):
        chi.append(_bump(u - k - 1))
    chi = np.array(chi)
    total = chi.sum(axis=0)
    return chi / total


@dataclass
class SimplexDistFunction:
    """f = sum_k phi_k (dist * rho_{c0 2^-k}) on the standard m-simplex."""
    m: int
    c0: float = 1 / 8
    nodes: int = 0
    _kernel: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("the dyadic shells cover the standard simplex only for m >= 2")
        n = self.nodes or {2: 32, 3: 14}.get(self.m, 8)
        g, w = np.polynomial.legendre.leggauss(n)
        grid = np.array(list(itertools.product(g, repeat=self.m)))
        wts = np.prod(np.array(list(itertools.product(w, repeat=self.m))), axis=1)
        rad = np.linalg.norm(grid, axis=1)
        rho = np.where(rad < 1, np.exp(-1 / np.maximum(1 - rad ** 2, 1e-300)), 0.0) * wts
        keep = rho > 0
        grid, rho = grid[keep], rho[keep]
        rho /= rho.sum()  # symmetric, normalized: affine functions are reproduced
        self._kernel = (grid, rho)

    def mollified_dist(self, x, lam) -> np.ndarray:
        grid, rho = self._kernel
        x = np.atleast_2d(x)
        lam = np.broadcast_to(np.asarray(lam, dtype=float), (len(x),))
        pts = x[:, None, :] - lam[:, None, None] * grid[None, :, :]
        d = dist_to_boundary(pts.reshape(-1, self.m)).reshape(len(x), -1)
        return d @ rho

    def __call__(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        d = dist_to_boundary(x)
        if np.any(d < -1e-15):
            raise ValueError("point outside the simplex")
        out = np.zeros(len(x))
        pos = d > 0
        if not pos.any():
            return out
        dp = d[pos]
        kmax = int(np.ceil(-np.log2(dp.min()))) + 2
        W = _shell_weights(dp, kmax)
        acc = np.zeros(len(dp))
        xp = x[pos]
        for k in range(kmax + 1):
            wk = W[k]
            act = wk > 0
            if act.any():
                acc[act] += wk[act] * self.mollified_dist(xp[act], self.c0 * 2.0 ** (-k))
        out[pos] = acc
        return out

    def in_facet_neighborhood(self, x, eps0: float = 1 / 8, C: float = 8.0) -> np.ndarray:
        """Points near an open facet and far (relative to their height) from
        the codimension-two skeleton, where f must equal the distance."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        m = self.m
        heights = np.concatenate([x, ((1 - x.sum(axis=1)) / math.sqrt(m))[:, None]], axis=1)
        order = np.sort(heights, axis=1)
        h1, h2 = order[:, 0], order[:, 1]
        # distance to the (m-2)-skeleton is at least the second smallest height
        return (h1 < eps0) & (h1 > 0) & (C * h1 < h2)


def simplex_dist_function(m: int, x) -> np.ndarray:
    """Mollified distance to the boundary of the standard m-simplex."""
    return SimplexDistFunction(m)(x)


def sample_simplex(m: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform points in conv(0, e_1, ..., e_m)."""
    w = rng.dirichlet(np.ones(m + 1), size=n)
    return w[:, 1:]


# --- mass contraction ------------------------------------------------------------

def proof_constant(m: int, k: int, d: int | None = None) -> float:
    """Dimensional constant from the area-formula argument: sqrt(m-k)^(m-k)
    for the squeezed directions times sqrt(d)^k for the others."""
    d = m if d is None else d
    return math.sqrt(m - k) ** (m - k) * math.sqrt(d) ** k


def _simplex_quadrature(level: int, k: int):
    """Barycentric points and weights of the centroid rule on the regular
    level-fold subdivision of a k-simplex (edgewise subdivision by cubes)."""
    pts, wts = [], []
    # Kuhn simplices of the level^k cube grid whose centroid lies in the
    # chamber x_1 >= ... >= x_k; that chamber is affinely a k-simplex
    for corner in itertools.product(range(level), repeat=k):
        for perm in itertools.permutations(range(k)):
            verts = [np.array(corner, dtype=float)]
            cur = np.array(corner, dtype=float)
            for ax in perm:
                cur = cur.copy()
                cur[ax] += 1
                verts.append(cur)
            c = (np.array(verts) / level).mean(axis=0)
            if all(c[i] >= c[i + 1] for i in range(k - 1)):
                pts.append(c)
                wts.append(1.0)
    pts = np.array(pts)
    wts = np.array(wts) / len(wts)
    # chamber x_1 >= ... >= x_k in [0,1]^k  ->  barycentric (1-x_1, x_1-x_2, ..., x_k)
    bary = np.concatenate([1 - pts[:, :1], pts[:, :-1] - pts[:, 1:], pts[:, -1:]], axis=1)
    return bary, wts


@dataclass
class SquashResult:
    gamma: float
    ratio: float
    bound: float
    mass_before: float
    mass_after: float
    constant: float

    def to_json(self) -> dict:
        return {"gamma": self.gamma, "ratio": self.ratio, "bound": self.bound,
                "mass_in_ball": self.mass_before, "mass_pushed": self.mass_after,
                "C": self.constant}


def mass_contraction_experiment(Z: Chain, k: int, gamma: float, delta: float = 0.25,
                                eta: float = 1.0, delta_a: float | None = None,
                                level: int = 6) -> SquashResult:
    """Push Z restricted to B_delta(K^k) through Phi(x, y) = (x, Psi_gamma(y)),
    where K^k is the span of the first k coordinate axes.

    Mass is integrated numerically: centroid rule on a regular subdivision
    of each simplex, Jacobian factor sqrt(det(E^T DPhi^T DPhi E) / det(E^T E)).
    """
    K = Z.complex
    m = Z.dim
    N = K.ambient_dim
    if not 0 <= k < m:
        raise ValueError("need 0 <= k < m")
    delta_a = delta if delta_a is None else delta_a
    params = ProfileParams(gamma, delta_a, eta)
    bary, wts = _simplex_quadrature(level, m)
    before = 0.0
    after = 0.0
    for s, coef in Z.terms.items():
        P = np.array([[float(c) for c in p] for p in K.vertex_points(s)])
        E = (P[1:] - P[0]).T  # N x m
        base = math.sqrt(abs(np.linalg.det(E.T @ E)))
        vol = base / math.factorial(m)
        X = bary @ P
        y = X[:, k:]
        inside = np.linalg.norm(y, axis=1) < delta
        if not inside.any():
            continue
        D = np.zeros((int(inside.sum()), N, N))
        D[:, :k, :k] = np.eye(k)
        D[:, k:, k:] = radial_squash_jacobian(params, y[inside])
        DE = D @ E
        jac = np.sqrt(np.abs(np.linalg.det(np.einsum("nij,nik->njk", DE, DE)))) / base
        w = wts[inside] * vol * abs(coef)
        before += w.sum()
        after += (w * jac).sum()
    if before == 0:
        raise ValueError("chain does not meet B_delta(K^k)")
    C = proof_constant(m, k, N)
    ratio = after / before
    return SquashResult(gamma, ratio, C * gamma ** (m - k), before, after, C)


def fit_exponent(results: Sequence[SquashResult]) -> float:
    """Least-squares slope of log(ratio) against log(gamma)."""
    g = np.log([r.gamma for r in results])
    v = np.log([r.ratio for r in results])
    return float(np.polyfit(g, v, 1)[0])


def cube_chain(m: int, n: int = 4, half: Fraction = Fraction(1)) -> Chain:
    """Fundamental m-chain of [-half, half]^m cut into n^m Kuhn-triangulated
    cubes, oriented coherently (positive determinant)."""
    coords = []
    index = {}
    for c in itertools.product(range(n + 1), repeat=m):
        index[c] = len(coords)
        coords.append([Fraction(2 * ci, n) * half - half for ci in c])
    simplices = []
    for c in itertools.product(range(n), repeat=m):
        for perm in itertools.permutations(range(m)):
            cur = list(c)
            verts = [index[tuple(cur)]]
            for ax in perm:
                cur[ax] += 1
                verts.append(index[tuple(cur)])
            simplices.append(tuple(verts))
    K = SimplicialComplex(simplices, coords=coords)
    terms = {}
    for s in simplices:
        P = [K.coords[v] for v in s]
        M = [exact.sub(p, P[0]) for p in P[1:]]
        sign = 1 if exact.det(M) > 0 else -1
        terms[s] = sign
    return Chain(K, m, terms)
