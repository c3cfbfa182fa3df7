"""Zero-temperature (Gaussian) limit of the Laguerre corners process.

The particle array freezes onto the crystal of Laguerre roots
l_{i,k} = i-th largest root of L_k^{(N-k)}, and the centered fluctuations
xi_{i,k} form a Gaussian field.  This module builds the crystal, the
inverse-square jump kernels between consecutive levels, the discrete dual
orthogonal polynomial family that diagonalizes them, the resulting spectral
covariance engine, a precision-matrix oracle assembled directly from the
limiting density, and an exact sampler of the field.

Levels are indexed k = 1..n; level k carries min(N, k) positive roots and,
when k > N, a zero root of multiplicity k - N.  Root indices are 1-based
and count from the largest root down, with the zero roots last.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import special
from scipy.linalg import cho_factor, cho_solve, eigh_tridiagonal

__all__ = [
    "CrystalTable",
    "crystal",
    "Kernel",
    "transition_matrix",
    "diffusion_kernel",
    "diffusion_kernel_spectral",
    "DualPolyTable",
    "dual_polys",
    "dual_poly_eval",
    "dual_poly_contour",
    "apply_Dk",
    "eta_variance",
    "covariance",
    "covariance_matrix",
    "top_level_covariance",
    "precision_matrix",
    "precision_covariance",
    "field_index",
    "sample_infinity_corners",
]


@dataclass
class CrystalTable:
    """Laguerre root crystal for N particle columns and n levels.

    ``nonzero_roots(k)`` returns the min(N, k) positive roots of
    L_k^{(N-k)} in decreasing order; ``full_roots(k)`` appends the zero
    root with multiplicity max(k - N, 0).  Levels are computed lazily and
    cached, so large-N tables only pay for the levels actually used.

    Each level is realized as the eigendecomposition of the symmetric
    tridiagonal Jacobi matrix of the dual polynomial recurrence (diagonal
    N+k-2m-1, off-diagonal sqrt((k-m)(N-m))), whose spectrum is exactly
    the positive root set and whose orthonormal eigenvectors carry the
    normalized dual polynomial values.  Taking roots and polynomial
    values from one backward-stable decomposition keeps the jump-operator
    diagonalization identity valid to machine precision; evaluating the
    polynomials by recurrence at separately computed roots loses up to
    eleven digits at the top degrees.
    """

    N: int
    n: int
    _levels: dict = field(default_factory=dict, repr=False)
    _duals: dict = field(default_factory=dict, repr=False)

    def _level_data(self, k):
        if not 1 <= k <= self.n + 1:
            raise ValueError(f"level {k} outside 1..{self.n + 1}")
        if k not in self._levels:
            N = self.N
            M = min(N, k)
            ms = np.arange(M)
            diag = (N + k - 2.0 * ms - 1.0)
            mo = np.arange(1, M)
            off = np.sqrt((k - mo) * (N - mo) * 1.0)
            if M > 1:
                vals, vecs = eigh_tridiagonal(diag, off)
            else:
                vals, vecs = diag.copy(), np.ones((1, 1))
            order = np.argsort(vals)[::-1]
            roots = vals[order]
            V = vecs[:, order] * np.sign(vecs[0, order])
            # Gauss weights of the discrete orthogonality measure l/(k+1)
            w = (k * N / (k + 1.0)) * V[0] ** 2
            self._levels[k] = (roots, w, V / np.sqrt(w))
        return self._levels[k]

    def nonzero_roots(self, k):
        return self._level_data(k)[0]

    def zero_multiplicity(self, k):
        return max(k - self.N, 0)

    def full_roots(self, k):
        return np.concatenate([self.nonzero_roots(k), np.zeros(self.zero_multiplicity(k))])

    def root(self, a, k):
        """Root l_{a,k}, 1-based index from the largest down."""
        if not 1 <= a <= k:
            raise ValueError(f"root index {a} outside 1..{k}")
        if a > min(self.N, k):
            return 0.0
        return float(self.nonzero_roots(k)[a - 1])


def crystal(N, n):
    """Build a lazy crystal table; requires N >= 1, n >= 1."""
    N, n = int(N), int(n)
    if N < 1 or n < 1:
        raise ValueError("N and n must be at least 1")
    return CrystalTable(N=N, n=n)


@dataclass(frozen=True)
class Kernel:
    """Row-stochastic transition matrix between two crystal levels.

    ``matrix[a-1, b-1]`` is the jump probability from the a-th root of
    level ``k_from`` to the b-th root of level ``k_to`` (full root lists,
    zero roots included with multiplicity).
    """

    k_from: int
    k_to: int
    matrix: np.ndarray


def transition_matrix(k, crys):
    """One-step downward-in-index kernel from level k to level k+1.

    From a positive root x the jump probability to target root l' is
    (x - l')^{-2} / ((k+1)/x); the denominator is the closed-form row sum
    of the inverse squares over all k+1 targets.  From a zero root (only
    present when k > N) the jump is uniform over the k+1-N zero roots of
    level k+1.
    """
    N = crys.N
    if not 1 <= k <= crys.n - 1:
        raise ValueError("need 1 <= k <= n-1")
    src = crys.full_roots(k)
    tgt = crys.full_roots(k + 1)
    m = np.zeros((k, k + 1))
    npos_src = min(N, k)
    npos_tgt = min(N, k + 1)
    for a in range(npos_src):
        x = src[a]
        m[a] = (x / (k + 1)) / (x - tgt) ** 2
    if k > N:
        nz = (k + 1) - npos_tgt
        m[npos_src:, npos_tgt:] = 1.0 / nz
    return Kernel(k_from=k, k_to=k + 1, matrix=m)


def diffusion_kernel(k, l, crys):
    """Multi-step kernel from level k to level l >= k by composing one-step kernels."""
    if not 1 <= k <= l <= crys.n:
        raise ValueError("need 1 <= k <= l <= n")
    m = np.eye(k)
    for j in range(k, l):
        m = m @ transition_matrix(j, crys).matrix
    return Kernel(k_from=k, k_to=l, matrix=m)


def _log_pochhammer(a, m):
    """log of (a)_m = a (a+1) ... (a+m-1) for a >= 1, m >= 1."""
    return special.gammaln(a + m) - special.gammaln(a)


@dataclass(frozen=True)
class DualPolyTable:
    """Discrete dual orthogonal polynomials of level k.

    ``values[m, a]`` is the orthonormalized polynomial Qt_m evaluated at
    the (a+1)-th positive root of the level, m = 0..min(N,k)-1.  The family
    is orthonormal for the weight l/(k+1) on the positive roots.  ``norms``
    are the squared norms of the monic family for that weight,
    (k-m)_{m+1} (N-m)_{m+1} / (k+1); they overflow to inf for large
    degrees, where only the normalized values are meaningful.
    """

    k: int
    N: int
    values: np.ndarray
    norms: np.ndarray

    @property
    def num(self):
        return self.values.shape[0]


def dual_polys(k, crys):
    """Dual polynomial table at level k, cached on the crystal."""
    if k in crys._duals:
        return crys._duals[k]
    N = crys.N
    M = min(N, k)
    vals = crys._level_data(k)[2].copy()
    ms = np.arange(M)
    log_norms = (
        _log_pochhammer(k - ms, ms + 1) + _log_pochhammer(N - ms, ms + 1) - np.log(k + 1.0)
    )
    with np.errstate(over="ignore"):
        norms = np.exp(log_norms)
    tab = DualPolyTable(k=k, N=N, values=vals, norms=norms)
    crys._duals[k] = tab
    return tab


def dual_poly_eval(m, k, N, x):
    """Monic dual polynomial Q_m of level k at arbitrary points x.

    Three-term recurrence Q_{m+1} = (x - (N+k-2m-1)) Q_m - (k-m)(N-m) Q_{m-1}
    with Q_0 = 1.  Intended for moderate m (values grow factorially).
    """
    x = np.asarray(x, dtype=float)
    q_prev = np.zeros_like(x)
    q_curr = np.ones_like(x)
    for i in range(m):
        q_next = (x - (N + k - 2 * i - 1)) * q_curr - (k - i) * (N - i) * q_prev
        q_prev, q_curr = q_curr, q_next
    return q_curr


def dual_poly_contour(m, k, N, x, num_outer=600, num_inner=200):
    """Contour-integral cross-check of the monic dual polynomial.

    Evaluates (-1)^m (min(k,N)-m)_{m+1} / (2 pi i) times the contour
    integral over |t| = 1/2 of

        int_0^t f(x,s) s^{-m} ds / (f(x,t) s(1-s) t(1-t)),

    with f(x,s) = exp(x/(1-s)) (1-s)^{|k-N|} s^{min(k,N)}, by trapezoidal
    quadrature in the angle and Gauss-Legendre on the radial segment.
    Intended only as a small-size numerical check of ``dual_poly_eval``.
    """
    M = min(k, N)
    alpha = abs(k - N)
    if not 0 <= m < M:
        raise ValueError("need 0 <= m < min(k, N)")
    theta = 2.0 * np.pi * (np.arange(num_outer) + 0.5) / num_outer
    t = 0.5 * np.exp(1j * theta)
    nodes, weights = np.polynomial.legendre.leggauss(num_inner)
    # map [-1, 1] to the segment [0, t] for every t at once
    s = 0.5 * (nodes[None, :] + 1.0) * t[:, None]
    ds = 0.5 * t[:, None] * weights[None, :]

    def f(z):
        return np.exp(x / (1.0 - z)) * (1.0 - z) ** alpha * z**M

    inner = np.sum(f(s) * s ** (-m) / (s * (1.0 - s)) * ds, axis=1)
    dt = 1j * t * (2.0 * np.pi / num_outer)
    outer = np.sum(inner / (f(t) * t * (1.0 - t)) * dt)
    poch = np.exp(_log_pochhammer(M - m, m + 1))
    return ((-1.0) ** m * poch * outer / (2j * np.pi)).real


def apply_Dk(f_values, k, crys, rtol=1e-9):
    """Apply the level-raising jump operator to a function on level-k roots.

    ``f_values`` gives f at the full root list of level k (zero roots
    included with multiplicity); entries at equal roots must agree.  The
    result is (D_k f)(y) = sum_x P_k(x -> y) f(x) on the full root list of
    level k+1.  D_k maps polynomials of degree m to polynomials of degree
    m with leading coefficient multiplied by 1 - (m+1)/(k+1); in
    particular the monic dual polynomials satisfy
    D_k Q_m^{(k)} = (1 - (m+1)/(k+1)) Q_m^{(k+1)}.
    """
    f = np.asarray(f_values, dtype=float)
    if f.shape != (k,):
        raise ValueError(f"expected {k} values for level {k}")
    nz = crys.zero_multiplicity(k)
    if nz > 1:
        zvals = f[k - nz :]
        scale = max(np.max(np.abs(f)), 1.0)
        if np.max(np.abs(zvals - zvals[0])) > rtol * scale:
            raise ValueError("function values at the repeated zero root must agree")
    return transition_matrix(k, crys).matrix.T @ f


def _cumprod_factors(k, rmax, mmax):
    """c[m, r-k] = prod_{j=k}^{r-1} (1 - (m+1)/(j+1)), for r = k..rmax.

    The r = k column is 1 (empty product).
    """
    ms = np.arange(mmax)
    js = np.arange(k, rmax)
    if len(js) == 0:
        return np.ones((mmax, 1))
    fac = 1.0 - (ms[:, None] + 1.0) / (js[None, :] + 1.0)
    out = np.ones((mmax, rmax - k + 1))
    out[:, 1:] = np.cumprod(fac, axis=1)
    return out


def diffusion_kernel_spectral(k, r, crys):
    """Spectral form of the k -> r kernel restricted to positive roots.

    K(a -> b) = l_{a,k} / sqrt((k+1)(r+1)) * sum_m Qt_m^{(r)}(l_{b,r})
    Qt_m^{(k)}(l_{a,k}) prod_{j=k}^{r-1} (1 - (m+1)/(j+1))^{1/2},
    with m over 0..min(N,k)-1.  Agrees with the positive-root block of
    ``diffusion_kernel``.
    """
    if not 1 <= k <= r <= crys.n:
        raise ValueError("need 1 <= k <= r <= n")
    N = crys.N
    mmax = min(N, k)
    qk = dual_polys(k, crys).values
    qr = dual_polys(r, crys).values[:mmax]
    fac = np.sqrt(_cumprod_factors(k, r, mmax)[:, -1])
    lk = crys.nonzero_roots(k)
    core = np.einsum("ma,m,mb->ab", qk, fac, qr)
    return lk[:, None] * core / np.sqrt((k + 1.0) * (r + 1.0))


def eta_variance(a, k, crys):
    """Variance 2 l_{a,k} / (k+1) of the one-step innovation at root (a, k)."""
    return 2.0 * crys.root(a, k) / (k + 1.0)


def covariance(a, k, a2, k2, crys):
    """Covariance of the Gaussian fluctuations xi_{a,k} and xi_{a2,k2}.

    Spectral summation over the dual polynomial family: with k >= k2,

        cov = pref * sum_m Qt_m^{(k)}(l_{a,k}) Qt_m^{(k2)}(l_{a2,k2}) / (m+1)
                     * c_k(m, n) c_{k2}(m, n)
            + pref * sum_{r=k}^{n-1} 1/(r+1)
                     sum_m Qt_m^{(k)} Qt_m^{(k2)} c_k(m, r) c_{k2}(m, r)

    where pref = 2 l_{a,k} l_{a2,k2} / sqrt((k+1)(k2+1)),
    c_k(m, r) = prod_{j=k}^{r-1} (1 - (m+1)/(j+1))^{1/2}, and m runs over
    0..min(N,k2)-1.  Fluctuations at zero roots vanish identically.
    """
    if k2 > k:
        a, k, a2, k2 = a2, k2, a, k
    N, n = crys.N, crys.n
    if a > min(N, k) or a2 > min(N, k2):
        return 0.0
    l1 = crys.root(a, k)
    l2 = crys.root(a2, k2)
    mmax = min(N, k2)
    q1 = dual_polys(k, crys).values[:mmax, a - 1]
    q2 = dual_polys(k2, crys).values[:mmax, a2 - 1]
    c1 = np.sqrt(_cumprod_factors(k, n, mmax))
    c2full = np.sqrt(_cumprod_factors(k2, n, mmax))
    c2 = c2full[:, k - k2 :]
    pref = 2.0 * l1 * l2 / np.sqrt((k + 1.0) * (k2 + 1.0))
    qq = q1 * q2
    term1 = np.sum(qq / (np.arange(mmax) + 1.0) * c1[:, -1] * c2[:, -1])
    rs = np.arange(k, n)
    inner = qq @ (c1[:, :-1] * c2[:, :-1])
    term2 = np.sum(inner / (rs + 1.0))
    return pref * (term1 + term2)


def field_index(crys):
    """Flat enumeration [(a, k)] of the fluctuation coordinates.

    Levels k = 1..n, positive-root indices a = 1..min(N, k); zero roots
    carry no fluctuation and are excluded.
    """
    return [(a, k) for k in range(1, crys.n + 1) for a in range(1, min(crys.N, k) + 1)]


def covariance_matrix(crys):
    """Full covariance matrix of the field over ``field_index`` order."""
    idx = field_index(crys)
    d = len(idx)
    cov = np.zeros((d, d))
    for i, (a, k) in enumerate(idx):
        for j in range(i, d):
            a2, k2 = idx[j]
            cov[i, j] = cov[j, i] = covariance(a, k, a2, k2, crys)
    return cov


def top_level_covariance(crys):
    """Covariance of the top-level fluctuations xi_{., n} in eigenform.

    cov(xi_{b,n}, xi_{b',n}) = 2 l_b l_b' / (n+1) * sum_m Qt_m(l_b)
    Qt_m(l_b') / (m+1), the dual polynomials diagonalizing the single-level
    covariance with eigenvalues 1/2, 1/4, ..., 1/(2 min(N,n)).
    """
    n = crys.n
    tab = dual_polys(n, crys)
    l = crys.nonzero_roots(n)
    M = tab.num
    w = 1.0 / (np.arange(M) + 1.0)
    core = np.einsum("ma,m,mb->ab", tab.values, w, tab.values)
    return 2.0 * np.outer(l, l) * core / (n + 1.0)


def precision_matrix(crys):
    """Precision matrix of the fluctuation field from the limiting density.

    The density of the field is proportional to exp(-Q(xi)) with

        Q = 1/4 sum_{i<=N} (xi_{i,N} / l_{i,N})^2
          - 1/2 sum_{k<n} sum_{i<j<=min(N,k)}
                ((xi_{i,k} - xi_{j,k}) / (l_{i,k} - l_{j,k}))^2
          + 1/4 sum_{k<n} sum_{a<=min(N,k)} sum_{b<=min(N,k+1)}
                ((xi_{a,k} - xi_{b,k+1}) / (l_{a,k} - l_{b,k+1}))^2,

    assembled as the Hessian of Q over ``field_index`` order.  This is the
    independent oracle route: its inverse must match the spectral engine.
    """
    N, n = crys.N, crys.n
    idx = field_index(crys)
    pos = {ak: i for i, ak in enumerate(idx)}
    d = len(idx)
    P = np.zeros((d, d))
    # diagonal weight term at level N
    lN = crys.nonzero_roots(N)
    for i in range(1, N + 1):
        p = pos[(i, N)]
        P[p, p] += 0.5 / lN[i - 1] ** 2
    for k in range(1, n):
        lk = crys.nonzero_roots(k)
        Mk = min(N, k)
        # repulsive intra-level term
        for i in range(Mk):
            for j in range(i + 1, Mk):
                w = 1.0 / (lk[i] - lk[j]) ** 2
                pi, pj = pos[(i + 1, k)], pos[(j + 1, k)]
                P[pi, pi] -= w
                P[pj, pj] -= w
                P[pi, pj] += w
                P[pj, pi] += w
        # attractive cross-level term
        lk1 = crys.nonzero_roots(k + 1)
        Mk1 = min(N, k + 1)
        for a in range(Mk):
            pa = pos[(a + 1, k)]
            for b in range(Mk1):
                w = 0.5 / (lk[a] - lk1[b]) ** 2
                pb = pos[(b + 1, k + 1)]
                P[pa, pa] += w
                P[pb, pb] += w
                P[pa, pb] -= w
                P[pb, pa] -= w
    return P


def precision_covariance(crys):
    """Covariance oracle: Cholesky-based inverse of ``precision_matrix``."""
    P = precision_matrix(crys)
    c, low = cho_factor(P)
    return cho_solve((c, low), np.eye(P.shape[0]))


def sample_infinity_corners(crys, rng, size=1):
    """Exact sampler of the Gaussian fluctuation field.

    The top level is drawn through the eigen-decomposition of its
    covariance, xi_{b,n} = sum_m sqrt(2/((n+1)(m+1))) l_b Qt_m(l_b) z_m
    with iid standard normals z_m, then propagated downward level by level
    as xi^k = A_k xi^{k+1} + eta^k with A_k the one-step kernel and
    independent innovations eta_{a,k} ~ N(0, 2 l_{a,k}/(k+1)).

    Returns a list indexed by level k-1 of arrays of shape
    (size, min(N, k)) holding the positive-root fluctuations.
    """
    N, n = crys.N, crys.n
    tab = dual_polys(n, crys)
    M = tab.num
    l = crys.nonzero_roots(n)
    coef = np.sqrt(2.0 / ((n + 1.0) * (np.arange(M) + 1.0)))
    z = rng.standard_normal((size, M))
    top = (z * coef) @ tab.values * l
    out = [None] * n
    full = np.zeros((size, n))
    full[:, :M] = top
    out[n - 1] = top
    cur = full
    for k in range(n - 1, 0, -1):
        A = transition_matrix(k, crys).matrix
        Mk = min(N, k)
        lk = crys.nonzero_roots(k)
        eta = rng.standard_normal((size, Mk)) * np.sqrt(2.0 * lk / (k + 1.0))
        nxt = cur @ A.T
        nxt[:, :Mk] += eta
        nxt[:, Mk:] = 0.0
        out[k - 1] = nxt[:, :Mk].copy()
        cur = nxt
    return out
