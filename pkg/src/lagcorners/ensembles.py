"""Finite-temperature Laguerre beta-corners processes.

Joint density of the corners array, an exact matrix-model sampler for
beta in {1, 2}, the bidiagonal tridiagonal-model sampler of a single
level for any beta > 0, the weighted secular-equation step that grows a
level upward, and the scaling map onto the zero-temperature fluctuation
coordinates.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

__all__ = [
    "CornersSample",
    "log_density",
    "sample_matrix_corners",
    "sample_matrix_corners_batch",
    "tridiagonal_level",
    "tridiagonal_level_batch",
    "secular_roots",
    "sample_upward_step",
    "scaled_fluctuations",
    "write_sample_csv",
    "write_sample_json",
]


@dataclass
class CornersSample:
    """Corners array: levels[k-1] holds the min(N, k) positive values of
    level k in decreasing order.  Zero values of levels k > N are implicit."""

    N: int
    n: int
    levels: list

    def full_level(self, k):
        return np.concatenate([self.levels[k - 1], np.zeros(max(k - self.N, 0))])


def _log_vandermonde(x):
    x = np.asarray(x, dtype=float)
    if len(x) < 2:
        return 0.0
    d = np.abs(x[:, None] - x[None, :])
    iu = np.triu_indices(len(x), k=1)
    return float(np.sum(np.log(d[iu])))


def log_density(sample, beta):
    """Unnormalized log-density of the Laguerre beta-corners array.

    log p = (beta/2 - 1) sum_i log lam_{i,N}            (level N weight)
          - (beta/2) sum_i lam_{i,n}                    (top level)
          + log |Vandermonde(level n)|
          + (2 - beta) sum_{k<n} log |Vandermonde(level k, positive part)|
          + (beta/2 - 1) sum_{k<n} sum_{a,b} log |lam_{a,k} - lam_{b,k+1}|

    with a <= min(k, N), b <= min(k+1, N).  Returns -inf off the
    interlacing support.  Arbitrary normalizing constant.
    """
    N, n = sample.N, sample.n
    if n < N:
        raise ValueError("need n >= N")
    for k in range(1, n):
        up = sample.full_level(k + 1)
        lo = sample.full_level(k)
        if not (np.all(up[:-1] >= lo) and np.all(lo >= up[1:])):
            return -np.inf
    total = 0.0
    lamN = sample.levels[N - 1]
    if np.any(lamN <= 0):
        return -np.inf
    total += (beta / 2.0 - 1.0) * np.sum(np.log(lamN))
    lamn = sample.levels[n - 1]
    total += -(beta / 2.0) * np.sum(lamn)
    total += _log_vandermonde(lamn)
    for k in range(1, n):
        total += (2.0 - beta) * _log_vandermonde(sample.levels[k - 1])
        lo = sample.levels[k - 1]
        up = sample.levels[k]
        cross = np.abs(lo[:, None] - up[None, :])
        total += (beta / 2.0 - 1.0) * float(np.sum(np.log(cross)))
    return float(total)


def _gaussian_matrix(rows, cols, beta, rng):
    if beta == 1:
        return rng.standard_normal((rows, cols))
    if beta == 2:
        return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2.0)
    raise ValueError("matrix model requires beta in {1, 2}")


def sample_matrix_corners(N, n, beta, rng):
    """Corners of the Wishart matrix model at beta = 1 (real) or 2 (complex).

    X is N x n with iid standard entries (complex entries have unit total
    variance); level k is the positive spectrum of the k-column corner
    X_k* X_k.
    """
    N, n = int(N), int(n)
    if n < N:
        raise ValueError("need n >= N")
    X = _gaussian_matrix(N, n, beta, rng)
    levels = []
    for k in range(1, n + 1):
        Xk = X[:, :k]
        if k <= N:
            G = Xk.conj().T @ Xk
        else:
            G = Xk @ Xk.conj().T
        vals = np.linalg.eigvalsh(G)
        levels.append(vals[::-1][: min(N, k)].copy())
    return CornersSample(N=N, n=n, levels=levels)


def sample_matrix_corners_batch(N, n, beta, size, rng):
    """Vectorized matrix-model corners: list over levels of (size, min(N,k))."""
    N, n = int(N), int(n)
    if n < N:
        raise ValueError("need n >= N")
    X = _gaussian_matrix(size * N, n, beta, rng).reshape(size, N, n)
    levels = []
    for k in range(1, n + 1):
        Xk = X[:, :, :k]
        if k <= N:
            G = np.einsum("sik,sil->skl", Xk.conj(), Xk)
        else:
            G = np.einsum("sik,sjk->sij", Xk, Xk.conj())
        vals = np.linalg.eigvalsh(G)
        levels.append(vals[:, ::-1][:, : min(N, k)].copy())
    return levels


def _tridiag_from_bidiag(d, e):
    """Tridiagonal entries of B B^T for a lower bidiagonal B."""
    diag = d**2
    diag[1:] += e**2
    off = e * d[:-1]
    return diag, off


def tridiagonal_level(k, N, beta, rng):
    """One level of the corners process from the bidiagonal model.

    With M = min(N, k) and alpha = |N - k|, B is M x M lower bidiagonal
    with diagonal chi_{beta(alpha+M)}, ..., chi_{beta(alpha+1)} and
    subdiagonal chi_{beta(M-1)}, ..., chi_beta; the level is the spectrum
    of B B^T / beta, decreasing.  Valid for any beta > 0.
    """
    k, N = int(k), int(N)
    if beta <= 0:
        raise ValueError("beta must be positive")
    M = min(N, k)
    alpha = abs(N - k)
    d = np.sqrt(rng.chisquare(beta * (alpha + np.arange(M, 0, -1))))
    e = np.sqrt(rng.chisquare(beta * np.arange(M - 1, 0, -1))) if M > 1 else np.zeros(0)
    diag, off = _tridiag_from_bidiag(d, e)
    vals = eigh_tridiagonal(diag, off, eigvals_only=True) / beta
    return vals[::-1].copy()


def tridiagonal_level_batch(k, N, beta, size, rng):
    """Vectorized bidiagonal-model sampler, (size, min(N, k)) decreasing."""
    k, N = int(k), int(N)
    if beta <= 0:
        raise ValueError("beta must be positive")
    M = min(N, k)
    alpha = abs(N - k)
    d = np.sqrt(rng.chisquare(beta * (alpha + np.arange(M, 0, -1)), size=(size, M)))
    if M > 1:
        e = np.sqrt(rng.chisquare(beta * np.arange(M - 1, 0, -1), size=(size, M - 1)))
    else:
        e = np.zeros((size, 0))
    T = np.zeros((size, M, M))
    ii = np.arange(M)
    T[:, ii, ii] = d**2
    if M > 1:
        T[:, ii[1:], ii[1:]] += e**2
        off = e * d[:, :-1]
        T[:, ii[1:], ii[:-1]] = off
        T[:, ii[:-1], ii[1:]] = off
    vals = np.linalg.eigvalsh(T) / beta
    return vals[:, ::-1].copy()


def _root_in_gap(f, lo_pole, hi_pole, hi_is_pole=True):
    """Bracketed secular root in (lo_pole, hi_pole); f blows to -inf at the
    lower pole and, when hi_is_pole, to +inf at the upper one."""
    lo = np.nextafter(lo_pole, np.inf)
    hi = np.nextafter(hi_pole, -np.inf) if hi_is_pole else hi_pole
    gap = hi_pole - lo_pole
    step = 1e-15 * gap
    while f(lo) >= 0.0:
        lo = lo_pole + step
        step *= 4.0
        if lo >= hi:
            raise RuntimeError("failed to bracket secular root from below")
    while hi_is_pole and f(hi) <= 0.0:
        hi = hi_pole - step
        step *= 4.0
        if hi <= lo:
            raise RuntimeError("failed to bracket secular root from above")
    return brentq(f, lo, hi, xtol=1e-250, rtol=8.9e-16)


def secular_roots(level, w):
    """Roots of 1 - sum_i w_i / (z - lam_i) = 0, decreasing.

    ``level`` is a decreasing array of distinct lam_i and ``w`` matching
    nonnegative weights.  With all weights positive there is exactly one
    root in each gap (lam_{i+1}, lam_i) and one in (lam_1, lam_1 + sum w];
    a zero weight w_i pins a root at lam_i.  The roots satisfy the trace
    identity sum(roots) = sum(level) + sum(w).
    """
    lam = np.asarray(level, dtype=float)
    w = np.asarray(w, dtype=float)
    if np.any(w < 0.0):
        raise ValueError("weights must be nonnegative")
    pos = np.flatnonzero(w > 0.0)
    pinned = lam[w == 0.0]
    if len(pos) == 0:
        return lam.copy()
    lp = lam[pos]
    wp = w[pos]

    def f(z):
        return 1.0 - np.sum(wp / (z - lp))

    total = float(np.sum(wp))
    m = len(lp)
    roots = np.empty(m)
    roots[0] = _root_in_gap(f, lp[0], lp[0] + total + 1.0, hi_is_pole=False)
    for i in range(1, m):
        roots[i] = _root_in_gap(f, lp[i], lp[i - 1])
    out = np.concatenate([roots, pinned])
    return np.sort(out)[::-1]


def sample_upward_step(level, beta, rng):
    """Grow level lam^k (k >= N particles) to level lam^{k+1}.

    Independent weights w_i ~ Gamma(beta/2, scale 2/beta) attach to the
    current particles and the new level is the root set of the secular
    equation 1 = sum_i w_i / (z - lam_i), which interlaces with the old
    level from above.  Both levels carry the same number of particles.
    """
    lam = np.asarray(level, dtype=float)
    if beta <= 0:
        raise ValueError("beta must be positive")
    w = rng.gamma(shape=beta / 2.0, scale=2.0 / beta, size=len(lam))
    return secular_roots(lam, w)


def scaled_fluctuations(sample, crys, beta):
    """Map a corners sample to fluctuation coordinates
    xi_{a,k} = sqrt(beta) (lam_{a,k} - l_{a,k}) around the root crystal."""
    if (sample.N, sample.n) != (crys.N, crys.n):
        raise ValueError("sample and crystal shapes disagree")
    out = []
    for k in range(1, sample.n + 1):
        out.append(np.sqrt(beta) * (sample.levels[k - 1] - crys.nonzero_roots(k)))
    return out


def _sample_rows(sample):
    rows = []
    for k in range(1, sample.n + 1):
        for i, v in enumerate(sample.levels[k - 1], start=1):
            rows.append((k, i, float(v)))
    return rows


def write_sample_csv(sample, path, comments=()):
    """Write a corners sample as CSV rows (k, i, value) with 17 significant
    digits; lines starting with '#' carry metadata comments."""
    with open(path, "w", newline="") as fh:
        for c in comments:
            fh.write(f"# {c}\n")
        writer = csv.writer(fh)
        writer.writerow(["k", "i", "value"])
        for k, i, v in _sample_rows(sample):
            writer.writerow([k, i, f"{v:.17g}"])


def write_sample_json(sample, path, meta=None):
    """Write a corners sample as JSON with full float precision."""
    obj = {
        "N": sample.N,
        "n": sample.n,
        "levels": [list(map(float, lv)) for lv in sample.levels],
    }
    if meta:
        obj["meta"] = meta
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1)
        fh.write("\n")
