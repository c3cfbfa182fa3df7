"""Special-function kernels shared by the rest of the package.

Generalized Laguerre polynomials (including negative integer parameters via
the reflection identity), their roots through the Jacobi-matrix eigenproblem,
integer-order Bessel functions of the first kind, Bessel zero tables with a
sign convention for negative orders that pads leading zeros, and normalized
Fourier-Bessel functions.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special
from scipy.linalg import eigh_tridiagonal

__all__ = [
    "laguerre_eval",
    "monic_laguerre_eval",
    "laguerre_roots",
    "bessel_j",
    "bessel_j_deriv",
    "BesselZeroTable",
    "bessel_zeros",
    "bessel_zero",
    "fourier_bessel",
]


def _laguerre_recurrence(n, alpha, x):
    """Evaluate L_n^{(alpha)}(x) by the three-term recurrence in the degree."""
    x = np.asarray(x, dtype=float)
    if n == 0:
        return np.ones_like(x)
    p_prev = np.ones_like(x)
    p_curr = 1.0 + alpha - x
    for m in range(1, n):
        p_next = ((2 * m + 1 + alpha - x) * p_curr - (m + alpha) * p_prev) / (m + 1)
        p_prev, p_curr = p_curr, p_next
    return p_curr


def laguerre_eval(n, alpha, x):
    """Generalized Laguerre polynomial L_n^{(alpha)}(x).

    ``alpha`` may be any integer.  For negative alpha = -a with n >= a the
    reflection identity

        L_{m+a}^{(-a)}(x) = (m! / (m+a)!) * (-x)^a * L_m^{(a)}(x),  m = n - a,

    is used, which keeps the monic normalization consistent with the
    positive-parameter family.  Scalar or array ``x``; returns an array of
    the same shape (0-d array for scalar input).
    """
    n = int(n)
    alpha = int(alpha)
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if alpha >= 0 or n < -alpha:
        return _laguerre_recurrence(n, alpha, x)
    a = -alpha
    m = n - a
    x = np.asarray(x, dtype=float)
    lgrat = special.gammaln(m + 1) - special.gammaln(n + 1)
    return np.exp(lgrat) * (-x) ** a * _laguerre_recurrence(m, a, x)


def monic_laguerre_eval(n, alpha, x):
    """Monic companion (-1)^n n! L_n^{(alpha)}(x) of the Laguerre polynomial.

    Overflows for n beyond about 170; intended for moderate degrees.
    """
    return (-1.0) ** n * special.factorial(n, exact=True) * laguerre_eval(n, alpha, x)


def laguerre_roots(n, alpha):
    """Roots of L_n^{(alpha)}(x) in decreasing order.

    For alpha >= 0 the roots are the eigenvalues of the symmetric Jacobi
    matrix with diagonal 2i+1+alpha and off-diagonal sqrt(i(i+alpha)).  For
    alpha = -a < 0 (requires n >= a) the root multiset is the roots of
    L_{n-a}^{(a)} together with a zero of multiplicity a, appended at the
    end so the decreasing order is preserved.
    """
    n = int(n)
    alpha = int(alpha)
    if n < 1:
        raise ValueError("degree must be at least 1")
    if alpha < 0:
        a = -alpha
        if n < a:
            raise ValueError("negative parameter requires degree >= -alpha")
        if n == a:
            return np.zeros(n)
        pos = laguerre_roots(n - a, a)
        return np.concatenate([pos, np.zeros(a)])
    diag = 2.0 * np.arange(n) + 1.0 + alpha
    i = np.arange(1, n)
    off = np.sqrt(i * (i + alpha))
    vals = eigh_tridiagonal(diag, off, eigvals_only=True)
    return vals[::-1].copy()


def bessel_j(v, x):
    """Bessel function J_v(x) for integer order v, using J_{-v} = (-1)^v J_v."""
    v = int(v)
    if v >= 0:
        return special.jv(v, x)
    return (-1.0) ** v * special.jv(-v, x)


def bessel_j_deriv(v, x):
    """Derivative J_v'(x) from the two-sided recurrence."""
    v = int(v)
    return 0.5 * (bessel_j(v - 1, x) - bessel_j(v + 1, x))


@dataclass(frozen=True)
class BesselZeroTable:
    """First ``count`` nonnegative zeros j_{1,v} <= j_{2,v} <= ... of J_v.

    For v < 0 the convention pads -v leading exact zeros, j_{b,v} = 0 for
    b <= -v, and j_{b,v} = j_{b+v,-v} beyond them, matching the reflection
    J_{-v} = (-1)^v J_v (which makes 0 a zero of order -v).
    """

    order: int
    zeros: np.ndarray

    @property
    def count(self):
        return len(self.zeros)

    @property
    def num_padded(self):
        """How many leading entries are the exact zero at the origin."""
        return min(max(-self.order, 0), len(self.zeros))


@lru_cache(maxsize=256)
def _zeros_cached(v, count):
    if v >= 0:
        z = special.jn_zeros(v, count) if count > 0 else np.zeros(0)
    else:
        a = -v
        npad = min(a, count)
        npos = count - npad
        pos = special.jn_zeros(a, npos) if npos > 0 else np.zeros(0)
        z = np.concatenate([np.zeros(npad), pos])
    z.setflags(write=False)
    return z


def bessel_zeros(v, count):
    """Zero table for integer order v with ``count`` entries."""
    v = int(v)
    count = int(count)
    if count < 0:
        raise ValueError("count must be nonnegative")
    return BesselZeroTable(order=v, zeros=_zeros_cached(v, count))


def bessel_zero(b, v):
    """Single zero j_{b,v} (1-based index b)."""
    b = int(b)
    if b < 1:
        raise ValueError("zero index must be at least 1")
    return float(_zeros_cached(int(v), b)[b - 1])


def fourier_bessel(b, v, y):
    """Normalized Fourier-Bessel function J_v(j_{b,v} y) / J_v'(j_{b,v}).

    Satisfies 2*int_0^1 fourier_bessel(b,v,z)^2 z dz = 1 and vanishes at
    y = 1.  Undefined when j_{b,v} = 0 (padded zero of a negative order).
    """
    j = bessel_zero(b, v)
    if j == 0.0:
        raise ValueError("fourier_bessel undefined at a padded zero index")
    return bessel_j(v, j * np.asarray(y, dtype=float)) / bessel_j_deriv(v, j)
