"""
Chebyshev machinery on the strip interval y in [-a, 0].

Functions are expanded in T_q((2y + a)/a), q = 0..N_y, and collocated at
the extrema grid y_r = (a/2)(cos(pi r / N_y) - 1), so r = 0 is the top
(y = 0) and r = N_y the bottom (y = -a). All transforms act on the last
axis of their argument.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.fft import dct


def nodes(n_y: int, a: float) -> np.ndarray:
    """Collocation points y_r, r = 0..n_y (descending from 0 to -a)."""
    if n_y == 0:
        return np.zeros(1)
    r = np.arange(n_y + 1)
    return 0.5 * a * (np.cos(np.pi * r / n_y) - 1.0)


def to_unit(y, a: float):
    """Map y in [-a, 0] to x = (2y + a)/a in [-1, 1]."""
    return (2.0 * np.asarray(y) + a) / a


def values_to_coeffs(v: np.ndarray) -> np.ndarray:
    """Chebyshev coefficients from values on the extrema grid (DCT-I)."""
    v = np.asarray(v)
    n_y = v.shape[-1] - 1
    if n_y == 0:
        return v.copy()
    if np.iscomplexobj(v):
        c = dct(v.real, type=1, axis=-1) + 1j * dct(v.imag, type=1, axis=-1)
    else:
        c = dct(v, type=1, axis=-1)
    c = c / n_y
    c[..., 0] *= 0.5
    c[..., -1] *= 0.5
    return c


def coeffs_to_values(c: np.ndarray) -> np.ndarray:
    """Values on the extrema grid from Chebyshev coefficients."""
    c = np.asarray(c)
    n_y = c.shape[-1] - 1
    if n_y == 0:
        return c.copy()
    if np.iscomplexobj(c):
        s = dct(c.real, type=1, axis=-1) + 1j * dct(c.imag, type=1, axis=-1)
    else:
        s = dct(c, type=1, axis=-1)
    sign = (-1.0) ** np.arange(n_y + 1)
    return 0.5 * (s + c[..., :1] + c[..., -1:] * sign)


def diff_coeffs(c: np.ndarray, a: float) -> np.ndarray:
    """Coefficients of d/dy by the backward recurrence.

    c'_{q-1} = c'_{q+1} + 2 q c_q, with c'_0 halved, then the chain-rule
    factor 2/a for the map y -> (2y + a)/a.
    """
    c = np.asarray(c)
    n_y = c.shape[-1] - 1
    out = np.zeros_like(c)
    if n_y == 0:
        return out
    out[..., n_y - 1] = 2 * n_y * c[..., n_y]
    for q in range(n_y - 1, 0, -1):
        out[..., q - 1] = out[..., q + 1] + 2 * q * c[..., q]
    out[..., 0] *= 0.5
    return out * (2.0 / a)


def diff_values(v: np.ndarray, a: float) -> np.ndarray:
    """d/dy of grid values, computed spectrally."""
    return coeffs_to_values(diff_coeffs(values_to_coeffs(v), a))


def evaluate(c: np.ndarray, y, a: float) -> np.ndarray:
    """Evaluate a Chebyshev series (last axis) at points ``y`` in [-a, 0]."""
    x = to_unit(y, a)
    c = np.asarray(c)
    return np.polynomial.chebyshev.chebval(x, np.moveaxis(c, -1, 0))


@lru_cache(maxsize=32)
def diff_matrix(n_y: int, a: float) -> np.ndarray:
    """Collocation first-derivative matrix in y on the extrema grid.

    Standard Chebyshev differentiation matrix on x_r = cos(pi r / n_y),
    scaled by 2/a. Shared read-only.
    """
    if n_y == 0:
        D = np.zeros((1, 1))
    else:
        r = np.arange(n_y + 1)
        x = np.cos(np.pi * r / n_y)
        c = np.ones(n_y + 1)
        c[0] = c[-1] = 2.0
        c = c * (-1.0) ** r
        dX = x[:, None] - x[None, :]
        D = np.outer(c, 1.0 / c) / (dX + np.eye(n_y + 1))
        D = D - np.diag(D.sum(axis=1))
        D = D * (2.0 / a)
    D.setflags(write=False)
    return D


@lru_cache(maxsize=32)
def clenshaw_curtis(order: int):
    """Clenshaw-Curtis nodes and weights on [-1, 1] with ``order + 1`` points."""
    n = int(order)
    if n < 1:
        raise ValueError("quadrature order must be >= 1")
    theta = np.pi * np.arange(n + 1) / n
    x = np.cos(theta)
    w = np.zeros(n + 1)
    v = np.ones(n - 1)
    if n % 2 == 0:
        w[0] = w[n] = 1.0 / (n * n - 1)
        for k in range(1, n // 2):
            v -= 2.0 * np.cos(2 * k * theta[1:-1]) / (4 * k * k - 1)
        v -= np.cos(n * theta[1:-1]) / (n * n - 1)
    else:
        w[0] = w[n] = 1.0 / (n * n)
        for k in range(1, (n - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * k * theta[1:-1]) / (4 * k * k - 1)
    w[1:-1] = 2.0 * v / n
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=32)
def integration_matrix(n_y: int, a: float) -> np.ndarray:
    """Nodal matrix of the indefinite integral from y = -a.

    (Q v)_r = int_{-a}^{y_r} v(t) dt for the degree-n_y interpolant of v.
    """
    n = n_y + 1
    Q = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        c = values_to_coeffs(e)
        full = np.polynomial.chebyshev.chebint(c, lbnd=-1.0) * (0.5 * a)
        Q[:, j] = np.polynomial.chebyshev.chebval(to_unit(nodes(n_y, a), a), full)
    Q.setflags(write=False)
    return Q
