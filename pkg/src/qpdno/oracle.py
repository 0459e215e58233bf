"""
Closed-form solution of the per-mode strip problem (infinite depth), used as
an independent check on the collocation solver.

Homogeneous part: xi E(y) + J S(y). Volume sources are integrated against
the Green's function split into four exponentially weighted integrals

    I1 = e^{ky}/(2k) int_y^0 e^{kt} F,     I2 = e^{ky}/(2k) int_y^0 e^{-kt} F,
    I3 = e^{ky}/(2k) int_{-a}^y e^{kt} F,  I4 = e^{-ky}/(2k) int_{-a}^y e^{kt} F,

with u = I1 - I2 + I3 - I4 for F^0 (and for i w.F^alpha), and, after
integrating by parts with F^y(-a) = 0, u = k(-I1 - I2 - I3 + I4)[F^y].
Every exponential is evaluated with a non-positive exponent.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import chebyshev
from .bvp import ModeBvp


@dataclass(frozen=True)
class Kernels:
    E: Callable
    S: Callable
    C: Callable


def analytic_kernels(k: float, a: float) -> Kernels:
    """E(y) = e^{ky}; S(y) = sinh(ky)/(k e^{ka}) (y when k = 0); C = S'."""
    k = float(k)
    if k == 0.0:
        return Kernels(
            E=lambda y: np.ones_like(np.asarray(y, dtype=float)),
            S=lambda y: np.asarray(y, dtype=float) * 1.0,
            C=lambda y: np.ones_like(np.asarray(y, dtype=float)),
        )

    def E(y):
        return np.exp(k * np.asarray(y, dtype=float))

    def S(y):
        y = np.asarray(y, dtype=float)
        return (np.exp(k * (y - a)) - np.exp(-k * (y + a))) / (2.0 * k)

    def C(y):
        y = np.asarray(y, dtype=float)
        return 0.5 * (np.exp(k * (y - a)) + np.exp(-k * (y + a)))

    return Kernels(E, S, C)


@dataclass(frozen=True)
class OracleSolution:
    y: np.ndarray
    values: np.ndarray
    derivative: np.ndarray
    u_top: complex
    du_top: complex
    u_bottom: complex
    du_bottom: complex


def _panels(y, a, order):
    """Clenshaw-Curtis nodes/weights on [y, 0] and [-a, y] for each y."""
    x, w = chebyshev.clenshaw_curtis(order)
    y = y[:, None]
    t_up = 0.5 * y * (1.0 - x)[None, :]
    w_up = (-0.5 * y) * w[None, :]
    t_lo = -a + 0.5 * (y + a) * (1.0 + x)[None, :]
    w_lo = (0.5 * (y + a)) * w[None, :]
    return t_up, w_up, t_lo, w_lo


def _integrals(k, y, a, F, order):
    """(I1, I2, I3, I4) at each point y for a source callable F(t)."""
    t_up, w_up, t_lo, w_lo = _panels(y, a, order)
    Fu, Fl = F(t_up), F(t_lo)
    yy = y[:, None]
    I1 = np.sum(w_up * np.exp(k * (yy + t_up)) * Fu, axis=1) / (2 * k)
    I2 = np.sum(w_up * np.exp(k * (yy - t_up)) * Fu, axis=1) / (2 * k)
    I3 = np.sum(w_lo * np.exp(k * (yy + t_lo)) * Fl, axis=1) / (2 * k)
    I4 = np.sum(w_lo * np.exp(k * (t_lo - yy)) * Fl, axis=1) / (2 * k)
    return I1, I2, I3, I4


def _zero_k_parts(y, a, F, order):
    """(int_{-a}^y F, int_y^0 F, int_y^0 t F) for k = 0."""
    t_up, w_up, t_lo, w_lo = _panels(y, a, order)
    Fu, Fl = F(t_up), F(t_lo)
    return (
        np.sum(w_lo * Fl, axis=1),
        np.sum(w_up * Fu, axis=1),
        np.sum(w_up * t_up * Fu, axis=1),
    )


def analytic_oracle_solve(bvp: ModeBvp, order: int = 64, y=None, n_y: int | None = None):
    """Evaluate the exact solution and its derivative by quadrature.

    Parameters
    ----------
    bvp : ModeBvp
        Infinite-depth problem (Robin symbol equal to the wavenumber).
    order : int
        Clenshaw-Curtis order per sub-interval.
    y : array_like, optional
        Evaluation points; defaults to the collocation nodes for ``n_y``
        (or for the longest forcing expansion).
    """
    a = bvp.strip_depth
    k = bvp.k
    if abs(bvp.robin_symbol - k) > 1e-14 * max(1.0, k):
        raise ValueError("the analytic oracle covers the infinite-depth Robin symbol only")
    lengths = [np.shape(f)[-1] for f in (bvp.forcing_alpha, bvp.forcing_y, bvp.forcing_0)
               if f is not None]
    if n_y is None:
        n_y = max(lengths) - 1 if lengths else 16
    if order < n_y:
        warnings.warn(
            f"quadrature order {order} below Chebyshev order {n_y}; oracle is weaker "
            "than the solver",
            stacklevel=2,
        )
    y = chebyshev.nodes(n_y, a) if y is None else np.atleast_1d(np.asarray(y, dtype=float))
    # endpoints are always included so the traces come from the same formulas
    pts = np.concatenate([[0.0, -a], y])

    def volume_source(t):
        out = np.zeros(t.shape, dtype=complex)
        if bvp.forcing_0 is not None:
            out += chebyshev.evaluate(bvp.forcing_0, t, a)
        if bvp.forcing_alpha is not None:
            for wj, row in zip(bvp.wavevector, bvp.forcing_alpha):
                out += 1j * wj * chebyshev.evaluate(row, t, a)
        return out

    def flux_source(t):
        return chebyshev.evaluate(bvp.forcing_y, t, a)

    ker = analytic_kernels(k, a)
    u = bvp.dirichlet_top * ker.E(pts) + bvp.robin_bottom * ker.S(pts)
    du = k * bvp.dirichlet_top * ker.E(pts) + bvp.robin_bottom * ker.C(pts)
    u = u.astype(complex)
    du = du.astype(complex)

    has_volume = bvp.forcing_0 is not None or bvp.forcing_alpha is not None
    if k == 0.0:
        if has_volume:
            lower, upper, first = _zero_k_parts(pts, a, volume_source, order)
            u += pts * lower + first
            du += lower
        if bvp.forcing_y is not None:
            _, upper, _ = _zero_k_parts(pts, a, flux_source, order)
            u += -upper
            du += flux_source(pts)
    else:
        if has_volume:
            I1, I2, I3, I4 = _integrals(k, pts, a, volume_source, order)
            u += I1 - I2 + I3 - I4
            du += k * (I1 - I2 + I3 + I4)
        if bvp.forcing_y is not None:
            I1, I2, I3, I4 = _integrals(k, pts, a, flux_source, order)
            u += k * (-I1 - I2 - I3 + I4)
            du += k * k * (-I1 - I2 - I3 - I4) + flux_source(pts)

    return OracleSolution(
        y=pts[2:],
        values=u[2:],
        derivative=du[2:],
        u_top=complex(u[0]),
        du_top=complex(du[0]),
        u_bottom=complex(u[1]),
        du_bottom=complex(du[1]),
    )
