"""
Per-mode two-point boundary value problems on the flat strip [-a, 0].

For each Fourier mode p the transformed Laplace problem reduces to

    u'' - k^2 u = i w.F^alpha + (F^y)' + F^0,   -a < y < 0,
    u(0) = xi,
    u'(-a) - s u(-a) = J,

with wavevector w = K^T p, k = |w| and s the transparent-boundary symbol.
It is solved by Chebyshev collocation with boundary rows replaced.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import chebyshev
from .lattice import ConfigurationError, LatticeSpec, wavenumber


@dataclass(frozen=True, eq=False)
class TransparentOperator:
    """Exact Robin condition at the artificial bottom y = -a.

    Symbol |K^T p| in infinite depth, |K^T p| tanh((h - a)|K^T p|) when the
    fluid has finite depth h (which must exceed a).
    """

    lattice: LatticeSpec
    a: float

    def __post_init__(self):
        if not self.a > 0:
            raise ConfigurationError(f"artificial depth a must be positive, got {self.a}")
        if not self.lattice.infinite_depth and not self.lattice.depth > self.a:
            raise ConfigurationError(
                f"finite depth h={self.lattice.depth} must exceed a={self.a}"
            )

    def symbol_of(self, k):
        """Symbol as a function of the wavenumber (scalar or array)."""
        k = np.asarray(k, dtype=float)
        if self.lattice.infinite_depth:
            return k * 1.0
        return k * np.tanh((self.lattice.depth - self.a) * k)


def transparent_symbol(T: TransparentOperator, p) -> float:
    return float(T.symbol_of(wavenumber(T.lattice, p)))


@dataclass(frozen=True, eq=False)
class ModeBvp:
    """Data of one mode's boundary value problem.

    Forcings are Chebyshev coefficient vectors on [-a, 0] (any length);
    ``forcing_alpha`` holds one row per physical dimension. ``robin_symbol``
    defaults to the wavenumber (infinite depth).
    """

    wavevector: np.ndarray
    strip_depth: float
    dirichlet_top: complex = 0.0
    robin_bottom: complex = 0.0
    forcing_alpha: np.ndarray | None = None
    forcing_y: np.ndarray | None = None
    forcing_0: np.ndarray | None = None
    robin_symbol: float | None = None
    k: float = field(init=False)

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.wavevector, dtype=float))
        object.__setattr__(self, "wavevector", w)
        object.__setattr__(self, "k", float(np.linalg.norm(w)))
        if self.robin_symbol is None:
            object.__setattr__(self, "robin_symbol", self.k)
        if self.forcing_alpha is not None:
            fa = np.atleast_2d(np.asarray(self.forcing_alpha, dtype=complex))
            if fa.shape[0] != w.size:
                raise ValueError("forcing_alpha needs one row per wavevector component")
            object.__setattr__(self, "forcing_alpha", fa)
        if self.forcing_y is not None:
            fy = np.asarray(self.forcing_y, dtype=complex)
            bottom = np.sum(fy * (-1.0) ** np.arange(fy.size))
            scale = max(1.0, float(np.max(np.abs(fy))))
            if abs(bottom) > 1e-10 * scale:
                raise ValueError(f"F^y must vanish at y = -a (got {bottom:.3e})")
            object.__setattr__(self, "forcing_y", fy)

    def rhs_values(self, n_y: int) -> np.ndarray:
        """i w.F^alpha + (F^y)' + F^0 on the collocation grid."""
        a = self.strip_depth
        y = chebyshev.nodes(n_y, a)
        out = np.zeros(n_y + 1, dtype=complex)
        if self.forcing_0 is not None:
            out += chebyshev.evaluate(self.forcing_0, y, a)
        if self.forcing_alpha is not None:
            for wj, row in zip(self.wavevector, self.forcing_alpha):
                out += 1j * wj * chebyshev.evaluate(row, y, a)
        if self.forcing_y is not None:
            out += chebyshev.evaluate(chebyshev.diff_coeffs(self.forcing_y, a), y, a)
        return out


@dataclass(frozen=True)
class ModeSolution:
    values: np.ndarray
    coeffs: np.ndarray
    u_top: complex
    du_top: complex
    u_bottom: complex
    du_bottom: complex


def solve_strip(k, s, rhs, top, bottom, n_y: int, a: float, chunk: int = 2048):
    """Batched collocation solve over many modes.

    Parameters
    ----------
    k, s : ndarray, shape (M,)
        Wavenumbers and Robin symbols.
    rhs : ndarray, shape (M, n_y + 1)
        Interior right-hand side at the collocation nodes.
    top, bottom : ndarray, shape (M,)
        Dirichlet data at y = 0 and Robin data at y = -a.

    Returns
    -------
    ndarray, shape (M, n_y + 1)
        Solution values at the nodes.
    """
    k = np.asarray(k, dtype=float)
    s = np.asarray(s, dtype=float)
    rhs = np.asarray(rhs, dtype=complex)
    M = k.size
    n = n_y + 1
    out = np.empty((M, n), dtype=complex)
    if n_y == 0:
        out[:, 0] = top
        return out
    D = chebyshev.diff_matrix(n_y, a)
    D2 = D @ D
    eye = np.eye(n)
    for lo in range(0, M, chunk):
        hi = min(lo + chunk, M)
        kk = k[lo:hi, None, None]
        A = D2[None] - kk**2 * eye[None]
        A[:, 0, :] = eye[0]
        A[:, -1, :] = D[-1][None, :] - s[lo:hi, None] * eye[-1][None, :]
        b = rhs[lo:hi].copy()
        b[:, 0] = top[lo:hi]
        b[:, -1] = bottom[lo:hi]
        B = np.stack([b.real, b.imag], axis=-1)
        X = np.linalg.solve(A, B)
        out[lo:hi] = X[..., 0] + 1j * X[..., 1]
    return out


def solve_mode(bvp: ModeBvp, n_y: int) -> ModeSolution:
    """Chebyshev-collocation solution of a single mode's problem."""
    a = bvp.strip_depth
    v = solve_strip(
        np.array([bvp.k]),
        np.array([bvp.robin_symbol]),
        bvp.rhs_values(n_y)[None, :],
        np.array([bvp.dirichlet_top], dtype=complex),
        np.array([bvp.robin_bottom], dtype=complex),
        n_y,
        a,
    )[0]
    c = chebyshev.values_to_coeffs(v)
    dv = chebyshev.coeffs_to_values(chebyshev.diff_coeffs(c, a))
    return ModeSolution(v, c, v[0], dv[0], v[-1], dv[-1])


def interior_residual(bvp: ModeBvp, sol: ModeSolution, n_y: int) -> float:
    """max |u'' - k^2 u - rhs| over interior nodes."""
    a = bvp.strip_depth
    d2 = chebyshev.diff_coeffs(chebyshev.diff_coeffs(sol.coeffs, a), a)
    res = chebyshev.coeffs_to_values(d2) - bvp.k**2 * sol.values - bvp.rhs_values(n_y)
    return float(np.max(np.abs(res[1:-1]))) if n_y > 1 else 0.0


def robin_residual(bvp: ModeBvp, sol: ModeSolution) -> float:
    return abs(sol.du_bottom - bvp.robin_symbol * sol.u_bottom - bvp.robin_bottom)


def data_scale(bvp: ModeBvp) -> float:
    parts = [abs(bvp.dirichlet_top), abs(bvp.robin_bottom)]
    for f in (bvp.forcing_alpha, bvp.forcing_y, bvp.forcing_0):
        if f is not None:
            parts.append(float(np.max(np.abs(f))) * max(1.0, bvp.k))
    return max(parts) if parts else 1.0



def solve_strip_flux(k, s, volume, flux, top, bottom, n_y: int, a: float, chunk: int = 2048):
    """Batched solve of the first-order (flux) form of the strip problem.

    With sigma = u' - F^y the equation u'' - k^2 u = G + (F^y)' becomes

        u' = sigma + F^y,   sigma' = k^2 u + G,

    which is integrated from y = -a with the Chebyshev integration matrix
    Q. Eliminating sigma gives (I - k^2 Q^2) u - u(-a)(1 + s (y + a))
    = J (y + a) + Q^2 G + Q F^y, closed by u(0) = xi. No differentiation
    of data or solution is involved, so u' is returned to near machine
    precision even for thin strips.

    Parameters
    ----------
    volume : ndarray, shape (M, n_y + 1)
        G = i w.F^alpha + F^0 at the nodes.
    flux : ndarray, shape (M, n_y + 1) or None
        F^y at the nodes (must vanish at y = -a).

    Returns
    -------
    u, du : ndarray, shape (M, n_y + 1)
    """
    k = np.asarray(k, dtype=float)
    s = np.asarray(s, dtype=float)
    M = k.size
    n = n_y + 1
    volume = np.asarray(volume, dtype=complex)
    flux = np.zeros((M, n), dtype=complex) if flux is None else np.asarray(flux, dtype=complex)
    top = np.asarray(top, dtype=complex)
    bottom = np.asarray(bottom, dtype=complex)
    u = np.empty((M, n), dtype=complex)
    du = np.empty((M, n), dtype=complex)
    if n_y == 0:
        u[:, 0] = top
        du[:, 0] = k * top
        return u, du
    Q = chebyshev.integration_matrix(n_y, a)
    Q2 = Q @ Q
    ya = chebyshev.nodes(n_y, a) + a
    eye = np.eye(n)
    for lo in range(0, M, chunk):
        hi = min(lo + chunk, M)
        kk = k[lo:hi, None, None]
        ss = s[lo:hi, None]
        A = np.zeros((hi - lo, n + 1, n + 1))
        A[:, :n, :n] = eye[None] - kk**2 * Q2[None]
        A[:, :n, n] = -(1.0 + ss * ya[None, :])
        A[:, n, 0] = 1.0
        G = volume[lo:hi]
        Fy = flux[lo:hi]
        b = np.empty((hi - lo, n + 1), dtype=complex)
        b[:, :n] = bottom[lo:hi, None] * ya[None, :] + G @ Q2.T + Fy @ Q.T
        b[:, n] = top[lo:hi]
        X = np.linalg.solve(A, np.stack([b.real, b.imag], axis=-1))
        x = X[..., 0] + 1j * X[..., 1]
        uu = x[:, :n]
        sigma_b = bottom[lo:hi] + s[lo:hi] * x[:, n]
        sigma = sigma_b[:, None] + (k[lo:hi, None] ** 2 * uu + G) @ Q.T
        u[lo:hi] = uu
        du[lo:hi] = sigma + Fy
    return u, du
