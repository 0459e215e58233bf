"""
Manufactured solutions for code verification.

A single-mode harmonic function phi = A e^{i q.alpha} Y(y), with
Y(y) = e^{ky} in infinite depth and cosh(k(h + y))/cosh(kh) in finite depth
(k = |K^T q|), is evaluated in closed form on the surface y = g(alpha) to
give exact Dirichlet and Neumann data for the DNO.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import SurfaceField, inverse, surface_gradient_K
from .lattice import LatticeSpec, ModeSet, wavenumber


class UndefinedMetricError(ValueError):
    """The reference field is identically zero."""


@dataclass(frozen=True, eq=False)
class ManufacturedSolution:
    """phi = A e^{i q.alpha} Y(y), optionally plus its complex conjugate."""

    lattice: LatticeSpec
    amplitude: complex
    q: tuple
    symmetrize: bool = False

    def __post_init__(self):
        q = tuple(int(v) for v in self.q)
        if len(q) != self.lattice.d_torus:
            raise ValueError(f"mode q needs {self.lattice.d_torus} entries, got {len(q)}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "amplitude", complex(self.amplitude))

    @property
    def k(self) -> float:
        return wavenumber(self.lattice, self.q)

    def profile(self, y):
        """(Y(y), Y'(y)) with range reduction for finite depth."""
        y = np.asarray(y, dtype=float)
        k = self.k
        if k == 0.0:
            return np.ones_like(y), np.zeros_like(y)
        ey = np.exp(k * y)
        if self.lattice.infinite_depth:
            return ey, k * ey
        h = self.lattice.depth
        low = np.exp(-2.0 * k * (h + y))
        norm = 1.0 + math.exp(-2.0 * k * h)
        return ey * (1.0 + low) / norm, k * ey * (1.0 - low) / norm

    def evaluate(self, alpha, y):
        """phi at points (alpha_1, ..., alpha_d, y); alpha is a sequence of arrays."""
        phase = np.exp(1j * sum(qm * am for qm, am in zip(self.q, alpha)))
        Y, _ = self.profile(y)
        out = self.amplitude * phase * Y
        if self.symmetrize:
            out = out + np.conj(self.amplitude) * np.conj(phase) * Y
        return out


def exact_traces(ms: ManufacturedSolution, g: SurfaceField):
    """Exact (xi, nu) on the surface y = g(alpha).

    xi = phi(alpha, g), nu = d_y phi(alpha, g) - (K^T grad g).(K^T grad phi)(alpha, g).
    """
    if not np.array_equal(ms.lattice.K, g.lattice.K) or ms.lattice.depth != g.lattice.depth:
        raise ValueError("manufactured solution and profile use different lattices")
    modes = g.modes
    gv = g.values
    if np.max(np.abs(gv.imag)) > 1e-12 * max(1.0, np.max(np.abs(gv))):
        raise ValueError("profile must be real")
    gv = gv.real
    if not ms.lattice.infinite_depth and np.min(gv) <= -ms.lattice.depth:
        raise ValueError(
            f"profile reaches y = {np.min(gv):.6g}, below the bottom at -{ms.lattice.depth}"
        )
    grads = [c.values.real for c in surface_gradient_K(g)]
    Kq = ms.lattice.K.T @ np.asarray(ms.q, dtype=float)
    slope = sum(gj * kq for gj, kq in zip(grads, Kq))

    axes = [2 * np.pi * np.arange(n) / n for n in modes.N_alpha]
    alpha = np.meshgrid(*axes, indexing="ij")
    phase = np.exp(1j * sum(qm * am for qm, am in zip(ms.q, alpha)))
    Y, dY = ms.profile(gv)
    A = ms.amplitude
    xi = A * phase * Y
    nu = A * phase * (dY - 1j * slope * Y)
    if ms.symmetrize:
        xi = xi + np.conj(A) * np.conj(phase) * Y
        nu = nu + np.conj(A) * np.conj(phase) * (dY + 1j * slope * Y)
    lat = g.lattice
    return (
        SurfaceField.from_values(lat, modes, xi),
        SurfaceField.from_values(lat, modes, nu),
    )


def relative_error(exact: SurfaceField, approx: SurfaceField) -> float:
    """sup |exact - approx| / sup |exact| over the collocation grid."""
    if exact.modes.N_alpha != approx.modes.N_alpha:
        raise ValueError("fields live on different grids")
    d = exact.modes.d
    ref = np.max(np.abs(inverse(exact.coeffs, d)))
    if ref == 0.0:
        raise UndefinedMetricError("relative error undefined: exact field is identically zero")
    return float(np.max(np.abs(inverse(exact.coeffs - approx.coeffs, d))) / ref)


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------


def _cos_sin_2d(lattice, modes, params):
    if modes.d != 2:
        raise ValueError("cos_sin_2d needs a two-dimensional torus")
    amp = float(params.get("amplitude", 1.0))
    return SurfaceField.from_function(lattice, modes, lambda a1, a2: amp * np.cos(a1) * np.sin(a2))


def _cos_cos_sin_3d(lattice, modes, params):
    if modes.d != 3:
        raise ValueError("cos_cos_sin_3d needs a three-dimensional torus")
    amp = float(params.get("amplitude", 1.0))
    return SurfaceField.from_function(
        lattice, modes, lambda a1, a2, a3: amp * (np.cos(a1) + np.cos(a2) + np.sin(a3))
    )


def _custom(lattice, modes, params):
    entries = params.get("coefficients")
    if not entries:
        raise ValueError("custom profile needs a nonempty 'coefficients' mapping")
    parsed = {}
    for key, value in dict(entries).items():
        p = tuple(int(v) for v in (key if isinstance(key, (tuple, list)) else str(key).strip("()[] ").split(",")))
        parsed[p] = complex(value) if not isinstance(value, (list, tuple)) else complex(*value)
    return SurfaceField.from_modes(lattice, modes, parsed)


def _flat(lattice, modes, params):
    return SurfaceField(lattice, modes, np.zeros(modes.N_alpha, dtype=complex))


PROFILES = {
    "cos_sin_2d": _cos_sin_2d,
    "cos_cos_sin_3d": _cos_cos_sin_3d,
    "custom": _custom,
    "flat": _flat,
}


def profile_library(name: str, lattice: LatticeSpec, modes: ModeSet, parameters=None) -> SurfaceField:
    """Named analytic profile at the working resolution.

    ``cos_sin_2d`` is cos(a1) sin(a2); ``cos_cos_sin_3d`` is
    cos(a1) + cos(a2) + sin(a3); both accept an ``amplitude``. ``custom``
    takes ``coefficients``, a {mode: value} mapping (modes as tuples or
    strings like "1,-1"). ``flat`` is identically zero.
    """
    try:
        fn = PROFILES[name]
    except KeyError:
        raise ValueError(
            f"unknown profile {name!r}; available: {', '.join(sorted(PROFILES))}"
        ) from None
    return fn(lattice, modes, dict(parameters or {}))


__all__ = [
    "ManufacturedSolution",
    "UndefinedMetricError",
    "exact_traces",
    "relative_error",
    "profile_library",
    "PROFILES",
]
