"""
Quasiperiodic lattice geometry and truncated Fourier mode sets.

A laterally quasiperiodic function f(x), x in R^n, is represented by a
periodic envelope f~(alpha) on the torus [0, 2pi)^d through alpha = K x.
Physical derivatives become Fourier multipliers with symbol i K^T p, and the
flat-interface Dirichlet-Neumann symbol is the wavenumber |K^T p|.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np


class ConfigurationError(ValueError):
    """Raised when a lattice, strip, or problem configuration is inadmissible."""


@dataclass(frozen=True, eq=False)
class LatticeSpec:
    """Quasiperiodicity data: the d x n matrix K and the fluid depth.

    Parameters
    ----------
    K : array_like, shape (d, n)
        Quasiperiodicity matrix, alpha = K x.
    depth : float
        Fluid depth h; ``math.inf`` (default) for infinite depth.
    check_radius : int
        Truncation radius R for the integer-independence check: the
        construction fails if some 0 < |p|_inf <= R has K^T p = 0.
    """

    K: np.ndarray
    depth: float = math.inf
    check_radius: int = 6

    def __post_init__(self):
        K = np.array(self.K, dtype=float)
        if K.ndim == 1:
            K = K[:, None]
        if K.ndim != 2:
            raise ConfigurationError(f"K must be a d x n matrix, got shape {K.shape}")
        d, n = K.shape
        if n not in (1, 2):
            raise ConfigurationError(f"physical dimension n must be 1 or 2, got {n}")
        if d <= n:
            raise ConfigurationError(f"torus dimension d={d} must exceed n={n}")
        if d > 3:
            raise ConfigurationError(f"torus dimension d={d} > 3 is not supported")
        depth = float(self.depth)
        if not depth > 0:
            raise ConfigurationError(f"depth must be positive, got {depth}")
        K.setflags(write=False)
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "depth", depth)
        rmin, p = _min_divisor_in_box(K, self.check_radius)
        if rmin <= 1e-13:
            raise ConfigurationError(
                f"rows of K are integer-dependent: K^T p = 0 for p = {p}"
            )

    @property
    def d_torus(self) -> int:
        return self.K.shape[0]

    @property
    def n_physical(self) -> int:
        return self.K.shape[1]

    @property
    def infinite_depth(self) -> bool:
        return math.isinf(self.depth)


def _min_divisor_in_box(K, radius):
    d = K.shape[0]
    rng = np.arange(-radius, radius + 1)
    P = np.array(np.meshgrid(*([rng] * d), indexing="ij")).reshape(d, -1).T
    P = P[np.any(P != 0, axis=1)]
    norms = np.linalg.norm(P @ K, axis=1)
    i = int(np.argmin(norms))
    return norms[i], tuple(int(v) for v in P[i])


def wavenumber(lattice: LatticeSpec, p) -> float:
    """Return |K^T p| for a single integer mode ``p`` of length d."""
    p = np.asarray(p)
    if p.shape != (lattice.d_torus,):
        raise ValueError(
            f"mode must have {lattice.d_torus} entries, got shape {p.shape}"
        )
    if not np.any(p):
        return 0.0
    return float(np.linalg.norm(lattice.K.T @ p))


@dataclass(frozen=True, eq=False)
class ModeSet:
    """Truncated mode set with N_alpha[m] modes in direction m.

    Indices run over -N/2 <= p_m <= N/2 - 1 (numpy ``fftfreq`` convention,
    which coincides with this range for even N). Coefficient arrays are
    stored in FFT order with shape ``N_alpha``; ``modes`` lists the
    integer vectors in canonical row-major order of the index ranges.
    """

    N_alpha: tuple
    integer_axes: tuple = field(init=False, repr=False)

    def __post_init__(self):
        N = tuple(int(v) for v in self.N_alpha)
        if not N or any(v < 1 for v in N):
            raise ValueError(f"mode counts must be positive, got {self.N_alpha}")
        object.__setattr__(self, "N_alpha", N)
        axes = tuple(np.rint(np.fft.fftfreq(v) * v).astype(int) for v in N)
        object.__setattr__(self, "integer_axes", axes)

    @property
    def d(self) -> int:
        return len(self.N_alpha)

    @property
    def size(self) -> int:
        return math.prod(self.N_alpha)

    @property
    def modes(self) -> np.ndarray:
        """Integer mode vectors, shape (size, d), canonical row-major order."""
        ranges = [range(-(v // 2), v - v // 2) for v in self.N_alpha]
        return np.array(list(itertools.product(*ranges)), dtype=int).reshape(-1, self.d)

    def index_grids(self):
        """Broadcastable integer grids p_m in FFT layout."""
        return np.meshgrid(*self.integer_axes, indexing="ij", sparse=True)

    def position(self, p) -> tuple:
        """Array index of mode ``p`` in FFT layout."""
        if len(p) != self.d:
            raise ValueError(f"mode must have {self.d} entries")
        idx = []
        for pm, n in zip(p, self.N_alpha):
            if not -(n // 2) <= pm <= n - n // 2 - 1:
                raise KeyError(f"mode {tuple(p)} outside truncation {self.N_alpha}")
            idx.append(int(pm) % n)
        return tuple(idx)

    def to_canonical(self, arr: np.ndarray) -> np.ndarray:
        """Flatten an FFT-layout coefficient array in canonical mode order."""
        axes = tuple(range(self.d))
        return np.fft.fftshift(arr, axes=axes).reshape(self.size, *arr.shape[self.d:])

    def from_canonical(self, flat: np.ndarray) -> np.ndarray:
        arr = np.asarray(flat).reshape(*self.N_alpha, *np.shape(flat)[1:])
        return np.fft.ifftshift(arr, axes=tuple(range(self.d)))

    def nyquist_mask(self) -> np.ndarray:
        """True where some index sits at the unpaired value -N/2 (even N)."""
        mask = np.zeros(self.N_alpha, dtype=bool)
        for m, (ax, n) in enumerate(zip(self.integer_axes, self.N_alpha)):
            if n % 2 == 0:
                sl = [None] * self.d
                sl[m] = slice(None)
                mask |= (ax == -(n // 2))[tuple(sl)]
        return mask


def wavevectors(lattice: LatticeSpec, modes: ModeSet) -> np.ndarray:
    """K^T p for every mode, shape (n, *N_alpha)."""
    if modes.d != lattice.d_torus:
        raise ValueError(
            f"mode set dimension {modes.d} != torus dimension {lattice.d_torus}"
        )
    grids = modes.index_grids()
    out = np.zeros((lattice.n_physical, *modes.N_alpha))
    for j in range(lattice.n_physical):
        for m in range(lattice.d_torus):
            out[j] = out[j] + lattice.K[m, j] * grids[m]
    return out


def wavenumbers(lattice: LatticeSpec, modes: ModeSet) -> np.ndarray:
    """|K^T p| for every mode in FFT layout; exactly zero at p = 0."""
    k = np.sqrt(np.sum(wavevectors(lattice, modes) ** 2, axis=0))
    k[(0,) * modes.d] = 0.0
    return k


def smallest_divisor(lattice: LatticeSpec, modes: ModeSet):
    """Smallest nonzero-mode wavenumber min |K^T p| and the mode achieving it.

    Diagnostic only. Returns ``(math.inf, None)`` when the mode set holds
    no nonzero mode.
    """
    k = wavenumbers(lattice, modes)
    k[(0,) * modes.d] = np.inf
    flat = int(np.argmin(k))
    kmin = float(k.flat[flat])
    if math.isinf(kmin):
        return math.inf, None
    idx = np.unravel_index(flat, modes.N_alpha)
    p = tuple(int(modes.integer_axes[m][i]) for m, i in enumerate(idx))
    return kmin, p
