"""
Surface and volume fields on the lifted torus, with the discrete calculus
the perturbation recursions need: transforms, Fourier multipliers, the
K-gradient, pseudospectral products and Chebyshev differentiation.

Forward Fourier transforms divide by the grid cardinality, so stored
coefficients are the f_p of f(alpha) = sum_p f_p exp(i p.alpha), and
Parseval reads sum |f_p|^2 = mean |f(alpha_j)|^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import chebyshev
from .lattice import LatticeSpec, ModeSet, wavenumbers, wavevectors


def forward(values: np.ndarray, d: int) -> np.ndarray:
    """Grid values -> Fourier coefficients over the first ``d`` axes."""
    return np.fft.fftn(values, axes=tuple(range(d)), norm="forward")


def inverse(coeffs: np.ndarray, d: int) -> np.ndarray:
    """Fourier coefficients -> grid values over the first ``d`` axes."""
    return np.fft.ifftn(coeffs, axes=tuple(range(d)), norm="forward")


def grid_points(modes: ModeSet):
    """Equally spaced collocation points alpha_j^m = 2 pi j / N, as an ij-meshgrid."""
    axes = [2 * np.pi * np.arange(n) / n for n in modes.N_alpha]
    return np.meshgrid(*axes, indexing="ij")


def _pad(coeffs, N, Np, d):
    out = np.zeros(tuple(Np) + coeffs.shape[d:], dtype=complex)
    src = np.fft.fftshift(coeffs, axes=tuple(range(d)))
    sl = tuple(slice(m // 2 - n // 2, m // 2 - n // 2 + n) for n, m in zip(N, Np))
    out[sl] = src
    return np.fft.ifftshift(out, axes=tuple(range(d)))


def _truncate(coeffs, N, Np, d):
    src = np.fft.fftshift(coeffs, axes=tuple(range(d)))
    sl = tuple(slice(m // 2 - n // 2, m // 2 - n // 2 + n) for n, m in zip(N, Np))
    return np.fft.ifftshift(src[sl], axes=tuple(range(d)))


def product_coeffs(a: np.ndarray, b: np.ndarray, d: int, dealias: bool = False):
    """Pseudospectral product of two coefficient arrays.

    Unpadded collocation product by default; ``dealias=True`` applies the
    3/2-rule zero padding.
    """
    if not dealias:
        return forward(inverse(a, d) * inverse(b, d), d)
    N = a.shape[:d]
    Np = tuple(3 * n // 2 + (3 * n // 2) % 2 for n in N)
    pa = inverse(_pad(a, N, Np, d), d)
    pb = inverse(_pad(b, N, Np, d), d)
    return _truncate(forward(pa * pb, d), N, Np, d)


@dataclass(frozen=True, eq=False)
class SurfaceField:
    """A periodic envelope function on the torus, stored by its coefficients.

    ``coeffs`` has shape ``modes.N_alpha`` in FFT layout. Grid values are
    computed on demand (no cache, so instances stay immutable).
    """

    lattice: LatticeSpec
    modes: ModeSet
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.shape != self.modes.N_alpha:
            raise ValueError(f"coefficient shape {c.shape} != {self.modes.N_alpha}")
        if self.modes.d != self.lattice.d_torus:
            raise ValueError("mode set and lattice disagree on torus dimension")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_values(cls, lattice, modes, values):
        values = np.asarray(values)
        return cls(lattice, modes, forward(values, modes.d))

    @classmethod
    def from_function(cls, lattice, modes, fn):
        """Sample ``fn(alpha_1, ..., alpha_d)`` on the grid."""
        return cls.from_values(lattice, modes, fn(*grid_points(modes)))

    @classmethod
    def from_modes(cls, lattice, modes, entries: dict):
        """Build from a {mode tuple: coefficient} mapping."""
        c = np.zeros(modes.N_alpha, dtype=complex)
        for p, v in entries.items():
            c[modes.position(tuple(p))] += v
        return cls(lattice, modes, c)

    @property
    def values(self) -> np.ndarray:
        return inverse(self.coeffs, self.modes.d)

    def coefficient(self, p) -> complex:
        return complex(self.coeffs[self.modes.position(tuple(p))])

    def with_coeffs(self, coeffs) -> "SurfaceField":
        return SurfaceField(self.lattice, self.modes, coeffs)

    def __add__(self, other):
        _check_compatible(self, other)
        return self.with_coeffs(self.coeffs + other.coeffs)

    def __sub__(self, other):
        _check_compatible(self, other)
        return self.with_coeffs(self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return self.with_coeffs(self.coeffs * scalar)

    __rmul__ = __mul__

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def conjugate_symmetry_defect(self) -> float:
        """max |c_{-p} - conj(c_p)| over representable pairs (Nyquist excluded)."""
        return conjugate_symmetry_defect(self.coeffs, self.modes)


def conjugate_symmetry_defect(coeffs: np.ndarray, modes: ModeSet) -> float:
    d = modes.d
    flipped = np.roll(np.flip(coeffs, axis=tuple(range(d))), 1, axis=tuple(range(d)))
    defect = np.abs(flipped - np.conj(coeffs))
    defect[modes.nyquist_mask()] = 0.0
    return float(defect.max())


def _check_compatible(a, b):
    if a.modes.N_alpha != b.modes.N_alpha:
        raise ValueError("fields live on different grids")
    same = a.lattice is b.lattice or (
        np.array_equal(a.lattice.K, b.lattice.K) and a.lattice.depth == b.lattice.depth
    )
    if not same:
        raise ValueError("fields live on different lattices")


def apply_multiplier(field: SurfaceField, symbol) -> SurfaceField:
    """Fourier multiplier: coefficient at p becomes symbol(p) * coefficient.

    ``symbol`` is either a callable on a single integer mode tuple, or an
    array in FFT layout of shape ``N_alpha`` (already evaluated).
    """
    if callable(symbol):
        modes = field.modes
        sym = np.empty(modes.N_alpha, dtype=complex)
        for idx in np.ndindex(*modes.N_alpha):
            p = tuple(int(modes.integer_axes[m][i]) for m, i in enumerate(idx))
            sym[idx] = symbol(p)
    else:
        sym = np.asarray(symbol)
    return field.with_coeffs(sym * field.coeffs)


def surface_gradient_K(field: SurfaceField) -> list:
    """Envelope representation of the physical gradient, K^T grad_alpha f.

    Returns n SurfaceFields, component j with symbol i (K^T p)_j.
    """
    kv = wavevectors(field.lattice, field.modes)
    return [field.with_coeffs(1j * kv[j] * field.coeffs) for j in range(kv.shape[0])]


def pointwise_product(a, b, dealias: bool = False):
    """Collocation product of two SurfaceFields (or two VolumeFields)."""
    if isinstance(a, VolumeField) or isinstance(b, VolumeField):
        if not (isinstance(a, VolumeField) and isinstance(b, VolumeField)):
            raise ValueError("cannot multiply a surface field by a volume field")
        if a.n_y != b.n_y or a.strip_depth != b.strip_depth:
            raise ValueError("volume fields use different Chebyshev grids")
        _check_compatible(a, b)
        va = chebyshev.coeffs_to_values(a.coeffs)
        vb = chebyshev.coeffs_to_values(b.coeffs)
        fa = product_coeffs(va, vb, a.modes.d, dealias)
        return a.with_coeffs(chebyshev.values_to_coeffs(fa))
    _check_compatible(a, b)
    return a.with_coeffs(product_coeffs(a.coeffs, b.coeffs, a.modes.d, dealias))


@dataclass(frozen=True, eq=False)
class VolumeField:
    """Fourier (alpha) x Chebyshev (y) field on the strip [-a, 0].

    ``coeffs`` has shape ``(*N_alpha, n_y + 1)``: entry [p, q] multiplies
    exp(i p.alpha) T_q((2y + a)/a).
    """

    lattice: LatticeSpec
    modes: ModeSet
    n_y: int
    strip_depth: float
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.shape != (*self.modes.N_alpha, self.n_y + 1):
            raise ValueError(f"coefficient shape {c.shape} does not match grid")
        if not self.strip_depth > 0:
            raise ValueError("strip depth a must be positive")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_values(cls, lattice, modes, n_y, a, values):
        """From grid values of shape (*N_alpha, n_y + 1) at (alpha_j, y_r)."""
        mixed = forward(np.asarray(values), modes.d)
        return cls(lattice, modes, n_y, a, chebyshev.values_to_coeffs(mixed))

    @classmethod
    def from_function(cls, lattice, modes, n_y, a, fn):
        """Sample ``fn(alpha_1, ..., alpha_d, y)`` on the tensor grid."""
        al = grid_points(modes)
        y = chebyshev.nodes(n_y, a)
        vals = fn(*[g[..., None] for g in al], y.reshape((1,) * modes.d + (-1,)))
        vals = np.broadcast_to(vals, (*modes.N_alpha, n_y + 1))
        return cls.from_values(lattice, modes, n_y, a, vals)

    @property
    def values(self) -> np.ndarray:
        return inverse(chebyshev.coeffs_to_values(self.coeffs), self.modes.d)

    def with_coeffs(self, coeffs) -> "VolumeField":
        return VolumeField(self.lattice, self.modes, self.n_y, self.strip_depth, coeffs)

    def trace_top(self) -> SurfaceField:
        """Trace at y = 0 (T_q(1) = 1)."""
        return SurfaceField(self.lattice, self.modes, self.coeffs.sum(axis=-1))

    def trace_bottom(self) -> SurfaceField:
        """Trace at y = -a (T_q(-1) = (-1)^q)."""
        sign = (-1.0) ** np.arange(self.n_y + 1)
        return SurfaceField(self.lattice, self.modes, self.coeffs @ sign)


def chebyshev_diff(field: VolumeField) -> VolumeField:
    """Spectral d/dy of a volume field."""
    return field.with_coeffs(chebyshev.diff_coeffs(field.coeffs, field.strip_depth))


def chebyshev_eval(field: VolumeField, y) -> np.ndarray:
    """Fourier coefficients of the field at height(s) ``y``; shape (*N_alpha, len(y))."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    a = field.strip_depth
    T = np.polynomial.chebyshev.chebvander(chebyshev.to_unit(y, a), field.n_y)
    return field.coeffs @ T.T


def flat_dno_symbol(lattice: LatticeSpec, modes: ModeSet) -> np.ndarray:
    """Symbol of the flat-interface DNO: |K^T p|, or |K^T p| tanh(h |K^T p|)."""
    k = wavenumbers(lattice, modes)
    if lattice.infinite_depth:
        return k
    return k * np.tanh(lattice.depth * k)
