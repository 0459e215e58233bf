"""
High-order perturbation recursions for the quasiperiodic Dirichlet-Neumann
operator G(eps f)[xi] = sum_n G_n(f)[xi] eps^n.

Three routes to the corrections nu_n = G_n(f)[xi]:

* Operator Expansions (``oe_expand``), direct and adjoint forms;
* Field Expansions (``fe_expand``), modal coefficients of the field;
* Transformed Field Expansions (``tfe_expand``), domain flattening to the
  strip [-a, 0] and a sequence of inhomogeneous strip problems.

OE and FE are infinite-depth only. Negative-index quantities (u_{-1},
u_{-2}, nu_{-1}) are zero throughout.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import chebyshev
from .bvp import TransparentOperator, solve_strip_flux
from .fields import (
    SurfaceField,
    VolumeField,
    conjugate_symmetry_defect,
    flat_dno_symbol,
    forward,
    inverse,
    product_coeffs,
)
from .lattice import ConfigurationError, LatticeSpec, ModeSet, wavenumbers, wavevectors

#: Sign multiplying the gradient term of the adjoint OE recursion. The
#: adjoint of (K^T grad f).(i K^T D) is -(i K^T D).[(K^T grad f) .], so the
#: term enters with a plus sign; this value agrees with the direct form,
#: FE and TFE on pure modes.
OE_ADJOINT_GRADIENT_SIGN = +1

RESOLUTION_THRESHOLD = 1e-6

#: Default relative threshold of the noise filter (off; see ``noise_filter``).
NOISE_FILTER = 0.0
#: Threshold that keeps OE/FE corrections at fine grids free of amplified
#: rounding noise through order ~10.
RECOMMENDED_NOISE_FILTER = 1e-15


class ResolutionWarning(UserWarning):
    """Spectral tail energy of a computed quantity exceeds the threshold."""


class UnsupportedConfiguration(ConfigurationError):
    """The requested algorithm does not support this configuration."""


@dataclass(frozen=True, eq=False)
class PerturbationProblem:
    """Inputs shared by the three algorithms.

    ``profile`` is the O(1) shape f (the surface is y = eps f), ``dirichlet``
    the data xi. ``strip_depth`` and ``n_y`` are used by TFE only.

    ``noise_filter`` zeroes every Fourier coefficient whose magnitude is
    below that fraction of the array maximum, on the inputs and after each
    forward transform (Krasny filtering). The corrections involve powers
    |K^T p|^n, which amplify rounding noise at high wavenumbers far above
    the signal; the filter removes that noise before it is amplified. It
    is off by default because zeroing coefficients order by order breaks
    the per-mode series that Pade summation relies on; use
    RECOMMENDED_NOISE_FILTER when the corrections themselves are wanted.
    """

    profile: SurfaceField
    dirichlet: SurfaceField
    order: int
    strip_depth: float = 0.1
    n_y: int = 16
    dealias: bool = False
    noise_filter: float = NOISE_FILTER

    def __post_init__(self):
        f, xi = self.profile, self.dirichlet
        if f.modes.N_alpha != xi.modes.N_alpha:
            raise ConfigurationError("profile and Dirichlet data use different mode sets")
        if not (np.array_equal(f.lattice.K, xi.lattice.K) and f.lattice.depth == xi.lattice.depth):
            raise ConfigurationError("profile and Dirichlet data use different lattices")
        if self.order < 0:
            raise ConfigurationError("perturbation order must be nonnegative")
        if self.order > 32:
            raise ConfigurationError("orders above 32 are not supported (1/n! underflow)")
        if not self.strip_depth > 0:
            raise ConfigurationError("strip depth a must be positive")
        if not self.lattice.infinite_depth and not self.lattice.depth > self.strip_depth:
            raise ConfigurationError("finite depth h must exceed the strip depth a")
        if self.n_y < 1:
            raise ConfigurationError("n_y must be at least 1")
        if not 0 <= self.noise_filter < 1:
            raise ConfigurationError("noise filter threshold must lie in [0, 1)")

    @property
    def lattice(self) -> LatticeSpec:
        return self.profile.lattice

    @property
    def modes(self) -> ModeSet:
        return self.profile.modes


@dataclass(frozen=True, eq=False)
class DnoExpansion:
    """Taylor corrections nu_0..nu_N of the DNO applied to fixed data."""

    corrections: tuple
    algorithm: str
    problem: PerturbationProblem
    diagnostics: dict = field(default_factory=dict)
    volume: tuple | None = None

    @property
    def order(self) -> int:
        return len(self.corrections) - 1

    def coefficient_stack(self) -> np.ndarray:
        """Array of shape (N + 1, *N_alpha)."""
        return np.stack([c.coeffs for c in self.corrections])


class _Calculus:
    """Precomputed symbols and profile-derived grid functions."""

    def __init__(self, problem: PerturbationProblem):
        self.problem = problem
        self.lattice = problem.lattice
        self.modes = problem.modes
        self.d = self.modes.d
        self.dealias = problem.dealias
        self.k = wavenumbers(self.lattice, self.modes)
        self.kv = wavevectors(self.lattice, self.modes)
        self.tol = problem.noise_filter
        # unpaired Nyquist modes would break conjugate symmetry: project them out
        self.keep = ~self.modes.nyquist_mask()
        # real profile and data: impose exact conjugate symmetry on every transform
        self.real = all(
            conjugate_symmetry_defect(c, self.modes) <= 1e-14 * np.abs(c).max(initial=0.0)
            for c in (problem.profile.coeffs, problem.dirichlet.coeffs)
        )
        f_hat = self.filter(problem.profile.coeffs.copy())
        self.xi = self.filter(problem.dirichlet.coeffs.copy())
        self.f = inverse(f_hat, self.d)
        self.grad_f = [inverse(1j * kvj * f_hat, self.d) for kvj in self.kv]
        # F_n = f^n / n!
        self.F = [np.ones(self.modes.N_alpha, dtype=complex)]
        for n in range(1, problem.order + 1):
            self.F.append(self.F[-1] * self.f / n)

    def filter(self, c):
        c *= self.keep.reshape(self.keep.shape + (1,) * (c.ndim - self.d))
        if self.real:
            axes = tuple(range(self.d))
            c[...] = 0.5 * (c + np.conj(np.roll(np.flip(c, axis=axes), 1, axis=axes)))
        if self.tol > 0:
            c[np.abs(c) < self.tol * np.abs(c).max(initial=0.0)] = 0.0
        return c

    def fwd(self, v):
        return self.filter(forward(v, self.d))

    def inv(self, c):
        return inverse(c, self.d)

    def times(self, grid_fn, coeffs):
        """Pseudospectral product of a grid function with a coefficient array."""
        if not self.dealias:
            return self.fwd(grid_fn * self.inv(coeffs))
        return self.filter(product_coeffs(self.fwd(grid_fn), coeffs, self.d, dealias=True))

    def kpow(self, m):
        return self.k**m


def _require_infinite_depth(problem, name):
    if not problem.lattice.infinite_depth:
        raise UnsupportedConfiguration(f"{name} is derived for infinite depth only")


def _fourier_tail_ratio(coeffs, modes: ModeSet) -> float:
    energy = np.abs(coeffs) ** 2
    total = energy.sum()
    if total == 0:
        return 0.0
    mask = np.zeros(modes.N_alpha, dtype=bool)
    for m, (ax, n) in enumerate(zip(modes.integer_axes, modes.N_alpha)):
        if n < 4:
            continue
        sl = [None] * modes.d
        sl[m] = slice(None)
        mask |= (np.abs(ax) >= 3 * n / 8)[tuple(sl)]
    return float(energy[mask].sum() / total)


def _chebyshev_tail_ratio(mixed_values) -> float:
    c = chebyshev.values_to_coeffs(mixed_values)
    energy = np.sum(np.abs(c) ** 2, axis=tuple(range(c.ndim - 1)))
    total = energy.sum()
    if total == 0:
        return 0.0
    n_y = c.shape[-1] - 1
    return float(energy[int(np.ceil(0.75 * n_y)) + 1:].sum() / total) if n_y >= 4 else 0.0


def _finish(corrections, algorithm, problem, diagnostics, volume=None):
    modes = problem.modes
    tails = [_fourier_tail_ratio(c, modes) for c in corrections]
    diagnostics["fourier_tail"] = tails
    bad = [n for n, t in enumerate(tails) if t > RESOLUTION_THRESHOLD]
    cheb = diagnostics.get("chebyshev_tail", [])
    bad_y = [n for n, t in enumerate(cheb) if t > RESOLUTION_THRESHOLD]
    if bad or bad_y:
        warnings.warn(
            f"{algorithm}: spectral tail energy above {RESOLUTION_THRESHOLD:g} at "
            f"Fourier orders {bad} / Chebyshev orders {bad_y}",
            ResolutionWarning,
            stacklevel=3,
        )
    fields = tuple(SurfaceField(problem.lattice, modes, c) for c in corrections)
    return DnoExpansion(fields, algorithm, problem, diagnostics, volume)


# ---------------------------------------------------------------------------
# Operator Expansions
# ---------------------------------------------------------------------------


def oe_expand(problem: PerturbationProblem, form: str = "adjoint",
              gradient_sign: int = OE_ADJOINT_GRADIENT_SIGN) -> DnoExpansion:
    """Operator Expansions.

    ``form="adjoint"`` uses the fast recursion that stores nu_l across
    orders; ``form="direct"`` re-applies lower-order operators to modified
    arguments (cost grows like 2^N). ``gradient_sign`` only affects the
    adjoint form.
    """
    _require_infinite_depth(problem, "OE")
    if form not in ("adjoint", "direct"):
        raise ValueError(f"unknown OE form {form!r}")
    c = _Calculus(problem)
    xi = c.xi
    N = problem.order
    if form == "adjoint":
        nu = [c.k * xi]
        for n in range(1, N + 1):
            out = c.kpow(n + 1) * c.times(c.F[n], xi)
            grad_term = np.zeros_like(xi)
            for gf, kvj in zip(c.grad_f, c.kv):
                grad_term += 1j * kvj * c.times(gf * c.F[n - 1], xi)
            out += gradient_sign * c.kpow(n - 1) * grad_term
            for ell in range(n):
                out -= c.kpow(n - ell) * c.times(c.F[n - ell], nu[ell])
            nu.append(out)
        return _finish(nu, "oe-adjoint", problem, {"gradient_sign": gradient_sign})

    def G(n, psi):
        if n == 0:
            return c.k * psi
        out = c.times(c.F[n], c.kpow(n + 1) * psi)
        for gf, kvj in zip(c.grad_f, c.kv):
            out -= c.times(gf * c.F[n - 1], 1j * kvj * c.kpow(n - 1) * psi)
        for ell in range(n):
            out -= G(ell, c.times(c.F[n - ell], c.kpow(n - ell) * psi))
        return out

    nu = [G(n, xi) for n in range(N + 1)]
    return _finish(nu, "oe-direct", problem, {})


# ---------------------------------------------------------------------------
# Field Expansions
# ---------------------------------------------------------------------------


def fe_expand(problem: PerturbationProblem) -> DnoExpansion:
    """Field Expansions with the trace-expansion Neumann extraction.

    The field is phi_n = sum_p a_{n,p} e^{|K^T p| y} e^{i p.alpha};
    D_y^m phi_l at y = 0 has coefficients |K^T p|^m a_{l,p}.
    """
    _require_infinite_depth(problem, "FE")
    c = _Calculus(problem)
    N = problem.order
    amp = [c.xi.copy()]
    for n in range(1, N + 1):
        acc = np.zeros_like(amp[0])
        for ell in range(n):
            acc -= c.times(c.F[n - ell], c.kpow(n - ell) * amp[ell])
        amp.append(acc)

    nu = []
    for n in range(N + 1):
        out = c.k * amp[n]
        for m in range(1, n + 1):
            out = out + c.times(c.F[m], c.kpow(m + 1) * amp[n - m])
        if n >= 1:
            grad_sum = [np.zeros(c.modes.N_alpha, dtype=complex) for _ in c.kv]
            for m in range(n):
                for j, kvj in enumerate(c.kv):
                    grad_sum[j] += c.F[m] * c.inv(1j * kvj * c.kpow(m) * amp[n - 1 - m])
            out = out - c.fwd(sum(gf * gs for gf, gs in zip(c.grad_f, grad_sum)))
        nu.append(out)
    return _finish(nu, "fe", problem, {})


# ---------------------------------------------------------------------------
# Transformed Field Expansions
# ---------------------------------------------------------------------------


class _TfeState:
    """Physical-space derivatives of one volume correction."""

    def __init__(self, c: _Calculus, U, dU):
        self.U = U
        self.dy = dU
        self.grad = [c.inv(1j * kvj[..., None] * U) for kvj in c.kv]
        self.dy_phys = c.inv(self.dy)

    @classmethod
    def zero(cls, shape, n):
        obj = cls.__new__(cls)
        z = np.zeros(shape, dtype=complex)
        obj.U = z
        obj.dy = z
        obj.grad = [z] * n
        obj.dy_phys = z
        return obj


def tfe_expand(problem: PerturbationProblem, keep_volume: bool = False) -> DnoExpansion:
    """Transformed Field Expansions on the flattened strip [-a, 0].

    Volume corrections are stored as Fourier coefficients at the Chebyshev
    nodes, shape (*N_alpha, n_y + 1). With ``keep_volume`` the corrections
    u_n are returned as VolumeFields in ``expansion.volume``.
    """
    c = _Calculus(problem)
    a = problem.strip_depth
    n_y = problem.n_y
    N = problem.order
    lattice, modes = problem.lattice, problem.modes
    T = TransparentOperator(lattice, a)
    s = T.symbol_of(c.k)
    M = modes.size
    shape = (*modes.N_alpha, n_y + 1)
    y = chebyshev.nodes(n_y, a).reshape((1,) * c.d + (-1,))
    ay = a + y

    f = c.f[..., None]
    gf = [g[..., None] for g in c.grad_f]
    gf2 = sum(g * g for g in gf)
    f_s, gf_s = c.f, c.grad_f
    gf2_s = sum(g * g for g in gf_s)

    k_flat = c.k.reshape(M)
    s_flat = s.reshape(M)
    zero_rhs = np.zeros((M, n_y + 1), dtype=complex)
    zero_surf = np.zeros(M, dtype=complex)

    def solve(volume, flux, top, bottom):
        u, du = solve_strip_flux(k_flat, s_flat, volume, flux, top, bottom, n_y, a)
        return u.reshape(shape), du.reshape(shape)

    xi = c.xi
    U0, dU0 = solve(zero_rhs, None, xi.reshape(M), zero_surf)
    prev2 = _TfeState.zero(shape, len(c.kv))
    prev1 = _TfeState(c, U0, dU0)
    nu = [prev1.dy[..., 0].copy()]
    nu_phys = c.inv(nu[0])
    cheb_tail = [_chebyshev_tail_ratio(U0)]
    volume = [U0] if keep_volume else None

    for n in range(1, N + 1):
        g1 = sum(g * u for g, u in zip(gf, prev1.grad))
        g2 = sum(g * u for g, u in zip(gf, prev2.grad))
        rhs = np.zeros(shape, dtype=complex)
        for j, kvj in enumerate(c.kv):
            Fa = (
                -2 * a * f * prev1.grad[j]
                + a * ay * gf[j] * prev1.dy_phys
                - f * f * prev2.grad[j]
                + ay * f * gf[j] * prev2.dy_phys
            ) / a**2
            rhs += 1j * kvj[..., None] * c.fwd(Fa)
        Fy = (a * ay * g1 + ay * f * g2 - ay * ay * gf2 * prev2.dy_phys) / a**2
        F0 = (a * g1 + f * g2 - ay * gf2 * prev2.dy_phys) / a**2
        rhs += c.fwd(F0)
        flux = c.fwd(Fy)

        bottom = s * prev1.U[..., -1]
        J = c.fwd(f_s * c.inv(bottom)) / a
        Un, dUn = solve(
            rhs.reshape(M, n_y + 1), flux.reshape(M, n_y + 1), zero_surf, J.reshape(M)
        )
        cur = _TfeState(c, Un, dUn)

        top1 = sum(g * u[..., 0] for g, u in zip(gf_s, prev1.grad))
        top2 = sum(g * u[..., 0] for g, u in zip(gf_s, prev2.grad))
        corr = (
            -top1
            - f_s * nu_phys / a
            - f_s * top2 / a
            + gf2_s * prev2.dy_phys[..., 0]
        )
        nu_n = cur.dy[..., 0] + c.fwd(corr)
        nu.append(nu_n)
        nu_phys = c.inv(nu_n)
        cheb_tail.append(_chebyshev_tail_ratio(Un))
        if keep_volume:
            volume.append(Un)
        prev2, prev1 = prev1, cur

    vol = None
    if keep_volume:
        vol = tuple(
            VolumeField(lattice, modes, n_y, a, chebyshev.values_to_coeffs(U)) for U in volume
        )
    return _finish(nu, "tfe", problem, {"chebyshev_tail": cheb_tail}, vol)


ALGORITHMS = {
    "oe-adjoint": lambda p: oe_expand(p, "adjoint"),
    "oe-direct": lambda p: oe_expand(p, "direct"),
    "fe": fe_expand,
    "tfe": tfe_expand,
}


def expand(problem: PerturbationProblem, algorithm: str) -> DnoExpansion:
    try:
        fn = ALGORITHMS[algorithm]
    except KeyError:
        raise ValueError(
            f"unknown algorithm {algorithm!r}; choose from {sorted(ALGORITHMS)}"
        ) from None
    return fn(problem)


def flat_multiplier_check(expansion: DnoExpansion) -> float:
    """max |nu_0 - (flat DNO) xi| over coefficients."""
    p = expansion.problem
    ref = flat_dno_symbol(p.lattice, p.modes) * p.dirichlet.coeffs
    return float(np.max(np.abs(expansion.corrections[0].coeffs - ref)))


__all__ = [
    "PerturbationProblem",
    "DnoExpansion",
    "oe_expand",
    "fe_expand",
    "tfe_expand",
    "expand",
    "ALGORITHMS",
    "OE_ADJOINT_GRADIENT_SIGN",
    "ResolutionWarning",
    "UnsupportedConfiguration",
    "flat_multiplier_check",
]
