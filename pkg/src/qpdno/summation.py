"""
Summation of perturbation series: truncated Taylor sums and Pade [L/M]
approximants, applied per Fourier coefficient of the Neumann data.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fields import SurfaceField

#: Relative singular-value cutoff for the Pade denominator system.
RANK_TOL = 1e-13
#: |b(eps)| below this fraction of the numerator scale flags a near pole.
NEAR_POLE = 1e-12
#: Largest accepted re-expansion defect, relative to max(1, max|c_n|).
DEFECT_TOL = 1e-10


class PoleError(ArithmeticError):
    """The approximant's denominator vanishes exactly at the evaluation point."""

    def __init__(self, epsilon):
        super().__init__(f"Pade denominator vanishes at eps = {epsilon!r}")
        self.epsilon = epsilon


def taylor_sum(coeffs, epsilon):
    """Horner evaluation of sum_n c_n eps^n along the first axis."""
    c = np.asarray(coeffs)
    out = np.zeros_like(c[0]) if c.ndim > 1 else c.dtype.type(0)
    for cn in c[::-1]:
        out = out * epsilon + cn
    return out


def default_split(N: int) -> tuple[int, int]:
    """Near-diagonal split L = ceil(N/2), M = floor(N/2)."""
    return (N + 1) // 2, N // 2


@dataclass(frozen=True)
class PadeApproximant:
    """[L/M](eps) = a(eps) / b(eps) with b_0 = 1.

    ``numerator`` holds a_0..a_L, ``denominator`` holds b_0..b_M (b_0 = 1).
    ``reduced`` records that the denominator degree was lowered from the
    requested one; ``taylor_fallback`` that no denominator survived.
    """

    L: int
    M: int
    numerator: np.ndarray
    denominator: np.ndarray
    requested_M: int = 0
    reduced: bool = False
    taylor_fallback: bool = False

    def __call__(self, epsilon):
        return pade_eval(self, epsilon)


def _denominator(c, L, M):
    """Least-squares b_1..b_M and the numerical rank of the Toeplitz system."""
    if M == 0:
        return np.zeros(0, dtype=c.dtype), 0
    # rows j = 1..M: sum_m b_m c_{L+j-m} = -c_{L+j}; c_k = 0 for k < 0
    A = np.zeros((M, M), dtype=complex)
    for j in range(1, M + 1):
        for m in range(1, M + 1):
            idx = L + j - m
            if idx >= 0:
                A[j - 1, m - 1] = c[idx]
    rhs = -np.asarray(c[L + 1:L + M + 1], dtype=complex)
    U, s, Vh = np.linalg.svd(A)
    if s.size == 0 or s[0] == 0:
        return None, 0
    rank = int(np.sum(s > RANK_TOL * s[0]))
    if rank < M:
        return None, rank
    b = Vh.conj().T @ ((U.conj().T @ rhs) / s)
    return b, rank


def pade_construct(coeffs, L: int, M: int) -> PadeApproximant:
    """Pade [L/M] approximant of the series c_0..c_N (L + M <= N).

    A rank-deficient denominator system is retried with M lowered to its
    numerical rank (L kept). A candidate whose Maclaurin coefficients miss
    the inputs by more than DEFECT_TOL (a near pole-zero doublet) is retried
    with one pole fewer. If nothing survives the Taylor polynomial
    through order L + M is returned as [L+M/0] with ``taylor_fallback`` set.
    """
    c = np.asarray(coeffs, dtype=complex)
    if L < 0 or M < 0:
        raise ValueError("L and M must be nonnegative")
    if L + M > c.size - 1:
        raise ValueError(f"[{L}/{M}] needs {L + M + 1} coefficients, got {c.size}")
    requested = M
    m = M
    scale = max(1.0, float(np.max(np.abs(c[:L + M + 1]))))
    while m > 0:
        b, rank = _denominator(c, L, m)
        if b is None:
            m = min(rank, m - 1)
            continue
        bb = np.concatenate([[1.0 + 0j], b])
        with np.errstate(all="ignore"):
            a = np.array([sum(bb[k] * c[ell - k] for k in range(min(ell, m) + 1)) for ell in range(L + 1)])
            cand = PadeApproximant(L, m, a, bb, requested, reduced=m < requested)
            # a near pole-zero doublet solves the linear system but its rounded
            # coefficients no longer reproduce the series; drop a pole and retry
            defect = np.max(np.abs(pade_expand(cand, L + m) - c[:L + m + 1]))
        if defect <= DEFECT_TOL * scale:
            return cand
        m -= 1
    if requested == 0:
        return PadeApproximant(L, 0, c[:L + 1].copy(), np.ones(1, dtype=complex), 0)
    n = L + requested
    return PadeApproximant(
        n, 0, c[:n + 1].copy(), np.ones(1, dtype=complex), requested,
        reduced=True, taylor_fallback=True,
    )


def pade_eval(p: PadeApproximant, epsilon, return_flag: bool = False):
    """Evaluate a(eps)/b(eps) by Horner's rule.

    Raises PoleError when the denominator is exactly zero. With
    ``return_flag`` the pair (value, near_pole) is returned.
    """
    num = taylor_sum(p.numerator, epsilon)
    den = taylor_sum(p.denominator, epsilon)
    if den == 0:
        raise PoleError(epsilon)
    scale = max(abs(num), float(np.max(np.abs(p.numerator))), 1e-300)
    near = abs(den) < NEAR_POLE * scale
    value = num / den
    return (value, near) if return_flag else value


def pade_expand(p: PadeApproximant, order: int) -> np.ndarray:
    """Maclaurin coefficients of a(eps)/b(eps) through ``order``."""
    out = np.zeros(order + 1, dtype=complex)
    a = np.zeros(order + 1, dtype=complex)
    a[:min(order, p.L) + 1] = p.numerator[:order + 1]
    for n in range(order + 1):
        acc = a[n]
        for m in range(1, min(n, p.M) + 1):
            acc -= p.denominator[m] * out[n - m]
        out[n] = acc
    return out


# ---------------------------------------------------------------------------
# batched Pade over Fourier modes
# ---------------------------------------------------------------------------


def _batched_pade_values(C, epsilon, L, M):
    """Pade sums of many series at once.

    C has shape (N + 1, P). Returns values (P,), near-pole flags (P,),
    exact-pole flags (P,) and the denominator degree actually used (P,).
    Modes whose denominator system is rank deficient, or whose approximant
    fails the re-expansion check, are recomputed one at a time through
    ``pade_construct``.
    """
    Np1, P = C.shape
    values = np.empty(P, dtype=complex)
    near = np.zeros(P, dtype=bool)
    pole = np.zeros(P, dtype=bool)
    used = np.full(P, M)
    zero = ~np.any(C != 0, axis=0)
    values[zero] = 0.0
    todo = np.flatnonzero(~zero)
    if M == 0 or todo.size == 0:
        values[todo] = taylor_sum(C[:L + 1, todo], epsilon)
        return values, near, pole, np.where(zero, 0, used)

    Cs = C[:, todo]
    A = np.zeros((todo.size, M, M), dtype=complex)
    for j in range(1, M + 1):
        for m in range(1, M + 1):
            idx = L + j - m
            if idx >= 0:
                A[:, j - 1, m - 1] = Cs[idx]
    rhs = -Cs[L + 1:L + M + 1].T
    s = np.linalg.svd(A, compute_uv=False)
    good = s[:, -1] > RANK_TOL * s[:, 0]
    b = np.zeros((todo.size, M), dtype=complex)
    if np.any(good):
        b[good] = np.linalg.solve(A[good], rhs[good][..., None])[..., 0]
    bb = np.concatenate([np.ones((todo.size, 1), dtype=complex), b], axis=1)
    a = np.zeros((todo.size, L + 1), dtype=complex)
    for ell in range(L + 1):
        for k in range(min(ell, M) + 1):
            a[:, ell] += bb[:, k] * Cs[ell - k]
    # same doublet test as pade_construct, vectorized over modes
    with np.errstate(all="ignore"):
        back = np.zeros((todo.size, L + M + 1), dtype=complex)
        for n in range(L + M + 1):
            acc = a[:, n].copy() if n <= L else np.zeros(todo.size, dtype=complex)
            for m in range(1, min(n, M) + 1):
                acc -= bb[:, m] * back[:, n - m]
            back[:, n] = acc
        defect = np.max(np.abs(back - Cs[:L + M + 1].T), axis=1)
        ref = np.maximum(1.0, np.max(np.abs(Cs[:L + M + 1]), axis=0))
    good &= defect <= DEFECT_TOL * ref
    num = taylor_sum(a.T, epsilon)
    den = taylor_sum(bb.T, epsilon)
    scale = np.maximum(np.maximum(np.abs(num), np.abs(a).max(axis=1)), 1e-300)
    exact = good & (den == 0)
    ok = good & ~exact
    values[todo[ok]] = num[ok] / den[ok]
    near[todo[ok]] = np.abs(den[ok]) < NEAR_POLE * scale[ok]
    pole[todo[exact]] = True
    values[todo[exact]] = np.nan

    for i in np.flatnonzero(~good):
        approx = pade_construct(Cs[:, i], L, M)
        used[todo[i]] = approx.M
        try:
            v, fl = pade_eval(approx, epsilon, return_flag=True)
        except PoleError:
            values[todo[i]] = np.nan
            pole[todo[i]] = True
            continue
        values[todo[i]] = v
        near[todo[i]] = fl
    used[zero] = 0
    return values, near, pole, used


@dataclass(frozen=True)
class SumDiagnostics:
    """Per-call summary of a coefficientwise summation."""

    method: str
    order: int
    L: int = 0
    M: int = 0
    near_pole_modes: int = 0
    pole_modes: int = 0
    reduced_modes: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def pole_flag(self) -> bool:
        return self.near_pole_modes > 0 or self.pole_modes > 0


def sum_expansion(expansion, epsilon: float, method: str = "taylor", L=None, M=None,
                  order: int | None = None):
    """Summed Neumann data at ``epsilon`` from the corrections nu_0..nu_n.

    ``order`` truncates the series (default: all available corrections).
    Pade defaults to the near-diagonal split of ``order``. Returns the
    SurfaceField and a SumDiagnostics record.
    """
    stack = expansion.coefficient_stack() if hasattr(expansion, "coefficient_stack") else np.asarray(expansion)
    proto = expansion.corrections[0] if hasattr(expansion, "corrections") else None
    n_avail = stack.shape[0] - 1
    if n_avail < 0:
        raise ValueError("empty expansion")
    n = n_avail if order is None else int(order)
    if not 0 <= n <= n_avail:
        raise ValueError(f"order {n} outside 0..{n_avail}")
    stack = stack[:n + 1]
    shape = stack.shape[1:]

    if method == "taylor":
        out = taylor_sum(stack, epsilon)
        diag = SumDiagnostics("taylor", n)
    elif method == "pade":
        if L is None and M is None:
            L, M = default_split(n)
        elif L is None:
            L = n - M
        elif M is None:
            M = n - L
        if L + M > n:
            raise ValueError(f"[{L}/{M}] exceeds available order {n}")
        vals, near, pole, used = _batched_pade_values(stack.reshape(n + 1, -1), epsilon, L, M)
        out = vals.reshape(shape)
        diag = SumDiagnostics(
            "pade", n, L, M,
            near_pole_modes=int(near.sum()),
            pole_modes=int(pole.sum()),
            reduced_modes=int(np.sum((used < M) & (used >= 0) & np.any(stack.reshape(n + 1, -1) != 0, axis=0))),
        )
    else:
        raise ValueError(f"unknown summation method {method!r}; choose 'taylor' or 'pade'")

    if proto is None:
        return out, diag
    return SurfaceField(proto.lattice, proto.modes, out), diag


__all__ = [
    "PoleError",
    "PadeApproximant",
    "SumDiagnostics",
    "taylor_sum",
    "default_split",
    "pade_construct",
    "pade_eval",
    "pade_expand",
    "sum_expansion",
]
