"""Random per-mode problems shared by the BVP and acceptance tests."""

import numpy as np

from qpdno.bvp import ModeBvp


def random_bvp(rng, a=0.1, k_max=50.0, degree=8, n_dims=1):
    """Random instance with polynomial forcings in all channels, F^y(-a) = 0."""
    k = rng.uniform(0.0, k_max)
    direction = rng.normal(size=n_dims)
    w = k * direction / np.linalg.norm(direction)

    def poly():
        return rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1)

    fy = poly()
    fy[0] -= np.sum(fy * (-1.0) ** np.arange(fy.size))
    return ModeBvp(
        wavevector=w,
        strip_depth=a,
        dirichlet_top=complex(rng.normal(), rng.normal()),
        robin_bottom=complex(rng.normal(), rng.normal()),
        forcing_alpha=np.stack([poly() for _ in range(n_dims)]),
        forcing_y=fy,
        forcing_0=poly(),
    )


def oracle_gap(bvp, n_y=32):
    """Relative sup disagreement (values and derivatives) solver vs oracle."""
    from qpdno import chebyshev
    from qpdno.bvp import solve_mode
    from qpdno.oracle import analytic_oracle_solve

    sol = solve_mode(bvp, n_y)
    ref = analytic_oracle_solve(bvp, order=96, n_y=n_y)
    du = chebyshev.coeffs_to_values(chebyshev.diff_coeffs(sol.coeffs, bvp.strip_depth))
    gap_u = np.max(np.abs(sol.values - ref.values)) / np.max(np.abs(ref.values))
    gap_du = np.max(np.abs(du - ref.derivative)) / np.max(np.abs(ref.derivative))
    return max(gap_u, gap_du)
