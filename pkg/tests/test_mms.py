import math

import numpy as np
import pytest

from qpdno.fields import SurfaceField
from qpdno.lattice import LatticeSpec, ModeSet
from qpdno.mms import (
    PROFILES,
    ManufacturedSolution,
    UndefinedMetricError,
    exact_traces,
    profile_library,
    relative_error,
)

from conftest import SQRT2

K3 = [[1.0, 0.0], [0.0, -1.0], [1 / SQRT2, 1 / math.sqrt(3)]]


def test_flat_surface_traces(lattice2d, modes16):
    ms = ManufacturedSolution(lattice2d, -3.0, (1, 1))
    flat = SurfaceField(lattice2d, modes16, np.zeros(modes16.N_alpha, dtype=complex))
    xi, nu = exact_traces(ms, flat)
    assert xi.coefficient((1, 1)) == pytest.approx(-3.0)
    assert nu.coefficient((1, 1)) == pytest.approx(-3.0 * (1 + SQRT2))


def test_traces_match_finite_differences(lattice2d):
    # nu = phi_y - (K^T grad g).(K^T grad phi) checked at one point by differencing
    modes = ModeSet((32, 32))
    ms = ManufacturedSolution(lattice2d, -3.0, (1, 1))
    g = profile_library("cos_sin_2d", lattice2d, modes, {"amplitude": 0.1})
    _, nu = exact_traces(ms, g)
    j = (5, 7)
    a1, a2 = 2 * np.pi * j[0] / 32, 2 * np.pi * j[1] / 32
    gv = lambda x1, x2: 0.1 * np.cos(x1) * np.sin(x2)  # noqa: E731
    h = 1e-6
    y = gv(a1, a2)
    phi = lambda x1, x2, yy: ms.evaluate((x1, x2), yy)  # noqa: E731
    phi_y = (phi(a1, a2, y + h) - phi(a1, a2, y - h)) / (2 * h)
    # directional derivative along K^T (x in R): d/dx = d/da1 + sqrt2 d/da2
    dphi = (phi(a1 + h, a2 + SQRT2 * h, y) - phi(a1 - h, a2 - SQRT2 * h, y)) / (2 * h)
    dg = (gv(a1 + h, a2 + SQRT2 * h) - gv(a1 - h, a2 - SQRT2 * h)) / (2 * h)
    assert nu.values[j] == pytest.approx(phi_y - dg * dphi, abs=1e-7)


def test_symmetrized_solution_is_real():
    lat = LatticeSpec(K3)
    m = ModeSet((8, 8, 8))
    ms = ManufacturedSolution(lat, -1.0, (1, 1, 2), symmetrize=True)
    g = profile_library("cos_cos_sin_3d", lat, m, {"amplitude": 0.05})
    xi, nu = exact_traces(ms, SurfaceField.from_values(lat, m, g.values.real))
    assert np.max(np.abs(xi.values.imag)) < 1e-14
    assert np.max(np.abs(nu.values.imag)) < 1e-13


def test_finite_depth_profile_range_reduced():
    lat = LatticeSpec([[1.0], [SQRT2]], depth=0.25)
    ms = ManufacturedSolution(lat, 1.0, (40, 0))
    Y, dY = ms.profile(np.array([0.0, -0.1]))
    k = ms.k
    assert Y[0] == pytest.approx(1.0)
    assert dY[0] == pytest.approx(k * math.tanh(0.25 * k), rel=1e-14)
    assert Y[1] == pytest.approx(math.cosh(k * 0.15) / math.cosh(k * 0.25), rel=1e-12)
    assert np.all(np.isfinite(ms.profile(np.array([-0.2]))[0]))


def test_surface_below_bottom_rejected():
    lat = LatticeSpec([[1.0], [SQRT2]], depth=0.25)
    m = ModeSet((8, 8))
    g = SurfaceField.from_modes(lat, m, {(0, 0): -0.3})
    with pytest.raises(ValueError):
        exact_traces(ManufacturedSolution(lat, 1.0, (1, 0)), g)


def test_complex_profile_rejected(lattice2d, modes16):
    g = SurfaceField.from_modes(lattice2d, modes16, {(1, 0): 0.1})
    with pytest.raises(ValueError):
        exact_traces(ManufacturedSolution(lattice2d, 1.0, (1, 0)), g)


def test_relative_error(lattice2d, modes16):
    a = SurfaceField.from_modes(lattice2d, modes16, {(1, 0): 2.0})
    b = SurfaceField.from_modes(lattice2d, modes16, {(1, 0): 2.0, (0, 1): 0.02})
    assert relative_error(a, b) == pytest.approx(0.01)
    zero = a * 0.0
    with pytest.raises(UndefinedMetricError):
        relative_error(zero, b)


def test_profile_library(lattice2d, modes16):
    assert set(PROFILES) == {"cos_sin_2d", "cos_cos_sin_3d", "custom", "flat"}
    f = profile_library("custom", lattice2d, modes16, {"coefficients": {"1,-1": 0.5, (-1, 1): 0.5}})
    assert f.coefficient((1, -1)) == 0.5
    assert profile_library("flat", lattice2d, modes16).sup_norm() == 0.0
    with pytest.raises(ValueError, match="available"):
        profile_library("sawtooth", lattice2d, modes16)
    with pytest.raises(ValueError):
        profile_library("cos_cos_sin_3d", lattice2d, modes16)
    with pytest.raises(ValueError):
        profile_library("custom", lattice2d, modes16, {})


def test_mode_dimension_checked(lattice2d):
    with pytest.raises(ValueError):
        ManufacturedSolution(lattice2d, 1.0, (1, 1, 1))
