import math

import numpy as np
import pytest

from qpdno.lattice import (
    ConfigurationError,
    LatticeSpec,
    ModeSet,
    smallest_divisor,
    wavenumber,
    wavenumbers,
    wavevectors,
)

SQRT2 = math.sqrt(2.0)


def test_wavenumber_frozen_values(lattice2d):
    # |K^T p| with K = (1, sqrt 2)^T is |p1 + sqrt2 p2|
    assert wavenumber(lattice2d, (1, 1)) == pytest.approx(1 + SQRT2, abs=1e-15)
    assert wavenumber(lattice2d, (3, -2)) == pytest.approx(abs(3 - 2 * SQRT2), abs=1e-15)
    assert wavenumber(lattice2d, (0, 0)) == 0.0


def test_wavenumber_3d_frozen():
    K = [[1, 0], [0, -1], [1 / SQRT2, 1 / math.sqrt(3)]]
    lat = LatticeSpec(K)
    expected = math.hypot(1 + 2 / SQRT2, -1 + 2 / math.sqrt(3))
    assert wavenumber(lat, (1, 1, 2)) == pytest.approx(expected, rel=1e-15)


def test_wavenumber_shape_check(lattice2d):
    with pytest.raises(ValueError):
        wavenumber(lattice2d, (1, 2, 3))


@pytest.mark.parametrize(
    "K",
    [
        [[1.0], [2.0]],                    # integer dependent
        [[1.0, 0.0], [0.0, 1.0]],          # d == n
        [[1.0], [SQRT2], [3.0], [5.0]],    # d > 3
        [[[1.0]]],                         # wrong rank
    ],
)
def test_inadmissible_lattices(K):
    with pytest.raises(ConfigurationError):
        LatticeSpec(K)


def test_depth_must_be_positive():
    with pytest.raises(ConfigurationError):
        LatticeSpec([[1.0], [SQRT2]], depth=0.0)
    assert LatticeSpec([[1.0], [SQRT2]], depth=0.25).depth == 0.25


def test_modeset_layout():
    m = ModeSet((4, 6))
    assert m.size == 24
    assert m.modes[0].tolist() == [-2, -3]
    assert m.modes[-1].tolist() == [1, 2]
    assert m.position((-2, -3)) == (2, 3)
    assert m.position((0, 0)) == (0, 0)
    with pytest.raises(KeyError):
        m.position((2, 0))


def test_canonical_round_trip():
    m = ModeSet((4, 6))
    arr = np.arange(24.0).reshape(4, 6)
    flat = m.to_canonical(arr)
    np.testing.assert_array_equal(m.from_canonical(flat), arr)
    for i, p in enumerate(m.modes):
        assert flat[i] == arr[m.position(tuple(p))]


def test_nyquist_mask():
    m = ModeSet((4, 4))
    mask = m.nyquist_mask()
    assert mask.sum() == 7
    assert mask[m.position((-2, 1))] and not mask[m.position((1, 1))]


def test_wavenumbers_grid(lattice2d, modes16):
    k = wavenumbers(lattice2d, modes16)
    assert k[0, 0] == 0.0
    for p in [(1, 1), (-3, 2), (7, -8)]:
        assert k[modes16.position(p)] == pytest.approx(wavenumber(lattice2d, p), abs=1e-14)
    w = wavevectors(lattice2d, modes16)
    assert w.shape == (1, 16, 16)


def test_smallest_divisor(lattice2d, modes16):
    kmin, p = smallest_divisor(lattice2d, modes16)
    assert kmin == pytest.approx(wavenumber(lattice2d, p))
    # (7, -5) gives |7 - 5 sqrt2| = 0.0711
    assert kmin == pytest.approx(abs(7 - 5 * SQRT2), abs=1e-14)
    assert smallest_divisor(lattice2d, ModeSet((1, 1))) == (math.inf, None)
