import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qpdno import chebyshev

A = 0.1


def test_nodes_ordering():
    y = chebyshev.nodes(8, A)
    assert y[0] == 0.0 and y[-1] == pytest.approx(-A, abs=1e-17)
    assert np.all(np.diff(y) < 0)


@given(st.integers(1, 40), st.integers(0, 2**31 - 1))
@settings(max_examples=40, deadline=None)
def test_transform_round_trip(n_y, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=n_y + 1) + 1j * rng.normal(size=n_y + 1)
    back = chebyshev.coeffs_to_values(chebyshev.values_to_coeffs(v))
    np.testing.assert_allclose(back, v, atol=1e-13)


def test_polynomial_derivative_exact():
    y = chebyshev.nodes(12, A)
    v = 3 * y**5 - y**2 + 2
    np.testing.assert_allclose(chebyshev.diff_values(v, A), 15 * y**4 - 2 * y, atol=1e-12)
    np.testing.assert_allclose(chebyshev.diff_matrix(12, A) @ v, 15 * y**4 - 2 * y, atol=1e-11)


def test_evaluate_off_grid():
    y = chebyshev.nodes(10, A)
    c = chebyshev.values_to_coeffs(np.exp(y / A))
    t = np.linspace(-A, 0, 7)
    np.testing.assert_allclose(chebyshev.evaluate(c, t, A), np.exp(t / A), rtol=1e-8)


def test_clenshaw_curtis_exactness():
    x, w = chebyshev.clenshaw_curtis(16)
    assert w.sum() == pytest.approx(2.0, abs=1e-15)
    assert np.dot(w, x**6) == pytest.approx(2 / 7, abs=1e-15)
    with pytest.raises(ValueError):
        chebyshev.clenshaw_curtis(0)


def test_integration_matrix():
    n_y = 14
    y = chebyshev.nodes(n_y, A)
    Q = chebyshev.integration_matrix(n_y, A)
    np.testing.assert_allclose(Q @ (4 * y**3), y**4 - A**4, atol=1e-16)
    assert not Q.flags.writeable
