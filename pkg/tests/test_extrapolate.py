import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entsus.extrapolate import matrix_derivative, richardson, second_derivative


def test_richardson_removes_linear_error():
    # f(h) = 1 + 3h + h^2 sampled at h = 0.1, 0.05, 0.025
    samples = [1 + 3 * h + h**2 for h in (0.1, 0.05, 0.025)]
    out = richardson(samples, leading_order=1, order_step=1)
    assert out.value == pytest.approx(1.0, abs=1e-12)
    assert out.monotone


def test_richardson_even_series():
    samples = [2 - 5 * h**2 + h**4 for h in (0.2, 0.1, 0.05)]
    out = richardson(samples, leading_order=2, order_step=2)
    assert out.value == pytest.approx(2.0, abs=1e-12)


def test_richardson_needs_two_samples():
    with pytest.raises(ValueError):
        richardson([1.0], leading_order=1)


@settings(max_examples=30, deadline=None)
@given(a=st.floats(-2, 2), b=st.floats(-2, 2), c=st.floats(-2, 2))
def test_second_derivative_cubic_exact(a, b, c):
    out = second_derivative(lambda x: a + b * x + c * x**2 + 0.3 * x**3, 0.1)
    assert out.value == pytest.approx(2 * c, abs=1e-8)


def test_second_derivative_cosine():
    out = second_derivative(np.cos, 0.05)
    assert out.value == pytest.approx(-1.0, abs=1e-11)
    assert out.error_estimate < 1e-8


def test_matrix_derivative():
    base = np.array([[0.0, 1.0], [1.0, 0.0]])
    gen = np.array([[1.0, 0.0], [0.0, -1.0]])
    deriv = matrix_derivative(lambda h: base + np.sin(h) * gen + h**2 * np.eye(2), 0.05)
    np.testing.assert_allclose(deriv, gen, atol=1e-10)
