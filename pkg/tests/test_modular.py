import math

import numpy as np
from scipy.integrate import trapezoid
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hardypx import geometry, testfn
from hardypx.exponent import ExponentField
from hardypx.modular import QuadratureError, integrate, modular_integral, tensor_rule

TENT_OVER_X2 = 4 - 2 * math.log(2) - 6 * math.log(1.5)  # int_1^3 tent^2 / x^2


def _trapezoid(f, a, b, m=400_001):
    x = np.linspace(a, b, m)
    return float(trapezoid(f(x), x))


def test_tensor_rule_weights_sum_to_cube_volume():
    for n in (1, 2, 3):
        T, W = tensor_rule(n)
        assert T.shape == (5**n, n)
        assert math.fsum(W) == pytest.approx(2.0**n, rel=1e-14)


def test_polynomial_exactness():
    res = integrate(lambda X: X[:, 0] ** 2, geometry.interval(0, 1), resolution=1, levels=1)
    assert res.value == pytest.approx(1 / 3, rel=1e-15)
    assert res.error < 1e-15


def test_unit_square():
    res = integrate(lambda X: np.ones(X.shape[0]), ([0, 0], [1, 1]), resolution=2, levels=1)
    assert res.value == pytest.approx(1.0, rel=1e-15)


def test_tent_squared_over_x_squared_matches_closed_form_and_trapezoid():
    tent = testfn.make("tent", [2.0], [1.0])
    res = integrate(lambda X: tent(X) ** 2 / X[:, 0] ** 2, tent.support, resolution=4, levels=2,
                    breakpoints=tent.breakpoints)
    trap = _trapezoid(lambda x: np.maximum(0, 1 - np.abs(x - 2)) ** 2 / x**2, 1, 3)
    assert TENT_OVER_X2 == pytest.approx(0.1809150, abs=1e-7)
    assert res.value == pytest.approx(TENT_OVER_X2, rel=1e-10)
    assert trap == pytest.approx(TENT_OVER_X2, rel=1e-9)


def test_modular_of_one_on_unit_box_is_one():
    p = ExponentField.coerce("2 + x1*x2")
    res = modular_integral(lambda X: np.ones(X.shape[0]), p, None,
                           domain=geometry.box([0, 0], [1, 1]), resolution=2, levels=1)
    assert res.value == pytest.approx(1.0, rel=1e-14)


def test_weighted_modular_of_tent():
    tent = testfn.make("tent", [2.0], [1.0])
    p = ExponentField.coerce(2)
    res = modular_integral(tent, p, lambda X: 0.5 / X[:, 0] ** 2, resolution=4, levels=2)
    assert res.value == pytest.approx(0.5 * TENT_OVER_X2, rel=1e-12)


def test_tent_squared_has_mass_two_thirds():
    tent = testfn.make("tent", [2.0], [1.0])
    res = modular_integral(tent, ExponentField.coerce(2), None, resolution=4, levels=1)
    assert res.value == pytest.approx(2 / 3, rel=1e-14)


def test_modular_is_zero_outside_support_of_measure_singularity():
    # density singular at x = 0 is never evaluated where f = 0
    tent = testfn.make("tent", [2.0], [0.5])
    res = modular_integral(tent, ExponentField.coerce(2), lambda X: 1 / X[:, 0],
                           box=(np.array([0.0]), np.array([3.0])), resolution=6, levels=1,
                           breakpoints=tent.breakpoints)
    assert math.isfinite(res.value) and res.value > 0


def test_non_finite_integrand_raises():
    with pytest.raises(QuadratureError):
        integrate(lambda X: np.full(X.shape[0], np.nan), ([0.0], [1.0]), 1, 1)


def test_levels_must_be_positive():
    with pytest.raises(ValueError):
        integrate(lambda X: X[:, 0], ([0.0], [1.0]), 1, 0)


def test_annulus_area():
    dom = geometry.Annulus(2, 1.0, 2.0, refine_depth=6)
    res = integrate(lambda X: np.ones(X.shape[0]), dom, resolution=32, levels=1)
    assert res.value == pytest.approx(3 * math.pi, rel=5e-3)


def test_adaptive_refinement_reduces_error_for_a_kink():
    f = lambda X: np.abs(X[:, 0] - 1 / 3)
    coarse = integrate(f, ([0.0], [1.0]), 2, 1)
    fine = integrate(f, ([0.0], [1.0]), 2, 8)
    exact = (1 / 3) ** 2 / 2 + (2 / 3) ** 2 / 2
    assert abs(fine.value - exact) < abs(coarse.value - exact)
    assert abs(fine.value - exact) < 1e-6


@given(st.floats(0.1, 5), st.floats(0.5, 4), st.integers(1, 3))
def test_modular_of_constant_matches_closed_form(c, p0, n):
    box = (np.zeros(n), np.ones(n))
    res = modular_integral(lambda X: np.full(X.shape[0], c), ExponentField.coerce(p0), None,
                           box=box, resolution=1, levels=1)
    assert res.value == pytest.approx(c**p0, rel=1e-12)
