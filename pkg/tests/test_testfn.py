import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hardypx import geometry, testfn
from hardypx.exponent import ExponentField


def test_tent_values_and_slope():
    xi = testfn.make("tent", [2.0], [1.0], domain=geometry.interval(1, 3))
    assert xi([2.0]) == 1.0 and xi([1.0]) == 0.0 and xi([3.0]) == 0.0
    x = np.linspace(1.01, 2.99, 50)[:, None]
    np.testing.assert_allclose(xi.grad_norm(x), 1.0)


def test_tent_slope_at_kinks_is_left_limit():
    xi = testfn.make("tent", [2.0], [1.0])
    assert xi.grad([2.0])[0] == 1.0     # left of the peak the slope is +1
    assert xi.grad([3.0])[0] == -1.0
    assert xi.grad([1.0])[0] == 0.0


def test_poly_bump_gradient_is_continuous_and_vanishes_at_the_edge():
    xi = testfn.make("poly_bump", [0.0, 0.0], 1.0, power=2)
    edge = np.array([[1.0 - 1e-9, 0.0], [1.0 + 1e-9, 0.0]])
    g = xi.grad_norm(edge)
    assert g[0] < 1e-8 and g[1] == 0.0


def test_poly_bump_power_one_has_a_gradient_jump_at_the_edge():
    # (1 - s^2) has slope 2/rho at the edge: Lipschitz but not C^1
    xi = testfn.make("poly_bump", [0.0], 0.5, power=1)
    assert xi.grad_norm(np.array([[0.5 - 1e-12]]))[0] == pytest.approx(4.0, rel=1e-9)
    assert xi.grad_norm(np.array([[0.5 + 1e-12]]))[0] == 0.0


def test_tensor_tent_peak_and_gradient_bound():
    xi = testfn.make("tensor_tent", [2.0, 2.0], [1.0, 1.0])
    assert xi([2.0, 2.0]) == 1.0
    X = np.random.default_rng(0).uniform(1, 3, (500, 2))
    assert np.all(xi.grad_norm(X) <= math.sqrt(2) + 1e-15)


def test_radial_bump_gradient_at_centre_is_zero():
    xi = testfn.make("radial_bump", [1.0, 1.0], 0.5)
    np.testing.assert_array_equal(xi.grad([1.0, 1.0]), [0.0, 0.0])
    assert xi.grad_norm(np.array([[1.2, 1.0]]))[0] == pytest.approx(2.0)


@pytest.mark.parametrize("args", [
    ("nope", [0.0], 1.0),
    ("tent", [0.0, 0.0], 1.0),
    ("tent", [0.0], -1.0),
    ("poly_bump", [0.0], [1.0, 2.0]),
])
def test_invalid_parameters(args):
    with pytest.raises(ValueError):
        testfn.make(*args)


def test_non_integer_power_rejected():
    with pytest.raises(ValueError):
        testfn.make("poly_bump", [0.0], 1.0, power=1.5)


def test_support_outside_domain_rejected():
    with pytest.raises(testfn.SupportError):
        testfn.make("tent", [2.0], [1.5], domain=geometry.interval(1, 3))
    with pytest.raises(testfn.SupportError):
        testfn.make("poly_bump", [0.0, 0.0], 0.5, domain=geometry.Annulus(2, 1, 2))


def test_support_touching_the_boundary_is_allowed():
    testfn.make("tent", [2.0], [1.0], domain=geometry.interval(1, 3))
    testfn.make("poly_bump", [1.5, 0.0], 0.5, domain=geometry.Annulus(2, 1, 2))


def test_log_integrand_conventions():
    p = ExponentField.coerce("2 + x1")
    zero = testfn.make("tent", [0.0], [1.0]).scaled(0.0)
    assert testfn.log_integrand(zero, p, [0.3]) == 0.0
    one = testfn.make("tent", [0.0], [10.0])
    assert testfn.log_integrand(one, p, [0.0]) == 0.0   # xi = 1, log 1 = 0


def test_log_integrand_value():
    # xi = 1/e, p = 2, |grad p| = 1: |e^-1 * (-1)|^2 * 1 / 2^2
    p = ExponentField.coerce("2 + x1")
    xi = testfn.make("tent", [0.0], [1.0]).scaled(1 / math.e)
    assert testfn.log_integrand(xi, p, [0.0]) == pytest.approx(math.exp(-2) / 4, rel=1e-9)


def test_log_integrand_vanishes_for_declared_constant_exponent():
    xi = testfn.make("tent", [0.0], [1.0]).scaled(0.3)
    assert testfn.log_integrand(xi, ExponentField.coerce(3), [0.1]) == 0.0


def test_family_cycle():
    assert [testfn.family_for_dim(1, i) for i in range(3)] == ["tent", "poly_bump", "tent"]
    assert testfn.family_for_dim(3, 0) == "tensor_tent"


@given(st.integers(0, 2**31 - 1), st.sampled_from(testfn.FAMILIES[1:]))
def test_sampled_functions_fit_the_annulus(seed, family):
    dom = geometry.Annulus(2, 0.5, 2.0)
    xi = testfn.sample(dom, family, np.random.default_rng(seed))
    if family == "tensor_tent":
        assert dom.contains_box(*xi.support, strict=False)
    else:
        assert dom.contains_ball(xi.center, xi.radius[0], strict=False)


@given(st.floats(-3, 3), st.floats(0.1, 2), st.floats(-5, 5))
def test_tent_gradient_matches_difference_quotient(c, rho, x):
    xi = testfn.make("tent", [c], [rho])
    h = 1e-7
    if min(abs(x - c), abs(x - c - rho), abs(x - c + rho)) < 1e-5:
        return
    fd = (xi([x + h]) - xi([x - h])) / (2 * h)
    assert xi.grad([x])[0] == pytest.approx(fd, abs=1e-6)


@given(st.integers(1, 4), st.lists(st.floats(-1, 1), min_size=2, max_size=2))
def test_poly_bump_gradient_matches_difference_quotient(k, x):
    xi = testfn.make("poly_bump", [0.1, -0.2], 0.9, power=k)
    x = np.array(x)
    if abs(np.linalg.norm(x - [0.1, -0.2]) - 0.9) < 1e-4:
        return
    h = 1e-6
    fd = [(xi(x + h * e) - xi(x - h * e)) / (2 * h) for e in np.eye(2)]
    np.testing.assert_allclose(xi.grad(x), fd, atol=1e-6)
