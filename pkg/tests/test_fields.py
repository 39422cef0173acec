import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hardypx.fields import RadialProfile, ScalarField, as_points


def test_as_points_shapes():
    X, single = as_points([1.0, 2.0])
    assert X.shape == (1, 2) and single
    X, single = as_points(np.zeros((4, 3)))
    assert X.shape == (4, 3) and not single


def test_constant_field_has_zero_gradient():
    f = ScalarField.coerce(2.5)
    assert f.constant
    assert f([1.0, 2.0]) == 2.5
    np.testing.assert_array_equal(f.grad(np.ones((3, 2))), 0.0)


def test_expression_field_gradient_by_differences():
    f = ScalarField.coerce("x1^2 + 3*x2")
    np.testing.assert_allclose(f.grad([2.0, 1.0]), [4.0, 3.0], rtol=1e-8)


def test_analytic_gradient_is_preferred():
    f = ScalarField(lambda X: X[:, 0], grad_fn=lambda X: np.full_like(X, 7.0))
    np.testing.assert_array_equal(f.grad([0.0, 0.0]), [7.0, 7.0])


def test_closure_gradient_falls_back_to_central_differences():
    f = ScalarField(lambda X: np.sin(X[:, 0]))
    assert f.grad([0.3])[0] == pytest.approx(np.cos(0.3), rel=1e-8)


def test_shifted_keeps_gradient():
    f = ScalarField.coerce("x1*x2").shifted(-1.0)
    assert f([2.0, 3.0]) == pytest.approx(5.0)
    np.testing.assert_allclose(f.grad([2.0, 3.0]), [3.0, 2.0], rtol=1e-8)


def test_coerce_rejects_other_types():
    with pytest.raises(TypeError):
        ScalarField.coerce([1, 2])


def test_radial_profile_from_expression_with_derivatives():
    prof = RadialProfile.from_expr("r^3/3")
    r = np.array([0.5, 1.0, 2.0])
    np.testing.assert_allclose(prof.dv(r), r**2, rtol=1e-8)
    np.testing.assert_allclose(prof.d2v(r), 2 * r, rtol=1e-5)


def test_radial_field_gradient_points_outward():
    u = RadialProfile.from_expr("r^2/2", "r", "1").as_field()
    x = np.array([[3.0, 4.0]])
    np.testing.assert_allclose(u(x), [12.5])
    np.testing.assert_allclose(u.grad(x), x, rtol=1e-14)
    np.testing.assert_array_equal(u.grad(np.zeros((1, 2))), 0.0)


@given(st.floats(-10, 10).filter(lambda t: abs(t) > 1e-3))
def test_radial_gradient_in_one_dimension_is_signed_derivative(x):
    u = RadialProfile.from_expr("r", "1", "0").as_field()
    assert u.grad([x])[0] == np.sign(x)
