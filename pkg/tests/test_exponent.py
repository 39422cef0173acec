import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from hardypx import geometry
from hardypx.exponent import (ExponentField, NormConvergenceError, class_P_check,
                              log_holder_constant, luxemburg_norm, modular, validate_P)
from hardypx.fields import ScalarField


def test_constant_exponent_bounds():
    b = validate_P(ExponentField.coerce(2), geometry.box([0, 0], [1, 1]))
    assert (b.p_minus, b.p_plus, b.ok) == (2.0, 2.0, True)


def test_monotone_exponent_bounds_are_endpoint_values():
    b = validate_P(ExponentField.coerce("2 + 1/(1 - x1)"), geometry.interval(-3, 0))
    assert b.p_minus == pytest.approx(2.25) and b.p_plus == pytest.approx(3.0)
    assert b.ok
    # grid scan oracle
    x = np.linspace(-3, 0, 1001)
    vals = 2 + 1 / (1 - x)
    assert b.p_minus == pytest.approx(vals.min()) and b.p_plus == pytest.approx(vals.max())


def test_exponent_one_fails_bounds_check():
    assert not validate_P(ExponentField.coerce(1), geometry.interval(0, 1)).ok


def test_declared_constant_exponent_has_exactly_zero_gradient():
    p = ExponentField.coerce("3")
    assert p.declared_constant
    assert np.all(p.grad(np.random.default_rng(0).normal(size=(5, 2))) == 0.0)


def test_piecewise_exponent():
    p = ExponentField.piecewise(0.5, ScalarField.coerce(2), ScalarField.coerce(3))
    np.testing.assert_array_equal(p(np.array([[0.2], [0.7]])), [2.0, 3.0])


def test_class_check_reports_finite_maxima():
    rep = class_P_check(ExponentField.coerce("2 + x1"), geometry.interval(0, 1))
    assert rep.ok and rep.max_p_pow_p == pytest.approx(27.0)


def test_log_holder_constant_of_constant_exponent_is_zero():
    assert log_holder_constant(ExponentField.coerce(2), geometry.interval(0, 1)) == 0.0


def test_log_holder_constant_of_linear_exponent_matches_brute_force():
    dom = geometry.interval(0, 1)
    est = log_holder_constant(ExponentField.coerce("2 + x1"), dom, num_pairs=10_000, seed=3)
    # brute force over an independent set of pairs
    rng = np.random.default_rng(11)
    x, y = rng.uniform(0, 1, (2, 10_000))
    d = np.abs(x - y)
    brute = np.max(d * np.log(math.e + 1 / d))
    # the supremum over all pairs is log(e + 1), approached as |x - y| -> 1
    assert est <= math.log(math.e + 1)
    assert est == pytest.approx(brute, rel=0.05)


def test_log_holder_estimate_grows_for_a_jump():
    step = ExponentField(ScalarField(lambda X: np.where(X[:, 0] < 0.5, 2.0, 3.0)))
    dom = geometry.interval(0, 1)
    small = log_holder_constant(step, dom, num_pairs=100, seed=0)
    large = log_holder_constant(step, dom, num_pairs=100_000, seed=0)
    assert large > small > 0


def test_norm_of_constant_two_with_exponent_two():
    norm = luxemburg_norm(lambda X: np.full(X.shape[0], 2.0), ExponentField.coerce(2),
                          geometry.interval(0, 1))
    assert norm == pytest.approx(2.0, abs=1e-9)


def test_norm_of_zero_is_zero():
    assert luxemburg_norm(lambda X: np.zeros(X.shape[0]), ExponentField.coerce(2),
                          geometry.interval(0, 1)) == 0.0


def test_norm_with_piecewise_exponent_matches_root_finder():
    p = ExponentField.piecewise(0.5, ScalarField.coerce(2), ScalarField.coerce(3))
    norm = luxemburg_norm(lambda X: X[:, 0], p, geometry.interval(0, 1), tol=1e-12,
                          breakpoints=[(0.5,)])
    # int_0^1/2 (x/l)^2 + int_1/2^1 (x/l)^3 = (1/24)/l^2 + (15/64)/l^3
    lam = brentq(lambda l: (1 / 24) / l**2 + (15 / 64) / l**3 - 1, 0.1, 10, xtol=1e-15)
    assert norm == pytest.approx(lam, rel=1e-9)


def test_norm_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        luxemburg_norm(lambda X: X[:, 0], ExponentField.coerce(2), geometry.interval(0, 1), tol=0)


def test_norm_reports_non_convergence():
    with pytest.raises(NormConvergenceError):
        luxemburg_norm(lambda X: 1 + X[:, 0], ExponentField.coerce("2 + x1"),
                       geometry.interval(0, 1), tol=1e-300, max_iter=5)


@given(st.floats(0.01, 100), st.floats(1.1, 5))
def test_norm_is_homogeneous(c, p0):
    dom = geometry.interval(0, 1)
    p = ExponentField.coerce(f"{p0} + x1")
    f = lambda X: 1 + X[:, 0] ** 2
    base = luxemburg_norm(f, p, dom, tol=1e-13)
    scaled = luxemburg_norm(lambda X: c * f(X), p, dom, tol=1e-13)
    assert scaled == pytest.approx(c * base, rel=1e-9)


@given(st.floats(1.1, 6), st.floats(0.1, 10))
def test_constant_exponent_norm_is_modular_root(p0, c):
    dom = geometry.box([0, 0], [1, 2])
    p = ExponentField.coerce(p0)
    f = lambda X: c * (1 + X[:, 0] * X[:, 1])
    mod = modular(f, p, dom)
    assert luxemburg_norm(f, p, dom, tol=1e-13) == pytest.approx(mod ** (1 / p0), rel=1e-9)
