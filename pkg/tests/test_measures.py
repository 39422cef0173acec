import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hardypx import geometry, measures, scenario
from hardypx.exponent import ExponentField, _sample_inside


def _points(domain, count=100, seed=0):
    return _sample_inside(domain, count, np.random.default_rng(seed))


def _linear_on_unit_interval():
    return scenario.radial_scenario(geometry.interval(1, 2), "2", scenario.linear_profile(),
                                    1.0, 3.0)


@pytest.mark.parametrize("build", [measures.mu_general, measures.mu_radial])
def test_densities_for_u_equal_x(build):
    s = _linear_on_unit_interval()
    mu1, mu2 = build(s)
    x = np.linspace(1.1, 1.9, 7)[:, None]
    np.testing.assert_allclose(mu2(x), 0.5 * x[:, 0] ** -2, rtol=1e-14)
    np.testing.assert_allclose(mu1(x), x[:, 0] ** -4, rtol=1e-14)


def test_two_factor():
    p = ExponentField.coerce("2 + x1")
    assert measures.two_factor(p, np.array([[1.0]]))[0] == pytest.approx(4.0)
    assert measures.two_factor(ExponentField.coerce(3), np.array([[1.0]]))[0] == 1.0


def test_linear_profile_with_critical_sigma_has_zero_first_density():
    s = scenario.builtin("power_linear", n=2, p="2 + 0.3*exp(-r^2)", sigma=1.0, beta=2.0)
    mu1, mu2 = measures.mu_radial(s)
    X = _points(s.domain)
    assert np.all(mu1(X) == 0.0)
    r = np.linalg.norm(X, axis=1)
    p = s.exponent(X)
    np.testing.assert_allclose(mu2(X), r ** (p - 3) * (p - 1) ** (p - 1) * 2 ** (p - 1),
                               rtol=1e-13)


def test_quasi_radial_matches_printed_power_linear_family():
    s = scenario.builtin("power_linear", n=3, p="2 + 0.2*exp(-r^2)", sigma="2.5 + 0.1*x1",
                         beta=4.0)
    X = _points(s.domain)
    rad = measures.mu_radial(s)
    fam = measures.mu_family("power_linear", s)
    np.testing.assert_allclose(rad.mu1(X), fam.mu1(X), rtol=1e-12)
    np.testing.assert_allclose(rad.mu2(X), fam.mu2(X), rtol=1e-12)


@pytest.mark.parametrize("alpha", [0.5, 2.0, 3.0])
def test_quasi_radial_over_alpha_to_the_beta_matches_printed_power_family(alpha):
    s = scenario.builtin("power_alpha", alpha=alpha)
    X = _points(s.domain)
    rad = measures.mu_radial(s)
    fam = measures.mu_family("power_alpha", s)
    scale = alpha ** s.beta
    np.testing.assert_allclose(rad.mu1(X) / scale, fam.mu1(X), rtol=1e-10)
    np.testing.assert_allclose(rad.mu2(X) / scale, fam.mu2(X), rtol=1e-12)


def test_sigma_choice_remark_densities():
    s = scenario.builtin("sigma_choice_power", beta=10.0)
    mu1, mu2 = measures.mu_family("sigma_choice_power", s)
    X = _points(s.domain)
    r = np.linalg.norm(X, axis=1)
    np.testing.assert_allclose(mu1(X), 3 * r**-11, rtol=1e-13)
    np.testing.assert_allclose(mu2(X), r**-9, rtol=1e-13)


def test_exp_family_second_density_at_unit_radius():
    s = scenario.builtin("exp", n=1, p="2", sigma=0.0, beta=3.0,
                         domain=geometry.interval(0.5, 2.0))
    mu2 = measures.mu_family("exp", s).mu2
    assert mu2([1.0])[0] == pytest.approx(2 / 3 * math.exp(-2), rel=1e-14)


def test_orthant_family_at_the_corner():
    s = scenario.builtin("orthant", n=2, p="2", beta=1.0)
    mu1, mu2 = measures.mu_family("orthant", s)
    assert mu2([0.0, 0.0])[0] == pytest.approx(2.0)
    assert mu1([0.0, 0.0])[0] == pytest.approx(5.0)


def test_general_measures_refuse_beta_at_or_below_sigma():
    s = scenario.builtin("orthant")
    mu1, mu2 = measures.mu_general(s)
    with pytest.raises(measures.MeasureError):
        mu2(s.domain.grid(5))


def test_default_measures_follow_the_mode():
    assert measures.default_measures(scenario.builtin("orthant")).mu1.name == "mu1 (orthant)"
    assert "quasi-radial" in measures.default_measures(scenario.builtin("exp")).mu1.name


def test_remark_family_warns_on_negative_slack():
    s = scenario.builtin("exp", beta=5.0)
    pair = measures.mu_family("exp_remark", s, p_plus=10.0)
    assert any("k_bar" in w for w in pair.warnings)


def test_family_warnings_report_failed_hypotheses():
    s = scenario.builtin("power_linear", sigma=-0.5)
    pair = measures.mu_family("power_linear", s)
    assert any("sigma >= n - 1" in w for w in pair.warnings)


def test_unknown_family():
    with pytest.raises(KeyError):
        measures.mu_family("nope", scenario.builtin("exp"))


def test_sampled_densities_skip_the_origin():
    s = scenario.builtin("power_linear", n=2, domain=geometry.box([-1, -1], [1, 1]))
    X, w1, w2 = measures.sample_densities(s, measures.mu_radial(s), 5)
    assert X.shape[0] == 24 and np.all(np.isfinite(w1))


@given(st.floats(0.0, 0.8), st.floats(0.3, 3.0), st.floats(0.2, 4.0))
def test_general_and_quasi_radial_densities_agree_on_pde_scenarios(amp, alpha, gap):
    s = scenario.builtin("power_alpha", alpha=alpha, p=f"2 + {amp}*exp(-r^2)", sigma=2.0,
                         beta=2.0 + gap)
    X = _points(s.domain, 50, 5)
    gen = measures.mu_general(s)
    rad = measures.mu_radial(s)
    w1 = rad.mu1(X)
    np.testing.assert_allclose(gen.mu1(X), w1, rtol=1e-9, atol=1e-12 * np.max(np.abs(w1)))
    np.testing.assert_allclose(gen.mu2(X), rad.mu2(X), rtol=1e-12)
