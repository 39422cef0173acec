import numpy as np
import pytest

from hardypx import geometry, scenario
from hardypx.exponent import validate_P


def test_power_linear_builtin_is_valid():
    s = scenario.builtin("power_linear")
    assert s.dim == 1 and s.beta == 1.0 and s.sigma([2.0]) == 0.5
    assert s.exponent.declared_constant
    assert scenario.validate(s).passed


def test_piecewise_exponent_is_in_class_P():
    s = scenario.builtin("piecewise_1d")
    assert s.exponent([-1.0]) == pytest.approx(2.5)
    assert s.exponent([0.0]) == pytest.approx(3.0)
    assert s.exponent([2.0]) == pytest.approx(4.0)
    assert validate_P(s.exponent, s.domain).ok


def test_orthant_constant_S():
    assert scenario.orthant_S(3) == 14
    assert scenario.builtin("orthant", n=3).params["S"] == 14


def test_sigma_above_beta_is_a_violation_with_witness():
    s = scenario.builtin("power_linear", sigma=2.0, beta=1.0)
    rep = scenario.validate(s)
    assert not rep.passed
    (bad,) = rep.violations
    assert "β ≤ sup σ" in bad.message and bad.witness is not None


def test_printed_orthant_sigma_violates_beta_above_sigma():
    rep = scenario.validate(scenario.builtin("orthant"))
    assert [c.name for c in rep.violations] == ["beta > sup sigma"]
    assert "β ≤ sup σ" in rep.violations[0].message


def test_printed_piecewise_profile_is_negative():
    rep = scenario.validate(scenario.builtin("piecewise_1d", as_printed=True))
    assert any("u < 0" in c.message for c in rep.violations)


def test_unknown_builtin():
    with pytest.raises(KeyError):
        scenario.builtin("nope")


def test_radial_scenario_default_phi_is_minus_p_laplacian():
    s = scenario.radial_scenario(geometry.Annulus(3, 1, 2), "2", scenario.linear_profile(),
                                 2.0, 3.0)
    assert s.phi([1.5, 0.0, 0.0]) == pytest.approx(-2 / 1.5)
    assert s.radial and s.family_tag == "custom"


def test_with_sigma_replaces_weight():
    s = scenario.builtin("power_linear").with_sigma(0.0, beta=2.0)
    assert s.sigma([2.0]) == 0.0 and s.beta == 2.0


def test_all_builtins_construct():
    for name in scenario.CATALOG:
        s = scenario.builtin(name)
        X = s.domain.grid(9)
        X = X[np.linalg.norm(X, axis=1) > 0]
        assert np.all(np.isfinite(s.u(X)))
