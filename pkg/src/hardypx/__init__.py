"""Numerical checks of modular Hardy-Caccioppoli inequalities with variable exponents.

A scenario fixes a domain, an exponent ``p(x)``, a solution ``u`` of
``-Delta_{p(x)} u >= Phi`` and weights ``sigma, beta``; the package builds the
two weight densities and compares both sides of the inequality on test functions.
"""

from .config import ConfigError, build_scenario, load as load_config
from .exponent import ExponentField, log_holder_constant, luxemburg_norm, modular, validate_P
from .fields import RadialProfile, ScalarField
from .measures import MeasurePair, default_measures, mu_family, mu_general, mu_radial
from .plaplace import pdi_check, plaplacian_general, plaplacian_radial, weak_pairing
from .scenario import CATALOG, Scenario, builtin, validate
from .testfn import TestFunction, make as make_test_function
from .verify import VerificationReport, batch_verify, sharpness_probe, verify_inequality

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "build_scenario", "load_config",
    "ExponentField", "log_holder_constant", "luxemburg_norm", "modular", "validate_P",
    "RadialProfile", "ScalarField",
    "MeasurePair", "default_measures", "mu_family", "mu_general", "mu_radial",
    "pdi_check", "plaplacian_general", "plaplacian_radial", "weak_pairing",
    "CATALOG", "Scenario", "builtin", "validate",
    "TestFunction", "make_test_function",
    "VerificationReport", "batch_verify", "sharpness_probe", "verify_inequality",
]
