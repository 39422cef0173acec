"""Weight densities of the Hardy-Caccioppoli inequality.

``mu_general`` and ``mu_radial`` follow the two general statements;
``mu_family`` reproduces the densities printed for each worked family
verbatim (including the unconditional ``2^{p-1}`` factor those carry).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .conditions import K_alpha, K_exp, K_radial, corollary_hypotheses, k_bar, s_bar, s_bar_alpha
from .exponent import validate_P
from .scenario import Scenario, orthant_S

__all__ = [
    "MeasureError",
    "WeightedMeasure",
    "MeasurePair",
    "FAMILY_NAMES",
    "mu_general",
    "mu_radial",
    "mu_family",
    "default_measures",
    "two_factor",
    "sample_densities",
]


class MeasureError(ArithmeticError):
    """``beta <= sigma(x)`` at an evaluation point: the base of the power is not positive."""


@dataclass(frozen=True)
class WeightedMeasure:
    """Density against Lebesgue measure, set to 0 where ``support`` fails."""

    density: Callable[[np.ndarray], np.ndarray]
    support: Callable[[np.ndarray], np.ndarray]
    name: str = ""

    def __call__(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.zeros(X.shape[0])
        m = np.asarray(self.support(X), dtype=bool)
        if np.any(m):
            out[m] = self.density(X[m])
        return out


@dataclass(frozen=True)
class MeasurePair:
    mu1: WeightedMeasure
    mu2: WeightedMeasure
    warnings: tuple = field(default=())

    def __iter__(self):
        return iter((self.mu1, self.mu2))


def _everywhere(X):
    return np.ones(X.shape[0], dtype=bool)


def _checked_gap(s: Scenario, X) -> np.ndarray:
    gap = s.beta - s.sigma(X)
    if np.any(gap <= 0):
        k = int(np.argmin(gap))
        raise MeasureError(f"beta <= sigma(x) at x = {X[k].tolist()} "
                           f"(beta = {s.beta!r}, sigma = {s.beta - gap[k]!r})")
    return gap


def two_factor(exponent, X) -> np.ndarray:
    """``2^{(p-1) chi_{grad p != 0}}``; identically 1 for a declared-constant exponent."""
    if exponent.declared_constant:
        return np.ones(X.shape[0])
    nz = np.linalg.norm(exponent.grad(X), axis=1) != 0
    return np.where(nz, 2.0 ** (exponent(X) - 1), 1.0)


def _mu2_prefactor(s: Scenario, X, p):
    return ((p - 1) / _checked_gap(s, X)) ** (p - 1) * two_factor(s.exponent, X)


def mu_general(s: Scenario) -> MeasurePair:
    """``mu1 = (Phi u + sigma |grad u|^p) u^{-beta-1} chi_{u>0}``,
    ``mu2 = ((p-1)/(beta-sigma))^{p-1} 2^{(p-1) chi} u^{p-beta-1} chi_{|grad u| != 0}``."""
    beta = s.beta

    def d1(X):
        u = s.u(X)
        g = np.linalg.norm(s.u.grad(X), axis=1)
        return (s.phi(X) * u + s.sigma(X) * g ** s.exponent(X)) * u ** (-beta - 1)

    def d2(X):
        p = s.exponent(X)
        return _mu2_prefactor(s, X, p) * s.u(X) ** (p - beta - 1)

    mu1 = WeightedMeasure(d1, lambda X: s.u(X) > 0, "mu1 (general)")
    mu2 = WeightedMeasure(d2, lambda X: np.linalg.norm(s.u.grad(X), axis=1) != 0,
                          "mu2 (general)")
    return MeasurePair(mu1, mu2)


def mu_radial(s: Scenario) -> MeasurePair:
    """Quasi-radial densities ``|v'|^p v^{-beta-1} K`` and the matching ``mu2``."""
    if s.profile is None:
        raise ValueError("mu_radial needs a radial scenario")
    beta = s.beta
    prof = s.profile

    def radius(X):
        return np.linalg.norm(X, axis=1)

    def d1(X):
        r = radius(X)
        return np.abs(prof.dv(r)) ** s.exponent(X) * prof.v(r) ** (-beta - 1) * K_radial(s, X)

    def d2(X):
        p = s.exponent(X)
        return _mu2_prefactor(s, X, p) * prof.v(radius(X)) ** (p - beta - 1)

    def supp1(X):
        r = radius(X)
        return (prof.v(r) > 0) & (prof.dv(r) != 0) & (r > 0)

    mu1 = WeightedMeasure(d1, supp1, "mu1 (quasi-radial)")
    mu2 = WeightedMeasure(d2, lambda X: prof.dv(radius(X)) != 0, "mu2 (quasi-radial)")
    return MeasurePair(mu1, mu2)


FAMILY_NAMES = ("power_linear", "sigma_choice_power", "power_alpha", "power_alpha_remark",
                "exp", "exp_remark", "orthant")


def _r(X):
    return np.linalg.norm(X, axis=1)


def mu_family(name: str, s: Scenario, **params) -> MeasurePair:
    """Printed densities of a worked family, built from the scenario's ``p, sigma, beta``.

    Extra parameters (``alpha``, ``C_L``, ``C_e``, ``p_plus``) default to the
    scenario's.  Hypothesis violations are returned as warnings; the densities
    are still built.
    """
    if name not in FAMILY_NAMES:
        raise KeyError(f"unknown measure family {name!r}")
    prm = {**s.params, **params}
    beta = s.beta
    n = s.dim
    p_ = s.exponent
    sig = s.sigma
    warnings = []
    hypotheses = corollary_hypotheses(s) if name.removesuffix("_remark") == s.family_tag else []
    for rep in hypotheses:
        if not rep.passed:
            warnings.append(f"hypothesis '{rep.name}' fails (min margin {rep.min_margin:.3g})")

    def p_plus():
        if "p_plus" in prm:
            return float(prm["p_plus"])
        return validate_P(p_, s.domain).p_plus

    def two_ratio(X, scale=2.0):
        p = p_(X)
        return (scale * (p - 1) / _checked_gap(s, X)) ** (p - 1)

    if name == "power_linear":
        d1 = lambda X: _r(X) ** (-beta - 1) * (sig(X) + 1 - n)
        d2 = lambda X: _r(X) ** (p_(X) - beta - 1) * two_ratio(X)
    elif name == "sigma_choice_power":
        sb = s_bar(beta, n, p_plus())
        if sb <= 0:
            warnings.append(f"s_bar = {sb:.6g} is not positive")
        d1 = lambda X: sb * _r(X) ** (-beta - 1)
        d2 = lambda X: _r(X) ** (p_(X) - beta - 1)
    elif name in ("power_alpha", "power_alpha_remark"):
        alpha = float(prm.get("alpha", 1.0))
        if name == "power_alpha":
            d1 = lambda X: (_r(X) ** (alpha * (p_(X) - beta - 1) - p_(X)) * alpha
                            * K_alpha(p_, sig, alpha, n, X))
            d2 = lambda X: _r(X) ** (alpha * (p_(X) - beta - 1)) * two_ratio(X, 2.0 / alpha)
        else:
            sb = s_bar_alpha(beta, n, alpha, float(prm.get("C_L", 0.0)), p_plus())
            if sb < 0:
                warnings.append(f"s_bar = {sb:.6g} is negative")
            d1 = lambda X: sb * alpha * _r(X) ** (alpha * (p_(X) - beta - 1) - p_(X))
            d2 = lambda X: _r(X) ** (alpha * (p_(X) - beta - 1))
    elif name in ("exp", "exp_remark"):
        if name == "exp":
            d1 = lambda X: np.exp(_r(X) * (p_(X) - beta - 1)) * K_exp(p_, sig, n, X)
            d2 = lambda X: np.exp(_r(X) * (p_(X) - beta - 1)) * two_ratio(X)
        else:
            kb = k_bar(beta, float(prm.get("C_e", 0.0)), p_plus())
            if kb < 0:
                warnings.append(f"k_bar = {kb:.6g} is negative")
            d1 = lambda X: kb * np.exp(_r(X) * (p_(X) - beta - 1))
            d2 = lambda X: np.exp(_r(X) * (p_(X) - beta - 1))
    else:  # orthant
        S = orthant_S(n)
        j = np.arange(1, n + 1, dtype=float)
        half_log_S = 0.5 * math.log(S)

        def d1(X):
            p = p_(X)
            J = X @ j
            jdp = p_.grad(X) @ j
            return np.exp((p - beta - 1) * J) * S ** (p / 2) * (beta - jdp * (J + half_log_S) / S)

        def d2(X):
            p = p_(X)
            return np.exp((p - beta - 1) * (X @ j)) * 2.0 ** (p - 1)

    return MeasurePair(WeightedMeasure(d1, _everywhere, f"mu1 ({name})"),
                       WeightedMeasure(d2, _everywhere, f"mu2 ({name})"), tuple(warnings))


def default_measures(s: Scenario) -> MeasurePair:
    """Measures used by verification: the scenario's family densities when it asks
    for them, otherwise the quasi-radial or general theorem densities."""
    if s.measure_mode == "family":
        return mu_family(s.family_tag, s)
    if s.radial:
        return mu_radial(s)
    return mu_general(s)


def sample_densities(s: Scenario, measures: MeasurePair, resolution=33):
    """Grid points ``X`` of the domain with ``w1(X), w2(X)`` (origin excluded)."""
    X = s.domain.grid(resolution)
    X = X[np.linalg.norm(X, axis=1) > 0] if s.radial else X
    return X, measures.mu1(X), measures.mu2(X)
