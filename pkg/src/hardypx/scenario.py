"""Problem instances ``(domain, p, u, Phi, sigma, beta)`` and the built-in catalog."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import geometry
from .exponent import ExponentField, validate_P
from .fields import RadialProfile, ScalarField
from .plaplace import plaplacian_radial

__all__ = [
    "Scenario",
    "Check",
    "ValidationReport",
    "CATALOG",
    "builtin",
    "validate",
    "orthant_S",
    "radial_scenario",
    "linear_profile",
    "power_profile",
    "exp_profile",
]


@dataclass(frozen=True)
class Scenario:
    domain: object
    exponent: ExponentField
    u: ScalarField
    phi: ScalarField
    sigma: ScalarField
    beta: float
    family_tag: str = "custom"
    profile: Optional[RadialProfile] = None
    params: dict = field(default_factory=dict)
    breakpoints: Optional[list] = None
    # "theorem": measures of the general / quasi-radial theorem;
    # "family": the corollary's printed densities
    measure_mode: str = "theorem"

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def radial(self) -> bool:
        return self.profile is not None

    def with_phi(self, phi: ScalarField) -> "Scenario":
        return _replace(self, phi=phi)

    def with_sigma(self, sigma, beta: float | None = None) -> "Scenario":
        return _replace(self, sigma=ScalarField.coerce(sigma),
                        beta=self.beta if beta is None else float(beta))


def _replace(s: Scenario, **changes) -> Scenario:
    from dataclasses import replace
    return replace(s, **changes)


# -- radial profiles ---------------------------------------------------------

def linear_profile() -> RadialProfile:
    return RadialProfile(lambda r: np.asarray(r, float) * 1.0,
                         lambda r: np.ones_like(np.asarray(r, float)),
                         lambda r: np.zeros_like(np.asarray(r, float)), label="r")


def power_profile(alpha: float) -> RadialProfile:
    a = float(alpha)
    if a == 1.0:
        return linear_profile()
    return RadialProfile(lambda r: np.asarray(r, float) ** a / a,
                         lambda r: np.asarray(r, float) ** (a - 1),
                         lambda r: (a - 1) * np.asarray(r, float) ** (a - 2),
                         label=f"r^{a!r}/{a!r}")


def exp_profile() -> RadialProfile:
    return RadialProfile(lambda r: np.exp(r), lambda r: np.exp(r), lambda r: np.exp(r),
                         label="exp(r)")


def _pde_phi(profile: RadialProfile, exponent: ExponentField) -> ScalarField:
    """``Phi = -Delta_p u`` through the radial closed form."""
    return ScalarField(lambda X: -plaplacian_radial(profile, exponent, X),
                       label="-Delta_p u (radial closed form)")


def radial_scenario(domain, exponent, profile: RadialProfile, sigma, beta: float,
                    family_tag: str = "custom", phi=None, params=None,
                    breakpoints=None) -> Scenario:
    """Scenario with ``u(x) = v(|x|)``; ``Phi`` defaults to ``-Delta_p u``."""
    exponent = ExponentField.coerce(exponent)
    phi = _pde_phi(profile, exponent) if phi is None else ScalarField.coerce(phi)
    return Scenario(domain, exponent, profile.as_field(), phi, ScalarField.coerce(sigma),
                    float(beta), family_tag, profile, dict(params or {}), breakpoints)


# -- catalog -----------------------------------------------------------------

def _default_domain(n: int, r_in: float, r_out: float, params: dict):
    if "domain" in params:
        return params["domain"]
    if n == 1:
        return geometry.interval(params.get("a", r_in), params.get("b", r_out))
    return geometry.Annulus(n, params.get("r_in", r_in), params.get("r_out", r_out))


def _power_linear(params: dict) -> Scenario:
    n = int(params.get("n", 1))
    sigma = params.get("sigma", 0.5 if n == 1 else n - 1 + 0.5)
    beta = params.get("beta", 1.0 if n == 1 else float(n))
    domain = _default_domain(n, 1.0, 3.0, params) if n == 1 else \
        _default_domain(n, 0.5, 2.0, params)
    p = params.get("p", "2")
    return radial_scenario(domain, p, linear_profile(), sigma, beta, "power_linear",
                           params=dict(params, n=n))


def _power_alpha(params: dict) -> Scenario:
    n = int(params.get("n", 2))
    alpha = float(params.get("alpha", 2.0))
    domain = _default_domain(n, 0.5, 2.0, params)
    p = params.get("p", "2 + 0.5*exp(-r^2)")
    sigma = params.get("sigma", 2.0)
    beta = params.get("beta", 3.0)
    merged = {"C_L": -0.5, **params, "n": n, "alpha": alpha}
    return radial_scenario(domain, p, power_profile(alpha), sigma, beta, "power_alpha",
                           params=merged)


def _exp(params: dict) -> Scenario:
    n = int(params.get("n", 2))
    domain = _default_domain(n, 1.0, 2.0, params)
    p = params.get("p", "2 + 0.1*r^2")
    sigma = params.get("sigma", 4.0)
    beta = params.get("beta", 5.0)
    merged = {"C_e": 0.1, **params, "n": n}
    return radial_scenario(domain, p, exp_profile(), sigma, beta, "exp", params=merged)


def _sigma_choice_power(params: dict) -> Scenario:
    n = int(params.get("n", 3))
    beta = float(params.get("beta", 10.0))
    domain = _default_domain(n, 1.0, 2.0, params)
    exponent = ExponentField.coerce(params.get("p", "2"))
    sigma = ScalarField(lambda X: beta - 2.0 * (exponent(X) - 1.0),
                        grad_fn=lambda X: -2.0 * exponent.grad(X),
                        constant=exponent.declared_constant,
                        label=f"{beta!r} - 2 (p(x) - 1)")
    return radial_scenario(domain, exponent, linear_profile(), sigma, beta,
                           "sigma_choice_power", params=dict(params, n=n, beta=beta))


def _piecewise_exponent() -> ExponentField:
    left = ScalarField.from_expr("2 + 1/(1 - x1)")
    right = ScalarField.from_expr("5 - 4/(x1 + 2)")
    return ExponentField.piecewise(0.0, left, right,
                                   label="2 + 1/(1 - x) if x < 0 else 5 - 4/(x + 2)")


def _piecewise_sigma(M: float) -> ScalarField:
    def fn(X):
        x = X[:, 0]
        neg = np.minimum(x, 0.0)
        pos = np.maximum(x, 0.0)
        return np.where(x < 0, 2 * (neg - M) / (1 - neg) ** 2, -8 * (pos + M) / (pos + 2) ** 2)
    return ScalarField(fn, label=f"piecewise sigma, M = {M!r}")


def _piecewise_printed_phi(exponent: ExponentField) -> ScalarField:
    def fn(X):
        x = X[:, 0]
        p = exponent(X)
        neg = np.minimum(x, 0.0)
        pos = np.maximum(x, 0.0)
        return np.where(x < 0, -np.exp(p - 1) / (1 - neg) ** 2,
                        -4 * np.exp(p - 1) / (pos + 2) ** 2)
    return ScalarField(fn, label="piecewise Phi as printed")


def _piecewise_1d(params: dict) -> Scenario:
    M = float(params.get("M", 4.0))
    if M <= 0:
        raise ValueError("M must be positive")
    a, b = params.get("a", -3.0), params.get("b", 3.0)
    domain = params.get("domain", geometry.interval(a, b))
    as_printed = bool(params.get("as_printed", False))
    e = math.e
    if as_printed:
        profile = RadialProfile(lambda r: -e * (np.asarray(r, float) + M),
                                lambda r: np.full_like(np.asarray(r, float), -e),
                                lambda r: np.zeros_like(np.asarray(r, float)),
                                label=f"-e (r + {M!r})")
    else:
        profile = RadialProfile(lambda r: e * (M - np.asarray(r, float)),
                                lambda r: np.full_like(np.asarray(r, float), -e),
                                lambda r: np.zeros_like(np.asarray(r, float)),
                                label=f"e ({M!r} - r)")
    exponent = _piecewise_exponent()
    phi = _piecewise_printed_phi(exponent) if params.get("phi_mode") == "printed" else None
    beta = params.get("beta", 1.0)
    return radial_scenario(domain, exponent, profile, _piecewise_sigma(M), beta,
                           "piecewise_1d", phi=phi,
                           params=dict(params, M=M, as_printed=as_printed, n=1),
                           breakpoints=[(0.0,)])


def orthant_S(n: int) -> float:
    """``sum_{j<=n} j^2 = n (2n + 1)(n + 1) / 6``."""
    return n * (2 * n + 1) * (n + 1) / 6


def _orthant(params: dict) -> Scenario:
    n = int(params.get("n", 2))
    if "domain" in params:
        domain = params["domain"]
    else:
        side = float(params.get("side", 0.5))
        domain = geometry.orthant_box([0.0] * n, [side] * n)
    J_text = " + ".join(f"{j}*x{j}" for j in range(1, n + 1))
    p_text = params.get("p", f"1 + exp(-({J_text}))")
    exponent = ExponentField.coerce(p_text)
    beta = float(params.get("beta", 0.4))
    S = orthant_S(n)
    jvec = np.arange(1, n + 1, dtype=float)
    half_log_S = 0.5 * math.log(S)

    def J(X):
        return X @ jvec

    u = ScalarField(lambda X: np.exp(J(X)), grad_fn=lambda X: np.exp(J(X))[:, None] * jvec,
                    label=f"exp({J_text})")

    def phi(X):
        p = exponent(X)
        jdp = exponent.grad(X) @ jvec
        return -(S ** (p / 2) * np.exp((p - 1) * J(X))
                 * ((J(X) + half_log_S) / S * jdp + p - 1))

    sigma = ScalarField(lambda X: exponent(X) + beta - 1.0,
                        grad_fn=lambda X: exponent.grad(X),
                        constant=exponent.declared_constant, label="p(x) + beta - 1")
    return Scenario(domain, exponent, u, ScalarField(phi, label="-Delta_p u (closed form)"),
                    sigma, beta, "orthant", None, dict(params, n=n, S=S, beta=beta),
                    None, measure_mode="family")


CATALOG = {
    "power_linear": _power_linear,
    "power_alpha": _power_alpha,
    "exp": _exp,
    "piecewise_1d": _piecewise_1d,
    "orthant": _orthant,
    "sigma_choice_power": _sigma_choice_power,
}


def builtin(name: str, **params) -> Scenario:
    """A catalog scenario; keyword arguments override its defaults."""
    try:
        factory = CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown built-in scenario {name!r}; known: {sorted(CATALOG)}") from None
    return factory(params)


# -- validation --------------------------------------------------------------

@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    message: str = ""
    witness: Optional[np.ndarray] = None
    value: Optional[float] = None


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def violations(self) -> list:
        return [c for c in self.checks if not c.passed]


def validate(s: Scenario, resolution=33) -> ValidationReport:
    """Sampled admissibility: beta > 0, beta > sup sigma, u >= 0, 1 < p- <= p+ < inf."""
    checks = []
    X = s.domain.grid(resolution)
    checks.append(Check("beta > 0", s.beta > 0, "" if s.beta > 0 else f"β = {s.beta} ≤ 0",
                        value=s.beta))
    sig = s.sigma(X)
    k = int(np.argmax(sig))
    ok = bool(s.beta > sig[k])
    checks.append(Check("beta > sup sigma", ok,
                        "" if ok else f"β ≤ sup σ: β = {s.beta!r}, sup σ = {float(sig[k])!r}",
                        X[k], float(sig[k])))
    uv = s.u(X)
    k = int(np.argmin(uv))
    ok = bool(uv[k] >= 0)
    checks.append(Check("u >= 0", ok, "" if ok else f"u < 0: u = {float(uv[k])!r}", X[k],
                        float(uv[k])))
    b = validate_P(s.exponent, s.domain, resolution)
    checks.append(Check("1 < p- <= p+ < inf", b.ok,
                        "" if b.ok else f"p⁻ = {float(b.p_minus)!r} ≤ 1 or non-finite",
                        b.argmin, b.p_minus))
    return ValidationReport(tuple(checks))
