"""Pointwise margins and sampled hypothesis checks.

Every ``>= 0`` check passes when the sampled minimum is at least
``-TOLERANCE``; strict inequalities require a positive minimum.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exponent import validate_P
from .fields import as_points
from .scenario import Scenario, orthant_S

__all__ = [
    "TOLERANCE",
    "ConditionReport",
    "crucial_margin",
    "K_radial",
    "K_alpha",
    "K_exp",
    "orthant_margin",
    "orthant_T",
    "s_bar",
    "s_bar_alpha",
    "k_bar",
    "scan",
    "radial_scan_points",
    "crucial_report",
    "K_report",
    "corollary_hypotheses",
    "remark_report",
]

log = logging.getLogger(__name__)

TOLERANCE = 1e-9


@dataclass(frozen=True)
class ConditionReport:
    name: str
    min_margin: float
    witness: Optional[np.ndarray]
    passed: bool
    resolution: int
    strict: bool = False


def _ret(out, single):
    return float(out[0]) if single else out


def crucial_margin(s: Scenario, X):
    """``Phi u + sigma |grad u|^{p}``."""
    P, single = as_points(X)
    g = np.linalg.norm(s.u.grad(P), axis=1)
    out = s.phi(P) * s.u(P) + s.sigma(P) * g ** s.exponent(P)
    return _ret(out, single)


def K_radial(s: Scenario, X):
    """``sigma - (v/v')[<grad p, x> log|v'| / |x| + (v''/v')(p - 1) + (n - 1)/|x|]``."""
    if s.profile is None:
        raise ValueError("K_radial needs a radial scenario")
    P, single = as_points(X)
    n = P.shape[1]
    r = np.linalg.norm(P, axis=1)
    dv = s.profile.dv(r)
    if np.any(dv == 0) or np.any(r == 0):
        raise ZeroDivisionError("K is undefined where v' = 0 or x = 0")
    v = s.profile.v(r)
    d2v = s.profile.d2v(r)
    p = s.exponent(P)
    gx = np.einsum("ij,ij->i", s.exponent.grad(P), P)
    # (v/v')/|x| is formed first so that v = r gives exactly 1
    q = v / (dv * r)
    bracket = gx * np.log(np.abs(dv)) + (d2v / dv) * (p - 1) * r + (n - 1)
    return _ret(s.sigma(P) - q * bracket, single)


def K_alpha(exponent, sigma, alpha: float, n: int, X):
    """``sigma - (1/alpha)[(alpha - 1)(<grad p, x> log|x| + p) + n - alpha]``."""
    P, single = as_points(X)
    r = np.linalg.norm(P, axis=1)
    gx = np.einsum("ij,ij->i", exponent.grad(P), P)
    out = sigma(P) - ((alpha - 1) * (gx * np.log(r) + exponent(P)) + n - alpha) / alpha
    return _ret(out, single)


def K_exp(exponent, sigma, n: int, X):
    """``sigma - <grad p, x> - p + 1 + (1 - n)/|x|``."""
    P, single = as_points(X)
    r = np.linalg.norm(P, axis=1)
    gx = np.einsum("ij,ij->i", exponent.grad(P), P)
    return _ret(sigma(P) - gx - exponent(P) + 1 + (1 - n) / r, single)


def orthant_margin(exponent, beta: float, X):
    """``S^{p/2} e^{pJ} [beta - (J + log S / 2)/S sum_j j dp/dx_j]`` for ``u = e^J``."""
    P, single = as_points(X)
    n = P.shape[1]
    S = orthant_S(n)
    j = np.arange(1, n + 1, dtype=float)
    J = P @ j
    p = exponent(P)
    jdp = exponent.grad(P) @ j
    out = S ** (p / 2) * np.exp(p * J) * (beta - (J + 0.5 * math.log(S)) / S * jdp)
    return _ret(out, single)


def orthant_T(beta: float, n: int, X):
    """``T(x) = -S beta / (J(x) + log S / 2)``."""
    P, single = as_points(X)
    S = orthant_S(n)
    J = P @ np.arange(1, n + 1, dtype=float)
    return _ret(-S * beta / (J + 0.5 * math.log(S)), single)


def s_bar(beta: float, n: int, p_plus: float) -> float:
    """Slack for ``sigma = beta - 2(p - 1)`` with ``u = |x|``: ``(beta - n + 3)/2 - p+``."""
    return (beta - n + 3) / 2 - p_plus


def s_bar_alpha(beta: float, n: int, alpha: float, C_L: float, p_plus: float) -> float:
    return (alpha * beta + 2 - n + alpha - (alpha - 1) * C_L) / (alpha + 1) - p_plus


def k_bar(beta: float, C_e: float, p_plus: float) -> float:
    return (beta + C_e) / 3 + 1 - p_plus


# -- scans -------------------------------------------------------------------

def scan(name: str, margin_fn, X: np.ndarray, resolution: int, strict: bool = False,
         ) -> ConditionReport:
    """Minimum of ``margin_fn`` over the points ``X`` with its witness."""
    if X.shape[0] == 0:
        return ConditionReport(name, math.inf, None, True, resolution, strict)
    vals = np.asarray(margin_fn(X), dtype=float)
    k = int(np.argmin(vals))
    m = float(vals[k])
    passed = m > 0 if strict else m >= -TOLERANCE
    return ConditionReport(name, m, X[k], bool(passed), resolution, strict)


def radial_scan_points(s: Scenario, resolution) -> np.ndarray:
    """Grid points with ``|x| > 0`` and, for radial scenarios, ``v'(|x|) != 0``."""
    X = s.domain.grid(resolution)
    r = np.linalg.norm(X, axis=1)
    keep = r > 0
    if s.profile is not None:
        keep &= s.profile.dv(r) != 0
    return X[keep]


def crucial_report(s: Scenario, resolution=33) -> ConditionReport:
    X = radial_scan_points(s, resolution)
    return scan("Phi u + sigma |grad u|^p >= 0", lambda P: crucial_margin(s, P), X, resolution)


def K_report(s: Scenario, resolution=33) -> ConditionReport:
    X = radial_scan_points(s, resolution)
    return scan("K(x) >= 0", lambda P: K_radial(s, P), X, resolution)


def _gx(s, P):
    return np.einsum("ij,ij->i", s.exponent.grad(P), P)


def corollary_hypotheses(s: Scenario, resolution=33) -> list[ConditionReport]:
    """Sampled hypotheses of the result ``s.family_tag`` instantiates."""
    tag = s.family_tag
    X = radial_scan_points(s, resolution)
    n = s.dim
    beta = s.beta
    reports = []
    if tag in ("power_linear", "sigma_choice_power"):
        reports.append(scan("sigma >= n - 1", lambda P: s.sigma(P) - (n - 1), X, resolution))
        if tag == "sigma_choice_power":
            pp = validate_P(s.exponent, s.domain, resolution).p_plus
            reports.append(remark_report("p+ < (beta - n + 3)/2", s_bar(beta, n, pp),
                                         resolution, strict=True))
    elif tag == "power_alpha":
        alpha = float(s.params.get("alpha", 1.0))
        C_L = float(s.params.get("C_L", 0.0))
        if alpha >= 1:
            reports.append(scan("<grad p, x> log|x| >= C_L",
                                lambda P: _gx(s, P) * np.log(np.linalg.norm(P, axis=1)) - C_L,
                                X, resolution))
        else:
            reports.append(scan("<grad p, x> log|x| <= C_L",
                                lambda P: C_L - _gx(s, P) * np.log(np.linalg.norm(P, axis=1)),
                                X, resolution))
        reports.append(scan(
            "alpha sigma - n + alpha - p (alpha - 1) >= (alpha - 1) C_L",
            lambda P: alpha * s.sigma(P) - n + alpha - s.exponent(P) * (alpha - 1)
            - (alpha - 1) * C_L, X, resolution))
    elif tag == "exp":
        C_e = float(s.params.get("C_e", 0.0))
        reports.append(remark_report("C_e > 0", C_e, resolution, strict=True))
        reports.append(scan("<grad p, x> > C_e", lambda P: _gx(s, P) - C_e, X, resolution,
                            strict=True))
        reports.append(scan(
            "|x| sigma >= |x| (C_e + p - 1) + n - 1",
            lambda P: _radius(P) * s.sigma(P) - _radius(P) * (C_e + s.exponent(P) - 1) - (n - 1),
            X, resolution))
    elif tag == "orthant":
        reports.append(scan("sum_j j dp/dx_j < T(x)",
                            lambda P: orthant_T(beta, n, P)
                            - s.exponent.grad(P) @ np.arange(1, n + 1, dtype=float),
                            X, resolution, strict=True))
    elif tag == "piecewise_1d":
        reports.append(K_report(s, resolution))
    else:
        log.warning("no hypothesis set registered for family tag %r", tag)
    return reports


def _radius(P):
    return np.linalg.norm(P, axis=1)


def remark_report(name: str, slack: float, resolution: int = 0,
                  strict: bool = False) -> ConditionReport:
    """Report for a scalar slack such as ``s_bar`` or ``k_bar``."""
    passed = slack > 0 if strict else slack >= -TOLERANCE
    return ConditionReport(name, float(slack), None, bool(passed), resolution, strict)
