"""Both sides of the weighted Hardy inequality for a given test function,
batch checks over random test functions, and a ratio-maximising probe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import testfn
from .measures import MeasurePair, default_measures
from .modular import integrate, modular_integral
from .plaplace import _merge_breakpoints
from .scenario import Scenario

__all__ = [
    "VerificationReport",
    "ProbeResult",
    "ProbeError",
    "verify_inequality",
    "batch_verify",
    "sharpness_probe",
    "encode",
    "decode",
    "CSV_COLUMNS",
]

DEFAULT_RESOLUTION = 4
DEFAULT_LEVELS = 3


@dataclass(frozen=True)
class VerificationReport:
    lhs: float
    rhs_gradient: float
    rhs_log: float
    ratio: float
    passed: bool
    error_budget: float
    scenario: str
    family: str
    params: dict = field(default_factory=dict)

    @property
    def rhs(self) -> float:
        return self.rhs_gradient + self.rhs_log

    @property
    def relative_budget(self) -> float:
        scale = max(abs(self.lhs), abs(self.rhs))
        return self.error_budget / scale if scale > 0 else 0.0

    def row(self, dim: int) -> dict:
        c = self.params.get("center", [math.nan] * dim)
        rho = self.params.get("radius", [math.nan] * dim)
        out = {"scenario": self.scenario, "family": self.family}
        out.update({f"c{i + 1}": c[i] for i in range(dim)})
        out.update({f"rho{i + 1}": rho[i] for i in range(dim)})
        out.update({"k": self.params.get("power", ""), "lhs": self.lhs,
                    "rhs_grad": self.rhs_gradient, "rhs_log": self.rhs_log,
                    "ratio": self.ratio, "error_budget": self.error_budget,
                    "pass": int(self.passed)})
        return out


def CSV_COLUMNS(dim: int) -> list[str]:
    return (["scenario", "family"] + [f"c{i + 1}" for i in range(dim)]
            + [f"rho{i + 1}" for i in range(dim)]
            + ["k", "lhs", "rhs_grad", "rhs_log", "ratio", "error_budget", "pass"])


def _ratio(lhs: float, rhs: float) -> float:
    if lhs == 0.0:
        return 0.0
    if rhs == 0.0:
        return math.inf if lhs > 0 else 0.0
    return lhs / rhs


def verify_inequality(s: Scenario, xi, resolution=DEFAULT_RESOLUTION, levels=DEFAULT_LEVELS,
                      measures: MeasurePair | None = None) -> VerificationReport:
    """Evaluate

    * ``lhs = int |xi|^p dmu1``
    * ``rhs_gradient = int |grad xi|^p dmu2``
    * ``rhs_log = int |xi log xi|^p |grad p|^p / p^p dmu2``

    ``pass`` iff ``lhs <= rhs_gradient + rhs_log + error_budget`` where the
    budget is the sum of the three quadrature error estimates.
    """
    mu1, mu2 = measures if measures is not None else default_measures(s)
    bps = _merge_breakpoints(xi.breakpoints, s.breakpoints, xi.dim)
    box = xi.support
    lhs = modular_integral(xi, s.exponent, mu1, resolution=resolution, levels=levels,
                           box=box, breakpoints=bps)
    grad = modular_integral(xi.grad_norm, s.exponent, mu2, resolution=resolution,
                            levels=levels, box=box, breakpoints=bps)
    if s.exponent.declared_constant:
        log_value, log_err = 0.0, 0.0
    else:
        def log_term(X):
            out = np.zeros(X.shape[0])
            t = testfn.log_integrand(xi, s.exponent, X)
            m = t != 0
            if np.any(m):
                out[m] = t[m] * mu2(X[m])
            return out

        res = integrate(log_term, box, resolution, levels, bps)
        log_value, log_err = res.value, res.error
    budget = lhs.error + grad.error + log_err
    rhs = grad.value + log_value
    return VerificationReport(lhs.value, grad.value, log_value, _ratio(lhs.value, rhs),
                              bool(lhs.value <= rhs + budget), budget, s.family_tag,
                              xi.family, xi.params)


def batch_verify(s: Scenario, count: int = 20, seed: int = 0, family: str | None = None,
                 resolution=DEFAULT_RESOLUTION, levels=DEFAULT_LEVELS, power: int = 3,
                 measures: MeasurePair | None = None) -> list[VerificationReport]:
    """Reports for ``count`` seeded random test functions, in draw order.

    Without an explicit ``family`` the dimension's default families alternate.
    """
    rng = np.random.default_rng(seed)
    measures = measures if measures is not None else default_measures(s)
    reports = []
    for i in range(count):
        fam = family or testfn.family_for_dim(s.dim, i)
        xi = testfn.sample(s.domain, fam, rng, power=power)
        reports.append(verify_inequality(s, xi, resolution, levels, measures))
    return reports


# -- sharpness probe ---------------------------------------------------------

class ProbeError(RuntimeError):
    pass


class _BudgetExhausted(Exception):
    pass


@dataclass
class ProbeResult:
    best_ratio: float
    best_params: dict
    trace: list
    evaluations: int


def encode(xi) -> np.ndarray:
    """Parameter vector of a test function: centre then radius (per axis for tents)."""
    if xi.family in ("radial_bump", "poly_bump"):
        return np.concatenate([xi.center, xi.radius[:1]])
    return np.concatenate([xi.center, xi.radius])


def _extent(domain) -> float:
    if hasattr(domain, "r_in"):
        return domain.r_out - domain.r_in
    lo, hi = domain.bounding_box()
    return float(np.min(hi - lo))


def decode(theta, family: str, domain, power: int = 3):
    """Clamp ``theta`` to the feasible set and build the test function (None if impossible)."""
    theta = np.asarray(theta, dtype=float)
    n = domain.dim
    c = theta[:n].copy()
    ball = family in ("radial_bump", "poly_bump")
    rho = theta[n:n + 1].copy() if ball else theta[n:2 * n].copy()
    ext = _extent(domain)
    rho_min = 1e-3 * ext
    if hasattr(domain, "r_in"):
        rho = np.clip(rho, rho_min, 0.5 * (domain.r_out - domain.r_in))
        norm = np.linalg.norm(c)
        direction = c / norm if norm > 0 else np.eye(n)[0]
        reach = float(np.max(rho)) if ball else 0.0
        target = np.clip(norm, domain.r_in + reach, domain.r_out - reach)
        c = direction * target
        if not ball:
            for _ in range(200):
                if domain.contains_box(c - rho, c + rho, strict=False):
                    break
                rho = rho * 0.9
            else:
                return None
            if np.any(rho < rho_min):
                return None
    else:
        lo, hi = domain.bounding_box()
        half = 0.5 * (hi - lo)
        rho = np.clip(rho, rho_min, np.min(half) if ball else half)
        r_axes = np.full(n, rho[0]) if ball else rho
        c = np.clip(c, lo + r_axes, hi - r_axes)
    try:
        return testfn.make(family, c, rho[0] if ball else rho, power=power, domain=domain)
    except testfn.SupportError:
        return None


def sharpness_probe(s: Scenario, family: str, seed: int = 0, budget: int = 200,
                    resolution=DEFAULT_RESOLUTION, levels=DEFAULT_LEVELS, power: int = 3,
                    restarts: int = 2, start=None) -> ProbeResult:
    """Maximise ``lhs / rhs`` over the parameters of ``family``.

    Nelder-Mead with restarts from the incumbent, then a compass
    (coordinate) search with the remaining evaluations.  Parameters leaving
    the feasible set are clamped back into it.  Every evaluation is traced;
    ``budget`` counts distinct evaluated candidates.
    """
    rng = np.random.default_rng(seed)
    measures = default_measures(s)
    theta0 = encode(start if start is not None else testfn.sample(s.domain, family, rng,
                                                                  power=power))
    trace: list[VerificationReport] = []
    cache: dict = {}
    state = {"evals": 0, "calls": 0, "best": -math.inf, "best_params": None, "best_theta": theta0}

    def objective(theta):
        # repeats of a clamped point are free but bounded by ``calls``
        state["calls"] += 1
        if state["evals"] >= budget or state["calls"] > 20 * budget:
            raise _BudgetExhausted
        xi = decode(theta, family, s.domain, power)
        if xi is None:
            state["evals"] += 1
            return math.inf
        key = tuple(encode(xi))
        if key in cache:
            return -cache[key]
        state["evals"] += 1
        rep = verify_inequality(s, xi, resolution, levels, measures)
        trace.append(rep)
        cache[key] = rep.ratio
        if rep.ratio > state["best"]:
            state["best"] = rep.ratio
            state["best_params"] = rep.params
            state["best_theta"] = np.array(key)
        return -rep.ratio

    step = 0.15 * _extent(s.domain)
    try:
        for _ in range(restarts + 1):
            x0 = state["best_theta"]
            simplex = np.vstack([x0] + [x0 + step * e for e in np.eye(x0.size)])
            minimize(objective, x0, method="Nelder-Mead",
                     options={"initial_simplex": simplex, "maxfev": budget,
                              "xatol": 1e-6 * step, "fatol": 1e-10})
            step *= 0.5
        # compass search on the incumbent
        h = step
        while h > 1e-8 * _extent(s.domain):
            improved = False
            base = state["best_theta"]
            for i in range(base.size):
                for sgn in (1.0, -1.0):
                    trial = base.copy()
                    trial[i] += sgn * h
                    before = state["best"]
                    objective(trial)
                    if state["best"] > before:
                        improved = True
                        break
                if improved:
                    break
            if not improved:
                h *= 0.5
    except _BudgetExhausted:
        pass
    if not trace:
        raise ProbeError("budget exhausted without any feasible test function")
    return ProbeResult(state["best"], state["best_params"], trace, state["evals"])
