"""Variable exponents: bounds checking, class membership diagnostics,
log-Hoelder modulus estimation and the Luxemburg norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .fields import ScalarField, as_points
from .modular import fixed_nodes

__all__ = [
    "ExponentField",
    "PBounds",
    "ClassReport",
    "NormConvergenceError",
    "validate_P",
    "class_P_check",
    "log_holder_constant",
    "modular",
    "luxemburg_norm",
]


class NormConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExponentField:
    """The exponent ``p(x)`` with its gradient.

    ``declared_constant`` is set when the exponent is known to have zero
    gradient everywhere; it switches off the logarithmic correction term and
    the ``2^{p-1}`` factor exactly rather than up to rounding.
    """

    field: ScalarField
    declared_constant: bool = False

    def __post_init__(self):
        if self.field.constant and not self.declared_constant:
            object.__setattr__(self, "declared_constant", True)

    def __call__(self, X):
        return self.field(X)

    def grad(self, X):
        if self.declared_constant:
            P, single = as_points(X)
            g = np.zeros_like(P)
            return g[0] if single else g
        return self.field.grad(X)

    @property
    def label(self) -> str:
        return self.field.label

    @classmethod
    def coerce(cls, value) -> "ExponentField":
        if isinstance(value, ExponentField):
            return value
        return cls(ScalarField.coerce(value))

    @classmethod
    def piecewise(cls, breakpoint: float, left: ScalarField, right: ScalarField,
                  label: str = "") -> "ExponentField":
        """1-D exponent switching from ``left`` (x < breakpoint) to ``right``."""

        def fn(X):
            x = X[:, 0]
            out = np.empty(X.shape[0])
            m = x < breakpoint
            if np.any(m):
                out[m] = left(X[m])
            if np.any(~m):
                out[~m] = right(X[~m])
            return out

        def grad(X):
            x = X[:, 0]
            out = np.empty_like(X)
            m = x < breakpoint
            if np.any(m):
                out[m] = left.grad(X[m])
            if np.any(~m):
                out[~m] = right.grad(X[~m])
            return out

        return cls(ScalarField(fn, grad_fn=grad, label=label))


@dataclass(frozen=True)
class PBounds:
    p_minus: float
    p_plus: float
    ok: bool
    argmin: Optional[np.ndarray] = None
    argmax: Optional[np.ndarray] = None


def validate_P(field: ExponentField, domain, resolution=33) -> PBounds:
    """Grid extrema of ``p``; ``ok`` iff they are finite and ``p_minus > 1``."""
    X = domain.grid(resolution)
    vals = field(X)
    finite = bool(np.all(np.isfinite(vals)))
    i, j = int(np.argmin(vals)), int(np.argmax(vals))
    p_minus, p_plus = float(vals[i]), float(vals[j])
    return PBounds(p_minus, p_plus, finite and p_minus > 1.0, X[i], X[j])


@dataclass(frozen=True)
class ClassReport:
    ok: bool
    bounds: PBounds
    max_p_pow_p: float
    max_grad_pow_p: float
    note: str = "sampled finiteness only; local integrability is not verified"


def class_P_check(field: ExponentField, domain, resolution=33) -> ClassReport:
    """Sampled check that ``p^p`` and ``|grad p|^p`` are finite on the grid."""
    bounds = validate_P(field, domain, resolution)
    X = domain.grid(resolution)
    p = field(X)
    g = np.linalg.norm(field.grad(X), axis=1)
    with np.errstate(over="ignore"):
        a = p**p
        b = g**p
    ok = bounds.ok and bool(np.all(np.isfinite(a)) and np.all(np.isfinite(b)))
    return ClassReport(ok, bounds, float(np.max(a)), float(np.max(b)))


def _sample_inside(domain, count: int, rng: np.random.Generator) -> np.ndarray:
    lo, hi = domain.bounding_box()
    out = []
    have = 0
    while have < count:
        X = rng.uniform(lo, hi, size=(2 * count, lo.size))
        X = X[domain.contains(X)]
        out.append(X)
        have += X.shape[0]
    return np.concatenate(out)[:count]


def log_holder_constant(field: ExponentField, domain, num_pairs: int = 10_000,
                        seed: int = 0) -> float:
    """Sampled lower bound for the best constant ``c`` in
    ``|p(x) - p(y)| <= c / log(e + 1/|x - y|)``.

    This is the supremum over ``num_pairs`` random pairs, never an upper bound.
    """
    if num_pairs < 1:
        raise ValueError("num_pairs must be >= 1")
    rng = np.random.default_rng(seed)
    X = _sample_inside(domain, num_pairs, rng)
    Y = _sample_inside(domain, num_pairs, rng)
    d = np.linalg.norm(X - Y, axis=1)
    keep = d > 0
    if not np.any(keep):
        return 0.0
    diff = np.abs(field(X[keep]) - field(Y[keep]))
    return float(np.max(diff * np.log(math.e + 1.0 / d[keep])))


def modular(f, field: ExponentField, domain, resolution=16, breakpoints=None) -> float:
    """``int_domain |f(x)|^{p(x)} dx`` with the fixed composite rule."""
    X, w = fixed_nodes(domain, resolution, breakpoints)
    return math.fsum(w * np.abs(f(X)) ** field(X))


def luxemburg_norm(f, field: ExponentField, domain, tol: float = 1e-10, resolution=16,
                   breakpoints=None, max_iter: int = 200) -> float:
    """``inf{lam > 0 : int |f/lam|^{p(x)} dx <= 1}`` by bracketing and bisection.

    The node values ``|f|`` and ``p`` are computed once; each trial ``lam``
    is a weighted sum over them.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    X, w = fixed_nodes(domain, resolution, breakpoints)
    fx = np.abs(np.asarray(f(X), dtype=float))
    px = field(X)
    if not np.any(fx > 0):
        return 0.0
    mask = fx > 0
    fx, px, w = fx[mask], px[mask], w[mask]

    def rho(lam: float) -> float:
        with np.errstate(over="ignore"):
            return math.fsum(w * (fx / lam) ** px)

    hi = 1.0
    it = 0
    while not rho(hi) <= 1.0:
        hi *= 2.0
        it += 1
        if it > max_iter:
            raise NormConvergenceError("modular stays above 1 for every tested lambda")
    lo = 1.0
    while rho(lo) < 1.0:
        lo /= 2.0
        it += 1
        if it > max_iter:
            raise NormConvergenceError("modular stays below 1 for every tested lambda")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        m = rho(mid)
        if abs(m - 1.0) <= tol:
            return mid
        if m > 1.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4 * np.finfo(float).eps * hi:
            return hi
    raise NormConvergenceError(f"bisection did not reach tol={tol} in {max_iter} steps")
