"""The p(x)-Laplacian: radial closed form, finite-difference divergence,
the weak pairing against test functions, and a numerical PDI check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import as_points
from .modular import integrate

__all__ = [
    "OperatorEval",
    "OperatorError",
    "PDIRow",
    "PDIReport",
    "plaplacian_radial",
    "plaplacian_general",
    "flux",
    "weak_pairing",
    "pdi_check",
]


class OperatorError(ArithmeticError):
    """Singular operator evaluation (origin, v' = 0, or a singular flux)."""


@dataclass(frozen=True)
class OperatorEval:
    value: float
    method: str  # "radial_closed_form" | "finite_difference"
    h: float | None = None


def plaplacian_radial(profile, exponent, X):
    """Closed form of ``div(|grad u|^{p-2} grad u)`` for ``u(x) = v(|x|)``:

    ``|v'|^{p-2} [<grad p, x> v' log|v'| / |x| + v'' (p - 1) + (n - 1) v' / |x|]``.
    """
    P, single = as_points(X)
    n = P.shape[1]
    r = np.linalg.norm(P, axis=1)
    if np.any(r == 0):
        raise OperatorError("radial p(x)-Laplacian is singular at the origin")
    dv = profile.dv(r)
    if np.any(dv == 0):
        raise OperatorError("v'(|x|) = 0: log|v'| is undefined")
    d2v = profile.d2v(r)
    p = exponent(P)
    gx = np.einsum("ij,ij->i", exponent.grad(P), P)
    a = np.abs(dv)
    out = a ** (p - 2) * (gx * dv * np.log(a) / r + d2v * (p - 1) + (n - 1) * dv / r)
    return float(out[0]) if single else out


def flux(u, exponent, X) -> np.ndarray:
    """``|grad u|^{p-2} grad u``, zero where the gradient vanishes and ``p >= 2``."""
    g = u.grad(X)
    m = np.linalg.norm(g, axis=1)
    p = exponent(X)
    zero = m == 0
    if np.any(zero & (p < 2)):
        raise OperatorError("vanishing gradient with p(x) < 2: the flux is singular")
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(zero, 0.0, m ** (p - 2))
    return scale[:, None] * g


def plaplacian_general(u, exponent, X, h: float = 1e-4):
    """Central-difference divergence of the flux ``F = |grad u|^{p-2} grad u``.

    The gradient of ``u`` is the field's own (analytic when available), so
    only one level of differencing is applied.
    """
    P, single = as_points(X)
    N, n = P.shape
    out = np.zeros(N)
    for i in range(n):
        step = np.zeros(n)
        step[i] = h
        out += (flux(u, exponent, P + step)[:, i] - flux(u, exponent, P - step)[:, i]) / (2 * h)
    return float(out[0]) if single else out


def weak_pairing(u, exponent, w, domain=None, resolution=8, levels: int = 2,
                 breakpoints=None) -> float:
    """``int |grad u|^{p-2} <grad u, grad w> dx`` over the support box of ``w``."""
    lo, hi = w.support
    bps = _merge_breakpoints(w.breakpoints, breakpoints, lo.size)

    def integrand(X):
        return np.einsum("ij,ij->i", flux(u, exponent, X), w.grad(X))

    return integrate(integrand, (lo, hi), resolution, levels, bps).value


def _merge_breakpoints(a, b, n):
    a = a or [()] * n
    b = b or [()] * n
    return [tuple(a[i]) + tuple(b[i]) for i in range(n)]


@dataclass(frozen=True)
class PDIRow:
    pairing: float
    rhs: float
    margin: float
    tolerance: float
    passed: bool
    params: dict


@dataclass(frozen=True)
class PDIReport:
    rows: tuple

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)


def pdi_check(s, witnesses, resolution=8, levels: int = 2, phi=None) -> PDIReport:
    """Check ``<-Delta_p u, w> >= int phi w`` for each nonnegative witness ``w``.

    Tolerance is ``1e-6 + 1e-4 |pairing|``.  ``phi`` overrides the scenario's
    right-hand side (useful for perturbation experiments).
    """
    phi = s.phi if phi is None else phi
    rows = []
    for w in witnesses:
        pair = weak_pairing(s.u, s.exponent, w, resolution=resolution, levels=levels,
                            breakpoints=s.breakpoints)
        lo, hi = w.support
        bps = _merge_breakpoints(w.breakpoints, s.breakpoints, lo.size)

        def rhs_integrand(X, w=w):
            wx = w(X)
            out = np.zeros(X.shape[0])
            m = wx != 0
            if np.any(m):
                out[m] = phi(X[m]) * wx[m]
            return out

        rhs = integrate(rhs_integrand, (lo, hi), resolution, levels, bps).value
        tol = 1e-6 + 1e-4 * abs(pair)
        rows.append(PDIRow(pair, rhs, pair - rhs, tol, pair >= rhs - tol, w.params))
    return PDIReport(tuple(rows))
