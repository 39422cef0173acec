"""Composite tensor Gauss-Legendre quadrature with adaptive panel splitting,
and modular integrals ``int |f|^{p(x)} dmu``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .geometry import Annulus, Box, CellCover, box_cells, _bisect_all

__all__ = [
    "ORDER",
    "QuadratureResult",
    "QuadratureError",
    "tensor_rule",
    "fixed_nodes",
    "integrate",
    "modular_integral",
]

ORDER = 5


class QuadratureError(ArithmeticError):
    """A non-finite integrand value at a quadrature node."""


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float
    panels: int


@lru_cache(maxsize=None)
def tensor_rule(n: int, order: int = ORDER) -> tuple[np.ndarray, np.ndarray]:
    """Nodes ``(order^n, n)`` and weights on ``[-1, 1]^n``."""
    t, w = np.polynomial.legendre.leggauss(order)
    T = np.stack([g.ravel() for g in np.meshgrid(*([t] * n), indexing="ij")], axis=1)
    W = np.prod(np.stack([g.ravel() for g in np.meshgrid(*([w] * n), indexing="ij")], axis=1),
                axis=1)
    return T, W


def _nodes(L: np.ndarray, H: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    T, W = tensor_rule(L.shape[1])
    mid = 0.5 * (L + H)
    half = 0.5 * (H - L)
    pts = mid[:, None, :] + half[:, None, :] * T[None, :, :]
    weights = W[None, :] * np.prod(half, axis=1)[:, None]
    return pts.reshape(-1, L.shape[1]), weights


def _panel_values(f, L: np.ndarray, H: np.ndarray) -> np.ndarray:
    if L.shape[0] == 0:
        return np.zeros(0)
    pts, weights = _nodes(L, H)
    vals = np.asarray(f(pts), dtype=float).reshape(weights.shape)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        k = np.flatnonzero(bad.ravel())[0]
        raise QuadratureError(f"non-finite integrand value {vals.ravel()[k]!r} at node {pts[k]!r}")
    return np.sum(vals * weights, axis=1)


def _cover(region, resolution, breakpoints) -> CellCover:
    if isinstance(region, (Box, Annulus)):
        return region.panels(resolution, breakpoints)
    lo, hi = region
    return box_cells(lo, hi, resolution, breakpoints)


def fixed_nodes(region, resolution, breakpoints=None) -> tuple[np.ndarray, np.ndarray]:
    """Points and weights of the non-adaptive composite rule (flattened)."""
    cover = _cover(region, resolution, breakpoints)
    pts, weights = _nodes(cover.lo, cover.hi)
    return pts, weights.ravel()


def integrate(integrand, region, resolution=4, levels: int = 2, breakpoints=None,
              select_fraction: float = 0.9) -> QuadratureResult:
    """Integrate ``integrand`` (vectorised over points) over ``region``.

    ``region`` is a Domain or a ``(lo, hi)`` box.  Each refinement level
    compares every panel with the sum over its 2^n children and splits the
    panels carrying ``select_fraction`` of the total discrepancy.  The error
    estimate is ``|value(L) - value(L-1)|`` at the final level.
    """
    if levels < 1:
        raise ValueError("at least one refinement level is needed for an error estimate")
    cover = _cover(region, resolution, breakpoints)
    L, H = cover.lo, cover.hi
    n = L.shape[1]
    vals = _panel_values(integrand, L, H)
    value = math.fsum(vals)
    error = 0.0
    for _ in range(levels):
        if L.shape[0] == 0:
            break
        CL, CH = _bisect_all(L, H)
        child_vals = _panel_values(integrand, CL, CH).reshape(-1, 2**n)
        disc = np.abs(child_vals.sum(axis=1) - vals)
        total = disc.sum()
        if total == 0.0:
            error = 0.0
            break
        order = np.argsort(-disc, kind="stable")
        cum = np.cumsum(disc[order])
        count = int(np.searchsorted(cum, select_fraction * total)) + 1
        split = np.zeros(L.shape[0], dtype=bool)
        split[order[:count]] = True
        # rebuild in original panel order, children replacing their parent
        parts_L, parts_H, parts_v = [], [], []
        CL = CL.reshape(-1, 2**n, n)
        CH = CH.reshape(-1, 2**n, n)
        for k in range(L.shape[0]):
            if split[k]:
                parts_L.append(CL[k])
                parts_H.append(CH[k])
                parts_v.append(child_vals[k])
            else:
                parts_L.append(L[k:k + 1])
                parts_H.append(H[k:k + 1])
                parts_v.append(vals[k:k + 1])
        L = np.concatenate(parts_L)
        H = np.concatenate(parts_H)
        vals = np.concatenate(parts_v)
        new_value = math.fsum(vals)
        error = abs(new_value - value)
        value = new_value
    return QuadratureResult(value, error, int(L.shape[0]))


def modular_integral(f, exponent, measure=None, domain=None, resolution=4, levels: int = 2,
                     box=None, breakpoints=None) -> QuadratureResult:
    """``int |f(x)|^{p(x)} density(x) dx`` over the support box of ``f``.

    ``f`` is a test function (its support box and kinks are used) or any
    vectorised callable, in which case ``box`` or ``domain`` must be given.
    ``measure`` defaults to Lebesgue measure.
    """
    region, bps = _region_for(f, domain, box, breakpoints)

    def integrand(X):
        fx = np.abs(np.asarray(f(X), dtype=float))
        out = np.zeros(X.shape[0])
        mask = fx != 0
        if np.any(mask):
            Xm = X[mask]
            term = fx[mask] ** exponent(Xm)
            if measure is not None:
                term = term * measure(Xm)
            out[mask] = term
        return out

    return integrate(integrand, region, resolution, levels, bps)


def _region_for(f, domain, box, breakpoints):
    support = getattr(f, "support", None)
    bps = breakpoints
    if box is None and support is not None:
        box = support
    if bps is None and hasattr(f, "breakpoints"):
        bps = f.breakpoints
    if box is not None:
        return box, bps
    if domain is None:
        raise ValueError("need a support box or a domain to integrate over")
    return domain, bps
