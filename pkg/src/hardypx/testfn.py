"""Compactly supported Lipschitz test functions with analytic gradients."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fields import as_points

__all__ = [
    "FAMILIES",
    "SupportError",
    "TestFunction",
    "make",
    "log_integrand",
    "sample",
    "family_for_dim",
]

FAMILIES = ("tent", "tensor_tent", "radial_bump", "poly_bump")


class SupportError(ValueError):
    """The support of a test function leaves the closure of the domain."""


@dataclass(frozen=True)
class TestFunction:
    """A test function ``xi`` supported in the closed box ``support``.

    ``breakpoints[i]`` lists coordinates on axis i where ``xi`` or its
    gradient has a kink; quadrature puts panel edges there.
    """

    __test__ = False  # not a pytest class

    family: str
    center: np.ndarray
    radius: np.ndarray
    power: int = 1
    scale: float = 1.0
    breakpoints: tuple = field(default=(), compare=False)

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def support(self) -> tuple[np.ndarray, np.ndarray]:
        return self.center - self.radius, self.center + self.radius

    @property
    def params(self) -> dict:
        return {"center": self.center.tolist(), "radius": self.radius.tolist(),
                "power": self.power, "scale": self.scale}

    def scaled(self, c: float) -> "TestFunction":
        return TestFunction(self.family, self.center, self.radius, self.power,
                            self.scale * c, self.breakpoints)

    def __call__(self, X):
        P, single = as_points(X)
        v = self.scale * self._value(P)
        return float(v[0]) if single else v

    def grad(self, X):
        P, single = as_points(X)
        g = self.scale * self._grad(P)
        return g[0] if single else g

    def grad_norm(self, X):
        return np.linalg.norm(self.grad(X), axis=-1)

    # per family ----------------------------------------------------------

    def _tents(self, P):
        s = np.abs(P - self.center) / self.radius
        return np.maximum(0.0, 1.0 - s)

    def _tent_slopes(self, P):
        # one-sided limit from the left at kinks: +1/rho on (c-rho, c], -1/rho on (c, c+rho]
        d = P - self.center
        up = (d > -self.radius) & (d <= 0)
        down = (d > 0) & (d <= self.radius)
        return (up.astype(float) - down.astype(float)) / self.radius

    def _value(self, P):
        if self.family in ("tent", "tensor_tent"):
            return np.prod(self._tents(P), axis=1)
        s = np.linalg.norm(P - self.center, axis=1) / self.radius[0]
        if self.family == "radial_bump":
            return np.maximum(0.0, 1.0 - s)
        return np.maximum(0.0, 1.0 - s**2) ** self.power

    def _grad(self, P):
        if self.family in ("tent", "tensor_tent"):
            t = self._tents(P)
            slopes = self._tent_slopes(P)
            n = P.shape[1]
            out = np.empty_like(P)
            for i in range(n):
                others = np.prod(np.delete(t, i, axis=1), axis=1) if n > 1 else 1.0
                out[:, i] = slopes[:, i] * others
            return out
        d = P - self.center
        rho = self.radius[0]
        dist = np.linalg.norm(d, axis=1)
        inside = dist < rho
        if self.family == "radial_bump":
            with np.errstate(invalid="ignore", divide="ignore"):
                g = -d / (dist[:, None] * rho)
            return np.where((inside & (dist > 0))[:, None], g, 0.0)
        k = self.power
        s2 = (dist / rho) ** 2
        base = np.where(inside, 1.0 - s2, 0.0)
        coef = k * base ** (k - 1) if k > 1 else np.where(inside, 1.0, 0.0)
        return (coef * (-2.0 / rho**2))[:, None] * d


def make(family: str, center, radius, power: int = 1, domain=None) -> TestFunction:
    """Build a test function.

    * ``tent``: ``max(0, 1 - |x - c|/rho)`` in one dimension
    * ``tensor_tent``: product of per-axis tents (``radius`` may be a vector)
    * ``radial_bump``: ``max(0, 1 - |x - c|/rho)``
    * ``poly_bump``: ``max(0, 1 - (|x - c|/rho)^2)^k`` with ``k >= 1``

    When ``domain`` is given the support must lie in its closure: the
    function vanishes on the edge of its support, so ``{xi != 0}`` is still
    inside the open domain.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown test-function family {family!r}")
    center = np.atleast_1d(np.asarray(center, dtype=float))
    n = center.size
    if family == "tent" and n != 1:
        raise ValueError("tent is one-dimensional; use tensor_tent")
    radius = np.atleast_1d(np.asarray(radius, dtype=float))
    if family in ("radial_bump", "poly_bump"):
        if radius.size != 1:
            raise ValueError(f"{family} takes a scalar radius")
        radius = np.full(n, radius[0])
    elif radius.size == 1:
        radius = np.full(n, radius[0])
    if radius.size != n or np.any(radius <= 0):
        raise ValueError("radius must be positive with one entry per axis")
    if family == "poly_bump" and (int(power) != power or power < 1):
        raise ValueError("poly_bump power must be an integer >= 1")
    bps = tuple((c - r, c, c + r) for c, r in zip(center, radius))
    xi = TestFunction(family, center, radius, int(power), 1.0, bps)
    if domain is not None:
        if family in ("radial_bump", "poly_bump"):
            fits = domain.contains_ball(center, radius[0], strict=False)
        else:
            fits = domain.contains_box(*xi.support, strict=False)
        if not fits:
            raise SupportError(f"support of {family} at {center.tolist()} with radius "
                               f"{radius.tolist()} leaves the domain")
    return xi


def log_integrand(xi, exponent, X) -> np.ndarray:
    """``|xi log xi|^{p} |grad p|^{p} / p^{p}`` with ``0 log 0 = 0``.

    The logarithm is taken of ``|xi|`` so signed test functions are allowed.
    """
    P, single = as_points(X)
    out = np.zeros(P.shape[0])
    if not getattr(exponent, "declared_constant", False):
        a = np.abs(np.asarray(xi(P), dtype=float))
        mask = (a != 0) & (a != 1)
        if np.any(mask):
            Pm = P[mask]
            p = exponent(Pm)
            g = np.linalg.norm(exponent.grad(Pm), axis=1)
            am = a[mask]
            out[mask] = (am * np.abs(np.log(am))) ** p * g**p / p**p
    return float(out[0]) if single else out


def family_for_dim(n: int, index: int = 0) -> str:
    """Default family cycle used by batch verification."""
    cycle = ("tent", "poly_bump") if n == 1 else ("tensor_tent", "poly_bump")
    return cycle[index % len(cycle)]


def sample(domain, family: str, rng: np.random.Generator, power: int = 3,
           min_fraction: float = 0.05, max_tries: int = 1000) -> TestFunction:
    """Draw a random test function of ``family`` supported in the closure of ``domain``."""
    lo, hi = domain.bounding_box()
    n = lo.size
    extent = float(np.min(hi - lo))
    if hasattr(domain, "r_in"):
        extent = domain.r_out - domain.r_in
    for _ in range(max_tries):
        c = rng.uniform(lo, hi)
        if not domain.contains(c[None])[0]:
            continue
        if family in ("radial_bump", "poly_bump"):
            rho = rng.uniform(min_fraction, 0.5) * extent
        else:
            rho = rng.uniform(min_fraction, 0.5, size=n) * extent
        try:
            return make(family, c, rho, power=power, domain=domain)
        except SupportError:
            continue
    raise SupportError(f"could not place a {family} test function inside the domain")
