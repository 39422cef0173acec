"""Domains and their decomposition into axis-aligned quadrature cells."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

__all__ = [
    "Box",
    "Annulus",
    "Domain",
    "CellCover",
    "interval",
    "box",
    "orthant_box",
    "panels",
    "box_cells",
    "axis_edges",
]


@dataclass(frozen=True)
class CellCover:
    """Axis-aligned cells ``[lo_k, hi_k]`` plus the part of the domain they miss."""

    lo: np.ndarray
    hi: np.ndarray
    uncovered_volume: float = 0.0

    def __len__(self) -> int:
        return self.lo.shape[0]

    @property
    def volumes(self) -> np.ndarray:
        return np.prod(self.hi - self.lo, axis=1)

    @property
    def volume(self) -> float:
        return math.fsum(self.volumes)


def _as_res(resolution, n: int) -> list[int]:
    if np.isscalar(resolution):
        res = [int(resolution)] * n
    else:
        res = [int(k) for k in resolution]
    if len(res) != n or any(k < 1 for k in res):
        raise ValueError(f"resolution must be >= 1 on each of {n} axes, got {resolution!r}")
    return res


def axis_edges(a: float, b: float, count: int, breakpoints=()) -> np.ndarray:
    """``count`` equal cells on ``[a, b]`` with ``breakpoints`` inserted as extra edges."""
    edges = np.linspace(a, b, count + 1)
    extra = [t for t in breakpoints if a < t < b]
    if extra:
        edges = np.unique(np.concatenate([edges, extra]))
        # drop slivers created by a breakpoint landing next to a regular edge
        keep = np.concatenate([[True], np.diff(edges) > 1e-12 * max(1.0, b - a)])
        edges = edges[keep]
        edges[-1] = b
    return edges


def box_cells(lo, hi, resolution, breakpoints=None) -> CellCover:
    """Tensor cells of the box ``[lo, hi]``; ``breakpoints[i]`` are forced edges on axis i."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    n = lo.size
    res = _as_res(resolution, n)
    breakpoints = breakpoints or [()] * n
    edges = [axis_edges(lo[i], hi[i], res[i], breakpoints[i]) for i in range(n)]
    lows = np.meshgrid(*[e[:-1] for e in edges], indexing="ij")
    highs = np.meshgrid(*[e[1:] for e in edges], indexing="ij")
    L = np.stack([g.ravel() for g in lows], axis=1)
    H = np.stack([g.ravel() for g in highs], axis=1)
    return CellCover(L, H, 0.0)


@dataclass(frozen=True)
class Box:
    """Open box ``prod (lo_i, hi_i)``.  ``kind`` is one of interval / box / orthant_box."""

    lo: tuple
    hi: tuple
    kind: str = "box"

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if len(lo) != len(hi) or not lo:
            raise ValueError("box bounds must have equal, non-zero length")
        if any(b <= a for a, b in zip(lo, hi)):
            raise ValueError(f"box must have positive volume, got lo={lo}, hi={hi}")
        if self.kind == "orthant_box" and any(a < 0 for a in lo):
            raise ValueError("orthant_box must lie in the closed positive orthant")
        if self.kind == "interval" and len(lo) != 1:
            raise ValueError("interval is one-dimensional")

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def volume(self) -> float:
        return float(np.prod(np.subtract(self.hi, self.lo)))

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array(self.lo), np.array(self.hi)

    def contains(self, X) -> np.ndarray:
        X = np.atleast_2d(X)
        return np.all((X > np.array(self.lo)) & (X < np.array(self.hi)), axis=1)

    def contains_box(self, lo, hi, strict: bool = True) -> bool:
        """Box inside the open set, or inside its closure when ``strict`` is False."""
        lo, hi = np.asarray(lo), np.asarray(hi)
        if strict:
            return bool(np.all(lo > self.lo) and np.all(hi < self.hi))
        return bool(np.all(lo >= self.lo) and np.all(hi <= self.hi))

    def contains_ball(self, center, radius: float, strict: bool = True) -> bool:
        c = np.asarray(center, dtype=float)
        return self.contains_box(c - radius, c + radius, strict)

    def grid(self, resolution) -> np.ndarray:
        """Tensor grid of the closure with ``resolution`` nodes per axis."""
        res = _as_res(resolution, self.dim)
        if any(k < 2 for k in res):
            raise ValueError("grid resolution must be >= 2 per axis")
        axes = [np.linspace(a, b, k) for a, b, k in zip(self.lo, self.hi, res)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def panels(self, resolution, breakpoints=None) -> CellCover:
        return box_cells(self.lo, self.hi, resolution, breakpoints)

    def describe(self) -> dict:
        return {"variant": self.kind, "lo": list(self.lo), "hi": list(self.hi)}


@dataclass(frozen=True)
class Annulus:
    """``{x in R^n : r_in < |x| < r_out}`` centred at the origin, ``r_in > 0``."""

    dim: int
    r_in: float
    r_out: float
    refine_depth: int = 4
    kind: str = "annulus"

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("annulus dimension must be >= 1")
        if not 0 < self.r_in < self.r_out:
            raise ValueError(f"annulus needs 0 < r_in < r_out, got {self.r_in}, {self.r_out}")

    @property
    def volume(self) -> float:
        n = self.dim
        unit_ball = math.pi ** (n / 2) / math.gamma(n / 2 + 1)
        return unit_ball * (self.r_out**n - self.r_in**n)

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return np.full(self.dim, -self.r_out), np.full(self.dim, self.r_out)

    def contains(self, X) -> np.ndarray:
        r = np.linalg.norm(np.atleast_2d(X), axis=1)
        return (r > self.r_in) & (r < self.r_out)

    def contains_box(self, lo, hi, strict: bool = True) -> bool:
        dmin, dmax = _box_dist_range(np.asarray(lo, float)[None], np.asarray(hi, float)[None])
        if strict:
            return bool(dmin[0] > self.r_in and dmax[0] < self.r_out)
        return bool(dmin[0] >= self.r_in and dmax[0] <= self.r_out)

    def contains_ball(self, center, radius: float, strict: bool = True) -> bool:
        c = np.linalg.norm(center)
        if strict:
            return bool(c - radius > self.r_in and c + radius < self.r_out)
        return bool(c - radius >= self.r_in and c + radius <= self.r_out)

    def grid(self, resolution) -> np.ndarray:
        """Bounding-box grid restricted to the closed annulus."""
        lo, hi = self.bounding_box()
        res = _as_res(resolution, self.dim)
        axes = [np.linspace(a, b, k) for a, b, k in zip(lo, hi, res)]
        mesh = np.meshgrid(*axes, indexing="ij")
        X = np.stack([m.ravel() for m in mesh], axis=1)
        r = np.linalg.norm(X, axis=1)
        return X[(r >= self.r_in) & (r <= self.r_out)]

    def panels(self, resolution, breakpoints=None) -> CellCover:
        """Inscribed cover: cells lying fully inside, boundary cells refined by bisection."""
        lo, hi = self.bounding_box()
        base = box_cells(lo, hi, resolution, breakpoints)
        keep_lo, keep_hi = [], []
        L, H = base.lo, base.hi
        for depth in range(self.refine_depth + 1):
            dmin, dmax = _box_dist_range(L, H)
            inside = (dmin >= self.r_in) & (dmax <= self.r_out)
            outside = (dmax <= self.r_in) | (dmin >= self.r_out)
            keep_lo.append(L[inside])
            keep_hi.append(H[inside])
            straddle = ~inside & ~outside
            if depth == self.refine_depth or not np.any(straddle):
                break
            L, H = _bisect_all(L[straddle], H[straddle])
        cover_lo = np.concatenate(keep_lo)
        cover_hi = np.concatenate(keep_hi)
        covered = math.fsum(np.prod(cover_hi - cover_lo, axis=1))
        return CellCover(cover_lo, cover_hi, max(self.volume - covered, 0.0))

    def describe(self) -> dict:
        return {"variant": "annulus", "dim": self.dim, "r_in": self.r_in, "r_out": self.r_out}


Domain = Union[Box, Annulus]


def _box_dist_range(L: np.ndarray, H: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    nearest = np.clip(0.0, L, H)
    farthest = np.maximum(np.abs(L), np.abs(H))
    return np.linalg.norm(nearest, axis=1), np.linalg.norm(farthest, axis=1)


def _bisect_all(L: np.ndarray, H: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split every cell into its 2^n children."""
    n = L.shape[1]
    M = 0.5 * (L + H)
    los, his = [], []
    for corner in range(2**n):
        bits = np.array([(corner >> i) & 1 for i in range(n)], dtype=bool)
        los.append(np.where(bits, M, L))
        his.append(np.where(bits, H, M))
    # children of one parent stay adjacent: deterministic ordering
    return (np.stack(los, axis=1).reshape(-1, n), np.stack(his, axis=1).reshape(-1, n))


def interval(a: float, b: float) -> Box:
    return Box((a,), (b,), kind="interval")


def box(lo: Sequence[float], hi: Sequence[float]) -> Box:
    return Box(tuple(lo), tuple(hi), kind="box")


def orthant_box(lo: Sequence[float], hi: Sequence[float]) -> Box:
    return Box(tuple(lo), tuple(hi), kind="orthant_box")


def panels(domain: Domain, resolution, breakpoints=None) -> CellCover:
    """Cells covering ``domain`` (see the domain's own ``panels`` for details)."""
    return domain.panels(resolution, breakpoints)
