"""Evaluable scalar fields and radial profiles.

All fields are vectorised: they take an ``(N, n)`` array of points and
return an ``(N,)`` array (gradients return ``(N, n)``).  A single point may
be passed as a 1-D array, in which case a float (or a 1-D gradient) comes
back.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import fieldexpr as fe

__all__ = ["ScalarField", "RadialProfile", "as_points"]


def as_points(X) -> tuple[np.ndarray, bool]:
    """Return ``(X2d, was_single_point)``."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 0:
        return X.reshape(1, 1), True
    if X.ndim == 1:
        return X[None, :], True
    return X, False


@dataclass(frozen=True)
class ScalarField:
    """A map from points to reals, optionally with an analytic gradient.

    When ``grad_fn`` is absent the gradient falls back to central differences
    of ``fn`` with the default relative step of :func:`fieldexpr.grad_numeric`.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    grad_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    constant: bool = False
    label: str = ""
    expr: Optional[fe.Expr] = field(default=None, compare=False, repr=False)

    def __call__(self, X):
        P, single = as_points(X)
        v = np.asarray(self.fn(P), dtype=float)
        if v.ndim == 0:
            v = np.full(P.shape[0], float(v))
        return float(v[0]) if single else v

    def grad(self, X):
        P, single = as_points(X)
        if self.constant:
            g = np.zeros_like(P)
        elif self.grad_fn is not None:
            g = np.asarray(self.grad_fn(P), dtype=float).reshape(P.shape)
        elif self.expr is not None:
            g = fe.grad_numeric_array(self.expr, P)
        else:
            g = _central_grad(self.fn, P)
        return g[0] if single else g

    # constructors -------------------------------------------------------

    @classmethod
    def constant_value(cls, c: float) -> "ScalarField":
        c = float(c)
        return cls(lambda X: np.full(X.shape[0], c), constant=True, label=repr(c))

    @classmethod
    def from_expr(cls, text_or_expr, grad_fn=None) -> "ScalarField":
        node = fe.parse(text_or_expr) if isinstance(text_or_expr, str) else text_or_expr
        return cls(lambda X: fe.evaluate(node, X), grad_fn=grad_fn,
                   constant=fe.is_constant(node), label=fe.to_string(node), expr=node)

    @classmethod
    def coerce(cls, value) -> "ScalarField":
        if isinstance(value, ScalarField):
            return value
        if isinstance(value, (int, float, np.floating, np.integer)):
            return cls.constant_value(float(value))
        if isinstance(value, str):
            return cls.from_expr(value)
        raise TypeError(f"cannot build a ScalarField from {value!r}")

    def shifted(self, c: float) -> "ScalarField":
        """The field ``self + c`` (same gradient)."""
        return ScalarField(lambda X: self.fn(X) + c, grad_fn=self.grad_fn,
                           constant=self.constant, label=f"({self.label}) + {c!r}",
                           expr=self.expr)


def _central_grad(fn, P: np.ndarray) -> np.ndarray:
    H = 1e-5 * np.maximum(1.0, np.abs(P))
    out = np.empty_like(P)
    for i in range(P.shape[1]):
        step = np.zeros_like(P)
        step[:, i] = H[:, i]
        out[:, i] = (fn(P + step) - fn(P - step)) / (2 * H[:, i])
    return out


@dataclass(frozen=True)
class RadialProfile:
    """``v``, ``v'`` and ``v''`` as functions of the radius ``r = |x| > 0``."""

    v: Callable[[np.ndarray], np.ndarray]
    dv: Callable[[np.ndarray], np.ndarray]
    d2v: Callable[[np.ndarray], np.ndarray]
    label: str = ""

    @classmethod
    def from_expr(cls, v_text: str, dv_text: str | None = None,
                  d2v_text: str | None = None) -> "RadialProfile":
        """Profile from expressions in ``r``; missing derivatives are differenced."""
        v_node = fe.parse(v_text)

        def on_r(node):
            return lambda r: fe.evaluate(node, np.asarray(r, dtype=float).reshape(-1, 1))

        v = on_r(v_node)
        if dv_text is not None:
            dv = on_r(fe.parse(dv_text))
        else:
            dv = lambda r: fe.grad_numeric_array(v_node, np.asarray(r, float).reshape(-1, 1))[:, 0]
        if d2v_text is not None:
            d2v = on_r(fe.parse(d2v_text))
        else:
            def d2v(r):
                r = np.asarray(r, dtype=float).reshape(-1)
                h = 1e-4 * np.maximum(1.0, np.abs(r))
                return (v(r + h) - 2 * v(r) + v(r - h)) / h**2
        return cls(v, dv, d2v, label=fe.to_string(v_node))

    def as_field(self) -> ScalarField:
        """``u(x) = v(|x|)`` with its analytic gradient ``v'(|x|) x / |x|``."""

        def fn(X):
            return self.v(np.linalg.norm(X, axis=1))

        def grad(X):
            r = np.linalg.norm(X, axis=1)
            with np.errstate(invalid="ignore", divide="ignore"):
                g = self.dv(r)[:, None] * (X / r[:, None])
            return np.where(r[:, None] > 0, g, 0.0)

        return ScalarField(fn, grad_fn=grad, label=f"v(|x|), v(r) = {self.label}")
