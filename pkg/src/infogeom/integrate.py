"""Tensor-product quadrature of complex integrands over R^n.

Integrands are vectorized: ``f(X)`` receives an ``(m, n)`` array of sample points
and returns an array whose leading axis has length ``m``. Trailing axes are kept,
so one pass can integrate a whole matrix of integrands.

The grid is walked in slabs (leading axes fixed, trailing block precomputed) and
partial sums are accumulated in a fixed order, so results are bit-reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import BudgetError, InvalidArgumentError, NumericError

GAUSS_HERMITE = "gauss_hermite_tensor"
TRAPEZOID = "trapezoid_truncated"
SCHEMES = (GAUSS_HERMITE, TRAPEZOID)

MAX_DIMS = 6
MAX_NODES = 10 ** 8
_BLOCK = 1 << 14


@dataclass(frozen=True)
class QuadratureSpec:
    """Quadrature settings.

    ``center`` and ``scale`` left as ``None`` are filled in by callers that know the
    family (grid centered on the family's mass, scaled by its envelope width ``a``).
    ``truncation_radius`` is measured in units of ``scale`` and only used by the
    trapezoid scheme.
    """

    scheme: str = GAUSS_HERMITE
    nodes_per_axis: int = 64
    truncation_radius: float = 8.0
    center: Optional[Tuple[float, ...]] = None
    scale: Optional[float] = None

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise InvalidArgumentError(f"unknown quadrature scheme {self.scheme!r}")
        minimum = 1 if self.scheme == GAUSS_HERMITE else 2
        if isinstance(self.nodes_per_axis, bool) or int(self.nodes_per_axis) != self.nodes_per_axis \
                or self.nodes_per_axis < minimum:
            raise InvalidArgumentError(f"nodes_per_axis must be an integer >= {minimum}")
        if not self.truncation_radius > 0:
            raise InvalidArgumentError("truncation_radius must be positive")
        if self.scale is not None and not self.scale > 0:
            raise InvalidArgumentError("scale must be positive")
        if self.center is not None:
            object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    def resolved(self, center, scale) -> "QuadratureSpec":
        """Fill unset ``center``/``scale`` from the caller's defaults."""
        return replace(
            self,
            center=tuple(np.asarray(center, dtype=float)) if self.center is None else self.center,
            scale=float(scale) if self.scale is None else self.scale,
        )

    def refined(self, factor: int = 2) -> "QuadratureSpec":
        return replace(self, nodes_per_axis=self.nodes_per_axis * factor)

    def to_json(self) -> dict:
        out = {"scheme": self.scheme, "nodes": self.nodes_per_axis, "radius": self.truncation_radius,
               "center": None if self.center is None else list(self.center)}
        if self.scale is not None:
            out["scale"] = self.scale
        return out

    @classmethod
    def from_json(cls, data: dict) -> "QuadratureSpec":
        return cls(
            scheme=data.get("scheme", GAUSS_HERMITE),
            nodes_per_axis=int(data.get("nodes", 64)),
            truncation_radius=float(data.get("radius", 8.0)),
            center=data.get("center"),
            scale=data.get("scale"),
        )


@dataclass(frozen=True)
class IntegralResult:
    value: complex | np.ndarray
    node_count: int
    scheme_used: str
    estimated_error: float = 0.0


@lru_cache(maxsize=64)
def _hermgauss(n):
    t, w = np.polynomial.hermite.hermgauss(n)
    t.setflags(write=False)
    w.setflags(write=False)
    return t, w


def hermite_nodes(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Hermite rule for ``int exp(-t^2) f(t) dt``; exact for degree <= 2n-1.

    Returns ``(nodes, weights)``, nodes ascending and symmetric about zero.
    """
    if isinstance(n, bool) or int(n) != n or not 1 <= n <= 200:
        raise InvalidArgumentError(f"number of Hermite nodes must be in [1, 200], got {n!r}")
    t, w = _hermgauss(int(n))
    t = 0.5 * (t - t[::-1])  # exact symmetry
    w = 0.5 * (w + w[::-1])
    return t, w


def axis_rule(spec: QuadratureSpec) -> Tuple[np.ndarray, np.ndarray]:
    """1D nodes and Lebesgue weights for one axis, before centering (center 0)."""
    s = 1.0 if spec.scale is None else spec.scale
    n = spec.nodes_per_axis
    if spec.scheme == GAUSS_HERMITE:
        t, w = hermite_nodes(n)
        # undo the exp(-t^2) weight so f is integrated against dx
        return math.sqrt(2.0) * s * t, w * np.exp(t * t) * (math.sqrt(2.0) * s)
    R = spec.truncation_radius * s
    x = np.linspace(-R, R, n)
    w = np.full(n, 2.0 * R / (n - 1))
    w[0] = w[-1] = R / (n - 1)
    return x, w


def integrate(f: Callable[[np.ndarray], np.ndarray], dims: int, spec: QuadratureSpec | None = None) -> IntegralResult:
    """Integrate ``f`` over ``R^dims`` with a tensor-product rule.

    Raises
    ------
    BudgetError
        ``dims > 6`` or more than 1e8 grid points.
    NumericError
        The integrand returned a NaN or infinity; ``exc.point`` is the first such point.
    """
    spec = QuadratureSpec() if spec is None else spec
    if isinstance(dims, bool) or int(dims) != dims or dims < 1:
        raise InvalidArgumentError(f"dims must be a positive integer, got {dims!r}")
    if dims > MAX_DIMS:
        raise BudgetError(f"tensor quadrature is capped at {MAX_DIMS} dimensions, got {dims}")
    n = spec.nodes_per_axis
    total = n ** dims
    if total > MAX_NODES:
        raise BudgetError(f"{n}^{dims} = {total} nodes exceeds the budget of {MAX_NODES}")
    center = np.zeros(dims) if spec.center is None else np.asarray(spec.center, dtype=float)
    if center.shape != (dims,):
        raise InvalidArgumentError(f"quadrature center has length {center.size}, expected {dims}")

    x1, w1 = axis_rule(spec)

    # trailing block of k axes, walked under every index of the leading axes
    k = dims
    while k > 1 and n ** k > _BLOCK:
        k -= 1
    lead = dims - k
    mesh = np.meshgrid(*([x1] * k), indexing="ij")
    tail_x = np.stack([m.reshape(-1) for m in mesh], axis=1) + center[lead:]
    wmesh = np.meshgrid(*([w1] * k), indexing="ij")
    tail_w = np.prod(np.stack([m.reshape(-1) for m in wmesh], axis=1), axis=1)
    m = tail_x.shape[0]

    acc = None
    X = np.empty((m, dims))
    X[:, lead:] = tail_x
    for idx in np.ndindex(*([n] * lead)):
        wlead = 1.0
        for j, i in enumerate(idx):
            X[:, j] = x1[i] + center[j]
            wlead *= w1[i]
        with np.errstate(over="ignore", invalid="ignore"):
            vals = np.asarray(f(X))
        if vals.shape[:1] != (m,):
            raise InvalidArgumentError(f"integrand returned shape {vals.shape}, expected leading axis {m}")
        finite = np.isfinite(vals)
        if not finite.all():
            bad = np.argwhere(~finite.reshape(m, -1).all(axis=1))[0, 0]
            raise NumericError(f"non-finite integrand value at x = {X[bad].tolist()}", point=X[bad].copy())
        w = (wlead * tail_w).reshape((m,) + (1,) * (vals.ndim - 1))
        part = np.sum(w * vals, axis=0)
        acc = part if acc is None else acc + part

    value = complex(acc) if np.ndim(acc) == 0 else np.asarray(acc, dtype=complex)
    return IntegralResult(value=value, node_count=total, scheme_used=spec.scheme)


def refine(f: Callable[[np.ndarray], np.ndarray], dims: int, spec: QuadratureSpec | None = None) -> IntegralResult:
    """Integrate at ``nodes_per_axis`` and twice that; report the finer value.

    ``estimated_error`` is the largest absolute difference between the two runs.
    """
    spec = QuadratureSpec() if spec is None else spec
    coarse = integrate(f, dims, spec)
    fine = integrate(f, dims, spec.refined(2))
    err = float(np.max(np.abs(np.asarray(fine.value) - np.asarray(coarse.value))))
    return replace(fine, estimated_error=err)
