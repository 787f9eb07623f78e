"""Parametric density families.

A family is described by a :class:`DensityFamily` record whose callables are
vectorized over sample points: ``density(theta, X)`` takes a parameter vector of
shape ``(d,)`` and sample points of shape ``(m, n)`` and returns ``m`` complex
values. Real families embed into the complex plane so that every consumer has a
single integration path.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    CapabilityMissingError,
    InvalidArgumentError,
    NumericOverflowError,
)

ArrayFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class DensityFamily:
    """Capability record for a parametric family ``p_theta(x)``.

    Parameters
    ----------
    name : str
        Identifier, normally the string spec the family was parsed from.
    param_dim, sample_dim : int
        Dimensions of the parameter manifold and of the sample space.
    is_real_valued : bool
        True iff the density is real and nonnegative everywhere.
    density : callable
        ``(theta (d,), X (m, n)) -> (m,) complex``.
    envelope_scale : float
        Width ``a`` of the Gaussian envelope; also the length unit of quadrature grids.
    center : callable
        ``theta -> (n,)`` real point where the mass (or its envelope) concentrates.
    score : callable, optional
        ``(theta, X) -> (m, d) complex``, the columns being ``(1/p) dp/dtheta^mu``.
    analytic_metric : callable, optional
        ``theta -> (d, d)`` real array.
    log_density : callable, optional
        ``(theta, X) -> (m,) real``; only for real families.
    sampler : callable, optional
        ``(theta, rng, size) -> (size, n)`` draws from ``p_theta``.
    """

    name: str
    param_dim: int
    sample_dim: int
    is_real_valued: bool
    density: ArrayFn
    envelope_scale: float
    center: Callable[[np.ndarray], np.ndarray]
    score: Optional[ArrayFn] = None
    analytic_metric: Optional[Callable[[np.ndarray], np.ndarray]] = None
    log_density: Optional[ArrayFn] = None
    sampler: Optional[Callable[[np.ndarray, np.random.Generator, int], np.ndarray]] = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.param_dim < 1 or self.sample_dim < 1:
            raise InvalidArgumentError("family dimensions must be positive")
        if not self.envelope_scale > 0:
            raise InvalidArgumentError("envelope_scale must be positive")


@dataclass(frozen=True)
class DiscreteDistribution:
    """Finite distribution ``p(i)``; nonnegative and summing to one within 1e-12."""

    probs: tuple

    def __init__(self, probs: Sequence[float]):
        values = tuple(float(v) for v in probs)
        if len(values) == 0:
            raise InvalidArgumentError("empty distribution")
        if any(not math.isfinite(v) or v < 0 for v in values):
            raise InvalidArgumentError(f"probabilities must be finite and >= 0: {values}")
        if abs(math.fsum(values) - 1.0) > 1e-12:
            raise InvalidArgumentError(f"probabilities sum to {math.fsum(values)!r}, not 1")
        object.__setattr__(self, "probs", values)

    def __len__(self):
        return len(self.probs)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=float)


def _check_positive(name, value):
    if not (isinstance(value, (int, float, np.floating, np.integer)) and math.isfinite(value) and value > 0):
        raise InvalidArgumentError(f"{name} must be a positive finite number, got {value!r}")


def _check_dim(dim):
    if isinstance(dim, bool) or not isinstance(dim, (int, np.integer)) or dim < 1:
        raise InvalidArgumentError(f"dim must be a positive integer, got {dim!r}")


def as_param_point(family: DensityFamily, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float).reshape(-1)
    if theta.shape != (family.param_dim,):
        raise InvalidArgumentError(
            f"{family.name}: parameter point has length {theta.size}, expected {family.param_dim}"
        )
    if not np.all(np.isfinite(theta)):
        raise InvalidArgumentError(f"parameter point has non-finite entries: {theta}")
    return theta


def as_sample_points(family: DensityFamily, x) -> np.ndarray:
    """Coerce to an ``(m, n)`` array; a single point becomes ``(1, n)``."""
    X = np.asarray(x, dtype=float)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2 or X.shape[1] != family.sample_dim:
        raise InvalidArgumentError(
            f"{family.name}: sample points have shape {X.shape}, expected (m, {family.sample_dim})"
        )
    if not np.all(np.isfinite(X)):
        raise InvalidArgumentError("sample points have non-finite entries")
    return X


# --------------------------------------------------------------------------
# Built-in families


def make_gaussian(dim: int, a: float) -> DensityFamily:
    """Isotropic location Gaussian ``N(theta, a^2 I)`` on ``R^dim``.

    The normalizing constant is ``(2 pi a^2)^(dim/2)``; the metric is ``I / a^2``.
    """
    _check_dim(dim)
    _check_positive("a", a)
    a = float(a)
    a2 = a * a
    log_norm = 0.5 * dim * math.log(2.0 * math.pi * a2)

    def log_density(theta, X):
        u = X - theta
        return -0.5 * np.sum(u * u, axis=1) / a2 - log_norm

    def density(theta, X):
        return np.exp(log_density(theta, X)).astype(complex)

    def score(theta, X):
        return ((X - theta) / a2).astype(complex)

    def metric(theta):
        return np.eye(dim) / a2

    def sampler(theta, rng, size):
        return theta + a * rng.standard_normal((size, dim))

    return DensityFamily(
        name=f"gaussian:{dim}:{a!r}",
        param_dim=dim,
        sample_dim=dim,
        is_real_valued=True,
        density=density,
        envelope_scale=a,
        center=lambda theta: np.array(theta, dtype=float),
        score=score,
        analytic_metric=metric,
        log_density=log_density,
        sampler=sampler,
        meta={"kind": "gaussian", "dim": dim, "a": a},
    )


def make_complex_gaussian(a: float, imaginary_axes: Sequence[int] = (0,)) -> DensityFamily:
    """Four-dimensional Gaussian whose listed axes are shifted along the imaginary direction.

    ``p_theta(x) = exp(-sum_k z_k^2 / 2a^2) / (2 pi a^2)^2`` with ``z_k = x_k - i theta_k``
    on imaginary axes and ``z_k = x_k - theta_k`` elsewhere. It integrates to one over the
    real axis but is not pointwise positive, so it has no sampler.
    """
    _check_positive("a", a)
    a = float(a)
    a2 = a * a
    dim = 4
    imag = tuple(sorted(set(int(k) for k in imaginary_axes)))
    if any(k < 0 or k >= dim for k in imag):
        raise InvalidArgumentError(f"imaginary axes out of range: {imag}")
    shift = np.ones(dim, dtype=complex)
    shift[list(imag)] = 1j
    # d z_k / d theta_k = -shift_k, so score_k = shift_k z_k / a^2
    norm = (2.0 * math.pi * a2) ** 2
    signs = np.ones(dim)
    signs[list(imag)] = -1.0

    def _z(theta, X):
        return X - shift * theta

    def density(theta, X):
        z = _z(theta, X)
        return np.exp(-0.5 * np.sum(z * z, axis=1) / a2) / norm

    def score(theta, X):
        return shift * _z(theta, X) / a2

    def metric(theta):
        return np.diag(signs) / a2

    def center(theta):
        c = np.array(theta, dtype=float)
        c[list(imag)] = 0.0
        return c

    name = f"complex-gaussian:{a!r}"
    if imag != (0,):
        name += ":" + ",".join(str(k) for k in imag)
    return DensityFamily(
        name=name,
        param_dim=dim,
        sample_dim=dim,
        is_real_valued=False,
        density=density,
        envelope_scale=a,
        center=center,
        score=score,
        analytic_metric=metric,
        meta={"kind": "complex-gaussian", "a": a, "imaginary_axes": imag},
    )


def make_warped_gaussian(dim: int, a: float, cubic: float = 0.1) -> DensityFamily:
    """Location Gaussian whose mean is the warped parameter ``theta + cubic * theta^3``.

    The Kullback number between two members is no longer a pure quadratic in the
    parameter displacement, which makes this the reference non-trivial real family.
    """
    _check_dim(dim)
    _check_positive("a", a)
    a = float(a)
    cubic = float(cubic)
    if not math.isfinite(cubic):
        raise InvalidArgumentError("cubic coefficient must be finite")
    base = make_gaussian(dim, a)
    a2 = a * a

    def mean(theta):
        return theta + cubic * theta ** 3

    def dmean(theta):
        return 1.0 + 3.0 * cubic * theta ** 2

    def log_density(theta, X):
        return base.log_density(mean(theta), X)

    def density(theta, X):
        return base.density(mean(theta), X)

    def score(theta, X):
        return base.score(mean(theta), X) * dmean(theta)

    def metric(theta):
        return np.diag(dmean(theta) ** 2) / a2

    def sampler(theta, rng, size):
        return base.sampler(mean(theta), rng, size)

    return DensityFamily(
        name=f"warped-gaussian:{dim}:{a!r}:{cubic!r}",
        param_dim=dim,
        sample_dim=dim,
        is_real_valued=True,
        density=density,
        envelope_scale=a,
        center=lambda theta: mean(np.asarray(theta, dtype=float)),
        score=score,
        analytic_metric=metric,
        log_density=log_density,
        sampler=sampler,
        meta={"kind": "warped-gaussian", "dim": dim, "a": a, "cubic": cubic},
    )


def affine_reparametrization(family: DensityFamily, jacobian, offset) -> DensityFamily:
    """Re-coordinatize ``family`` by ``theta = J phi + c``.

    Only the density, center, sampler and log-density are carried over; the score and
    the analytic metric are dropped on purpose, so downstream metrics of the new family
    come from finite differences rather than from the chain rule.
    """
    J = np.asarray(jacobian, dtype=float)
    c = np.asarray(offset, dtype=float).reshape(-1)
    d = family.param_dim
    if J.shape != (d, d) or c.shape != (d,):
        raise InvalidArgumentError(f"jacobian must be {d}x{d} and offset length {d}")
    if not np.all(np.isfinite(J)) or np.linalg.cond(J) >= 1e8:
        raise InvalidArgumentError("jacobian is singular or ill-conditioned (cond >= 1e8)")

    def to_theta(phi):
        return J @ np.asarray(phi, dtype=float) + c

    return DensityFamily(
        name=f"{family.name}|affine",
        param_dim=d,
        sample_dim=family.sample_dim,
        is_real_valued=family.is_real_valued,
        density=lambda phi, X: family.density(to_theta(phi), X),
        envelope_scale=family.envelope_scale,
        center=lambda phi: family.center(to_theta(phi)),
        log_density=(
            None if family.log_density is None
            else (lambda phi, X: family.log_density(to_theta(phi), X))
        ),
        sampler=(
            None if family.sampler is None
            else (lambda phi, rng, size: family.sampler(to_theta(phi), rng, size))
        ),
        meta={"kind": "affine", "base": family.name, "jacobian": J.tolist(), "offset": c.tolist()},
    )


# --------------------------------------------------------------------------
# Pointwise evaluation


def evaluate_density(family: DensityFamily, theta, x) -> complex:
    """Density at a single sample point, as a Python complex."""
    theta = as_param_point(family, theta)
    X = as_sample_points(family, x)
    if X.shape[0] != 1:
        raise InvalidArgumentError("evaluate_density takes a single sample point")
    with np.errstate(over="ignore", invalid="ignore"):
        value = complex(family.density(theta, X)[0])
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise NumericOverflowError(f"{family.name}: non-finite density {value}", point=X[0])
    return value


def evaluate_score(family: DensityFamily, theta, x, mu: int) -> complex:
    """Analytic score ``(1/p) dp/dtheta^mu`` at a single sample point."""
    if family.score is None:
        raise CapabilityMissingError(f"{family.name} has no analytic score")
    theta = as_param_point(family, theta)
    X = as_sample_points(family, x)
    if not 0 <= mu < family.param_dim:
        raise InvalidArgumentError(f"axis {mu} out of range for param_dim {family.param_dim}")
    return complex(family.score(theta, X)[0, mu])


def normalization_check(family: DensityFamily, theta, spec=None):
    """Quadrature of ``int p_theta(x) dx`` on a grid centered on the family.

    Returns the :class:`~infogeom.integrate.IntegralResult`; the value should be
    ``1 + 0j`` up to quadrature error, for complex families as well.
    """
    from .integrate import QuadratureSpec, integrate

    theta = as_param_point(family, theta)
    spec = (spec or QuadratureSpec()).resolved(family.center(theta), family.envelope_scale)
    return integrate(lambda X: family.density(theta, X), family.sample_dim, spec)


# --------------------------------------------------------------------------
# String specs


def parse_family(spec: str) -> DensityFamily | DiscreteDistribution:
    """Build a family from its string id.

    Recognized forms::

        gaussian:<dim>:<a>
        complex-gaussian:<a>[:<axis>,<axis>...]
        warped-gaussian:<dim>:<a>[:<cubic>]
        discrete:[p0,p1,...]
    """
    if not isinstance(spec, str) or ":" not in spec:
        raise InvalidArgumentError(f"malformed family spec {spec!r}")
    kind, _, rest = spec.partition(":")
    try:
        if kind == "discrete":
            probs = json.loads(rest)
            if not isinstance(probs, list):
                raise ValueError
            return DiscreteDistribution(probs)
        parts = rest.split(":")
        if kind == "gaussian" and len(parts) == 2:
            return make_gaussian(int(parts[0]), float(parts[1]))
        if kind == "complex-gaussian" and len(parts) in (1, 2):
            axes = (0,) if len(parts) == 1 else tuple(int(k) for k in parts[1].split(","))
            return make_complex_gaussian(float(parts[0]), axes)
        if kind == "warped-gaussian" and len(parts) in (2, 3):
            cubic = float(parts[2]) if len(parts) == 3 else 0.1
            return make_warped_gaussian(int(parts[0]), float(parts[1]), cubic)
    except InvalidArgumentError:
        raise
    except (ValueError, TypeError) as exc:
        raise InvalidArgumentError(f"malformed family spec {spec!r}") from exc
    raise InvalidArgumentError(f"malformed family spec {spec!r}")
