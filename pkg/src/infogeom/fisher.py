"""Fisher information metric: analytic, quadrature and Monte Carlo backends.

The quadrature backend integrates ``p * s_mu * s_nu`` with ``s = (1/p) dp/dtheta``
for complex densities as well, then realifies the result: imaginary parts must be
below ``realify_tol`` and are dropped, the matrix is symmetrized, and the size of
both discards is recorded on the returned :class:`MetricTensor`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .densities import (
    DensityFamily,
    affine_reparametrization,
    as_param_point,
    as_sample_points,
)
from .errors import (
    CapabilityMissingError,
    DegenerateDensityError,
    InvalidArgumentError,
    RealificationError,
    UnsupportedForComplexError,
)
from .integrate import QuadratureSpec, integrate

BACKENDS = ("analytic", "quadrature", "monte_carlo")
REALIFY_TOL = 1e-8
_TINY = 1e-300


@dataclass(frozen=True, eq=False)
class MetricTensor:
    entries: np.ndarray
    backend: str
    rescale_factor: float = 1.0
    max_imag_discarded: float = 0.0
    max_asym_discarded: float = 0.0

    def __post_init__(self):
        G = np.array(self.entries, dtype=float)
        if G.ndim != 2 or G.shape[0] != G.shape[1]:
            raise InvalidArgumentError(f"metric must be square, got shape {G.shape}")
        if not np.array_equal(G, G.T):
            raise InvalidArgumentError("metric entries must be exactly symmetric")
        if self.backend not in BACKENDS:
            raise InvalidArgumentError(f"unknown backend {self.backend!r}")
        G.setflags(write=False)
        object.__setattr__(self, "entries", G)

    def __eq__(self, other):
        if not isinstance(other, MetricTensor):
            return NotImplemented
        return (np.array_equal(self.entries, other.entries) and self.backend == other.backend
                and self.rescale_factor == other.rescale_factor
                and self.max_imag_discarded == other.max_imag_discarded
                and self.max_asym_discarded == other.max_asym_discarded)

    __hash__ = None

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def to_json(self) -> dict:
        return {
            "entries": self.entries.tolist(),
            "backend": self.backend,
            "rescale_factor": self.rescale_factor,
            "max_imag_discarded": self.max_imag_discarded,
            "max_asym_discarded": self.max_asym_discarded,
        }

    @classmethod
    def from_json(cls, data: dict) -> "MetricTensor":
        return cls(
            entries=np.asarray(data["entries"], dtype=float),
            backend=data["backend"],
            rescale_factor=float(data.get("rescale_factor", 1.0)),
            max_imag_discarded=float(data.get("max_imag_discarded", 0.0)),
            max_asym_discarded=float(data.get("max_asym_discarded", 0.0)),
        )


@dataclass(frozen=True)
class MonteCarloEstimate:
    metric: MetricTensor
    sample_count: int
    standard_errors: np.ndarray
    seed: int

    def to_json(self) -> dict:
        return {
            "metric": self.metric.to_json(),
            "sample_count": self.sample_count,
            "standard_errors": np.asarray(self.standard_errors).tolist(),
            "seed": self.seed,
        }


class ReparametrizationCheck(NamedTuple):
    g_original: MetricTensor
    g_pulled_back: MetricTensor
    max_deviation: float


def realify(raw, backend: str = "quadrature", realify_tol: float = REALIFY_TOL) -> MetricTensor:
    """Turn a raw complex matrix into a real symmetric :class:`MetricTensor`."""
    raw = np.asarray(raw, dtype=complex)
    imag = np.abs(raw.imag)
    worst = float(imag.max()) if imag.size else 0.0
    if worst >= realify_tol:
        entry = tuple(int(i) for i in np.unravel_index(np.argmax(imag), imag.shape))
        raise RealificationError(
            f"imaginary residue {worst:.3e} at entry {entry} exceeds tolerance {realify_tol:.1e}",
            entry=entry, residue=worst,
        )
    G = raw.real
    sym = 0.5 * (G + G.T)
    return MetricTensor(sym, backend, 1.0, worst, float(np.max(np.abs(G - sym))))


def fisher_analytic(family: DensityFamily, theta) -> MetricTensor:
    if family.analytic_metric is None:
        raise CapabilityMissingError(f"{family.name} has no analytic metric")
    theta = as_param_point(family, theta)
    G = np.asarray(family.analytic_metric(theta), dtype=float)
    return MetricTensor(0.5 * (G + G.T), "analytic")


def default_step(theta) -> np.ndarray:
    return 1e-5 * np.maximum(1.0, np.abs(np.asarray(theta, dtype=float)))


def _fd_scores(family, theta, X, h):
    """Central-difference scores at all points; returns ``(scores, p, degenerate_mask)``."""
    p = family.density(theta, X)
    d = family.param_dim
    S = np.empty((X.shape[0], d), dtype=complex)
    degenerate = np.abs(p) < _TINY
    safe_p = np.where(degenerate, 1.0, p)
    for mu in range(d):
        e = np.zeros(d)
        e[mu] = h[mu]
        diff = family.density(theta + e, X) - family.density(theta - e, X)
        S[:, mu] = np.where(degenerate, 0.0, diff / (2.0 * h[mu] * safe_p))
    return S, p, degenerate


def _steps(family, theta, h):
    if h is None:
        return default_step(theta)
    h = np.broadcast_to(np.asarray(h, dtype=float), (family.param_dim,)).copy()
    if not np.all(h > 0):
        raise InvalidArgumentError("finite-difference step must be positive")
    return h


def fd_score(family: DensityFamily, theta, x, mu: int, h: float | None = None) -> complex:
    """``(p(theta + h e_mu, x) - p(theta - h e_mu, x)) / (2 h p(theta, x))``."""
    theta = as_param_point(family, theta)
    X = as_sample_points(family, x)
    if not 0 <= mu < family.param_dim:
        raise InvalidArgumentError(f"axis {mu} out of range")
    steps = _steps(family, theta, h)
    S, p, degenerate = _fd_scores(family, theta, X[:1], steps)
    if degenerate[0]:
        raise DegenerateDensityError(f"|p| = {abs(p[0]):.3e} below 1e-300", point=X[0])
    return complex(S[0, mu])


def fisher_quadrature(family: DensityFamily, theta, spec: QuadratureSpec | None = None,
                      score_source: str = "analytic", realify_tol: float = REALIFY_TOL,
                      h=None) -> MetricTensor:
    """Metric entries ``int p s_mu s_nu dx`` by tensor quadrature.

    ``score_source`` is ``"analytic"`` (the family's score) or ``"finite_difference"``.
    The grid defaults to the family center and envelope width.
    """
    theta = as_param_point(family, theta)
    if score_source == "analytic":
        if family.score is None:
            raise CapabilityMissingError(f"{family.name} has no analytic score")
    elif score_source != "finite_difference":
        raise InvalidArgumentError(f"unknown score source {score_source!r}")
    spec = (spec or QuadratureSpec()).resolved(family.center(theta), family.envelope_scale)
    d = family.param_dim
    iu = np.triu_indices(d)
    steps = _steps(family, theta, h) if score_source == "finite_difference" else None

    def integrand(X):
        if score_source == "analytic":
            p = family.density(theta, X)
            S = family.score(theta, X)
        else:
            S, p, _ = _fd_scores(family, theta, X, steps)
        T = np.ascontiguousarray(S.T)
        pT = p * T
        out = np.empty((len(iu[0]), X.shape[0]), dtype=complex)
        for k, (i, j) in enumerate(zip(*iu)):
            np.multiply(pT[i], T[j], out=out[k])
        return out.T

    res = integrate(integrand, family.sample_dim, spec)
    upper = np.atleast_1d(res.value)
    raw = np.zeros((d, d), dtype=complex)
    raw[iu] = upper
    raw[(iu[1], iu[0])] = upper
    return realify(raw, "quadrature", realify_tol)


def fisher_monte_carlo(family: DensityFamily, theta, n_samples: int = 100_000, seed: int = 0,
                       h=None) -> MonteCarloEstimate:
    """Sample mean of ``s_mu s_nu`` under ``p_theta``.

    Draws come from a Philox (counter-based) stream keyed by ``seed``, so the
    estimate depends only on ``(family, theta, n_samples, seed)``.
    """
    if not family.is_real_valued:
        raise UnsupportedForComplexError(
            f"{family.name} is complex-valued and cannot be sampled from"
        )
    if family.sampler is None:
        raise CapabilityMissingError(f"{family.name} has no sampler")
    if isinstance(n_samples, bool) or int(n_samples) != n_samples or n_samples < 2:
        raise InvalidArgumentError("n_samples must be an integer >= 2")
    theta = as_param_point(family, theta)
    rng = np.random.Generator(np.random.Philox(seed))
    X = np.asarray(family.sampler(theta, rng, int(n_samples)), dtype=float)
    if family.score is not None:
        S = np.real(family.score(theta, X))
    else:
        S = np.real(_fd_scores(family, theta, X, _steps(family, theta, h))[0])
    prods = S[:, :, None] * S[:, None, :]
    mean = prods.mean(axis=0)
    se = prods.std(axis=0, ddof=1) / math.sqrt(n_samples)
    metric = MetricTensor(0.5 * (mean + mean.T), "monte_carlo",
                          max_asym_discarded=float(np.max(np.abs(mean - mean.T))) / 2)
    return MonteCarloEstimate(metric, int(n_samples), 0.5 * (se + se.T), int(seed))


def rescale(g: MetricTensor, factor: float) -> MetricTensor:
    """Multiply all entries by ``factor`` (> 0); the factor accumulates on the tensor."""
    if not (isinstance(factor, (int, float, np.floating)) and math.isfinite(factor) and factor > 0):
        raise InvalidArgumentError(f"rescale factor must be positive, got {factor!r}")
    return replace(g, entries=g.entries * factor, rescale_factor=g.rescale_factor * factor)


def reparametrize_check(family: DensityFamily, theta, jacobian, spec: QuadratureSpec | None = None,
                        phi=None) -> ReparametrizationCheck:
    """Covariance of the metric under ``theta = J phi + c``.

    The metric in ``phi`` coordinates is computed from scratch on the re-coordinatized
    family with finite-difference scores, and compared with ``J^T g_theta J``.
    """
    theta = as_param_point(family, theta)
    J = np.asarray(jacobian, dtype=float)
    d = family.param_dim
    if J.shape != (d, d):
        raise InvalidArgumentError(f"jacobian must be {d}x{d}")
    if not np.all(np.isfinite(J)) or np.linalg.cond(J) >= 1e8:
        raise InvalidArgumentError("jacobian is singular (condition number >= 1e8)")
    phi = np.zeros(d) if phi is None else np.asarray(phi, dtype=float).reshape(d)
    offset = theta - J @ phi
    source = "analytic" if family.score is not None else "finite_difference"
    g_theta = fisher_quadrature(family, theta, spec, score_source=source)
    moved = affine_reparametrization(family, J, offset)
    g_phi = fisher_quadrature(moved, phi, spec, score_source="finite_difference")
    predicted = J.T @ g_theta.entries @ J
    return ReparametrizationCheck(g_theta, g_phi, float(np.max(np.abs(g_phi.entries - predicted))))
