"""Entropy, relative entropy and the continuous Kullback number.

KL-type quantities are in nats. ``shannon_entropy`` defaults to bits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .densities import DensityFamily, DiscreteDistribution, as_param_point
from .errors import InvalidArgumentError, NumericError, UnsupportedForComplexError
from .integrate import QuadratureSpec, integrate

GIBBS_TOL = 1e-10
_IMAG_DISCARD_TOL = 1e-10


@dataclass(frozen=True)
class DivergenceValue:
    value: float
    is_infinite: bool = False

    def __float__(self):
        return math.inf if self.is_infinite else self.value

    def to_json(self):
        return {"value": None if self.is_infinite else self.value, "is_infinite": self.is_infinite}


@dataclass
class ExpansionReport:
    """Kullback number against its quadratic prediction along ``theta + eps v``."""

    epsilons: list
    lhs: list
    quadratic_prediction: list
    residuals: list
    fitted_order: float
    quadform: float = 0.0

    def rows(self):
        return [
            {"epsilon": e, "lhs": l, "prediction": p, "residual": r}
            for e, l, p, r in zip(self.epsilons, self.lhs, self.quadratic_prediction, self.residuals)
        ]


def _log(x, base):
    if base == "bits":
        return np.log2(x)
    if base == "nats":
        return np.log(x)
    raise InvalidArgumentError(f"base must be 'bits' or 'nats', got {base!r}")


def shannon_entropy(p: DiscreteDistribution | Sequence[float], base: str = "bits") -> float:
    """``-sum p log p`` with ``0 log 0 = 0``."""
    if not isinstance(p, DiscreteDistribution):
        p = DiscreteDistribution(p)
    probs = p.as_array()
    nz = probs[probs > 0]
    return float(max(0.0, -np.sum(nz * _log(nz, base))))


def kl_discrete(g: DiscreteDistribution | Sequence[float], p: DiscreteDistribution | Sequence[float],
                base: str = "nats") -> DivergenceValue:
    """Relative entropy ``D(g||p) = sum g log(g/p)``.

    Terms with ``g(i) = 0`` vanish; ``g(i) > 0`` with ``p(i) = 0`` gives an infinite result.
    """
    if not isinstance(g, DiscreteDistribution):
        g = DiscreteDistribution(g)
    if not isinstance(p, DiscreteDistribution):
        p = DiscreteDistribution(p)
    if len(g) != len(p):
        raise InvalidArgumentError(f"length mismatch: {len(g)} vs {len(p)}")
    ga, pa = g.as_array(), p.as_array()
    support = ga > 0
    if np.any(pa[support] == 0):
        return DivergenceValue(math.inf, is_infinite=True)
    terms = ga[support] * (_log(ga[support], base) - _log(pa[support], base))
    return DivergenceValue(float(math.fsum(terms)))


def _log_density(family, theta):
    if family.log_density is not None:
        return lambda X: family.log_density(theta, X)
    return lambda X: np.log(np.real(family.density(theta, X)))


def kullback_number(q_family: DensityFamily, theta_q, p_family: DensityFamily, theta_p,
                    spec: QuadratureSpec | None = None) -> DivergenceValue:
    """``I(q||p) = int q log(q/p) dx`` by quadrature centered on ``q``.

    Only defined here for real families; a complex density has no single-valued log.
    """
    for fam in (q_family, p_family):
        if not fam.is_real_valued:
            raise UnsupportedForComplexError(
                f"Kullback number is undefined for the complex-valued family {fam.name}"
            )
    if q_family.sample_dim != p_family.sample_dim:
        raise InvalidArgumentError("families live on different sample spaces")
    theta_q = as_param_point(q_family, theta_q)
    theta_p = as_param_point(p_family, theta_p)
    spec = (spec or QuadratureSpec()).resolved(q_family.center(theta_q), q_family.envelope_scale)
    log_q = _log_density(q_family, theta_q)
    log_p = _log_density(p_family, theta_p)

    def integrand(X):
        lq = log_q(X)
        lp = log_p(X)
        q = np.exp(lq)
        out = np.zeros_like(q)
        live = q > 0
        if np.any(np.isneginf(lp[live])):
            return np.full_like(q, np.inf)
        out[live] = q[live] * (lq[live] - lp[live])
        return out

    try:
        res = integrate(integrand, q_family.sample_dim, spec)
    except NumericError as exc:
        if exc.point is not None and np.isinf(np.real(integrand(exc.point.reshape(1, -1)))).any():
            return DivergenceValue(math.inf, is_infinite=True)
        raise
    value = complex(res.value)
    if abs(value.imag) >= _IMAG_DISCARD_TOL:
        raise NumericError(f"Kullback number has imaginary residue {value.imag:.3e}")
    if value.real < -GIBBS_TOL:
        raise NumericError(f"Kullback number {value.real:.3e} is negative beyond tolerance")
    return DivergenceValue(value.real)


def expansion_residuals(family: DensityFamily, theta, v, epsilons: Sequence[float], g,
                        spec: QuadratureSpec | None = None) -> ExpansionReport:
    """Compare ``I(p_{theta+eps v} || p_theta)`` with ``eps^2 v.g.v / 2``.

    ``fitted_order`` is the least-squares slope of ``log|residual|`` against
    ``log eps``; it is NaN when every residual sits at the rounding floor (1e-14),
    i.e. the divergence is exactly quadratic.
    """
    theta = as_param_point(family, theta)
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape != theta.shape or not np.linalg.norm(v) > 0:
        raise InvalidArgumentError("direction must be a nonzero vector of the parameter dimension")
    eps = [float(e) for e in epsilons]
    if len(eps) < 3:
        raise InvalidArgumentError("need at least three epsilons")
    if any(not 0 < e < 1 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
        raise InvalidArgumentError("epsilons must lie in (0, 1) and be strictly descending")
    G = np.asarray(getattr(g, "entries", g), dtype=float)
    quad = float(v @ G @ v)

    lhs, pred = [], []
    for e in eps:
        lhs.append(kullback_number(family, theta + e * v, family, theta, spec).value)
        pred.append(0.5 * e * e * quad)
    res = [l - p for l, p in zip(lhs, pred)]
    mags = np.abs(res)
    if np.all(mags > 1e-14):
        slope = float(np.polyfit(np.log(eps), np.log(mags), 1)[0])
    else:
        slope = math.nan
    return ExpansionReport(eps, lhs, pred, res, slope, quad)


# --------------------------------------------------------------------------
# Distance-axiom probe


@dataclass
class AxiomReport:
    n_triples: int
    positivity_violations: int = 0
    symmetry_violations: int = 0
    triangle_violations: int = 0
    max_asymmetry: float = 0.0
    max_triangle_excess: float = 0.0
    symmetry_example: Optional[tuple] = None
    triangle_example: Optional[tuple] = None

    @property
    def is_metric(self) -> bool:
        return not (self.positivity_violations or self.symmetry_violations or self.triangle_violations)

    def to_json(self):
        return {
            "n_triples": self.n_triples,
            "positivity_violations": self.positivity_violations,
            "symmetry_violations": self.symmetry_violations,
            "triangle_violations": self.triangle_violations,
            "max_asymmetry": self.max_asymmetry,
            "max_triangle_excess": self.max_triangle_excess,
            "is_metric": self.is_metric,
        }


def axiom_probe(distance: Callable, draw: Callable[[np.random.Generator], object],
                n_triples: int = 1000, seed: int = 0, slack: float = 1e-12) -> AxiomReport:
    """Check positivity, symmetry and the triangle inequality on random triples.

    ``draw(rng)`` returns one point; ``distance(P, Q)`` returns a float. A check is a
    violation only when it fails by more than ``slack``.
    """
    rng = np.random.default_rng(seed)
    rep = AxiomReport(n_triples=n_triples)
    for _ in range(n_triples):
        P1, P2, P3 = draw(rng), draw(rng), draw(rng)
        d12, d21 = float(distance(P1, P2)), float(distance(P2, P1))
        d13, d23 = float(distance(P1, P3)), float(distance(P2, P3))
        if min(d12, d21, d13, d23) < -slack:
            rep.positivity_violations += 1
        asym = abs(d12 - d21)
        if asym > slack:
            rep.symmetry_violations += 1
            if asym > rep.max_asymmetry:
                rep.max_asymmetry = asym
                rep.symmetry_example = (P1, P2, d12, d21)
        excess = d13 - (d12 + d23)
        if excess > slack:
            rep.triangle_violations += 1
            if excess > rep.max_triangle_excess:
                rep.max_triangle_excess = excess
                rep.triangle_example = (P1, P2, P3, d13, d12, d23)
    return rep


def kl_distance(g, p) -> float:
    """KL as a two-argument callable suitable for :func:`axiom_probe`."""
    return float(kl_discrete(g, p))


def random_discrete(k: int, concentration: float = 1.0):
    """Factory for :func:`axiom_probe` drawing Dirichlet distributions on ``k`` outcomes."""

    def draw(rng):
        probs = rng.dirichlet(np.full(k, concentration))
        probs = np.maximum(probs, 1e-12)
        probs /= probs.sum()
        # round-trip guard: DiscreteDistribution enforces the sum to 1e-12
        probs[-1] = 1.0 - math.fsum(probs[:-1])
        return DiscreteDistribution(probs)

    return draw
