"""Signature, intervals and the Lorentzian target check for metric tensors."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .fisher import MetricTensor

NULL_TOL = 1e-12


def _entries(g) -> np.ndarray:
    G = np.asarray(g.entries if isinstance(g, MetricTensor) else g, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise InvalidArgumentError(f"metric must be square, got shape {G.shape}")
    return G


@dataclass(frozen=True)
class SignatureReport:
    n_negative: int
    n_zero: int
    n_positive: int
    eigenvalues: tuple
    zero_tolerance: float

    @property
    def signature(self):
        return (self.n_negative, self.n_zero, self.n_positive)

    def to_json(self):
        return {
            "n_negative": self.n_negative,
            "n_zero": self.n_zero,
            "n_positive": self.n_positive,
            "eigenvalues": list(self.eigenvalues),
            "zero_tolerance": self.zero_tolerance,
        }


@dataclass(frozen=True)
class IntervalResult:
    s_squared: float
    classification: str
    magnitude: float

    def to_json(self):
        return {"s_squared": self.s_squared, "classification": self.classification, "magnitude": self.magnitude}


@dataclass(frozen=True)
class LorentzianReport:
    passed: bool
    tol: float
    constraints: tuple  # (label, value, target, residual)

    def __bool__(self):
        return self.passed

    @property
    def max_residual(self) -> float:
        return max(c[3] for c in self.constraints)

    def to_json(self):
        return {
            "passed": self.passed,
            "tol": self.tol,
            "constraints": [
                {"constraint": c[0], "value": c[1], "target": c[2], "residual": c[3]} for c in self.constraints
            ],
        }


def signature(g, zero_tol: float | None = None) -> SignatureReport:
    """Count negative, zero and positive eigenvalues.

    With ``zero_tol=None`` the threshold is ``1e-9 * max|eigenvalue|``; an explicit
    ``zero_tol`` is absolute.
    """
    lam = np.linalg.eigvalsh(_entries(g))
    if zero_tol is None:
        tol = 1e-9 * float(np.max(np.abs(lam))) if lam.size else 1e-9
        tol = tol or 1e-9
    else:
        if not zero_tol > 0:
            raise InvalidArgumentError("zero_tol must be positive")
        tol = float(zero_tol)
    zero = np.abs(lam) < tol
    return SignatureReport(
        n_negative=int(np.sum((lam < 0) & ~zero)),
        n_zero=int(np.sum(zero)),
        n_positive=int(np.sum((lam > 0) & ~zero)),
        eigenvalues=tuple(float(v) for v in np.sort(lam)),
        zero_tolerance=tol,
    )


def _classify(s2: float) -> IntervalResult:
    if s2 > NULL_TOL:
        kind = "spacelike"
    elif s2 < -NULL_TOL:
        kind = "timelike"
    else:
        kind = "null"
    return IntervalResult(float(s2), kind, math.sqrt(abs(s2)))


def _vectors(G, A, B):
    A = np.asarray(A, dtype=float).reshape(-1)
    B = np.asarray(B, dtype=float).reshape(-1)
    if A.shape != (G.shape[0],) or B.shape != (G.shape[0],):
        raise InvalidArgumentError(f"vectors must have length {G.shape[0]}, got {A.size} and {B.size}")
    return A, B


def interval(g, A, B) -> IntervalResult:
    """Bilinear form ``g_{mu nu} A^mu B^nu`` of two position vectors.

    A negative form is classified timelike and its magnitude is ``sqrt(|s^2|)``.
    """
    G = _entries(g)
    A, B = _vectors(G, A, B)
    # averaging both contraction orders makes the result exactly symmetric in (A, B)
    return _classify(0.5 * (float(A @ G @ B) + float(B @ G @ A)))


def displacement_interval(g, A, B) -> IntervalResult:
    """Quadratic form of the displacement ``A - B``."""
    G = _entries(g)
    A, B = _vectors(G, A, B)
    D = A - B
    return _classify(float(D @ G @ D))


def metric_distance(g):
    """``(A, B) -> sqrt(|g(A-B, A-B)|)`` as a plain callable."""
    G = _entries(g)
    return lambda A, B: displacement_interval(G, A, B).magnitude


def check_lorentzian(g, tol: float = 1e-6) -> LorentzianReport:
    """Test a 4x4 metric against ``diag(-1, 1, 1, 1)`` constraint by constraint.

    The ten independent constraints are the four diagonal targets and the six
    upper off-diagonal zeros.
    """
    G = _entries(g)
    if G.shape != (4, 4):
        raise InvalidArgumentError(f"Lorentzian check needs a 4x4 metric, got {G.shape}")
    target = np.diag([-1.0, 1.0, 1.0, 1.0])
    rows = []
    for mu in range(4):
        for nu in range(mu, 4):
            value = float(G[mu, nu])
            rows.append((f"g{mu}{nu}", value, float(target[mu, nu]), abs(value - target[mu, nu])))
    passed = all(r[3] < tol for r in rows)
    return LorentzianReport(passed, tol, tuple(rows))
