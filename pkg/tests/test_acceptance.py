"""Exit criteria. Each test records one PASS/FAIL line (shown in the terminal summary)."""
import subprocess
import sys
import time

import numpy as np
import pytest

from infogeom.densities import make_complex_gaussian, make_gaussian, make_warped_gaussian
from infogeom.divergence import (
    axiom_probe,
    expansion_residuals,
    kl_discrete,
    kl_distance,
    kullback_number,
    random_discrete,
)
from infogeom.errors import UnsupportedForComplexError
from infogeom.fisher import (
    fisher_analytic,
    fisher_monte_carlo,
    fisher_quadrature,
    reparametrize_check,
    rescale,
)
from infogeom.geometry import check_lorentzian, signature
from infogeom.integrate import QuadratureSpec, integrate

EPS = [0.1, 0.05, 0.025]


def _random_theta(rng, d, radius):
    theta = rng.normal(size=d)
    return theta * radius * rng.uniform() / np.linalg.norm(theta)


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_c01_real_gaussian_metric(a, acceptance):
    fam = make_gaussian(3, a)
    start = time.perf_counter()
    g = fisher_quadrature(fam, np.array([0.4, -1.1, 0.7]) * a)
    elapsed = time.perf_counter() - start
    dev = float(np.max(np.abs(g.entries - np.eye(3) / a ** 2)))
    ok = acceptance(f"C1 real Gaussian metric a={a}", dev < 1e-6 and elapsed < 5,
                    f"max dev {dev:.2e} (tol 1e-6), {elapsed:.2f} s (< 5 s)")
    assert ok


def test_c02_complex_normalization(acceptance):
    fam = make_complex_gaussian(1.0)
    start = time.perf_counter()
    errs = []
    for t0 in (0.0, 0.5, 1.0):
        theta = np.array([t0, 0.0, 0.0, 0.0])
        spec = QuadratureSpec().resolved(fam.center(theta), fam.envelope_scale)
        errs.append(abs(complex(integrate(lambda X: fam.density(theta, X), 4, spec).value) - 1.0))
    elapsed = time.perf_counter() - start
    ok = acceptance("C2 complex Gaussian normalization", max(errs) < 1e-8 and elapsed < 10,
                    f"|int p - 1| = {[f'{e:.1e}' for e in errs]} (tol 1e-8), {elapsed:.2f} s (< 10 s)")
    assert ok


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_c03_lorentzian_metric(a, acceptance):
    rng = np.random.default_rng(int(a * 100))
    fam = make_complex_gaussian(a)
    theta = _random_theta(rng, 4, 2 * a)
    start = time.perf_counter()
    g = fisher_quadrature(fam, theta)
    rep = check_lorentzian(rescale(g, a * a), tol=1e-6)
    sig = signature(g)
    elapsed = time.perf_counter() - start
    ok = acceptance(f"C3 Lorentzian metric a={a}", rep.passed and sig.n_negative == 1 and elapsed < 30,
                    f"theta={np.round(theta, 3).tolist()} max residual {rep.max_residual:.2e} (tol 1e-6), "
                    f"signature {sig.signature}, {elapsed:.2f} s (< 30 s)")
    assert ok


def test_c04_obstruction_real_families(acceptance):
    rng = np.random.default_rng(4)
    families = [make_gaussian(1, 1.0), make_gaussian(3, 0.5), make_gaussian(3, 1.0), make_gaussian(3, 2.0),
                make_warped_gaussian(1, 1.0), make_warped_gaussian(3, 1.0)]
    worst = np.inf
    for fam in families:
        for _ in range(20):
            theta = rng.uniform(-2, 2, fam.param_dim) * fam.envelope_scale
            worst = min(worst, float(np.min(np.linalg.eigvalsh(fisher_quadrature(fam, theta).entries))))
    ok = acceptance("C4 real families positive definite", worst > 1e-9,
                    f"smallest eigenvalue {worst:.3e} over {len(families)} families x 20 theta (> 1e-9)")
    assert ok


def test_c05_expansion_link(acceptance):
    fam = make_gaussian(3, 1.0)
    theta, v = np.array([0.3, -0.2, 0.5]), np.array([1.0, -0.5, 0.25])
    rep = expansion_residuals(fam, theta, v, EPS, fisher_analytic(fam, theta))
    worst = max(abs(r) for r in rep.residuals)
    warped = make_warped_gaussian(1, 1.0, 0.1)
    rep_w = expansion_residuals(warped, [0.5], [1.0], EPS, fisher_analytic(warped, [0.5]))
    ok = acceptance("C5 expansion link", worst < 1e-10 and rep_w.fitted_order >= 2.5,
                    f"Gaussian max residual {worst:.1e} (tol 1e-10); warped order {rep_w.fitted_order:.3f} (>= 2.5)")
    assert ok


def test_c06_kl_closed_form(acceptance):
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(50):
        a = rng.uniform(0.5, 2.0)
        dim = int(rng.integers(1, 4))
        fam = make_gaussian(dim, a)
        base = rng.uniform(-2, 2, dim)
        step = _random_theta(rng, dim, 2 * a)
        got = kullback_number(fam, base + step, fam, base).value
        worst = max(worst, abs(got - step @ step / (2 * a * a)))
    ok = acceptance("C6 KL closed-form oracle", worst < 1e-8, f"max |I - |dtheta|^2/2a^2| = {worst:.1e} (tol 1e-8)")
    assert ok


def test_c07_reparametrization(acceptance):
    rng = np.random.default_rng(7)
    worst, n = 0.0, 0
    while n < 10:
        dim = 3 if n % 2 else 2
        J = rng.normal(size=(dim, dim))
        if np.linalg.cond(J) >= 100:
            continue
        fam = make_gaussian(dim, rng.uniform(0.5, 2.0))
        chk = reparametrize_check(fam, rng.uniform(-1, 1, dim), J, phi=rng.uniform(-1, 1, dim))
        worst = max(worst, chk.max_deviation)
        n += 1
    ok = acceptance("C7 reparametrization covariance", worst < 1e-6, f"max deviation {worst:.1e} (tol 1e-6)")
    assert ok


def test_c08_monte_carlo(acceptance):
    fam = make_gaussian(3, 1.0)
    theta = np.array([0.2, -0.4, 0.9])
    quad = fisher_quadrature(fam, theta).entries
    passes = 0
    for seed in range(20):
        est = fisher_monte_carlo(fam, theta, 100_000, seed)
        passes += bool(np.all(np.abs(est.metric.entries - quad) <= 3 * est.standard_errors))
    try:
        fisher_monte_carlo(make_complex_gaussian(1.0), np.zeros(4), 100_000, 0)
        refused = False
    except UnsupportedForComplexError:
        refused = True
    ok = acceptance("C8 Monte Carlo consistency", passes >= 18 and refused,
                    f"{passes}/20 seeds within 3 SE (>= 18); complex family refused: {refused}")
    assert ok


def test_c09_kl_non_metricity(acceptance):
    asym = abs(kl_discrete([0.25, 0.75], [0.5, 0.5]).value - kl_discrete([0.5, 0.5], [0.25, 0.75]).value)
    rep = axiom_probe(kl_distance, random_discrete(3), n_triples=1000, seed=9)
    ok = acceptance("C9 KL non-metricity",
                    asym > 1e-3 and rep.triangle_violations > 0 and rep.symmetry_violations > 0,
                    f"asymmetry {asym:.4f} (> 1e-3); probe: {rep.symmetry_violations} symmetry, "
                    f"{rep.triangle_violations} triangle violations in 1000 triples")
    assert ok


def test_c10_end_to_end(acceptance):
    start = time.perf_counter()
    default = subprocess.run([sys.executable, "-m", "infogeom", "verify-paper"], capture_output=True, text=True)
    elapsed = time.perf_counter() - start
    coarse = subprocess.run([sys.executable, "-m", "infogeom", "verify-paper", "--nodes", "4"],
                            capture_output=True, text=True)
    ok = acceptance("C10 verify-paper end to end",
                    default.returncode == 0 and coarse.returncode == 1 and elapsed < 120,
                    f"default exit {default.returncode} in {elapsed:.1f} s (< 120 s); --nodes 4 exit {coarse.returncode}")
    assert ok, default.stdout + default.stderr
