"""Command-line front end.

Exit status: 0 success, 1 numeric failure (or a failed verify-paper check),
2 usage error. JSON reports are one object per run and embed the resolved config.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import densities, divergence, fisher, geometry
from .errors import InfogeomError
from .integrate import SCHEMES, QuadratureSpec

COMMANDS = ("entropy", "kl", "kullback", "fisher", "signature", "interval", "expansion", "verify-paper")
BACKENDS = ("analytic", "quadrature", "fd", "montecarlo")
METRIC_COMMANDS = ("fisher", "signature", "interval", "expansion")
DEFAULT_EPSILONS = (0.1, 0.05, 0.025)


@dataclass
class RunConfig:
    command: str
    family: Optional[str] = None
    family2: Optional[str] = None
    theta: Optional[list] = None
    theta2: Optional[list] = None
    v: Optional[list] = None
    epsilons: list = field(default_factory=lambda: list(DEFAULT_EPSILONS))
    backend: str = "quadrature"
    scheme: str = "gauss_hermite_tensor"
    nodes: int = 64
    radius: float = 8.0
    samples: int = 100_000
    seed: int = 0
    rescale: Optional[object] = None  # None, "a2" or a positive float
    zero_tol: Optional[float] = None
    a: float = 1.0
    output: str = "json"

    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(scheme=self.scheme, nodes_per_axis=self.nodes, truncation_radius=self.radius)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _floats(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}")


def _rescale(text):
    if text == "a2":
        return "a2"
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--rescale takes a positive number or 'a2', got {text!r}")
    if not (math.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError("--rescale must be positive")
    return value


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="infogeom", description="Entropies, Kullback numbers and Fisher metrics.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--family", help="gaussian:<dim>:<a> | complex-gaussian:<a> | "
                                         "warped-gaussian:<dim>:<a>[:<c>] | discrete:[p0,p1,...]")
    parser.add_argument("--family2", help="second family (kl, kullback)")
    parser.add_argument("--theta", type=_floats, help="comma list; write --theta=-1,0 for negative leading values")
    parser.add_argument("--theta2", type=_floats)
    parser.add_argument("--v", type=_floats, help="expansion direction")
    parser.add_argument("--epsilons", type=_floats)
    parser.add_argument("--backend", choices=BACKENDS, default="quadrature")
    parser.add_argument("--scheme", choices=SCHEMES, default="gauss_hermite_tensor")
    parser.add_argument("--nodes", type=_positive_int, default=64)
    parser.add_argument("--radius", type=float, default=8.0)
    parser.add_argument("--samples", type=_positive_int, default=100_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--rescale", type=_rescale)
    parser.add_argument("--zero-tol", type=float, dest="zero_tol")
    parser.add_argument("--a", type=float, default=1.0, help="envelope width for verify-paper")
    parser.add_argument("--output", choices=("json", "csv", "table"))
    return parser


def parse_args(argv) -> RunConfig:
    """Parse and validate ``argv``; usage problems exit with status 2."""
    parser = build_parser()
    ns = parser.parse_args(argv)
    cfg = RunConfig(
        command=ns.command, family=ns.family, family2=ns.family2, theta=ns.theta, theta2=ns.theta2,
        v=ns.v, epsilons=ns.epsilons or list(DEFAULT_EPSILONS), backend=ns.backend, scheme=ns.scheme,
        nodes=ns.nodes, radius=ns.radius, samples=ns.samples, seed=ns.seed, rescale=ns.rescale,
        zero_tol=ns.zero_tol, a=ns.a,
        output=ns.output or ("table" if ns.command == "verify-paper" else "json"),
    )
    try:
        cfg.quadrature()
    except InfogeomError as exc:
        parser.error(f"--nodes/--radius/--scheme: {exc}")
    if not (math.isfinite(cfg.a) and cfg.a > 0):
        parser.error("--a must be positive")
    if cfg.zero_tol is not None and not cfg.zero_tol > 0:
        parser.error("--zero-tol must be positive")
    if cfg.command == "verify-paper":
        return cfg

    if cfg.family is None:
        parser.error(f"--family is required for {cfg.command}")
    fams = []
    for flag, text in (("--family", cfg.family), ("--family2", cfg.family2)):
        if text is None:
            continue
        try:
            fams.append((flag, densities.parse_family(text)))
        except InfogeomError as exc:
            parser.error(f"{flag}: {exc}")
    discrete = cfg.command in ("entropy", "kl")
    for flag, fam in fams:
        if discrete != isinstance(fam, densities.DiscreteDistribution):
            want = "a discrete:[...] distribution" if discrete else "a parametric family"
            parser.error(f"{flag}: {cfg.command} needs {want}")
    if cfg.command == "kl" and cfg.family2 is None:
        parser.error("--family2 is required for kl")
    fam = fams[0][1]
    if cfg.command in METRIC_COMMANDS:
        if cfg.backend == "montecarlo" and (not fam.is_real_valued or fam.sampler is None):
            parser.error(f"--backend montecarlo: {fam.name} is complex-valued and cannot be sampled")
        if cfg.backend == "analytic" and fam.analytic_metric is None:
            parser.error(f"--backend analytic: {fam.name} has no analytic metric")
    if cfg.command in ("kullback", "expansion"):
        for flag, f in fams:
            if not f.is_real_valued:
                parser.error(f"{flag}: Kullback number is unsupported for complex family {f.name}")
    for flag, vec, f in (("--theta", cfg.theta, fam), ("--v", cfg.v, fam),
                         ("--theta2", cfg.theta2, fams[-1][1])):
        if vec is not None and not discrete and len(vec) != f.param_dim:
            parser.error(f"{flag}: expected {f.param_dim} values, got {len(vec)}")
    if cfg.command == "expansion":
        eps = cfg.epsilons
        if len(eps) < 3 or any(not 0 < e < 1 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
            parser.error("--epsilons: need >= 3 strictly descending values in (0, 1)")
    return cfg


# --------------------------------------------------------------------------
# Command implementations; each returns (result dict, csv rows)


def _theta(vec, fam):
    return np.zeros(fam.param_dim) if vec is None else np.asarray(vec, dtype=float)


def _rescale_factor(cfg, fam):
    if cfg.rescale is None:
        return None
    return fam.envelope_scale ** 2 if cfg.rescale == "a2" else float(cfg.rescale)


def _metric(cfg, fam, theta):
    if cfg.backend == "analytic":
        return fisher.fisher_analytic(fam, theta), None
    if cfg.backend == "montecarlo":
        est = fisher.fisher_monte_carlo(fam, theta, cfg.samples, cfg.seed)
        return est.metric, est
    source = "finite_difference" if cfg.backend == "fd" else "analytic"
    if source == "analytic" and fam.score is None:
        source = "finite_difference"
    return fisher.fisher_quadrature(fam, theta, cfg.quadrature(), score_source=source), None


def _metrics_for_report(cfg, fam, theta):
    g, est = _metric(cfg, fam, theta)
    factor = _rescale_factor(cfg, fam)
    reported = fisher.rescale(g, factor) if factor else g
    return g, reported, est


def cmd_entropy(cfg):
    p = densities.parse_family(cfg.family)
    bits = divergence.shannon_entropy(p, "bits")
    nats = divergence.shannon_entropy(p, "nats")
    return {"bits": bits, "nats": nats}, [{"bits": bits, "nats": nats}]


def cmd_kl(cfg):
    g = densities.parse_family(cfg.family)
    p = densities.parse_family(cfg.family2)
    fwd, rev = divergence.kl_discrete(g, p), divergence.kl_discrete(p, g)
    result = {"forward": fwd.to_json(), "reverse": rev.to_json()}
    rows = [{"direction": "forward", **fwd.to_json()}, {"direction": "reverse", **rev.to_json()}]
    return result, rows


def cmd_kullback(cfg):
    q = densities.parse_family(cfg.family)
    p = densities.parse_family(cfg.family2) if cfg.family2 else q
    val = divergence.kullback_number(q, _theta(cfg.theta, q), p, _theta(cfg.theta2, p), cfg.quadrature())
    return val.to_json(), [val.to_json()]


def cmd_fisher(cfg):
    fam = densities.parse_family(cfg.family)
    theta = _theta(cfg.theta, fam)
    g, reported, est = _metrics_for_report(cfg, fam, theta)
    result = {"metric": reported.to_json()}
    if reported is not g:
        result["raw_metric"] = g.to_json()
    if est is not None:
        result["standard_errors"] = np.asarray(est.standard_errors).tolist()
        result["sample_count"] = est.sample_count
    rows = []
    for mu in range(g.dim):
        for nu in range(g.dim):
            row = {"mu": mu, "nu": nu, "value": reported.entries[mu, nu]}
            if est is not None:
                row["standard_error"] = est.standard_errors[mu, nu]
            rows.append(row)
    return result, rows


def cmd_signature(cfg):
    fam = densities.parse_family(cfg.family)
    _, reported, _ = _metrics_for_report(cfg, fam, _theta(cfg.theta, fam))
    rep = geometry.signature(reported, cfg.zero_tol)
    rows = [{"index": i, "eigenvalue": lam} for i, lam in enumerate(rep.eigenvalues)]
    return {"metric": reported.to_json(), "signature": rep.to_json()}, rows


def cmd_interval(cfg):
    fam = densities.parse_family(cfg.family)
    A = _theta(cfg.theta, fam)
    B = _theta(cfg.theta2, fam)
    _, reported, _ = _metrics_for_report(cfg, fam, A)
    lit = geometry.interval(reported, A, B)
    disp = geometry.displacement_interval(reported, A, B)
    result = {"metric": reported.to_json(), "interval": lit.to_json(), "displacement_interval": disp.to_json()}
    rows = [{"form": "interval", **lit.to_json()}, {"form": "displacement", **disp.to_json()}]
    return result, rows


def cmd_expansion(cfg):
    fam = densities.parse_family(cfg.family)
    theta = _theta(cfg.theta, fam)
    v = np.ones(fam.param_dim) if cfg.v is None else np.asarray(cfg.v, dtype=float)
    g, _ = _metric(cfg, fam, theta)
    rep = divergence.expansion_residuals(fam, theta, v, cfg.epsilons, g, cfg.quadrature())
    order = None if math.isnan(rep.fitted_order) else rep.fitted_order
    return {"rows": rep.rows(), "fitted_order": order, "vgv": rep.quadform}, rep.rows()


# --------------------------------------------------------------------------
# verify-paper


def _check(name, passed, residual, tol, detail=""):
    return {"check": name, "status": "PASS" if passed else "FAIL",
            "residual": residual, "tolerance": tol, "detail": detail}


def _random_affine(rng, d, max_cond=100.0):
    while True:
        J = rng.normal(size=(d, d))
        if np.linalg.cond(J) < max_cond:
            return J


def run_verify_paper(cfg: RunConfig):
    """Run the whole verification battery; returns ``(exit_status, report)``."""
    a = cfg.a
    spec = cfg.quadrature()
    factor = a * a if cfg.rescale in (None, "a2") else float(cfg.rescale)
    rng = np.random.default_rng(cfg.seed)
    checks = []

    def guarded(name, tol, fn):
        try:
            checks.extend(fn())
        except InfogeomError as exc:
            checks.append(_check(name, False, None, tol, f"{type(exc).__name__}: {exc}"))

    def real_metric():
        fam = densities.make_gaussian(3, a)
        g = fisher.fisher_quadrature(fam, np.array([0.3, -0.7, 1.1]) * a, spec)
        dev = float(np.max(np.abs(g.entries - np.eye(3) / a ** 2)))
        scaled = fisher.rescale(g, factor)
        dev_s = float(np.max(np.abs(scaled.entries - np.eye(3))))
        lam = min(geometry.signature(g).eigenvalues)
        return [
            _check("gaussian3 metric = I/a^2", dev < 1e-6, dev, 1e-6, f"diag={np.diag(g.entries).tolist()}"),
            _check("gaussian3 metric rescaled = I", dev_s < 1e-6, dev_s, 1e-6,
                   f"factor={factor!r} diag={np.diag(scaled.entries).tolist()}"),
            _check("gaussian3 eigenvalues > 0", lam > 1e-9, lam, 1e-9, "real family cannot give g00 = -1"),
        ]

    def complex_normalization():
        fam = densities.make_complex_gaussian(a)
        out = []
        for t0 in (0.0, 0.5, 1.0):
            res = densities.normalization_check(fam, [t0 * a, 0.0, 0.0, 0.0], spec)
            err = abs(complex(res.value) - 1.0)
            out.append(_check(f"complex normalization theta0={t0 * a!r}", err < 1e-8, err, 1e-8,
                              f"integral={complex(res.value)!r}"))
        return out

    def complex_metric():
        fam = densities.make_complex_gaussian(a)
        theta = np.array([0.5, 0.2, -0.4, 0.1]) * a
        g = fisher.fisher_quadrature(fam, theta, spec)
        dev = float(np.max(np.abs(g.entries - np.diag([-1.0, 1, 1, 1]) / a ** 2)))
        scaled = fisher.rescale(g, factor)
        lor = geometry.check_lorentzian(scaled, 1e-6)
        sig = geometry.signature(g)
        return [
            _check("complex metric = diag(-1,1,1,1)/a^2", dev < 1e-6, dev, 1e-6,
                   f"raw diag={np.diag(g.entries).tolist()} imag_discarded={g.max_imag_discarded:.2e}"),
            _check("Lorentzian after rescale", lor.passed, lor.max_residual, 1e-6,
                   f"factor={factor!r} rescaled diag={np.diag(scaled.entries).tolist()}"),
            _check("complex signature (1,0,3)", sig.signature == (1, 0, 3), None, None,
                   f"eigenvalues={list(sig.eigenvalues)}"),
        ]

    def expansion():
        fam = densities.make_gaussian(1, a)
        rep = divergence.expansion_residuals(fam, [0.2 * a], [1.0], DEFAULT_EPSILONS,
                                             fisher.fisher_analytic(fam, [0.2 * a]), spec)
        worst = float(max(abs(r) for r in rep.residuals))
        warped = densities.make_warped_gaussian(1, a)
        theta = [0.5 * a]
        rep_w = divergence.expansion_residuals(warped, theta, [1.0], DEFAULT_EPSILONS,
                                               fisher.fisher_analytic(warped, theta), spec)
        order = rep_w.fitted_order
        return [
            _check("expansion exact for location Gaussian", worst < 1e-10, worst, 1e-10),
            _check("expansion residual order (warped)", order >= 2.5, order, 2.5,
                   f"residuals={rep_w.residuals}"),
        ]

    def reparam():
        fam = densities.make_gaussian(3, a)
        J = _random_affine(rng, 3)
        chk = fisher.reparametrize_check(fam, np.array([0.1, 0.2, -0.3]) * a, J, spec)
        return [_check("reparametrization covariance", chk.max_deviation < 1e-6, chk.max_deviation, 1e-6,
                       f"cond(J)={np.linalg.cond(J):.2f}")]

    def kl_nonmetric():
        rep = divergence.axiom_probe(divergence.kl_distance, divergence.random_discrete(3), 200, cfg.seed)
        ok = rep.symmetry_violations > 0 and rep.triangle_violations > 0 and rep.positivity_violations == 0
        return [_check("KL violates symmetry and triangle", ok, rep.max_triangle_excess, None,
                       f"symmetry={rep.symmetry_violations} triangle={rep.triangle_violations}")]

    guarded("gaussian3 metric", 1e-6, real_metric)
    guarded("complex normalization", 1e-8, complex_normalization)
    guarded("complex metric", 1e-6, complex_metric)
    guarded("expansion", 1e-10, expansion)
    guarded("reparametrization covariance", 1e-6, reparam)
    guarded("KL non-metricity", None, kl_nonmetric)
    status = 0 if all(c["status"] == "PASS" for c in checks) else 1
    return status, {"checks": checks, "passed": status == 0}


# --------------------------------------------------------------------------
# Rendering


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def render(cfg: RunConfig, result: dict, rows: list) -> str:
    if cfg.output == "json":
        payload = {"config": asdict(cfg), "result": result}
        return json.dumps(_jsonable(payload), sort_keys=True) + "\n"
    if cfg.output == "csv":
        buf = io.StringIO()
        fields = []
        for row in rows:
            fields.extend(k for k in row if k not in fields)
        writer = csv.DictWriter(buf, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            writer.writerow(_jsonable(row))
        return buf.getvalue()
    return _table(rows)


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    return "" if v is None else str(v)


def _table(rows):
    if not rows:
        return "\n"
    fields = []
    for row in rows:
        fields.extend(k for k in row if k not in fields)
    cells = [[_fmt(row.get(k)) for k in fields] for row in rows]
    widths = [max(len(f), *(len(c[i]) for c in cells)) for i, f in enumerate(fields)]
    line = lambda vals: "  ".join(v.ljust(w) for v, w in zip(vals, widths)).rstrip()
    out = [line(fields), line("-" * w for w in widths)] + [line(c) for c in cells]
    return "\n".join(out) + "\n"


HANDLERS = {
    "entropy": cmd_entropy,
    "kl": cmd_kl,
    "kullback": cmd_kullback,
    "fisher": cmd_fisher,
    "signature": cmd_signature,
    "interval": cmd_interval,
    "expansion": cmd_expansion,
}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if cfg.command == "verify-paper":
            start = time.perf_counter()
            status, result = run_verify_paper(cfg)
            rows = result["checks"]
            text = render(cfg, result, rows)
            if cfg.output == "table":
                n_fail = sum(c["status"] == "FAIL" for c in rows)
                text += (f"\n{len(rows) - n_fail}/{len(rows)} checks passed "
                         f"in {time.perf_counter() - start:.1f} s\n")
            sys.stdout.write(text)
            return status
        result, rows = HANDLERS[cfg.command](cfg)
    except InfogeomError as exc:
        print(f"infogeom: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(render(cfg, result, rows))
    return 0


if __name__ == "__main__":
    sys.exit(main())
