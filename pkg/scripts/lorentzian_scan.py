"""Scan the imaginary shift theta0 and the width a of the complex Gaussian.

Prints the raw quadrature metric diagonal, the a^2-rescaled Lorentzian residual and
the discarded imaginary residue for each point.

    python scripts/lorentzian_scan.py --nodes 32
"""
import argparse

import numpy as np

from infogeom import check_lorentzian, fisher_quadrature, make_complex_gaussian, rescale
from infogeom.integrate import QuadratureSpec


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--nodes", type=int, default=32)
    parser.add_argument("--widths", default="0.5,1,2")
    parser.add_argument("--shifts", default="0,0.5,1,1.5,2")
    args = parser.parse_args()
    spec = QuadratureSpec(nodes_per_axis=args.nodes)

    print(f"{'a':>5} {'theta0/a':>8} {'g00':>12} {'g11':>12} {'residual':>10} {'imag':>10}")
    for a in map(float, args.widths.split(",")):
        fam = make_complex_gaussian(a)
        for s in map(float, args.shifts.split(",")):
            g = fisher_quadrature(fam, [s * a, 0.0, 0.0, 0.0], spec)
            rep = check_lorentzian(rescale(g, a * a))
            print(f"{a:5.2f} {s:8.2f} {g.entries[0, 0]:12.8f} {g.entries[1, 1]:12.8f} "
                  f"{rep.max_residual:10.2e} {g.max_imag_discarded:10.2e}")


if __name__ == "__main__":
    main()
