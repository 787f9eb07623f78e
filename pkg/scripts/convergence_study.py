"""Quadrature convergence: error of the complex-Gaussian normalization and g00
against nodes per axis, for a few imaginary shifts. Uses a 1D slice (the density
factorizes), so the full node range runs in seconds.
"""
import numpy as np

from infogeom.integrate import QuadratureSpec, integrate


def axis_integral(theta0, nodes, a=1.0):
    def f(X):
        z = X[:, 0] - 1j * theta0
        p = np.exp(-z * z / (2 * a * a)) / np.sqrt(2 * np.pi * a * a)
        score = 1j * z / (a * a)
        return np.stack([p, p * score * score], axis=1)

    return integrate(f, 1, QuadratureSpec(nodes_per_axis=nodes, scale=a, center=(0.0,))).value


def main():
    print(f"{'theta0':>6} {'nodes':>5} {'|norm-1|':>10} {'|g00+1|':>10}")
    for theta0 in (0.5, 1.0, 2.0, 3.0):
        for nodes in (4, 8, 16, 24, 32, 64):
            norm, g00 = axis_integral(theta0, nodes)
            print(f"{theta0:6.2f} {nodes:5d} {abs(norm - 1):10.2e} {abs(g00 + 1):10.2e}")


if __name__ == "__main__":
    main()
