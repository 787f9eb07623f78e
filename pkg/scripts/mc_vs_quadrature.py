"""Monte Carlo Fisher estimates against quadrature over many seeds.

    python scripts/mc_vs_quadrature.py --seeds 50 --samples 100000
"""
import argparse

import numpy as np

from infogeom import fisher_monte_carlo, fisher_quadrature, make_gaussian, make_warped_gaussian


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--seeds", type=int, default=20)
    parser.add_argument("--samples", type=int, default=100_000)
    args = parser.parse_args()

    for fam, theta in [(make_gaussian(3, 1.0), np.array([0.2, -0.4, 0.9])),
                       (make_warped_gaussian(2, 0.7), np.array([0.5, -1.0]))]:
        quad = fisher_quadrature(fam, theta).entries
        z = []
        for seed in range(args.seeds):
            est = fisher_monte_carlo(fam, theta, args.samples, seed)
            z.append(np.max(np.abs(est.metric.entries - quad) / est.standard_errors))
        z = np.array(z)
        print(f"{fam.name}: max |z| per seed: median {np.median(z):.2f}, "
              f"worst {z.max():.2f}, seeds within 3 SE {np.sum(z <= 3)}/{len(z)}")


if __name__ == "__main__":
    main()
