"""
Distribution-free confidence bounds across bandwidths
=====================================================

For one realized dataset, compute the Monte Carlo lower/upper confidence
bounds at several bandwidths and compare them with the oracle curve. The
bounds hold with 90% probability with no assumptions on the distributions.
"""

import numpy as np

import blurtv as bt

beta, n, B, alpha = 1.0, 400, 10_000, 0.1
P = bt.gaussian_dist([beta], [[1.0]])
Q = bt.gaussian_dist([-beta], [[1.0]])
X = bt.sample_oracle(P, n, bt.substream(1, 0))
Y = bt.sample_oracle(Q, n, bt.substream(1, 1))
kernel = bt.gaussian_kernel(1)

print(f"{'h':>7} {'oracle':>8} {'estimate':>9} {'lcb':>7} {'ucb':>7}")
for h in np.geomspace(0.1, 10, 9):
    res = bt.bounds_monte_carlo(X, Y, kernel, h, alpha, B, seed=42)
    oracle = bt.oracle_blurred_tv_gaussian(P, Q, h)
    print(f"{h:7.3f} {oracle:8.4f} {res.estimate:9.4f} {res.lcb:7.4f} {res.ucb:7.4f}")

# other constructions on the same data, at one bandwidth:
h = 0.5
for name, res in [
    ("naive (quadrature)", bt.bounds_naive(X, Y, kernel, h, alpha)),
    ("uniform over h", bt.bounds_uniform(X, Y, kernel, h, alpha, h_star=h / 10)),
    ("bandwidth-adaptive", bt.bounds_adaptive(X, Y, kernel, h, alpha)),
    ("combined (UCB only)", bt.bounds_combined(X, Y, kernel, h, alpha, B=5000, seed=42)),
]:
    print(f"{name:22s} [{res.lcb:.4f}, {res.ucb:.4f}]")

# the paper-scale sweep with per-beta panels:
#   blurtv experiment --name fig2 --out results/
#   python plots/plot.py --figure fig2 --in results/fig2.csv --out fig2.png
