"""
How the bandwidth shapes the blurred TV distance
================================================

Sweep the bandwidth for a fixed pair of distributions and two kernels.
With a Gaussian kernel the curve decreases monotonically from the raw TV
value toward 0; with a trimodal kernel it is not monotone.
"""

import numpy as np

import blurtv as bt

P = bt.gaussian_dist([1.0], [[1.0]])
Q = bt.gaussian_dist([-1.0], [[1.0]])
hs = 0.05 * 1.1 ** np.arange(0, 61, 5)

print(f"raw TV (the h -> 0 limit): {bt.oracle_tv_gaussian(P, Q):.4f}\n")
print(f"{'h':>8}  {'gaussian kernel':>16}  {'trimodal kernel':>16}")
for h in hs:
    g = bt.oracle_blurred_tv_gaussian(P, Q, h)
    t = bt.oracle_blurred_tv_quadrature_1d(P, Q, bt.trimodal_kernel(), h)
    print(f"{h:8.3f}  {g:16.4f}  {t:16.4f}")

# the full 61-point sweep, written as a CSV the plots package can render:
#   blurtv experiment --name fig1 --out results/
#   python plots/plot.py --figure fig1 --in results/fig1.csv --out fig1.png
