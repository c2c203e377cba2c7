"""
Checking the guarantees empirically
===================================

Coverage: repeat the experiment many times and count how often each
method's bounds actually bracket the true value -- the rates should sit
at or above the nominal 90%.

Hardness: with identical ball-supported distributions, the empirical
estimate saturates near 1 in high dimension at small h (no meaningful
upper bound exists there), while at large h everything collapses under
the sqrt(2/pi)/h envelope.
"""

import numpy as np

from blurtv.experiments import ExperimentConfig, run_coverage, run_hardness_demo

cov = run_coverage(
    ExperimentConfig(experiment="coverage", trials=60, n=100, m=100, B=2000, seed=3),
    workers=2,
)
print("coverage over 60 trials (nominal level 0.90):")
for r in cov.rows:
    if r["quantity"] in ("ucb_coverage", "lcb_coverage"):
        print(f"  {r['method']:12s} {r['quantity']:13s} {r['value']:.3f}")

hard = run_hardness_demo(
    ExperimentConfig(
        experiment="hardness-demo", d_values=(1, 20), h_values=(0.05, 10.0), seed=4
    )
)
print("\nhardness regimes (P = Q uniform on the unit ball):")
for r in hard.rows:
    if r["quantity"] == "mc_estimate":
        print(f"  d={r['d']:2d} h={r['h']:5.2f}: estimate {r['value']:.3f}")
env = np.sqrt(2 / np.pi) / 10
print(f"  envelope at h=10: {env:.4f}")

# the full 500-trial study:
#   blurtv experiment --name coverage --out results/ --threads 2
#   blurtv experiment --name hardness-demo --out results/
