"""Momentum versus iteration count on a filter-bank denoising problem.

A 64x64 synthetic image is corrupted with Gaussian noise (sigma = 25) and
denoised with the non-convex log prior over 48 DCT filters.  A long
reference run estimates the limiting energy h*; then the iteration count
needed to reach h - h* <= 0.1 is reported for several extrapolation
factors beta.  More momentum means fewer iterations.

Run:  python3 demos/denoising_trend.py          (takes a few minutes)
"""

import numpy as np

from ipiano import LazyBacktrackingStep, StopCriterion, solve
from ipiano.problems import (GaussianNoise, add_noise, default_mrf_model,
                             mrf_objective, synthetic_image)


def main():
    noisy = add_noise(synthetic_image(64), GaussianNoise(25.0), seed=0)
    model = default_mrf_model(noisy.ravel(), noisy.shape, data_term="l2",
                              lam=0.05)
    obj = mrf_objective(model)
    x0 = noisy.ravel()

    print("reference run (beta = 0.8, 2500 iterations) ...")
    x_ref, _ = solve(obj, LazyBacktrackingStep(beta=0.8, L_init=1.0), x0,
                     StopCriterion(max_iters=2500))
    h_star = obj.value(x_ref)
    print(f"estimated limiting energy h* = {h_star:.4f}\n")

    print("iterations until h - h* <= 0.1:")
    for beta in (0.0, 0.4, 0.8):
        _, trace = solve(obj, LazyBacktrackingStep(beta=beta, L_init=1.0), x0,
                         StopCriterion(max_iters=12000, tol_energy=0.1,
                                       target_energy=h_star))
        print(f"  beta = {beta:4.2f}: {len(trace):5d} iterations")


if __name__ == "__main__":
    main()
