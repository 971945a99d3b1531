"""Effect of the inertial term on a 2-D non-convex toy problem.

The objective 0.5 * sum log(1 + 100 (x_i - 1)^2) + ||x||_1 has four local
minimizers; only one of them is global.  This script sweeps a grid of
starting points and compares how often the plain forward-backward method
(beta = 0) versus the inertial method (beta = 0.75) reaches the global
minimizer.

Run:  python3 demos/toy_basins.py
"""

import numpy as np

from ipiano import ConstantStep, StopCriterion, solve
from ipiano.problems import ToyProblem, toy_objective, toy_stationary_points


def main():
    prob = ToyProblem()
    obj = toy_objective(prob)
    points = toy_stationary_points(prob)
    h_values = [obj.value(p) for p in points]
    h_global = min(h_values)

    print("local minimizers and their energies:")
    for p, h in sorted(zip(points, h_values), key=lambda t: t[1]):
        print(f"  x = ({p[0]:+.6f}, {p[1]:+.6f})   h = {h:.6f}")
    print()

    coords = np.linspace(-2.0, 3.0, 10)
    for beta in (0.0, 0.75):
        rule = ConstantStep(beta=beta, lipschitz=prob.lipschitz)
        reached = 0
        for y0 in coords:
            for x0 in coords:
                x, _ = solve(obj, rule, np.array([x0, y0]),
                             StopCriterion(max_iters=3000, tol_residual=1e-10))
                if obj.value(x) <= h_global + 1e-3:
                    reached += 1
        print(f"beta = {beta:4.2f}: {reached}/100 starts reach the global minimizer")


if __name__ == "__main__":
    main()
