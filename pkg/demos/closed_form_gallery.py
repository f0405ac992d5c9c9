"""Tour of the closed-form catalogue.

For a handful of parameter families, solve the quadratic flow in closed
form through a random state on the sphere, cross-check against the
adaptive Runge-Kutta oracle, and print the sup deviation per family.
Writes the last trajectory to gallery_trajectory.csv.
"""

import numpy as np

from cubicnls.closed_form import classify, solve_case
from cubicnls.quadratic_flow import Trajectory, integrate_quad, random_sphere_states
from cubicnls.standard_form import StandardParams

FAMILIES = [
    ("synchronizing (pure p1)", StandardParams(1, 0, 0, 0, 0)),
    ("rotation (pure p2)", StandardParams(0, 0.8, 0, 0, 0)),
    ("elliptic (pure p3)", StandardParams(0, 0, 1.1, 0, 0)),
    ("decoupled (pure p4)", StandardParams(0, 0, 0, 0.9, 0)),
    ("competition p1/p4, oscillatory", StandardParams(0.5, 0, 0, 1.2, 0)),
    ("elliptic p2/p3 mixture", StandardParams(0, 0.4, 1.0, 0, 0)),
    ("pulse family p2/p4", StandardParams(0, 0.8, 0, 0.5, 0)),
    ("deformed elliptic p3/p4", StandardParams(0, 0, 1.0, 0.7, 0)),
    ("special ratio p1 = p3/3", StandardParams(1.0, 0, 3.0, 0, 0)),
    ("conserved-plane family", StandardParams(0.6, 0.8, 1.0, 0, 0)),
]


def main() -> None:
    rho = 1.0
    rng_seed = 2024
    print(f"{'family':34s} {'case':>4s}  {'sup |closed - oracle|':>22s}")
    for name, params in FAMILIES:
        s0 = random_sphere_states(rho, 1, rng_seed)[0]
        span = 5.0 / max(abs(v) for v in params.p)
        sol = solve_case(params, rho, s0)
        taus = np.linspace(-span, span, 81)
        dev = 0.0
        for sgn in (1.0, -1.0):
            tr = integrate_quad(params, rho, s0, (0.0, sgn * span), tol=1e-10)
            sel = taus * sgn >= 0
            dev = max(dev, float(np.max(np.abs(sol(taus[sel]) - tr.at(taus[sel])))))
        print(f"{name:34s} {classify(params).case:4d}  {dev:22.3e}")
        last = Trajectory(taus, sol(taus), "quad")
    last.write_csv("gallery_trajectory.csv")
    print("\nwrote gallery_trajectory.csv (last family, tau, D, R, I)")


if __name__ == "__main__":
    main()
