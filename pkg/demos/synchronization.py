"""Synchronization: one attracting state on the sphere and its observable.

Detects whether the quadratic flow collapses onto a single fixed point,
prints the decaying complex combination of the components, and follows the
sqrt(t)-weighted observable down a geometric time ladder.
"""

import math

import numpy as np

from cubicnls.profile import FinalData, sync_decay
from cubicnls.quadratic_flow import detect_sync
from cubicnls.standard_form import StandardParams

CANDIDATES = [
    ("pure p1", StandardParams(1, 0, 0, 0, 0)),
    ("p1/p2 mixture", StandardParams(1, 0.7, 0, 0, 0)),
    ("p1 > p4", StandardParams(1, 0, 0, 0.5, 0)),
    ("p1 < p4 (oscillatory)", StandardParams(0.5, 0, 0, 1.2, 0)),
    ("pure p2 (fixed circle)", StandardParams(0, 1, 0, 0, 0)),
    ("pure p4 (neutral)", StandardParams(0, 0, 0, 1, 0)),
]


def main() -> None:
    for name, params in CANDIDATES:
        res = detect_sync(params, 1.0)
        if res is None:
            print(f"{name:26s} -> no synchronization")
        else:
            g1, g2 = res.gamma
            print(
                f"{name:26s} -> collapses onto {np.round(res.point, 6)}, "
                f"decaying combination ({g1:.3f}) u1 + ({g2:.3f}) u2"
            )

    print("\nobservable sqrt(t) sup |gamma . u| for the pure p1 family:")
    xi = np.linspace(-2.0, 2.0, 41)
    env = 1.3 / (1.0 + 0.3 * xi**2)
    fd = FinalData(xi, env * np.exp(1j * 0.1 * xi), env * 0.45 * np.exp(-0.25j))
    params = StandardParams(1, 0, 0, 0, 0)
    gamma = detect_sync(params, 1.0).gamma
    for k in (2, 6, 10, 14, 18):
        t = math.e**k
        print(f"  t = e^{k:<3d} {sync_decay(params, fd, gamma, t, (-2.0, 2.0)):12.3e}")


if __name__ == "__main__":
    main()
