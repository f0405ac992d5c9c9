"""Large-time space-time profiles built from the amplitude flow.

The approximate solution at time t and position x is

    u_j(t, x) = (2 i t)^(-1/2) exp(i x^2 / (4 t)) A_j(sgn(t) log|t| / 2, x / (2 t))

where A solves the amplitude flow with final data (alpha1, alpha2) sampled
on a grid of the similarity variable xi = x / (2 t).  The generic pipeline
evaluates the flow through the closed forms plus reconstruction when the
parameters are catalogued, and through the numerical oracle otherwise.

Two specialized, fully explicit profile formulas are provided for the pure
p1 family (synchronizing) and the pure p3 family (elliptic), and the
synchronization observable sqrt(t) * sup |gamma1 u1 + gamma2 u2| measures
the collapse predicted by a successful synchronization detection.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from . import elliptic as el
from .closed_form import UnsupportedCaseError, solve_case
from .quadratic_flow import amplitudes_to_quad, integrate_full
from .reconstruction import reconstruct

__all__ = [
    "ExtrapolationError",
    "FinalData",
    "case1_profile",
    "case3_profile",
    "sync_decay",
    "uapp",
]


class ExtrapolationError(ValueError):
    """Similarity variable outside the final-data grid."""


@dataclass(frozen=True)
class FinalData:
    """Final amplitude data on a grid of the similarity variable.

    Interpolation between nodes is complex-linear.
    """

    xi_grid: np.ndarray
    alpha1: np.ndarray
    alpha2: np.ndarray

    def __post_init__(self):
        xi = np.asarray(self.xi_grid, dtype=float)
        a1 = np.asarray(self.alpha1, dtype=complex)
        a2 = np.asarray(self.alpha2, dtype=complex)
        if xi.ndim != 1 or len(xi) < 2 or np.any(np.diff(xi) <= 0):
            raise ValueError("xi grid must be strictly increasing with >= 2 nodes")
        if a1.shape != xi.shape or a2.shape != xi.shape:
            raise ValueError("alpha arrays must match the grid")
        object.__setattr__(self, "xi_grid", xi)
        object.__setattr__(self, "alpha1", a1)
        object.__setattr__(self, "alpha2", a2)

    def interp(self, xi: float) -> tuple[complex, complex]:
        grid = self.xi_grid
        if xi < grid[0] or xi > grid[-1]:
            raise ExtrapolationError(f"xi = {xi} outside grid [{grid[0]}, {grid[-1]}]")
        a1 = complex(
            np.interp(xi, grid, self.alpha1.real), np.interp(xi, grid, self.alpha1.imag)
        )
        a2 = complex(
            np.interp(xi, grid, self.alpha2.real), np.interp(xi, grid, self.alpha2.imag)
        )
        return a1, a2

    def decay_constant(self) -> float:
        """Smallest C with |alpha1| + |alpha2| <= C (1 + xi^2)^-1 on the grid."""
        mag = np.abs(self.alpha1) + np.abs(self.alpha2)
        return float(np.max(mag * (1.0 + self.xi_grid**2)))


def _prefactor(t: float, x: float) -> complex:
    return cmath.exp(1j * x * x / (4.0 * t)) / cmath.sqrt(2j * t)


def _flow(params, a0: tuple[complex, complex], tau: float) -> tuple[complex, complex]:
    """Amplitude pair advanced by tau: closed form + reconstruction when the
    parameters are catalogued, numerical oracle otherwise."""
    if tau == 0.0 or (a0[0] == 0 and a0[1] == 0):
        return a0
    rho, s0 = amplitudes_to_quad(*a0)
    try:
        cf = solve_case(params, rho, s0)
    except UnsupportedCaseError:
        traj = integrate_full(params, a0, (0.0, tau), tol=1e-10)
        out = traj.at(tau)
        return complex(out[0]), complex(out[1])
    return reconstruct(params, a0, cf.eval, rho, tau)


def uapp(params, fd: FinalData, t: float, x: float) -> tuple[complex, complex]:
    """The approximate solution pair at (t, x) for t != 0."""
    if t == 0.0:
        raise ValueError("the profile is defined for t != 0")
    xi = x / (2.0 * t)
    a0 = fd.interp(xi)
    tau = 0.5 * math.copysign(1.0, t) * math.log(abs(t))
    a1, a2 = _flow(params, a0, tau)
    pref = _prefactor(t, x)
    return pref * a1, pref * a2


# ---------------------------------------------------------------------------
# specialized closed profiles


def case1_profile(p1: float, q, fd: FinalData, t: float, x: float) -> tuple[complex, complex]:
    """Fully explicit profile for the pure p1 family (p2 = ... = p5 = 0).

    Requires t > 1, alpha1 != 0 at the sampled xi, and |I0| bounded away
    from rho (at equality the family's denominators degenerate).
    """
    if p1 <= 0.0:
        raise ValueError("p1 must be positive")
    if t <= 1.0:
        raise ValueError("the explicit formula is stated for t > 1")
    q1, q2, q3 = (float(v) for v in q)
    xi = x / (2.0 * t)
    alpha1, alpha2 = fd.interp(xi)
    if alpha1 == 0:
        raise ValueError("the formula needs alpha1(xi) != 0")
    rho, (d0, r0, i0) = amplitudes_to_quad(alpha1, alpha2)
    if rho - abs(i0) <= 1e-12 * rho:
        raise ValueError("degenerate data: |I0| = rho")
    amp2 = math.sqrt(d0 * d0 + r0 * r0)  # = sqrt(rho^2 - I0^2) > 0

    tp = t**(p1 * rho)
    big_x = tp * (rho - i0)
    big_y = (rho + i0) / tp
    big_g = big_x + big_y

    unit_a1 = alpha1 / abs(alpha1)
    z1 = complex(r0, -(rho - i0 + d0))
    z2 = complex(r0, big_x + d0)
    u_factor = z1 * z2 / abs(z1 * z2)

    # phase from the conserved quadratic potential along the collapse
    sinh_w = (big_x - big_y) / (2.0 * amp2)
    cq = 0.5 * (q1 - q3) * d0 + q2 * r0
    phase = (
        -0.25 * (q1 + q3) * rho * math.log(t)
        - cq / (2.0 * p1 * amp2) * (math.atan(sinh_w) + math.atan(i0 / amp2))
    )
    phase_f = cmath.exp(1j * phase)

    pref = _prefactor(t, x)
    common = pref * unit_a1 * math.sqrt(rho / 2.0) * u_factor * phase_f
    u1 = common * math.sqrt(1.0 + 2.0 * d0 / big_g)
    u2 = (
        common
        * complex(2.0 * r0, -(big_x - big_y))
        / math.sqrt((big_g + 2.0 * d0) * big_g)
    )
    return u1, u2


def case3_profile(p3: float, q, fd: FinalData, t: float, x: float) -> tuple[complex, complex]:
    """Fully explicit profile for the pure p3 family, in Jacobi functions.

    Valid under the ordering 0 < omega2 < |omega1| < 1 of the two
    normalized invariants; outside it the representation needs case splits
    that are not provided here.
    """
    if p3 <= 0.0:
        raise ValueError("p3 must be positive")
    if t <= 1.0:
        raise ValueError("the explicit formula is stated for t > 1")
    q1, q2, q3 = (float(v) for v in q)
    xi = x / (2.0 * t)
    alpha1, alpha2 = fd.interp(xi)
    if alpha1 == 0:
        raise ValueError("the formula needs alpha1(xi) != 0")
    rho, (d0, r0, i0) = amplitudes_to_quad(alpha1, alpha2)
    if d0 == 0.0:
        raise ValueError("the formula needs D0 != 0")
    om1 = math.copysign(math.sqrt((i0 * i0 + 2.0 * d0 * d0) / (2.0 * rho * rho)), d0)
    om2 = math.sqrt((i0 * i0 + 2.0 * r0 * r0) / (2.0 * rho * rho))
    if not (0.0 < om2 < abs(om1) < 1.0):
        raise ValueError(
            f"ordering 0 < omega2 < |omega1| < 1 violated: omega1={om1:.6g}, omega2={om2:.6g}"
        )
    m = (om2 / om1) ** 2

    norm = math.sqrt(i0 * i0 + 2.0 * r0 * r0)
    t0 = el.invert_sn_cn(i0 / norm, math.sqrt(2.0) * r0 / norm, m)
    big_t = math.sqrt(2.0) * p3 * rho * om1 * math.log(t)

    sn_e, cn_e, dn_e = (float(v) for v in el.jacobi_sn_cn_dn(big_t + t0, m))

    # 2K-periodic phase integrand; exploit periodicity for large arguments
    period = 2.0 * el.complete_K(m)

    def integrand(sigma):
        sn_s, cn_s, dn_s = el.jacobi_sn_cn_dn(sigma + t0, m)
        return cn_s * cn_s / (1.0 + om1 * dn_s)

    n_per, rem = divmod(big_t, period)
    per_val, _ = quad(integrand, 0.0, period, epsabs=1e-12, epsrel=1e-12, limit=200)
    rem_val, _ = quad(integrand, 0.0, float(rem), epsabs=1e-12, epsrel=1e-12, limit=200)
    cn2_integral = float(n_per) * per_val + rem_val

    phase = (
        om2 * om2 / (math.sqrt(8.0) * om1) * cn2_integral
        - 0.25 * (q1 + q3) * rho * math.log(t)
        - (1.0 + 0.5 * (q1 - q3) / p3)
        / math.sqrt(8.0)
        * (el.jacobi_am(big_t + t0, m) - el.jacobi_am(t0, m))
        - q2 / (math.sqrt(8.0) * p3) * el.arcsin_clamped(om2 / om1 * sn_e)
        + q2 / (math.sqrt(8.0) * p3) * el.arcsin_clamped(
            math.copysign(1.0, d0) * i0 / math.sqrt(i0 * i0 + 2.0 * d0 * d0)
        )
    )
    phase_f = cmath.exp(1j * phase)

    pref = _prefactor(t, x)
    unit_a1 = alpha1 / abs(alpha1)
    common = pref * unit_a1 * math.sqrt(rho / 2.0) * phase_f
    root = math.sqrt(1.0 + om1 * dn_e)
    u1 = common * root
    u2 = common * om2 / root * complex(cn_e, math.sqrt(2.0) * sn_e)
    return u1, u2


# ---------------------------------------------------------------------------
# synchronization observable


def sync_decay(params, fd: FinalData, gamma, t: float, region) -> float:
    """sqrt(t) * max over grid points in ``region`` of |gamma . u(t, 2 t xi)|.

    ``region`` is a (xi_min, xi_max) interval; it must contain at least one
    grid node.  Under synchronization with the matching gamma pair this
    observable tends to zero along t -> infinity away from the exceptional
    directions.
    """
    if t <= 1.0:
        raise ValueError("the decay observable is defined for t > 1")
    g1, g2 = complex(gamma[0]), complex(gamma[1])
    xi_min, xi_max = region
    sel = (fd.xi_grid >= xi_min) & (fd.xi_grid <= xi_max)
    if not np.any(sel):
        raise ValueError("region contains no grid nodes")
    worst = 0.0
    for xi in fd.xi_grid[sel]:
        u1, u2 = uapp(params, fd, t, 2.0 * t * xi)
        worst = max(worst, abs(g1 * u1 + g2 * u2))
    return math.sqrt(t) * worst
