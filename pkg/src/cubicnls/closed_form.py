"""Exact solutions of the quadratic flow for the catalogued parameter families.

Fifteen families of standard parameters admit closed-form trajectories of
(D, R, I) built from elementary functions and Jacobi elliptic functions.
``classify`` recognizes the family, ``solve_case`` returns an evaluable
solution through a given initial state, and three reusable lemma solvers
cover the elliptic cores:

    lemma 1:  f' = g h,  g' = -f h,  h' = -f g
    lemma 2:  f' = g h,  g' = -f h,  h' = -f
    lemma 3:  f' = -g h, g' = f h,   h' = -(f + eta) g

Every branch constant is resolved from the initial state, and every
evaluator is validated against the adaptive Runge-Kutta oracle in the test
suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import elliptic as el
from .quadratic_flow import qqq_rhs
from .standard_form import TrivialSystemError

__all__ = [
    "CaseId",
    "ClosedFormSolution",
    "UnsupportedCaseError",
    "UnsupportedRatioError",
    "classify",
    "solve_case",
    "solve_lemma1",
    "solve_lemma2",
    "solve_lemma3",
]

_RTOL = 1e-12  # relative tolerance for the special parameter relations
_BRANCH_TOL = 1e-10  # relative width of the threshold-formula band

SUPPORTED_RATIOS = (1.0 / 3.0, 1.0, 3.0)


class UnsupportedCaseError(ValueError):
    """Parameters outside the catalogued closed-form families."""


class UnsupportedRatioError(UnsupportedCaseError):
    """A p1/p3 ratio whose closed form is not catalogued (only 1/3, 1, 3 are)."""


@dataclass(frozen=True)
class CaseId:
    """Catalogue tag: case number 1..15, or 0 for unsupported parameters."""

    case: int
    subcase: str = ""
    ratio: float | None = None


@dataclass(frozen=True)
class ClosedFormSolution:
    """Evaluable closed-form trajectory tau -> (D, R, I).

    ``constants`` records the resolved branch constants; ``branch`` names
    the formula family actually used (it is recomputable from the
    parameters, radius and initial state alone).
    """

    case_id: CaseId
    branch: str
    constants: dict
    rho: float
    initial: np.ndarray
    _eval: callable

    def __call__(self, tau):
        tau_arr = np.atleast_1d(np.asarray(tau, dtype=float))
        out = np.stack(self._eval(tau_arr), axis=-1)
        return out[0] if np.ndim(tau) == 0 else out

    eval = __call__


# ---------------------------------------------------------------------------
# classification


def _iszero(x: float, scale: float) -> bool:
    return abs(x) <= _RTOL * scale


def classify(params) -> CaseId:
    """Identify which catalogued family the parameters belong to.

    Pure families are matched before mixed ones; the special relations of
    the last five families are tested with relative tolerance 1e-12.
    Parameters outside the catalogue give case 0.
    """
    p1, p2, p3, p4, p5 = (float(x) for x in (params.p1, params.p2, params.p3, params.p4, params.p5))
    scale = max(abs(p1), abs(p2), abs(p3), abs(p4), abs(p5))
    if scale == 0.0:
        raise TrivialSystemError("all interaction parameters vanish")
    z1, z2, z3, z4, z5 = (_iszero(p, scale) for p in (p1, p2, p3, p4, p5))

    if not z1 and z2 and z3 and z4 and z5:
        return CaseId(1)
    if z1 and not z2 and z3 and z4 and z5:
        return CaseId(2)
    if z1 and z2 and not z3 and z4 and z5:
        return CaseId(3)
    if z1 and z2 and z3 and not z4 and z5:
        return CaseId(4)
    if not z1 and not z2 and z3 and z4 and z5:
        return CaseId(5)
    if not z1 and z2 and z3 and p4 > 0.0 and z5:
        if p1 > p4 * (1.0 + _RTOL):
            sub = "p1>p4"
        elif p4 > p1 * (1.0 + _RTOL):
            sub = "p1<p4"
        else:
            sub = "p1=p4"
        return CaseId(6, sub)
    if z1 and not z2 and not z3 and z4 and z5:
        if abs(abs(p2) - p3) <= _RTOL * scale:
            return CaseId(0, "degenerate |p2| = p3")
        if p2 < -p3:
            sub = "p2<-p3"
        elif p2 < p3:
            sub = "-p3<p2<p3"
        else:
            sub = "p2>p3"
        return CaseId(7, sub)
    if z1 and not z2 and z3 and p4 > 0.0 and z5:
        return CaseId(8)
    if z1 and z2 and not z3 and p4 > 0.0 and z5:
        return CaseId(9)
    if z1 and z2 and not z3 and z4 and p5 > 0.0:
        return CaseId(10)
    if not z1 and z2 and not z3 and z4 and z5:
        ratio = p1 / p3
        for target in SUPPORTED_RATIOS:
            if abs(ratio - target) <= _RTOL * max(ratio, target):
                return CaseId(11, f"ratio={target:g}", target)
        return CaseId(11, "ratio-unsupported", ratio)
    if z1 and p2 > 0.0 and not z3 and abs(p2 - p3) <= _RTOL * scale and not z4 and z5:
        return CaseId(12)
    if z1 and p2 < 0.0 and not z3 and abs(p2 + p3) <= _RTOL * scale and z4 and p5 > 0.0:
        return CaseId(13)
    if not z1 and not z2 and not z3 and abs(p1 * p1 + p2 * p2 - p3 * p3) <= _RTOL * p3 * p3:
        if z4 and z5:
            return CaseId(14)
        if p4 > 0.0 and p5 > 0.0 and abs(p5 * (p2 + p3) - p4 * p1) <= _RTOL * scale * scale:
            return CaseId(15)
    return CaseId(0)


# ---------------------------------------------------------------------------
# lemma solvers


def _constant(f0: float, g0: float, h0: float):
    def fgh(t):
        t = np.asarray(t, dtype=float)
        one = np.ones_like(t)
        return f0 * one, g0 * one, h0 * one

    return fgh


def solve_lemma1(f0: float, g0: float, h0: float):
    """Closed solution of f' = gh, g' = -fh, h' = -fg through (f0, g0, h0).

    f^2 + g^2 and f^2 + h^2 are conserved; the branch is decided by which
    radius dominates (the smaller-radius pair oscillates as sn/cn while the
    larger one follows dn, degenerating to tanh/sech at equal radii).
    """
    r_fg = math.hypot(f0, g0)
    r_fh = math.hypot(f0, h0)
    if r_fh < r_fg:
        inner = solve_lemma1(f0, h0, g0)

        def swapped(t):
            f, h, g = inner(t)
            return f, g, h

        return swapped

    if r_fg == 0.0:
        return _constant(0.0, 0.0, h0)
    if r_fh - r_fg <= _BRANCH_TOL * r_fh:
        if g0 == 0.0 and h0 == 0.0:
            return _constant(f0, 0.0, 0.0)
        # equal radii: |g0| = |h0| > 0
        sig = math.copysign(1.0, g0 * h0)
        t0 = math.atanh(min(1.0 - 1e-16, max(-1.0 + 1e-16, f0 / r_fh)))
        sg, sh = math.copysign(1.0, g0), math.copysign(1.0, h0)

        def hyperbolic(t):
            arg = sig * r_fh * np.asarray(t, dtype=float) + t0
            sech = 1.0 / np.cosh(arg)
            return r_fh * np.tanh(arg), sg * r_fh * sech, sh * r_fh * sech

        return hyperbolic

    m = (r_fg / r_fh) ** 2
    sig = math.copysign(1.0, h0)  # h0 != 0 since r_fh > r_fg
    t0 = el.invert_sn_cn(f0 / r_fg, g0 / r_fg, m)

    def elliptic_branch(t):
        sn, cn, dn = el.jacobi_sn_cn_dn(sig * r_fh * np.asarray(t, dtype=float) + t0, m)
        return r_fg * sn, r_fg * cn, sig * r_fh * dn

    return elliptic_branch


def solve_lemma2(f0: float, g0: float, h0: float):
    """Closed solution of f' = gh, g' = -fh, h' = -f through (f0, g0, h0).

    Here f = -h' and g = (h^2 - h0^2)/2 + g0; h itself is cn, sech or dn
    depending on the sign of h0^2 - 2(sqrt(f0^2 + g0^2) + g0).
    """
    if f0 == 0.0 and h0 == 0.0:
        return _constant(0.0, g0, 0.0)
    if f0 == 0.0 and g0 == 0.0:
        return _constant(0.0, 0.0, h0)

    rfg_sq = math.hypot(f0, g0)  # the conserved radius; the rate constant is its sqrt
    rate = math.sqrt(rfg_sq)
    p_sq = 0.5 * (rfg_sq - g0) + 0.25 * h0 * h0
    p = math.sqrt(p_sq)
    disc = h0 * h0 - 2.0 * (rfg_sq + g0)
    scale = max(h0 * h0, rfg_sq, p_sq)

    def with_g(h_fun, f_fun):
        def fgh(t):
            h = h_fun(t)
            return f_fun(t), 0.5 * (h * h - h0 * h0) + g0, h

        return fgh

    if abs(disc) <= _BRANCH_TOL * scale:
        # threshold: h0 = +-2P and the pulse is a sech
        sig = math.copysign(1.0, h0)
        t0 = math.copysign(1.0, f0 * h0) * _acosh_clamped(2.0 * p / abs(h0))

        def h_sech(t):
            return sig * 2.0 * p / np.cosh(p * np.asarray(t, dtype=float) + t0)

        def f_sech(t):
            arg = p * np.asarray(t, dtype=float) + t0
            return sig * 2.0 * p_sq * np.tanh(arg) / np.cosh(arg)

        return with_g(h_sech, f_sech)

    if disc < 0.0:
        m = p_sq / rfg_sq
        phi = el.arccos_clamped(h0 / (2.0 * p))
        if f0 < 0.0:
            phi = -phi
        t0 = el.incomplete_F(phi, m)

        def h_cn(t):
            _, cn, _ = el.jacobi_sn_cn_dn(rate * np.asarray(t, dtype=float) + t0, m)
            return 2.0 * p * cn

        def f_cn(t):
            sn, _, dn = el.jacobi_sn_cn_dn(rate * np.asarray(t, dtype=float) + t0, m)
            return 2.0 * p * rate * sn * dn

        return with_g(h_cn, f_cn)

    m = rfg_sq / p_sq
    sig = math.copysign(1.0, h0)
    sn_sq = (1.0 - (h0 / (2.0 * p)) ** 2) / m
    phi = el.arcsin_clamped(math.sqrt(min(max(sn_sq, 0.0), 1.0)))
    t0 = el.incomplete_F(phi, m)
    if f0 < 0.0:
        t0 = -t0

    def h_dn(t):
        _, _, dn = el.jacobi_sn_cn_dn(sig * p * np.asarray(t, dtype=float) + t0, m)
        return sig * 2.0 * p * dn

    def f_dn(t):
        sn, cn, _ = el.jacobi_sn_cn_dn(sig * p * np.asarray(t, dtype=float) + t0, m)
        return 2.0 * p_sq * m * sn * cn

    return with_g(h_dn, f_dn)


def _acosh_clamped(x: float) -> float:
    if x < 1.0:
        if x < 1.0 - 1e-9:
            raise el.EllipticDomainError(f"arccosh argument {x} below 1")
        x = 1.0
    return math.acosh(x)


def _sn_inversion(sn0: float, cn0: float, m: float) -> float:
    """Argument u with (sn, cn)(u, m) matching the (possibly off-circle) pair."""
    r = math.hypot(sn0, cn0)
    return float(el.incomplete_F(math.atan2(sn0 / r, cn0 / r), m))


def solve_lemma3(eta: float, f0: float, g0: float, h0: float):
    """Closed solution of f' = -gh, g' = fh, h' = -(f + eta) g, eta > 0.

    R = sqrt(f^2 + g^2) and K = h^2 - (f + eta)^2 are conserved; the branch
    catalogue splits on the sign of K and on R against eta +- sqrt(-K).
    Stationary initial data (the two axes and the line f = -eta, h = 0)
    short-circuit to constants, and h0 < 0 is handled through the symmetry
    (f, g, h) -> (f, -g, -h).
    """
    if eta <= 0.0:
        raise ValueError("eta must be positive")
    if g0 * h0 == 0.0 and f0 * h0 == 0.0 and (f0 + eta) * g0 == 0.0:
        return _constant(f0, g0, h0)
    if h0 < 0.0:
        inner = solve_lemma3(eta, f0, -g0, -h0)

        def mirrored(t):
            f, g, h = inner(t)
            return f, -g, -h

        return mirrored

    r0 = math.hypot(f0, g0)
    k0 = h0 * h0 - (f0 + eta) ** 2
    scale = max(r0, eta, abs(h0), abs(f0 + eta))

    if abs(k0) <= _BRANCH_TOL * scale * scale:
        return _lemma3_k_zero(eta, f0, g0, h0, r0)
    if k0 > 0.0:
        return _lemma3_k_positive(eta, f0, g0, h0, r0, k0)
    return _lemma3_k_negative(eta, f0, g0, h0, r0, k0, scale)


def _lemma3_k_positive(eta, f0, g0, h0, r0, k0):
    theta = (((r0 + eta) ** 2 + k0) * ((r0 - eta) ** 2 + k0)) ** 0.25
    xi = 2.0 * eta * r0 / (k0 + eta * eta + r0 * r0 + theta * theta)
    m0 = (theta * theta + r0 * r0 - k0 - eta * eta) / (2.0 * theta * theta)
    cn0 = (f0 + xi * r0) / (r0 + xi * f0)
    sn0 = g0 * (1.0 - xi * cn0) / (r0 * math.sqrt(1.0 - xi * xi))
    t0 = _sn_inversion(sn0, cn0, m0)
    root = math.sqrt(1.0 - xi * xi)

    def fgh(t):
        sn, cn, dn = el.jacobi_sn_cn_dn(theta * np.asarray(t, dtype=float) + t0, m0)
        den = 1.0 - xi * cn
        return r0 * (-xi + cn) / den, r0 * root * sn / den, theta * root * dn / den

    return fgh


def _lemma3_k_zero(eta, f0, g0, h0, r0):
    # the invariant surface splits into the two planes h = +-(f + eta)
    if f0 + eta > 0.0:
        if abs(r0 - eta) <= _BRANCH_TOL * max(r0, eta):
            t0 = g0 / h0

            def rational(t):
                lin = eta * np.asarray(t, dtype=float) + t0
                den = 1.0 + lin * lin
                h = 2.0 * eta / den
                return h - eta, 2.0 * eta * lin / den, h

            return rational
        if r0 < eta:
            om = math.sqrt(eta * eta - r0 * r0)
            cos0 = (eta - om * om / h0) / r0
            sin0 = g0 * om / (h0 * r0)
            t0 = math.atan2(sin0, cos0)

            def trig(t):
                arg = om * np.asarray(t, dtype=float) + t0
                den = eta - r0 * np.cos(arg)
                h = om * om / den
                return h - eta, r0 * om * np.sin(arg) / den, h

            return trig
        om = math.sqrt(r0 * r0 - eta * eta)
        t0 = math.copysign(1.0, g0) * _acosh_clamped((om * om / h0 + eta) / r0)

        def hyp(t):
            arg = om * np.asarray(t, dtype=float) + t0
            den = r0 * np.cosh(arg) - eta
            h = om * om / den
            return h - eta, r0 * om * np.sinh(arg) / den, h

        return hyp

    # f0 + eta < 0 forces r0 > eta; here h = -(f + eta)
    om = math.sqrt(r0 * r0 - eta * eta)
    t0 = -math.copysign(1.0, g0) * _acosh_clamped((om * om / h0 - eta) / r0)

    def hyp_neg(t):
        arg = om * np.asarray(t, dtype=float) + t0
        den = r0 * np.cosh(arg) + eta
        h = om * om / den
        return -eta - h, -r0 * om * np.sinh(arg) / den, h

    return hyp_neg


def _lemma3_k_negative(eta, f0, g0, h0, r0, k0, scale):
    kap = math.sqrt(-k0)
    tol = _BRANCH_TOL * scale

    if abs(r0 - (eta + kap)) <= tol:
        om = math.sqrt(r0 * (r0 - eta))
        sin_sq = (r0 - eta) * (r0 - f0) / (eta * (r0 + f0))
        sin0 = math.copysign(math.sqrt(min(max(sin_sq, 0.0), 1.0)), g0)
        cos0 = math.copysign(math.sqrt(max(0.0, 1.0 - sin0 * sin0)), h0)
        t0 = math.atan2(sin0, cos0)
        cg = 2.0 * r0 * math.sqrt(eta * (r0 - eta))
        ch = 2.0 * (r0 - eta) * math.sqrt(r0 * eta)

        def tangent_branch(t):
            arg = om * np.asarray(t, dtype=float) + t0
            s, c = np.sin(arg), np.cos(arg)
            den = r0 - eta * c * c
            return r0 - 2.0 * r0 * eta * s * s / den, cg * s / den, ch * c / den

        return tangent_branch

    if abs(r0 - (eta - kap)) <= tol:
        om = math.sqrt(r0 * (eta - r0))
        cosh_sq = r0 * (f0 + 2.0 * eta - r0) / (eta * (f0 + r0))
        t0 = math.copysign(1.0, g0) * _acosh_clamped(math.sqrt(max(cosh_sq, 1.0)))
        cg = 2.0 * r0 * math.sqrt(eta * (eta - r0))
        ch = 2.0 * (eta - r0) * math.sqrt(eta * r0)

        def pulse_branch(t):
            arg = om * np.asarray(t, dtype=float) + t0
            ch_a = np.cosh(arg)
            den = eta * ch_a * ch_a - r0
            return -r0 + 2.0 * r0 * (eta - r0) / den, cg * np.sinh(arg) / den, ch * ch_a / den

        return pulse_branch

    if r0 > eta + kap:
        a = r0 + eta + kap
        theta = 0.5 * math.sqrt((r0 + kap) ** 2 - eta * eta)
        m0 = ((r0 - kap) ** 2 - eta * eta) / ((r0 + kap) ** 2 - eta * eta)
        if f0 + eta < 0.0:
            # component with f <= -(eta + kap)
            b = r0 - eta - kap
            s_sq = a * (f0 + r0) / (b * (r0 - f0))
            sn0 = math.copysign(math.sqrt(min(max(s_sq, 0.0), 1.0)), g0)
            cn0 = math.copysign(math.sqrt(max(0.0, 1.0 - sn0 * sn0)), h0)
            t0 = _sn_inversion(sn0, cn0, m0)
            cg = 2.0 * r0 * math.sqrt(a * b)
            ch = a * math.sqrt((r0 - eta) ** 2 + k0)

            def outer_minus(t):
                # this component is traversed against the sn-parametrization
                sn, cn, dn = el.jacobi_sn_cn_dn(-theta * np.asarray(t, dtype=float) + t0, m0)
                den = a + b * sn * sn
                return r0 * (-a + b * sn * sn) / den, cg * sn / den, ch * cn * dn / den

            return outer_minus
        b2 = r0 + eta - kap
        s_sq = a * (f0 + eta - kap) / (b2 * (f0 + eta + kap))
        sn0 = math.copysign(math.sqrt(min(max(s_sq, 0.0), 1.0)), h0)
        cn0 = -math.copysign(math.sqrt(max(0.0, 1.0 - sn0 * sn0)), g0)
        t0 = _sn_inversion(sn0, cn0, m0)
        cg = a * math.sqrt(r0 * r0 - (eta - kap) ** 2)
        ch = 2.0 * kap * math.sqrt(a * b2)

        def outer_plus(t):
            sn, cn, dn = el.jacobi_sn_cn_dn(theta * np.asarray(t, dtype=float) + t0, m0)
            den = a - b2 * sn * sn
            f = -eta + kap * (a + b2 * sn * sn) / den
            return f, -cg * cn * dn / den, ch * sn / den

        return outer_plus

    if r0 > eta - kap:
        theta = math.sqrt(r0 * kap)
        m0 = (eta * eta - (r0 - kap) ** 2) / (4.0 * r0 * kap)
        b = r0 + eta - kap
        den0 = 2.0 * r0 * (r0 - eta + kap) / (f0 + r0)
        s_sq = (2.0 * r0 - den0) / b
        sn0 = -math.copysign(math.sqrt(min(max(s_sq, 0.0), 1.0)), h0)
        cn0 = math.copysign(math.sqrt(max(0.0, 1.0 - sn0 * sn0)), g0)
        t0 = _sn_inversion(sn0, cn0, m0)
        cg = 2.0 * r0 * math.sqrt(r0 * r0 - (eta - kap) ** 2)
        ch = 2.0 * theta * math.sqrt(r0 * r0 - (eta - kap) ** 2)

        def middle(t):
            sn, cn, dn = el.jacobi_sn_cn_dn(theta * np.asarray(t, dtype=float) + t0, m0)
            den = 2.0 * r0 - b * sn * sn
            return -r0 + 2.0 * r0 * (r0 - eta + kap) / den, cg * cn / den, -ch * sn * dn / den

        return middle

    theta = 0.5 * math.sqrt(eta * eta - (r0 - kap) ** 2)
    m0 = 4.0 * r0 * kap / (eta * eta - (r0 - kap) ** 2)
    b = r0 + eta - kap
    s_sq = (f0 + r0) * b / (2.0 * r0 * (f0 + eta - kap))
    sn0 = -math.copysign(math.sqrt(min(max(s_sq, 0.0), 1.0)), g0)
    cn0 = math.sqrt(max(0.0, 1.0 - sn0 * sn0))
    t0 = _sn_inversion(sn0, cn0, m0)
    cg = 2.0 * r0 * math.sqrt((eta - kap) ** 2 - r0 * r0)
    ch = b * math.sqrt((r0 - eta) ** 2 + k0)

    def inner_branch(t):
        sn, cn, dn = el.jacobi_sn_cn_dn(theta * np.asarray(t, dtype=float) + t0, m0)
        den = b - 2.0 * r0 * sn * sn
        return (
            -r0 + 2.0 * r0 * (eta - kap - r0) * sn * sn / den,
            -cg * sn * cn / den,
            ch * dn / den,
        )

    return inner_branch


# ---------------------------------------------------------------------------
# per-case builders


def _sphere_check(s0, rho: float) -> np.ndarray:
    s0 = np.asarray(s0, dtype=float)
    if abs(float(s0 @ s0) - rho * rho) > 1e-9 * max(1.0, rho * rho):
        raise ValueError("initial state is off the sphere")
    return s0


def solve_case(params, rho: float, s0) -> ClosedFormSolution:
    """Closed-form trajectory of the quadratic flow through s0.

    Raises UnsupportedCaseError when the parameters are outside the
    catalogue (use the numerical oracle instead) and UnsupportedRatioError
    for a p1/p3 family whose ratio has no catalogued formula.
    """
    case_id = classify(params)
    if case_id.case == 0:
        raise UnsupportedCaseError(
            f"no closed form for parameters {tuple(params.p)}; use integrate_quad"
        )
    if case_id.case == 11 and case_id.subcase == "ratio-unsupported":
        raise UnsupportedRatioError(
            f"p1/p3 = {case_id.ratio:g} has no catalogued closed form "
            "(only 1/3, 1 and 3 are integrated; others need higher-degree integrals)"
        )
    if rho <= 0.0:
        raise ValueError("rho must be positive")
    s0 = _sphere_check(s0, rho)

    pscale = max(float(np.max(np.abs(params.p))), 1e-300)
    if np.linalg.norm(qqq_rhs(params, rho, s0)) <= 1e-13 * rho * rho * pscale:
        d0, r0, i0 = s0

        def const_eval(t):
            one = np.ones_like(np.asarray(t, dtype=float))
            return d0 * one, r0 * one, i0 * one

        return ClosedFormSolution(case_id, "fixed-point", {}, rho, s0, const_eval)

    builder = _CASE_BUILDERS[case_id.case]
    branch, constants, fn = builder(params, rho, s0, case_id)
    return ClosedFormSolution(case_id, branch, constants, rho, s0, fn)


def _case1(params, rho, s0, case_id):
    return _case15_core(params.p1, 0.0, rho, s0)


def _case5(params, rho, s0, case_id):
    return _case15_core(params.p1, params.p2, rho, s0)


def _case15_core(p1, p2, rho, s0):
    """Shared closed form for the p1-only and p1/p2 families."""
    d0, r0, i0 = s0
    tau0 = math.atanh(min(1.0 - 1e-16, max(-1.0 + 1e-16, i0 / rho)))
    phase0 = math.atan2(r0, d0)
    la, lb = math.log(rho - i0), math.log(rho + i0)
    ratio = p2 / p1

    def fn(t):
        t = np.asarray(t, dtype=float)
        arg = 2.0 * p1 * rho * t - tau0
        sech = 1.0 / np.cosh(arg)
        if ratio == 0.0:
            phase = phase0
        else:
            phase = phase0 + ratio * (
                np.logaddexp(la + 2.0 * p1 * rho * t, lb - 2.0 * p1 * rho * t)
                - math.log(2.0 * rho)
            )
        return rho * np.cos(phase) * sech, rho * np.sin(phase) * sech, -rho * np.tanh(arg)

    return ("rotating-collapse" if p2 else "collapse"), {"tau0": tau0, "phase0": phase0}, fn


def _case2(params, rho, s0, case_id):
    d0, r0, i0 = s0
    w = 2.0 * params.p2 * i0

    def fn(t):
        ang = w * np.asarray(t, dtype=float)
        c, s = np.cos(ang), np.sin(ang)
        return d0 * c + r0 * s, -d0 * s + r0 * c, i0 * np.ones_like(ang)

    return "rotation", {"rate": w}, fn


def _case3(params, rho, s0, case_id):
    p3 = params.p3
    d0, r0, i0 = s0
    k = math.sqrt(8.0) * p3
    sol = solve_lemma1(2.0 * p3 * i0, k * r0, k * d0)

    def fn(t):
        f, g, h = sol(t)
        return h / k, g / k, f / (2.0 * p3)

    return "lemma1", {}, fn


def _case4(params, rho, s0, case_id):
    d0, r0, i0 = s0
    w = 2.0 * params.p4 * rho

    def fn(t):
        ang = w * np.asarray(t, dtype=float)
        c, s = np.cos(ang), np.sin(ang)
        return d0 * np.ones_like(ang), r0 * c - i0 * s, r0 * s + i0 * c

    return "rotation", {"rate": w}, fn


def _case6(params, rho, s0, case_id):
    p1, p4 = params.p1, params.p4
    d0, r0, i0 = s0
    mu = p4 / p1
    c1 = d0 * d0 + (r0 - mu * rho) ** 2
    c2 = -2.0 * rho * mu * (r0 - mu * rho)
    c3 = (1.0 - mu * mu) * rho * rho
    consts = {"C1": c1, "C2": c2, "C3": c3}

    if abs(c3) <= _BRANCH_TOL * rho * rho:
        # threshold p1 = p4: rational collapse onto (0, rho, 0)
        c2t = 2.0 * rho * (rho - r0)

        def fn_rat(t):
            lin = c2t * p1 * np.asarray(t, dtype=float) - i0
            den = lin * lin + c2t - i0 * i0
            e = c2t / den
            return e * d0, e * (r0 - rho) + rho, -c2t * lin / den

        return "p1=p4", consts, fn_rat

    if c3 > 0.0:
        w = math.sqrt(c2 * c2 + 4.0 * c1 * c3)
        tau0 = math.copysign(1.0, i0) * _acosh_clamped((2.0 * c3 + c2) / w)
        rt = math.sqrt(c3)

        def fn_cosh(t):
            arg = 2.0 * p1 * rt * np.asarray(t, dtype=float) - tau0
            den = w * np.cosh(arg) - c2
            e = 2.0 * c3 / den
            return e * d0, e * (r0 - mu * rho) + mu * rho, -rt * w * np.sinh(arg) / den

        return "p1>p4", consts, fn_cosh

    w = math.sqrt(c2 * c2 + 4.0 * c1 * c3)
    rt = math.sqrt(-c3)
    tau0 = -math.copysign(1.0, i0) * el.arccos_clamped((c2 + 2.0 * c3) / w)

    def fn_cos(t):
        arg = 2.0 * p1 * rt * np.asarray(t, dtype=float) + tau0
        den = c2 - w * np.cos(arg)
        e = -2.0 * c3 / den
        return e * d0, e * (r0 - mu * rho) + mu * rho, -rt * w * np.sin(arg) / den

    return "p1<p4", consts, fn_cos


def _case7(params, rho, s0, case_id):
    p2, p3 = params.p2, params.p3
    d0, r0, i0 = s0
    if p2 < -p3:
        cf = math.sqrt(8.0 * p3 * abs(p2 + p3))
        cg = math.sqrt(8.0 * p3 * (p3 - p2))
        ch = 2.0 * math.sqrt(p2 * p2 - p3 * p3)
        sol = solve_lemma1(-cf * d0, cg * r0, ch * i0)

        def fn(t):
            f, g, h = sol(t)
            return -f / cf, g / cg, h / ch

    elif p2 < p3:
        cf = 2.0 * math.sqrt(p3 * p3 - p2 * p2)
        cg = math.sqrt(8.0 * p3 * (p3 - p2))
        ch = math.sqrt(8.0 * p3 * (p2 + p3))
        sol = solve_lemma1(cf * i0, cg * r0, ch * d0)

        def fn(t):
            f, g, h = sol(t)
            return h / ch, g / cg, f / cf

    else:
        cf = math.sqrt(8.0 * p3 * (p2 - p3))
        cg = math.sqrt(8.0 * p3 * (p2 + p3))
        ch = 2.0 * math.sqrt(p2 * p2 - p3 * p3)
        sol = solve_lemma1(-cf * r0, cg * d0, ch * i0)

        def fn(t):
            f, g, h = sol(t)
            return g / cg, -f / cf, h / ch

    return "lemma1", {}, fn


def _case8(params, rho, s0, case_id):
    p2, p4 = params.p2, params.p4
    d0, r0, i0 = s0
    sol = solve_lemma2(
        4.0 * p2 * p4 * rho * r0, 4.0 * p4 * rho * (p2 * d0 + p4 * rho), -2.0 * p2 * i0
    )

    def fn(t):
        f, g, h = sol(t)
        return (g / (4.0 * p4 * rho) - p4 * rho) / p2, f / (4.0 * p2 * p4 * rho), -h / (2.0 * p2)

    return "lemma2", {}, fn


def _case9(params, rho, s0, case_id):
    p3, p4 = params.p3, params.p4
    d0, r0, i0 = s0
    rt2 = math.sqrt(2.0)
    eta = rt2 * p4 * rho
    sol = solve_lemma3(eta, 2.0 * rt2 * (p3 * d0 + 0.5 * p4 * rho), 2.0 * p3 * i0, 2.0 * rt2 * p3 * r0)

    def fn(t):
        f, g, h = sol(t)
        return (f / (2.0 * rt2) - 0.5 * p4 * rho) / p3, h / (2.0 * rt2 * p3), g / (2.0 * p3)

    return "lemma3", {"eta": eta}, fn


def _case10(params, rho, s0, case_id):
    p3, p5 = params.p3, params.p5
    d0, r0, i0 = s0
    rt2 = math.sqrt(2.0)
    eta = rt2 * p5 * rho
    sol = solve_lemma3(
        eta, -2.0 * rt2 * (p3 * r0 - 0.5 * p5 * rho), -2.0 * p3 * i0, 2.0 * rt2 * p3 * d0
    )

    def fn(t):
        f, g, h = sol(t)
        return h / (2.0 * rt2 * p3), (0.5 * p5 * rho - f / (2.0 * rt2)) / p3, -g / (2.0 * p3)

    return "lemma3", {"eta": eta}, fn


def _case11(params, rho, s0, case_id):
    ratio = case_id.ratio
    if ratio == 1.0:
        return _case11_balanced(params, rho, s0)
    if ratio == 3.0:
        return _case11_dominant(params, rho, s0)
    return _case11_recessive(params, rho, s0)


def _case11_balanced(params, rho, s0):
    p1 = params.p1
    d0, r0, i0 = s0
    c_plus = 0.5 * (d0 - r0) ** 2
    c_minus = 0.5 * (d0 + r0) ** 2
    big_l = math.sqrt(rho * rho - c_minus)
    tau0 = -math.atanh(i0 / big_l)
    amp = big_l / math.sqrt(c_plus)

    def fn(t):
        arg = 4.0 * p1 * big_l * np.asarray(t, dtype=float) + tau0
        s = amp / np.cosh(arg)
        mean = 0.5 * (d0 + r0)
        half = 0.5 * (d0 - r0)
        return mean + half * s, mean - half * s, -big_l * np.tanh(arg)

    return "ratio=1", {"L": big_l, "tau0": tau0}, fn


def _case11_dominant(params, rho, s0):
    p3 = params.p1 / 3.0
    d0, r0, i0 = s0
    w_big = math.sqrt(8.0 * rho * rho * (d0 - r0) ** 2 + (d0 + r0) ** 4)
    tau0 = -math.asinh(4.0 * rho * i0 / w_big)

    def fn(t):
        arg = 8.0 * p3 * rho * np.asarray(t, dtype=float) + tau0
        den = w_big * np.cosh(arg) + (d0 + r0) ** 2
        e4 = 4.0 * rho * rho / den
        e2 = 2.0 * rho / np.sqrt(den)
        mean = 0.5 * (d0 + r0)
        half = 0.5 * (d0 - r0)
        return mean * e2 + half * e4, mean * e2 - half * e4, -rho * w_big * np.sinh(arg) / den

    return "ratio=3", {"W": w_big, "tau0": tau0}, fn


def _case11_recessive(params, rho, s0):
    p3 = 3.0 * params.p1
    d0, r0, i0 = s0
    c_plus = 0.5 * (d0 - r0) ** 2
    c_minus = 0.5 * (d0 + r0) ** 2
    mean = 0.5 * (d0 + r0)
    half = 0.5 * (d0 - r0)
    scale = rho * rho

    if c_plus <= _BRANCH_TOL * scale:
        # d0 = r0: collapse onto the upper pole along the diagonal
        tau0 = math.atanh(i0 / rho)
        sig = math.copysign(1.0, d0)

        def fn_diag(t):
            arg = (4.0 / 3.0) * p3 * rho * np.asarray(t, dtype=float) + tau0
            d = sig * rho / (math.sqrt(2.0) * np.cosh(arg))
            return d, d.copy(), rho * np.tanh(arg)

        return "ratio=1/3 diag+", {"tau0": tau0}, fn_diag

    if c_minus <= _BRANCH_TOL * scale:
        tau0 = math.atanh(i0 / rho)
        sig = math.copysign(1.0, d0)

        def fn_anti(t):
            arg = (8.0 / 3.0) * p3 * rho * np.asarray(t, dtype=float) - tau0
            d = sig * rho / (math.sqrt(2.0) * np.cosh(arg))
            return d, -d, -rho * np.tanh(arg)

        return "ratio=1/3 diag-", {"tau0": tau0}, fn_anti

    alpha, beta, gamma = _depressed_cubic_roots(c_plus, rho * rho, c_minus)
    m0 = (gamma - beta) * (-alpha) / (gamma * (beta - alpha))
    theta = (4.0 / 3.0) * p3 * math.sqrt(c_plus * gamma * (beta - alpha))
    sn_sq = gamma * (1.0 - beta) / (gamma - beta)
    sn_sq = min(max(sn_sq, 0.0), 1.0)
    if i0 == 0.0:
        t0 = el.complete_K(m0) if sn_sq > 0.5 else 0.0
    else:
        t0 = math.copysign(1.0, i0) * el.incomplete_F(el.arcsin_clamped(math.sqrt(sn_sq)), m0)
    rate_i = math.sqrt(c_plus * gamma * (beta - alpha))

    def fn_gen(t):
        sn, cn, dn = el.jacobi_sn_cn_dn(theta * np.asarray(t, dtype=float) + t0, m0)
        den = gamma - (gamma - beta) * sn * sn
        w = beta * gamma / den
        i_val = rate_i * (gamma - beta) * sn * cn * dn / den
        return mean / np.sqrt(w) + half * w, mean / np.sqrt(w) - half * w, i_val

    return (
        "ratio=1/3 general",
        {"alpha": alpha, "beta": beta, "gamma": gamma, "m0": m0, "t0": t0},
        fn_gen,
    )


def _depressed_cubic_roots(c_plus: float, rho_sq: float, c_minus: float):
    """Roots alpha < 0 < beta <= 1 <= gamma of -c+ w^3 + rho^2 w - c- = 0.

    Solved by the trigonometric method for three real roots, with one Newton
    polish step per root.
    """
    # w^3 - (rho^2/c+) w + c-/c+ = 0, depressed with p = -rho^2/c+, q = c-/c+
    p = -rho_sq / c_plus
    q = c_minus / c_plus
    r = 2.0 * math.sqrt(-p / 3.0)
    arg = 3.0 * q / (p * r)
    phi = math.acos(min(1.0, max(-1.0, arg)))
    roots = sorted(r * math.cos((phi - 2.0 * math.pi * k) / 3.0) for k in range(3))

    def polish(w):
        f = -c_plus * w**3 + rho_sq * w - c_minus
        df = -3.0 * c_plus * w * w + rho_sq
        return w - f / df if df != 0.0 else w

    alpha, beta, gamma = (polish(w) for w in roots)
    return alpha, beta, gamma


def _case14(params, rho, s0, case_id):
    return _case1415_core(params, rho, s0, with_p4=False)


def _case15(params, rho, s0, case_id):
    return _case1415_core(params, rho, s0, with_p4=True)


def _case1415_core(params, rho, s0, with_p4: bool):
    p1, p2, p3, p4 = params.p1, params.p2, params.p3, params.p4
    d0, r0, i0 = s0
    theta_ang = math.atan2(p1, p2 + p3)
    sin_t, cos_t = math.sin(theta_ang), math.cos(theta_ang)
    cx = p2 * p4 / (2.0 * p1 * p3 * cos_t) if with_p4 else 0.0
    cy = p4 / (2.0 * p1 * cos_t) if with_p4 else 0.0
    x0 = d0 / (2.0 * sin_t) + r0 / (2.0 * cos_t) + cx * rho
    y0 = -d0 / (2.0 * sin_t) + r0 / (2.0 * cos_t) - cy * rho
    cap = (1.0 - (p4 / (2.0 * p3 * cos_t)) ** 2) * rho * rho if with_p4 else rho * rho
    disc = cap - x0 * x0
    consts = {"Theta": theta_ang, "X": x0, "Y": y0, "threshold": cap}

    def assemble(e_fun, i_fun):
        def fn(t):
            t = np.asarray(t, dtype=float)
            y = y0 * e_fun(t)
            d = sin_t * (x0 - y - (cx + cy) * rho)
            r = cos_t * (x0 + y - (cx - cy) * rho)
            return d * np.ones_like(t), r * np.ones_like(t), i_fun(t)

        return fn

    if abs(disc) <= _BRANCH_TOL * rho * rho:
        c0 = i0 * i0 + y0 * y0

        def e_rational(t):
            lin = 2.0 * p1 * t * c0 - i0
            return c0 / (lin * lin + y0 * y0)

        def i_rational(t):
            lin = 2.0 * p1 * np.asarray(t, dtype=float) * c0 - i0
            return -c0 * lin / (lin * lin + y0 * y0)

        return "|X| at threshold", consts, assemble(e_rational, i_rational)

    if disc > 0.0:
        r_c = math.sqrt(disc)
        ap = (r_c - i0) ** 2 + y0 * y0
        am = (r_c + i0) ** 2 + y0 * y0
        c0 = -2.0 * i0 * i0 - 2.0 * y0 * y0 + 2.0 * r_c * r_c

        def e_hyp(t):
            ex = np.exp(4.0 * p1 * r_c * np.asarray(t, dtype=float))
            return 4.0 * r_c * r_c / (ap * ex + am / ex + c0)

        def i_hyp(t):
            ex = np.exp(4.0 * p1 * r_c * np.asarray(t, dtype=float))
            return -r_c * (ap * ex - am / ex) / (ap * ex + am / ex + c0)

        return "|X| below threshold", consts, assemble(e_hyp, i_hyp)

    r_c = math.sqrt(-disc)
    c_sum = i0 * i0 + y0 * y0 + r_c * r_c
    c_dif = i0 * i0 + y0 * y0 - r_c * r_c

    def e_trig(t):
        ang = 4.0 * p1 * r_c * np.asarray(t, dtype=float)
        return 2.0 * r_c * r_c / (c_sum - 2.0 * r_c * i0 * np.sin(ang) - c_dif * np.cos(ang))

    def i_trig(t):
        ang = 4.0 * p1 * r_c * np.asarray(t, dtype=float)
        den = c_sum - 2.0 * r_c * i0 * np.sin(ang) - c_dif * np.cos(ang)
        return r_c * (2.0 * r_c * i0 * np.cos(ang) - c_dif * np.sin(ang)) / den

    return "|X| above threshold", consts, assemble(e_trig, i_trig)


def _case12(params, rho, s0, case_id):
    p3, p4 = params.p3, params.p4
    d0, r0, i0 = s0
    w = 2.0 * (2.0 * p3 * d0 + p4 * rho)

    def fn(t):
        ang = w * np.asarray(t, dtype=float)
        c, s = np.cos(ang), np.sin(ang)
        return d0 * np.ones_like(ang), r0 * c - i0 * s, r0 * s + i0 * c

    return "rotation", {"rate": w}, fn


def _case13(params, rho, s0, case_id):
    p3, p5 = params.p3, params.p5
    d0, r0, i0 = s0
    w = 2.0 * (2.0 * p3 * r0 - p5 * rho)

    def fn(t):
        ang = w * np.asarray(t, dtype=float)
        c, s = np.cos(ang), np.sin(ang)
        return d0 * c - i0 * s, r0 * np.ones_like(ang), d0 * s + i0 * c

    return "rotation", {"rate": w}, fn


_CASE_BUILDERS = {
    1: _case1,
    2: _case2,
    3: _case3,
    4: _case4,
    5: _case5,
    6: _case6,
    7: _case7,
    8: _case8,
    9: _case9,
    10: _case10,
    11: _case11,
    12: _case12,
    13: _case13,
    14: _case14,
    15: _case15,
}
