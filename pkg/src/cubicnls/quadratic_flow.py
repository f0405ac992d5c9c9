"""The quadratic flow of (D, R, I) on the sphere and the full complex flow.

For an amplitude pair (A1, A2) the quadratic quantities are

    rho = |A1|^2 + |A2|^2      (conserved)
    D   = |A1|^2 - |A2|^2
    R   = 2 Re(conj(A1) A2)
    I   = 2 Im(conj(A1) A2)

with D^2 + R^2 + I^2 = rho^2, so (D, R, I) lives on the sphere of radius
rho.  This module provides the polynomial right-hand sides, adaptive
Runge-Kutta oracles with dense output for both flows, fixed points with
their stability classification, and an empirical detector for the
synchronization scenario (a single attracting fixed point).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import root

from .standard_form import nonlinearity

__all__ = [
    "Circle",
    "FixedPointSet",
    "StabilityReport",
    "StiffnessError",
    "SyncResult",
    "Trajectory",
    "amplitudes_to_quad",
    "detect_sync",
    "fibonacci_sphere",
    "fixed_points",
    "flow_jacobian",
    "full_ode_rhs",
    "gamma_pair",
    "integrate_full",
    "integrate_quad",
    "qqq_rhs",
    "random_sphere_states",
    "stability",
]

ASYMPTOTICALLY_STABLE = "asymptotically_stable_sufficient"
INCONCLUSIVE = "inconclusive"


class StiffnessError(RuntimeError):
    """The adaptive integrator failed to advance (step underflow)."""


def amplitudes_to_quad(a1: complex, a2: complex) -> tuple[float, np.ndarray]:
    """(rho, (D, R, I)) of an amplitude pair."""
    cross = np.conj(a1) * a2
    rho = abs(a1) ** 2 + abs(a2) ** 2
    return float(rho), np.array(
        [abs(a1) ** 2 - abs(a2) ** 2, 2.0 * cross.real, 2.0 * cross.imag]
    )


def qqq_rhs(params, rho: float, s) -> np.ndarray:
    """Right-hand side of the quadratic flow at state s = (D, R, I).

    The returned vector is tangent to the sphere of radius rho at s, which
    is the differential form of rho-conservation.
    """
    d, r, i = np.asarray(s, dtype=float)
    p1, p2, p3, p4, p5 = params.p1, params.p2, params.p3, params.p4, params.p5
    return np.array(
        [
            2.0 * i * (p1 * d + (p2 - p3) * r) + 2.0 * rho * p5 * i,
            2.0 * i * (-(p2 + p3) * d + p1 * r) - 2.0 * rho * p4 * i,
            -2.0 * p1 * (d * d + r * r) + 4.0 * p3 * d * r + 2.0 * rho * (-p5 * d + p4 * r),
        ]
    )


def flow_jacobian(params, rho: float, s) -> np.ndarray:
    """Jacobian of the quadratic flow at s; its symmetric part restricted to
    the tangent plane decides the sufficient stability condition."""
    d, r, i = np.asarray(s, dtype=float)
    p1, p2, p3, p4, p5 = params.p1, params.p2, params.p3, params.p4, params.p5
    return np.array(
        [
            [2.0 * p1 * i, 2.0 * (p2 - p3) * i, 2.0 * p1 * d + 2.0 * (p2 - p3) * r + 2.0 * p5 * rho],
            [-2.0 * (p2 + p3) * i, 2.0 * p1 * i, -2.0 * (p2 + p3) * d + 2.0 * p1 * r - 2.0 * p4 * rho],
            [-4.0 * p1 * d + 4.0 * p3 * r - 2.0 * p5 * rho, -4.0 * p1 * r + 4.0 * p3 * d + 2.0 * p4 * rho, 0.0],
        ]
    )


def full_ode_rhs(params, a) -> np.ndarray:
    """Derivative of the complex amplitude pair: (-i F1, -i F2)."""
    a1, a2 = complex(a[0]), complex(a[1])
    f1, f2 = nonlinearity(params, a1, a2)
    return np.array([-1j * f1, -1j * f2])


# ---------------------------------------------------------------------------
# trajectories


class Trajectory:
    """Time-stamped states with dense interpolation between the stored nodes.

    ``kind`` is "quad" for real (D, R, I) states and "amplitude" for complex
    (A1, A2) states.  Evaluation at a stored node returns the stored state
    exactly.
    """

    def __init__(self, times, states, kind, dense=None):
        self.times = np.asarray(times, dtype=float)
        self.states = np.asarray(states)
        self.kind = kind
        self._dense = dense

    def at(self, tau):
        """State at tau (scalar -> 1-d state, array -> stacked states)."""
        taus = np.atleast_1d(np.asarray(tau, dtype=float))
        if self._dense is None:
            raise ValueError("trajectory carries no dense interpolant")
        raw = np.atleast_2d(self._dense(taus))  # (dim, n)
        if self.kind == "amplitude":
            out = np.stack([raw[0] + 1j * raw[1], raw[2] + 1j * raw[3]], axis=-1)
        else:
            out = raw.T
        # stored nodes reproduce stored states exactly
        for j, t in enumerate(taus):
            hit = np.nonzero(self.times == t)[0]
            if hit.size:
                out[j] = self.states[hit[0]]
        return out[0] if np.ndim(tau) == 0 else out

    def resampled(self, taus) -> "Trajectory":
        taus = np.asarray(taus, dtype=float)
        return Trajectory(taus, self.at(taus), self.kind, self._dense)

    def write_csv(self, path) -> None:
        """CSV with one row per stored node, 17 significant digits, LF endings."""
        if self.kind == "amplitude":
            header = "tau,re_a1,im_a1,re_a2,im_a2"
            rows = (
                (t, s[0].real, s[0].imag, s[1].real, s[1].imag)
                for t, s in zip(self.times, self.states)
            )
        else:
            header = "tau,D,R,I"
            rows = ((t, s[0], s[1], s[2]) for t, s in zip(self.times, self.states))
        with open(path, "w", newline="\n") as fh:
            fh.write(header + "\n")
            for row in rows:
                fh.write(",".join(f"{x:.17g}" for x in row) + "\n")


def _check_tol(tol: float) -> float:
    tol = float(tol)
    if not (1e-13 <= tol <= 1e-4):
        raise ValueError(f"tolerance {tol} outside [1e-13, 1e-4]")
    return tol


def _check_sphere(s, rho: float, tol: float = 1e-9) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    err = abs(float(s @ s) - rho * rho)
    if err > tol * max(1.0, rho * rho):
        raise ValueError(f"state is off the sphere of radius {rho} by {err:.3g}")
    return s


def _run_ivp(fun, span, y0, tol, t_eval=None):
    sol = solve_ivp(
        fun, span, y0, method="RK45", rtol=tol, atol=tol, dense_output=True, t_eval=t_eval
    )
    if not sol.success:
        raise StiffnessError(sol.message)
    return sol


def integrate_quad(params, rho: float, s0, span, tol: float = 1e-10) -> Trajectory:
    """Adaptive RK45 oracle of the quadratic flow, with dense output.

    The state is not renormalized onto the sphere: conservation of rho is an
    observable of the test suite, not enforced by the integrator.  s0 is the
    state at span[0].
    """
    if rho < 0.0:
        raise ValueError("rho must be nonnegative")
    tol = _check_tol(tol)
    s0 = _check_sphere(s0, rho)
    if rho == 0.0:
        if np.any(s0 != 0.0):
            raise ValueError("rho = 0 admits only the zero state")
        times = np.asarray(span, dtype=float)
        return Trajectory(times, np.zeros((len(times), 3)), "quad", lambda t: np.zeros((3, len(t))))
    sol = _run_ivp(lambda t, y: qqq_rhs(params, rho, y), span, s0, tol)
    return Trajectory(sol.t, sol.y.T, "quad", sol.sol)


def integrate_full(params, a0, span, tol: float = 1e-10) -> Trajectory:
    """Adaptive RK45 oracle of the full complex flow (same contract as
    :func:`integrate_quad`, over C^2)."""
    tol = _check_tol(tol)
    a0 = np.asarray(a0, dtype=complex)
    y0 = np.array([a0[0].real, a0[0].imag, a0[1].real, a0[1].imag])

    def fun(t, y):
        da = full_ode_rhs(params, (y[0] + 1j * y[1], y[2] + 1j * y[3]))
        return [da[0].real, da[0].imag, da[1].real, da[1].imag]

    sol = _run_ivp(fun, span, y0, tol)
    states = sol.y[0] + 1j * sol.y[1], sol.y[2] + 1j * sol.y[3]
    return Trajectory(sol.t, np.stack(states, axis=-1), "amplitude", sol.sol)


# ---------------------------------------------------------------------------
# fixed points


@dataclass(frozen=True)
class Circle:
    """A circle of fixed points, stored as center, unit axis and radius."""

    center: tuple[float, float, float]
    axis: tuple[float, float, float]
    radius: float

    def samples(self, n: int = 16) -> np.ndarray:
        axis = np.asarray(self.axis)
        seed = np.array([1.0, 0.0, 0.0])
        if abs(axis @ seed) > 0.9:
            seed = np.array([0.0, 1.0, 0.0])
        e1 = seed - (seed @ axis) * axis
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(axis, e1)
        ang = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
        return np.asarray(self.center) + self.radius * (
            np.outer(np.cos(ang), e1) + np.outer(np.sin(ang), e2)
        )


@dataclass
class FixedPointSet:
    points: list
    circles: list

    def all_points(self, circle_samples: int = 16) -> list:
        out = list(self.points)
        for c in self.circles:
            out.extend(c.samples(circle_samples))
        return out


def _dedup(points, tol):
    out = []
    for p in points:
        if all(np.linalg.norm(p - q) > tol for q in out):
            out.append(p)
    return out


def fibonacci_sphere(n: int, rho: float = 1.0) -> np.ndarray:
    """n nearly uniform points on the sphere of radius rho."""
    i = np.arange(n)
    z = 1.0 - 2.0 * (i + 0.5) / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    ang = i * math.pi * (3.0 - math.sqrt(5.0))
    return rho * np.stack([r * np.cos(ang), r * np.sin(ang), z], axis=-1)


def random_sphere_states(rho: float, n: int, seed: int) -> np.ndarray:
    """Seeded uniform states on the sphere of radius rho."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((n, 3))
    return rho * v / np.linalg.norm(v, axis=1, keepdims=True)


def _numeric_fixed_points(params, rho: float) -> list:
    """Multi-start root finding of the flow on the sphere (64 lattice starts)."""
    pscale = max(float(np.max(np.abs(params.p))), 1e-300)
    found = []

    def on_sphere(ang):
        th, ph = ang
        return rho * np.array(
            [math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)]
        )

    def tangential(ang):
        s = on_sphere(ang)
        f = qqq_rhs(params, rho, s)
        n_hat = s / rho
        e1 = np.array([-math.sin(ang[1]), math.cos(ang[1]), 0.0])
        e2 = np.cross(n_hat, e1)
        return [f @ e1, f @ e2]

    for start in fibonacci_sphere(64, rho):
        th0 = math.acos(np.clip(start[2] / rho, -1.0, 1.0))
        ph0 = math.atan2(start[1], start[0])
        res = root(tangential, [th0, ph0], method="hybr", tol=1e-12)
        if not res.success:
            continue
        s = on_sphere(res.x)
        if np.linalg.norm(qqq_rhs(params, rho, s)) <= 1e-9 * rho * rho * pscale:
            found.append(s)
    return _dedup(found, 1e-6 * rho)


def fixed_points(params, rho: float) -> FixedPointSet:
    """Fixed points of the quadratic flow on the sphere of radius rho.

    For the catalogued parameter families the analytic sets are returned
    (continua as Circle descriptors).  Anything else falls back to seeded
    multi-start numerical root finding, which returns isolated points only.
    """
    from .closed_form import classify  # local import to avoid a cycle

    if rho <= 0.0:
        raise ValueError("rho must be positive")
    p1, p2, p3, p4, p5 = (float(x) for x in params.p)
    case = classify(params).case
    pts = []
    circles = []
    z = rho * np.array([0.0, 0.0, 1.0])
    x = rho * np.array([1.0, 0.0, 0.0])
    y = rho * np.array([0.0, 1.0, 0.0])

    if case in (1, 5):
        pts = [z, -z]
    elif case == 2:
        pts = [z, -z]
        circles = [Circle((0.0, 0.0, 0.0), (0.0, 0.0, 1.0), rho)]
    elif case in (3, 7):
        pts = [x, -x, y, -y, z, -z]
    elif case == 4:
        pts = [x, -x]
    elif case == 6:
        if p1 > p4:
            w = rho * math.sqrt(1.0 - (p4 / p1) ** 2)
            pts = [np.array([0.0, p4 / p1 * rho, w]), np.array([0.0, p4 / p1 * rho, -w])]
        elif p1 == p4:
            pts = [y]
        else:
            w = rho * math.sqrt(1.0 - (p1 / p4) ** 2)
            pts = [np.array([w, p1 / p4 * rho, 0.0]), np.array([-w, p1 / p4 * rho, 0.0])]
    elif case == 8:
        pts = [x, -x]
        if abs(p2) >= p4:
            w = rho * math.sqrt(1.0 - (p4 / p2) ** 2)
            pts += [np.array([-p4 / p2 * rho, 0.0, w]), np.array([-p4 / p2 * rho, 0.0, -w])]
    elif case == 9:
        pts = [x, -x]
        if p4 <= 2.0 * p3:
            w = rho * math.sqrt(1.0 - (p4 / (2.0 * p3)) ** 2)
            pts += [np.array([-p4 / (2 * p3) * rho, w, 0.0]), np.array([-p4 / (2 * p3) * rho, -w, 0.0])]
        if p4 <= p3:
            w = rho * math.sqrt(1.0 - (p4 / p3) ** 2)
            pts += [np.array([-p4 / p3 * rho, 0.0, w]), np.array([-p4 / p3 * rho, 0.0, -w])]
    elif case == 10:
        pts = [y, -y]
        if p5 <= 2.0 * p3:
            w = rho * math.sqrt(1.0 - (p5 / (2.0 * p3)) ** 2)
            pts += [np.array([w, p5 / (2 * p3) * rho, 0.0]), np.array([-w, p5 / (2 * p3) * rho, 0.0])]
        if p5 <= p3:
            w = rho * math.sqrt(1.0 - (p5 / p3) ** 2)
            pts += [np.array([0.0, p5 / p3 * rho, w]), np.array([0.0, p5 / p3 * rho, -w])]
    elif case == 11:
        pts = [z, -z]
        if p1 == p3:
            circles = [Circle((0.0, 0.0, 0.0), tuple(np.array([1.0, -1.0, 0.0]) / math.sqrt(2)), rho)]
        elif p1 < p3:
            # equilibria in the I = 0 plane: p1 (D^2 + R^2) = 2 p3 D R
            for ratio in (
                (p3 + math.sqrt(p3 * p3 - p1 * p1)) / p1,
                (p3 - math.sqrt(p3 * p3 - p1 * p1)) / p1,
            ):
                d = rho * ratio / math.hypot(ratio, 1.0)
                r = rho / math.hypot(ratio, 1.0)
                pts += [np.array([d, r, 0.0]), np.array([-d, -r, 0.0])]
    elif case == 12:
        pts = [x, -x]
        if 2.0 * p3 > abs(p4):
            w = rho * math.sqrt(1.0 - (p4 / (2.0 * p3)) ** 2)
            circles = [Circle((-p4 / (2 * p3) * rho, 0.0, 0.0), (1.0, 0.0, 0.0), w)]
    elif case == 13:
        pts = [y, -y]
        if 2.0 * p3 > p5:
            w = rho * math.sqrt(1.0 - (p5 / (2.0 * p3)) ** 2)
            circles = [Circle((0.0, p5 / (2 * p3) * rho, 0.0), (0.0, 1.0, 0.0), w)]
    else:
        pts = _numeric_fixed_points(params, rho)

    return FixedPointSet(_dedup(pts, 1e-6 * rho), circles)


# ---------------------------------------------------------------------------
# stability and synchronization


@dataclass(frozen=True)
class StabilityReport:
    point: np.ndarray
    tangent_form_eigenvalues: tuple
    classification: str


def stability(params, rho: float, point) -> StabilityReport:
    """Sufficient-condition stability test at a fixed point.

    The Jacobian's symmetric part is restricted to an orthonormal basis of
    the tangent plane; both eigenvalues below -1e-10 is sufficient for
    asymptotic stability, anything else is reported inconclusive.
    """
    point = np.asarray(point, dtype=float)
    pscale = max(float(np.max(np.abs(params.p))), 1e-300)
    if np.linalg.norm(qqq_rhs(params, rho, point)) >= 1e-8 * rho * rho * pscale:
        raise ValueError("stability requested at a non-fixed point")
    n_hat = point / np.linalg.norm(point)
    seed = np.array([1.0, 0.0, 0.0]) if abs(n_hat[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = seed - (seed @ n_hat) * n_hat
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n_hat, e1)
    H = flow_jacobian(params, rho, point)
    Hs = 0.5 * (H + H.T)
    E = np.column_stack([e1, e2])
    ev = np.linalg.eigvalsh(E.T @ Hs @ E)
    cls = ASYMPTOTICALLY_STABLE if np.all(ev < -1e-10) else INCONCLUSIVE
    return StabilityReport(point, (float(ev[0]), float(ev[1])), cls)


@dataclass(frozen=True)
class SyncResult:
    point: np.ndarray
    gamma: tuple


def gamma_pair(p_inf, rho: float) -> tuple[complex, complex]:
    """The complex pair whose combination of the components decays when the
    quadratic flow collapses onto p_inf."""
    d, r, i = np.asarray(p_inf, dtype=float) / rho
    d = min(1.0, max(-1.0, d))
    s1 = math.sqrt(max(0.0, 1.0 - d * d))
    phi2 = math.atan2(i, r) if s1 > 1e-12 else 0.0
    g1 = math.sqrt(1.0 - d)
    g2 = -math.sqrt(1.0 + d) * complex(math.cos(phi2), -math.sin(phi2))
    return complex(g1), g2


def detect_sync(params, rho: float, *, n_starts: int = 64, tol: float = 1e-9):
    """Empirical synchronization detector.

    Requires a finite fixed-point set with exactly one point passing the
    sufficient stability condition, then launches a lattice of trajectories
    and accepts only if every non-equilibrium start lands within 1e-3 rho of
    the candidate.  A successful detection is evidence, not a proof.
    """
    if rho <= 0.0:
        raise ValueError("rho must be positive")
    fps = fixed_points(params, rho)
    if any(c.radius > 1e-12 * rho for c in fps.circles):
        return None
    stable = [
        p for p in fps.points
        if stability(params, rho, p).classification == ASYMPTOTICALLY_STABLE
    ]
    if len(stable) != 1:
        return None
    candidate = stable[0]
    horizon = 20.0 / (rho * max(params.p1, 1e-12))
    for start in fibonacci_sphere(n_starts, rho):
        if any(np.linalg.norm(start - q) < 1e-6 * rho for q in fps.points):
            continue
        sol = _run_ivp(lambda t, y: qqq_rhs(params, rho, y), (0.0, horizon), start, tol)
        if np.linalg.norm(sol.y[:, -1] - candidate) > 1e-3 * rho:
            return None
    return SyncResult(candidate, gamma_pair(candidate, rho))
