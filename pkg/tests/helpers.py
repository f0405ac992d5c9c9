"""Shared test machinery: oracle comparisons and branch-targeted states.

The closed-form acceptance sweep needs initial states driven into every
formula branch, including the measure-zero threshold families (equal
conserved radii, vanishing branch invariants, states exactly on threshold
planes).  Generic branches are filled by seeded rejection sampling; the
threshold families are constructed exactly, parametrized along their
defining curves on the sphere.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from cubicnls.closed_form import solve_case
from cubicnls.quadratic_flow import integrate_quad, qqq_rhs, random_sphere_states
from cubicnls.standard_form import StandardParams

RHOS = (0.5, 1.0, 2.0)


def split_counts(total: int, parts: int) -> list[int]:
    base, extra = divmod(total, parts)
    return [base + (1 if i < extra else 0) for i in range(parts)]


def closed_vs_oracle(params, rho, s0, *, span_fac=5.0, n_eval=33, tol=1e-10) -> float:
    """Sup deviation between the closed form and the adaptive oracle over
    tau in [-span, span] with span = span_fac / (rho * max|p|)."""
    big_p = max(abs(x) for x in params.p)
    span = span_fac / (rho * big_p)
    sol = solve_case(params, rho, s0)
    worst = 0.0
    for sgn in (1.0, -1.0):
        taus = sgn * np.linspace(0.0, span, n_eval)
        tr = integrate_quad(params, rho, s0, (0.0, sgn * span), tol=tol)
        worst = max(worst, float(np.max(np.abs(sol(taus) - tr.at(taus)))))
    return worst


def is_fixed_point(params, rho, s) -> bool:
    pscale = max(abs(x) for x in params.p)
    return np.linalg.norm(qqq_rhs(params, rho, s)) <= 1e-12 * rho * rho * pscale


# ---------------------------------------------------------------------------
# branch keys


def _lemma1_key(f0, g0, h0) -> str:
    r_fg, r_fh = math.hypot(f0, g0), math.hypot(f0, h0)
    big = max(r_fg, r_fh, 1e-300)
    if abs(r_fh - r_fg) <= 1e-10 * big:
        return "equal-radii"
    return "dn" if r_fh > r_fg else "dn-swapped"


def _lemma2_key(f0, g0, h0) -> str:
    disc = h0 * h0 - 2.0 * (math.hypot(f0, g0) + g0)
    scale = max(h0 * h0, math.hypot(f0, g0), 1e-300)
    if abs(disc) <= 1e-10 * scale:
        return "sech"
    return "cn" if disc < 0 else "dn"


def _lemma3_key(eta, f0, g0, h0) -> str:
    r0 = math.hypot(f0, g0)
    k0 = h0 * h0 - (f0 + eta) ** 2
    scale = max(r0, eta, abs(h0), abs(f0 + eta))
    if abs(k0) <= 1e-10 * scale * scale:
        if abs(r0 - eta) <= 1e-10 * scale:
            return "K0 R=eta"
        tag = "K0 R<eta" if r0 < eta else "K0 R>eta"
        if f0 + eta < 0:
            tag = "K0 f+eta<0"
        return tag
    if k0 > 0:
        return "K+"
    kap = math.sqrt(-k0)
    if abs(r0 - (eta + kap)) <= 1e-10 * scale:
        return "K- R=eta+k"
    if abs(r0 - (eta - kap)) <= 1e-10 * scale:
        return "K- R=eta-k"
    if r0 > eta + kap:
        return "K- outer S+" if f0 + eta > 0 else "K- outer S-"
    return "K- middle" if r0 > eta - kap else "K- inner"


def lemma_coords(params, rho, s):
    """Map a state to the coordinates of the lemma its case is solved by."""
    d, r, i = s
    p1, p2, p3, p4, p5 = (float(x) for x in params.p)
    case = _casenum(params)
    if case == 3:
        k = math.sqrt(8.0) * p3
        return "lemma1", (2.0 * p3 * i, k * r, k * d)
    if case == 7:
        if p2 < -p3:
            return "lemma1", (
                -math.sqrt(8 * p3 * abs(p2 + p3)) * d,
                math.sqrt(8 * p3 * (p3 - p2)) * r,
                2 * math.sqrt(p2 * p2 - p3 * p3) * i,
            )
        if p2 < p3:
            return "lemma1", (
                2 * math.sqrt(p3 * p3 - p2 * p2) * i,
                math.sqrt(8 * p3 * (p3 - p2)) * r,
                math.sqrt(8 * p3 * (p2 + p3)) * d,
            )
        return "lemma1", (
            -math.sqrt(8 * p3 * (p2 - p3)) * r,
            math.sqrt(8 * p3 * (p2 + p3)) * d,
            2 * math.sqrt(p2 * p2 - p3 * p3) * i,
        )
    if case == 8:
        return "lemma2", (4 * p2 * p4 * rho * r, 4 * p4 * rho * (p2 * d + p4 * rho), -2 * p2 * i)
    if case == 9:
        rt2 = math.sqrt(2.0)
        return "lemma3", (rt2 * p4 * rho, 2 * rt2 * (p3 * d + 0.5 * p4 * rho), 2 * p3 * i, 2 * rt2 * p3 * r)
    if case == 10:
        rt2 = math.sqrt(2.0)
        return "lemma3", (rt2 * p5 * rho, -2 * rt2 * (p3 * r - 0.5 * p5 * rho), -2 * p3 * i, 2 * rt2 * p3 * d)
    return "none", ()


def _casenum(params) -> int:
    from cubicnls.closed_form import classify

    return classify(params).case


def branch_key(params, rho, s) -> str:
    """Branch label of the closed-form formula that a state will take."""
    from cubicnls.closed_form import classify

    cid = classify(params)
    d, r, i = (float(v) for v in s)
    p1, p2, p3, p4, p5 = (float(x) for x in params.p)
    if cid.case in (1, 2, 4, 5, 12, 13):
        return "generic"
    if cid.case == 6:
        return cid.subcase
    if cid.case in (3, 7):
        kind, coords = lemma_coords(params, rho, s)
        prefix = cid.subcase + " " if cid.case == 7 else ""
        return prefix + _lemma1_key(*coords)
    if cid.case == 8:
        _, coords = lemma_coords(params, rho, s)
        return _lemma2_key(*coords)
    if cid.case in (9, 10):
        _, coords = lemma_coords(params, rho, s)
        return _lemma3_key(*coords)
    if cid.case == 11:
        if cid.ratio == 1.0 or cid.ratio == 3.0:
            return cid.subcase
        c_plus = 0.5 * (d - r) ** 2
        c_minus = 0.5 * (d + r) ** 2
        if c_plus <= 1e-10 * rho * rho:
            return "1/3 diag+"
        if c_minus <= 1e-10 * rho * rho:
            return "1/3 diag-"
        if abs(i) <= 1e-12 * rho:
            return "1/3 I0=0 beta" if 2 * c_plus > c_minus else "1/3 I0=0 gamma"
        return "1/3 general"
    if cid.case in (14, 15):
        theta = math.atan2(p1, p2 + p3)
        cx = p2 * p4 / (2 * p1 * p3 * math.cos(theta)) if cid.case == 15 else 0.0
        x0 = d / (2 * math.sin(theta)) + r / (2 * math.cos(theta)) + cx * rho
        cap = (1 - (p4 / (2 * p3 * math.cos(theta))) ** 2) * rho * rho if cid.case == 15 else rho * rho
        disc = cap - x0 * x0
        if abs(disc) <= 1e-10 * rho * rho:
            return "X threshold"
        return "X below" if disc > 0 else "X above"
    return "generic"


# ---------------------------------------------------------------------------
# state construction


def sample_branch_states(params, rho, want_key, n, seed, pool=6000):
    """Seeded random on-sphere states whose branch key matches ``want_key``.

    Fixed points are skipped.  Raises if the pool cannot fill the request,
    which signals the parameters cannot reach the branch at all.
    """
    states = []
    for s in random_sphere_states(rho, pool, seed):
        if len(states) == n:
            break
        if is_fixed_point(params, rho, s):
            continue
        if branch_key(params, rho, s) == want_key:
            states.append(s)
    if len(states) < n:
        raise AssertionError(
            f"pool exhausted: {len(states)}/{n} states for branch {want_key!r} of p={tuple(params.p)}"
        )
    return states


def _on_sphere(d, r, rho, sign_i):
    i_sq = rho * rho - d * d - r * r
    if i_sq < 0:
        return None
    return np.array([d, r, sign_i * math.sqrt(i_sq)])


def curve_states(rho, r_of_d, d_grid, sign_i=1.0):
    """States (d, r(d), +-I) on the sphere along an explicit curve."""
    out = []
    for d in d_grid:
        r = r_of_d(d)
        s = _on_sphere(d, r, rho, sign_i)
        if s is not None:
            out.append(s)
    return out


def solve_on_sphere(fun, rho, d_grid, r_samples=160):
    """States with fun(state) = 0, found by sweeping D and bracketing in R.

    ``fun`` takes a state array; for each D the R-interval on the sphere is
    scanned for sign changes of fun at both signs of I.
    """
    found = []
    for d in d_grid:
        r_max = math.sqrt(max(rho * rho - d * d, 0.0))
        if r_max == 0.0:
            continue
        rs = np.linspace(-r_max, r_max, r_samples)
        for sign_i in (1.0, -1.0):
            vals = []
            for r in rs:
                s = _on_sphere(d, r, rho, sign_i)
                vals.append(fun(s) if s is not None else np.nan)
            vals = np.asarray(vals)
            for j in range(len(rs) - 1):
                if np.isnan(vals[j]) or np.isnan(vals[j + 1]):
                    continue
                if vals[j] == 0.0:
                    found.append(_on_sphere(d, rs[j], rho, sign_i))
                elif vals[j] * vals[j + 1] < 0.0:
                    r_star = brentq(
                        lambda r: fun(_on_sphere(d, r, rho, sign_i)), rs[j], rs[j + 1], xtol=1e-15
                    )
                    found.append(_on_sphere(d, r_star, rho, sign_i))
    return [s for s in found if s is not None]


# ---------------------------------------------------------------------------
# the per-case branch inventory used by the acceptance sweep


def std(p1=0.0, p2=0.0, p3=0.0, p4=0.0, p5=0.0, q=(0.0, 0.0, 0.0)):
    return StandardParams(p1, p2, p3, p4, p5, *q)


def case_branch_plan():
    """(label, params, branch key, threshold family or None) inventory.

    The threshold entry, when present, is a callable (rho -> list of exact
    states) used instead of rejection sampling.
    """
    plan = []

    def add(label, params, key, family=None):
        plan.append((label, params, key, family))

    add("case1", std(p1=1.0), "generic")
    add("case2", std(p2=-0.8), "generic")
    add("case4", std(p4=0.9), "generic")
    add("case5", std(p1=1.0, p2=0.7), "generic")
    add("case12", std(p2=0.7, p3=0.7, p4=0.4), "generic")
    add("case13", std(p2=-0.7, p3=0.7, p5=0.4), "generic")

    add("case6>", std(p1=1.0, p4=0.4), "p1>p4")
    add("case6=", std(p1=1.0, p4=1.0), "p1=p4")
    add("case6<", std(p1=0.5, p4=1.2), "p1<p4")

    # pure p3: lemma 1 through the triple (2 p3 I, sqrt8 p3 R, sqrt8 p3 D)
    p3v = 1.1
    pc3 = std(p3=p3v)
    add("case3 dn", pc3, "dn")
    add("case3 swap", pc3, "dn-swapped")
    add(
        "case3 eq",
        pc3,
        "equal-radii",
        lambda rho: curve_states(rho, lambda d: d, np.linspace(-0.69, 0.69, 40) * rho)
        + curve_states(rho, lambda d: -d, np.linspace(-0.69, 0.69, 40) * rho, sign_i=-1.0),
    )

    # p2/p3 mixtures: three sign regimes, each with the three lemma-1 branches
    for tag, p2v in (("p2<-p3", -2.0), ("mid", 0.4), ("p2>p3", 2.0)):
        pc7 = std(p2=p2v, p3=1.0)
        sub = {"p2<-p3": "p2<-p3", "mid": "-p3<p2<p3", "p2>p3": "p2>p3"}[tag]
        add(f"case7 {tag} dn", pc7, f"{sub} dn")
        add(f"case7 {tag} swap", pc7, f"{sub} dn-swapped")

        def family7(rho, p2v=p2v):
            # equal lemma radii: cg^2 * (mid coordinate)^2 = ch^2 * (last)^2
            p2a, p3a = p2v, 1.0
            if p2a < -p3a:
                ratio = math.sqrt((p3a - p2a) / (2.0 * abs(p2a + p3a) / (4 * p3a) * 4 * p3a))
                # cg^2 R^2 = ch^2 I^2 with cg^2 = 8 p3 (p3 - p2), ch^2 = 4 (p2^2 - p3^2)
                c = math.sqrt(4 * (p2a**2 - p3a**2) / (8 * p3a * (p3a - p2a)))
                out = []
                for sgn in (1.0, -1.0):
                    # R = sgn * c * I on the sphere: parametrize by I
                    for i0 in np.linspace(-0.95, 0.95, 40) * rho / math.hypot(1, c):
                        r0 = sgn * c * i0
                        dsq = rho * rho - r0 * r0 - i0 * i0
                        if dsq > 1e-6:
                            out.append(np.array([math.sqrt(dsq), r0, i0]))
                            out.append(np.array([-math.sqrt(dsq), r0, i0]))
                return out
            if p2a < p3a:
                c = math.sqrt(8 * p3a * (p2a + p3a) / (8 * p3a * (p3a - p2a)))
                return curve_states(rho, lambda d: c * d, np.linspace(-0.9, 0.9, 50) * rho / math.hypot(1, c)) + curve_states(
                    rho, lambda d: -c * d, np.linspace(-0.9, 0.9, 50) * rho / math.hypot(1, c), sign_i=-1.0
                )
            c = math.sqrt(4 * (p2a**2 - p3a**2) / (8 * p3a * (p2a + p3a)))
            out = []
            for sgn in (1.0, -1.0):
                for i0 in np.linspace(-0.95, 0.95, 40) * rho / math.hypot(1, c):
                    d0 = sgn * c * i0
                    rsq = rho * rho - d0 * d0 - i0 * i0
                    if rsq > 1e-6:
                        out.append(np.array([d0, math.sqrt(rsq), i0]))
                        out.append(np.array([d0, -math.sqrt(rsq), i0]))
            return out

        add(f"case7 {tag} eq", pc7, f"{sub} equal-radii", family7)

    # p2/p4 mixture: lemma 2 branches
    pc8 = std(p2=0.8, p4=0.5)
    add("case8 cn", pc8, "cn")
    add("case8 dn", pc8, "dn")

    def family8(rho, params=pc8):
        def gap(s):
            _, (f0, g0, h0) = lemma_coords(params, rho, s)[0], lemma_coords(params, rho, s)[1]
            return h0 * h0 - 2.0 * (math.hypot(f0, g0) + g0)

        return solve_on_sphere(gap, rho, np.linspace(-0.98, 0.98, 18) * rho)

    add("case8 sech", pc8, "sech", family8)

    # p3/p4 and p3/p5 mixtures: lemma 3 branch catalogue.  The coupling
    # windows that reach each regime on the sphere were mapped empirically;
    # note the K = 0 family carries a constant lemma radius, so its R = eta
    # subcase needs the coupling pinned at exactly the p3 value.
    for label, mk in (
        ("case9", lambda c: std(p3=1.0, p4=c)),
        ("case10", lambda c: std(p3=1.0, p5=c)),
    ):
        for key, coupling in (
            ("K+", 0.3),
            ("K- outer S+", 0.3),
            ("K- outer S-", 0.3),
            ("K- middle", 1.5),
            ("K- inner", 1.3),
        ):
            add(f"{label} {key}", mk(coupling), key)
        for kzero_key, coupling in (
            ("K0 R<eta", 1.2),
            ("K0 R=eta", 1.0),
            ("K0 R>eta", 0.6),
            ("K0 f+eta<0", 0.6),
        ):
            params = mk(coupling)

            def family_kzero(rho, params=params, want=kzero_key):
                def kval(s):
                    _, coords = lemma_coords(params, rho, s)
                    eta, f0, g0, h0 = coords
                    return h0 * h0 - (f0 + eta) ** 2

                states = solve_on_sphere(kval, rho, np.linspace(-0.98, 0.98, 40) * rho)
                return [s for s in states if _branch_of(params, rho, s) == want]

            add(f"{label} {kzero_key}", params, kzero_key, family_kzero)
        for thr_key, coupling in (("K- R=eta+k", 0.6), ("K- R=eta-k", 1.35)):
            params = mk(coupling)

            def family_thr(rho, params=params, want=thr_key):
                sign = 1.0 if want.endswith("+k") else -1.0

                def gap(s):
                    _, coords = lemma_coords(params, rho, s)
                    eta, f0, g0, h0 = coords
                    k0 = h0 * h0 - (f0 + eta) ** 2
                    if k0 >= 0:
                        return np.nan
                    return math.hypot(f0, g0) - (eta + sign * math.sqrt(-k0))

                return solve_on_sphere(gap, rho, np.linspace(-0.98, 0.98, 40) * rho)

            add(f"{label} {thr_key}", params, thr_key, family_thr)

    # special p1/p3 ratios
    add("case11 r1", std(p1=1.0, p3=1.0), "ratio=1")
    add("case11 r3", std(p1=3.0, p3=1.0), "ratio=3")
    pc11 = std(p1=1.0, p3=3.0)
    add("case11 r1/3 gen", pc11, "1/3 general")
    add(
        "case11 r1/3 diag+",
        pc11,
        "1/3 diag+",
        lambda rho: curve_states(rho, lambda d: d, np.linspace(-0.69, 0.69, 40) * rho)
        + curve_states(rho, lambda d: d, np.linspace(-0.69, 0.69, 40) * rho, sign_i=-1.0),
    )
    add(
        "case11 r1/3 diag-",
        pc11,
        "1/3 diag-",
        lambda rho: curve_states(rho, lambda d: -d, np.linspace(-0.69, 0.69, 40) * rho)
        + curve_states(rho, lambda d: -d, np.linspace(-0.69, 0.69, 40) * rho, sign_i=-1.0),
    )

    def family11_i0(rho, beta_side):
        out = []
        for ang in np.linspace(0.02, 2 * math.pi - 0.02, 160):
            s = np.array([rho * math.cos(ang), rho * math.sin(ang), 0.0])
            if branch_key(pc11, rho, s) == ("1/3 I0=0 beta" if beta_side else "1/3 I0=0 gamma"):
                if not is_fixed_point(pc11, rho, s):
                    out.append(s)
        return out

    add("case11 r1/3 I0=0 beta", pc11, "1/3 I0=0 beta", lambda rho: family11_i0(rho, True))
    add("case11 r1/3 I0=0 gamma", pc11, "1/3 I0=0 gamma", lambda rho: family11_i0(rho, False))

    # conserved-plane families
    pc14 = std(p1=0.6, p2=0.8, p3=1.0)
    add("case14 below", pc14, "X below")
    add("case14 above", pc14, "X above")

    def family14(rho, params=pc14, cap_of=lambda rho: rho * rho):
        theta = math.atan2(params.p1, params.p2 + params.p3)
        cx = 0.0
        if params.p4 > 0:
            cx = params.p2 * params.p4 / (2 * params.p1 * params.p3 * math.cos(theta))
        target = math.sqrt(cap_of(rho))
        out = []
        for sgn in (1.0, -1.0):
            def r_of_d(d, sgn=sgn):
                return 2 * math.cos(theta) * (sgn * target - cx * rho - d / (2 * math.sin(theta)))

            out += curve_states(rho, r_of_d, np.linspace(-0.98, 0.98, 60) * rho)
            out += curve_states(rho, r_of_d, np.linspace(-0.98, 0.98, 60) * rho, sign_i=-1.0)
        return out

    add("case14 thr", pc14, "X threshold", family14)
    p4v = 0.5
    pc15 = std(p1=0.6, p2=0.8, p3=1.0, p4=p4v, p5=p4v * 0.6 / 1.8)
    add("case15 below", pc15, "X below")
    add("case15 above", pc15, "X above")

    def family15(rho, params=pc15):
        theta = math.atan2(params.p1, params.p2 + params.p3)
        cap = (1 - (params.p4 / (2 * params.p3 * math.cos(theta))) ** 2) * rho * rho
        return family14(rho, params=params, cap_of=lambda rho, cap=cap: cap)

    add("case15 thr", pc15, "X threshold", family15)
    return plan


def _branch_of(params, rho, s):
    _, coords = lemma_coords(params, rho, s)
    return _lemma3_key(*coords)


def branch_states(params, rho, key, family, n, seed):
    """n states in the requested branch: exact families when given, seeded
    rejection sampling otherwise."""
    if family is not None:
        pool = [
            s
            for s in family(rho)
            if not is_fixed_point(params, rho, s) and branch_key(params, rho, s) == key
        ]
        if len(pool) < n:
            raise AssertionError(
                f"threshold family produced {len(pool)} < {n} states for {key!r}"
            )
        idx = np.random.default_rng(seed).permutation(len(pool))[:n]
        return [pool[j] for j in idx]
    return sample_branch_states(params, rho, key, n, seed)
