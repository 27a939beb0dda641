"""Maximum active power transfer of a branch at fixed frequency, frequency
sweeps with active-set transition detection, and the DC endpoint.

The fixed-frequency problem has two free variables (destination voltage and
angle difference) with the origin voltage pinned at 1.0 p.u. The maximizer is
found by enumerating every KKT candidate analytically: box vertices, thermal
crossings on each box edge (closed form), and the origin thermal tangency
where the injection reaches (s_max, 0). Destination-thermal candidates, which
have no such alignment, are handled by a parameterized 1-D search when both
ends are enforced. No general NLP solver is involved, so results are exact and
deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import Infeasible, ZeroResistanceAtDc
from .line_model import DistributedLineParams, Frequency, PerUnitBase
from .power_flow import (
    ACTIVATION_TOL,
    BranchAdmittance,
    Constraint,
    ConstraintReport,
    FlowResult,
    OperatingLimits,
    OperatingPoint,
    branch_flow,
    check_limits,
    dc_flow,
    grid_flows,
)

__all__ = [
    "MaxTransferPoint",
    "Breakpoint",
    "SweepResult",
    "classify_region",
    "max_power_at_freq",
    "dc_max_power",
    "sweep",
    "grid_oracle",
    "optimal_frequency",
    "calibrate_length",
]

# Frequency resolution for breakpoint bisection (Hz).
BREAKPOINT_RESOLUTION_HZ = 0.01

_V_O = 1.0  # origin voltage is fixed for the transfer problem


@dataclass(frozen=True)
class MaxTransferPoint:
    """Solution of the fixed-frequency maximum-transfer problem."""

    frequency: Frequency
    p_max: float
    v_d_star: float
    theta_star: float
    active_set: frozenset[Constraint]
    region_id: int


@dataclass(frozen=True)
class Breakpoint:
    """Active-set transition: region_from holds just above frequency, region_to below."""

    frequency: Frequency
    region_from: int
    region_to: int


@dataclass(frozen=True)
class SweepResult:
    """Frequency sweep of the maximum transfer with detected transitions."""

    points: tuple[MaxTransferPoint, ...]
    breakpoints: tuple[Breakpoint, ...]
    dc_point: MaxTransferPoint | None
    crossover_hz: float | None
    evaluator: Callable[[float], MaxTransferPoint] | None = field(
        default=None, repr=False, compare=False
    )


def classify_region(active_set: frozenset[Constraint], f: Frequency) -> int:
    """Map an active set to the five-region taxonomy of the reference example.

    5: DC; 4: thermal + lower voltage; 2: thermal + angle; 3: thermal only;
    1: no thermal constraint (angle/voltage bound regime).
    """
    if f.is_dc:
        return 5
    thermal = Constraint.THERMAL_O in active_set or Constraint.THERMAL_D in active_set
    angle = Constraint.ANGLE_POS in active_set or Constraint.ANGLE_NEG in active_set
    if thermal and Constraint.V_D_MIN in active_set:
        return 4
    if thermal and angle:
        return 2
    if thermal:
        return 3
    return 1


@dataclass(frozen=True)
class _Geometry:
    """Per-frequency constants of the flow equations.

    In the (P_o, Q_o) plane the origin injection traces a circle of radius
    v_o*v_d*k_adm around (c_p, c_q) as theta varies; phi is the angle of the
    series admittance.
    """

    g: float
    b: float
    gsh: float
    bsh: float
    k_adm: float
    phi: float
    c_p: float
    c_q: float


def _geometry(adm: BranchAdmittance) -> _Geometry:
    g, b = adm.g_series, adm.b_series
    gsh, bsh = adm.g_shunt_flow, adm.b_shunt_flow
    return _Geometry(
        g=g,
        b=b,
        gsh=gsh,
        bsh=bsh,
        k_adm=math.hypot(g, b),
        phi=math.atan2(b, g),
        c_p=_V_O * _V_O * (g + gsh),
        c_q=-_V_O * _V_O * (b + bsh),
    )


def _enforced(origin_only_thermal: bool) -> frozenset[Constraint]:
    if origin_only_thermal:
        return frozenset(c for c in Constraint if c is not Constraint.THERMAL_D)
    return frozenset(Constraint)


def _is_feasible(report: ConstraintReport, enforced: frozenset[Constraint]) -> bool:
    return all(report[c].satisfied for c in enforced)


def _active(report: ConstraintReport, enforced: frozenset[Constraint]) -> frozenset[Constraint]:
    return frozenset(c for c in enforced if report[c].active)


def _origin_thermal_vd_roots(
    geom: _Geometry, s_max: float, theta: float
) -> list[float]:
    """v_d values where s_o == s_max at fixed theta (quadratic, closed form)."""
    beta = _V_O * geom.k_adm * math.cos(theta - geom.phi)
    delta = _V_O * geom.k_adm * math.sin(theta - geom.phi)
    a = beta * beta + delta * delta
    if a == 0.0:
        return []
    b2 = -2.0 * (geom.c_p * beta + geom.c_q * delta)
    c0 = geom.c_p**2 + geom.c_q**2 - s_max**2
    disc = b2 * b2 - 4.0 * a * c0
    if disc < 0.0:
        return []
    sq = math.sqrt(disc)
    return [(-b2 - sq) / (2.0 * a), (-b2 + sq) / (2.0 * a)]


def _origin_thermal_theta_roots(
    geom: _Geometry, s_max: float, v_d: float
) -> list[float]:
    """theta values where s_o == s_max at fixed v_d (closed form via acos)."""
    rho = _V_O * v_d * geom.k_adm
    mc = math.hypot(geom.c_p, geom.c_q)
    if rho == 0.0 or mc == 0.0:
        return []
    h = (mc * mc + rho * rho - s_max * s_max) / (2.0 * rho * mc)
    if abs(h) > 1.0:
        return []
    dlt = math.acos(h)
    xi = math.atan2(geom.c_q, geom.c_p)
    return [
        math.remainder(xi + dlt + geom.phi, math.tau),
        math.remainder(xi - dlt + geom.phi, math.tau),
    ]


def _origin_tangency(geom: _Geometry, s_max: float) -> tuple[float, float] | None:
    """(v_d, theta) putting the origin injection exactly at (s_max, 0).

    This is the interior KKT point of the thermal-only region: the best point
    of the thermal disk is its rightmost point, reached when the power circle
    through it has the right radius.
    """
    rho = math.hypot(geom.c_p - s_max, geom.c_q)
    if rho == 0.0 or geom.k_adm == 0.0:
        return None
    v_d = rho / (_V_O * geom.k_adm)
    psi = math.atan2(geom.c_q, geom.c_p - s_max)
    theta = math.remainder(psi + geom.phi, math.tau)
    return v_d, theta


def _dest_thermal_vd_roots(
    geom: _Geometry, s_max: float, theta: float
) -> list[float]:
    """v_d values where s_d == s_max at fixed theta (quartic)."""
    a1 = geom.g + geom.gsh
    c1 = -(geom.b + geom.bsh)
    b1 = _V_O * geom.k_adm * math.cos(theta + geom.phi)
    d1 = _V_O * geom.k_adm * math.sin(theta + geom.phi)
    coeffs = [
        a1 * a1 + c1 * c1,
        2.0 * (-a1 * b1 + c1 * d1),
        b1 * b1 + d1 * d1,
        0.0,
        -s_max * s_max,
    ]
    if coeffs[0] == 0.0 and coeffs[1] == 0.0 and coeffs[2] == 0.0:
        return []
    roots = np.roots(coeffs)
    return [float(r.real) for r in roots if abs(r.imag) < 1e-9 and r.real > 0.0]


def _dest_thermal_theta_roots(
    geom: _Geometry, s_max: float, v_d: float
) -> list[float]:
    """theta values where s_d == s_max at fixed v_d (closed form via acos)."""
    c_pd = v_d * v_d * (geom.g + geom.gsh)
    c_qd = -v_d * v_d * (geom.b + geom.bsh)
    rho = v_d * _V_O * geom.k_adm
    md = math.hypot(c_pd, c_qd)
    if rho == 0.0 or md == 0.0:
        return []
    h = (md * md + rho * rho - s_max * s_max) / (2.0 * rho * md)
    if abs(h) > 1.0:
        return []
    dlt = math.acos(h)
    xi = math.atan2(c_qd, c_pd)
    return [
        math.remainder(-xi + dlt - geom.phi, math.tau),
        math.remainder(-xi - dlt - geom.phi, math.tau),
    ]


def _p_origin(geom: _Geometry, v_d: float, theta: float) -> float:
    return geom.c_p - _V_O * v_d * geom.k_adm * math.cos(theta - geom.phi)


def _s_origin(geom: _Geometry, v_d: float, theta: float) -> float:
    p = _p_origin(geom, v_d, theta)
    q = geom.c_q - _V_O * v_d * geom.k_adm * math.sin(theta - geom.phi)
    return math.hypot(p, q)


def _golden_section_max(
    fn: Callable[[float], float], lo: float, hi: float, tol: float
) -> float:
    """Abscissa of the maximum of a unimodal function on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = fn(x1), fn(x2)
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = fn(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = fn(x1)
    return 0.5 * (a + b)


def _dest_thermal_candidates(
    geom: _Geometry, lim: OperatingLimits, n_theta: int = 121
) -> list[tuple[float, float]]:
    """Candidates on the destination thermal boundary s_d == s_max.

    Walks a theta grid, collects the v_d branch roots, and refines the best
    stretch with golden-section; also brackets crossings with the origin
    thermal boundary.
    """
    vmin, vmax, tmax, smax = lim.v_min, lim.v_max, lim.theta_max, lim.s_max
    grid = np.linspace(-tmax, tmax, n_theta)
    per_theta: list[list[float]] = []
    out: list[tuple[float, float]] = []
    for th in grid:
        roots = [
            r for r in _dest_thermal_vd_roots(geom, smax, float(th))
            if vmin - 1e-9 <= r <= vmax + 1e-9
        ]
        per_theta.append(sorted(roots))
        for r in roots:
            out.append((min(max(r, vmin), vmax), float(th)))

    def branch_value(th: float, vd_hint: float) -> tuple[float, float | None]:
        roots = [
            r for r in _dest_thermal_vd_roots(geom, smax, th)
            if vmin - 1e-9 <= r <= vmax + 1e-9
        ]
        if not roots:
            return -math.inf, None
        vd = min(roots, key=lambda r: abs(r - vd_hint))
        return _p_origin(geom, vd, th), vd

    # refine the best on-boundary stretch
    scored = [
        (_p_origin(geom, vd, th), vd, th)
        for th, roots in zip(grid, per_theta)
        for vd in roots
        if _s_origin(geom, vd, th) <= smax + 1e-9
    ]
    if scored:
        _, vd_b, th_b = max(scored)
        step = float(grid[1] - grid[0])
        lo = max(-tmax, th_b - step)
        hi = min(tmax, th_b + step)
        th_ref = _golden_section_max(
            lambda th: branch_value(th, vd_b)[0], lo, hi, 1e-10
        )
        _, vd_ref = branch_value(th_ref, vd_b)
        if vd_ref is not None:
            out.append((min(max(vd_ref, vmin), vmax), th_ref))

    # crossings of the two thermal boundaries: sign change of s_o - smax along
    # a tracked destination branch
    for i in range(len(grid) - 1):
        for r0 in per_theta[i]:
            if not per_theta[i + 1]:
                continue
            r1 = min(per_theta[i + 1], key=lambda r: abs(r - r0))
            w0 = _s_origin(geom, r0, float(grid[i])) - smax
            w1 = _s_origin(geom, r1, float(grid[i + 1])) - smax
            if w0 == 0.0 or w0 * w1 > 0.0:
                continue
            a, b = float(grid[i]), float(grid[i + 1])
            hint = r0
            for _ in range(60):
                mid = 0.5 * (a + b)
                _, vd_mid = branch_value(mid, hint)
                if vd_mid is None:
                    break
                wm = _s_origin(geom, vd_mid, mid) - smax
                if w0 * wm <= 0.0:
                    b = mid
                else:
                    a, w0 = mid, wm
                hint = vd_mid
            _, vd_x = branch_value(0.5 * (a + b), hint)
            if vd_x is not None:
                out.append((min(max(vd_x, vmin), vmax), 0.5 * (a + b)))
    return out


def _evaluate(
    adm: BranchAdmittance,
    lim: OperatingLimits,
    f: Frequency,
    v_d: float,
    theta: float,
) -> tuple[FlowResult, OperatingPoint, ConstraintReport]:
    op = OperatingPoint(v_o=_V_O, v_d=v_d, theta_od=theta, frequency=f)
    flow = branch_flow(op, adm)
    return flow, op, check_limits(flow, op, lim)


def max_power_at_freq(
    adm: BranchAdmittance,
    lim: OperatingLimits,
    f: Frequency,
    origin_only_thermal: bool = False,
) -> MaxTransferPoint:
    """Global maximizer of P_o over the (v_d, theta) box under the limits.

    Delegates to dc_max_power at 0 Hz. Raises Infeasible when no candidate
    satisfies the enforced constraints (cannot happen when the origin voltage
    is inside its limits, which is checked first).
    """
    if f.is_dc:
        return dc_max_power(adm, lim, origin_only_thermal)
    if not (lim.v_min - ACTIVATION_TOL <= _V_O <= lim.v_max + ACTIVATION_TOL):
        raise Infeasible("origin voltage 1.0 p.u. is outside the voltage limits")

    geom = _geometry(adm)
    enforced = _enforced(origin_only_thermal)
    vmin, vmax, tmax, smax = lim.v_min, lim.v_max, lim.theta_max, lim.s_max

    candidates: list[tuple[float, float]] = []
    tangency = _origin_tangency(geom, smax)
    if tangency is not None:
        candidates.append(tangency)
    for th in (tmax, -tmax):
        for vd in (vmax, vmin):
            candidates.append((vd, th))
        for vd in _origin_thermal_vd_roots(geom, smax, th):
            if vmin - 1e-9 <= vd <= vmax + 1e-9:
                candidates.append((min(max(vd, vmin), vmax), th))
    for vd in (vmax, vmin):
        for th in _origin_thermal_theta_roots(geom, smax, vd):
            if abs(th) <= tmax + 1e-12:
                candidates.append((vd, min(max(th, -tmax), tmax)))
        # stationary theta on a voltage edge sits at phi +/- pi; inside the
        # angle window only for non-inductive corner cases
        for th_st in (geom.phi + math.pi, geom.phi - math.pi):
            if -tmax < th_st < tmax:
                candidates.append((vd, th_st))
    if not origin_only_thermal:
        for th in (tmax, -tmax):
            for vd in _dest_thermal_vd_roots(geom, smax, th):
                if vmin - 1e-9 <= vd <= vmax + 1e-9:
                    candidates.append((min(max(vd, vmin), vmax), th))
        for vd in (vmax, vmin):
            for th in _dest_thermal_theta_roots(geom, smax, vd):
                if abs(th) <= tmax + 1e-12:
                    candidates.append((vd, min(max(th, -tmax), tmax)))
        candidates.extend(_dest_thermal_candidates(geom, lim))

    best: tuple[float, float, float, ConstraintReport] | None = None
    for vd, th in candidates:
        if not (vmin - 1e-9 <= vd <= vmax + 1e-9 and abs(th) <= tmax + 1e-9):
            continue
        flow, _, report = _evaluate(adm, lim, f, vd, th)
        if not _is_feasible(report, enforced):
            continue
        if best is None or flow.p_o > best[0]:
            best = (flow.p_o, vd, th, report)
    if best is None:
        raise Infeasible(f"no feasible operating point at {f.hertz} Hz")

    p, vd, th, report = best
    active = _active(report, enforced)
    return MaxTransferPoint(
        frequency=f,
        p_max=p,
        v_d_star=vd,
        theta_star=th,
        active_set=active,
        region_id=classify_region(active, f),
    )


def dc_max_power(
    adm: BranchAdmittance,
    lim: OperatingLimits,
    origin_only_thermal: bool = False,
) -> MaxTransferPoint:
    """Maximum DC transfer: P_o is linear and decreasing in v_d, so the
    maximizer is v_min unless a thermal bound cuts in first."""
    if not adm.frequency.is_dc:
        raise ValueError("dc_max_power requires an admittance evaluated at 0 Hz")
    if adm.g_series <= 0.0:
        raise ZeroResistanceAtDc("DC transfer undefined for zero series resistance")

    g, gsh, k = adm.g_series, adm.g_shunt_flow, lim.k_dc
    vmin, vmax, smax = lim.v_min, lim.v_max, lim.s_max
    enforced = _enforced(origin_only_thermal)

    candidates = [vmin, vmax]
    # |P_o| = smax: P_o(vd) = k(vo^2(g+gsh) - vo*vd*g), linear in vd
    for sgn in (1.0, -1.0):
        candidates.append((_V_O * _V_O * (g + gsh) - sgn * smax / k) / (_V_O * g))
    # |P_d| = smax: quadratic in vd
    if not origin_only_thermal:
        a, b2 = g + gsh, -_V_O * g
        for sgn in (1.0, -1.0):
            disc = b2 * b2 + 4.0 * a * sgn * smax / k
            if disc >= 0.0 and a != 0.0:
                sq = math.sqrt(disc)
                candidates.extend([(-b2 - sq) / (2.0 * a), (-b2 + sq) / (2.0 * a)])

    best: tuple[float, float, ConstraintReport] | None = None
    for vd in candidates:
        if not vmin - 1e-9 <= vd <= vmax + 1e-9:
            continue
        vd = min(max(vd, vmin), vmax)
        op = OperatingPoint(v_o=_V_O, v_d=vd, theta_od=0.0, frequency=adm.frequency)
        flow = dc_flow(op, adm, k)
        report = check_limits(flow, op, lim)
        if not _is_feasible(report, enforced):
            continue
        if best is None or flow.p_o > best[0]:
            best = (flow.p_o, vd, report)
    if best is None:
        raise Infeasible("no feasible DC operating point")

    p, vd, report = best
    return MaxTransferPoint(
        frequency=adm.frequency,
        p_max=p,
        v_d_star=vd,
        theta_star=0.0,
        active_set=_active(report, enforced),
        region_id=5,
    )


AdmittanceFactory = Callable[[Frequency], BranchAdmittance]


def _refine_transition(
    evaluate: Callable[[float], MaxTransferPoint],
    f_lo: float,
    f_hi: float,
    set_lo: frozenset[Constraint],
) -> float:
    while f_hi - f_lo > BREAKPOINT_RESOLUTION_HZ:
        mid = 0.5 * (f_lo + f_hi)
        if evaluate(mid).active_set == set_lo:
            f_lo = mid
        else:
            f_hi = mid
    return 0.5 * (f_lo + f_hi)


def sweep(
    adm_factory: AdmittanceFactory,
    lim: OperatingLimits,
    f_min: float,
    f_max: float,
    step: float,
    origin_only_thermal: bool = False,
) -> SweepResult:
    """Evaluate the maximum transfer on a frequency grid and refine the
    active-set transition frequencies by bisection.

    The DC point is included in the grid when f_min == 0 and is always
    computed separately (when the branch allows it) so the AC/DC capacity
    crossover can be located.
    """
    if not 0.0 <= f_min < f_max:
        raise ValueError("require 0 <= f_min < f_max")
    if step <= 0.0:
        raise ValueError("step must be > 0")

    n = int(math.floor((f_max - f_min) / step + 1e-9)) + 1
    grid = [f_min + i * step for i in range(n)]
    if grid[-1] < f_max - 1e-9:
        grid.append(f_max)

    def evaluate(hz: float) -> MaxTransferPoint:
        f = Frequency(hz)
        return max_power_at_freq(adm_factory(f), lim, f, origin_only_thermal)

    points = tuple(evaluate(hz) for hz in grid)

    if f_min == 0.0:
        dc_point: MaxTransferPoint | None = points[0]
    else:
        try:
            f0 = Frequency(0.0)
            dc_point = dc_max_power(adm_factory(f0), lim, origin_only_thermal)
        except ZeroResistanceAtDc:
            dc_point = None

    breakpoints: list[Breakpoint] = []
    for lo, hi in zip(points, points[1:]):
        if lo.active_set == hi.active_set:
            continue
        if lo.frequency.is_dc:
            # regime change at the DC endpoint itself, not a bisectable one
            breakpoints.append(
                Breakpoint(
                    frequency=Frequency(0.0),
                    region_from=hi.region_id,
                    region_to=lo.region_id,
                )
            )
            continue
        f_star = _refine_transition(
            evaluate, lo.frequency.hertz, hi.frequency.hertz, lo.active_set
        )
        breakpoints.append(
            Breakpoint(
                frequency=Frequency(f_star),
                region_from=hi.region_id,
                region_to=lo.region_id,
            )
        )

    crossover: float | None = None
    if dc_point is not None:
        p_dc = dc_point.p_max
        ac_points = [p for p in points if not p.frequency.is_dc]
        for hi, lo in zip(reversed(ac_points), list(reversed(ac_points))[1:]):
            d_hi = hi.p_max - p_dc
            d_lo = lo.p_max - p_dc
            if d_hi == 0.0:
                crossover = hi.frequency.hertz
                break
            if d_hi * d_lo < 0.0:
                crossover = float(
                    brentq(
                        lambda hz: evaluate(hz).p_max - p_dc,
                        lo.frequency.hertz,
                        hi.frequency.hertz,
                        xtol=1e-6,
                    )
                )
                break

    return SweepResult(
        points=points,
        breakpoints=tuple(breakpoints),
        dc_point=dc_point,
        crossover_hz=crossover,
        evaluator=evaluate,
    )


def optimal_frequency(result: SweepResult) -> tuple[Frequency, float]:
    """Lowest frequency attaining the sweep maximum.

    On a plateau the lower edge is located by bisection; an interior strict
    maximum is polished by golden-section between the neighbouring grid
    points. Falls back to the raw grid point when the sweep carries no
    evaluator.
    """
    points = result.points
    if not points:
        raise ValueError("empty sweep")
    p_best = max(p.p_max for p in points)
    tol = 1e-9
    idx = min(i for i, p in enumerate(points) if p.p_max >= p_best - tol)
    chosen = points[idx]
    if result.evaluator is None or idx == 0:
        return chosen.frequency, chosen.p_max
    evaluate = result.evaluator
    below = points[idx - 1]
    if below.frequency.is_dc:
        return chosen.frequency, chosen.p_max

    plateau = any(
        p.p_max >= p_best - tol for i, p in enumerate(points) if i != idx
    )
    if plateau:
        lo, hi = below.frequency.hertz, chosen.frequency.hertz
        while hi - lo > BREAKPOINT_RESOLUTION_HZ:
            mid = 0.5 * (lo + hi)
            if evaluate(mid).p_max >= p_best - tol:
                hi = mid
            else:
                lo = mid
        return Frequency(hi), evaluate(hi).p_max

    hi_bound = (
        points[idx + 1].frequency.hertz
        if idx + 1 < len(points)
        else chosen.frequency.hertz
    )
    f_star = _golden_section_max(
        lambda hz: evaluate(hz).p_max, below.frequency.hertz, hi_bound, 1e-4
    )
    candidate = evaluate(f_star)
    if candidate.p_max >= chosen.p_max:
        return candidate.frequency, candidate.p_max
    return chosen.frequency, chosen.p_max


def grid_oracle(
    adm: BranchAdmittance,
    lim: OperatingLimits,
    f: Frequency,
    resolution: int = 500,
    origin_only_thermal: bool = False,
) -> MaxTransferPoint:
    """Brute-force maximization over a (v_d, theta) lattice with local
    refinement of the best cell. Test oracle only; never used by sweep.

    The refinement re-grids a small window around the incumbent, moving the
    window at constant scale while the best point keeps landing on its rim and
    shrinking it otherwise, which tracks the thermal boundary reliably.
    """
    if resolution < 100:
        raise ValueError("oracle resolution must be >= 100 points per axis")
    if f.is_dc:
        return _dc_grid_oracle(adm, lim, resolution, origin_only_thermal)

    vmin, vmax, tmax, smax = lim.v_min, lim.v_max, lim.theta_max, lim.s_max

    def masked_best(
        vd: np.ndarray, th: np.ndarray
    ) -> tuple[float, float, float] | None:
        vg, tg = np.meshgrid(vd, th, indexing="ij")
        po, qo, pd, qd = grid_flows(adm, _V_O, vg, tg)
        feas = np.hypot(po, qo) <= smax
        if not origin_only_thermal:
            feas &= np.hypot(pd, qd) <= smax
        if not feas.any():
            return None
        pw = np.where(feas, po, -np.inf)
        i, j = np.unravel_index(int(np.argmax(pw)), pw.shape)
        return float(pw[i, j]), float(vg[i, j]), float(tg[i, j])

    coarse = masked_best(
        np.linspace(vmin, vmax, resolution), np.linspace(-tmax, tmax, resolution)
    )
    if coarse is None:
        raise Infeasible(f"oracle grid entirely infeasible at {f.hertz} Hz")

    # Re-grid a recentered box that shrinks by 2x per round, starting at half
    # the domain. The slow shrink keeps the optimum inside the box even when
    # the improving direction is a narrow diagonal cone along the thermal
    # boundary, which defeats fixed-aspect local windows.
    p_best, vd_c, th_c = coarse
    hw_v = 0.5 * (vmax - vmin)
    hw_t = tmax
    while hw_v > 1e-12 or hw_t > 1e-12:
        vd_axis = np.linspace(max(vmin, vd_c - hw_v), min(vmax, vd_c + hw_v), 121)
        th_axis = np.linspace(max(-tmax, th_c - hw_t), min(tmax, th_c + hw_t), 121)
        local = masked_best(vd_axis, th_axis)
        if local is not None and local[0] > p_best:
            p_best, vd_c, th_c = local
        hw_v /= 2.0
        hw_t /= 2.0

    enforced = _enforced(origin_only_thermal)
    _, _, report = _evaluate(adm, lim, f, vd_c, th_c)
    active = _active(report, enforced)
    return MaxTransferPoint(
        frequency=f,
        p_max=p_best,
        v_d_star=vd_c,
        theta_star=th_c,
        active_set=active,
        region_id=classify_region(active, f),
    )


def calibrate_length(
    params: DistributedLineParams,
    base: PerUnitBase,
    lim: OperatingLimits,
    target_onset_hz: float,
    length_lo_km: float = 250.0,
    length_hi_km: float = 350.0,
) -> float:
    """Line length whose thermal-onset frequency equals target_onset_hz.

    The onset is where the apparent power at the (v_max, +theta_max) vertex
    reaches s_max; it decreases monotonically with length, so plain bisection
    applies. This is how the bundled 300 km study length was fixed.
    """
    from .power_flow import admittance_from_params

    def onset(length_km: float) -> float:
        p = params.with_length(length_km)

        def vertex_margin(hz: float) -> float:
            f = Frequency(hz)
            geom = _geometry(admittance_from_params(p, base, f))
            return _s_origin(geom, lim.v_max, lim.theta_max) - lim.s_max

        # the margin can turn positive again at high frequency (charging
        # dominates), so bracket the lowest crossing by scanning upward
        hz, m = 0.5, vertex_margin(0.5)
        while hz < 400.0:
            nxt = hz + 2.0
            m_nxt = vertex_margin(nxt)
            if m > 0.0 >= m_nxt:
                return float(brentq(vertex_margin, hz, nxt, xtol=1e-9))
            hz, m = nxt, m_nxt
        raise ValueError("no thermal onset below 400 Hz for this length")

    return float(
        brentq(
            lambda ell: onset(ell) - target_onset_hz,
            length_lo_km,
            length_hi_km,
            xtol=1e-6,
        )
    )


def _dc_grid_oracle(
    adm: BranchAdmittance,
    lim: OperatingLimits,
    resolution: int,
    origin_only_thermal: bool,
) -> MaxTransferPoint:
    if adm.g_series <= 0.0:
        raise ZeroResistanceAtDc("DC transfer undefined for zero series resistance")
    g, gsh, k = adm.g_series, adm.g_shunt_flow, lim.k_dc
    vd = np.linspace(lim.v_min, lim.v_max, resolution)
    po = k * ((g + gsh) - vd * g)
    pd = k * (vd * vd * (g + gsh) - vd * g)
    feas = np.abs(po) <= lim.s_max
    if not origin_only_thermal:
        feas &= np.abs(pd) <= lim.s_max
    if not feas.any():
        raise Infeasible("oracle grid entirely infeasible at 0 Hz")
    pw = np.where(feas, po, -np.inf)
    i = int(np.argmax(pw))
    op = OperatingPoint(v_o=_V_O, v_d=float(vd[i]), theta_od=0.0, frequency=adm.frequency)
    flow = dc_flow(op, adm, k)
    report = check_limits(flow, op, lim)
    enforced = _enforced(origin_only_thermal)
    active = _active(report, enforced)
    return MaxTransferPoint(
        frequency=adm.frequency,
        p_max=float(pw[i]),
        v_d_star=float(vd[i]),
        theta_star=0.0,
        active_set=active,
        region_id=5,
    )
