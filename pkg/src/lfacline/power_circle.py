"""Power-circle geometry and the feasible (P_o, Q_o) region of a branch.

For fixed voltage magnitudes the origin injection traces a circle as the angle
difference varies; sweeping the destination voltage between its limits and
applying the thermal/angle constraints yields the feasible region. At 0 Hz the
region collapses to a segment of the P axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .errors import EmptyRegion, ZeroResistanceAtDc
from .line_model import Frequency
from .power_flow import (
    BranchAdmittance,
    Constraint,
    OperatingLimits,
    OperatingPoint,
    branch_flow,
    check_limits,
    grid_flows,
)

__all__ = [
    "PowerCircle",
    "RegionSample",
    "FeasibleRegion",
    "circle",
    "feasible_region",
    "dc_segment",
]


@dataclass(frozen=True)
class PowerCircle:
    """Locus of (P_o, Q_o) as the angle varies at fixed voltage magnitudes."""

    center_p: float
    center_q: float
    radius: float
    v_o: float
    v_d: float
    frequency: Frequency


class RegionSample(NamedTuple):
    v_d: float
    theta: float
    p_o: float
    q_o: float
    feasible: bool


@dataclass(frozen=True)
class FeasibleRegion:
    """Sampled feasible injections and the boundary polyline in the PQ plane."""

    frequency: Frequency
    samples: tuple[RegionSample, ...]
    boundary: tuple[tuple[float, float], ...]


def circle(v_o: float, v_d: float, adm: BranchAdmittance) -> PowerCircle:
    """Power circle for the given voltage magnitudes; rejects 0 Hz
    (use dc_segment there, where the locus degenerates)."""
    if adm.frequency.is_dc:
        raise ValueError("power circle undefined at 0 Hz; use dc_segment")
    if v_o <= 0.0 or v_d <= 0.0:
        raise ValueError("voltages must be > 0")
    g, b = adm.g_series, adm.b_series
    return PowerCircle(
        center_p=v_o * v_o * (g + adm.g_shunt_flow),
        center_q=-v_o * v_o * (b + adm.b_shunt_flow),
        radius=v_o * v_d * math.hypot(g, b),
        v_o=v_o,
        v_d=v_d,
        frequency=adm.frequency,
    )


def _enforced_constraints(origin_only_thermal: bool) -> tuple[Constraint, ...]:
    cs = tuple(Constraint)
    if origin_only_thermal:
        cs = tuple(c for c in cs if c is not Constraint.THERMAL_D)
    return cs


def _min_margin(
    adm: BranchAdmittance,
    lim: OperatingLimits,
    v_o: float,
    v_d: float,
    theta: float,
    enforced: tuple[Constraint, ...],
) -> float:
    op = OperatingPoint(v_o=v_o, v_d=v_d, theta_od=theta, frequency=adm.frequency)
    report = check_limits(branch_flow(op, adm), op, lim)
    return min(report[c].margin for c in enforced)


def feasible_region(
    lim: OperatingLimits,
    adm: BranchAdmittance,
    f: Frequency,
    n_vd: int = 41,
    n_theta: int = 721,
    v_o: float = 1.0,
    origin_only_thermal: bool = False,
) -> FeasibleRegion:
    """Sample the (v_d, theta) box, flag feasibility, and extract the region
    boundary as the feasibility transition contour.

    Boundary vertices are refined to the constraint surface by bisection along
    lattice segments (accuracy ~1e-9 in the margins); the polyline is ordered
    by angle around the boundary centroid.
    """
    if f.is_dc:
        raise ValueError("use dc_segment at 0 Hz")
    if f != adm.frequency:
        raise ValueError("admittance evaluated at a different frequency")
    if n_vd < 2 or n_theta < 3:
        raise ValueError("need n_vd >= 2 and n_theta >= 3")

    enforced = _enforced_constraints(origin_only_thermal)
    vd_axis = np.linspace(lim.v_min, lim.v_max, n_vd)
    th_axis = np.linspace(-lim.theta_max, lim.theta_max, n_theta)
    vg, tg = np.meshgrid(vd_axis, th_axis, indexing="ij")
    po, qo, pd, qd = grid_flows(adm, v_o, vg, tg)

    feas = np.ones_like(po, dtype=bool)
    # voltage-box/angle-box samples are feasible by construction except for v_o
    if not lim.v_min <= v_o <= lim.v_max:
        feas[:] = False
    feas &= np.hypot(po, qo) <= lim.s_max
    if not origin_only_thermal:
        feas &= np.hypot(pd, qd) <= lim.s_max

    samples = tuple(
        RegionSample(
            v_d=float(vg[i, j]),
            theta=float(tg[i, j]),
            p_o=float(po[i, j]),
            q_o=float(qo[i, j]),
            feasible=bool(feas[i, j]),
        )
        for i in range(n_vd)
        for j in range(n_theta)
    )
    if not feas.any():
        raise EmptyRegion(f"no feasible sample at {f.hertz} Hz")

    boundary_pts: list[tuple[float, float]] = []

    def refine(i0: int, j0: int, i1: int, j1: int) -> None:
        """Crossing point between feasible (i0,j0) and infeasible (i1,j1)."""
        a = (float(vg[i0, j0]), float(tg[i0, j0]))
        b = (float(vg[i1, j1]), float(tg[i1, j1]))

        def margin_at(t: float) -> float:
            vd = a[0] + t * (b[0] - a[0])
            th = a[1] + t * (b[1] - a[1])
            return _min_margin(adm, lim, v_o, vd, th, enforced)

        m0 = margin_at(0.0)
        if m0 <= 0.0:
            boundary_pts.append((float(po[i0, j0]), float(qo[i0, j0])))
            return
        t_star = brentq(margin_at, 0.0, 1.0, xtol=1e-12)
        vd = a[0] + t_star * (b[0] - a[0])
        th = a[1] + t_star * (b[1] - a[1])
        p, q, _, _ = grid_flows(adm, v_o, np.asarray(vd), np.asarray(th))
        boundary_pts.append((float(p), float(q)))

    for i in range(n_vd):
        for j in range(n_theta):
            if not feas[i, j]:
                continue
            on_domain_edge = i in (0, n_vd - 1) or j in (0, n_theta - 1)
            if on_domain_edge:
                boundary_pts.append((float(po[i, j]), float(qo[i, j])))
            for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                ni, nj = i + di, j + dj
                if 0 <= ni < n_vd and 0 <= nj < n_theta and not feas[ni, nj]:
                    refine(i, j, ni, nj)

    cp = sum(p for p, _ in boundary_pts) / len(boundary_pts)
    cq = sum(q for _, q in boundary_pts) / len(boundary_pts)
    boundary = tuple(
        sorted(boundary_pts, key=lambda pq: math.atan2(pq[1] - cq, pq[0] - cp))
    )
    return FeasibleRegion(frequency=f, samples=samples, boundary=boundary)


def dc_segment(
    v_o: float,
    lim: OperatingLimits,
    adm: BranchAdmittance,
    k: float,
    n_vd: int = 41,
    origin_only_thermal: bool = False,
) -> FeasibleRegion:
    """Feasible region at 0 Hz: the segment Q = 0, P between the voltage-limit
    endpoints, clipped by the thermal limits."""
    if not adm.frequency.is_dc:
        raise ValueError("dc_segment requires an admittance evaluated at 0 Hz")
    if adm.g_series <= 0.0:
        raise ZeroResistanceAtDc("DC segment undefined for zero series resistance")
    if not lim.v_min <= v_o <= lim.v_max:
        raise EmptyRegion("origin voltage outside its limits")

    g, gsh = adm.g_series, adm.g_shunt_flow

    def p_origin(vd: float) -> float:
        return k * (v_o * v_o * (g + gsh) - v_o * vd * g)

    def p_dest(vd: float) -> float:
        return k * (vd * vd * (g + gsh) - vd * v_o * g)

    def flags(vd: float) -> bool:
        ok = abs(p_origin(vd)) <= lim.s_max
        if not origin_only_thermal:
            ok = ok and abs(p_dest(vd)) <= lim.s_max
        return ok

    # candidate v_d values bounding the feasible interval: box ends plus the
    # thermal crossings of the (linear) origin and (quadratic) destination flows
    candidates = [lim.v_min, lim.v_max]
    for sgn in (1.0, -1.0):
        candidates.append((v_o * v_o * (g + gsh) - sgn * lim.s_max / k) / (v_o * g))
    if not origin_only_thermal:
        a, b2 = g + gsh, -v_o * g
        for sgn in (1.0, -1.0):
            disc = b2 * b2 + 4.0 * a * sgn * lim.s_max / k
            if disc >= 0.0 and a != 0.0:
                sq = math.sqrt(disc)
                candidates.extend([(-b2 - sq) / (2.0 * a), (-b2 + sq) / (2.0 * a)])
    feas_vd = [
        min(max(vd, lim.v_min), lim.v_max)
        for vd in candidates
        if lim.v_min - 1e-9 <= vd <= lim.v_max + 1e-9 and flags(min(max(vd, lim.v_min), lim.v_max))
    ]
    if not feas_vd:
        raise EmptyRegion("thermal limits exclude the whole voltage range at 0 Hz")
    p_values = [p_origin(vd) for vd in feas_vd]
    boundary = ((min(p_values), 0.0), (max(p_values), 0.0))

    vd_axis = np.linspace(lim.v_min, lim.v_max, n_vd)
    samples = tuple(
        RegionSample(
            v_d=float(vd),
            theta=0.0,
            p_o=p_origin(float(vd)),
            q_o=0.0,
            feasible=flags(float(vd)),
        )
        for vd in vd_axis
    )
    return FeasibleRegion(frequency=adm.frequency, samples=samples, boundary=boundary)
