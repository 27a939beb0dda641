"""Per-unit steady-state power flow on a single Pi branch with frequency as a
variable, including the 0 Hz DC generalization and operating-limit checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import FrequencyMismatch, InductiveShuntAtDc, ZeroResistanceAtDc
from .line_model import (
    DistributedLineParams,
    Frequency,
    LumpedPiBranch,
    PerUnitBase,
    PiConstruction,
    exact_equivalent_pi,
    lump_parameters,
)

__all__ = [
    "ACTIVATION_TOL",
    "K_DC_THREE_CONDUCTOR",
    "ShuntConvention",
    "BranchAdmittance",
    "OperatingPoint",
    "FlowResult",
    "OperatingLimits",
    "Constraint",
    "ConstraintStatus",
    "ConstraintReport",
    "ShuntKind",
    "branch_admittance",
    "admittance_from_params",
    "shunt_susceptance",
    "origin_flow",
    "destination_flow",
    "branch_flow",
    "grid_flows",
    "dc_flow",
    "check_limits",
]

# A constraint counts as active when |margin| is at or below this (p.u. or rad).
ACTIVATION_TOL = 1e-6

# DC voltage-choice factor for a 3-conductor circuit with pole-to-neutral DC
# voltage equal to the AC RMS phase-to-neutral value.
K_DC_THREE_CONDUCTOR = 2.0 / (3.0 * math.sqrt(3.0))


class ShuntConvention(Enum):
    """How much of the branch charging enters the flow equations at each end.

    TOTAL_CHARGING applies the full w*Csh (and Gsh) of the branch at the
    evaluated end; PER_END_HALF applies the Pi model's half. TOTAL_CHARGING is
    the calibrated default: it reproduces the reference example's constraint
    breakpoints, where PER_END_HALF misses two of them by over 1 Hz.
    """

    TOTAL_CHARGING = "total"
    PER_END_HALF = "per_end"


@dataclass(frozen=True)
class BranchAdmittance:
    """Frequency-evaluated per-unit branch admittance.

    g_series/b_series are the series-element conductance/susceptance
    G = R/(R^2+X^2), B = -X/(R^2+X^2). g_shunt_end/b_shunt_end hold the
    physical per-end (half-total) shunt values; the flow equations scale them
    by the chosen convention (see g_shunt_flow/b_shunt_flow).
    """

    g_series: float
    b_series: float
    g_shunt_end: float
    b_shunt_end: float
    frequency: Frequency
    shunt_convention: ShuntConvention = ShuntConvention.TOTAL_CHARGING

    def __post_init__(self) -> None:
        if self.g_series < 0.0:
            raise ValueError("g_series must be >= 0")
        if self.g_series == 0.0 and self.b_series == 0.0:
            raise ValueError("series admittance must be nonzero")
        if self.frequency.is_dc and (self.b_series != 0.0 or self.b_shunt_end != 0.0):
            raise ValueError("susceptances must vanish at 0 Hz")

    @property
    def _shunt_scale(self) -> float:
        return 2.0 if self.shunt_convention is ShuntConvention.TOTAL_CHARGING else 1.0

    @property
    def g_shunt_flow(self) -> float:
        """Shunt conductance as used at each end of the flow equations."""
        return self.g_shunt_end * self._shunt_scale

    @property
    def b_shunt_flow(self) -> float:
        """Shunt susceptance as used at each end of the flow equations."""
        return self.b_shunt_end * self._shunt_scale


def branch_admittance(
    branch: LumpedPiBranch,
    base: PerUnitBase,
    f: Frequency,
    convention: ShuntConvention = ShuntConvention.TOTAL_CHARGING,
) -> BranchAdmittance:
    """Convert a Pi branch (SI) to the per-unit admittance used by the flows.

    The branch must have been constructed at the same frequency f. At 0 Hz the
    series conductance becomes 1/R; ZeroResistanceAtDc is raised when R = 0.
    """
    z_pu = base.impedance_to_pu(branch.z_series)
    y_end_pu = base.admittance_to_pu(branch.y_shunt_end)
    r, x = z_pu.real, z_pu.imag
    if f.is_dc:
        if r == 0.0:
            raise ZeroResistanceAtDc("series conductance 1/R unbounded at 0 Hz")
        g, b = 1.0 / r, 0.0
    else:
        d = r * r + x * x
        if d == 0.0:
            raise ValueError("zero series impedance")
        g, b = r / d, -x / d
    return BranchAdmittance(
        g_series=g,
        b_series=b,
        g_shunt_end=y_end_pu.real,
        b_shunt_end=y_end_pu.imag,
        frequency=f,
        shunt_convention=convention,
    )


def admittance_from_params(
    params: DistributedLineParams,
    base: PerUnitBase,
    f: Frequency,
    convention: ShuntConvention = ShuntConvention.TOTAL_CHARGING,
    construction: PiConstruction = PiConstruction.NAIVE_LUMPING,
) -> BranchAdmittance:
    """Lump the line at f and convert to per-unit in one step."""
    if construction is PiConstruction.NAIVE_LUMPING:
        branch = lump_parameters(params, f)
    else:
        branch = exact_equivalent_pi(params, f)
    return branch_admittance(branch, base, f, convention)


class ShuntKind(Enum):
    CAPACITIVE = "capacitive"
    INDUCTIVE = "inductive"


def shunt_susceptance(kind: ShuntKind, c_or_l: float, f: Frequency) -> float:
    """Susceptance (S) of a bus shunt element: w*C capacitive, -1/(w*L) inductive.

    An inductive shunt at 0 Hz is an error: the element degenerates to a short
    and has no steady-state susceptance.
    """
    if c_or_l <= 0.0:
        raise ValueError("element value must be > 0")
    if kind is ShuntKind.CAPACITIVE:
        return f.omega * c_or_l
    if f.is_dc:
        raise InductiveShuntAtDc("inductive shunt susceptance unbounded at 0 Hz")
    return -1.0 / (f.omega * c_or_l)


@dataclass(frozen=True)
class OperatingPoint:
    """Bus voltages (p.u.), angle difference theta_o - theta_d (rad), frequency."""

    v_o: float
    v_d: float
    theta_od: float
    frequency: Frequency

    def __post_init__(self) -> None:
        if self.v_o <= 0.0 or self.v_d <= 0.0:
            raise ValueError("voltages must be > 0")
        if self.frequency.is_dc and self.theta_od != 0.0:
            raise ValueError("angle difference must be zero at 0 Hz")


@dataclass(frozen=True)
class FlowResult:
    """Active/reactive injections into the branch at both ends (p.u.)."""

    p_o: float
    q_o: float
    p_d: float
    q_d: float

    @property
    def s_o(self) -> float:
        return math.hypot(self.p_o, self.q_o)

    @property
    def s_d(self) -> float:
        return math.hypot(self.p_d, self.q_d)


@dataclass(frozen=True)
class OperatingLimits:
    """Thermal, voltage, and angle limits plus the DC voltage-choice factor k."""

    s_max: float
    v_min: float
    v_max: float
    theta_max: float
    k_dc: float = 1.0

    def __post_init__(self) -> None:
        if self.s_max <= 0.0:
            raise ValueError("s_max must be > 0")
        if not 0.0 < self.v_min <= self.v_max:
            raise ValueError("require 0 < v_min <= v_max")
        if not 0.0 < self.theta_max < math.pi / 2.0:
            raise ValueError("require 0 < theta_max < pi/2")
        if not 0.0 < self.k_dc <= 1.0:
            raise ValueError("require 0 < k_dc <= 1")


def _require_same_frequency(op: OperatingPoint, adm: BranchAdmittance) -> None:
    if op.frequency != adm.frequency:
        raise FrequencyMismatch(
            f"operating point at {op.frequency.hertz} Hz, "
            f"admittance at {adm.frequency.hertz} Hz"
        )


def origin_flow(op: OperatingPoint, adm: BranchAdmittance) -> tuple[float, float]:
    """(P_o, Q_o) injected at the origin bus. Positive frequency only."""
    _require_same_frequency(op, adm)
    if op.frequency.is_dc:
        raise ValueError("origin_flow requires f > 0; use dc_flow at 0 Hz")
    g, b = adm.g_series, adm.b_series
    gsh, bsh = adm.g_shunt_flow, adm.b_shunt_flow
    vo, vd, th = op.v_o, op.v_d, op.theta_od
    p = vo * vo * (g + gsh) - vo * vd * (g * math.cos(th) + b * math.sin(th))
    q = -vo * vo * (b + bsh) - vo * vd * (g * math.sin(th) - b * math.cos(th))
    return p, q


def destination_flow(op: OperatingPoint, adm: BranchAdmittance) -> tuple[float, float]:
    """(P_d, Q_d) injected at the destination bus: origin equations with the
    bus roles swapped (angle difference negated)."""
    _require_same_frequency(op, adm)
    if op.frequency.is_dc:
        raise ValueError("destination_flow requires f > 0; use dc_flow at 0 Hz")
    g, b = adm.g_series, adm.b_series
    gsh, bsh = adm.g_shunt_flow, adm.b_shunt_flow
    vo, vd, th = op.v_o, op.v_d, -op.theta_od
    p = vd * vd * (g + gsh) - vd * vo * (g * math.cos(th) + b * math.sin(th))
    q = -vd * vd * (b + bsh) - vd * vo * (g * math.sin(th) - b * math.cos(th))
    return p, q


def branch_flow(op: OperatingPoint, adm: BranchAdmittance) -> FlowResult:
    """Flows at both ends in one call."""
    p_o, q_o = origin_flow(op, adm)
    p_d, q_d = destination_flow(op, adm)
    return FlowResult(p_o=p_o, q_o=q_o, p_d=p_d, q_d=q_d)


def grid_flows(
    adm: BranchAdmittance, v_o: float, v_d: np.ndarray, theta: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized (p_o, q_o, p_d, q_d) over arrays of v_d and theta.

    Same equations as origin_flow/destination_flow; used for lattice sampling
    and the brute-force oracle. Positive frequency only.
    """
    if adm.frequency.is_dc:
        raise ValueError("grid_flows requires f > 0; use dc_flow at 0 Hz")
    g, b = adm.g_series, adm.b_series
    gsh, bsh = adm.g_shunt_flow, adm.b_shunt_flow
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    p_o = v_o * v_o * (g + gsh) - v_o * v_d * (g * cos_t + b * sin_t)
    q_o = -v_o * v_o * (b + bsh) - v_o * v_d * (g * sin_t - b * cos_t)
    p_d = v_d * v_d * (g + gsh) - v_d * v_o * (g * cos_t - b * sin_t)
    q_d = -v_d * v_d * (b + bsh) + v_d * v_o * (g * sin_t + b * cos_t)
    return p_o, q_o, p_d, q_d


def dc_flow(op: OperatingPoint, adm: BranchAdmittance, k: float = 1.0) -> FlowResult:
    """Power flow in the 0 Hz limit; reactive flows are identically zero.

    k captures the DC voltage choice (1.0 by default; K_DC_THREE_CONDUCTOR for
    the three-conductor arrangement).
    """
    _require_same_frequency(op, adm)
    if not op.frequency.is_dc:
        raise ValueError("dc_flow requires f = 0")
    g = adm.g_series  # equals 1/R at DC by construction
    gsh = adm.g_shunt_flow
    vo, vd = op.v_o, op.v_d
    p_o = k * (vo * vo * (g + gsh) - vo * vd * g)
    p_d = k * (vd * vd * (g + gsh) - vd * vo * g)
    return FlowResult(p_o=p_o, q_o=0.0, p_d=p_d, q_d=0.0)


class Constraint(Enum):
    """Operating-limit labels used in reports and active sets."""

    THERMAL_O = "THERMAL_O"
    THERMAL_D = "THERMAL_D"
    V_O_MIN = "V_O_MIN"
    V_O_MAX = "V_O_MAX"
    V_D_MIN = "V_D_MIN"
    V_D_MAX = "V_D_MAX"
    ANGLE_POS = "ANGLE_POS"
    ANGLE_NEG = "ANGLE_NEG"


@dataclass(frozen=True)
class ConstraintStatus:
    """margin = limit - value (signed); active when |margin| <= ACTIVATION_TOL."""

    margin: float
    satisfied: bool
    active: bool


@dataclass(frozen=True)
class ConstraintReport:
    """Per-constraint satisfaction, margin, and activity."""

    statuses: dict[Constraint, ConstraintStatus] = field(default_factory=dict)

    def __getitem__(self, c: Constraint) -> ConstraintStatus:
        return self.statuses[c]

    @property
    def all_satisfied(self) -> bool:
        return all(s.satisfied for s in self.statuses.values())

    @property
    def active_set(self) -> frozenset[Constraint]:
        return frozenset(c for c, s in self.statuses.items() if s.active)

    @property
    def violated(self) -> frozenset[Constraint]:
        return frozenset(c for c, s in self.statuses.items() if not s.satisfied)


def check_limits(
    flow: FlowResult, op: OperatingPoint, lim: OperatingLimits
) -> ConstraintReport:
    """Evaluate every operating limit against a flow solution."""
    margins = {
        Constraint.THERMAL_O: lim.s_max - flow.s_o,
        Constraint.THERMAL_D: lim.s_max - flow.s_d,
        Constraint.V_O_MIN: op.v_o - lim.v_min,
        Constraint.V_O_MAX: lim.v_max - op.v_o,
        Constraint.V_D_MIN: op.v_d - lim.v_min,
        Constraint.V_D_MAX: lim.v_max - op.v_d,
        Constraint.ANGLE_POS: lim.theta_max - op.theta_od,
        Constraint.ANGLE_NEG: op.theta_od + lim.theta_max,
    }
    statuses = {
        c: ConstraintStatus(
            margin=m,
            satisfied=m >= -ACTIVATION_TOL,
            active=abs(m) <= ACTIVATION_TOL,
        )
        for c, m in margins.items()
    }
    return ConstraintReport(statuses=statuses)
