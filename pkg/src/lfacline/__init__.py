"""Steady-state analysis of power transmission branches with frequency as an
explicit variable: exact vs lumped-Pi line models, frequency-dependent power
flow down to 0 Hz, constrained maximum-transfer sweeps, and power-circle
feasible regions.
"""

from .config import StudyConfig, load_config, parse_config
from .errors import (
    ConfigError,
    DivisionByZeroAdmittance,
    EmptyRegion,
    FrequencyMismatch,
    Infeasible,
    InductiveShuntAtDc,
    LfaclineError,
    SingularSystem,
    ZeroResistanceAtDc,
)
from .line_model import (
    AbcdMatrix,
    DistributedLineParams,
    Frequency,
    LumpedPiBranch,
    PerUnitBase,
    PiConstruction,
    SilModel,
    abcd_exact,
    abcd_pi,
    characteristic_impedance,
    exact_equivalent_pi,
    gamma_ell_asymptotes,
    gamma_ell_magnitude,
    lump_parameters,
    pi_model_error,
    propagation_constant,
    sil_terminal_voltage,
)
from .max_transfer import (
    Breakpoint,
    MaxTransferPoint,
    SweepResult,
    calibrate_length,
    classify_region,
    dc_max_power,
    grid_oracle,
    max_power_at_freq,
    optimal_frequency,
    sweep,
)
from .power_circle import (
    FeasibleRegion,
    PowerCircle,
    RegionSample,
    circle,
    dc_segment,
    feasible_region,
)
from .power_flow import (
    ACTIVATION_TOL,
    K_DC_THREE_CONDUCTOR,
    BranchAdmittance,
    Constraint,
    ConstraintReport,
    ConstraintStatus,
    FlowResult,
    OperatingLimits,
    OperatingPoint,
    ShuntConvention,
    ShuntKind,
    admittance_from_params,
    branch_admittance,
    branch_flow,
    check_limits,
    dc_flow,
    destination_flow,
    origin_flow,
    shunt_susceptance,
)

__version__ = "0.1.0"
