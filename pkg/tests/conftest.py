import math

import pytest

from lfacline import DistributedLineParams, OperatingLimits, PerUnitBase

# 345 kV ACSR overhead line, manufacturer values.
R_OHM_KM = 0.05709
L_MH_KM = 1.214
C_NF_KM = 9.497
G_S_KM = 0.0


@pytest.fixture(scope="session")
def line_250km() -> DistributedLineParams:
    return DistributedLineParams.from_datasheet(R_OHM_KM, L_MH_KM, C_NF_KM, G_S_KM, 250.0)


@pytest.fixture(scope="session")
def line_300km() -> DistributedLineParams:
    return DistributedLineParams.from_datasheet(R_OHM_KM, L_MH_KM, C_NF_KM, G_S_KM, 300.0)


@pytest.fixture(scope="session")
def base_345kv() -> PerUnitBase:
    return PerUnitBase.from_kv_mva(kv=345.0, mva=100.0)


@pytest.fixture(scope="session")
def study_limits() -> OperatingLimits:
    return OperatingLimits(
        s_max=9.0, v_min=0.9, v_max=1.1, theta_max=math.radians(40.0), k_dc=1.0
    )
