import math

import numpy as np
import pytest

from lfacline import (
    Constraint,
    Frequency,
    Infeasible,
    OperatingLimits,
    OperatingPoint,
    admittance_from_params,
    branch_flow,
    calibrate_length,
    check_limits,
    classify_region,
    dc_max_power,
    grid_oracle,
    max_power_at_freq,
    optimal_frequency,
    sweep,
)
from lfacline.max_transfer import SweepResult

TH40 = math.radians(40.0)


@pytest.fixture(scope="module")
def factory(line_300km, base_345kv):
    def build(f: Frequency):
        return admittance_from_params(line_300km, base_345kv, f)

    return build


@pytest.fixture(scope="module")
def calibrated_sweep(factory, study_limits):
    return sweep(factory, study_limits, 0.0, 60.0, 0.25, origin_only_thermal=True)


def _solve(factory, lim, hz, origin_only=True):
    f = Frequency(hz)
    return max_power_at_freq(factory(f), lim, f, origin_only_thermal=origin_only)


class TestMaxPowerAtFreq:
    def test_60hz_angle_and_voltage_constrained(self, factory, study_limits):
        pt = _solve(factory, study_limits, 60.0)
        assert pt.p_max == pytest.approx(6.2031642, rel=1e-6)
        assert pt.v_d_star == 1.1
        assert pt.theta_star == TH40
        assert pt.active_set == {Constraint.ANGLE_POS, Constraint.V_D_MAX}
        assert pt.region_id == 1

    def test_30hz_thermal_plateau(self, factory, study_limits):
        pt = _solve(factory, study_limits, 30.0)
        assert pt.p_max == pytest.approx(9.0, abs=1e-9)
        assert pt.active_set == {Constraint.THERMAL_O}
        assert pt.region_id == 3
        f = Frequency(30.0)
        op = OperatingPoint(1.0, pt.v_d_star, pt.theta_star, f)
        flow = branch_flow(op, factory(f))
        assert abs(flow.q_o) <= 1e-6  # reactive flow vanishes at the plateau

    def test_50hz_between(self, factory, study_limits):
        pt = _solve(factory, study_limits, 50.0)
        # value pinned by the brute-force oracle scripts used to freeze it
        assert pt.p_max == pytest.approx(7.43389, abs=1e-4)
        assert 6.2032 < pt.p_max < 9.0
        assert pt.active_set == {Constraint.ANGLE_POS, Constraint.V_D_MAX}

    def test_41hz_angle_and_thermal(self, factory, study_limits):
        pt = _solve(factory, study_limits, 41.0)
        assert pt.active_set == {Constraint.ANGLE_POS, Constraint.THERMAL_O}
        assert pt.region_id == 2
        assert pt.v_d_star < 1.1

    def test_10hz_voltage_and_thermal(self, factory, study_limits):
        pt = _solve(factory, study_limits, 10.0)
        assert pt.active_set == {Constraint.THERMAL_O, Constraint.V_D_MIN}
        assert pt.region_id == 4
        assert pt.v_d_star == 0.9
        f = Frequency(10.0)
        op = OperatingPoint(1.0, pt.v_d_star, pt.theta_star, f)
        flow = branch_flow(op, factory(f))
        assert flow.q_o < -0.5  # markedly negative reactive flow in this regime

    def test_maximizers_are_feasible(self, factory, study_limits):
        for hz in (0.5, 5.0, 14.0, 15.5, 25.0, 39.9, 41.1, 47.0, 60.0):
            pt = _solve(factory, study_limits, hz)
            f = Frequency(hz)
            op = OperatingPoint(1.0, pt.v_d_star, pt.theta_star, f)
            report = check_limits(branch_flow(op, factory(f)), op, study_limits)
            for c in Constraint:
                if c is Constraint.THERMAL_D:
                    continue
                assert report[c].margin >= -1e-6, (hz, c)

    def test_p_max_reproducible_from_maximizer(self, factory, study_limits):
        for hz in (7.0, 33.0, 52.0):
            pt = _solve(factory, study_limits, hz)
            f = Frequency(hz)
            op = OperatingPoint(1.0, pt.v_d_star, pt.theta_star, f)
            flow = branch_flow(op, factory(f))
            assert flow.p_o == pytest.approx(pt.p_max, abs=1e-9)

    def test_infeasible_origin_voltage(self, factory):
        lim = OperatingLimits(s_max=9.0, v_min=1.2, v_max=1.3, theta_max=0.5)
        with pytest.raises(Infeasible):
            _solve(factory, lim, 30.0)

    def test_both_ends_mode_is_more_restrictive(self, factory, study_limits):
        for hz in (41.0, 40.0, 25.0):
            p_origin = _solve(factory, study_limits, hz, origin_only=True).p_max
            p_both = _solve(factory, study_limits, hz, origin_only=False).p_max
            assert p_both <= p_origin + 1e-9

    def test_degenerate_box_single_point(self, factory, base_345kv):
        lim = OperatingLimits(s_max=9.0, v_min=1.0, v_max=1.0, theta_max=1e-9)
        pt = _solve(factory, lim, 30.0)
        oracle = grid_oracle(factory(Frequency(30.0)), lim, Frequency(30.0), 100, True)
        assert pt.p_max == pytest.approx(oracle.p_max, abs=1e-9)
        assert abs(pt.p_max) < 1e-6


class TestDcMaxPower:
    def test_calibrated_example(self, factory, study_limits):
        pt = dc_max_power(factory(Frequency(0.0)), study_limits)
        assert pt.p_max == pytest.approx(6.9495533, rel=1e-6)
        assert pt.v_d_star == 0.9
        assert pt.active_set == {Constraint.V_D_MIN}
        assert pt.region_id == 5
        assert pt.theta_star == 0.0

    def test_no_voltage_difference(self, factory):
        lim = OperatingLimits(s_max=9.0, v_min=1.0, v_max=1.0, theta_max=0.5)
        pt = dc_max_power(factory(Frequency(0.0)), lim)
        assert pt.p_max == pytest.approx(0.0, abs=1e-12)

    def test_thermal_clipping(self, factory):
        lim = OperatingLimits(s_max=5.0, v_min=0.9, v_max=1.1, theta_max=0.5)
        pt = dc_max_power(factory(Frequency(0.0)), lim)
        assert pt.p_max == pytest.approx(5.0, abs=1e-9)
        assert Constraint.THERMAL_O in pt.active_set
        assert pt.v_d_star > 0.9

    def test_region_is_always_5(self, factory, study_limits):
        assert dc_max_power(factory(Frequency(0.0)), study_limits).region_id == 5


class TestSweep:
    def test_five_regions_in_order(self, calibrated_sweep):
        regions = [p.region_id for p in reversed(calibrated_sweep.points)]
        runs = [regions[0]]
        for r in regions[1:]:
            if r != runs[-1]:
                runs.append(r)
        assert runs == [1, 2, 3, 4, 5]

    def test_breakpoints_near_reference_values(self, calibrated_sweep):
        located = {
            (bp.region_from, bp.region_to): bp.frequency.hertz
            for bp in calibrated_sweep.breakpoints
        }
        assert located[(1, 2)] == pytest.approx(41.24, abs=0.5)
        assert located[(2, 3)] == pytest.approx(39.79, abs=0.5)
        assert located[(3, 4)] == pytest.approx(15.48, abs=0.5)

    def test_thermal_plateau_values(self, calibrated_sweep, study_limits):
        plateau = [p for p in calibrated_sweep.points if p.region_id == 3]
        assert plateau
        for p in plateau:
            assert p.p_max == pytest.approx(study_limits.s_max, abs=1e-9)

    def test_dc_point_and_crossover(self, calibrated_sweep):
        assert calibrated_sweep.dc_point is not None
        assert calibrated_sweep.dc_point.p_max == pytest.approx(6.9495533, rel=1e-6)
        assert calibrated_sweep.crossover_hz == pytest.approx(53.52, abs=1.0)

    def test_continuity_across_breakpoints(self, calibrated_sweep, factory, study_limits):
        eps = 1e-4  # small enough that the curve's slope contributes < 1e-4
        for bp in calibrated_sweep.breakpoints:
            hz = bp.frequency.hertz
            if hz == 0.0:
                continue  # the DC endpoint is a genuine discontinuity
            lo = _solve(factory, study_limits, hz - eps)
            hi = _solve(factory, study_limits, hz + eps)
            assert abs(lo.p_max - hi.p_max) <= 1e-4

    def test_monotone_decrease_in_region_1(self, calibrated_sweep):
        r1 = [p for p in calibrated_sweep.points if p.region_id == 1]
        values = [p.p_max for p in sorted(r1, key=lambda p: p.frequency.hertz)]
        assert all(b < a for a, b in zip(values, values[1:]))

    def test_grid_includes_endpoint(self, factory, study_limits):
        res = sweep(factory, study_limits, 10.0, 10.7, 0.5, origin_only_thermal=True)
        hzs = [p.frequency.hertz for p in res.points]
        assert hzs[0] == 10.0 and hzs[-1] == pytest.approx(10.7)

    def test_invalid_ranges(self, factory, study_limits):
        with pytest.raises(ValueError):
            sweep(factory, study_limits, 10.0, 5.0, 0.5)
        with pytest.raises(ValueError):
            sweep(factory, study_limits, 0.0, 60.0, 0.0)


class TestOptimalFrequency:
    def test_plateau_lower_edge(self, calibrated_sweep):
        f_opt, p_opt = optimal_frequency(calibrated_sweep)
        assert p_opt == pytest.approx(9.0, abs=1e-6)
        # lowest frequency attaining the plateau, just above the 3->4 transition
        assert 15.4 < f_opt.hertz < 15.6

    def test_single_point(self, factory, study_limits):
        pt = _solve(factory, study_limits, 30.0)
        res = SweepResult(points=(pt,), breakpoints=(), dc_point=None, crossover_hz=None)
        f_opt, p_opt = optimal_frequency(res)
        assert f_opt.hertz == 30.0 and p_opt == pt.p_max

    def test_monotone_decreasing_sweep_returns_low_end(self, factory, study_limits):
        res = sweep(factory, study_limits, 45.0, 60.0, 1.0, origin_only_thermal=True)
        f_opt, _ = optimal_frequency(res)
        assert f_opt.hertz == 45.0

    def test_empty_sweep_rejected(self):
        with pytest.raises(ValueError):
            optimal_frequency(
                SweepResult(points=(), breakpoints=(), dc_point=None, crossover_hz=None)
            )


class TestGridOracle:
    def test_agreement_with_enumeration(self, factory, study_limits):
        rng = np.random.default_rng(11)
        for origin_only in (True, False):
            for hz in rng.uniform(0.5, 60.0, 6):
                f = Frequency(float(hz))
                adm = factory(f)
                enum = max_power_at_freq(adm, study_limits, f, origin_only)
                oracle = grid_oracle(adm, study_limits, f, 300, origin_only)
                assert abs(enum.p_max - oracle.p_max) <= 1e-3, hz
                assert enum.p_max >= oracle.p_max - 1e-3  # oracle dominance

    def test_dc_oracle(self, factory, study_limits):
        pt = grid_oracle(factory(Frequency(0.0)), study_limits, Frequency(0.0), 500)
        assert pt.p_max == pytest.approx(6.9495533, rel=1e-4)

    def test_resolution_guard(self, factory, study_limits):
        with pytest.raises(ValueError):
            grid_oracle(factory(Frequency(30.0)), study_limits, Frequency(30.0), 50)


def test_classify_region():
    f = Frequency(30.0)
    assert classify_region(frozenset({Constraint.THERMAL_O}), f) == 3
    assert classify_region(
        frozenset({Constraint.THERMAL_O, Constraint.ANGLE_POS}), f
    ) == 2
    assert classify_region(
        frozenset({Constraint.THERMAL_O, Constraint.V_D_MIN}), f
    ) == 4
    assert classify_region(
        frozenset({Constraint.ANGLE_POS, Constraint.V_D_MAX}), f
    ) == 1
    assert classify_region(
        frozenset({Constraint.THERMAL_D, Constraint.ANGLE_NEG}), f
    ) == 2
    # a triple-active vertex counts as the thermal+angle regime
    assert classify_region(
        frozenset({Constraint.THERMAL_O, Constraint.ANGLE_POS, Constraint.V_D_MAX}), f
    ) == 2
    assert classify_region(frozenset(), Frequency(0.0)) == 5


def test_calibrate_length(line_300km, base_345kv, study_limits):
    ell = calibrate_length(line_300km, base_345kv, study_limits, target_onset_hz=41.24)
    assert ell == pytest.approx(299.914, abs=0.01)
