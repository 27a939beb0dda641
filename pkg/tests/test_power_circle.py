import math

import numpy as np
import pytest

from lfacline import (
    EmptyRegion,
    Frequency,
    OperatingLimits,
    OperatingPoint,
    ShuntConvention,
    admittance_from_params,
    circle,
    dc_segment,
    feasible_region,
    origin_flow,
)

TH40 = math.radians(40.0)


def _adm(line, base, hz, convention=ShuntConvention.TOTAL_CHARGING):
    return admittance_from_params(line, base, Frequency(hz), convention)


class TestCircle:
    def test_example_total_charging(self, line_300km, base_345kv):
        c = circle(1.0, 1.1, _adm(line_300km, base_345kv, 60.0))
        assert c.center_p == pytest.approx(1.0648088, rel=1e-6)
        assert c.center_q == pytest.approx(7.2577069, rel=1e-6)
        assert c.radius == pytest.approx(9.4625228, rel=1e-6)

    def test_example_per_end_half(self, line_300km, base_345kv):
        adm = _adm(line_300km, base_345kv, 60.0, ShuntConvention.PER_END_HALF)
        c = circle(1.0, 1.1, adm)
        assert c.center_p == pytest.approx(1.0648088, rel=1e-6)
        assert c.center_q == pytest.approx(7.8969219, rel=1e-6)
        assert c.radius == pytest.approx(9.4625228, rel=1e-6)

    def test_on_circle_identity(self, line_300km, base_345kv):
        rng = np.random.default_rng(5)
        adm = _adm(line_300km, base_345kv, 47.3)
        c = circle(1.0, 1.03, adm)
        for theta in rng.uniform(-math.pi, math.pi, 100):
            op = OperatingPoint(1.0, 1.03, float(theta), Frequency(47.3))
            p, q = origin_flow(op, adm)
            dist = math.hypot(p - c.center_p, q - c.center_q)
            assert abs(dist - c.radius) <= 1e-9

    def test_radius_scales_with_v_d(self, line_300km, base_345kv):
        adm = _adm(line_300km, base_345kv, 60.0)
        r_min = circle(1.0, 0.9, adm).radius
        r_max = circle(1.0, 1.1, adm).radius
        assert r_max / r_min == pytest.approx(1.1 / 0.9, rel=1e-12)

    def test_radius_monotone_toward_dc_limit(self, line_300km, base_345kv):
        r_pu = 0.05709 * 300 / base_345kv.z_base
        bound = 1.0 * 1.1 / r_pu
        radii = [
            circle(1.0, 1.1, _adm(line_300km, base_345kv, hz)).radius
            for hz in (80.0, 60.0, 40.0, 20.0, 10.0, 5.0, 1.0, 0.1, 0.01)
        ]
        assert all(b > a for a, b in zip(radii, radii[1:]))
        assert all(r < bound for r in radii)
        assert radii[-1] > 0.999 * bound

    def test_center_p_non_increasing_in_frequency(self, line_300km, base_345kv):
        centers = [
            circle(1.0, 1.0, _adm(line_300km, base_345kv, hz)).center_p
            for hz in np.arange(0.5, 80.5, 0.5)
        ]
        assert all(b <= a for a, b in zip(centers, centers[1:]))

    def test_center_q_peaks_near_r_over_l(self, line_300km, base_345kv):
        # the series term alone peaks exactly at omega = R/L; the charging
        # term shifts the argmax down by ~0.03 Hz for this line
        r = 0.05709 * 300
        l = 1.214e-3 * 300
        f_rl = (r / l) / (2 * math.pi)
        grid = np.arange(6.0, 9.0, 0.002)
        values = [
            circle(1.0, 1.0, _adm(line_300km, base_345kv, float(hz))).center_q
            for hz in grid
        ]
        f_star = float(grid[int(np.argmax(values))])
        assert f_star == pytest.approx(f_rl, abs=0.05)

    def test_rejects_dc(self, line_300km, base_345kv):
        with pytest.raises(ValueError):
            circle(1.0, 1.0, _adm(line_300km, base_345kv, 0.0))


class TestFeasibleRegion:
    def test_60hz_max_on_outer_circle(self, line_300km, base_345kv, study_limits):
        f = Frequency(60.0)
        region = feasible_region(
            study_limits, _adm(line_300km, base_345kv, 60.0), f,
            origin_only_thermal=True,
        )
        best = max((s for s in region.samples if s.feasible), key=lambda s: s.p_o)
        assert best.p_o == pytest.approx(6.2031642, rel=1e-6)
        assert best.v_d == pytest.approx(1.1)
        assert best.theta == pytest.approx(TH40)

    def test_thermal_arc_reached_at_onset(self, line_300km, base_345kv, study_limits):
        hz = 41.2305  # detected region-1/2 transition for the 300 km case
        region = feasible_region(
            study_limits, _adm(line_300km, base_345kv, hz), Frequency(hz),
            origin_only_thermal=True,
        )
        p, q = max(region.boundary, key=lambda pq: pq[0])
        assert p == pytest.approx(8.9842, abs=2e-3)
        assert math.hypot(p, q) == pytest.approx(study_limits.s_max, abs=1e-3)

    def test_negative_reactive_at_low_frequency(self, line_300km, base_345kv, study_limits):
        for hz in (15.48, 10.0):
            region = feasible_region(
                study_limits, _adm(line_300km, base_345kv, hz), Frequency(hz),
                origin_only_thermal=True,
            )
            p, q = max(region.boundary, key=lambda pq: pq[0])
            assert q < 0.0

    def test_boundary_points_feasible(self, line_300km, base_345kv, study_limits):
        # invert the PQ point back to (v_d, theta) and check every limit
        hz = 25.0
        adm = _adm(line_300km, base_345kv, hz)
        region = feasible_region(
            study_limits, adm, Frequency(hz), n_vd=21, n_theta=181,
            origin_only_thermal=True,
        )
        g, b = adm.g_series, adm.b_series
        k_adm = math.hypot(g, b)
        phi = math.atan2(b, g)
        c_p = g + adm.g_shunt_flow
        c_q = -(b + adm.b_shunt_flow)
        for p, q in region.boundary:
            rho = math.hypot(p - c_p, q - c_q)
            v_d = rho / k_adm
            theta = math.atan2(c_q - q, c_p - p) + phi
            assert study_limits.v_min - 1e-6 <= v_d <= study_limits.v_max + 1e-6
            assert abs(theta) <= study_limits.theta_max + 1e-6
            assert math.hypot(p, q) <= study_limits.s_max + 1e-6

    def test_infeasible_samples_violate_a_constraint(
        self, line_300km, base_345kv, study_limits
    ):
        hz = 20.0
        adm = _adm(line_300km, base_345kv, hz)
        region = feasible_region(
            study_limits, adm, Frequency(hz), n_vd=15, n_theta=91,
            origin_only_thermal=True,
        )
        flagged = [s for s in region.samples if not s.feasible]
        assert flagged
        for s in flagged:
            assert math.hypot(s.p_o, s.q_o) > study_limits.s_max

    def test_region_nesting_in_angle_regime(self, line_300km, base_345kv, study_limits):
        maxima = []
        for hz in (58.0, 52.0, 46.0):
            region = feasible_region(
                study_limits, _adm(line_300km, base_345kv, hz), Frequency(hz),
                n_vd=11, n_theta=181, origin_only_thermal=True,
            )
            maxima.append(max(s.p_o for s in region.samples if s.feasible))
        assert maxima[0] < maxima[1] < maxima[2]

    def test_empty_region(self, line_300km, base_345kv):
        lim = OperatingLimits(s_max=9.0, v_min=1.2, v_max=1.3, theta_max=0.5)
        with pytest.raises(EmptyRegion):
            feasible_region(
                lim, _adm(line_300km, base_345kv, 60.0), Frequency(60.0),
                n_vd=5, n_theta=9,
            )

    def test_rejects_dc(self, line_300km, base_345kv, study_limits):
        with pytest.raises(ValueError):
            feasible_region(
                study_limits, _adm(line_300km, base_345kv, 0.0), Frequency(0.0)
            )


class TestDcSegment:
    def test_endpoints(self, line_300km, base_345kv, study_limits):
        region = dc_segment(
            1.0, study_limits, _adm(line_300km, base_345kv, 0.0), k=1.0
        )
        (p_lo, q_lo), (p_hi, q_hi) = region.boundary
        assert q_lo == 0.0 and q_hi == 0.0
        assert p_lo == pytest.approx(-6.9495533, rel=1e-6)
        assert p_hi == pytest.approx(+6.9495533, rel=1e-6)

    def test_zero_q_extent(self, line_300km, base_345kv, study_limits):
        region = dc_segment(
            1.0, study_limits, _adm(line_300km, base_345kv, 0.0), k=1.0
        )
        assert all(s.q_o == 0.0 for s in region.samples)
        assert all(s.theta == 0.0 for s in region.samples)

    def test_degenerate_voltage_range(self, line_300km, base_345kv):
        lim = OperatingLimits(s_max=9.0, v_min=1.0, v_max=1.0, theta_max=0.5)
        region = dc_segment(1.0, lim, _adm(line_300km, base_345kv, 0.0), k=1.0)
        (p_lo, _), (p_hi, _) = region.boundary
        assert p_lo == pytest.approx(0.0, abs=1e-12)
        assert p_hi == pytest.approx(0.0, abs=1e-12)

    def test_thermal_clipping(self, line_300km, base_345kv):
        lim = OperatingLimits(s_max=5.0, v_min=0.9, v_max=1.1, theta_max=0.5)
        adm = _adm(line_300km, base_345kv, 0.0)
        region = dc_segment(1.0, lim, adm, k=1.0)
        (p_lo, _), (p_hi, _) = region.boundary
        # receiving-end |P_d| = 5 clips the import direction before P_o = -5:
        # v_d^2 - v_d = 5R gives v_d = 1.0674038, P_o(v_d) = -4.6842629
        assert p_lo == pytest.approx(-4.6842629, rel=1e-6)
        assert p_hi == pytest.approx(+5.0, abs=1e-9)
        origin_only = dc_segment(1.0, lim, adm, k=1.0, origin_only_thermal=True)
        (p_lo_o, _), (p_hi_o, _) = origin_only.boundary
        assert p_lo_o == pytest.approx(-5.0, abs=1e-9)
        assert p_hi_o == pytest.approx(+5.0, abs=1e-9)

    def test_origin_voltage_outside_limits(self, line_300km, base_345kv):
        lim = OperatingLimits(s_max=9.0, v_min=1.05, v_max=1.1, theta_max=0.5)
        with pytest.raises(EmptyRegion):
            dc_segment(1.0, lim, _adm(line_300km, base_345kv, 0.0), k=1.0)
