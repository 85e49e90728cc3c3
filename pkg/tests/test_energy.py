import math

import numpy as np
import pytest

from uavcache.energy import (DisplacementPlan, UavPlatform, air_density,
                             airtime_s, displacement_power, energy_efficiency,
                             hover_power, min_descent_speed, total_energy)
from uavcache.errors import ConfigurationError, ConstraintViolationError


class TestAirDensity:
    def test_sea_level(self, platform):
        assert air_density(platform, 0.0) == pytest.approx(1.225)

    def test_one_km(self, platform):
        assert air_density(platform, 1.0) == pytest.approx(
            1.225 * math.exp(-0.118), rel=1e-12)

    def test_monotone(self, platform):
        hs = np.linspace(0.0, 10.0, 50)
        rho = [air_density(platform, h) for h in hs]
        assert all(a > b for a, b in zip(rho, rho[1:]))


class TestHoverPower:
    def test_scalar_oracle_at_sea_level(self, platform):
        rho = 1.225
        expected = (1.91 * rho
                    + 1.1 * 10.2 ** 1.5 / math.sqrt(rho * math.pi * 0.5 ** 2))
        value = hover_power(platform, 0.0)
        assert value == pytest.approx(expected, rel=1e-12)
        assert 10.0 < value < 100.0  # tens of Watts

    def test_increasing_in_altitude(self, platform):
        hs = np.linspace(0.0, 0.5, 20)
        powers = [hover_power(platform, h) for h in hs]
        assert all(a < b for a, b in zip(powers, powers[1:]))

    def test_mass_scaling(self, platform):
        heavy = UavPlatform(mass_kg=4 * platform.mass_kg)
        rho = air_density(platform, 0.0)
        induced = hover_power(platform, 0.0) - platform.c1 * rho
        induced_heavy = hover_power(heavy, 0.0) - heavy.c1 * rho
        assert induced_heavy == pytest.approx(8.0 * induced, rel=1e-12)


class TestDisplacementPower:
    def test_descent_at_critical_speed(self):
        h = 0.1
        probe = UavPlatform()
        v_crit = min_descent_speed(probe, h)
        platform = UavPlatform(vertical_speed_mps=v_crit)
        value = displacement_power(platform, h, "down")
        assert value == pytest.approx(platform.mass_kg * v_crit / 2.0,
                                      rel=1e-9)

    def test_ascent_asymptote(self):
        platform = UavPlatform(vertical_speed_mps=1e6)
        value = displacement_power(platform, 0.1, "up")
        assert value == pytest.approx(platform.mass_kg * 1e6, rel=1e-6)

    def test_ascent_scalar_oracle(self, platform):
        rho = air_density(platform, 0.2)
        induced = 2.0 * 10.2 / (rho * math.pi * 0.25)
        expected = 0.5 * 10.2 * 10.0 + 0.5 * 10.2 * math.sqrt(100.0 + induced)
        assert displacement_power(platform, 0.2, "up") == pytest.approx(
            expected, rel=1e-12)

    def test_infeasible_descent(self):
        platform = UavPlatform(vertical_speed_mps=1.0)
        with pytest.raises(ConstraintViolationError) as err:
            displacement_power(platform, 0.1, "down")
        assert "minimum" in str(err.value)

    def test_weight_force_switch(self):
        literal = UavPlatform()
        physical = UavPlatform(use_weight_force=True)
        assert min_descent_speed(physical, 0.0) == pytest.approx(
            min_descent_speed(literal, 0.0) * math.sqrt(9.81), rel=1e-12)


class TestDisplacementPlan:
    def test_direction_consistency(self):
        with pytest.raises(ConfigurationError):
            DisplacementPlan(h0_km=0.2, h1_km=0.4, direction="down")
        plan = DisplacementPlan.between(0.4, 0.1)
        assert plan.direction == "down"
        assert plan.distance_km == pytest.approx(0.3)
        assert plan.midpoint_km == pytest.approx(0.25)


class TestTotalEnergy:
    def test_no_displacement(self, platform):
        plan = DisplacementPlan.between(0.2, 0.2)
        breakdown = total_energy(platform, plan, cache_units=5)
        expected = (platform.window_s * (platform.tx_power_w
                                         + hover_power(platform, 0.2))
                    + platform.circuit_power_w
                    + 5 * platform.cache_power_per_unit_w)
        assert breakdown.e_tot_j == pytest.approx(expected, rel=1e-12)
        assert breakdown.e_dis_j == 0.0

    def test_clamp_when_move_eats_window(self):
        platform = UavPlatform(vertical_speed_mps=1.0, window_s=100.0)
        plan = DisplacementPlan.between(0.1, 0.25)  # 150 s of travel
        breakdown = total_energy(platform, plan, cache_units=2)
        assert airtime_s(platform, plan) == 0.0
        static = platform.circuit_power_w + 2 * platform.cache_power_per_unit_w
        assert breakdown.e_com_j == pytest.approx(static)
        assert breakdown.e_hov_j == 0.0
        assert breakdown.e_dis_j > 0.0

    def test_breakdown_oracle(self, platform):
        plan = DisplacementPlan.between(0.2, 0.3)  # 100 m up at 10 m/s
        breakdown = total_energy(platform, plan, cache_units=5)
        travel = 10.0
        air = 200.0 - travel
        e_com = air * 1.0 + (1e-5 + 5e-6)
        e_hov = air * hover_power(platform, 0.3)
        e_dis = travel * displacement_power(platform, 0.25, "up")
        assert breakdown.e_com_j == pytest.approx(e_com, rel=1e-12)
        assert breakdown.e_hov_j == pytest.approx(e_hov, rel=1e-12)
        assert breakdown.e_dis_j == pytest.approx(e_dis, rel=1e-12)
        assert breakdown.e_tot_j == pytest.approx(e_com + e_hov + e_dis,
                                                  rel=1e-12)

    def test_component_signs(self, platform):
        for h1 in (0.1, 0.2, 0.35):
            plan = DisplacementPlan.between(0.2, h1)
            b = total_energy(platform, plan, cache_units=3)
            assert b.e_tot_j > 0
            assert b.e_com_j >= 0 and b.e_hov_j >= 0
            assert (b.e_dis_j == 0.0) == (h1 == 0.2)


class TestEnergyEfficiency:
    def test_zero_rate(self, platform, stay_plan):
        assert energy_efficiency(platform, stay_plan, 5, 0.0) == 0.0

    def test_linearity(self, platform, stay_plan):
        one = energy_efficiency(platform, stay_plan, 5, 1e5)
        two = energy_efficiency(platform, stay_plan, 5, 2e5)
        assert two == pytest.approx(2.0 * one, rel=1e-12)

    def test_scalar_oracle(self, platform, stay_plan):
        gamma = 3.2e5
        breakdown = total_energy(platform, stay_plan, 5)
        expected = 200.0 / breakdown.e_tot_j * gamma
        assert energy_efficiency(platform, stay_plan, 5, gamma) == \
            pytest.approx(expected, rel=1e-12)

    def test_nonincreasing_in_cost_parameters(self, stay_plan):
        gamma = 1e5
        base = energy_efficiency(UavPlatform(), stay_plan, 5, gamma)
        pricier_circuit = UavPlatform(circuit_power_w=2.0)
        pricier_cache = UavPlatform(cache_power_per_unit_w=0.5)
        assert energy_efficiency(pricier_circuit, stay_plan, 5, gamma) < base
        assert energy_efficiency(pricier_cache, stay_plan, 5, gamma) < base
        assert energy_efficiency(UavPlatform(), stay_plan, 50, gamma) < base

    def test_zero_window_gives_zero(self):
        platform = UavPlatform(vertical_speed_mps=1.0, window_s=50.0)
        plan = DisplacementPlan.between(0.1, 0.3)
        assert energy_efficiency(platform, plan, 5, 1e5) == 0.0
