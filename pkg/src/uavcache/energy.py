"""UAV energy bookkeeping: hovering, vertical displacement, totals, EE.

Energies are per communication window and per UAV.  The hover and
displacement formulas follow rotor momentum theory with the platform mass
entering the radicals directly; a `use_weight_force` switch substitutes
M*g for physically consistent force units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigurationError, ConstraintViolationError

GRAVITY_MPS2 = 9.81

Direction = str  # "up" | "down"


@dataclass(frozen=True)
class UavPlatform:
    """Physical and power constants of one UAV type."""

    mass_kg: float = 10.2
    rotor_radius_m: float = 0.5
    vertical_speed_mps: float = 10.0
    tx_power_w: float = 1.0
    circuit_power_w: float = 1e-5
    cache_power_per_unit_w: float = 1e-6
    c1: float = 1.91
    c2: float = 1.1
    rho0_kgm3: float = 1.225
    c_rho_per_km: float = 0.118
    window_s: float = 200.0
    use_weight_force: bool = False

    def __post_init__(self):
        for field in ("mass_kg", "rotor_radius_m", "vertical_speed_mps",
                      "tx_power_w", "circuit_power_w", "cache_power_per_unit_w",
                      "c1", "c2", "rho0_kgm3", "c_rho_per_km", "window_s"):
            if getattr(self, field) <= 0.0:
                raise ConfigurationError(f"{field} must be positive")

    @property
    def rotor_disk_m2(self) -> float:
        return math.pi * self.rotor_radius_m ** 2

    def lift_load(self) -> float:
        # Literal-mass reading by default; M*g behind the switch.
        m = self.mass_kg
        return m * GRAVITY_MPS2 if self.use_weight_force else m


@dataclass(frozen=True)
class DisplacementPlan:
    """A vertical move from h0 to h1 within one window."""

    h0_km: float
    h1_km: float
    direction: Direction = "up"

    def __post_init__(self):
        if self.h0_km < 0 or self.h1_km < 0:
            raise ConfigurationError("altitudes must be nonnegative")
        if self.direction not in ("up", "down"):
            raise ConfigurationError("direction must be 'up' or 'down'")
        if self.h1_km > self.h0_km and self.direction != "up":
            raise ConfigurationError("ascending plan must have direction 'up'")
        if self.h1_km < self.h0_km and self.direction != "down":
            raise ConfigurationError("descending plan must have direction 'down'")

    @classmethod
    def between(cls, h0_km: float, h1_km: float) -> "DisplacementPlan":
        direction = "down" if h1_km < h0_km else "up"
        return cls(h0_km=h0_km, h1_km=h1_km, direction=direction)

    @property
    def distance_km(self) -> float:
        return abs(self.h1_km - self.h0_km)

    @property
    def midpoint_km(self) -> float:
        return 0.5 * (self.h0_km + self.h1_km)


def air_density(platform: UavPlatform, h_km: float) -> float:
    """Air density rho0 * exp(-c_rho * H) in kg/m^3."""
    return platform.rho0_kgm3 * math.exp(-platform.c_rho_per_km * h_km)


def hover_power(platform: UavPlatform, h_km: float) -> float:
    """Hover power c1*rho(H) + c2*M^1.5 / sqrt(rho(H)*pi*d^2) in Watts."""
    rho = air_density(platform, h_km)
    m = platform.lift_load()
    return platform.c1 * rho + platform.c2 * m ** 1.5 / math.sqrt(
        rho * platform.rotor_disk_m2)


def min_descent_speed(platform: UavPlatform, h_km: float) -> float:
    """Slowest feasible descent speed sqrt(2M/(rho*pi*d^2)) in m/s."""
    rho = air_density(platform, h_km)
    return math.sqrt(2.0 * platform.lift_load() / (rho * platform.rotor_disk_m2))


def displacement_power(platform: UavPlatform, h_km: float,
                       direction: Direction) -> float:
    """Vertical displacement power at the given reference altitude.

    Raises ConstraintViolationError for a descent slower than the induced
    flow limit (the radical would turn imaginary).
    """
    if direction not in ("up", "down"):
        raise ConfigurationError("direction must be 'up' or 'down'")
    rho = air_density(platform, h_km)
    m = platform.lift_load()
    v = platform.vertical_speed_mps
    induced = 2.0 * m / (rho * platform.rotor_disk_m2)
    half = 0.5 * platform.mass_kg
    if direction == "up":
        return half * v + half * math.sqrt(v * v + induced)
    v_min = math.sqrt(induced)
    if v < v_min * (1.0 - 1e-12):
        raise ConstraintViolationError(
            f"descent speed {v:.3f} m/s below the feasible minimum "
            f"{v_min:.3f} m/s")
    return half * v - half * math.sqrt(max(v * v - induced, 0.0))


@dataclass(frozen=True)
class EnergyBreakdown:
    e_com_j: float
    e_hov_j: float
    e_dis_j: float

    @property
    def e_tot_j(self) -> float:
        return self.e_com_j + self.e_hov_j + self.e_dis_j


def airtime_s(platform: UavPlatform, plan: DisplacementPlan) -> float:
    """Communication time left after the move: (T - |dH|/v_v)+ in seconds."""
    travel = plan.distance_km * 1000.0 / platform.vertical_speed_mps
    return max(platform.window_s - travel, 0.0)


def total_energy(platform: UavPlatform, plan: DisplacementPlan,
                 cache_units: float) -> EnergyBreakdown:
    """Total per-window energy with its communication/hover/move breakdown.

    The transmit and hover terms are clamped to zero once the move consumes
    the whole window; the static circuit + cache draw is booked under the
    communication component.  Displacement power uses the density at the
    midpoint altitude.
    """
    if cache_units < 0:
        raise ConfigurationError("cache_units must be nonnegative")
    air = airtime_s(platform, plan)
    travel = plan.distance_km * 1000.0 / platform.vertical_speed_mps
    e_com = air * platform.tx_power_w + (
        platform.circuit_power_w + cache_units * platform.cache_power_per_unit_w)
    e_hov = air * hover_power(platform, plan.h1_km)
    if plan.distance_km > 0:
        e_dis = travel * displacement_power(platform, plan.midpoint_km,
                                            plan.direction)
    else:
        e_dis = 0.0
    return EnergyBreakdown(e_com_j=e_com, e_hov_j=e_hov, e_dis_j=e_dis)


def energy_efficiency(platform: UavPlatform, plan: DisplacementPlan,
                      cache_units: float, gamma_c: float) -> float:
    """Per-content EE: delivered rate share per Joule over the window."""
    air = airtime_s(platform, plan)
    if air == 0.0:
        return 0.0
    breakdown = total_energy(platform, plan, cache_units)
    return air / breakdown.e_tot_j * gamma_c
