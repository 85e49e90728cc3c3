"""Network-level EE assembly and the joint placement/altitude search.

The network EE is the popularity-weighted sum of per-content EE values.
The joint problem is solved by the altitude-partition heuristic: the
feasible altitude band is split into a grid, the cache-placement problem is
re-solved at every midpoint (plus the no-move candidate), and the best
candidate wins; staying put is always a candidate so the optimized EE never
falls below the fixed-altitude baseline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .analysis import NetworkConfig, QuadratureSpec, DEFAULT_QUAD, gamma_exact
from .channel import EnvironmentParams
from .energy import DisplacementPlan, UavPlatform, airtime_s, \
    energy_efficiency, min_descent_speed
from .errors import ConfigurationError, ConstraintViolationError
from .placement import Catalog, PlacementVector, RshrResult, hitrate_solver, \
    lru_reference, mpcp, mprc_optimize, rshr

STRATEGIES = ("mpcp", "mprc", "rshr", "hitrate", "lru")


@dataclass(frozen=True)
class AltitudeGrid:
    """Uniform partition of the permitted altitude band."""

    h_min_km: float = 0.05
    h_max_km: float = 0.4
    n_max: int = 16
    h0_km: float = 0.2

    def __post_init__(self):
        if not self.h_min_km < self.h_max_km:
            raise ConfigurationError("need h_min < h_max")
        if self.n_max < 1:
            raise ConfigurationError("n_max must be >= 1")

    @property
    def midpoints_km(self) -> tuple[float, ...]:
        edges = np.linspace(self.h_min_km, self.h_max_km, self.n_max + 1)
        return tuple(0.5 * (edges[:-1] + edges[1:]))


@dataclass(frozen=True)
class Solution:
    """One evaluated (altitude, placement) candidate."""

    h1_km: float
    direction: str
    placement: PlacementVector
    eta: float
    per_content_eta: tuple[float, ...]
    strategy: str
    s_pop: int | None = None
    rshr_iterations: int | None = None


@dataclass(frozen=True)
class JointResult:
    best: Solution
    baseline: Solution
    skipped: tuple[tuple[float, str], ...] = ()

    @property
    def gain(self) -> float:
        """EE ratio of the displaced optimum over the stay-put baseline."""
        if self.baseline.eta == 0.0:
            return math.inf if self.best.eta > 0 else 1.0
        return self.best.eta / self.baseline.eta


class _GammaCache:
    """Memoizes the rate factor per caching probability at one altitude."""

    def __init__(self, cfg, env, quad):
        self.cfg = cfg
        self.env = env
        self.quad = quad
        self._values: dict[float, float] = {}

    def __call__(self, p_c: float) -> float:
        key = float(p_c)
        if key not in self._values:
            self._values[key] = gamma_exact(self.cfg, self.env, key, self.quad)
        return self._values[key]


def network_ee(catalog: Catalog, placement: PlacementVector,
               cfg: NetworkConfig, env: EnvironmentParams,
               platform: UavPlatform, plan: DisplacementPlan,
               quad: QuadratureSpec = DEFAULT_QUAD,
               gamma_fn=None) -> tuple[float, tuple[float, ...]]:
    """Popularity-weighted EE and the per-content breakdown."""
    gamma_fn = gamma_fn or _GammaCache(cfg, env, quad)
    cache_units = placement.cache_size
    etas = []
    for p_c in placement.array:
        if p_c <= 0.0:
            etas.append(0.0)
            continue
        gamma_c = gamma_fn(p_c)
        etas.append(energy_efficiency(platform, plan, cache_units, gamma_c))
    eta = float(np.dot(catalog.weights, etas))
    return eta, tuple(etas)


def placement_population(cfg: NetworkConfig,
                         quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Mean UAV count the placement programs coordinate over.

    The hit-rate program and the RSHR inner solver see the population of
    the whole modeled universe, not just the per-request cooperation zone:
    a placement decision is shared by every UAV in the network, and with
    the in-zone mean (often < 1 UAV) the hit-rate program degenerates to
    the top-S indicator and stops being a distinct baseline.
    """
    radius = quad.truncation_km(cfg)
    return math.pi * cfg.density_per_km2 * radius ** 2


def solve_p_cache(strategy: str, catalog: Catalog, cache_size: int,
                  cfg: NetworkConfig, env: EnvironmentParams,
                  platform: UavPlatform, plan: DisplacementPlan,
                  quad: QuadratureSpec = DEFAULT_QUAD,
                  rshr_max_iter: int = 25, rshr_tol: float = 1e-4) -> Solution:
    """Solve the cache-placement problem at one fixed altitude candidate."""
    if strategy not in STRATEGIES:
        raise ConfigurationError(
            f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    gamma_fn = _GammaCache(cfg, env, quad)
    theta_place = placement_population(cfg, quad)
    s_pop = None
    iterations = None

    if strategy == "mpcp":
        placement = mpcp(catalog, cache_size)
    elif strategy == "hitrate":
        placement = hitrate_solver(catalog.weights, theta_place, cache_size)
    elif strategy == "lru":
        placement = lru_reference(catalog, cache_size)
    elif strategy == "mprc":
        def ee_eval(p):
            return network_ee(catalog, p, cfg, env, platform, plan, quad,
                              gamma_fn)[0]
        s_pop, placement = mprc_optimize(catalog, cache_size, ee_eval)
    else:  # rshr
        def ee_per_content(p_c):
            if p_c <= 0.0:
                return 0.0
            return energy_efficiency(platform, plan, cache_size,
                                     gamma_fn(p_c))
        result: RshrResult = rshr(catalog, cache_size, theta_place,
                                  ee_per_content, max_iter=rshr_max_iter,
                                  tol=rshr_tol)
        placement = result.placement
        iterations = result.iterations

    eta, per_content = network_ee(catalog, placement, cfg, env, platform,
                                  plan, quad, gamma_fn)
    return Solution(h1_km=plan.h1_km, direction=plan.direction,
                    placement=placement, eta=eta, per_content_eta=per_content,
                    strategy=strategy, s_pop=s_pop,
                    rshr_iterations=iterations)


def solve_p(strategy: str, catalog: Catalog, cache_size: int,
            cfg: NetworkConfig, env: EnvironmentParams,
            platform: UavPlatform, grid: AltitudeGrid,
            quad: QuadratureSpec = DEFAULT_QUAD) -> JointResult:
    """Joint altitude + placement optimization over the altitude grid.

    The stay-put candidate is always evaluated, so the returned optimum
    dominates the fixed-altitude baseline by construction.  Candidates with
    an infeasible descent speed are skipped and reported, never fatal.
    """
    h0 = grid.h0_km
    candidates = [h0] + [h for h in grid.midpoints_km]
    skipped: list[tuple[float, str]] = []
    best: Solution | None = None
    baseline: Solution | None = None

    for h1 in candidates:
        plan = DisplacementPlan.between(h0, h1)
        if plan.direction == "down" and plan.distance_km > 0:
            v_min = min_descent_speed(platform, plan.midpoint_km)
            if platform.vertical_speed_mps < v_min * (1.0 - 1e-12):
                skipped.append((h1, f"descent requires >= {v_min:.2f} m/s"))
                continue
        if airtime_s(platform, plan) == 0.0 and h1 != h0:
            skipped.append((h1, "move consumes the whole window"))
            continue
        cfg_at = replace(cfg, altitude_km=h1)
        sol = solve_p_cache(strategy, catalog, cache_size, cfg_at, env,
                            platform, plan, quad)
        if h1 == h0:
            baseline = sol
        if best is None or sol.eta > best.eta or (
                sol.eta == best.eta
                and abs(h1 - h0) < abs(best.h1_km - h0)):
            best = sol
    if baseline is None or best is None:
        raise ConstraintViolationError("no feasible altitude candidate")
    return JointResult(best=best, baseline=baseline, skipped=tuple(skipped))
