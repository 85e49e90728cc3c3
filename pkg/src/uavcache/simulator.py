"""Monte Carlo oracle for the cooperative-delivery rate factor.

Each trial drops a Poisson field of UAVs in a disk window, thins it by the
caching probability, draws LOS states, log-normal shadowing and Nakagami
fading per link, and evaluates the cooperative SINR: in-zone carriers add
coherently-in-power as signal, every other UAV interferes.  Trials use
counter-based Philox streams keyed by (seed, trial index), so results are
bitwise reproducible and independent of evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analysis import LN2, NetworkConfig, universe_radius_km
from .channel import EnvironmentParams, LinkState, _p_los, _path_gain, \
    _shadow_std
from .errors import ConfigurationError


@dataclass(frozen=True)
class SimSpec:
    """Monte Carlo controls; the window defaults to the modeled universe
    radius (10x the cooperation radius, widened at sparse densities)."""

    trials: int
    sim_radius_km: float | None = None
    seed: int = 0
    antithetic: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigurationError("trials must be >= 1")
        if self.sim_radius_km is not None and self.sim_radius_km <= 0:
            raise ConfigurationError("sim_radius_km must be positive")

    def window_km(self, cfg: NetworkConfig) -> float:
        if self.sim_radius_km is not None:
            return self.sim_radius_km
        return universe_radius_km(cfg)


@dataclass(frozen=True)
class Realization:
    """One dropped network: positions and raw per-link channel draws."""

    uav_xy_km: np.ndarray          # (n, 2)
    cached_flags: np.ndarray       # (n,) bool
    los_flags: np.ndarray          # (n,) bool
    shadow_db: np.ndarray          # (n,)
    fading_gain: np.ndarray        # (n,)

    @property
    def radii_km(self) -> np.ndarray:
        return np.hypot(self.uav_xy_km[:, 0], self.uav_xy_km[:, 1])


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(trial)],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def draw_realization(cfg: NetworkConfig, env: EnvironmentParams, p_c: float,
                     rng: np.random.Generator, radius_km: float,
                     antithetic_flip: bool = False) -> Realization:
    """Sample one network realization inside the disk window.

    Draw order is fixed (count, radii, angles, cache flags, LOS flags,
    shadowing, fading) so a given stream always yields the same network.
    """
    lam = cfg.density_per_km2
    n = rng.poisson(lam * math.pi * radius_km ** 2)
    r = radius_km * np.sqrt(rng.random(n))
    angle = 2.0 * math.pi * rng.random(n)
    cached = rng.random(n) < p_c
    los = rng.random(n) < _p_los(env, r, cfg.altitude_km)
    z = rng.standard_normal(n)
    if antithetic_flip:
        z = -z
    shape = np.where(los, env.w_los, env.w_nlos)
    fading = rng.gamma(shape) / shape if n else np.empty(0)

    sigma = np.where(los,
                     _shadow_std(env, r, cfg.altitude_km, LinkState.LOS),
                     _shadow_std(env, r, cfg.altitude_km, LinkState.NLOS))
    mu = np.where(los, env.mu_los_db, env.mu_nlos_db)
    shadow_db = mu + sigma * z
    xy = np.column_stack([r * np.cos(angle), r * np.sin(angle)])
    return Realization(uav_xy_km=xy, cached_flags=cached, los_flags=los,
                       shadow_db=shadow_db, fading_gain=fading)


def _received_gains(cfg, env, real: Realization) -> np.ndarray:
    r = real.radii_km
    gain_los = _path_gain(env, r, cfg.altitude_km, LinkState.LOS)
    gain_nlos = _path_gain(env, r, cfg.altitude_km, LinkState.NLOS)
    path = np.where(real.los_flags, gain_los, gain_nlos)
    return path * 10.0 ** (real.shadow_db / 10.0) * real.fading_gain


def _trial_stats(cfg, env, p_c, real: Realization):
    """(rate_share_nats, sinr, n_cooperating) for one realization."""
    gains = _received_gains(cfg, env, real)
    in_zone = real.cached_flags & (real.radii_km <= cfg.coop_radius_km)
    count = int(in_zone.sum())
    if count == 0:
        return 0.0, None, 0
    signal = float(gains[in_zone].sum())
    interference = float(gains.sum()) - signal
    sinr = signal / (interference + cfg.noise_over_power)
    return math.log1p(sinr) / count, sinr, count


@dataclass(frozen=True)
class GammaEstimate:
    gamma: float
    se: float
    trials: int
    nonempty_fraction: float


def simulate_gamma(cfg: NetworkConfig, env: EnvironmentParams, p_c: float,
                   spec: SimSpec, debug_dump=None) -> GammaEstimate:
    """Empirical rate factor (bit/s) with its standard error.

    Trials with no in-zone carrier contribute zero; otherwise the Shannon
    rate of the cooperative SINR is split evenly across the carriers.
    `debug_dump` takes a path for a per-trial CSV of realization summaries.
    """
    if not 0.0 <= p_c <= 1.0:
        raise ConfigurationError("p_c must lie in [0, 1]")
    radius = spec.window_km(cfg)
    if p_c == 0.0 or cfg.density_per_km2 * math.pi * radius ** 2 < 1e-6:
        return GammaEstimate(0.0, 0.0, spec.trials, 0.0)

    dump = open(debug_dump, "w") if debug_dump is not None else None
    if dump:
        dump.write("trial,n_uavs,n_cooperating,sinr,rate_share_nats\n")
    contrib = np.zeros(spec.trials)
    nonempty = 0
    for trial in range(spec.trials):
        rng = _trial_rng(spec.seed, trial)
        flip = spec.antithetic and trial % 2 == 1
        real = draw_realization(cfg, env, p_c, rng, radius, flip)
        value, sinr, count = _trial_stats(cfg, env, p_c, real)
        contrib[trial] = value
        nonempty += count > 0
        if dump:
            dump.write(f"{trial},{real.cached_flags.size},{count},"
                       f"{'' if sinr is None else repr(sinr)},{value!r}\n")
    if dump:
        dump.close()

    scale = cfg.bandwidth_hz / LN2
    mean = float(contrib.mean()) * scale
    if spec.trials > 1:
        se = float(contrib.std(ddof=1)) / math.sqrt(spec.trials) * scale
    else:
        se = 0.0
    return GammaEstimate(mean, se, spec.trials, nonempty / spec.trials)


def simulate_network_gamma(cfg: NetworkConfig, env: EnvironmentParams,
                           popularity, placement_probs,
                           spec: SimSpec) -> GammaEstimate:
    """Popularity-weighted rate factor under a whole placement (bit/s).

    Each trial first draws the requested content from the popularity law,
    then evaluates that content's cooperative delivery; the mean therefore
    estimates the popularity-weighted per-content rate factor.
    """
    popularity = np.asarray(popularity, dtype=float)
    placement_probs = np.asarray(placement_probs, dtype=float)
    if popularity.shape != placement_probs.shape:
        raise ConfigurationError("popularity/placement size mismatch")
    radius = spec.window_km(cfg)
    if cfg.density_per_km2 * math.pi * radius ** 2 < 1e-6:
        return GammaEstimate(0.0, 0.0, spec.trials, 0.0)
    cdf = np.cumsum(popularity)
    contrib = np.zeros(spec.trials)
    nonempty = 0
    for trial in range(spec.trials):
        rng = _trial_rng(spec.seed, trial)
        content = int(np.searchsorted(cdf, rng.random()))
        p_c = float(placement_probs[min(content, len(cdf) - 1)])
        if p_c <= 0.0:
            continue
        flip = spec.antithetic and trial % 2 == 1
        real = draw_realization(cfg, env, p_c, rng, radius, flip)
        value, _, count = _trial_stats(cfg, env, p_c, real)
        contrib[trial] = value
        nonempty += count > 0
    scale = cfg.bandwidth_hz / LN2
    mean = float(contrib.mean()) * scale
    se = float(contrib.std(ddof=1)) / math.sqrt(spec.trials) * scale \
        if spec.trials > 1 else 0.0
    return GammaEstimate(mean, se, spec.trials, nonempty / spec.trials)


@dataclass(frozen=True)
class SinrCcdf:
    thresholds: tuple[float, ...]
    exceedance: tuple[float, ...]
    nonempty_trials: int
    trials: int


def simulate_sinr_ccdf(cfg: NetworkConfig, env: EnvironmentParams, p_c: float,
                       spec: SimSpec, thresholds) -> SinrCcdf:
    """Empirical CCDF of the cooperative SINR among nonempty trials."""
    thresholds = np.asarray(thresholds, dtype=float)
    radius = spec.window_km(cfg)
    exceed = np.zeros(thresholds.shape)
    nonempty = 0
    for trial in range(spec.trials):
        rng = _trial_rng(spec.seed, trial)
        flip = spec.antithetic and trial % 2 == 1
        real = draw_realization(cfg, env, p_c, rng, radius, flip)
        _, sinr, count = _trial_stats(cfg, env, p_c, real)
        if count:
            nonempty += 1
            exceed += sinr > thresholds
    if nonempty:
        exceed /= nonempty
    return SinrCcdf(tuple(thresholds), tuple(exceed), nonempty, spec.trials)
