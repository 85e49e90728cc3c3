"""Air-to-ground channel model.

Implements the statistical A2G link between a hovering UAV and a ground
user: an elevation-angle driven LOS/NLOS state, per-state power-law path
loss, log-normal shadowing whose dB standard deviation shrinks with the
elevation angle, and normalized Nakagami small-scale fading.  On top of the
raw quantities the module provides the two statistics the network analysis
is built from: the mean received power of a link and the Laplace transform
of a single link's received power.

All distances are in km.  Path-loss intercepts are preset-supplied in units
consistent with km distances; received powers are linear gains per unit
transmit power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigurationError, QuadratureError

# dB-to-linear shadowing convention: V = 10^(U/10), so ln V = U * ln(10)/10.
LN10_OVER_10 = math.log(10.0) / 10.0

DEG_PER_RAD = 180.0 / math.pi


class LinkState(Enum):
    LOS = "los"
    NLOS = "nlos"


@dataclass(frozen=True)
class EnvironmentParams:
    """Propagation constants of one environment class.

    phi/psi shape the sigmoid LOS-probability curve in the elevation angle;
    (k, alpha) are per-state path-loss intercept/exponent; (mu, a, c) give
    the per-state shadowing mean (dB) and the angle-dependent dB standard
    deviation a*exp(-c*angle_deg); w_los/w_nlos are Nakagami shape values.
    """

    name: str
    phi: float
    psi: float
    alpha_los: float
    alpha_nlos: float
    k_los: float
    k_nlos: float
    mu_los_db: float
    mu_nlos_db: float
    a_los: float
    c_los: float
    a_nlos: float
    c_nlos: float
    w_los: float
    w_nlos: float

    def __post_init__(self):
        if self.alpha_los < 2.0:
            raise ConfigurationError(
                f"alpha_los must be >= 2 (free space), got {self.alpha_los}")
        if self.alpha_nlos < self.alpha_los:
            raise ConfigurationError(
                "alpha_nlos must be >= alpha_los "
                f"({self.alpha_nlos} < {self.alpha_los})")
        if not (self.w_los >= self.w_nlos >= 0.5):
            raise ConfigurationError(
                "Nakagami shapes must satisfy w_los >= w_nlos >= 0.5, got "
                f"({self.w_los}, {self.w_nlos})")
        for field in ("phi", "psi", "k_los", "k_nlos",
                      "a_los", "c_los", "a_nlos", "c_nlos"):
            if getattr(self, field) <= 0.0:
                raise ConfigurationError(f"{field} must be positive")

    def alpha(self, state: LinkState) -> float:
        return self.alpha_los if state is LinkState.LOS else self.alpha_nlos

    def k(self, state: LinkState) -> float:
        return self.k_los if state is LinkState.LOS else self.k_nlos

    def mu_db(self, state: LinkState) -> float:
        return self.mu_los_db if state is LinkState.LOS else self.mu_nlos_db

    def shadow_coeffs(self, state: LinkState) -> tuple[float, float]:
        if state is LinkState.LOS:
            return self.a_los, self.c_los
        return self.a_nlos, self.c_nlos

    def nakagami_shape(self, state: LinkState) -> float:
        return self.w_los if state is LinkState.LOS else self.w_nlos


@dataclass(frozen=True)
class Link:
    """One UAV-to-user geometry: horizontal offset and altitude (km)."""

    horizontal_distance_km: float
    altitude_km: float

    def __post_init__(self):
        if self.horizontal_distance_km < 0 or self.altitude_km < 0:
            raise ConfigurationError("link distances must be nonnegative")
        if self.horizontal_distance_km == 0 and self.altitude_km == 0:
            raise ConfigurationError(
                "link must have nonzero extent (elevation angle undefined)")


def elevation_angle_deg(x_km, h_km):
    """Elevation angle of the UAV seen from the user, in degrees."""
    return DEG_PER_RAD * np.arctan2(h_km, x_km)


def los_probability(env: EnvironmentParams, link: Link) -> float:
    """Probability that the link is in LOS state.

    Sigmoid in the elevation angle: 1/(1 + phi*exp(-psi*(angle - phi))).
    Total on valid links; tends to 1/(1 + phi*e^(psi*phi)) as x -> inf.
    """
    return float(_p_los(env, link.horizontal_distance_km, link.altitude_km))


def _p_los(env, x_km, h_km):
    theta = elevation_angle_deg(np.asarray(x_km, dtype=float), h_km)
    return 1.0 / (1.0 + env.phi * np.exp(-env.psi * (theta - env.phi)))


def path_loss(env: EnvironmentParams, link: Link, state: LinkState) -> float:
    """Distance power-law gain K_state / (H^2 + x^2)^(alpha_state/2)."""
    return float(_path_gain(env, link.horizontal_distance_km,
                            link.altitude_km, state))


def _path_gain(env, x_km, h_km, state):
    d2 = np.asarray(x_km, dtype=float) ** 2 + h_km ** 2
    return env.k(state) * d2 ** (-env.alpha(state) / 2.0)


def shadow_std_db(env: EnvironmentParams, link: Link, state: LinkState) -> float:
    """Shadowing standard deviation in dB, a_state*exp(-c_state*angle_deg)."""
    return float(_shadow_std(env, link.horizontal_distance_km,
                             link.altitude_km, state))


def _shadow_std(env, x_km, h_km, state):
    a, c = env.shadow_coeffs(state)
    theta = elevation_angle_deg(np.asarray(x_km, dtype=float), h_km)
    return a * np.exp(-c * theta)


def _lognormal_mean(mu_db, sigma_db):
    # E[10^(U/10)] for U ~ N(mu_db, sigma_db^2)
    m = mu_db * LN10_OVER_10
    s = sigma_db * LN10_OVER_10
    return np.exp(m + 0.5 * s * s)


def mean_received_power(env: EnvironmentParams, link: Link) -> float:
    """Mean linear received power per unit transmit power.

    Averages over LOS state, log-normal shadowing (mean exp(mu*ln10/10 +
    (sigma*ln10/10)^2/2)) and unit-mean fading.
    """
    return float(_mean_power(env, link.horizontal_distance_km,
                             link.altitude_km))


def _mean_power(env, x_km, h_km):
    x = np.asarray(x_km, dtype=float)
    p_los = _p_los(env, x, h_km)
    total = 0.0
    for state, weight in ((LinkState.LOS, p_los), (LinkState.NLOS, 1.0 - p_los)):
        gain = _path_gain(env, x, h_km, state)
        sigma = _shadow_std(env, x, h_km, state)
        total = total + weight * gain * _lognormal_mean(env.mu_db(state), sigma)
    return total


class _GaussHermite:
    """Cached Gauss-Hermite rule mapped to Gaussian expectations."""

    _cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    @classmethod
    def rule(cls, n: int) -> tuple[np.ndarray, np.ndarray]:
        if n not in cls._cache:
            t, w = np.polynomial.hermite.hermgauss(n)
            cls._cache[n] = (t, w / math.sqrt(math.pi))
        return cls._cache[n]


def _state_laplace(env, x, h_km, v, state, gh_nodes, u_lower_limit_zero):
    """E[(1 + v*L(x)*10^(U/10)/W)^-W] for one LOS/NLOS state.

    `x` and `v` broadcast against each other; the Gaussian integral over the
    shadowing dB value runs on a Gauss-Hermite rule over the full real line
    (default) or, behind the literal-limits switch, on a Gauss-Legendre rule
    truncated at u = 0.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    gain = _path_gain(env, x, h_km, state)
    sigma = _shadow_std(env, x, h_km, state)
    mu = env.mu_db(state)
    w_shape = env.nakagami_shape(state)

    if not u_lower_limit_zero:
        t, w = _GaussHermite.rule(gh_nodes)
        u = mu + math.sqrt(2.0) * sigma[..., None] * t
        weights = w
    else:
        # Literal truncated integral: the Gaussian density is integrated only
        # over u >= 0 and is NOT renormalized.
        hi = mu + 10.0 * np.max(sigma)
        if hi <= 0.0:
            return np.zeros(np.broadcast_shapes(x.shape, v.shape))
        nodes, wts = np.polynomial.legendre.leggauss(4 * gh_nodes)
        u = 0.5 * hi * (nodes + 1.0)
        u = np.broadcast_to(u, sigma.shape + u.shape)
        pdf = np.exp(-0.5 * ((u - mu) / sigma[..., None]) ** 2) \
            / (math.sqrt(2 * math.pi) * sigma[..., None])
        weights = 0.5 * hi * wts * pdf

    arg = (v[..., None] * gain[..., None] / w_shape) * 10.0 ** (u / 10.0)
    with np.errstate(over="ignore"):
        kernel = np.exp(-w_shape * np.log1p(arg))
    return np.sum(weights * kernel, axis=-1)


def _laplace_single(env, x, h_km, v, gh_nodes=32, u_lower_limit_zero=False):
    """Laplace transform of one link's received power, vectorized.

    L1(x, v) = sum_state p_state(x) * E[(1 + v*L_state(x)*V/W)^-W].
    """
    x = np.asarray(x, dtype=float)
    p_los = _p_los(env, x, h_km)
    los = _state_laplace(env, x, h_km, v, LinkState.LOS,
                         gh_nodes, u_lower_limit_zero)
    nlos = _state_laplace(env, x, h_km, v, LinkState.NLOS,
                          gh_nodes, u_lower_limit_zero)
    return p_los * los + (1.0 - p_los) * nlos


def laplace_single_link(env: EnvironmentParams, link: Link, v: float,
                        gh_nodes: int = 32,
                        u_lower_limit_zero: bool = False,
                        check_tol: float | None = 1e-2) -> float:
    """Laplace transform E[exp(-v * P_r)] of a single link's power.

    Exactly 1 at v = 0, decreasing to 0 as v -> inf.  When `check_tol` is
    set the rule is re-evaluated with doubled node count, the refined value
    is returned, and a QuadratureError is raised if the two rules disagree
    beyond the tolerance (genuine non-convergence).
    """
    if v < 0:
        raise ConfigurationError("transform variable v must be >= 0")
    if v == 0:
        return 1.0
    x, h = link.horizontal_distance_km, link.altitude_km
    value = float(_laplace_single(env, x, h, v, gh_nodes, u_lower_limit_zero))
    if check_tol is not None and not u_lower_limit_zero:
        refined = float(_laplace_single(env, x, h, v, 2 * gh_nodes,
                                        u_lower_limit_zero))
        if abs(refined - value) > check_tol + 1e-6 * abs(refined):
            raise QuadratureError(
                f"Gauss-Hermite rule did not converge at (x={x}, v={v})",
                point=(x, v), error_estimate=abs(refined - value))
        value = refined
    return min(value, 1.0)
