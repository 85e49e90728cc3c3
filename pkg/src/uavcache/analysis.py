"""Analytical evaluation of the per-content delivery-rate factor.

For a content cached with probability p the expected per-UAV share of the
delivery rate is a double integral: an outer integral over the Laplace
variable v (computed under the substitution v = e^t with panel-wise
Gauss-Legendre rules over the probed support) and an inner radial integral
over the distance of the nearest cooperating UAV.  The interference
Laplace transform multiplies contributions of UAVs without the content
(whole plane) and UAVs carrying it outside the cooperation zone.

Rates are returned in bit/s: the inner expectation is evaluated in nats
and scaled by bandwidth/ln 2.

Evaluations are pure and, for a fixed QuadratureSpec, bitwise
deterministic (fixed-order reductions); per-geometry tables are memoized
so that repeated evaluations at different caching probabilities or
densities are cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import EnvironmentParams, _laplace_single, _mean_power
from .errors import ConfigurationError, QuadratureError

LN2 = math.log(2.0)


@dataclass(frozen=True)
class NetworkConfig:
    """Deployment parameters of the UAV network."""

    density_per_km2: float
    coop_radius_km: float
    bandwidth_hz: float = 1e6
    noise_power_w: float = 3.1623e-14  # thermal at 1 MHz + 9 dB noise figure
    altitude_km: float = 0.2
    tx_power_w: float = 1.0

    def __post_init__(self):
        for field in ("density_per_km2", "coop_radius_km", "bandwidth_hz",
                      "noise_power_w", "altitude_km", "tx_power_w"):
            if getattr(self, field) <= 0.0:
                raise ConfigurationError(f"{field} must be positive")

    @property
    def theta_cop(self) -> float:
        """Mean number of UAVs inside the cooperation zone."""
        return math.pi * self.density_per_km2 * self.coop_radius_km ** 2

    @property
    def noise_over_power(self) -> float:
        return self.noise_power_w / self.tx_power_w


@dataclass(frozen=True)
class QuadratureSpec:
    """Tunables of the numerical integration engine.

    `interference_truncation_km` replaces the infinite radial upper limit;
    None resolves to the modeled-universe radius (10x the cooperation
    radius, widened at sparse densities), which matches the Monte Carlo
    window default so both paths model the same finite universe.
    `tail_check` selects whether an unresolved radial tail just gets
    recorded ("warn") or raises ("strict").
    """

    v_transform: str = "log"
    rel_tol: float = 1e-3
    abs_tol: float = 1e-12
    series_tail_eps: float = 1e-10
    interference_truncation_km: float | None = None
    min_universe_uavs: float = 50.0
    gh_nodes: int = 32
    x_panels: int = 4
    nodes_per_panel: int = 12
    t_panel_width: float = 2.0
    max_refinements: int = 2
    tail_check: str = "warn"
    u_lower_limit_zero: bool = False
    literal_interference_limits: bool = False

    def __post_init__(self):
        if not 0.0 < self.rel_tol < 1.0:
            raise ConfigurationError("rel_tol must be in (0, 1)")
        if not 0.0 < self.abs_tol < 1.0:
            raise ConfigurationError("abs_tol must be in (0, 1)")
        if not 0.0 < self.series_tail_eps < 1.0:
            raise ConfigurationError("series_tail_eps must be in (0, 1)")
        if self.v_transform != "log":
            raise ConfigurationError(
                f"unsupported v_transform {self.v_transform!r}")
        if self.tail_check not in ("warn", "strict"):
            raise ConfigurationError("tail_check must be 'warn' or 'strict'")

    def truncation_km(self, cfg: NetworkConfig) -> float:
        base = 10.0 * cfg.coop_radius_km
        if self.interference_truncation_km is not None:
            if self.interference_truncation_km < base:
                raise ConfigurationError(
                    "interference truncation must be >= 10x the cooperation "
                    "radius")
            return self.interference_truncation_km
        return universe_radius_km(cfg, self.min_universe_uavs)


def universe_radius_km(cfg: NetworkConfig, min_uavs: float = 50.0) -> float:
    """Radius of the modeled finite network.

    At least 10x the cooperation radius; widened at sparse densities so the
    modeled population stays representative (>= min_uavs expected UAVs).
    """
    base = 10.0 * cfg.coop_radius_km
    if min_uavs <= 0:
        return base
    floor = math.sqrt(min_uavs / (math.pi * cfg.density_per_km2))
    return max(base, floor)


DEFAULT_QUAD = QuadratureSpec()


def _gauss_panels(edges, nodes_per_panel):
    """Composite Gauss-Legendre nodes/weights over consecutive intervals."""
    base_x, base_w = np.polynomial.legendre.leggauss(nodes_per_panel)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        half = 0.5 * (b - a)
        nodes.append(half * (base_x + 1.0) + a)
        weights.append(half * base_w)
    return np.concatenate(nodes), np.concatenate(weights)


def _radial_edges(x_cop, r_max):
    """Panel edges 0..X_cop then geometrically doubling out to r_max."""
    edges = [0.0, 0.5 * x_cop, x_cop]
    r = x_cop
    while r < r_max:
        r = min(2.0 * r, r_max)
        edges.append(r)
    return np.asarray(edges)


class _LinkGrid:
    """Per-point channel constants plus the Gauss-Hermite shadow matrix.

    Precomputing 10^(u/10) at the Gaussian quadrature abscissae turns each
    Laplace-transform evaluation into a broadcasted power/log1p/exp pass.
    """

    def __init__(self, env: EnvironmentParams, h_km: float, x: np.ndarray,
                 gh_nodes: int):
        from .channel import LinkState, _GaussHermite, _p_los, _path_gain, \
            _shadow_std

        self.x = np.asarray(x, dtype=float)
        self.p_los = _p_los(env, self.x, h_km)
        t, w = _GaussHermite.rule(gh_nodes)
        self.gh_w = w
        self.state = []
        for state in (LinkState.LOS, LinkState.NLOS):
            gain = _path_gain(env, self.x, h_km, state)
            sigma = _shadow_std(env, self.x, h_km, state)
            u = env.mu_db(state) + math.sqrt(2.0) * sigma[:, None] * t
            shadow = 10.0 ** (u / 10.0)
            self.state.append((gain, shadow, env.nakagami_shape(state)))

    def laplace(self, v):
        """L1 at every grid point for a block of v values -> (nv, npts)."""
        v = np.atleast_1d(np.asarray(v, dtype=float))
        out = np.zeros((v.size, self.x.size))
        weights = (self.p_los, 1.0 - self.p_los)
        with np.errstate(over="ignore"):
            for (gain, shadow, w_shape), p_state in zip(self.state, weights):
                arg = (v[:, None, None] / w_shape) * (gain[:, None] * shadow)
                kernel = np.exp(-w_shape * np.log1p(arg))
                out += p_state * (kernel @ self.gh_w)
        return out


class GammaTables:
    """Geometry-dependent quadrature tables for one (network, environment).

    Everything that does not depend on the caching probability is computed
    once per refinement level: the single-link Laplace transform on the
    outer x grid, the partial radial integrals of 2y*L1 needed for the
    cooperative-helpers factor, and the radial interference integrals split
    at the cooperation radius.
    """

    def __init__(self, cfg: NetworkConfig, env: EnvironmentParams,
                 quad: QuadratureSpec, level: int):
        if quad.u_lower_limit_zero:
            # The truncated-Gaussian comparison variant is exposed on the
            # single-link, psi and interference functions only.
            raise ConfigurationError(
                "u_lower_limit_zero is not supported by the rate pipeline")
        self.cfg = cfg
        self.env = env
        self.quad = quad
        self.level = level
        x_cop = cfg.coop_radius_km
        h = cfg.altitude_km
        scale = 2 ** level
        npp = quad.nodes_per_panel

        # Outer x grid over (0, X_cop).
        x_edges = np.linspace(0.0, x_cop, quad.x_panels * scale + 1)
        self.x_nodes, self.x_weights = _gauss_panels(x_edges, npp)

        # Sub-grids for Psi(x, v) = int_x^X 2y L1(y, v) dy, one per x node.
        n_psi = npp
        base_x, base_w = np.polynomial.legendre.leggauss(n_psi)
        half = 0.5 * (x_cop - self.x_nodes)
        self.psi_nodes = half[:, None] * (base_x + 1.0) + self.x_nodes[:, None]
        self.psi_weights = half[:, None] * base_w

        # Radial interference grid out to the truncation radius.
        r_max = quad.truncation_km(cfg)
        z_edges = _radial_edges(x_cop, r_max)
        self.z_edges = z_edges
        self.z_nodes, self.z_weights = _gauss_panels(z_edges, npp)
        self.z_panel_sizes = np.full(len(z_edges) - 1, npp)
        self.in_zone = self.z_nodes <= x_cop

        pts = np.concatenate([self.x_nodes, self.psi_nodes.ravel(),
                              self.z_nodes])
        self._grid = _LinkGrid(env, h, pts, quad.gh_nodes * min(scale, 2))
        self._nx = self.x_nodes.size
        self._npsi = self.psi_nodes.size

        self._build_v_tables()

    # -- per-v data ------------------------------------------------------

    def _per_v(self, v_block):
        """L1 on the x grid, Psi(x, v) and radial integrals for a v block."""
        l1_all = self._grid.laplace(v_block)
        nx, npsi = self._nx, self._npsi
        l1_x = l1_all[:, :nx]
        l1_psi = l1_all[:, nx:nx + npsi].reshape(-1, *self.psi_nodes.shape)
        l1_z = l1_all[:, nx + npsi:]

        psi = np.sum(self.psi_weights * 2.0 * self.psi_nodes * l1_psi, axis=2)

        integrand = self.z_nodes * (1.0 - l1_z) * self.z_weights
        i_all = integrand.sum(axis=1)
        i_out = np.where(self.in_zone, 0.0, integrand).sum(axis=1)

        # Geometric-ratio tail estimate from the two outermost panels.
        splits = np.cumsum(self.z_panel_sizes)[:-1]
        per_panel = np.stack([seg.sum(axis=1) for seg in
                              np.split(integrand, splits, axis=1)], axis=1)
        last, prev = per_panel[:, -1], per_panel[:, -2]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(prev > 0, last / prev, 0.0)
        tail = np.where((ratio > 0) & (ratio < 1.0),
                        last * ratio / (1.0 - ratio),
                        np.where(last > 0, np.inf, 0.0))
        return l1_x, psi, i_all, i_out, tail

    def _build_v_tables(self):
        quad = self.quad
        probe_t = np.arange(-48.0, 48.0 + 1e-9, 3.0)
        l1_x, psi, i_all, i_out, tail = self._per_v(np.exp(probe_t))
        probes = [self._assemble_integrand(np.exp(probe_t), l1_x, psi,
                                           i_all, i_out, p)
                  for p in (0.05, 0.5, 1.0)]
        mags = np.max(np.abs(np.stack(probes)), axis=0)
        peak = mags.max()
        if peak <= 0.0:
            raise QuadratureError(
                "rate integrand vanished over the probed transform range",
                point=(self.cfg.altitude_km, self.cfg.coop_radius_km))
        support = mags > 1e-12 * peak
        t_lo = probe_t[support].min() - 3.0
        t_hi = probe_t[support].max() + 3.0

        width = quad.t_panel_width / (2 ** self.level)
        n_panels = max(int(math.ceil((t_hi - t_lo) / width)), 4)
        t_edges = np.linspace(t_lo, t_hi, n_panels + 1)
        t_nodes, t_weights = _gauss_panels(t_edges, 8)
        self.v_nodes = np.exp(t_nodes)
        self.v_weights = t_weights  # includes the dv = v dt jacobian via 1/v

        self.l1_x, self.psi, self.i_all, self.i_out, self.v_tail = \
            self._per_v(self.v_nodes)
        with np.errstate(invalid="ignore"):
            frac = np.where(self.i_all > 0, self.v_tail / self.i_all, 0.0)
        self.tail_fraction = float(np.nanmax(frac)) if frac.size else 0.0

    # -- assembly ---------------------------------------------------------

    def _assemble_integrand(self, v, l1_x, psi, i_all, i_out, p_c,
                            literal=False):
        """Outer-integrand samples g(v) for one caching probability."""
        cfg = self.cfg
        lam = cfg.density_per_km2
        theta_p = cfg.theta_cop * p_c
        a_full = math.pi * lam * p_c * (cfg.coop_radius_km ** 2
                                        - self.x_nodes ** 2)
        a_psi = math.pi * lam * p_c * psi
        # (e^A - 1)/A scaled by the void factor e^(-theta_p); both A and
        # A_psi are <= theta_p so every exponential stays <= 1.
        term1 = _scaled_phi(a_full[None, :], theta_p)
        term2 = l1_x * _scaled_phi(a_psi, theta_p)
        xint = ((term1 - term2) * (self.x_weights * self.x_nodes)).sum(axis=1)

        if literal:
            i_second = i_all - i_out  # printed in-zone limits
        else:
            i_second = i_out
        expo = -2.0 * math.pi * lam * ((1.0 - p_c) * i_all + p_c * i_second)
        lic = np.exp(expo)
        return np.exp(-v * cfg.noise_over_power) * lic * xint

    def gamma(self, p_c: float, literal: bool | None = None,
              debug_dump=None) -> float:
        """Rate factor in bit/s for caching probability p_c.

        `debug_dump` takes a path; when given, the outer-integrand samples
        are written there as CSV for quadrature diagnostics.
        """
        if p_c == 0.0:
            return 0.0
        literal = self.quad.literal_interference_limits if literal is None \
            else literal
        g = self._assemble_integrand(self.v_nodes, self.l1_x, self.psi,
                                     self.i_all, self.i_out, p_c, literal)
        if debug_dump is not None:
            with open(debug_dump, "w") as fh:
                fh.write("v,weight,integrand\n")
                for v, w, gv in zip(self.v_nodes, self.v_weights, g):
                    fh.write(f"{v!r},{w!r},{gv!r}\n")
        nats = (2.0 * math.pi * self.cfg.density_per_km2 * p_c
                * float(self.v_weights @ g))
        return nats * self.cfg.bandwidth_hz / LN2


def _scaled_phi(a, shift):
    """(exp(a - shift) - exp(-shift)) / a with the a -> 0 limit filled in."""
    a = np.asarray(a, dtype=float)
    small = np.abs(a) < 1e-12
    safe = np.where(small, 1.0, a)
    out = (np.exp(a - shift) - math.exp(-shift)) / safe
    return np.where(small, math.exp(-shift) * (1.0 + 0.5 * a), out)


_TABLE_CACHE: dict = {}
_TABLE_CACHE_MAX = 64


def _tables(cfg, env, quad, level) -> GammaTables:
    key = (cfg, env, quad, level)
    if key not in _TABLE_CACHE:
        if len(_TABLE_CACHE) >= _TABLE_CACHE_MAX:
            _TABLE_CACHE.pop(next(iter(_TABLE_CACHE)))
        _TABLE_CACHE[key] = GammaTables(cfg, env, quad, level)
    return _TABLE_CACHE[key]


def clear_table_cache():
    _TABLE_CACHE.clear()


@dataclass(frozen=True)
class GammaValue:
    value: float
    error_estimate: float
    level: int
    tail_fraction: float


def gamma_exact_detailed(cfg: NetworkConfig, env: EnvironmentParams,
                         p_c: float,
                         quad: QuadratureSpec = DEFAULT_QUAD,
                         debug_dump=None) -> GammaValue:
    """Rate factor with its quadrature error estimate.

    Evaluates on successive refinement levels until the change between
    levels meets the tolerance; raises QuadratureError when the allowed
    refinements are exhausted.  `debug_dump` writes the accepted level's
    outer-integrand samples to a CSV path.
    """
    if not 0.0 <= p_c <= 1.0:
        raise ConfigurationError("p_c must lie in [0, 1]")
    if p_c == 0.0:
        return GammaValue(0.0, 0.0, 0, 0.0)
    coarse = _tables(cfg, env, quad, 0)
    _check_tail(coarse, quad)
    value = coarse.gamma(p_c)
    for level in range(1, quad.max_refinements + 1):
        fine = _tables(cfg, env, quad, level)
        refined = fine.gamma(p_c, debug_dump=debug_dump)
        err = abs(refined - value)
        value = refined
        if err <= max(quad.abs_tol, quad.rel_tol * abs(refined)):
            return GammaValue(refined, err, level, fine.tail_fraction)
    raise QuadratureError(
        f"rate quadrature did not reach rel_tol={quad.rel_tol} "
        f"after {quad.max_refinements} refinements",
        point=(cfg.altitude_km, p_c), error_estimate=err)


def gamma_exact(cfg: NetworkConfig, env: EnvironmentParams, p_c: float,
                quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    return gamma_exact_detailed(cfg, env, p_c, quad).value


def _check_tail(tables, quad):
    if quad.tail_check == "strict" and tables.tail_fraction > 0.05:
        raise QuadratureError(
            "radial interference tail exceeds 5% of the truncated integral; "
            "increase interference_truncation_km",
            point=quad.truncation_km(tables.cfg),
            error_estimate=tables.tail_fraction)


def psi(cfg: NetworkConfig, env: EnvironmentParams, x: float, v: float,
        quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Partial second-moment integral of L1 over the cooperation annulus.

    Psi(x, v) = int_x^X_cop 2y L1(y, v) dy; equals X_cop^2 - x^2 at v = 0
    and 0 at x = X_cop.
    """
    x_cop = cfg.coop_radius_km
    if not 0.0 <= x <= x_cop:
        raise ConfigurationError("x must lie within the cooperation radius")
    if x == x_cop:
        return 0.0
    edges = np.linspace(x, x_cop, 8 + 1)
    nodes, weights = _gauss_panels(edges, 2 * quad.nodes_per_panel)
    l1 = _laplace_single(env, nodes, cfg.altitude_km, float(v),
                         gh_nodes=quad.gh_nodes,
                         u_lower_limit_zero=quad.u_lower_limit_zero)
    return float(np.sum(weights * 2.0 * nodes * l1))


def _radial_interference(cfg, env, v, quad):
    """(I_all, I_out, tail) radial integrals of z(1 - L1(z, v))."""
    r_max = quad.truncation_km(cfg)
    edges = _radial_edges(cfg.coop_radius_km, r_max)
    nodes, weights = _gauss_panels(edges, 2 * quad.nodes_per_panel)
    l1 = _laplace_single(env, nodes, cfg.altitude_km, np.asarray(v),
                         gh_nodes=quad.gh_nodes,
                         u_lower_limit_zero=quad.u_lower_limit_zero)
    integrand = nodes * (1.0 - l1) * weights
    i_all = float(integrand.sum())
    i_out = float(integrand[nodes > cfg.coop_radius_km].sum())
    npp = 2 * quad.nodes_per_panel
    last = float(integrand[-npp:].sum())
    prev = float(integrand[-2 * npp:-npp].sum())
    if prev > 0 and 0 < last < prev:
        tail = last * (last / prev) / (1.0 - last / prev)
    else:
        tail = math.inf if last > 0 else 0.0
    return i_all, i_out, tail


def interference_laplace(cfg: NetworkConfig, env: EnvironmentParams,
                         p_c: float, v: float,
                         quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Laplace transform of the aggregate interference at transform value v.

    Combines UAVs without the content anywhere in the (truncated) plane at
    density lambda*(1-p) with carriers of the content beyond the
    cooperation radius at density lambda*p.  The literal-limits switch
    reproduces the printed in-zone integration bounds for comparison runs.
    """
    if v < 0:
        raise ConfigurationError("v must be nonnegative")
    if not 0.0 <= p_c <= 1.0:
        raise ConfigurationError("p_c must lie in [0, 1]")
    if v == 0:
        return 1.0
    i_all, i_out, tail = _radial_interference(cfg, env, v, quad)
    if quad.tail_check == "strict" and tail > max(quad.abs_tol,
                                                  0.05 * max(i_all, 1e-300)):
        raise QuadratureError(
            "interference tail unresolved at the truncation radius; "
            "increase interference_truncation_km",
            point=(quad.truncation_km(cfg), v), error_estimate=tail)
    second = (i_all - i_out) if quad.literal_interference_limits else i_out
    lam = cfg.density_per_km2
    expo = -2.0 * math.pi * lam * ((1.0 - p_c) * i_all + p_c * second)
    return float(np.exp(expo))


def mean_interference_inverse(cfg: NetworkConfig, env: EnvironmentParams,
                              p_c: float,
                              quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """E[1/(noise/P + I)] = int_0^inf exp(-v*noise/P) L_I(v) dv."""
    probe_t = np.arange(-48.0, 48.0 + 1e-9, 3.0)
    v_probe = np.exp(probe_t)
    i_all, i_out, _ = _radial_vector(cfg, env, v_probe, quad)
    g = _noise_inverse_integrand(cfg, v_probe, i_all, i_out, p_c, quad)
    peak = g.max()
    support = g > 1e-14 * peak
    t_lo = probe_t[support].min() - 3.0
    t_hi = probe_t[support].max() + 3.0
    n_panels = max(int(math.ceil((t_hi - t_lo) / 1.5)), 4)
    t_nodes, t_weights = _gauss_panels(np.linspace(t_lo, t_hi, n_panels + 1), 8)
    v = np.exp(t_nodes)
    i_all, i_out, _ = _radial_vector(cfg, env, v, quad)
    g = _noise_inverse_integrand(cfg, v, i_all, i_out, p_c, quad)
    return float(t_weights @ (v * g))


def _radial_vector(cfg, env, v, quad):
    r_max = quad.truncation_km(cfg)
    edges = _radial_edges(cfg.coop_radius_km, r_max)
    nodes, weights = _gauss_panels(edges, quad.nodes_per_panel)
    grid = _LinkGrid(env, cfg.altitude_km, nodes, quad.gh_nodes)
    l1 = grid.laplace(v)
    integrand = nodes * (1.0 - l1) * weights
    i_all = integrand.sum(axis=1)
    i_out = np.where(nodes > cfg.coop_radius_km, integrand, 0.0).sum(axis=1)
    return i_all, i_out, None


def _noise_inverse_integrand(cfg, v, i_all, i_out, p_c, quad):
    second = (i_all - i_out) if quad.literal_interference_limits else i_out
    lam = cfg.density_per_km2
    expo = -2.0 * math.pi * lam * ((1.0 - p_c) * i_all + p_c * second)
    return np.exp(expo) * np.exp(-v * cfg.noise_over_power)


def virtual_capacity_theta(cfg: NetworkConfig, env: EnvironmentParams,
                           quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Coefficient of the closed-form capacity proxy.

    1 + (mean out-of-zone power + noise/P) / (mean in-zone power), with the
    mean received powers integrated over the truncated plane (Campbell
    averaging of the per-link mean).
    """
    x_cop = cfg.coop_radius_km
    r_max = quad.truncation_km(cfg)
    lam = cfg.density_per_km2

    def band_power(a, b, panels=24):
        nodes, weights = _gauss_panels(np.linspace(a, b, panels + 1),
                                       quad.nodes_per_panel)
        pbar = _mean_power(env, nodes, cfg.altitude_km)
        return 2.0 * math.pi * lam * float(np.sum(weights * nodes * pbar))

    chi_sig = band_power(0.0, x_cop)
    out_of_zone = band_power(x_cop, r_max, panels=64)
    return 1.0 + (out_of_zone + cfg.noise_over_power) / chi_sig


def poisson_truncation_index(mean: float, tail_eps: float) -> int:
    """Smallest n with P(Poisson(mean) > n) < tail_eps."""
    if mean <= 0:
        return 0
    log_pmf = -mean
    cdf = math.exp(log_pmf)
    n = 0
    while 1.0 - cdf >= tail_eps:
        n += 1
        log_pmf += math.log(mean) - math.log(n)
        cdf += math.exp(log_pmf)
        if n > mean + 40.0 * math.sqrt(mean) + 100:
            break
    return n


def gamma_approx(cfg: NetworkConfig, env: EnvironmentParams, p_c: float,
                 quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Moment-matched approximation of the rate factor (bit/s).

    Conditions on the number of cooperating UAVs (Poisson, truncated once
    the remaining mass drops below series_tail_eps), places the helpers at
    the mid-annulus radius, and replaces the interference expectation by
    E[1/(noise/P + I)].
    """
    if not 0.0 <= p_c <= 1.0:
        raise ConfigurationError("p_c must lie in [0, 1]")
    if p_c == 0.0:
        return 0.0
    x_cop = cfg.coop_radius_km
    lam = cfg.density_per_km2
    theta_p = cfg.theta_cop * p_c

    edges = np.linspace(0.0, x_cop, 8 + 1)
    nodes, weights = _gauss_panels(edges, quad.nodes_per_panel)
    gauss = np.exp(-math.pi * lam * p_c * nodes ** 2)
    pbar_near = _mean_power(env, nodes, cfg.altitude_km)
    pbar_mid = _mean_power(env, 0.5 * nodes + 0.5 * x_cop, cfg.altitude_km)
    base = float(np.sum(weights * nodes * gauss * pbar_near))
    extra = float(np.sum(weights * nodes * gauss * pbar_mid))

    inv_noise_int = mean_interference_inverse(cfg, env, p_c, quad)

    n_max = poisson_truncation_index(theta_p, quad.series_tail_eps)
    total = 0.0
    log_pmf = -theta_p
    for n in range(1, n_max + 1):
        log_pmf += math.log(theta_p) - math.log(n)
        signal = 2.0 * math.pi * lam * p_c * (base + (n - 1) * extra)
        total += math.exp(log_pmf) / n * math.log1p(signal * inv_noise_int)
    return total * cfg.bandwidth_hz / LN2
