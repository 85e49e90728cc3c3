"""Experiment runner: run configs, parameter sweeps, validation reports.

A RunConfig pins every model parameter plus one sweep axis.  Sweeps emit a
versioned CSV (one row per sweep point and strategy), a static plot, and a
JSON manifest echoing the resolved configuration so a run can be
reproduced byte-for-byte.
"""

from __future__ import annotations

import configparser
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path

from . import __version__
from .analysis import NetworkConfig, QuadratureSpec, gamma_exact
from .channel import EnvironmentParams
from .energy import DisplacementPlan, UavPlatform, airtime_s, total_energy
from .errors import ConfigurationError, UavCacheError
from .optimizer import AltitudeGrid, STRATEGIES, solve_p, solve_p_cache
from .placement import zipf_popularity
from .presets import load_environment, load_scenario
from .simulator import SimSpec, simulate_gamma, simulate_network_gamma

CSV_SCHEMA = 1
SWEEP_AXES = ("kappa", "xcop", "lambda", "h0", "cache_frac")

OUTDIR_ENV_VAR = "UAVCACHE_OUTDIR"


@dataclass
class RunConfig:
    """Fully resolved parameters of one experiment run."""

    scenario: str = "custom"
    environment: str = "urban"
    density: float = 0.1
    xcop: float = 2.0
    bandwidth_hz: float = 1e6
    noise_power_w: float = 3.1623e-14
    altitude_km: float = 0.2
    tx_power_w: float = 1.0
    catalog_size: int = 20
    cache_size: int = 5
    kappa: float = 0.8
    mass_kg: float = 10.2
    rotor_radius_m: float = 0.5
    vertical_speed_mps: float = 10.0
    circuit_power_w: float = 1e-5
    cache_power_per_unit_w: float = 1e-6
    window_s: float = 200.0
    use_weight_force: bool = False
    h_min_km: float = 0.05
    h_max_km: float = 0.4
    n_altitudes: int = 16
    rel_tol: float = 1e-3
    series_tail_eps: float = 1e-10
    interference_truncation_km: float | None = None
    literal_interference_limits: bool = False
    trials: int = 100000
    mc_trials: int = 0
    seed: int = 2024
    sim_radius_km: float | None = None
    antithetic: bool = False
    p_c: float = 0.5
    sweep_axis: str = "kappa"
    sweep_values: tuple[float, ...] = ()
    strategies: tuple[str, ...] = STRATEGIES
    optimize_altitude: bool = False
    output_dir: str = "results"
    workers: int = 1

    def __post_init__(self):
        if self.sweep_axis not in SWEEP_AXES:
            raise ConfigurationError(
                f"sweep_axis must be one of {SWEEP_AXES}, got {self.sweep_axis!r}")
        if not self.sweep_values:
            raise ConfigurationError("sweep_values must be nonempty")
        unknown = set(self.strategies) - set(STRATEGIES)
        if unknown:
            raise ConfigurationError(f"unknown strategies: {sorted(unknown)}")
        if self.catalog_size < 1 or not 0 <= self.cache_size <= self.catalog_size:
            raise ConfigurationError("need 0 <= cache_size <= catalog_size >= 1")

    # -- construction -----------------------------------------------------

    @classmethod
    def from_scenario(cls, name: str, **overrides) -> "RunConfig":
        raw = load_scenario(name)
        cfg = cls._from_mapping(raw, scenario=name)
        return replace(cfg, **overrides) if overrides else cfg

    @classmethod
    def _from_mapping(cls, raw: dict, scenario: str) -> "RunConfig":
        kwargs: dict = {"scenario": scenario}
        mapping = {
            "environment": str, "density": float, "xcop": float,
            "bandwidth_hz": float, "noise_power_w": float,
            "altitude_km": float, "tx_power_w": float,
            "catalog_size": int, "cache_size": int, "kappa": float,
            "mass_kg": float, "rotor_radius_m": float,
            "vertical_speed_mps": float, "circuit_power_w": float,
            "cache_power_per_unit_w": float, "window_s": float,
            "h_min_km": float, "h_max_km": float, "n_altitudes": int,
            "rel_tol": float, "series_tail_eps": float,
            "interference_truncation_km": float, "trials": int,
            "mc_trials": int, "seed": int, "sim_radius_km": float,
            "p_c": float, "sweep_axis": str, "output_dir": str,
            "workers": int,
        }
        for key, conv in mapping.items():
            if key in raw:
                kwargs[key] = conv(raw[key])
        for key in ("use_weight_force", "optimize_altitude", "antithetic",
                    "literal_interference_limits"):
            if key in raw:
                kwargs[key] = str(raw[key]).strip().lower() in ("1", "true",
                                                                "yes", "on")
        if "sweep_values" in raw:
            kwargs["sweep_values"] = tuple(
                float(v) for v in str(raw["sweep_values"]).split(","))
        if "strategies" in raw:
            kwargs["strategies"] = tuple(
                s.strip() for s in str(raw["strategies"]).split(","))
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        parser = configparser.ConfigParser(interpolation=None)
        read = parser.read(path)
        if not read:
            raise ConfigurationError(f"cannot read config file {path}")
        if "run" not in parser:
            raise ConfigurationError("config file needs a [run] section")
        raw = dict(parser["run"])
        scenario = raw.pop("scenario", "custom")
        return cls._from_mapping(raw, scenario=scenario)

    def to_file(self, path: str | Path) -> None:
        parser = configparser.ConfigParser(interpolation=None)
        raw = {}
        for key, value in asdict(self).items():
            if value is None:
                continue
            if key == "sweep_values":
                raw[key] = ", ".join(format(v, ".12g") for v in value)
            elif key == "strategies":
                raw[key] = ", ".join(value)
            elif isinstance(value, bool):
                raw[key] = "true" if value else "false"
            elif isinstance(value, float):
                raw[key] = format(value, ".12g")
            else:
                raw[key] = str(value)
        parser["run"] = raw
        with open(path, "w") as fh:
            parser.write(fh)

    # -- model objects ------------------------------------------------------

    def env(self) -> EnvironmentParams:
        return load_environment(self.environment)

    def network(self) -> NetworkConfig:
        return NetworkConfig(density_per_km2=self.density,
                             coop_radius_km=self.xcop,
                             bandwidth_hz=self.bandwidth_hz,
                             noise_power_w=self.noise_power_w,
                             altitude_km=self.altitude_km,
                             tx_power_w=self.tx_power_w)

    def platform(self) -> UavPlatform:
        return UavPlatform(mass_kg=self.mass_kg,
                           rotor_radius_m=self.rotor_radius_m,
                           vertical_speed_mps=self.vertical_speed_mps,
                           tx_power_w=self.tx_power_w,
                           circuit_power_w=self.circuit_power_w,
                           cache_power_per_unit_w=self.cache_power_per_unit_w,
                           window_s=self.window_s,
                           use_weight_force=self.use_weight_force)

    def quad(self) -> QuadratureSpec:
        return QuadratureSpec(
            rel_tol=self.rel_tol,
            series_tail_eps=self.series_tail_eps,
            interference_truncation_km=self.interference_truncation_km,
            literal_interference_limits=self.literal_interference_limits)

    def grid(self, h0_km: float | None = None) -> AltitudeGrid:
        return AltitudeGrid(h_min_km=self.h_min_km, h_max_km=self.h_max_km,
                            n_max=self.n_altitudes,
                            h0_km=self.altitude_km if h0_km is None else h0_km)

    def resolved_output_dir(self) -> Path:
        return Path(os.environ.get(OUTDIR_ENV_VAR, self.output_dir))


# -- sweep execution ---------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    sweep_axis: str
    sweep_value: float
    strategy: str
    eta: float = math.nan
    eta_baseline: float = math.nan
    gain: float = math.nan
    h1_km: float = math.nan
    direction: str = ""
    e_com_j: float = math.nan
    e_hov_j: float = math.nan
    e_dis_j: float = math.nan
    e_tot_j: float = math.nan
    gamma_wavg_bps: float = math.nan
    mc_gamma_wavg_bps: float = math.nan
    mc_se_bps: float = math.nan
    status: str = "ok"
    note: str = ""


CSV_COLUMNS = tuple(SweepRow.__dataclass_fields__)


def _apply_axis(config: RunConfig, value: float) -> RunConfig:
    axis = config.sweep_axis
    if axis == "kappa":
        return replace(config, kappa=value)
    if axis == "xcop":
        return replace(config, xcop=value)
    if axis == "lambda":
        return replace(config, density=value)
    if axis == "h0":
        return replace(config, altitude_km=value)
    if axis == "cache_frac":
        size = max(1, min(config.catalog_size,
                          round(value * config.catalog_size)))
        return replace(config, cache_size=size)
    raise ConfigurationError(f"unhandled sweep axis {axis!r}")


def _evaluate_point(args) -> SweepRow:
    config, value, strategy = args
    point = _apply_axis(config, value)
    try:
        catalog = zipf_popularity(point.catalog_size, point.kappa)
        cfg = point.network()
        env = point.env()
        platform = point.platform()
        quad = point.quad()
        if point.optimize_altitude:
            result = solve_p(strategy, catalog, point.cache_size, cfg, env,
                             platform, point.grid(), quad)
            sol, baseline, gain = result.best, result.baseline, result.gain
            plan = DisplacementPlan.between(point.altitude_km, sol.h1_km)
            eta_baseline = baseline.eta
        else:
            plan = DisplacementPlan.between(point.altitude_km,
                                            point.altitude_km)
            sol = solve_p_cache(strategy, catalog, point.cache_size, cfg, env,
                                platform, plan, quad)
            eta_baseline, gain = sol.eta, 1.0
        breakdown = total_energy(platform, plan, sol.placement.cache_size)
        air = airtime_s(platform, plan)
        gamma_wavg = sol.eta * breakdown.e_tot_j / air if air else 0.0
        mc_gamma, mc_se = math.nan, math.nan
        if point.mc_trials > 0:
            cfg_at = replace(cfg, altitude_km=sol.h1_km)
            spec = SimSpec(trials=point.mc_trials, seed=point.seed,
                           sim_radius_km=point.sim_radius_km,
                           antithetic=point.antithetic)
            estimate = simulate_network_gamma(cfg_at, env, catalog.weights,
                                              sol.placement.array, spec)
            mc_gamma, mc_se = estimate.gamma, estimate.se
        return SweepRow(sweep_axis=point.sweep_axis, sweep_value=value,
                        strategy=strategy, eta=sol.eta,
                        eta_baseline=eta_baseline, gain=gain,
                        h1_km=sol.h1_km, direction=sol.direction,
                        e_com_j=breakdown.e_com_j, e_hov_j=breakdown.e_hov_j,
                        e_dis_j=breakdown.e_dis_j, e_tot_j=breakdown.e_tot_j,
                        gamma_wavg_bps=gamma_wavg, mc_gamma_wavg_bps=mc_gamma,
                        mc_se_bps=mc_se)
    except UavCacheError as exc:
        return SweepRow(sweep_axis=point.sweep_axis, sweep_value=value,
                        strategy=strategy, status="error", note=str(exc))


@dataclass
class SweepResult:
    config: RunConfig
    rows: list[SweepRow]

    @property
    def failures(self) -> list[SweepRow]:
        return [r for r in self.rows if r.status != "ok"]


def run_sweep(config: RunConfig, write_outputs: bool = True) -> SweepResult:
    """Run every (sweep value, strategy) point and emit CSV/plot/manifest.

    Per-point numeric failures are recorded in their row and the sweep
    continues; configuration errors surface before any computation.
    """
    points = [(config, value, strategy)
              for value in config.sweep_values
              for strategy in config.strategies]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(_evaluate_point, points))
    else:
        rows = [_evaluate_point(p) for p in points]
    result = SweepResult(config=config, rows=rows)
    if write_outputs:
        outdir = config.resolved_output_dir()
        outdir.mkdir(parents=True, exist_ok=True)
        stem = f"{config.scenario}_{config.sweep_axis}"
        write_csv(result, outdir / f"{stem}.csv")
        write_manifest(config, outdir / f"{stem}_manifest.json")
        try:
            write_plot(result, outdir / f"{stem}.png")
        except ImportError:
            pass
    return result


def format_number(value) -> str:
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return format(value, ".12g")
    return str(value)


def render_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    buf.write(f"# uavcache sweep schema={CSV_SCHEMA}\n")
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for row in result.rows:
        values = [format_number(getattr(row, col)) for col in CSV_COLUMNS]
        buf.write(",".join(values) + "\n")
    return buf.getvalue()


def write_csv(result: SweepResult, path: Path) -> None:
    path.write_text(render_csv(result))


def write_manifest(config: RunConfig, path: Path) -> None:
    payload = {"package": "uavcache", "version": __version__,
               "config": asdict(config)}
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_plot(result: SweepResult, path: Path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    config = result.config
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    y_field = "gain" if config.optimize_altitude else "eta"
    for strategy in config.strategies:
        xs = [r.sweep_value for r in result.rows
              if r.strategy == strategy and r.status == "ok"]
        ys = [getattr(r, y_field) for r in result.rows
              if r.strategy == strategy and r.status == "ok"]
        ax.plot(xs, ys, marker="o", label=strategy)
    if config.sweep_axis == "lambda":
        ax.set_xscale("log")
    ax.set_xlabel(config.sweep_axis)
    ax.set_ylabel("EE gain over baseline" if config.optimize_altitude
                  else "network EE (bit/J)")
    ax.set_title(config.scenario)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


# -- validation ---------------------------------------------------------------


@dataclass(frozen=True)
class ValidationRow:
    xcop_km: float
    p_c: float
    analytic_bps: float
    mc_bps: float
    mc_se_bps: float
    z_score: float
    analytic_literal_bps: float = math.nan
    z_literal: float = math.nan


@dataclass
class ValidationReport:
    rows: list[ValidationRow]
    passed: bool

    def render(self) -> str:
        lines = ["xcop_km,p_c,analytic_bps,mc_bps,mc_se_bps,z_score,"
                 "analytic_literal_bps,z_literal"]
        for row in self.rows:
            lines.append(",".join(format_number(v) for v in (
                row.xcop_km, row.p_c, row.analytic_bps, row.mc_bps,
                row.mc_se_bps, row.z_score, row.analytic_literal_bps,
                row.z_literal)))
        lines.append(f"# result: {'PASS' if self.passed else 'FAIL'} "
                     "(pass requires |z| <= 3 at every point)")
        return "\n".join(lines) + "\n"


def validate(config: RunConfig, compare_literal: bool = False,
             write_outputs: bool = True) -> ValidationReport:
    """Cross-check the analytic rate factor against the Monte Carlo oracle.

    Runs the configured design (one point per sweep value, interpreted as a
    cooperation radius) and reports the z-score of each analytic value
    under the Monte Carlo standard error.  The literal-limits columns redo
    the analytic evaluation with the printed in-zone interference bounds.
    """
    if config.trials < 1:
        raise ConfigurationError("validation needs at least one trial")
    if config.sweep_axis != "xcop":
        raise ConfigurationError("validation sweeps the cooperation radius")
    env = config.env()
    rows = []
    for xcop in config.sweep_values:
        point = replace(config, xcop=xcop)
        cfg = point.network()
        quad = point.quad()
        sim_radius = point.sim_radius_km or quad.truncation_km(cfg)
        if sim_radius < quad.truncation_km(cfg):
            raise ConfigurationError(
                "simulation window must cover the interference truncation")
        spec = SimSpec(trials=point.trials, sim_radius_km=sim_radius,
                       seed=point.seed, antithetic=point.antithetic)
        analytic = gamma_exact(cfg, env, point.p_c, quad)
        estimate = simulate_gamma(cfg, env, point.p_c, spec)
        z = (analytic - estimate.gamma) / estimate.se if estimate.se else 0.0
        literal_value, literal_z = math.nan, math.nan
        if compare_literal:
            literal_quad = replace(quad, literal_interference_limits=True)
            literal_value = gamma_exact(cfg, env, point.p_c, literal_quad)
            if estimate.se:
                literal_z = (literal_value - estimate.gamma) / estimate.se
        rows.append(ValidationRow(xcop_km=xcop, p_c=point.p_c,
                                  analytic_bps=analytic,
                                  mc_bps=estimate.gamma,
                                  mc_se_bps=estimate.se, z_score=z,
                                  analytic_literal_bps=literal_value,
                                  z_literal=literal_z))
    passed = all(abs(r.z_score) <= 3.0 for r in rows)
    report = ValidationReport(rows=rows, passed=passed)
    if write_outputs:
        outdir = config.resolved_output_dir()
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "validation_report.csv").write_text(report.render())
    return report
