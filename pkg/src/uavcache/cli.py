"""Command-line interface: run, sweep, validate, presets."""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields

from .errors import UavCacheError
from .experiments import RunConfig, run_sweep, validate
from .presets import environment_names, scenario_names


def _apply_sets(config: RunConfig, assignments) -> RunConfig:
    from dataclasses import replace

    field_types = {f.name: f.type for f in fields(RunConfig)}
    overrides = {}
    for item in assignments or ():
        if "=" not in item:
            raise UavCacheError(f"--set expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        key = key.strip()
        if key not in field_types:
            raise UavCacheError(f"unknown config key {key!r}")
        current = getattr(config, key)
        if key == "sweep_values":
            overrides[key] = tuple(float(v) for v in raw.split(","))
        elif key == "strategies":
            overrides[key] = tuple(s.strip() for s in raw.split(","))
        elif isinstance(current, bool):
            overrides[key] = raw.strip().lower() in ("1", "true", "yes", "on")
        elif isinstance(current, int) and not isinstance(current, bool):
            overrides[key] = int(raw)
        elif isinstance(current, float) or current is None:
            overrides[key] = float(raw)
        else:
            overrides[key] = raw
    return replace(config, **overrides)


def _add_common(parser):
    parser.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a config field (repeatable)")
    parser.add_argument("--outdir", help="output directory override")


def _finalize(config, args) -> RunConfig:
    config = _apply_sets(config, args.set)
    if args.outdir:
        from dataclasses import replace
        config = replace(config, output_dir=args.outdir)
    return config


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="uavcache",
        description="Energy efficiency of cooperative caching in UAV networks")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a sweep described by a config file")
    p_run.add_argument("config", help="path to a [run] config file")
    _add_common(p_run)

    p_sweep = sub.add_parser("sweep", help="run a named scenario preset")
    p_sweep.add_argument("scenario", help="scenario preset name")
    _add_common(p_sweep)

    p_val = sub.add_parser("validate",
                           help="cross-check the analysis against Monte Carlo")
    p_val.add_argument("--scenario", default="validation")
    p_val.add_argument("--trials", type=int, default=None)
    p_val.add_argument("--compare-literal", action="store_true",
                       help="also evaluate the printed integration limits")
    _add_common(p_val)

    p_presets = sub.add_parser("presets", help="inspect shipped presets")
    p_presets.add_argument("action", choices=["list"])

    args = parser.parse_args(argv)
    try:
        if args.command == "presets":
            print("environments:")
            for name in environment_names():
                print(f"  {name}")
            print("scenarios:")
            for name in scenario_names():
                print(f"  {name}")
            return 0

        if args.command in ("run", "sweep"):
            if args.command == "run":
                config = RunConfig.from_file(args.config)
            else:
                config = RunConfig.from_scenario(args.scenario)
            config = _finalize(config, args)
            result = run_sweep(config)
            outdir = config.resolved_output_dir()
            print(f"{len(result.rows)} rows -> {outdir}")
            for row in result.failures:
                print(f"  FAILED {row.sweep_value} {row.strategy}: {row.note}")
            return 1 if result.failures else 0

        # validate
        config = RunConfig.from_scenario(args.scenario)
        if args.trials is not None:
            from dataclasses import replace
            config = replace(config, trials=args.trials)
        config = _finalize(config, args)
        report = validate(config, compare_literal=args.compare_literal)
        for row in report.rows:
            print(f"xcop={row.xcop_km:g} analytic={row.analytic_bps:.6g} "
                  f"mc={row.mc_bps:.6g} se={row.mc_se_bps:.3g} "
                  f"z={row.z_score:+.2f}")
        print("PASS" if report.passed else "FAIL")
        return 0 if report.passed else 1
    except UavCacheError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
