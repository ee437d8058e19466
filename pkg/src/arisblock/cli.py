"""Command-line driver.

    arisblock run  [CONFIG] [--trials N] [--seed S] [--density B] ...
    arisblock fig4 [CONFIG]     density sweep, with and without ARIS
    arisblock fig5 [CONFIG]     clearance sweep, blockage probability
    arisblock fig6 [CONFIG]     clearance sweep, SE with flagged optimum
    arisblock config            print the fully expanded default config

Every command writes one CSV plus a ``.manifest.yaml`` beside it.
Exit codes: 0 ok, 2 config/schema error, 3 physics validation error,
4 runtime failure.
"""
import argparse
import csv
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

import yaml

from . import __version__
from .config import config_to_dict, dump_config, load_config
from .errors import ConfigurationError, GeometryError, PhysicsValidationError
from .simulation import WITH_ARIS, WITHOUT_ARIS, WORKERS_ENV, argmax_clearance, run_grid, run_scenario

HEADER = ["axis", "value", "mode", "density_bl_m2", "clearance_m", "blockage_prob",
          "mean_se_bpshz", "se_ci95", "trials", "seed"]

EXIT_OK, EXIT_CONFIG, EXIT_PHYSICS, EXIT_RUNTIME = 0, 2, 3, 4


def _num(x):
    return f"{x:.6g}"


def csv_row(axis, value, summary):
    cfg = summary.config
    return [axis, _num(value), cfg.mode, _num(cfg.blocker_density), _num(cfg.aris_clearance),
            _num(summary.blockage_probability), _num(summary.mean_se),
            _num(summary.se_ci95_halfwidth), str(summary.trials), str(summary.seed)]


def manifest_path(csv_path):
    csv_path = Path(csv_path)
    return csv_path.with_name(csv_path.stem + ".manifest.yaml")


def write_outputs(out, rows, command, config, sweeps, started):
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HEADER)
        writer.writerows(rows)
    manifest = {
        "tool_version": __version__,
        "command": command,
        "seed": config.seed,
        "duration_s": round(time.perf_counter() - started, 3),
        "outputs": [str(out)],
        "config": config_to_dict(config, sweeps),
    }
    with open(manifest_path(out), "w") as fh:
        yaml.safe_dump(manifest, fh, sort_keys=False)
    return out


def _progress(args):
    if not (args.progress or sys.stderr.isatty()):
        return None

    def report(done, total):
        sys.stderr.write(f"\r{done}/{total} chunks")
        if done == total:
            sys.stderr.write("\n")
        sys.stderr.flush()

    return report


def _workers(flag):
    if flag is not None:
        return flag
    env = os.environ.get(WORKERS_ENV)
    return int(env) if env else (os.cpu_count() or 1)


def _apply_overrides(config, args):
    changes = {}
    for attr, key in (("trials", "trials"), ("seed", "seed"), ("density", "blocker_density"),
                      ("clearance", "aris_clearance"), ("mode", "mode")):
        value = getattr(args, attr, None)
        if value is not None:
            changes[key] = value
    return replace(config, **changes) if changes else config


def cmd_run(args):
    started = time.perf_counter()
    config, sweeps = load_config(args.config)
    config = _apply_overrides(config, args)
    summary = run_scenario(config, workers=_workers(args.workers), progress=_progress(args))
    rows = [csv_row("run", config.blocker_density, summary)]
    return write_outputs(args.out or "results/run.csv", rows, "run", config, sweeps, started)


def cmd_fig4(args):
    started = time.perf_counter()
    config, sweeps = load_config(args.config)
    config = _apply_overrides(config, args)
    spec = sweeps.fig4
    if args.clearance is not None:
        spec = replace(spec, clearances=(args.clearance,))
    rows = []
    for mode in (WITH_ARIS, WITHOUT_ARIS):
        grid = run_grid(replace(config, mode=mode), spec.densities, spec.clearances,
                        workers=_workers(args.workers), progress=_progress(args))
        rows += [csv_row("density", b, row[0]) for b, row in zip(spec.densities, grid)]
    return write_outputs(args.out or "results/fig4.csv", rows, "fig4", config,
                         replace(sweeps, fig4=spec), started)


def _height_sweep(args, name, flag_optimum):
    started = time.perf_counter()
    config, sweeps = load_config(args.config)
    config = replace(_apply_overrides(config, args), mode=WITH_ARIS)
    spec = getattr(sweeps, name)
    if args.density is not None:
        spec = replace(spec, densities=(args.density,))
    grid = run_grid(config, spec.densities, spec.clearances,
                    workers=_workers(args.workers), progress=_progress(args))
    rows = []
    for row in grid:
        points = list(zip(spec.clearances, row))
        rows += [csv_row("clearance", c, s) for c, s in points]
        if flag_optimum:
            best, summary = argmax_clearance(points)
            rows.append(csv_row("optimum", best, summary))
    return write_outputs(args.out or f"results/{name}.csv", rows, name, config,
                         replace(sweeps, **{name: spec}), started)


def cmd_fig5(args):
    return _height_sweep(args, "fig5", flag_optimum=False)


def cmd_fig6(args):
    return _height_sweep(args, "fig6", flag_optimum=True)


def cmd_config(args):
    config, sweeps = load_config(args.config)
    sys.stdout.write(dump_config(config, sweeps))


def build_parser():
    parser = argparse.ArgumentParser(
        prog="arisblock",
        description="Human-body blockage Monte Carlo for ARIS-assisted D2D mmWave links",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, point=True):
        p.add_argument("config", nargs="?", help="YAML scenario file or run manifest (default: built-in values)")
        p.add_argument("--trials", type=int, help="Monte Carlo trials per point")
        p.add_argument("--seed", type=int, help="base seed")
        p.add_argument("--density", type=float,
                       help="blocker density, bl/m^2 (fig5/fig6: replaces the density series)")
        p.add_argument("--clearance", type=float,
                       help="ARIS height above the device plane, m (fig4: the fixed clearance)")
        if point:
            p.add_argument("--mode", choices=[WITH_ARIS, WITHOUT_ARIS])
        p.add_argument("--workers", type=int, help=f"worker processes (env {WORKERS_ENV}; default all cores)")
        p.add_argument("--out", help="CSV output path")
        p.add_argument("--progress", action="store_true", help="chunk counter on stderr")

    p = sub.add_parser("run", help="single scenario point")
    common(p)
    p.set_defaults(func=cmd_run)
    for name, func, text in (("fig4", cmd_fig4, "blockage and SE versus blocker density"),
                             ("fig5", cmd_fig5, "blockage versus ARIS clearance"),
                             ("fig6", cmd_fig6, "SE versus ARIS clearance with optimum rows")):
        p = sub.add_parser(name, help=text)
        common(p, point=False)
        p.set_defaults(func=func)
    p = sub.add_parser("config", help="print the expanded configuration")
    p.add_argument("config", nargs="?")
    p.set_defaults(func=cmd_config)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        out = args.func(args)
    except PhysicsValidationError as exc:
        print(f"physics error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except ConfigurationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GeometryError as exc:
        print(f"physics error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG if getattr(exc, "filename", None) == args.config else EXIT_RUNTIME
    except Exception as exc:  # noqa: BLE001 - last-resort exit code
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    if out is not None:
        print(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
