"""Command line entry point: ``urglq simulate | beampattern | glq-compare``."""

from __future__ import annotations

import argparse
import contextlib
import logging
import math
import sys

import numpy as np
import yaml

from ..errors import BeamformingError, ConfigurationError, StageError
from ..metrics import beampattern
from ..removal import RECORDED_DATA_ALPHA
from .config import SCENARIOS, ScenarioConfig, config_from_dict, load_config, scenario_config
from .io import MAGIC, export_aggregate_csv, export_csv, load_recorded_snapshots
from .runner import aggregate, draw_truth, glq_compare, method_weights, run_scenario, synthesize, trial_streams

# alpha for the covariance-like matrix when working on recorded data
RECORDED_ALPHA = RECORDED_DATA_ALPHA


@contextlib.contextmanager
def stage(name):
    """Tag any failure inside the block with ``name``."""
    try:
        yield
    except StageError as exc:
        raise StageError(name, exc) from exc
    except (BeamformingError, OSError, ValueError, KeyError, yaml.YAMLError) as exc:
        raise StageError(name, exc) from exc


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _scenario(args) -> ScenarioConfig:
    """Config file, then the scenario preset, then individual flags."""
    cfg = load_config(args.config) if args.config else ScenarioConfig()
    if getattr(args, "scenario", None):
        cfg = scenario_config(args.scenario, cfg)
    overrides = {}
    for key in ("seed", "trials", "workers"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    if getattr(args, "snr_db", None) is not None:
        overrides["snr_grid_db"] = [args.snr_db]
    return config_from_dict(overrides, cfg) if overrides else cfg


def cmd_simulate(args):
    with stage("config"):
        cfg = _scenario(args)
    with stage("simulate"):
        results = run_scenario(cfg)
        aggs = aggregate(results)
    with stage("output"):
        export_csv(results, args.out)
        if args.aggregate_out:
            export_aggregate_csv(aggs, args.aggregate_out)
    for a in aggs:
        print(f"{a.method:<20s} snr={a.snr_db:g} K={a.snapshots}  "
              f"mean={a.mean_sinr_db:.3f} dB  std={a.std_sinr_db:.3f} dB  n={a.count}")
    return 0


def _is_bfsn(path):
    with open(path, "rb") as fh:
        return fh.read(4) == MAGIC


def _grid(step):
    if not step > 0:
        raise ConfigurationError("--grid-step must be positive")
    n = int(math.ceil(180.0 / step))
    angles = -90.0 + step * np.arange(1, n)
    return angles[angles < 90.0]


def cmd_beampattern(args):
    with stage("input"):
        if _is_bfsn(args.input):
            x = load_recorded_snapshots(args.input)
            base = load_config(args.config) if args.config else ScenarioConfig(alpha=RECORDED_ALPHA)
            changes = {"geometry": {"num_sensors": x.shape[0],
                                    "spacing": args.spacing if args.spacing is not None else base.geometry.spacing}}
            if args.desired_doa is not None:
                changes["desired_doa"] = args.desired_doa
            if args.interference_doas is not None:
                changes["interference_doas"] = args.interference_doas
            cfg = config_from_dict(changes, base)
            truth = R_inf = None
        else:
            cfg = load_config(args.input)
            snr, K = cfg.grid[0]
            mm_rng, data_rng = trial_streams(cfg.seed if args.seed is None else args.seed, 0)
            truth = draw_truth(cfg, mm_rng)
            x, R_inf, _ = synthesize(cfg, truth, snr, K, data_rng)
    with stage("beampattern"):
        w = method_weights(args.method, cfg, x, truth, R_inf)
        angles, power = beampattern(w, cfg.geometry, _grid(args.grid_step))
    with stage("output"):
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write("angle_deg,power_db\n")
            for a, p in zip(angles, power):
                fh.write(f"{round(float(a), 10)!r},{float(p)!r}\n")
    return 0


def cmd_glq_compare(args):
    with stage("config"):
        cfg = _scenario(args)
    with stage("glq-compare"):
        rows = glq_compare(cfg, args.l_values)
    with stage("output"):
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write("L,method,mean_sinr_db\n")
            for L, method, mean in rows:
                fh.write(f"{L},{method},{float(mean)!r}\n")
    for L, method, mean in rows:
        print(f"L={L:<5d} {method:<8s} {mean:.3f} dB")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="urglq", description="Robust adaptive beamforming studies")
    p.add_argument("-v", "--verbose", action="store_true", help="log diagonal loading and trial failures")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="Monte Carlo SINR study")
    s.add_argument("--config", help="YAML/JSON scenario file (defaults to the built-in scenario)")
    s.add_argument("--scenario", choices=sorted(SCENARIOS), help="preset applied over the config file")
    s.add_argument("--seed", type=int)
    s.add_argument("--trials", type=int)
    s.add_argument("--workers", type=int, help="worker processes (default: all cores)")
    s.add_argument("--out", default="results.csv")
    s.add_argument("--aggregate-out", help="also write per-method mean/std CSV here")
    s.set_defaults(func=cmd_simulate)

    b = sub.add_parser("beampattern", help="normalized beampattern of one method")
    b.add_argument("--input", required=True, help="BFSN snapshot file or scenario config")
    b.add_argument("--method", required=True)
    b.add_argument("--grid-step", type=float, default=0.1, help="angle step in degrees")
    b.add_argument("--out", default="pattern.csv")
    b.add_argument("--config", help="scenario file for DOAs and spacing when --input is BFSN")
    b.add_argument("--desired-doa", type=float)
    b.add_argument("--interference-doas", type=_float_list)
    b.add_argument("--spacing", type=float, help="sensor spacing in wavelengths (BFSN input)")
    b.add_argument("--seed", type=int, help="seed for config input (default: the config's)")
    b.set_defaults(func=cmd_beampattern)

    g = sub.add_parser("glq-compare", help="GLQ versus midpoint sums over L")
    g.add_argument("--config", help="scenario file; its first grid point is used")
    g.add_argument("--scenario", choices=sorted(SCENARIOS))
    g.add_argument("--l-values", type=_int_list, default=[2, 5, 10, 20, 50])
    g.add_argument("--snr-db", type=float, help="SNR to compare at (default: first of the config grid)")
    g.add_argument("--seed", type=int)
    g.add_argument("--trials", type=int)
    g.add_argument("--workers", type=int)
    g.add_argument("--out", default="glq.csv")
    g.set_defaults(func=cmd_glq_compare)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except StageError as exc:
        print(f"urglq {args.command}: error: {exc}", file=sys.stderr)
        cause = exc
        while isinstance(cause, StageError):
            cause = cause.cause
        return 2 if isinstance(cause, ConfigurationError) else 1


if __name__ == "__main__":
    sys.exit(main())
