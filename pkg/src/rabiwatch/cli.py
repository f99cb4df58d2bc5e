"""Command line entry point: ``rabiwatch {run,ensemble,verify,sweep,budget}``."""

from __future__ import annotations

import argparse
import json
import math
import sys

from .checks import run_checks
from .config import ExperimentConfig, budget, preset
from .errors import InvalidArgumentError, InvariantViolation
from .runner import ensemble_metrics, run, write_ensemble, write_run, sweep, write_sweep

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_INVARIANT = 4

# flag -> configuration key
OVERRIDES = {
    "seed": "seed",
    "out": "out",
    "cycles": "cycles",
    "miss_prob": "miss_prob",
    "efficiency": "efficiency",
    "burst_n": "burst_n",
    "window": "window",
}


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", choices=["fig2", "fig4"], help="base parameter set")
    p.add_argument("--config", help="JSON configuration applied on top of the preset")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output directory")
    p.add_argument("--cycles", type=float, help="Rabi periods to simulate")
    p.add_argument("--miss-prob", dest="miss_prob", type=float, help="probability a feedback atom is lost")
    p.add_argument("--efficiency", type=float, help="detector efficiency")
    p.add_argument("--burst-n", dest="burst_n", type=float, help="mean atoms per feedback burst")
    p.add_argument("--window", type=float, help="smoothing window in units of T_R")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rabiwatch", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="one trajectory with readout and spectra")
    _add_common(p)
    p.add_argument("--index", type=int, default=0, help="trajectory index within the seed")
    p = sub.add_parser("ensemble", help="many trajectories, per-member metrics")
    _add_common(p)
    p.add_argument("--members", type=int, help="ensemble size (config key 'ensemble')")
    p = sub.add_parser("sweep", help="fuzziness and correlation over a parameter grid")
    _add_common(p)
    p.add_argument("--v-ratio", dest="v_ratios", type=_floats, help="comma-separated v/v0 values")
    p.add_argument("--epsilon", dest="epsilons", type=_floats, help="comma-separated epsilon values (radians)")
    p.add_argument("--tau", dest="taus", type=_floats, help="comma-separated tau values (T_R)")
    p.add_argument("--members", type=int, default=10)
    sub.add_parser("verify", help="run the oracle self-checks")
    p = sub.add_parser("budget", help="measurements within the cavity lifetime")
    p.add_argument("--lifetime", type=float, default=0.1, help="cavity lifetime (s)")
    p.add_argument("--tau", type=float, default=100e-6, help="interval between measurements (s)")
    p.add_argument("--rabi-period", dest="rabi_period", type=float, help="T_R (s); default 500 tau")
    return parser


def resolve_config(args) -> ExperimentConfig:
    data = dict(preset(args.preset or "fig2").to_dict())
    if args.config:
        with open(args.config) as fh:
            data.update(json.load(fh))
    for flag, key in OVERRIDES.items():
        value = getattr(args, flag, None)
        if value is not None:
            data[key] = value
    if getattr(args, "miss_prob", None) is not None and data["feedback"] == "ideal":
        data["feedback"] = "per_atom"
    if getattr(args, "burst_n", None) is not None:
        data["feedback"] = "burst"
    members = getattr(args, "members", None)
    if args.command == "ensemble" and members is not None:
        data["ensemble"] = members
    return ExperimentConfig.from_dict(data)


def _print(summary: dict) -> None:
    for key in sorted(summary):
        print(f"{key}: {summary[key]}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            results = run_checks()
            for name, ok, detail in results:
                print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
            return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_CHECK_FAILED
        if args.command == "budget":
            rabi_period = args.rabi_period if args.rabi_period is not None else 500 * args.tau
            b = budget(args.lifetime, args.tau, rabi_period)
            print(f"measurements: {b.measurements}")
            print(f"rabi_cycles: {b.cycles:g}")
            return EXIT_OK
        config = resolve_config(args)
        if args.command == "run":
            result = run(config, args.index)
            _print(write_run(config, result, config.out, args.index))
        elif args.command == "ensemble":
            _print(write_ensemble(config, ensemble_metrics(config), config.out))
        elif args.command == "sweep":
            rows = sweep(config, args.v_ratios or [config.v_ratio], args.epsilons or [config.epsilon],
                         args.taus or [config.tau], args.members)
            write_sweep(rows, config.out)
            for r in rows:
                print(", ".join(f"{k}={v:.6g}" if isinstance(v, float) and math.isfinite(v) else f"{k}={v}"
                                for k, v in r.items()))
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except InvalidArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
