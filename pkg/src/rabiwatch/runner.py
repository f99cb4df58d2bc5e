"""Batch execution and plot-ready serialization of runs, ensembles and sweeps."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import oracle
from .config import MISS_PROBABILITY_LIMIT, ExperimentConfig
from .errors import InvalidArgumentError, InvariantViolation, NoPeakError, UndefinedCorrelationError
from .measurement import (
    average_fuzziness,
    averaged_statistics,
    decoherence_time,
    fuzziness,
    in_fuzziness_band,
    measurement_amplitudes,
)
from .readout import (
    ReadoutSeries,
    build_readout,
    dominant_frequency,
    fidelity_correlation,
    flagged_maxima_fraction,
    power_spectrum,
    readout_correlation,
)
from .state import RabiParams
from .trajectory import TrajectoryRecord, run_ensemble

NORM_TOLERANCE = 1e-9


def fmt(x) -> str:
    return format(float(x), ".17g")


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return x


def write_json(path, data) -> None:
    Path(path).write_text(json.dumps(_jsonable(data), indent=2, sort_keys=True) + "\n")


def _safe(fn, *args):
    try:
        return fn(*args)
    except (UndefinedCorrelationError, NoPeakError, InvalidArgumentError):
        return math.nan


def operating_point(config: ExperimentConfig) -> dict:
    params = config.apparatus()
    model = measurement_amplitudes(params)
    decay = oracle.nonselective_decay_factor(model, params.tau)
    f_avg = average_fuzziness(params)
    return {
        "p1": model.p1,
        "p2": model.p2,
        "dp": model.dp,
        "fuzziness_mean_velocity": fuzziness(model, params.tau),
        "fuzziness_average": f_avg,
        "in_fuzziness_band": in_fuzziness_band(f_avg),
        "T_D_formula": decoherence_time(model, params.tau),
        "T_D_exact": decay.T_D_exact,
    }


@dataclass
class MemberResult:
    record: TrajectoryRecord
    readout: ReadoutSeries
    spectrum_G2: tuple
    spectrum_c2sq: tuple
    metrics: dict


def analyse_member(record: TrajectoryRecord, config: ExperimentConfig, statistics) -> MemberResult:
    readout = build_readout(record, statistics, config.N, config.window)
    spec_c2 = power_spectrum(record.c2sq, record.tau)
    try:
        spec_g2 = power_spectrum(readout.G2, times=readout.t0)
    except InvalidArgumentError:
        spec_g2 = (np.array([]), np.array([]))
    fraction, maxima = flagged_maxima_fraction(record, readout)
    metrics = {
        "correlation": _safe(readout_correlation, readout),
        "fidelity_correlation": _safe(fidelity_correlation, record, config.fidelity_horizon),
        "peak_G2": _safe(dominant_frequency, *spec_g2),
        "peak_c2sq": _safe(dominant_frequency, *spec_c2),
        "maxima": maxima,
        "maxima_flagged_fraction": fraction,
        "recorded_fraction": float(np.mean(record.recorded)),
    }
    return MemberResult(record, readout, spec_g2, spec_c2, metrics)


def check_invariants(record: TrajectoryRecord) -> None:
    total = record.c1sq + record.c2sq
    if not np.all(np.abs(total - 1.0) < NORM_TOLERANCE):
        raise InvariantViolation("populations do not sum to one")
    if not np.all(np.diff(record.t) > 0):
        raise InvariantViolation("timestamps are not increasing")


def simulate_members(config: ExperimentConfig, members) -> TrajectoryRecord:
    record = run_ensemble(
        config.initial_state(), RabiParams(), config.apparatus(), config.policy(), config.detector(),
        config.total_steps, config.seed, members,
    )
    check_invariants(record)
    return record


def run(config: ExperimentConfig, index: int = 0) -> MemberResult:
    """Trajectory ``index`` of the configured seed, with readout and spectra."""
    record = simulate_members(config, [index]).member(0)
    return analyse_member(record, config, averaged_statistics(config.apparatus()))


def run_summary(config: ExperimentConfig, result: MemberResult, index: int = 0) -> dict:
    summary = {
        "preset": config.name,
        "seed": config.seed,
        "trajectory_index": index,
        "steps": config.total_steps,
        **operating_point(config),
        **result.metrics,
        "miss_probability": config.miss_prob if config.feedback == "per_atom" else 0.0,
    }
    summary["feedback_degraded"] = summary["miss_probability"] >= MISS_PROBABILITY_LIMIT
    return summary


def write_run(config: ExperimentConfig, result: MemberResult, out, index: int = 0) -> dict:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    rec = result.record
    with open(out / "trajectory.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t_over_TR", "c2sq_disturbed", "c2sq_undisturbed", "outcome", "recorded", "feedback_phase",
                    "c1sq_disturbed"])
        for n in range(rec.steps):
            outcome = ("e" if rec.outcome_e[n] else "g") if rec.recorded[n] else "·"
            w.writerow([fmt(rec.t[n]), fmt(rec.c2sq[n]), fmt(rec.c2sq_undisturbed[n]), outcome,
                        int(rec.recorded[n]), fmt(rec.feedback_phase[n]), fmt(rec.c1sq[n])])
    ro = result.readout
    with open(out / "readout.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t0_over_TR", "r", "G2", "G2_smoothed"])
        for row in zip(ro.t0, ro.r, ro.G2, ro.G2_smoothed):
            w.writerow([fmt(x) for x in row])
    for name, (freq, power) in (("spectrum_G2.csv", result.spectrum_G2), ("spectrum_c2sq.csv", result.spectrum_c2sq)):
        with open(out / name, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["omega_over_OmegaR", "power"])
            for row in zip(freq, power):
                w.writerow([fmt(x) for x in row])
    summary = run_summary(config, result, index)
    write_json(out / "summary.json", summary)
    config.save(out / "config.json")
    return summary


def ensemble_metrics(config: ExperimentConfig, members: int | None = None) -> list[dict]:
    """Per-member metrics for trajectories ``0 .. members-1``."""
    members = config.ensemble if members is None else members
    record = simulate_members(config, members)
    stats = averaged_statistics(config.apparatus())
    rows = []
    for i in range(members):
        rows.append({"index": i, **analyse_member(record.member(i), config, stats).metrics})
    return rows


def _median(rows, key):
    values = np.array([r[key] for r in rows], dtype=float)
    values = values[np.isfinite(values)]
    return float(np.median(values)) if values.size else math.nan


def ensemble_summary(config: ExperimentConfig, rows: list[dict]) -> dict:
    peaks = np.array([r["peak_G2"] for r in rows], dtype=float)
    summary = {
        "preset": config.name,
        "seed": config.seed,
        "members": len(rows),
        **operating_point(config),
        "median_correlation": _median(rows, "correlation"),
        "median_fidelity_correlation": _median(rows, "fidelity_correlation"),
        "peak_G2_within_10pct": float(np.mean(np.abs(peaks - 1.0) <= 0.1)),
        "median_maxima_flagged_fraction": _median(rows, "maxima_flagged_fraction"),
    }
    if config.feedback == "per_atom" and config.miss_prob > 0:
        # same seed, same noise: only the lost feedback atoms differ
        reference = ensemble_metrics(config.replace(miss_prob=0.0), len(rows))
        drop = _median(reference, "fidelity_correlation") - summary["median_fidelity_correlation"]
        summary["reference_median_fidelity_correlation"] = _median(reference, "fidelity_correlation")
        summary["fidelity_drop"] = drop
        summary["feedback_degraded"] = drop > 0.1
    return summary


METRIC_COLUMNS = ["index", "correlation", "fidelity_correlation", "peak_G2", "peak_c2sq", "maxima",
                  "maxima_flagged_fraction", "recorded_fraction"]


def write_ensemble(config: ExperimentConfig, rows: list[dict], out) -> dict:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "members.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(METRIC_COLUMNS)
        for r in rows:
            w.writerow([r["index"], *(fmt(r[k]) for k in METRIC_COLUMNS[1:])])
    summary = ensemble_summary(config, rows)
    write_json(out / "ensemble_summary.json", summary)
    config.save(out / "config.json")
    return summary


def sweep(config: ExperimentConfig, v_ratios, epsilons, taus, members: int | None = None) -> list[dict]:
    """Fuzziness and median readout correlation over a parameter grid."""
    rows = []
    for v in v_ratios:
        for eps in epsilons:
            for tau in taus:
                point = config.replace(v_ratio=v, epsilon=eps, tau=tau)
                params = point.apparatus()
                metrics = ensemble_metrics(point, members or min(point.ensemble, 10))
                rows.append({
                    "v_ratio": v,
                    "epsilon": eps,
                    "tau": tau,
                    "fuzziness": average_fuzziness(params),
                    "median_correlation": _median(metrics, "correlation"),
                })
    return rows


def write_sweep(rows: list[dict], out) -> None:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        cols = ["v_ratio", "epsilon", "tau", "fuzziness", "median_correlation"]
        w.writerow(cols)
        for r in rows:
            w.writerow([fmt(r[c]) for c in cols])
