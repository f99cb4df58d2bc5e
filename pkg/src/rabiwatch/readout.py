"""From a stream of e/g clicks to the real-time readout of ``|c2|^2``.

Outcomes are grouped into consecutive N-series.  Each series yields a
relative frequency ``r`` of e-clicks among the *recorded* outcomes and a best
guess ``G2 = (r - p1)/dp`` attached to the time of the series' first
measurement.  The G2 sequence is then time-averaged, Fourier analysed and
compared with the simulated state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, NoInformationError, NoPeakError, UndefinedCorrelationError

DEFAULT_WINDOW = 0.25
OMEGA_R_NATURAL = 2.0 * math.pi


@dataclass
class ReadoutSeries:
    """One entry per completed N-series that contains at least one recorded outcome."""

    t0: np.ndarray
    r: np.ndarray
    G2: np.ndarray
    G2_smoothed: np.ndarray
    recorded: np.ndarray
    c2sq_block: np.ndarray
    N: int
    interval: float

    def __len__(self):
        return len(self.t0)

    @property
    def uniform(self) -> bool:
        return len(self.t0) < 2 or np.allclose(np.diff(self.t0), self.interval, rtol=0, atol=1e-9 * self.interval)


def series_relative_frequency(outcome_e, recorded, N: int):
    """Relative e-frequency over the recorded outcomes of each complete N-series.

    Returns ``(r, recorded_count)``; ``r`` is NaN for series without any
    recorded outcome.
    """
    if N < 1:
        raise InvalidArgumentError("N must be >= 1")
    outcome_e = np.asarray(outcome_e, dtype=bool)
    recorded = np.asarray(recorded, dtype=bool)
    k = outcome_e.shape[-1] // N
    clicks = (outcome_e & recorded)[..., : k * N].reshape(*outcome_e.shape[:-1], k, N).sum(-1)
    counts = recorded[..., : k * N].reshape(*recorded.shape[:-1], k, N).sum(-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(counts > 0, clicks / np.maximum(counts, 1), np.nan)
    return r, counts


def best_guess(r, model):
    """``(r - p1)/dp`` for a model (or statistics) exposing ``p1`` and ``dp``.

    The result is deliberately not clamped to [0, 1].
    """
    if model.dp == 0:
        raise NoInformationError("p1 == p2: outcomes carry no information")
    return (np.asarray(r, dtype=float) - model.p1) / model.dp


def smooth_readout(values, window: float = DEFAULT_WINDOW, dt: float = 0.05, times=None) -> np.ndarray:
    """Centered moving average over ``window`` (time units), truncated at the edges.

    Samples within ``window/2`` of each point contribute.  ``times`` defaults to
    a uniform grid of spacing ``dt``; pass it explicitly when series are missing.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return values.copy()
    if times is None:
        times = dt * np.arange(values.size)
    else:
        times = np.asarray(times, dtype=float)
    if window < dt * (1 - 1e-12):
        raise InvalidArgumentError("window must be at least one sampling interval")
    half = 0.5 * window * (1 + 1e-9)
    lo = np.searchsorted(times, times - half, side="left")
    hi = np.searchsorted(times, times + half, side="right")
    csum = np.concatenate([[0.0], np.cumsum(values)])
    return (csum[hi] - csum[lo]) / (hi - lo)


def _one_sided(n: int) -> np.ndarray:
    w = np.full(n // 2 + 1, 2.0)
    w[0] = 1.0
    if n % 2 == 0:
        w[-1] = 1.0
    return w


def power_spectrum(values, dt: float | None = None, times=None, rabi_frequency: float = OMEGA_R_NATURAL):
    """Periodogram of a uniformly sampled series.

    Returns ``(omega / Omega_R, power)``.  The power is one-sided and normalized
    so that it sums to the series variance.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size < 4:
        raise InvalidArgumentError("need a 1-D series of at least 4 samples")
    if times is not None:
        times = np.asarray(times, dtype=float)
        steps = np.diff(times)
        if not np.allclose(steps, steps[0], rtol=1e-9, atol=0):
            raise InvalidArgumentError("power_spectrum requires uniform sampling")
        dt = float(steps[0])
    if dt is None or not dt > 0:
        raise InvalidArgumentError("sampling interval must be positive")
    n = values.size
    x = values - values.mean()
    power = np.abs(np.fft.rfft(x)) ** 2 / n**2 * _one_sided(n)
    omega = 2.0 * math.pi * np.fft.rfftfreq(n, dt)
    return omega / rabi_frequency, power


def dominant_frequency(frequencies, power) -> float:
    """Frequency of the strongest nonzero-frequency bin; ties go to the lower one."""
    frequencies = np.asarray(frequencies)
    power = np.asarray(power)
    if power.size == 0:
        raise NoPeakError("empty spectrum")
    nonzero = frequencies > 0
    if not np.any(nonzero) or not np.any(power[nonzero] > 0):
        raise NoPeakError("no power at nonzero frequency")
    freqs, p = frequencies[nonzero], power[nonzero]
    # argmax returns the first maximum, i.e. the lowest frequency
    return float(freqs[np.argmax(p)])


def correlation(a, b) -> float:
    """Pearson correlation coefficient."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1 or a.size < 2:
        raise InvalidArgumentError("need two 1-D series of equal length >= 2")
    da = a - a.mean()
    db = b - b.mean()
    sa = math.sqrt(float(da @ da))
    sb = math.sqrt(float(db @ db))
    if sa == 0 or sb == 0:
        raise UndefinedCorrelationError("correlation of a constant series")
    return float(np.clip((da @ db) / (sa * sb), -1.0, 1.0))


def build_readout(record, statistics, N: int, window: float = DEFAULT_WINDOW) -> ReadoutSeries:
    """Readout of a single trajectory record.

    ``statistics`` supplies the ``p1``/``dp`` used by the estimator.
    """
    r, counts = series_relative_frequency(record.outcome_e, record.recorded, N)
    k = r.size
    interval = N * record.tau
    t0 = record.t[: k * N : N]
    block = record.c2sq[: k * N].reshape(k, N).mean(axis=1)
    keep = counts > 0
    G2 = best_guess(r[keep], statistics)
    smoothed = smooth_readout(G2, window, interval, times=t0[keep])
    return ReadoutSeries(t0[keep], r[keep], G2, smoothed, counts[keep], block[keep], N, interval)


def readout_correlation(readout: ReadoutSeries) -> float:
    """Smoothed G2 against ``|c2|^2`` averaged over each N-series."""
    return correlation(readout.G2_smoothed, readout.c2sq_block)


def fidelity_correlation(record, horizon: float | None = 2.0) -> float:
    """Correlation of the disturbed ``|c2|^2`` with the undisturbed curve.

    Only the first ``horizon`` time units are used (the cavity lifetime allows
    about two Rabi periods); ``None`` uses the whole record.
    """
    n = record.steps if horizon is None else min(record.steps, int(round(horizon / record.tau)))
    return correlation(record.c2sq[:n], record.c2sq_undisturbed[:n])


def maxima_windows(c2sq, threshold: float = 0.8, merge_gap: int = 0):
    """``(start, stop)`` step-index pairs of the intervals where ``c2sq > threshold``.

    Intervals separated by at most ``merge_gap`` steps are fused into one.
    """
    above = np.asarray(c2sq) > threshold
    edges = np.diff(np.concatenate([[0], above.astype(np.int8), [0]]))
    starts = list(np.flatnonzero(edges == 1))
    stops = list(np.flatnonzero(edges == -1))
    windows = []
    for a, b in zip(starts, stops):
        if windows and a - windows[-1][1] <= merge_gap:
            windows[-1] = (windows[-1][0], b)
        else:
            windows.append((a, b))
    return windows


def flagged_maxima_fraction(record, readout: ReadoutSeries, population_threshold: float = 0.8,
                            readout_threshold: float = 0.5):
    """Fraction of Rabi maxima during which some G2 value exceeds ``readout_threshold``.

    A maximum is an interval with ``|c2|^2 > population_threshold`` (gaps shorter
    than one N-series merged); it is indicated when any N-series overlapping it
    has ``G2 > readout_threshold``.  Returns ``(fraction, maxima_count)``.
    """
    windows = maxima_windows(record.c2sq, population_threshold, merge_gap=readout.N)
    if not windows:
        return math.nan, 0
    series_start = np.rint(readout.t0 / record.tau).astype(int) - 1
    series_stop = series_start + readout.N
    hit = readout.G2 > readout_threshold
    flagged = 0
    for a, b in windows:
        overlap = (series_start < b) & (series_stop > a)
        flagged += bool(np.any(hit & overlap))
    return flagged / len(windows), len(windows)
