"""Independent reference computations for the estimator and decoherence law.

Everything here freezes the cavity-cavity coupling (``g = 0``) or works with
the non-selective density matrix, so results are exact or purely statistical
and never go through the trajectory engine's sampling path.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import EnumerationBoundError, InvalidArgumentError
from .measurement import ApparatusParams, MeasurementModel, amplitude_arrays
from .state import TwoModeState

MAX_ENUMERATION = 20


@dataclass(frozen=True)
class OutcomeSequenceWeight:
    outcomes: tuple[str, ...]
    weight: float

    @property
    def e_count(self) -> int:
        return self.outcomes.count("e")


def _check_length(N: int) -> None:
    if N < 1:
        raise InvalidArgumentError("N must be >= 1")
    if N > MAX_ENUMERATION:
        raise EnumerationBoundError(f"exact enumeration limited to N <= {MAX_ENUMERATION}, got {N}")


def _branch_weights(initial: TwoModeState, model: MeasurementModel, N: int):
    """Exact probabilities and e-counts of all 2^N sequences, e-first lexicographic order."""
    m = np.array([[abs(model.u1e), abs(model.u2e)], [abs(model.u1g), abs(model.u2g)]])
    # feedback-free collapse only rescales moduli, so populations suffice
    pops = np.array([[initial.p1, initial.p2]])
    weight = np.ones(1)
    e_count = np.zeros(1, dtype=int)
    for _ in range(N):
        new_pops, new_w, new_e = [], [], []
        for l in range(2):
            unnorm = pops * m[l] ** 2
            prob = unnorm.sum(axis=1)
            safe = np.where(prob > 0, prob, 1.0)
            new_pops.append(unnorm / safe[:, None])
            new_w.append(weight * prob)
            new_e.append(e_count + (l == 0))
        pops = np.stack(new_pops, axis=1).reshape(-1, 2)
        weight = np.stack(new_w, axis=1).reshape(-1)
        e_count = np.stack(new_e, axis=1).reshape(-1)
    return weight, e_count


def enumerate_sequences(initial: TwoModeState, model: MeasurementModel, N: int) -> list[OutcomeSequenceWeight]:
    """All outcome sequences of length ``N`` with their exact probabilities."""
    _check_length(N)
    weight, _ = _branch_weights(initial, model, N)
    return [OutcomeSequenceWeight(seq, float(w)) for seq, w in zip(itertools.product("eg", repeat=N), weight)]


def exact_series_expectation(initial: TwoModeState, model: MeasurementModel, N: int) -> float:
    """``E(r)`` for one N-series with frozen dynamics and no feedback, by enumeration."""
    _check_length(N)
    weight, e_count = _branch_weights(initial, model, N)
    return float(np.sum(weight * e_count) / N)


def monte_carlo_expectation(initial: TwoModeState, model: MeasurementModel, N: int, trials: int, seed: int):
    """Seeded Monte Carlo estimate of ``E(r)``; returns ``(mean, standard_error)``."""
    if trials < 100:
        raise InvalidArgumentError("trials must be >= 100")
    rng = np.random.default_rng(seed)
    p1 = np.full(trials, initial.p1)
    p2 = np.full(trials, initial.p2)
    e_count = np.zeros(trials)
    pe1, pe2 = abs(model.u1e) ** 2, abs(model.u2e) ** 2
    pg1, pg2 = abs(model.u1g) ** 2, abs(model.u2g) ** 2
    for _ in range(N):
        prob_e = pe1 * p1 + pe2 * p2
        e = rng.random(trials) < prob_e
        e_count += e
        w1 = np.where(e, pe1, pg1) * p1
        w2 = np.where(e, pe2, pg2) * p2
        total = w1 + w2
        p1, p2 = w1 / total, w2 / total
    r = e_count / N
    return float(r.mean()), float(r.std(ddof=1) / math.sqrt(trials))


@dataclass(frozen=True)
class DecayFactor:
    """Per-step shrink ``kappa`` of the off-diagonal and the implied decoherence time."""

    kappa: float
    T_D_exact: float


def nonselective_decay_factor(model: MeasurementModel, tau: float = 1.0) -> DecayFactor:
    """Off-diagonal shrink factor under one averaged measurement with ideal feedback."""
    kappa = abs(model.u1e) * abs(model.u2e) + abs(model.u1g) * abs(model.u2g)
    kappa = min(kappa, 1.0)
    if kappa >= 1.0:
        t_d = math.inf
    elif kappa <= 0.0:
        t_d = 0.0
    else:
        t_d = -tau / math.log(kappa)
    return DecayFactor(kappa, t_d)


def velocity_averaged_kappa(params: ApparatusParams, samples: int = 1000) -> float:
    grid = params.velocity_grid(samples) if params.velocity_jitter > 0 else np.array([params.v_ratio])
    u1e, u2e, u1g, u2g = amplitude_arrays(grid, params.epsilon, params.phi0)
    return float(np.mean(np.abs(u1e) * np.abs(u2e) + np.abs(u1g) * np.abs(u2g)))


def nonselective_population(initial: TwoModeState, g: float, params: ApparatusParams, steps: int,
                            samples: int = 1000) -> np.ndarray:
    """Ensemble ``|c2|^2`` after each step, from the density matrix.

    Models ideal feedback (the unitary back-action is cancelled exactly) with
    probe velocities averaged over the jitter interval.  This is the mean that
    trajectory ensembles converge to.
    """
    kappa = velocity_averaged_kappa(params, samples)
    c, s = math.cos(g * params.tau), math.sin(g * params.tau)
    u = np.array([[c, -1j * s], [-1j * s, c]])
    psi = initial.as_array()
    rho = np.outer(psi, psi.conj())
    out = np.empty(steps)
    for n in range(steps):
        rho = u @ rho @ u.conj().T
        rho[0, 1] *= kappa
        rho[1, 0] *= kappa
        out[n] = rho[1, 1].real
    return out
