"""Fast self-checks behind ``rabiwatch verify``."""

from __future__ import annotations

import math

import numpy as np

from . import oracle
from .config import preset
from .measurement import (
    ApparatusParams,
    amplitude_arrays,
    average_fuzziness,
    decoherence_time,
    measurement_amplitudes,
)
from .state import NATURAL_G, TwoModeState, rabi_propagate


def povm_completeness(draws: int = 10_000, seed: int = 0):
    rng = np.random.default_rng(seed)
    v = rng.uniform(0.1, 50, draws)
    eps = rng.uniform(0, 4 * math.pi, draws)
    phi0 = rng.uniform(0, 2 * math.pi, draws)
    u1e, u2e, u1g, u2g = amplitude_arrays(v, eps, phi0)
    err = max(np.max(np.abs(np.abs(u1e) ** 2 + np.abs(u1g) ** 2 - 1)),
              np.max(np.abs(np.abs(u2e) ** 2 + np.abs(u2g) ** 2 - 1)))
    return err < 1e-12, f"max deviation {err:.2e}"


def rabi_law(points: int = 1000):
    t = np.linspace(0, 3, points)
    state = TwoModeState(1, 0)
    err = max(abs(rabi_propagate(state, NATURAL_G, ti).p2 - math.sin(NATURAL_G * ti) ** 2) for ti in t)
    return err < 1e-12, f"max deviation {err:.2e}"


def fuzziness_captions():
    f2 = average_fuzziness(preset("fig2").apparatus())
    f4 = average_fuzziness(preset("fig4").apparatus())
    return abs(f2 - 0.98) <= 0.02 and abs(f4 - 2.04) <= 0.03, f"fig2 {f2:.4f}, fig4 {f4:.4f}"


def estimator_relation(models: int = 20, N: int = 10, seed: int = 1):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(models):
        params = ApparatusParams(rng.uniform(0.1, 50), rng.uniform(0, 4 * math.pi), rng.uniform(0, 2 * math.pi))
        model = measurement_amplitudes(params)
        state = TwoModeState.from_population(rng.uniform(), rng.uniform(0, 2 * math.pi))
        exact = oracle.exact_series_expectation(state, model, N)
        worst = max(worst, abs(exact - (model.p1 + model.dp * state.p2)))
    return worst < 1e-12, f"max deviation {worst:.2e}"


def monte_carlo_bracket(trials: int = 100_000, seed: int = 2):
    model = measurement_amplitudes(preset("fig2").apparatus())
    state = TwoModeState.from_population(0.5)
    exact = oracle.exact_series_expectation(state, model, 10)
    mean, se = oracle.monte_carlo_expectation(state, model, 10, trials, seed)
    return abs(mean - exact) <= 3 * se, f"exact {exact:.6f}, MC {mean:.6f} +- {se:.1e}"


def decoherence_formula():
    params = preset("fig2").apparatus()
    model = measurement_amplitudes(params)
    formula = decoherence_time(model, params.tau)
    exact = oracle.nonselective_decay_factor(model, params.tau).T_D_exact
    rel = abs(exact - formula) / formula
    return rel < 0.05, f"exact {exact / params.tau:.1f} tau, formula {formula / params.tau:.1f} tau"


CHECKS = {
    "povm_completeness": povm_completeness,
    "rabi_law": rabi_law,
    "fuzziness_captions": fuzziness_captions,
    "estimator_relation": estimator_relation,
    "monte_carlo_bracket": monte_carlo_bracket,
    "decoherence_formula": decoherence_formula,
}


def run_checks():
    return [(name, *fn()) for name, fn in CHECKS.items()]
