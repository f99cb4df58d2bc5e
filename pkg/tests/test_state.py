import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rabiwatch.errors import DegenerateStateError, InvalidArgumentError
from rabiwatch.state import (
    NATURAL_G,
    RabiParams,
    TwoModeState,
    analytic_population,
    normalize,
    rabi_propagate,
)

from strategies import states

durations = st.floats(0, 20)


def test_quarter_period_transfers_photon():
    s = rabi_propagate(TwoModeState(1, 0), 1.0, math.pi / 2)
    assert abs(s.c1) < 1e-15
    assert s.c2 == pytest.approx(-1j, abs=1e-15)
    assert s.p2 == pytest.approx(1.0, abs=1e-15)


def test_zero_duration_is_identity():
    s = TwoModeState.from_population(0.3, 1.1)
    assert rabi_propagate(s, NATURAL_G, 0.0) == s


def test_eighth_period_splits_photon():
    s = rabi_propagate(TwoModeState(1, 0), 2.0, math.pi / 8)
    assert s.c1 == pytest.approx(math.sqrt(0.5), abs=1e-15)
    assert s.c2 == pytest.approx(-1j * math.sqrt(0.5), abs=1e-15)
    assert s.p2 == pytest.approx(0.5, abs=1e-15)


def test_rejects_bad_input():
    with pytest.raises(InvalidArgumentError):
        rabi_propagate(TwoModeState(1, 0), NATURAL_G, -1.0)
    with pytest.raises(InvalidArgumentError):
        rabi_propagate(TwoModeState(1, 0), math.nan, 1.0)
    with pytest.raises(InvalidArgumentError):
        RabiParams(0.0)


def test_rabi_params_period():
    r = RabiParams(2.5)
    assert r.period * r.frequency == pytest.approx(2 * math.pi, abs=1e-15)
    assert RabiParams().period == pytest.approx(1.0)


def test_analytic_population_examples():
    assert analytic_population(NATURAL_G, 0.0) == 0.0
    assert analytic_population(1.0, math.pi / 2) == pytest.approx(1.0)
    assert analytic_population(1.0, math.pi / 4) == pytest.approx(0.5)


def test_normalize_examples():
    assert normalize(2, 0) == TwoModeState(1, 0)
    s = normalize(1, 1)
    assert s.c1 == pytest.approx(math.sqrt(0.5)) and s.c2 == pytest.approx(math.sqrt(0.5))
    for theta in (0.0, 1.0, 2.5):
        s = normalize(0.70711, 0.70493 * np.exp(1j * theta))
        norm = math.hypot(0.70711, 0.70493)
        assert norm == pytest.approx(0.998462, abs=3e-6)
        assert abs(s.c1) == pytest.approx(0.70711 / norm, abs=1e-15)
        assert abs(s.c2) == pytest.approx(0.70493 / norm, abs=1e-15)
    with pytest.raises(DegenerateStateError):
        normalize(0, 0)


@settings(max_examples=300)
@given(states(), st.floats(0.1, 10), durations)
def test_norm_preserved(s, g, t):
    out = rabi_propagate(s, g, t)
    assert abs(out.p1 + out.p2 - 1) < 1e-12


@settings(max_examples=300)
@given(states(), durations, durations)
def test_composition(s, t1, t2):
    a = rabi_propagate(rabi_propagate(s, NATURAL_G, t1), NATURAL_G, t2)
    b = rabi_propagate(s, NATURAL_G, t1 + t2)
    assert abs(a.c1 - b.c1) < 1e-12 and abs(a.c2 - b.c2) < 1e-12


@given(states(), st.floats(0.1, 10))
def test_populations_return_after_one_period(s, g):
    out = rabi_propagate(s, g, math.pi / g)
    assert abs(out.p2 - s.p2) < 1e-12


def test_norm_preserved_bulk():
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(10_000):
        s = TwoModeState.from_population(rng.uniform(), rng.uniform(0, 2 * math.pi))
        out = rabi_propagate(s, NATURAL_G, rng.uniform(0, 50))
        worst = max(worst, abs(out.p1 + out.p2 - 1))
    assert worst < 1e-12


def test_matches_analytic_curve():
    t = np.linspace(0, 2, 1000)
    got = np.array([rabi_propagate(TwoModeState(1, 0), NATURAL_G, ti).p2 for ti in t])
    assert np.max(np.abs(got - analytic_population(NATURAL_G, t))) < 1e-12
