"""Stroboscopic weak-measurement trajectories with Hamiltonian feedback.

One step of duration ``tau`` is: free Rabi evolution, a probe atom with a
jittered velocity, a sampled outcome, collapse of the photon state, detection
with efficiency ``eta`` and, if the outcome was recorded, a feedback atom
through cavity 2 that undoes the unitary part of the back-action.

Random numbers
--------------
Trajectory ``i`` of a run with master seed ``s`` draws from
``numpy.random.default_rng([s, i])``.  Its noise is drawn in whole blocks, one
value per step, in this order: probe velocity, outcome, detection, feedback
miss, feedback-atom velocity and (burst mode only) burst size.  Trajectories
share nothing, so an ensemble is simply the trajectories stacked along one
axis, and any subset of indices reproduces the same members.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateStateError, InvalidArgumentError
from .measurement import (
    ApparatusParams,
    MeasurementModel,
    amplitude_arrays,
    polar_decompose,
    relative_phase_arrays,
)
from .state import RabiParams, TwoModeState, normalize

FEEDBACK_MODES = ("ideal", "per_atom", "burst", "none")


@dataclass(frozen=True)
class FeedbackPolicy:
    """How the compensating phase is delivered through cavity 2.

    ``ideal`` sends one feedback atom after every recorded outcome, ``per_atom``
    does the same but loses each atom with ``miss_probability``, ``burst`` sends
    a Poisson number of weakly coupled atoms with mean ``n_mean``, and ``none``
    never compensates.
    """

    mode: str = "ideal"
    miss_probability: float = 0.0
    n_mean: float = 100.0
    feedback_velocity_jitter: float = 0.10

    def __post_init__(self):
        if self.mode not in FEEDBACK_MODES:
            raise InvalidArgumentError(f"unknown feedback mode {self.mode!r}")
        if not 0 <= self.miss_probability <= 1:
            raise InvalidArgumentError("miss_probability must lie in [0, 1]")
        if not self.n_mean > 0:
            raise InvalidArgumentError("n_mean must be positive")
        if not 0 <= self.feedback_velocity_jitter < 1:
            raise InvalidArgumentError("feedback_velocity_jitter must lie in [0, 1)")


@dataclass(frozen=True)
class DetectorModel:
    efficiency: float = 1.0

    def __post_init__(self):
        if not 0 <= self.efficiency <= 1:
            raise InvalidArgumentError("efficiency must lie in [0, 1]")


@dataclass(frozen=True)
class StepNoise:
    """Uniform variates (and burst sizes) consumed by one step, per trajectory."""

    velocity: np.ndarray
    outcome: np.ndarray
    detection: np.ndarray
    miss: np.ndarray
    feedback_velocity: np.ndarray
    burst: np.ndarray

    @classmethod
    def draw(cls, rng: np.random.Generator, size, policy: FeedbackPolicy) -> "StepNoise":
        velocity = rng.random(size)
        outcome = rng.random(size)
        detection = rng.random(size)
        miss = rng.random(size)
        feedback_velocity = rng.random(size)
        if policy.mode == "burst":
            burst = rng.poisson(policy.n_mean, size)
        else:
            burst = np.zeros(size, dtype=np.int64) if size is not None else np.int64(0)
        return cls(velocity, outcome, detection, miss, feedback_velocity, burst)


@dataclass(frozen=True)
class StepRecord:
    t: float
    c1sq: float
    c2sq: float
    outcome: str
    recorded: bool
    feedback_phase: float


@dataclass
class TrajectoryRecord:
    """Per-step time series of one trajectory (or a stack of them).

    Arrays are 1-D for a single trajectory and ``(members, steps)`` for an
    ensemble.  ``outcome_e`` is True where the probe atom was found in ``e``.
    """

    t: np.ndarray
    c1sq: np.ndarray
    c2sq: np.ndarray
    outcome_e: np.ndarray
    recorded: np.ndarray
    feedback_phase: np.ndarray
    c2sq_undisturbed: np.ndarray
    relative_phase: np.ndarray
    tau: float
    seed: int | None = None

    @property
    def steps(self) -> int:
        return self.t.shape[-1]

    def member(self, i: int) -> "TrajectoryRecord":
        if self.c2sq.ndim == 1:
            if i != 0:
                raise IndexError(i)
            return self
        return TrajectoryRecord(
            self.t, self.c1sq[i], self.c2sq[i], self.outcome_e[i], self.recorded[i],
            self.feedback_phase[i], self.c2sq_undisturbed, self.relative_phase[i], self.tau, self.seed,
        )

    def __len__(self):
        return 1 if self.c2sq.ndim == 1 else self.c2sq.shape[0]


def apply_outcome(state: TwoModeState, model: MeasurementModel, outcome: str) -> TwoModeState:
    """Collapse ``state`` onto the branch ``outcome`` and renormalize."""
    u1, u2 = model.amplitudes(outcome)
    try:
        return normalize(u1 * state.c1, u2 * state.c2)
    except DegenerateStateError:
        raise DegenerateStateError(f"outcome {outcome!r} has zero probability for this state") from None


def compensation_phase(model: MeasurementModel, outcome: str) -> float:
    """Feedback phase that cancels the unitary part of ``M_outcome``."""
    return polar_decompose(model, outcome).phase


def apply_feedback(state: TwoModeState, target: float, policy: FeedbackPolicy, rng: np.random.Generator):
    """Deliver the compensating phase ``target`` through cavity 2.

    Draws (miss, feedback velocity, burst) from ``rng`` in that order and
    returns ``(new_state, applied_phase)``.
    """
    miss_u, vel_u = rng.random(), rng.random()
    burst_n = rng.poisson(policy.n_mean) if policy.mode == "burst" else 0
    applied = float(_feedback_phase(np.asarray(target), policy, np.asarray(miss_u), np.asarray(vel_u),
                                    np.asarray(burst_n), np.asarray(True)))
    return TwoModeState(state.c1, state.c2 * np.exp(-1j * applied)), applied


def _feedback_phase(target, policy: FeedbackPolicy, miss_u, vel_u, burst_n, recorded):
    """Phase actually imprinted by the feedback atom(s); vectorized."""
    if policy.mode == "none":
        return np.zeros(np.shape(target))
    if policy.mode == "burst":
        applied = burst_n * (target / policy.n_mean)
    else:
        speed = 1.0 + policy.feedback_velocity_jitter * (2.0 * vel_u - 1.0)
        # the imprinted phase scales as 1/v_f
        applied = target / speed
        if policy.mode == "per_atom":
            applied = np.where(miss_u < policy.miss_probability, 0.0, applied)
    return np.where(recorded, applied, 0.0)


def _advance(c1, c2, cosg, sing, params: ApparatusParams, policy: FeedbackPolicy,
             detector: DetectorModel, noise: StepNoise):
    """Vectorized single step.  Returns ``(c1, c2, outcome_e, recorded, applied)``."""
    c1, c2 = cosg * c1 - 1j * sing * c2, -1j * sing * c1 + cosg * c2
    v = params.v_ratio * (1.0 + params.velocity_jitter * (2.0 * noise.velocity - 1.0))
    u1e, u2e, u1g, u2g = amplitude_arrays(v, params.epsilon, params.phi0)
    prob_e = np.abs(u1e) ** 2 * np.abs(c1) ** 2 + np.abs(u2e) ** 2 * np.abs(c2) ** 2
    outcome_e = noise.outcome < prob_e
    u1 = np.where(outcome_e, u1e, u1g)
    u2 = np.where(outcome_e, u2e, u2g)
    c1 = u1 * c1
    c2 = u2 * c2
    norm = np.sqrt(np.abs(c1) ** 2 + np.abs(c2) ** 2)
    if np.any(norm == 0):
        raise DegenerateStateError("sampled a zero-probability outcome")
    c1 = c1 / norm
    c2 = c2 / norm
    recorded = noise.detection < detector.efficiency
    target, _ = relative_phase_arrays(u1, u2)
    applied = _feedback_phase(target, policy, noise.miss, noise.feedback_velocity, noise.burst, recorded)
    c2 = c2 * np.exp(-1j * applied)
    return c1, c2, outcome_e, recorded, applied


def undisturbed_population(initial: TwoModeState, g: float, t) -> np.ndarray:
    """``|c2~(t)|^2`` from an arbitrary initial state, in closed form."""
    t = np.asarray(t, dtype=float)
    c, s = np.cos(g * t), np.sin(g * t)
    return np.abs(-1j * s * initial.c1 + c * initial.c2) ** 2


def step(state: TwoModeState, rabi: RabiParams, params: ApparatusParams, policy: FeedbackPolicy,
         detector: DetectorModel, rng: np.random.Generator, t: float = 0.0):
    """Advance one interval ``tau``; ``t`` is the time of the previous step."""
    noise = StepNoise.draw(rng, None, policy)
    gt = rabi.g * params.tau
    c1, c2, e, rec, applied = _advance(
        np.complex128(state.c1), np.complex128(state.c2), math.cos(gt), math.sin(gt), params, policy, detector, noise
    )
    new = normalize(complex(c1), complex(c2))
    record = StepRecord(t + params.tau, new.p1, new.p2, "e" if e else "g", bool(rec), float(applied))
    return new, record


def trajectory_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


def draw_noise(seed: int, indices, steps: int, policy: FeedbackPolicy) -> StepNoise:
    """Noise blocks for the given trajectory indices, shaped ``(steps, members)``."""
    blocks = [StepNoise.draw(trajectory_rng(seed, i), steps, policy) for i in indices]
    return StepNoise(*(np.stack([getattr(b, f) for b in blocks], axis=1) for f in StepNoise.__dataclass_fields__))


def simulate(initial: TwoModeState, rabi: RabiParams, params: ApparatusParams, policy: FeedbackPolicy,
             detector: DetectorModel, total_steps: int, noise: StepNoise, seed: int | None = None) -> TrajectoryRecord:
    """Run all members of ``noise`` (shape ``(steps, members)``) side by side."""
    if total_steps < 1:
        raise InvalidArgumentError("total_steps must be >= 1")
    members = noise.velocity.shape[1]
    c1 = np.full(members, initial.c1, dtype=complex)
    c2 = np.full(members, initial.c2, dtype=complex)
    gt = rabi.g * params.tau
    cosg, sing = math.cos(gt), math.sin(gt)
    shape = (total_steps, members)
    c1sq = np.empty(shape)
    c2sq = np.empty(shape)
    phase = np.empty(shape)
    outcome_e = np.empty(shape, dtype=bool)
    recorded = np.empty(shape, dtype=bool)
    applied = np.empty(shape)
    for n in range(total_steps):
        row = StepNoise(*(getattr(noise, f)[n] for f in StepNoise.__dataclass_fields__))
        c1, c2, outcome_e[n], recorded[n], applied[n] = _advance(c1, c2, cosg, sing, params, policy, detector, row)
        c1sq[n] = np.abs(c1) ** 2
        c2sq[n] = np.abs(c2) ** 2
        phase[n] = np.angle(c2 * np.conj(c1))
    t = params.tau * np.arange(1, total_steps + 1)
    return TrajectoryRecord(
        t=t,
        c1sq=c1sq.T,
        c2sq=c2sq.T,
        outcome_e=outcome_e.T,
        recorded=recorded.T,
        feedback_phase=applied.T,
        c2sq_undisturbed=undisturbed_population(initial, rabi.g, t),
        relative_phase=phase.T,
        tau=params.tau,
        seed=seed,
    )


def run_ensemble(initial: TwoModeState, rabi: RabiParams, params: ApparatusParams, policy: FeedbackPolicy,
                 detector: DetectorModel, total_steps: int, seed: int, members=None) -> TrajectoryRecord:
    """Trajectories ``members`` (an int count or a sequence of indices) of master seed ``seed``."""
    indices = range(members) if isinstance(members, int) else list(members)
    noise = draw_noise(seed, indices, total_steps, policy)
    return simulate(initial, rabi, params, policy, detector, total_steps, noise, seed)


def run_trajectory(initial: TwoModeState, rabi: RabiParams, params: ApparatusParams, policy: FeedbackPolicy,
                   detector: DetectorModel, total_steps: int, seed: int, index: int = 0) -> TrajectoryRecord:
    """Single trajectory ``index`` of master seed ``seed``."""
    return run_ensemble(initial, rabi, params, policy, detector, total_steps, seed, [index]).member(0)
