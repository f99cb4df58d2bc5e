"""Experiment configuration, presets and the measurement budget."""

from __future__ import annotations

import dataclasses
import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

from .errors import InvalidArgumentError
from .measurement import ApparatusParams
from .state import TwoModeState
from .trajectory import DetectorModel, FeedbackPolicy

#: Missing-feedback fraction from which the dynamics is visibly disturbed.
MISS_PROBABILITY_LIMIT = 0.07
#: Detector efficiency above which feedback beats the Poissonian scheme.
EFFICIENCY_LIMIT = 0.96


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one run; times in units of ``T_R``."""

    name: str = "custom"
    v_ratio: float = 1.25
    epsilon: float = 0.068 * math.pi
    phi0: float = math.pi
    tau: float = 0.002
    N: int = 25
    velocity_jitter: float = 0.10
    cycles: float = 12.0
    initial_c2sq: float = 0.0
    initial_phase: float = 0.0
    feedback: str = "ideal"
    miss_prob: float = 0.0
    burst_n: float = 100.0
    feedback_jitter: float = 0.10
    efficiency: float = 1.0
    window: float = 0.25
    ensemble: int = 50
    seed: int = 0
    out: str = "out"
    fidelity_horizon: float = 2.0

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        self.apparatus()
        self.policy()
        self.detector()
        self.initial_state()
        if self.cycles <= 0:
            raise InvalidArgumentError("cycles must be positive")
        if self.ensemble < 1:
            raise InvalidArgumentError("ensemble must be >= 1")
        if self.window <= 0:
            raise InvalidArgumentError("window must be positive")
        if self.N * self.tau > 0.25:
            warnings.warn(
                f"N*tau = {self.N * self.tau:g} T_R is not much smaller than the Rabi period",
                stacklevel=2,
            )

    def apparatus(self) -> ApparatusParams:
        return ApparatusParams(self.v_ratio, self.epsilon, self.phi0, self.tau, self.N, self.velocity_jitter)

    def policy(self) -> FeedbackPolicy:
        return FeedbackPolicy(self.feedback, self.miss_prob, self.burst_n, self.feedback_jitter)

    def detector(self) -> DetectorModel:
        return DetectorModel(self.efficiency)

    def initial_state(self) -> TwoModeState:
        return TwoModeState.from_population(self.initial_c2sq, self.initial_phase)

    @property
    def total_steps(self) -> int:
        return max(1, int(round(self.cycles / self.tau)))

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidArgumentError(f"unknown configuration keys: {sorted(unknown)}")
        return cls(**data)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def save(self, path) -> None:
        """Write the configuration without its output location, so copies stay location-independent."""
        data = self.to_dict()
        del data["out"]
        Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


PRESETS = {
    "fig2": dict(
        name="fig2", v_ratio=1.25, epsilon=0.068 * math.pi, phi0=math.pi, tau=0.002, N=25,
        velocity_jitter=0.10, feedback="ideal", efficiency=1.0, cycles=12.0,
    ),
    # epsilon = pi * mean(v)/v0 puts the mean atom exactly on the Poissonian point
    "fig4": dict(
        name="fig4", v_ratio=20.0, epsilon=20.0 * math.pi, phi0=0.0, tau=0.002, N=25,
        velocity_jitter=0.10, feedback="none", efficiency=0.6, cycles=12.0,
    ),
}


def preset(name: str) -> ExperimentConfig:
    try:
        return ExperimentConfig(**PRESETS[name])
    except KeyError:
        raise InvalidArgumentError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


@dataclass(frozen=True)
class Budget:
    measurements: int
    cycles: float | None


def budget(cavity_lifetime: float, tau: float, rabi_period: float | None = None) -> Budget:
    """Measurements that fit in the cavity lifetime and the Rabi cycles they cover."""
    if cavity_lifetime <= 0 or tau <= 0:
        raise InvalidArgumentError("lifetime and tau must be positive")
    # guard against 0.1/1e-4 = 999.9999...
    count = int(math.floor(cavity_lifetime / tau * (1 + 1e-12)))
    cycles = None if rabi_period is None else count * tau / rabi_period
    return Budget(count, cycles)
