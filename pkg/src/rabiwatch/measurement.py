"""Weak measurement of the photon by a Ramsey-interferometer probe atom.

A probe atom crossing cavity 1 leaves the photon in one of two (unnormalized)
branches depending on the detected atomic level ``l in {e, g}``::

    |psi_l> = u_1^l c1 |1,0> + u_2^l c2 |0,1>

The amplitudes depend on the Ramsey velocity ratio ``rho = v0/v``, the Ramsey
phase ``phi0`` and the per-photon dispersive phase ``epsilon`` (defined with
``v0``).  Everything here is a pure function of those composites.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError
from .state import TwoModeState

#: Fuzziness range in which the readout visualizes the dynamics well.
FUZZINESS_BAND = (0.75, 1.5)

#: Moduli below this are treated as exact zeros when assigning phases.
DEGENERATE_MODULUS = 1e-12

OUTCOMES = ("e", "g")


@dataclass(frozen=True)
class ApparatusParams:
    """Composite parameters of one probe measurement.

    Attributes
    ----------
    v_ratio : float
        Mean probe velocity over the Ramsey reference velocity, ``v/v0``.
    epsilon : float
        Per-photon dispersive phase in radians (defined at ``v0``).
    phi0 : float
        Ramsey phase in radians.
    tau : float
        Interval between measurements, in units of ``T_R``.
    N : int
        Length of one N-series.
    velocity_jitter : float
        Fractional half-width of the uniform probe velocity distribution.
    """

    v_ratio: float
    epsilon: float
    phi0: float
    tau: float = 0.002
    N: int = 25
    velocity_jitter: float = 0.10

    def __post_init__(self):
        for name in ("v_ratio", "epsilon", "phi0", "tau", "velocity_jitter"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidArgumentError(f"{name} must be finite")
        if self.v_ratio <= 0:
            raise InvalidArgumentError("v_ratio must be positive")
        if self.tau <= 0:
            raise InvalidArgumentError("tau must be positive")
        if int(self.N) != self.N or self.N < 1:
            raise InvalidArgumentError("N must be a positive integer")
        if not 0 <= self.velocity_jitter < 1:
            raise InvalidArgumentError("velocity_jitter must lie in [0, 1)")

    def velocity_grid(self, samples: int) -> np.ndarray:
        """Midpoint grid of probe velocity ratios across the jitter interval."""
        if samples < 1:
            raise InvalidArgumentError("samples must be >= 1")
        x = (np.arange(samples) + 0.5) / samples
        return self.v_ratio * (1.0 + self.velocity_jitter * (2.0 * x - 1.0))


def amplitude_arrays(v_ratio, epsilon: float, phi0: float):
    """Vectorized measurement amplitudes ``(u1e, u2e, u1g, u2g)``.

    ``v_ratio`` may be an array of per-atom velocity ratios.
    """
    rho = 1.0 / np.asarray(v_ratio, dtype=float)
    a1 = np.exp(1j * (phi0 - epsilon) * rho)
    a2 = np.exp(1j * phi0 * rho)
    s = 0.5 * np.sin(0.5 * np.pi * rho)
    cq = np.cos(0.25 * np.pi * rho) ** 2
    sq = np.sin(0.25 * np.pi * rho) ** 2
    return s * (a1 + 1.0), s * (a2 + 1.0), cq - sq * a1, cq - sq * a2


def relative_phase_arrays(u1, u2):
    """``chi_2 - chi_1`` wrapped to (-pi, pi], zero where either modulus vanishes."""
    u1 = np.asarray(u1)
    u2 = np.asarray(u2)
    degenerate = (np.abs(u1) < DEGENERATE_MODULUS) | (np.abs(u2) < DEGENERATE_MODULUS)
    phase = np.angle(u2 * np.conj(u1))
    return np.where(degenerate, 0.0, phase), degenerate


@dataclass(frozen=True)
class MeasurementModel:
    """Amplitudes of one probe measurement and the statistics derived from them."""

    u1e: complex
    u2e: complex
    u1g: complex
    u2g: complex
    p1: float = field(init=False)
    p2: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "p1", abs(self.u1e) ** 2)
        object.__setattr__(self, "p2", abs(self.u2e) ** 2)

    @property
    def dp(self) -> float:
        return self.p2 - self.p1

    @property
    def p0(self) -> float:
        return 0.5 * (self.p1 + self.p2)

    def amplitudes(self, outcome: str) -> tuple[complex, complex]:
        if outcome == "e":
            return self.u1e, self.u2e
        if outcome == "g":
            return self.u1g, self.u2g
        raise InvalidArgumentError(f"outcome must be 'e' or 'g', got {outcome!r}")

    def moduli(self, outcome: str) -> tuple[float, float]:
        u1, u2 = self.amplitudes(outcome)
        return abs(u1), abs(u2)

    def phases(self, outcome: str) -> tuple[float, float]:
        """``(chi_1, chi_2)`` with ``arg(0)`` defined as 0."""
        return tuple(0.0 if abs(u) < DEGENERATE_MODULUS else float(np.angle(u)) for u in self.amplitudes(outcome))

    def effect(self, outcome: str) -> np.ndarray:
        """Diagonal effect ``E_l = |M_l|^2`` as a 2x2 matrix."""
        m1, m2 = self.moduli(outcome)
        return np.diag([m1**2, m2**2])

    def operation(self, outcome: str) -> np.ndarray:
        return np.diag(self.amplitudes(outcome))

    @classmethod
    def projective(cls) -> "MeasurementModel":
        """Sharp limit: outcome ``e`` projects on ``|1,0>``, ``g`` on ``|0,1>``."""
        return cls(1.0 + 0j, 0j, 0j, 1.0 + 0j)

    @classmethod
    def unsharp(cls) -> "MeasurementModel":
        """Totally unsharp limit: ``e`` always occurs and changes nothing."""
        return cls(1.0 + 0j, 1.0 + 0j, 0j, 0j)


@dataclass(frozen=True)
class PolarDecomposition:
    """``M_l = U_l |M_l|`` with ``U_l = diag(1, exp(i*phase))``."""

    phase: float
    moduli: tuple[float, float]
    degenerate: bool = False

    def unitary(self) -> np.ndarray:
        return np.diag([1.0, np.exp(1j * self.phase)])

    def positive_part(self) -> np.ndarray:
        return np.diag(self.moduli).astype(complex)


def measurement_amplitudes(params: ApparatusParams, v_actual_ratio: float | None = None) -> MeasurementModel:
    """Build the measurement model for one probe atom.

    ``v_actual_ratio`` is the atom's own ``v/v0``; by default the mean value
    ``params.v_ratio`` is used.
    """
    v = params.v_ratio if v_actual_ratio is None else v_actual_ratio
    if not math.isfinite(v) or v <= 0:
        raise InvalidArgumentError(f"velocity ratio must be positive, got {v}")
    u1e, u2e, u1g, u2g = (complex(u) for u in amplitude_arrays(v, params.epsilon, params.phi0))
    return MeasurementModel(u1e, u2e, u1g, u2g)


def polar_decompose(model: MeasurementModel, outcome: str) -> PolarDecomposition:
    u1, u2 = model.amplitudes(outcome)
    phase, degenerate = relative_phase_arrays(u1, u2)
    return PolarDecomposition(float(phase), (abs(u1), abs(u2)), bool(degenerate))


def outcome_probabilities(model: MeasurementModel, state: TwoModeState) -> tuple[float, float]:
    prob_e = model.p1 * state.p1 + model.p2 * state.p2
    prob_e = min(max(prob_e, 0.0), 1.0)
    return prob_e, 1.0 - prob_e


def _decoherence(p1, p2, tau):
    p0 = 0.5 * (p1 + p2)
    dp = p2 - p1
    with np.errstate(divide="ignore"):
        return np.where(dp == 0, np.inf, 8.0 * p0 * (1.0 - p0) * tau / np.where(dp == 0, 1.0, dp) ** 2)


def decoherence_time(model: MeasurementModel, tau: float) -> float:
    """Time over which the density-matrix off-diagonal decays to 1/e.

    Returns ``math.inf`` when the measurement carries no information.
    """
    return float(_decoherence(model.p1, model.p2, tau))


def fuzziness(model: MeasurementModel, tau: float, T_R: float = 1.0) -> float:
    return 0.5 * math.pi * decoherence_time(model, tau) / T_R


def in_fuzziness_band(f: float) -> bool:
    lo, hi = FUZZINESS_BAND
    return lo <= f <= hi


def average_fuzziness(params: ApparatusParams, T_R: float = 1.0, samples: int = 1000) -> float:
    """Fuzziness of a sequence whose probe velocities spread over the jitter interval.

    Successive measurements shrink the off-diagonal multiplicatively, so the
    decoherence *rates* ``1/T_D`` of the individual atoms add.  The average is
    therefore taken over rates on a deterministic midpoint velocity grid and
    converted back to a fuzziness.
    """
    if samples < 1:
        raise InvalidArgumentError("samples must be >= 1")
    if params.velocity_jitter == 0:
        return fuzziness(measurement_amplitudes(params), params.tau, T_R)
    u1e, u2e, _, _ = amplitude_arrays(params.velocity_grid(samples), params.epsilon, params.phi0)
    t_d = _decoherence(np.abs(u1e) ** 2, np.abs(u2e) ** 2, params.tau)
    rate = np.mean(1.0 / t_d)
    if rate == 0:
        return math.inf
    return 0.5 * math.pi / (rate * T_R)


def arithmetic_average_fuzziness(params: ApparatusParams, T_R: float = 1.0, samples: int = 1000) -> float:
    """Plain mean of the per-velocity fuzziness (diagnostic companion)."""
    u1e, u2e, _, _ = amplitude_arrays(params.velocity_grid(samples), params.epsilon, params.phi0)
    t_d = _decoherence(np.abs(u1e) ** 2, np.abs(u2e) ** 2, params.tau)
    return float(0.5 * math.pi * np.mean(t_d) / T_R)


@dataclass(frozen=True)
class OutcomeStatistics:
    """Click probabilities ``p1``, ``p2`` without the amplitudes behind them."""

    p1: float
    p2: float

    @property
    def dp(self) -> float:
        return self.p2 - self.p1

    @property
    def p0(self) -> float:
        return 0.5 * (self.p1 + self.p2)


def averaged_statistics(params: ApparatusParams, samples: int = 1000) -> OutcomeStatistics:
    """Velocity-averaged ``p1``, ``p2``; the affine estimator uses these under jitter."""
    if params.velocity_jitter == 0:
        model = measurement_amplitudes(params)
        return OutcomeStatistics(model.p1, model.p2)
    u1e, u2e, _, _ = amplitude_arrays(params.velocity_grid(samples), params.epsilon, params.phi0)
    return OutcomeStatistics(float(np.mean(np.abs(u1e) ** 2)), float(np.mean(np.abs(u2e) ** 2)))
