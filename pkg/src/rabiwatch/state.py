"""Single photon shared by two coupled cavities, treated as a two-level system.

Basis ordering is ``(|1,0>, |0,1>)``.  Internally time is measured in units
of the Rabi period ``T_R = pi / g`` so the default coupling is ``g = pi``.
Global phases are never tracked; only populations and the relative phase of
``c2`` with respect to ``c1`` carry meaning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateStateError, InvalidArgumentError

NATURAL_G = math.pi


def _check_finite(*values) -> None:
    for v in values:
        if not np.all(np.isfinite(v)):
            raise InvalidArgumentError(f"non-finite input: {v!r}")


@dataclass(frozen=True)
class TwoModeState:
    """Normalized amplitude pair ``(c1, c2)``."""

    c1: complex
    c2: complex

    @property
    def p1(self) -> float:
        return abs(self.c1) ** 2

    @property
    def p2(self) -> float:
        return abs(self.c2) ** 2

    @property
    def relative_phase(self) -> float:
        """arg(c2) - arg(c1), wrapped to (-pi, pi]; 0 when either mode is empty."""
        return float(np.angle(self.c2 * np.conj(self.c1)))

    @classmethod
    def from_population(cls, c2sq: float, phase: float = 0.0) -> "TwoModeState":
        if not 0.0 <= c2sq <= 1.0:
            raise InvalidArgumentError(f"population must lie in [0, 1], got {c2sq}")
        return cls(complex(math.sqrt(1.0 - c2sq)), math.sqrt(c2sq) * complex(math.cos(phase), math.sin(phase)))

    def as_array(self) -> np.ndarray:
        return np.array([self.c1, self.c2], dtype=complex)


@dataclass(frozen=True)
class RabiParams:
    """Cavity-cavity coupling ``g``; ``T_R = pi/g`` and ``Omega_R = 2g``."""

    g: float = NATURAL_G

    def __post_init__(self):
        _check_finite(self.g)
        if self.g <= 0:
            raise InvalidArgumentError(f"coupling must be positive, got {self.g}")

    @property
    def period(self) -> float:
        return math.pi / self.g

    @property
    def frequency(self) -> float:
        return 2.0 * self.g


def normalize(c1: complex, c2: complex) -> TwoModeState:
    """Divide a raw amplitude pair by its Euclidean norm."""
    _check_finite(c1, c2)
    norm = math.hypot(abs(c1), abs(c2))
    if norm == 0.0:
        raise DegenerateStateError("zero-norm amplitude pair")
    return TwoModeState(complex(c1) / norm, complex(c2) / norm)


def rabi_propagate(state: TwoModeState, g: float, dt: float) -> TwoModeState:
    """Exact evolution under ``H = g (a1 a2^dag + a1^dag a2)`` for a duration ``dt``."""
    _check_finite(state.c1, state.c2, g, dt)
    if dt < 0:
        raise InvalidArgumentError(f"duration must be non-negative, got {dt}")
    c, s = math.cos(g * dt), math.sin(g * dt)
    return TwoModeState(c * state.c1 - 1j * s * state.c2, -1j * s * state.c1 + c * state.c2)


def analytic_population(g, t):
    """Undisturbed ``|c2(t)|^2 = sin^2(g t)`` for a photon starting in cavity 1.

    Accepts scalars or arrays.
    """
    _check_finite(g, t)
    return np.sin(np.multiply(g, t)) ** 2
