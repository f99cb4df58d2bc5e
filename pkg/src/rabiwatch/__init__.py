"""Stroboscopic weak-measurement monitoring of a photon oscillating between two cavities."""

from .config import ExperimentConfig, budget, preset
from .measurement import ApparatusParams, MeasurementModel, average_fuzziness, measurement_amplitudes
from .state import RabiParams, TwoModeState, analytic_population, normalize, rabi_propagate
from .trajectory import DetectorModel, FeedbackPolicy, run_ensemble, run_trajectory, step

__all__ = [
    "ApparatusParams",
    "DetectorModel",
    "ExperimentConfig",
    "FeedbackPolicy",
    "MeasurementModel",
    "RabiParams",
    "TwoModeState",
    "analytic_population",
    "average_fuzziness",
    "budget",
    "measurement_amplitudes",
    "normalize",
    "preset",
    "rabi_propagate",
    "run_ensemble",
    "run_trajectory",
    "step",
]
