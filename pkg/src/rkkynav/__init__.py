"""Entanglement trajectories of two spin qubits exchange-coupled to a central qudit."""
from .drive import ExchangeDrive
from .entangle import extended_concurrence
from .evolve import evolve_inphase, evolve_stepper, exchange_operator
from .states import DensityMatrix, SystemConfig, initial_state, weighting
from .trajectory import (ScenarioParams, Trajectory, characterize_row, classify_near_zero,
                         find_tstar, frozen_time, run_scenario)

__all__ = [
    "ExchangeDrive", "extended_concurrence", "evolve_inphase", "evolve_stepper",
    "exchange_operator", "DensityMatrix", "SystemConfig", "initial_state", "weighting",
    "ScenarioParams", "Trajectory", "characterize_row", "classify_near_zero", "find_tstar",
    "frozen_time", "run_scenario",
]
__version__ = "0.1.0"
