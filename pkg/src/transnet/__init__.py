"""Finite-strain viscoelasticity from networks that break and re-form.

Each network in a material is a hyperelastic solid. Networks with breaking
kinetics lose their original population over time while new networks form
in the current configuration, each remembering the deformation it was born
in. The hereditary stress integral is evaluated with a constant-cost
recursive update of a few history tensors per network.
"""
from .driver import (ConstantTemperature, FullF, LinearRamp, LoadStep, ProgramResult,
                     StressFree, UniaxialStretch, run_program, stress_free)
from .engine import (MaterialSpec, MaterialState, Network, StressResult, evaluate,
                     init_state, state_from_bytes, state_to_bytes, step, trial)
from .kinematics import DefState, make_state
from .kinetics import Arrhenius, ConstantRate, Permanent, rate, survival
from .materials import (BlatzKo, NeoHookean, OgdenHill, OgdenTerm, Volumetric, Yeoh,
                        ogden_blatzko_map)
from .scenarios import run_scenario

__version__ = "0.1.0"

__all__ = [
    "Arrhenius", "BlatzKo", "ConstantRate", "ConstantTemperature", "DefState", "FullF",
    "LinearRamp", "LoadStep", "MaterialSpec", "MaterialState", "NeoHookean", "Network",
    "OgdenHill", "OgdenTerm", "Permanent", "ProgramResult", "StressFree", "StressResult",
    "UniaxialStretch", "Volumetric", "Yeoh", "evaluate", "init_state", "make_state",
    "ogden_blatzko_map", "rate", "run_program", "run_scenario", "state_from_bytes",
    "state_to_bytes", "step", "stress_free", "survival", "trial",
]
