"""Scission kinetics: rate laws and the per-step survival update."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Union

logger = logging.getLogger(__name__)

GAS_CONSTANT = 8.314  # J / (mol K)
UNDERFLOW_EXPONENT = 700.0


@dataclass(frozen=True)
class Permanent:
    """Network that never breaks."""


@dataclass(frozen=True)
class ConstantRate:
    """Temperature-independent breaking rate ``k`` (per time unit)."""

    k: float

    def __post_init__(self):
        if not (self.k >= 0.0 and math.isfinite(self.k)):
            raise ValueError(f"rate k must be finite and non-negative, got {self.k}")


@dataclass(frozen=True)
class Arrhenius:
    """``k(T) = A exp(-E_A / (R T))`` with ``E_A`` in J/mol and ``T`` in K."""

    A: float
    E_A: float
    R: float = GAS_CONSTANT

    def __post_init__(self):
        if not (self.A >= 0.0 and math.isfinite(self.A)):
            raise ValueError(f"prefactor A must be finite and non-negative, got {self.A}")
        if not math.isfinite(self.E_A):
            raise ValueError(f"activation energy E_A must be finite, got {self.E_A}")
        if not self.R > 0.0:
            raise ValueError(f"gas constant R must be positive, got {self.R}")


KineticsSpec = Union[Permanent, ConstantRate, Arrhenius]


def rate(kinetics: KineticsSpec, T: float) -> float:
    """Breaking rate at absolute temperature ``T``."""
    if isinstance(kinetics, Permanent):
        return 0.0
    if isinstance(kinetics, ConstantRate):
        return kinetics.k
    if isinstance(kinetics, Arrhenius):
        if not T > 0.0:
            raise ValueError(f"temperature must be positive kelvin, got {T}")
        return kinetics.A * math.exp(-kinetics.E_A / (kinetics.R * T))
    raise TypeError(f"unknown kinetics {kinetics!r}")


@dataclass(frozen=True)
class SurvivalUpdate:
    """Fraction ``e`` of a network surviving one step and ``w = 1 - e``."""

    e: float
    w: float
    k_eff: float


def survival(kinetics: KineticsSpec, T_start: float, T_end: float, dt: float) -> SurvivalUpdate:
    """Survival over a step using the mean of the endpoint rates.

    Exponents above 700 are treated as complete breakage (``e = 0``).
    """
    if dt < 0.0:
        raise ValueError(f"time step must be non-negative, got {dt}")
    if isinstance(kinetics, Permanent):
        return SurvivalUpdate(1.0, 0.0, 0.0)
    k = 0.5 * (rate(kinetics, T_start) + rate(kinetics, T_end))
    x = k * dt
    if x > UNDERFLOW_EXPONENT:
        logger.warning("k dt = %.3g exceeds %.0f; treating the step as full breakage",
                       x, UNDERFLOW_EXPONENT)
        return SurvivalUpdate(0.0, 1.0, k)
    return SurvivalUpdate(math.exp(-x), -math.expm1(-x), k)


def update_original_fraction(gamma0: float, upd: SurvivalUpdate) -> float:
    """Surviving fraction of the original network after one step."""
    return gamma0 * upd.e
