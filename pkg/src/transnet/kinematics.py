"""Deformation states and relative (time t to time s) kinematic quantities."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .tensor import Spectral, generalized_stretch, spectral_decompose

logger = logging.getLogger(__name__)

DEFAULT_TEMPERATURE = 293.15
STRETCH_WARNING = 10.0


@dataclass(frozen=True, eq=False)
class IsochoricView:
    """Volume-preserving part ``Fbar = J**(-1/3) F`` and derived tensors."""

    Fbar: np.ndarray
    Cbar: np.ndarray
    Cbar_inv: np.ndarray
    bbar: np.ndarray
    I1bar: np.ndarray


@dataclass(frozen=True, eq=False)
class DefState:
    """Deformation gradient at a time instant with cached derived tensors.

    ``F`` may carry leading batch axes; spectral data is only available for a
    single 3x3 gradient.
    """

    F: np.ndarray
    t: float = 0.0
    T: float = DEFAULT_TEMPERATURE
    J: np.ndarray = field(init=False, repr=False)
    C: np.ndarray = field(init=False, repr=False)
    Cinv: np.ndarray = field(init=False, repr=False)
    b: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        F = self.F
        FT = np.swapaxes(F, -1, -2)
        C = FT @ F
        object.__setattr__(self, "J", np.linalg.det(F))
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "Cinv", np.linalg.inv(C))
        object.__setattr__(self, "b", F @ FT)

    @cached_property
    def Finv(self) -> np.ndarray:
        return np.linalg.inv(self.F)

    @cached_property
    def binv(self) -> np.ndarray:
        Fi = self.Finv
        return np.swapaxes(Fi, -1, -2) @ Fi

    @cached_property
    def spectral(self) -> Spectral:
        return spectral_decompose(self.C)

    @cached_property
    def iso(self) -> IsochoricView:
        s = np.asarray(self.J) ** (-1.0 / 3.0)
        s2 = s * s
        s = s[..., None, None] if np.ndim(s) else s
        s2 = s2[..., None, None] if np.ndim(s2) else s2
        Cbar = s2 * self.C
        return IsochoricView(
            Fbar=s * self.F,
            Cbar=Cbar,
            Cbar_inv=self.Cinv / s2,
            bbar=s2 * self.b,
            I1bar=np.trace(Cbar, axis1=-2, axis2=-1),
        )


def make_state(F, t: float = 0.0, T: float = DEFAULT_TEMPERATURE) -> DefState:
    """Validate ``F`` and build a :class:`DefState`.

    Raises
    ------
    ValueError
        If ``F`` is not 3x3, not finite, or has ``det F <= 0``.
    """
    F = np.array(F, dtype=float)
    if F.shape[-2:] != (3, 3):
        raise ValueError(f"deformation gradient must be 3x3, got shape {F.shape}")
    if not np.all(np.isfinite(F)):
        raise ValueError("deformation gradient has non-finite entries")
    J = np.linalg.det(F)
    if np.any(J <= 0.0):
        raise ValueError(f"deformation gradient must have det F > 0, got {np.min(J):.6g}")
    # lambda_max**2 <= tr C; only look closer when the cheap bound trips
    trC = np.einsum("...ij,...ij->...", F, F)
    if np.any(trC > STRETCH_WARNING**2):
        lam = np.sqrt(np.max(np.linalg.eigvalsh(np.swapaxes(F, -1, -2) @ F)))
        if lam > STRETCH_WARNING:
            logger.warning("principal stretch %.4g exceeds %.0f", lam, STRETCH_WARNING)
    return DefState(F, float(t), float(T))


def relative_gradient(at_t: DefState, at_s: DefState) -> np.ndarray:
    """``F(t) F(s)**-1``; broadcasts over batched states."""
    return at_t.F @ at_s.Finv


def relative_invariants(at_t: DefState, at_s: DefState) -> tuple:
    """Invariants of the relative Cauchy-Green tensor from the two endpoints.

    Computed from ``C(t)`` and ``C(s)**-1`` without forming the relative
    gradient.
    """
    Ct, Ci = at_t.C, at_s.Cinv
    I1 = np.einsum("...ij,...ij->...", Ct, Ci)
    tr2 = np.einsum("...lm,...mn,...no,...ol->...", Ct, Ci, Ct, Ci)
    I2 = 0.5 * (I1 * I1 - tr2)
    I3 = (at_t.J / at_s.J) ** 2
    return I1, I2, I3


def relative_b(at_t: DefState, at_s: DefState) -> np.ndarray:
    """Relative left Cauchy-Green tensor ``F(t) C(s)**-1 F(t)^T``."""
    return at_t.F @ at_s.Cinv @ np.swapaxes(at_t.F, -1, -2)


def relative_b_inv(at_t: DefState, at_s: DefState) -> np.ndarray:
    """Inverse relative left Cauchy-Green tensor ``F(t)^-T C(s) F(t)^-1``."""
    Fi = at_t.Finv
    return np.swapaxes(Fi, -1, -2) @ at_s.C @ Fi


def relative_generalized_stretch_contraction(at_t: DefState, at_s: DefState,
                                             alpha: float) -> float:
    """``U(t)**(2 alpha) : U(s)**(-2 alpha)``."""
    Ut = generalized_stretch(at_t.spectral, alpha)
    Us = generalized_stretch(at_s.spectral, -alpha)
    return float(np.einsum("ij,ij->", Ut, Us))
