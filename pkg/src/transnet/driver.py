"""Material-point load programs with mixed stretch / stress control."""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .engine import (MaterialSpec, MaterialState, StressResult, evaluate, init_state,
                     trial)
from .kinematics import DEFAULT_TEMPERATURE
from .tensor import VOIGT_PAIRS

logger = logging.getLogger(__name__)

NEWTON_TOL = 1e-10
NEWTON_MAX_ITER = 30
LATERAL_BRACKET = (0.2, 5.0)


class ConvergenceError(RuntimeError):
    """A Newton solve did not reach its tolerance."""


@dataclass(frozen=True)
class FullF:
    """Prescribed deformation gradient at the end of the step."""

    F: np.ndarray

    def __post_init__(self):
        F = np.array(self.F, dtype=float)
        if F.shape != (3, 3) or not np.all(np.isfinite(F)) or np.linalg.det(F) <= 0.0:
            raise ValueError("full-F control needs a finite 3x3 gradient with det F > 0")
        object.__setattr__(self, "F", F)


@dataclass(frozen=True)
class UniaxialStretch:
    """Axial stretch ``F11`` at the end of the step; lateral stresses vanish."""

    stretch: float

    def __post_init__(self):
        if not (np.isfinite(self.stretch) and self.stretch > 0.0):
            raise ValueError(f"stretch must be positive, got {self.stretch}")


@dataclass(frozen=True)
class StressFree:
    """All normal stresses vanish; the diagonal gradient is solved for."""


Control = Union[FullF, UniaxialStretch, StressFree]


@dataclass(frozen=True)
class ConstantTemperature:
    T: float


@dataclass(frozen=True)
class LinearRamp:
    T_start: float
    T_end: float


Temperature = Union[ConstantTemperature, LinearRamp]


def _temperature_at(temp: Temperature, frac: float) -> float:
    if isinstance(temp, ConstantTemperature):
        return temp.T
    return temp.T_start + (temp.T_end - temp.T_start) * frac


@dataclass(frozen=True)
class LoadStep:
    """A segment of the program, split into ``substeps`` equal increments."""

    duration: float
    substeps: int
    control: Control
    temperature: Temperature = ConstantTemperature(DEFAULT_TEMPERATURE)

    def __post_init__(self):
        if not (np.isfinite(self.duration) and self.duration > 0.0):
            raise ValueError(f"duration must be positive, got {self.duration}")
        if int(self.substeps) != self.substeps or self.substeps < 1:
            raise ValueError(f"substeps must be a positive integer, got {self.substeps}")
        temps = ([self.temperature.T] if isinstance(self.temperature, ConstantTemperature)
                 else [self.temperature.T_start, self.temperature.T_end])
        if not all(np.isfinite(T) and T > 0.0 for T in temps):
            raise ValueError("temperatures must be positive kelvin")


@dataclass
class ProgramResult:
    """Recorded response, one row per converged increment (plus the start)."""

    t: list = field(default_factory=list)
    T: list = field(default_factory=list)
    F: list = field(default_factory=list)
    sigma: list = field(default_factory=list)
    gamma0: list = field(default_factory=list)
    newton_iters: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    state: Optional[MaterialState] = None
    step_states: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def record(self, state: MaterialState, sigma: np.ndarray, iters: int,
               residual: float = 0.0) -> None:
        self.t.append(state.t)
        self.T.append(state.T)
        self.F.append(np.array(state.F))
        self.sigma.append(np.array(sigma))
        self.gamma0.append(state.gamma0)
        self.newton_iters.append(iters)
        self.residuals.append(residual)
        self.state = state

    def extend(self, other: "ProgramResult") -> None:
        """Append another result that continues from this one's last row."""
        for name in ("t", "T", "F", "sigma", "gamma0", "newton_iters", "residuals"):
            getattr(self, name).extend(getattr(other, name)[1:])
        self.step_states.extend(other.step_states)
        self.state = other.state

    def arrays(self) -> dict:
        return {
            "t": np.array(self.t), "T": np.array(self.T), "F": np.array(self.F),
            "sigma": np.array(self.sigma), "gamma0": np.array(self.gamma0),
            "newton_iters": np.array(self.newton_iters),
            "residuals": np.array(self.residuals),
        }

    def csv_header(self) -> list:
        n = len(self.gamma0[0]) if self.gamma0 else 0
        return (["t", "T"] + [f"F{i + 1}{j + 1}" for i in range(3) for j in range(3)]
                + [f"sig{i + 1}{j + 1}" for i, j in VOIGT_PAIRS]
                + [f"gamma0_net{k + 1}" for k in range(n)] + ["newton_iters"])

    def to_csv(self, dest=None) -> str:
        """Write the rows as CSV with full double precision; returns the text."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.csv_header())
        for t, T, F, s, g, it in zip(self.t, self.T, self.F, self.sigma, self.gamma0,
                                     self.newton_iters):
            row = [t, T] + list(np.ravel(F)) + [s[i, j] for i, j in VOIGT_PAIRS] + list(g)
            w.writerow([repr(float(x)) for x in row] + [str(int(it))])
        text = buf.getvalue()
        if dest is not None:
            if hasattr(dest, "write"):
                dest.write(text)
            else:
                with open(dest, "w", newline="") as fh:
                    fh.write(text)
        return text


def _stress_scale(res: StressResult, ref: float) -> float:
    return max(float(np.linalg.norm(res.sigma)), ref)


def _solve_uniaxial(state, spec, lam1, lam2, T, dt, ref, algorithmic):
    """Find the lateral stretch with zero lateral stress (safeguarded Newton)."""
    lo, hi = LATERAL_BRACKET
    it = 0
    history = []
    while True:
        F = np.diag([lam1, lam2, lam2])
        new, res = trial(state, spec, F, T, dt, algorithmic)
        r = res.sigma[1, 1]
        history.append(abs(r))
        if abs(r) <= NEWTON_TOL * _stress_scale(res, ref):
            return new, res, it, abs(r)
        if it >= NEWTON_MAX_ITER:
            raise ConvergenceError(
                f"lateral stress did not converge at t={state.t + dt:.6g}; residuals "
                + ", ".join(f"{x:.3e}" for x in history))
        h = res.tangent
        slope = (h[1, 1, 1, 1] + h[1, 1, 2, 2]) / lam2
        if r > 0.0:
            hi = min(hi, lam2)
        else:
            lo = max(lo, lam2)
        step_ = -r / slope if slope > 0.0 else np.nan
        cand = lam2 + step_
        if not (np.isfinite(cand) and lo < cand < hi):
            cand = 0.5 * (lo + hi)
        it += 1
        if abs(cand - lam2) <= 4e-16 * lam2:
            return new, res, it, abs(r)
        lam2 = cand


def _solve_free(state, spec, lam, T, dt, ref, algorithmic, frozen=False):
    """Diagonal gradient with vanishing normal stresses (3-unknown Newton)."""
    lam = np.array(lam, dtype=float)
    it = 0
    history = []
    while True:
        F = np.diag(lam)
        if frozen:
            new, res = state, evaluate(state, spec, F)
        else:
            new, res = trial(state, spec, F, T, dt, algorithmic)
        r = np.diag(res.sigma)
        rn = float(np.max(np.abs(r)))
        history.append(rn)
        if rn <= NEWTON_TOL * _stress_scale(res, ref):
            return new, res, it, lam, rn
        if it >= NEWTON_MAX_ITER:
            raise ConvergenceError("stress-free solve did not converge; residuals "
                                   + ", ".join(f"{x:.3e}" for x in history))
        h = res.tangent
        jac = np.empty((3, 3))
        for i in range(3):
            for j in range(3):
                jac[i, j] = (h[i, i, j, j] + (2.0 * (i == j) - 1.0) * r[i]) / lam[j]
        dlam = np.linalg.solve(jac, -r)
        # keep stretches positive
        scale = 1.0
        while np.any(lam + scale * dlam <= 0.2 * lam):
            scale *= 0.5
        it += 1
        if np.max(np.abs(scale * dlam) / lam) <= 4e-16:
            return new, res, it, lam, rn
        lam = lam + scale * dlam


def stress_free(state: MaterialState, spec: MaterialSpec, guess=None, scale: float = 0.0):
    """Instantaneous unloading: diagonal gradient with zero stress, history frozen.

    Returns ``(F, sigma, iterations)``. ``scale`` sets a stress magnitude below
    which the residual is measured absolutely (e.g. the peak stress of the
    preceding program).
    """
    lam = np.diag(state.F) if guess is None else np.asarray(guess, dtype=float)
    ref = max(scale, _reference_stress(spec))
    _, res, it, lam, _ = _solve_free(state, spec, lam, state.T, 0.0, ref, False, frozen=True)
    return np.diag(lam), res.sigma, it


def _reference_stress(spec: MaterialSpec) -> float:
    """Small stress level used to make the Newton tolerance well defined near zero."""
    h0 = evaluate(init_state(spec), spec).tangent
    return 1e-6 * float(np.linalg.norm(h0))


def run_program(spec: MaterialSpec, steps: Sequence[LoadStep], F0=None,
                state: Optional[MaterialState] = None, algorithmic: bool = False) -> ProgramResult:
    """Run a load program from a fresh (or given) state.

    ``F0`` applies an initial deformation instantaneously at ``t = 0``.
    """
    if not steps:
        raise ValueError("program has no steps")
    if state is None:
        T0 = _temperature_at(steps[0].temperature, 0.0)
        state = init_state(spec, F0, 0.0, T0)
    ref = _reference_stress(spec)
    result = ProgramResult()
    sig0 = evaluate(state, spec, tangent=False).sigma
    result.record(state, sig0, 0)
    # stress-free targets have no own scale; measure them against the program peak
    peak = float(np.linalg.norm(sig0))
    for ls in steps:
        t0, F_start = state.t, np.array(state.F)
        for n in range(1, ls.substeps + 1):
            frac = n / ls.substeps
            T = _temperature_at(ls.temperature, frac)
            # time from the step start avoids drift from repeated additions
            dt_n = (t0 + ls.duration * frac) - state.t
            ctl = ls.control
            if isinstance(ctl, FullF):
                F = F_start + (ctl.F - F_start) * frac
                new, res = trial(state, spec, F, T, dt_n, algorithmic)
                iters, resid = 0, 0.0
            elif isinstance(ctl, UniaxialStretch):
                lam1 = F_start[0, 0] + (ctl.stretch - F_start[0, 0]) * frac
                new, res, iters, resid = _solve_uniaxial(state, spec, lam1, state.F[1, 1], T,
                                                         dt_n, ref, algorithmic)
            elif isinstance(ctl, StressFree):
                new, res, iters, _, resid = _solve_free(state, spec, np.diag(state.F), T, dt_n,
                                                        max(ref, peak), algorithmic)
            else:
                raise TypeError(f"unknown control {ctl!r}")
            state = new
            peak = max(peak, float(np.linalg.norm(res.sigma)))
            result.record(state, res.sigma, iters, resid)
        result.step_states.append(state)
        logger.debug("finished step at t=%g", state.t)
    return result
