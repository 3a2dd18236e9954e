"""Built-in load scenarios."""
from __future__ import annotations

import math

import numpy as np

from .driver import (ConstantTemperature, FullF, LoadStep, ProgramResult, StressFree,
                     UniaxialStretch, run_program, stress_free)
from .engine import MaterialSpec, Network
from .kinetics import Arrhenius, ConstantRate, Permanent
from .materials import BlatzKo, NeoHookean, OgdenHill, OgdenTerm, Volumetric, Yeoh

SECONDS_PER_YEAR = 365.25 * 24 * 3600.0
YEOH_C = (50.0, -10.0, 1.0)


def _cycle(peak: float, period: float, substeps: int, T: float = 293.15) -> list:
    temp = ConstantTemperature(T)
    return [LoadStep(period / 2, substeps, UniaxialStretch(peak), temp),
            LoadStep(period / 2, substeps, UniaxialStretch(1.0), temp)]


def loop_area(lam: np.ndarray, s: np.ndarray) -> float:
    """Trapezoidal ``int s dlam`` along the recorded path (positive when dissipative)."""
    return float(np.sum(0.5 * (s[1:] + s[:-1]) * np.diff(lam)))


def _loop_summary(res: ProgramResult) -> dict:
    a = res.arrays()
    lam, s11 = a["F"][:, 0, 0], a["sigma"][:, 0, 0]
    i_peak = int(np.argmax(np.abs(lam - 1.0)))
    return {
        "hysteresis_area": loop_area(lam, s11),
        "peak_stress": float(s11[i_peak]),
        "final_stress": float(s11[-1]),
        "max_newton_iters": int(np.max(a["newton_iters"])),
    }


def yeoh_material(k: float = 0.05, transient: bool = True, K: float = 1.0e4) -> MaterialSpec:
    """One permanent Yeoh network plus (optionally) an identical transient one."""
    nets = [Network(Yeoh(*YEOH_C), Permanent())]
    if transient:
        nets.append(Network(Yeoh(*YEOH_C), ConstantRate(k)))
    return MaterialSpec(tuple(nets), Volumetric(K))


def yeoh_cyclic(k: float = 0.05, substeps: int = 100, peak: float = 2.0,
                period: float = 20.0, transient: bool = True) -> ProgramResult:
    spec = yeoh_material(k, transient)
    res = run_program(spec, _cycle(peak, period, substeps))
    res.summary = _loop_summary(res)
    return res


def ogden_foam_material(variant: str = "positive", k: float = 0.05, beta: float = 0.1) -> MaterialSpec:
    """Two permanent Ogden-Hill terms plus a transient term with alpha = mu = +-1."""
    if variant not in ("positive", "negative"):
        raise ValueError("variant must be 'positive' or 'negative'")
    sgn = 1.0 if variant == "positive" else -1.0
    base = OgdenHill((OgdenTerm(-0.001, -5.0, beta), OgdenTerm(1.0, 10.0, beta)))
    trans = OgdenHill((OgdenTerm(sgn, sgn, beta),))
    return MaterialSpec((Network(base, Permanent()), Network(trans, ConstantRate(k))))


def ogden_foam_cyclic(variant: str = "positive", k: float = 0.05, beta: float = 0.1,
                      substeps: int = 100, peak: float = 0.5, period: float = 20.0) -> ProgramResult:
    spec = ogden_foam_material(variant, k, beta)
    res = run_program(spec, _cycle(peak, period, substeps))
    res.summary = _loop_summary(res)
    return res


def blatzko_permanent_set(f: float = 0.5, mu: float = 2.0, beta: float = 0.05, k: float = 0.1,
                          hold_stretch: float = 0.8, load_time: float = 0.01,
                          readouts=(2.0, 10.0), substeps_per_year: int = 50) -> ProgramResult:
    """Compression held for years (time unit: year) with stress-free readouts."""
    spec = MaterialSpec((Network(BlatzKo(f, mu, beta), ConstantRate(k)),))
    steps = [LoadStep(load_time, 10, UniaxialStretch(hold_stretch))]
    t = load_time
    for tr in readouts:
        n = max(1, int(math.ceil((tr - t) * substeps_per_year)))
        steps.append(LoadStep(tr - t, n, UniaxialStretch(hold_stretch)))
        t = tr
    res = run_program(spec, steps)
    peak = float(np.max(np.abs(np.array(res.sigma))))
    rows = []
    for tr, st in zip(readouts, res.step_states[1:]):
        F_free, sig, _ = stress_free(st, spec, scale=peak)
        rows.append({"time": tr, "residual_stretch": float(F_free[0, 0]),
                     "residual_strain": float(1.0 - F_free[0, 0]),
                     "residual_stress_norm": float(np.linalg.norm(sig)),
                     "gamma0": st.gamma0[0], "gamma0_expected": math.exp(-k * tr)})
    res.summary = {"readouts": rows, "peak_stress": peak}
    return res


def arrhenius_material(networks: str = "both") -> MaterialSpec:
    """Neo-Hookean networks breaking with rate prefactors of 20/s and 20/yr."""
    fast = Network(NeoHookean(0.03, 1.5), Arrhenius(20.0, 1.0e4))
    slow = Network(NeoHookean(0.03, 1.5), Arrhenius(20.0 / SECONDS_PER_YEAR, 1.0e4))
    choice = {"both": (fast, slow), "fast": (fast,), "slow": (slow,)}
    if networks not in choice:
        raise ValueError("networks must be 'both', 'fast' or 'slow'")
    return MaterialSpec(choice[networks])


def arrhenius_relax(T: float = 373.0, networks: str = "both", stretch: float = 0.7,
                    hold: float = 5.0, recovery: float = 15.0, substeps: int = 200) -> ProgramResult:
    """Instantaneous compression held at fixed gradient, then released (time unit: s)."""
    spec = arrhenius_material(networks)
    F0 = np.diag([stretch, 1.0, 1.0])
    temp = ConstantTemperature(T)
    steps = [LoadStep(hold, substeps, FullF(F0), temp)]
    if recovery > 0.0:
        steps.append(LoadStep(recovery, substeps, StressFree(), temp))
    res = run_program(spec, steps, F0=F0)
    s = np.array(res.sigma)[:, 0, 0]
    i_hold = substeps
    res.summary = {
        "temperature": T,
        "relaxation_rate": float(-math.log(s[i_hold] / s[0]) / hold),
        "stress_start": float(s[0]),
        "stress_end_hold": float(s[i_hold]),
        "final_axial_stretch": float(res.F[-1][0, 0]),
    }
    return res


SCENARIOS = {
    "yeoh-cyclic": yeoh_cyclic,
    "ogden-foam-cyclic": ogden_foam_cyclic,
    "blatzko-permanent-set": blatzko_permanent_set,
    "arrhenius-relax": arrhenius_relax,
}


def run_scenario(name: str, **options) -> ProgramResult:
    """Run a built-in scenario by name; options are passed to its builder."""
    try:
        fn = SCENARIOS[name]
    except KeyError:
        raise ValueError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}") from None
    return fn(**options)
