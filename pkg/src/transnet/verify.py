"""Self-checks runnable from the command line."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import MaterialSpec, Network, evaluate, init_state, step
from .kinetics import Arrhenius, ConstantRate, Permanent
from .materials import BlatzKo, NeoHookean, OgdenHill, OgdenTerm, Volumetric, Yeoh
from .oracle import dissipation_check, fd_spatial_tangent, oracle_stress


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    limit: float

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag}  {self.name}: {self.value:.3e} (limit {self.limit:.1e})"


def sample_materials() -> dict:
    """One mixed material per model family."""
    return {
        "neo-hookean": MaterialSpec((Network(NeoHookean(1.0, 2.0), Permanent()),
                                     Network(NeoHookean(0.5, 1.0), ConstantRate(0.3)))),
        "blatz-ko": MaterialSpec((Network(BlatzKo(0.4, 1.0, 0.3), Arrhenius(50.0, 5000.0)),)),
        "ogden-hill": MaterialSpec((Network(OgdenHill((OgdenTerm(1.0, 3.0, 0.2),
                                                       OgdenTerm(-0.2, -2.0, 0.1)))),
                                    Network(OgdenHill((OgdenTerm(0.6, 2.0, 0.3),
                                                       OgdenTerm(0.2, 0.5, 0.1))),
                                            ConstantRate(0.5)))),
        "yeoh": MaterialSpec((Network(Yeoh(1.0, -0.1, 0.01), Permanent()),
                              Network(Yeoh(1.0, -0.1, 0.01), ConstantRate(0.2))),
                             Volumetric(50.0)),
    }


def random_walk(spec: MaterialSpec, n: int, rng, size: float = 0.04, dt: float = 0.2,
                T0: float = 300.0):
    """Random deformation path; returns the final state and the log of states."""
    state = init_state(spec, T=T0)
    log = [state.current]
    F = np.eye(3)
    for j in range(n):
        G = F + size * rng.normal(size=(3, 3))
        while np.linalg.det(G) <= 0.2:
            G = F + size * rng.normal(size=(3, 3))
        F = G
        state = step(state, spec, F, T0 + 2.0 * (j + 1), dt)
        log.append(state.current)
    return state, log


def check_oracle_equivalence(rng, steps: int = 30) -> list:
    out = []
    for name, spec in sample_materials().items():
        state, log = random_walk(spec, steps, rng)
        s = evaluate(state, spec, tangent=False).sigma
        ref = oracle_stress(log, spec, mode="sum")
        err = float(np.linalg.norm(s - ref) / np.linalg.norm(ref))
        out.append(CheckResult(f"recurrence vs explicit sum [{name}]", err <= 1e-12, err, 1e-12))
    return out


def check_fd_tangent(rng, steps: int = 8) -> list:
    out = []
    for name, spec in sample_materials().items():
        state, _ = random_walk(spec, steps, rng)
        h = evaluate(state, spec).tangent
        fd = fd_spatial_tangent(lambda G: evaluate(state, spec, G, tangent=False).sigma, state.F)
        err = float(np.linalg.norm(h - fd) / np.linalg.norm(fd))
        out.append(CheckResult(f"tangent vs finite differences [{name}]", err <= 1e-5, err, 1e-5))
    return out


def check_dissipation(rng, steps: int = 10) -> list:
    out = []
    for name, spec in sample_materials().items():
        _, log = random_walk(spec, steps, rng)
        ratio = dissipation_check(log, spec).worst_ratio
        out.append(CheckResult(f"dissipation non-negative [{name}]", ratio >= -1e-8,
                               ratio, -1e-8))
    return out


def run_verify(seed: int = 0) -> list:
    rng = np.random.default_rng(seed)
    return check_oracle_equivalence(rng) + check_fd_tangent(rng) + check_dissipation(rng)
