"""Cost of the recursive update versus re-summing the whole history."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .engine import MaterialSpec, Network, evaluate, init_state, state_to_bytes, step
from .kinetics import ConstantRate
from .materials import BlatzKo, NeoHookean
from .oracle import oracle_stress

DEFAULT_LENGTHS = (100, 1000, 10000)


@dataclass(frozen=True)
class BenchRow:
    history_length: int
    recurrence_seconds_per_step: float
    naive_seconds_per_step: float
    recurrence_state_bytes: int
    naive_state_bytes: int

    @property
    def speedup(self) -> float:
        return self.naive_seconds_per_step / self.recurrence_seconds_per_step


def bench_material() -> MaterialSpec:
    return MaterialSpec((Network(NeoHookean(1.0, 2.0), ConstantRate(0.05)),
                         Network(BlatzKo(0.5, 1.0, 0.2), ConstantRate(0.01))))


def _path(n: int, dt: float = 0.1) -> np.ndarray:
    t = dt * np.arange(n + 1)
    lam = 1.0 + 0.3 * np.sin(2.0 * np.pi * t / 50.0)
    F = np.zeros((n + 1, 3, 3))
    F[:, 0, 0] = lam
    F[:, 1, 1] = F[:, 2, 2] = lam**-0.5
    return F


def run_bench(lengths=DEFAULT_LENGTHS, spec: MaterialSpec = None, timed_steps: int = 100,
              repeats: int = 3, dt: float = 0.1) -> list:
    """Time one step of each method once ``N`` steps of history exist.

    The recurrence is timed over the last ``timed_steps`` steps (median); the
    naive method re-evaluates the stress from all stored states (median of
    ``repeats``). Memory is the size of what each method must keep.
    """
    spec = spec or bench_material()
    rows = []
    for n in lengths:
        F = _path(n, dt)
        state = init_state(spec)
        log = [state.current]
        times = []
        for j in range(1, n + 1):
            t0 = time.perf_counter()
            state = step(state, spec, F[j], state.T, dt)
            evaluate(state, spec, tangent=False)
            times.append(time.perf_counter() - t0)
            log.append(state.current)
        rec = float(np.median(times[-min(timed_steps, n):]))
        naive_times = []
        for _ in range(repeats):
            t0 = time.perf_counter()
            oracle_stress(log, spec, mode="sum")
            naive_times.append(time.perf_counter() - t0)
        naive = float(np.median(naive_times))
        # naive storage: F (9), t and T per stored state
        naive_bytes = len(log) * 11 * 8
        rows.append(BenchRow(n, rec, naive, len(state_to_bytes(state)), naive_bytes))
    return rows


def format_bench(rows) -> str:
    head = f"{'N':>8} {'recurrence s/step':>18} {'naive s/step':>14} {'speedup':>9} {'state bytes':>12} {'naive bytes':>12}"
    lines = [head]
    for r in rows:
        lines.append(f"{r.history_length:>8d} {r.recurrence_seconds_per_step:>18.3e} "
                     f"{r.naive_seconds_per_step:>14.3e} {r.speedup:>9.1f} "
                     f"{r.recurrence_state_bytes:>12d} {r.naive_state_bytes:>12d}")
    return "\n".join(lines)
