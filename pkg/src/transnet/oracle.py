"""Reference evaluations that bypass the recursive history update.

``oracle_stress`` rebuilds the stress from a log of past deformation states,
either by an explicit weighted sum over the steps (identical discretisation
to the recurrence) or by quadrature of the continuous hereditary integral on
the piecewise-linear path through the log. ``dissipation_check`` evaluates
the dissipation rate of the continuous model along such a path.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .engine import MaterialSpec
from .kinematics import DefState, make_state
from .kinetics import KineticsSpec, Permanent, rate, survival
from .materials import (OgdenHill, hyper_stress, kernel_A, kernel_B, strain_energy,
                        transient_energy, volumetric_energy, volumetric_stress)


def _check_log(log: Sequence[DefState]) -> None:
    if len(log) < 1:
        raise ValueError("history log is empty")
    t = np.array([st.t for st in log])
    if np.any(np.diff(t) <= 0.0):
        raise ValueError("history log times must be strictly increasing")


# ----------------------------------------------------------------------------
# explicit sum over steps
# ----------------------------------------------------------------------------

def _sum_network(net, log):
    """Surviving fraction and full-array history values by explicit summation."""
    n = len(log) - 1
    A = [kernel_A(net.model, st) for st in log]
    ups = [survival(net.kinetics, log[j].T, log[j + 1].T, log[j + 1].t - log[j].t)
           for j in range(n)]
    e = np.array([u.e for u in ups])
    w = np.array([u.w for u in ups])
    # tail[j] = prod_{m > j} e_m
    tail = np.ones(n)
    for j in range(n - 2, -1, -1):
        tail[j] = tail[j + 1] * e[j + 1]
    gamma0 = float(np.prod(e)) if n else 1.0
    H = [np.zeros(np.shape(a)) for a in A[0]]
    for j in range(n):
        c = w[j] * tail[j]
        if c == 0.0:
            continue
        for i in range(len(H)):
            H[i] = H[i] + c * 0.5 * (A[j][i] + A[j + 1][i])
    return gamma0, H


# ----------------------------------------------------------------------------
# continuous path through the log
# ----------------------------------------------------------------------------

class _Path:
    """Piecewise-linear deformation and temperature through the log nodes."""

    def __init__(self, log: Sequence[DefState]):
        self.t = np.array([st.t for st in log])
        self.F = np.array([st.F for st in log])
        self.T = np.array([st.T for st in log])
        self._xg, self._wg = np.polynomial.legendre.leggauss(8)
        self._K = {}

    def _locate(self, s):
        s = np.asarray(s, dtype=float)
        i = np.clip(np.searchsorted(self.t, s, side="right") - 1, 0, len(self.t) - 2)
        theta = (s - self.t[i]) / (self.t[i + 1] - self.t[i])
        return i, theta

    def F_at(self, s):
        if len(self.t) == 1:
            return np.broadcast_to(self.F[0], np.shape(s) + (3, 3)).copy()
        i, th = self._locate(s)
        th = np.asarray(th)[..., None, None]
        return (1.0 - th) * self.F[i] + th * self.F[i + 1]

    def T_at(self, s):
        if len(self.t) == 1:
            return np.full(np.shape(s), self.T[0])
        i, th = self._locate(s)
        return (1.0 - th) * self.T[i] + th * self.T[i + 1]

    def rate_at(self, kin: KineticsSpec, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if isinstance(kin, Permanent):
            return np.zeros(s.shape)
        return np.array([rate(kin, T) for T in self.T_at(s)])

    def _segment_integral(self, kin, a, b):
        """int_a^b k(T(u)) du for arrays of bounds inside a single interval."""
        a, b = np.asarray(a, float), np.asarray(b, float)
        half, mid = 0.5 * (b - a), 0.5 * (b + a)
        u = mid[..., None] + half[..., None] * self._xg
        return half * (self.rate_at(kin, u.ravel()).reshape(u.shape) @ self._wg)

    def cum_rate(self, kin: KineticsSpec, s):
        """K(s) = int_{t0}^s k(T(u)) du."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if isinstance(kin, Permanent):
            return np.zeros(s.shape)
        key = id(kin)
        if key not in self._K:
            seg = self._segment_integral(kin, self.t[:-1], self.t[1:])
            self._K[key] = (kin, np.concatenate([[0.0], np.cumsum(seg)]))
        Kn = self._K[key][1]
        if len(self.t) == 1:
            return np.zeros(s.shape)
        i, _ = self._locate(s)
        return Kn[i] + self._segment_integral(kin, self.t[i], s)

    def nodes(self, tau: float, order: int, refine: int):
        """Composite Gauss-Legendre nodes and weights on [t0, tau]."""
        xg, wg = np.polynomial.legendre.leggauss(order)
        edges = self.t[self.t < tau]
        edges = np.concatenate([edges, [tau]])
        if refine > 1:
            fine = [np.linspace(a, b, refine + 1)[:-1] for a, b in zip(edges[:-1], edges[1:])]
            edges = np.concatenate(fine + [[tau]])
        a, b = edges[:-1], edges[1:]
        half, mid = 0.5 * (b - a), 0.5 * (b + a)
        s = (mid[:, None] + half[:, None] * xg).ravel()
        w = (half[:, None] * wg).ravel()
        return s, w


def _batched_contract(A: list, B: list) -> np.ndarray:
    out = 0.0
    for a, b in zip(A, B):
        k = np.ndim(a) - 1
        out = out + np.tensordot(a, b, axes=(list(range(1, k + 1)), list(range(k))))
    return out


def _transient_stress(model, at_tau: DefState, at_s: DefState) -> np.ndarray:
    """Stress of networks formed at a batch of times ``s``, evaluated at ``tau``."""
    if isinstance(model, OgdenHill):
        B, _ = kernel_B(model, at_tau, tangent=False)
        return _batched_contract(kernel_A(model, at_s), B)
    rel = DefState(at_tau.F @ at_s.Finv)
    return hyper_stress(model, rel)


def _quadrature_stress(path: _Path, spec: MaterialSpec, tau: float, order: int,
                       refine: int) -> np.ndarray:
    at_tau = make_state(path.F_at(tau), tau, float(path.T_at(tau)))
    sigma = np.zeros((3, 3))
    s, w = path.nodes(tau, order, refine) if tau > path.t[0] else (np.empty(0), np.empty(0))
    at_s = DefState(path.F_at(s)) if s.size else None
    for net in spec.networks:
        Ktau = float(path.cum_rate(net.kinetics, tau)[0])
        sigma = sigma + np.exp(-Ktau) * hyper_stress(net.model, at_tau)
        if s.size and not isinstance(net.kinetics, Permanent):
            g = path.rate_at(net.kinetics, s) * np.exp(-(Ktau - path.cum_rate(net.kinetics, s)))
            sigma = sigma + np.einsum("m,mij->ij", w * g, _transient_stress(net.model, at_tau, at_s))
    if spec.volumetric is not None:
        sigma = sigma + volumetric_stress(spec.volumetric, at_tau)
    return sigma


def oracle_stress(log: Sequence[DefState], spec: MaterialSpec, mode: str = "sum",
                  order: int = 4, refine: int = 1) -> np.ndarray:
    """Cauchy stress at the last log entry, recomputed from the whole log.

    Parameters
    ----------
    log : sequence of DefState
        States at strictly increasing times, starting from the initial state.
    mode : {"sum", "quadrature"}
        ``"sum"`` forms every history value as an explicit weighted sum over
        the steps. ``"quadrature"`` integrates the continuous hereditary
        integral on the piecewise-linear path through the log with composite
        Gauss-Legendre rules of ``order`` points on each interval split into
        ``refine`` cells.
    """
    _check_log(log)
    if mode == "sum":
        st = log[-1]
        sigma = np.zeros((3, 3))
        for net in spec.networks:
            gamma0, H = _sum_network(net, log)
            B, _ = kernel_B(net.model, st, tangent=False)
            sigma = sigma + gamma0 * hyper_stress(net.model, st)
            sigma = sigma + sum(np.tensordot(h, b, axes=np.ndim(h)) for h, b in zip(H, B))
        if spec.volumetric is not None:
            sigma = sigma + volumetric_stress(spec.volumetric, st)
        return sigma
    if mode == "quadrature":
        path = _Path(log)
        return _quadrature_stress(path, spec, path.t[-1], order, refine)
    raise ValueError(f"unknown oracle mode {mode!r}")


# ----------------------------------------------------------------------------
# energy and dissipation
# ----------------------------------------------------------------------------

def _total_energy(path: _Path, spec: MaterialSpec, tau: float, order: int) -> float:
    at_tau = make_state(path.F_at(tau), tau)
    total = 0.0
    s, w = path.nodes(tau, order, 1) if tau > path.t[0] else (np.empty(0), np.empty(0))
    at_s = DefState(path.F_at(s)) if s.size else None
    for net in spec.networks:
        Ktau = float(path.cum_rate(net.kinetics, tau)[0])
        total += np.exp(-Ktau) * float(strain_energy(net.model, at_tau))
        if s.size and not isinstance(net.kinetics, Permanent):
            g = path.rate_at(net.kinetics, s) * np.exp(-(Ktau - path.cum_rate(net.kinetics, s)))
            total += float(np.sum(w * g * transient_energy(net.model, at_tau, at_s)))
    if spec.volumetric is not None:
        total += float(volumetric_energy(spec.volumetric, at_tau))
    return total


def total_energy(log: Sequence[DefState], spec: MaterialSpec, order: int = 6) -> float:
    """Stored energy per unit reference volume at the last log entry."""
    _check_log(log)
    path = _Path(log)
    return _total_energy(path, spec, path.t[-1], order)


@dataclass(frozen=True)
class DissipationResult:
    """Per-step mean dissipation rate and stress power of the continuous model."""

    dissipation: np.ndarray
    stress_power: np.ndarray  # |J sigma : L| at the quadrature times

    @property
    def worst_ratio(self) -> float:
        """Most negative dissipation relative to the peak stress power."""
        scale = float(np.max(np.abs(self.stress_power))) if self.stress_power.size else 0.0
        lo = float(np.min(self.dissipation)) if self.dissipation.size else 0.0
        return lo / scale if scale > 0.0 else lo


def dissipation_check(log: Sequence[DefState], spec: MaterialSpec,
                      order: int = 6) -> DissipationResult:
    """Dissipation rate ``J sigma : L - dW/dt`` averaged over each log interval.

    The stress power is integrated over each interval and the energy change
    is taken between the interval ends, both with Gauss-Legendre rules.
    """
    _check_log(log)
    path = _Path(log)
    xg, wg = np.polynomial.legendre.leggauss(order)
    D, power = [], []
    W_prev = _total_energy(path, spec, path.t[0], order)
    for j in range(len(path.t) - 1):
        a, b = path.t[j], path.t[j + 1]
        dt = b - a
        Fdot = (path.F[j + 1] - path.F[j]) / dt
        work = 0.0
        for x, wq in zip(xg, wg):
            tau = 0.5 * (a + b) + 0.5 * dt * x
            F = path.F_at(tau)
            L = Fdot @ np.linalg.inv(F)
            p = np.linalg.det(F) * float(np.einsum("ij,ij->", _quadrature_stress(path, spec, tau, order, 1), L))
            power.append(abs(p))
            work += 0.5 * dt * wq * p
        W_next = _total_energy(path, spec, b, order)
        D.append((work - (W_next - W_prev)) / dt)
        W_prev = W_next
    return DissipationResult(np.array(D), np.array(power))


# ----------------------------------------------------------------------------
# finite-difference tangent
# ----------------------------------------------------------------------------

def fd_spatial_tangent(stress: Callable[[np.ndarray], np.ndarray], F: np.ndarray,
                       eps: float = 1e-6) -> np.ndarray:
    """Spatial tangent by central differences of the pulled-back stress.

    Perturbations ``dF = eps D F`` use symmetric unit directions ``D``; the
    second Piola-Kirchhoff increment is pushed forward so that the result is
    comparable with ``h`` in ``h : d = J**-1 F dS F^T``.
    """
    F = np.asarray(F, dtype=float)
    J = np.linalg.det(F)

    def S(G):
        Gi = np.linalg.inv(G)
        return np.linalg.det(G) * Gi @ stress(G) @ Gi.T

    h = np.zeros((3, 3, 3, 3))
    for k in range(3):
        for l in range(k, 3):
            D = np.zeros((3, 3))
            D[k, l] += 0.5
            D[l, k] += 0.5
            dS = (S(F + eps * D @ F) - S(F - eps * D @ F)) / (2.0 * eps)
            col = F @ dS @ F.T / J
            h[:, :, k, l] = col
            h[:, :, l, k] = col
    return h
