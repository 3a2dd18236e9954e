"""Material-point update for a mixture of permanent and transient networks.

Each network keeps the surviving fraction of its original population and a
fixed set of packed history tensors. One step costs the same regardless of
how many steps came before::

    H <- e H + (1 - e) (A(F_N) + A(F_N+1)) / 2,   gamma0 <- e gamma0

where ``e`` is the survival fraction over the step.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .kinematics import DEFAULT_TEMPERATURE, DefState, make_state
from .kinetics import KineticsSpec, Permanent, survival, update_original_fraction
from .materials import (ModelSpec, Volumetric, Yeoh, history_ranks, hyper_stress,
                        hyper_tangent, kernel_A, kernel_B, kernel_contract,
                        volumetric_stress, volumetric_tangent)
from .tensor import PACKED_SIZE, I3, pack, unpack

STATE_MAGIC = b"TNST"
STATE_VERSION = 1


@dataclass(frozen=True)
class Network:
    """A hyperelastic model paired with its breaking kinetics."""

    model: ModelSpec
    kinetics: KineticsSpec = Permanent()


@dataclass(frozen=True)
class MaterialSpec:
    """Networks acting in parallel plus an optional shared volumetric term.

    The volumetric term is required exactly when a Yeoh network is present.
    """

    networks: tuple
    volumetric: Optional[Volumetric] = None

    def __post_init__(self):
        nets = tuple(self.networks)
        if not nets:
            raise ValueError("material needs at least one network")
        if not all(isinstance(n, Network) for n in nets):
            raise TypeError("networks must be Network instances")
        object.__setattr__(self, "networks", nets)
        has_yeoh = any(isinstance(n.model, Yeoh) for n in nets)
        if has_yeoh and self.volumetric is None:
            raise ValueError("volumetric term K is required with a Yeoh network")
        if not has_yeoh and self.volumetric is not None:
            raise ValueError("volumetric term K is only allowed with a Yeoh network")


@dataclass(frozen=True, eq=False)
class NetworkHistory:
    """Surviving original fraction and packed history values of one network."""

    gamma0: float
    H: tuple  # packed arrays, one per kernel slot
    ranks: tuple


@dataclass(frozen=True, eq=False)
class MaterialState:
    """Converged state after a step: histories and the current deformation."""

    histories: tuple
    current: DefState

    @property
    def F(self) -> np.ndarray:
        return self.current.F

    @property
    def t(self) -> float:
        return self.current.t

    @property
    def T(self) -> float:
        return self.current.T

    @property
    def gamma0(self) -> tuple:
        return tuple(h.gamma0 for h in self.histories)


@dataclass(frozen=True, eq=False)
class StressResult:
    """Cauchy stress, spatial tangent and per-network survival weights."""

    sigma: np.ndarray
    tangent: np.ndarray
    w: tuple = field(default=())


def _packed_A(model: ModelSpec, st: DefState, ranks: tuple) -> list:
    return [pack(a, r) for a, r in zip(kernel_A(model, st), ranks)]


def init_state(spec: MaterialSpec, F=None, t: float = 0.0,
               T: float = DEFAULT_TEMPERATURE) -> MaterialState:
    """Fresh state with every original network intact.

    A non-identity ``F`` is applied instantaneously at time ``t``; no
    transient network has formed yet.
    """
    st = make_state(I3 if F is None else F, t, T)
    hist = []
    for net in spec.networks:
        ranks = history_ranks(net.model)
        H = tuple(np.zeros(PACKED_SIZE[r]) for r in ranks)
        hist.append(NetworkHistory(1.0, H, ranks))
    return MaterialState(tuple(hist), st)


def step(state: MaterialState, spec: MaterialSpec, F_next, T_next: float,
         dt: float) -> MaterialState:
    """Advance the histories to ``F_next`` at ``t + dt``.

    Pure: ``state`` is not modified. Calling ``step`` again on the same
    committed state with a different ``F_next`` is how Newton iterations
    re-evaluate a trial deformation.
    """
    _check_dt(dt)
    nxt = make_state(F_next, state.t + dt, T_next)
    return _advance(state, spec, nxt)[0]


def _check_dt(dt: float) -> None:
    if not (np.isfinite(dt) and dt > 0.0):
        raise ValueError(f"time step must be positive, got {dt}")


def _advance(state: MaterialState, spec: MaterialSpec, nxt: DefState):
    dt = nxt.t - state.t
    hist, ws = [], []
    for net, h in zip(spec.networks, state.histories):
        upd = survival(net.kinetics, state.T, nxt.T, dt)
        ws.append(upd.w)
        if upd.w == 0.0:
            hist.append(NetworkHistory(h.gamma0, h.H, h.ranks))
            continue
        A0 = _packed_A(net.model, state.current, h.ranks)
        A1 = _packed_A(net.model, nxt, h.ranks)
        H = tuple(upd.e * Hi + upd.w * 0.5 * (a0 + a1) for Hi, a0, a1 in zip(h.H, A0, A1))
        hist.append(NetworkHistory(update_original_fraction(h.gamma0, upd), H, h.ranks))
    return MaterialState(tuple(hist), nxt), tuple(ws)


def evaluate(state: MaterialState, spec: MaterialSpec, F_now=None,
             T_now: Optional[float] = None, tangent: bool = True) -> StressResult:
    """Cauchy stress and spatial tangent for the stored histories.

    By default the state's own deformation is used; passing ``F_now``
    evaluates the frozen histories at another deformation (no time passes).
    """
    if F_now is None:
        st = state.current
    else:
        st = make_state(F_now, state.t, state.T if T_now is None else T_now)
    sigma = np.zeros((3, 3))
    h = np.zeros((3, 3, 3, 3))
    for net, hist in zip(spec.networks, state.histories):
        if hist.gamma0 != 0.0:
            sigma = sigma + hist.gamma0 * hyper_stress(net.model, st)
            if tangent:
                h = h + hist.gamma0 * hyper_tangent(net.model, st)
        if not any(np.any(Hi) for Hi in hist.H):
            continue  # no transient population yet (always so when permanent)
        H = [unpack(Hi, r) for Hi, r in zip(hist.H, hist.ranks)]
        s_net, h_net = kernel_contract(net.model, st, H, tangent=tangent)
        sigma = sigma + s_net
        h = h + h_net
    if spec.volumetric is not None:
        sigma = sigma + volumetric_stress(spec.volumetric, st)
        if tangent:
            h = h + volumetric_tangent(spec.volumetric, st)
    return StressResult(sigma, h)


def _sym_directions():
    out = []
    for k in range(3):
        for l in range(k, 3):
            D = np.zeros((3, 3))
            D[k, l] += 0.5
            D[l, k] += 0.5
            out.append((k, l, D))
    return out


_DIRECTIONS = _sym_directions()


def _history_correction(state: MaterialState, spec: MaterialSpec, nxt: DefState,
                        ws: tuple, eps: float = 1e-6) -> np.ndarray:
    """Tangent of the newest history increment ``w/2 A(F_N+1)``.

    The derivative of ``A`` along ``dF = D F`` is taken by central
    differences.
    """
    h = np.zeros((3, 3, 3, 3))
    for net, hist, w in zip(spec.networks, state.histories, ws):
        if w == 0.0:
            continue
        B, _ = kernel_B(net.model, nxt, tangent=False)
        for k, l, D in _DIRECTIONS:
            Fp = nxt.F + eps * D @ nxt.F
            Fm = nxt.F - eps * D @ nxt.F
            Ap = kernel_A(net.model, make_state(Fp))
            Am = kernel_A(net.model, make_state(Fm))
            col = sum(np.tensordot((ap - am) / (2.0 * eps), b, axes=np.ndim(ap))
                      for ap, am, b in zip(Ap, Am, B))
            h[:, :, k, l] += 0.5 * w * col
            if k != l:
                h[:, :, l, k] += 0.5 * w * col
    return h


def trial(state: MaterialState, spec: MaterialSpec, F_next, T_next: float, dt: float,
          algorithmic: bool = False):
    """Advance from a committed state and evaluate the response.

    Returns ``(new_state, StressResult)``. With ``algorithmic`` the tangent
    also accounts for the dependence of the newest history increment on
    ``F_next``.
    """
    _check_dt(dt)
    nxt = make_state(F_next, state.t + dt, T_next)
    new, ws = _advance(state, spec, nxt)
    res = evaluate(new, spec)
    if algorithmic:
        res = StressResult(res.sigma, res.tangent + _history_correction(state, spec, nxt, ws), ws)
    else:
        res = StressResult(res.sigma, res.tangent, ws)
    return new, res


# ----------------------------------------------------------------------------
# serialization
# ----------------------------------------------------------------------------

def state_to_bytes(state: MaterialState) -> bytes:
    """Little-endian binary record of a state.

    Layout: magic ``TNST``, uint32 version, uint32 network count, float64
    ``t``, ``T`` and the 9 entries of ``F`` (row major); then per network a
    float64 ``gamma0``, uint32 slot count and per slot a uint32 pair rank
    followed by its packed float64 values.
    """
    parts = [STATE_MAGIC, struct.pack("<II", STATE_VERSION, len(state.histories)),
             np.array([state.t, state.T], dtype="<f8").tobytes(),
             np.ascontiguousarray(state.F, dtype="<f8").tobytes()]
    for h in state.histories:
        parts.append(struct.pack("<dI", h.gamma0, len(h.H)))
        for Hi, r in zip(h.H, h.ranks):
            parts.append(struct.pack("<I", r))
            parts.append(np.ascontiguousarray(Hi, dtype="<f8").tobytes())
    return b"".join(parts)


def state_from_bytes(data: bytes) -> MaterialState:
    """Inverse of :func:`state_to_bytes`."""
    if data[:4] != STATE_MAGIC:
        raise ValueError("not a serialized material state")
    version, n = struct.unpack_from("<II", data, 4)
    if version != STATE_VERSION:
        raise ValueError(f"unsupported state version {version}")
    pos = 12
    t, T = np.frombuffer(data, "<f8", 2, pos)
    pos += 16
    F = np.frombuffer(data, "<f8", 9, pos).reshape(3, 3).copy()
    pos += 72
    hist = []
    for _ in range(n):
        gamma0, nslot = struct.unpack_from("<dI", data, pos)
        pos += struct.calcsize("<dI")
        H, ranks = [], []
        for _ in range(nslot):
            (r,) = struct.unpack_from("<I", data, pos)
            pos += 4
            size = PACKED_SIZE[r]
            H.append(np.frombuffer(data, "<f8", size, pos).copy())
            pos += 8 * size
            ranks.append(r)
        hist.append(NetworkHistory(gamma0, tuple(H), tuple(ranks)))
    if pos != len(data):
        raise ValueError("trailing bytes in serialized state")
    return MaterialState(tuple(hist), make_state(F, float(t), float(T)))
