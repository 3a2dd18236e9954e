"""Hyperelastic network models and their separable hereditary kernels.

Each model provides

* the Cauchy stress, spatial tangent and strain energy of a network that was
  formed in the undeformed configuration (``hyper_*``),
* a factorisation of the stress of a network formed at time ``s`` into
  history values ``A(s)`` and current-state factors ``B(t)`` so that
  ``sum_i A_i(s) : B_i(t)`` is that network's Cauchy stress (``kernel_*``).
  Tangent factors are aligned with the same history slots.

The spatial tangent ``h`` is the Piola push-forward of ``4 d^2W/dCdC`` so that
``h : d = J**-1 F dS F^T`` for a rate of deformation ``d``.

Stress-like functions accept batched states (leading axes on ``F``); tangent
functions expect a single state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .kinematics import DefState, make_state
from .tensor import I3, II, projection_L, projection_P, rotate

DD = np.einsum("ij,kl->ijkl", I3, I3)


def _finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ValueError(f"parameter {name} must be finite, got {value}")


@dataclass(frozen=True)
class NeoHookean:
    """Compressible neo-Hookean network with Lame constants ``lam`` and ``mu``."""

    lam: float
    mu: float

    def __post_init__(self):
        _finite("lam", self.lam)
        _finite("mu", self.mu)
        if self.mu <= 0.0:
            raise ValueError(f"parameter mu must be positive, got {self.mu}")
        if self.lam < 0.0:
            raise ValueError(f"parameter lam must be non-negative, got {self.lam}")


@dataclass(frozen=True)
class BlatzKo:
    """Generalised Blatz-Ko network with mixing fraction ``f`` in [0, 1]."""

    f: float
    mu: float
    beta: float

    def __post_init__(self):
        for name in ("f", "mu", "beta"):
            _finite(name, getattr(self, name))
        if not 0.0 <= self.f <= 1.0:
            raise ValueError(f"parameter f must lie in [0, 1], got {self.f}")
        if self.mu <= 0.0:
            raise ValueError(f"parameter mu must be positive, got {self.mu}")
        if self.beta <= 0.0:
            raise ValueError(f"parameter beta must be positive, got {self.beta}")


@dataclass(frozen=True)
class OgdenTerm:
    """One term ``mu/(2 alpha) (tr U**(2 alpha) - 3 + (J**(-2 alpha beta) - 1)/beta)``."""

    mu: float
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("mu", "alpha", "beta"):
            _finite(name, getattr(self, name))
        if self.alpha == 0.0:
            raise ValueError("parameter alpha must be non-zero")
        if self.beta <= 0.0:
            raise ValueError(f"parameter beta must be positive, got {self.beta}")


@dataclass(frozen=True)
class OgdenHill:
    """Compressible Ogden-Hill network made of one or more terms."""

    terms: tuple

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise ValueError("an Ogden-Hill network needs at least one term")
        if not all(isinstance(t, OgdenTerm) for t in terms):
            raise TypeError("terms must be OgdenTerm instances")
        object.__setattr__(self, "terms", terms)


@dataclass(frozen=True)
class Yeoh:
    """Isochoric Yeoh network ``W = c1 I + c2 I**2 + c3 I**3 + c4``.

    ``I`` is the first invariant of the isochoric right Cauchy-Green tensor
    and ``c4`` makes the energy vanish at the reference state. Use
    :meth:`from_b` for the ``sum b_n (I - 3)**n`` parameterisation.
    """

    c1: float
    c2: float = 0.0
    c3: float = 0.0

    def __post_init__(self):
        for name in ("c1", "c2", "c3"):
            _finite(name, getattr(self, name))

    @classmethod
    def from_b(cls, b1: float, b2: float = 0.0, b3: float = 0.0) -> "Yeoh":
        return cls(b1 - 6.0 * b2 + 27.0 * b3, b2 - 9.0 * b3, b3)

    @property
    def c4(self) -> float:
        return -(3.0 * self.c1 + 9.0 * self.c2 + 27.0 * self.c3)

    @property
    def orders(self) -> tuple:
        """Polynomial orders with a non-zero coefficient."""
        return tuple(n for n, c in ((1, self.c1), (2, self.c2), (3, self.c3)) if c != 0.0)

    def g1(self, I):
        """dW/dI."""
        return self.c1 + 2.0 * self.c2 * I + 3.0 * self.c3 * I * I

    def g2(self, I):
        """d^2W/dI^2."""
        return 2.0 * self.c2 + 6.0 * self.c3 * I


@dataclass(frozen=True)
class Volumetric:
    """Shared volumetric response ``K/2 (J - 1)**2``."""

    K: float

    def __post_init__(self):
        _finite("K", self.K)
        if self.K <= 0.0:
            raise ValueError(f"bulk modulus K must be positive, got {self.K}")


ModelSpec = Union[NeoHookean, BlatzKo, OgdenHill, Yeoh]


def ogden_blatzko_map(f: float, mu: float, beta: float) -> OgdenHill:
    """Ogden-Hill terms reproducing a generalised Blatz-Ko network."""
    BlatzKo(f, mu, beta)  # validation
    terms = []
    if f > 0.0:
        terms.append(OgdenTerm(f * mu, 1.0, 0.5 * beta))
    if f < 1.0:
        terms.append(OgdenTerm(-(1.0 - f) * mu, -1.0, 0.5 * beta))
    return OgdenHill(tuple(terms))


# ----------------------------------------------------------------------------
# helpers
# ----------------------------------------------------------------------------

def _col(x):
    """Broadcast a (batched) scalar against 3x3 tensors."""
    x = np.asarray(x)
    return x[..., None, None] if x.ndim else x


def _sym_power(C: np.ndarray, p: float) -> np.ndarray:
    """``C**p`` for (batched) symmetric positive-definite ``C``."""
    w, Q = np.linalg.eigh(C)
    return (Q * (w**p)[..., None, :]) @ np.swapaxes(Q, -1, -2)


def _trace(A):
    return np.trace(A, axis1=-2, axis2=-1)


def _push_pair(T: np.ndarray, F: np.ndarray) -> np.ndarray:
    """``T_{..KL} -> F_iK F_jL T_{..KL}`` on the last two axes."""
    return np.einsum("...KL,iK,jL->...ij", T, F, F, optimize=True)


def _outer(*ts):
    out = ts[0]
    for t in ts[1:]:
        out = np.multiply.outer(out, t)
    return out


# ----------------------------------------------------------------------------
# original network: stress, energy, tangent
# ----------------------------------------------------------------------------

def hyper_stress(model: ModelSpec, st: DefState) -> np.ndarray:
    """Cauchy stress of a network formed in the undeformed configuration.

    Yeoh networks return the deviatoric part only; the volumetric response is
    added once per material.
    """
    J = _col(st.J)
    if isinstance(model, NeoHookean):
        return (model.mu * (st.b - I3) + model.lam * np.log(J) * I3) / J
    if isinstance(model, BlatzKo):
        f, mu, beta = model.f, model.mu, model.beta
        return (f * mu * st.b - (1.0 - f) * mu * st.binv
                - mu * (f * J**-beta - (1.0 - f) * J**beta) * I3) / J
    if isinstance(model, OgdenHill):
        F, FT = st.F, np.swapaxes(st.F, -1, -2)
        out = 0.0
        for term in model.terms:
            ba = F @ _sym_power(st.C, term.alpha - 1.0) @ FT
            out = out + term.mu / J * (ba - J ** (-2.0 * term.alpha * term.beta) * I3)
        return out
    if isinstance(model, Yeoh):
        iso = st.iso
        I = iso.I1bar
        dev = iso.bbar - _col(I / 3.0) * I3
        return 2.0 / J * _col(model.g1(I)) * dev
    raise TypeError(f"unknown model {model!r}")


def strain_energy(model: ModelSpec, st: DefState):
    """Strain energy per unit reference volume."""
    J = np.asarray(st.J)
    lnJ = np.log(J)
    if isinstance(model, NeoHookean):
        I1 = _trace(st.C)
        return 0.5 * model.mu * (I1 - 3.0 - 2.0 * lnJ) + 0.5 * model.lam * lnJ**2
    if isinstance(model, BlatzKo):
        f, mu, beta = model.f, model.mu, model.beta
        I1, J2 = _trace(st.C), _trace(st.Cinv)
        return (0.5 * f * mu * (I1 - 3.0 + 2.0 / beta * (J**-beta - 1.0))
                + 0.5 * (1.0 - f) * mu * (J2 - 3.0 + 2.0 / beta * (J**beta - 1.0)))
    if isinstance(model, OgdenHill):
        w = np.linalg.eigvalsh(st.C)
        out = 0.0
        for t in model.terms:
            trU = np.sum(w**t.alpha, axis=-1)
            out = out + t.mu / (2.0 * t.alpha) * (
                trU - 3.0 + (J ** (-2.0 * t.alpha * t.beta) - 1.0) / t.beta)
        return out
    if isinstance(model, Yeoh):
        I = st.iso.I1bar
        return ((model.c3 * I + model.c2) * I + model.c1) * I + model.c4
    raise TypeError(f"unknown model {model!r}")


def transient_energy(model: ModelSpec, at_t: DefState, at_s: DefState):
    """Energy per unit reference volume stored in a network formed at ``s``.

    Equals ``J(s) W`` evaluated at the relative deformation; ``at_s`` may be
    batched.
    """
    if isinstance(model, OgdenHill):
        Js, Jt = np.asarray(at_s.J), float(at_t.J)
        Jr = Jt / Js
        out = 0.0
        for t in model.terms:
            Ut = _sym_power(at_t.C, t.alpha)
            Us = _sym_power(at_s.C, -t.alpha)
            trU = np.einsum("ij,...ij->...", Ut, Us)
            out = out + t.mu / (2.0 * t.alpha) * (
                trU - 3.0 + (Jr ** (-2.0 * t.alpha * t.beta) - 1.0) / t.beta)
        return Js * out
    rel = DefState(at_t.F @ at_s.Finv)
    return np.asarray(at_s.J) * strain_energy(model, rel)


def hyper_tangent(model: ModelSpec, st: DefState) -> np.ndarray:
    """Spatial tangent of a network formed in the undeformed configuration."""
    J = float(st.J)
    if isinstance(model, NeoHookean):
        lnJ = math.log(J)
        return (model.lam * DD + (model.mu - model.lam * lnJ) * II) / J
    if isinstance(model, BlatzKo):
        f, mu, beta = model.f, model.mu, model.beta
        bi = st.binv
        m = (np.einsum("ik,jl->ijkl", bi, I3) + np.einsum("jk,il->ijkl", bi, I3)
             + np.einsum("il,jk->ijkl", bi, I3) + np.einsum("jl,ik->ijkl", bi, I3))
        a, c = f * J ** (-beta - 1.0), (1.0 - f) * J ** (beta - 1.0)
        return (1.0 - f) * mu / J * m + mu * beta * (a + c) * DD + mu * (a - c) * II
    if isinstance(model, OgdenHill):
        # a network formed in the undeformed state: history values at F = I
        return kernel_contract(model, st, kernel_A(model, make_state(I3)))[1]
    if isinstance(model, Yeoh):
        iso = st.iso
        I, bb = float(iso.I1bar), iso.bbar
        dev = bb - I / 3.0 * I3
        g1, g2 = model.g1(I), model.g2(I)
        bd = np.multiply.outer(bb, I3) + np.multiply.outer(I3, bb)
        return (4.0 * g2 * np.multiply.outer(dev, dev)
                + 4.0 * g1 / 3.0 * (0.5 * I * II - bd + I / 3.0 * DD)) / J
    raise TypeError(f"unknown model {model!r}")


def volumetric_stress(vol: Volumetric, st: DefState) -> np.ndarray:
    return _col(vol.K * (np.asarray(st.J) - 1.0)) * I3


def volumetric_tangent(vol: Volumetric, st: DefState) -> np.ndarray:
    J = float(st.J)
    p = vol.K * (J - 1.0)
    return (p + vol.K * J) * DD - p * II


def volumetric_energy(vol: Volumetric, st: DefState):
    return 0.5 * vol.K * (np.asarray(st.J) - 1.0) ** 2


# ----------------------------------------------------------------------------
# separable kernels
# ----------------------------------------------------------------------------

def history_ranks(model: ModelSpec) -> tuple:
    """Number of symmetric index pairs of each history slot (0 = scalar)."""
    if isinstance(model, NeoHookean):
        return (1, 0, 0)
    if isinstance(model, BlatzKo):
        return (1, 1, 0, 0)
    if isinstance(model, OgdenHill):
        return tuple(r for _ in model.terms for r in (1, 0))
    if isinstance(model, Yeoh):
        return model.orders
    raise TypeError(f"unknown model {model!r}")


def kernel_A(model: ModelSpec, st: DefState) -> list:
    """History values of a network formed in state ``st`` (full arrays)."""
    J = np.asarray(st.J)
    Jc = _col(J)
    if isinstance(model, NeoHookean):
        return [Jc * st.Cinv, J, J * np.log(J)]
    if isinstance(model, BlatzKo):
        return [Jc * st.Cinv, Jc * st.C, J ** (1.0 + model.beta), J ** (1.0 - model.beta)]
    if isinstance(model, OgdenHill):
        out = []
        for t in model.terms:
            out.append(Jc * _sym_power(st.C, -t.alpha))
            out.append(J ** (2.0 * t.alpha * t.beta + 1.0))
        return out
    if isinstance(model, Yeoh):
        Ci = st.iso.Cbar_inv
        out = []
        for n in model.orders:
            a = Ci
            for _ in range(n - 1):
                a = a[..., None, None] * Ci.reshape(Ci.shape[:-2] + (1,) * (a.ndim - Ci.ndim) + (3, 3))
            out.append(J.reshape(J.shape + (1,) * (2 * n)) * a)
        return out
    raise TypeError(f"unknown model {model!r}")


def kernel_B(model: ModelSpec, st: DefState, tangent: bool = True) -> tuple:
    """Current-state factors for stress and tangent, aligned with ``kernel_A``.

    Returns
    -------
    B : list of ndarray
        Stress factors with shape ``A.shape + (3, 3)``.
    T : list of ndarray or None
        Tangent factors with shape ``A.shape + (3, 3, 3, 3)``; ``None`` marks a
        slot without tangent contribution. Empty when ``tangent`` is False.
    """
    J = float(st.J)
    F = st.F
    B, T = [], []
    if isinstance(model, NeoHookean):
        mu, lam = model.mu, model.lam
        lnJ = math.log(J)
        B = [mu / J * np.einsum("iM,jN->MNij", F, F),
             (lam * lnJ - mu) / J * I3,
             -lam / J * I3]
        if tangent:
            T = [None, (lam * DD + (mu - lam * lnJ) * II) / J, lam / J * II]
        return B, T
    if isinstance(model, BlatzKo):
        f, mu, beta = model.f, model.mu, model.beta
        Fi = st.Finv
        B = [f * mu / J * np.einsum("iM,jN->MNij", F, F),
             -(1.0 - f) * mu / J * np.einsum("Mi,Nj->MNij", Fi, Fi),
             -f * mu * J ** (-beta - 1.0) * I3,
             (1.0 - f) * mu * J ** (beta - 1.0) * I3]
        if tangent:
            m = (np.einsum("Mi,Nk,jl->MNijkl", Fi, Fi, I3) + np.einsum("Mj,Nk,il->MNijkl", Fi, Fi, I3)
                 + np.einsum("Mi,Nl,jk->MNijkl", Fi, Fi, I3) + np.einsum("Mj,Nl,ik->MNijkl", Fi, Fi, I3))
            a, c = f * mu * J ** (-beta - 1.0), (1.0 - f) * mu * J ** (beta - 1.0)
            T = [None, (1.0 - f) * mu / J * m, beta * a * DD + a * II, beta * c * DD - c * II]
        return B, T
    if isinstance(model, OgdenHill):
        spec = st.spectral
        for t in model.terms:
            mu, al, be = t.mu, t.alpha, t.beta
            Jd = J ** (-2.0 * al * be - 1.0)
            B.append(mu / J * _push_pair(projection_P(spec, al), F))
            B.append(-mu * Jd * I3)
            if tangent:
                L = projection_L(spec, al)
                T.append(mu / J * np.einsum("MNOPQR,iO,jP,kQ,lR->MNijkl", L, F, F, F, F,
                                            optimize=True))
                T.append(2.0 * al * be * mu * Jd * DD + mu * Jd * II)
        return B, T
    if isinstance(model, Yeoh):
        iso = st.iso
        Fb, Cb = iso.Fbar, iso.Cbar
        FF = np.einsum("iM,jN->MNij", Fb, Fb)
        CD = np.multiply.outer(Cb, I3)
        for n in model.orders:
            if n == 1:
                c = model.c1
                B.append(2.0 * c / J * (FF - CD / 3.0))
                if tangent:
                    FFd = np.multiply.outer(FF, I3)
                    T.append(4.0 * c / J * (
                        -FFd / 3.0
                        - np.einsum("kM,lN,ij->MNijkl", Fb, Fb, I3) / 3.0
                        + _outer(Cb, I3, I3) / 9.0
                        + _outer(Cb, II) / 6.0))
            elif n == 2:
                c = model.c2
                B.append(4.0 * c / J * (np.einsum("MNij,OP->MNOPij", FF, Cb)
                                        - _outer(Cb, Cb, I3) / 3.0))
                if tangent:
                    T.append(4.0 * c / J * (
                        2.0 * np.einsum("MNij,OPkl->MNOPijkl", FF, FF)
                        - 4.0 / 3.0 * np.einsum("MNij,kl,OP->MNOPijkl", FF, I3, Cb)
                        - 4.0 / 3.0 * np.einsum("MNkl,ij,OP->MNOPijkl", FF, I3, Cb)
                        + 4.0 / 9.0 * _outer(Cb, Cb, I3, I3)
                        + _outer(Cb, Cb, II) / 3.0))
            else:
                c = model.c3
                B.append(6.0 * c / J * (np.einsum("MNij,OP,QR->MNOPQRij", FF, Cb, Cb)
                                        - _outer(Cb, Cb, Cb, I3) / 3.0))
                if tangent:
                    CC = _outer(Cb, Cb)
                    T.append(4.0 * c / J * (
                        6.0 * np.einsum("MNij,OPkl,QR->MNOPQRijkl", FF, FF, Cb, optimize=True)
                        - 3.0 * np.einsum("MNij,kl,OPQR->MNOPQRijkl", FF, I3, CC, optimize=True)
                        - 3.0 * np.einsum("MNkl,ij,OPQR->MNOPQRijkl", FF, I3, CC, optimize=True)
                        + _outer(Cb, Cb, Cb, DD + 0.5 * II)))
        return B, T
    raise TypeError(f"unknown model {model!r}")


def kernel_stress(A: list, B: list) -> np.ndarray:
    """``sum_i A_i : B_i`` for full-array history values."""
    return sum(np.tensordot(a, b, axes=np.ndim(a)) for a, b in zip(A, B))


def kernel_tangent(A: list, T: list) -> np.ndarray:
    """``sum_i A_i : T_i`` skipping slots without tangent factor."""
    out = np.zeros((3, 3, 3, 3))
    for a, t in zip(A, T):
        if t is not None:
            out = out + np.tensordot(a, t, axes=np.ndim(a))
    return out


def _push4(G: np.ndarray, F: np.ndarray) -> np.ndarray:
    """``F_iM F_jN F_kO F_lP G_MNOP``."""
    return rotate(G, F)


# Yeoh tangent coefficients per order: (four-fold push, pair x delta, delta delta, II)
_YEOH_TANGENT = {1: (0.0, -1.0 / 3.0, 1.0 / 9.0, 1.0 / 6.0),
                 2: (2.0, -4.0 / 3.0, 4.0 / 9.0, 1.0 / 3.0),
                 3: (6.0, -3.0, 1.0, 0.5)}


def kernel_contract(model: ModelSpec, st: DefState, H: list, tangent: bool = True):
    """Stress and tangent ``sum_i H_i : B_i`` and ``sum_i H_i : T_i``.

    Gives the same result as contracting with the factors of
    :func:`kernel_B`, but Yeoh and Ogden-Hill histories are first reduced
    against the current-state tensors so the high-order factors are never
    formed.
    """
    J = float(st.J)
    if isinstance(model, Yeoh):
        iso = st.iso
        Fb, Cb = iso.Fbar, iso.Cbar
        sigma = np.zeros((3, 3))
        h = np.zeros((3, 3, 3, 3))
        for n, G in zip(model.orders, H):
            c = (model.c1, model.c2, model.c3)[n - 1]
            reduced = [G]
            while reduced[-1].ndim > 2:
                reduced.append(np.tensordot(reduced[-1], Cb, axes=2))
            g1 = reduced[-1]
            s0 = float(np.tensordot(g1, Cb, axes=2))
            pg = Fb @ g1 @ Fb.T
            sigma = sigma + 2.0 * n * c / J * (pg - s0 / 3.0 * I3)
            if tangent:
                a4, a2, add, aii = _YEOH_TANGENT[n]
                term = a2 * (np.multiply.outer(pg, I3) + np.multiply.outer(I3, pg))
                term = term + s0 * (add * DD + aii * II)
                if n >= 2:
                    term = term + a4 * _push4(reduced[-2], Fb)
                h = h + 4.0 * c / J * term
        return sigma, h
    if isinstance(model, OgdenHill):
        spec = st.spectral
        F = st.F
        sigma = np.zeros((3, 3))
        h = np.zeros((3, 3, 3, 3))
        for k, t in enumerate(model.terms):
            mu, al, be = t.mu, t.alpha, t.beta
            Htr, Hdet = H[2 * k], float(H[2 * k + 1])
            Jd = J ** (-2.0 * al * be - 1.0)
            P = projection_P(spec, al)
            sigma = sigma + mu / J * F @ np.tensordot(Htr, P, axes=2) @ F.T - mu * Jd * Hdet * I3
            if tangent:
                G = np.tensordot(Htr, projection_L(spec, al), axes=2)
                h = h + mu / J * _push4(G, F) + Hdet * (2.0 * al * be * mu * Jd * DD + mu * Jd * II)
        return sigma, h
    B, T = kernel_B(model, st, tangent=tangent)
    sigma = kernel_stress(H, B)
    h = kernel_tangent(H, T) if tangent else np.zeros((3, 3, 3, 3))
    return sigma, h
