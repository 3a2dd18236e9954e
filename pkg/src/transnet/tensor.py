"""Dense tensor algebra for 3x3 symmetric arguments.

Arithmetic is done on full ``numpy`` arrays. Packed vectors are only used to
store tensors with pair symmetry compactly: a symmetric second-order tensor
keeps 6 entries in Voigt order (11, 22, 33, 12, 13, 23), a tensor of two
symmetric pairs with pair-swap symmetry keeps 21 and one of three pairs keeps
56. Packed entries follow the lexicographic order of sorted Voigt-index
multisets.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

VOIGT_PAIRS = ((0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2))
_PAIR_INDEX = np.array([[0, 3, 4], [3, 1, 5], [4, 5, 2]])

I3 = np.eye(3)
# II_ijkl = d_ik d_jl + d_il d_jk
II = np.einsum("ik,jl->ijkl", I3, I3) + np.einsum("il,jk->ijkl", I3, I3)
# symmetric identity, II / 2
SYM_I4 = 0.5 * II

PACKED_SIZE = {0: 1, 1: 6, 2: 21, 3: 56}


@dataclass(frozen=True)
class PackMap:
    """Index bookkeeping for a tensor made of ``npairs`` symmetric pairs."""

    npairs: int
    combos: tuple  # sorted Voigt-index tuples, one per packed entry
    index_map: np.ndarray  # full multi-index -> packed position
    representatives: tuple  # one full multi-index per packed entry
    multiplicity: np.ndarray  # number of full entries per packed entry
    summation: np.ndarray  # (n_packed, 3**(2*npairs)) 0/1 class matrix

    @property
    def size(self) -> int:
        return len(self.combos)


@lru_cache(maxsize=None)
def pack_map(npairs: int) -> PackMap:
    """Return the (cached) packing map for ``npairs`` in 1..3."""
    if npairs not in (1, 2, 3):
        raise ValueError(f"npairs must be 1, 2 or 3, got {npairs}")
    combos = tuple(itertools.combinations_with_replacement(range(6), npairs))
    lookup = {c: n for n, c in enumerate(combos)}
    shape = (3,) * (2 * npairs)
    index_map = np.empty(shape, dtype=np.intp)
    for idx in np.ndindex(*shape):
        key = tuple(sorted(_PAIR_INDEX[idx[2 * k], idx[2 * k + 1]] for k in range(npairs)))
        index_map[idx] = lookup[key]
    reps = tuple(tuple(i for p in c for i in VOIGT_PAIRS[p]) for c in combos)
    flat = index_map.ravel()
    multiplicity = np.bincount(flat, minlength=len(combos))
    summation = np.zeros((len(combos), flat.size))
    summation[flat, np.arange(flat.size)] = 1.0
    index_map.setflags(write=False)
    multiplicity.setflags(write=False)
    summation.setflags(write=False)
    return PackMap(npairs, combos, index_map, reps, multiplicity, summation)


def pack(full: np.ndarray, npairs: int) -> np.ndarray:
    """Pack a pair-symmetric tensor (trailing ``2*npairs`` axes of size 3).

    Entries are read from one canonical representative of each symmetry
    class; the input is assumed to already carry the symmetry.
    """
    full = np.asarray(full, dtype=float)
    if npairs == 0:
        return np.reshape(full, full.shape + (1,))
    pm = pack_map(npairs)
    order = 2 * npairs
    if full.shape[full.ndim - order:] != (3,) * order:
        raise ValueError(f"expected trailing shape {(3,) * order}, got {full.shape}")
    cols = tuple(np.array(ax) for ax in zip(*pm.representatives))
    return full[(Ellipsis,) + cols]


def unpack(packed: np.ndarray, npairs: int) -> np.ndarray:
    """Inverse of :func:`pack`; the result is exactly symmetric."""
    packed = np.asarray(packed, dtype=float)
    if npairs == 0:
        return packed[..., 0]
    pm = pack_map(npairs)
    if packed.shape[-1] != pm.size:
        raise ValueError(f"expected {pm.size} packed entries, got {packed.shape[-1]}")
    return packed[..., pm.index_map]


def contract_packed(packed: np.ndarray, B: np.ndarray, npairs: int) -> np.ndarray:
    """Full contraction of a packed tensor with the leading axes of ``B``.

    Equivalent to ``tensordot(unpack(packed), B, 2*npairs)``; each packed
    entry multiplies the sum of ``B`` over its symmetry class.
    """
    if npairs == 0:
        return packed[0] * B
    pm = pack_map(npairs)
    n = 3 ** (2 * npairs)
    rest = B.shape[2 * npairs:]
    grouped = pm.summation @ B.reshape((n, -1))
    return (packed @ grouped).reshape(rest)


def sym(A: np.ndarray) -> np.ndarray:
    """Symmetric part over the last two axes."""
    return 0.5 * (A + np.swapaxes(A, -1, -2))


def rotate(T: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Apply ``Q`` to every index: ``T'_{I..} = Q_{Ii} ... T_{i..}``."""
    for _ in range(T.ndim):
        T = np.tensordot(T, Q, axes=([0], [1]))
    return T


# ----------------------------------------------------------------------------
# spectral decomposition
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Spectral:
    """Eigen-decomposition ``C = sum_a x_a N_a (x) N_a`` with ``x_a = lambda_a**2``.

    Attributes
    ----------
    eigenvalues : ndarray (3,)
        Squared principal stretches, descending.
    vectors : ndarray (3, 3)
        Orthonormal eigenvectors as columns.
    coincident : ndarray (3, 3) of bool
        ``coincident[a, b]`` marks pairs whose relative gap is below ``tol``.
    tol : float
        Relative-gap threshold used to flag coincident eigenvalues.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    coincident: np.ndarray
    tol: float

    @property
    def stretches(self) -> np.ndarray:
        return np.sqrt(self.eigenvalues)

    @property
    def bases(self) -> np.ndarray:
        """Eigenbases ``M_a = N_a (x) N_a`` stacked on the first axis."""
        N = self.vectors
        return np.einsum("ia,ja->aij", N, N)

    @property
    def pattern(self) -> str:
        n = int(np.count_nonzero(np.triu(self.coincident, 1)))
        return "distinct" if n == 0 else ("all-equal" if n == 3 else "two-equal")

    def function(self, values: np.ndarray) -> np.ndarray:
        """``sum_a values[a] M_a``."""
        N = self.vectors
        return (N * values) @ N.T

    def reconstruct(self) -> np.ndarray:
        return self.function(self.eigenvalues)


def spectral_decompose(C: np.ndarray, tol: float = 1e-8) -> Spectral:
    """Spectral decomposition of a symmetric positive-definite 3x3 tensor.

    Parameters
    ----------
    C : array_like (3, 3)
        Symmetric positive-definite tensor, usually a right Cauchy-Green tensor.
    tol : float
        Relative eigenvalue gap ``|x_a - x_b| / max(x_a, x_b)`` below which a
        pair is flagged as coincident.

    Raises
    ------
    ValueError
        If ``C`` is not finite, not symmetric or not positive definite.
    """
    C = np.asarray(C, dtype=float)
    if C.shape != (3, 3):
        raise ValueError(f"expected a 3x3 tensor, got shape {C.shape}")
    if not np.all(np.isfinite(C)):
        raise ValueError("tensor has non-finite entries")
    scale = np.max(np.abs(C))
    if np.max(np.abs(C - C.T)) > 1e-10 * scale:
        raise ValueError("tensor is not symmetric")
    w, Q = np.linalg.eigh(sym(C))
    if w[0] <= 0.0:
        raise ValueError(f"tensor is not positive definite (smallest eigenvalue {w[0]:.3e})")
    w, Q = w[::-1].copy(), Q[:, ::-1].copy()
    gap = np.abs(w[:, None] - w[None, :]) <= tol * np.maximum(w[:, None], w[None, :])
    return Spectral(w, Q, gap, tol)


# ----------------------------------------------------------------------------
# Seth-Hill strains and their derivatives
# ----------------------------------------------------------------------------

def _strain_value(x, alpha: float):
    """e(x) = (x**alpha - 1) / (2 alpha), or ln(x) / 2 when alpha = 0."""
    x = np.asarray(x, dtype=float)
    if alpha == 0.0:
        return 0.5 * np.log(x)
    return np.expm1(alpha * np.log(x)) / (2.0 * alpha)


def _strain_derivative(x: float, alpha: float, k: int) -> float:
    """k-th derivative of e(x), k >= 1."""
    c = 0.5
    for j in range(1, k):
        c *= alpha - j
    return c * x ** (alpha - k)


def _dd1(x: float, y: float, alpha: float) -> float:
    """First divided difference e[x, y] without cancellation."""
    if x == y:
        return _strain_derivative(x, alpha, 1)
    r = np.log1p((x - y) / y)
    if alpha == 0.0:
        return r / (2.0 * (x - y))
    return y**alpha * np.expm1(alpha * r) / (2.0 * alpha * (x - y))


def _complete_homogeneous(m: int, u: float, v: float, w: float) -> float:
    total = 0.0
    for i in range(m + 1):
        for j in range(m - i + 1):
            total += u**i * v**j * w ** (m - i - j)
    return total


_TAYLOR_SPREAD = 1e-3
_TAYLOR_TERMS = 16


def _dd2(x: float, y: float, z: float, alpha: float) -> float:
    """Second divided difference e[x, y, z].

    Clustered arguments use a Taylor expansion about their mean; otherwise the
    recursive definition is applied with the widest pair as denominator.
    """
    if alpha == 1.0:
        return 0.0
    a, b, c = sorted((x, y, z), reverse=True)
    if a - c <= _TAYLOR_SPREAD * a:
        m = (a + b + c) / 3.0
        u, v, w = a - m, b - m, c - m
        total, fact = 0.0, 2.0
        for k in range(2, _TAYLOR_TERMS + 2):
            if k > 2:
                fact *= k
            total += _strain_derivative(m, alpha, k) / fact * _complete_homogeneous(k - 2, u, v, w)
        return total
    return (_dd1(a, b, alpha) - _dd1(b, c, alpha)) / (a - c)


def seth_hill_strain(spec: Spectral, alpha: float) -> np.ndarray:
    """Seth-Hill strain ``E = (U**(2 alpha) - I) / (2 alpha)`` (log strain at 0)."""
    return spec.function(_strain_value(spec.eigenvalues, alpha))


def generalized_stretch(spec: Spectral, alpha: float) -> np.ndarray:
    """``U**(2 alpha) = sum_a lambda_a**(2 alpha) M_a``."""
    return spec.function(spec.eigenvalues**alpha)


@dataclass(frozen=True)
class ProjectionCoefficients:
    """Spectral coefficients of the first and second strain derivatives.

    ``d[a]`` and ``f[a]`` are the diagonal values, ``v[a, b]`` the mixed
    first-order coefficients, ``xi[a, b]`` the second-order coefficients with
    one repeated index and ``eta`` the fully mixed one.
    """

    d: np.ndarray
    f: np.ndarray
    v: np.ndarray
    xi: np.ndarray
    eta: float

    def first_table(self) -> np.ndarray:
        """g1[a, b] = e[x_a, x_b] (diagonal d_a / 2)."""
        return self.v

    def second_table(self) -> np.ndarray:
        """g2[a, b, c] = e[x_a, x_b, x_c], fully symmetric."""
        g = np.empty((3, 3, 3))
        for idx in np.ndindex(3, 3, 3):
            a, b, c = idx
            if a == b == c:
                g[idx] = self.f[a] / 8.0
            elif a != b and b != c and a != c:
                g[idx] = self.eta
            else:
                # two equal: xi[lone, repeated]
                rep = a if (a == b or a == c) else b
                lone = ({a, b, c} - {rep}).pop()
                g[idx] = self.xi[lone, rep]
        return g


def projection_coefficients(spec: Spectral, alpha: float) -> ProjectionCoefficients:
    """Coefficients for ``P`` and ``L`` with limit values on coincident pairs.

    Limit values are evaluated at the centroid of the coincident arguments so
    that switching between branches changes results only at second order in
    the eigenvalue gap.
    """
    x = spec.eigenvalues
    same = spec.coincident
    d = x ** (alpha - 1.0)
    f = 2.0 * (alpha - 1.0) * x ** (alpha - 2.0)
    v = np.diag(0.5 * d)
    xi = np.diag(f / 8.0)
    for a in range(3):
        for b in range(3):
            if a == b:
                continue
            if same[a, b]:
                m = 0.5 * (x[a] + x[b])
                v[a, b] = 0.5 * m ** (alpha - 1.0)
                c = (x[a] + 2.0 * x[b]) / 3.0
                xi[a, b] = 0.25 * (alpha - 1.0) * c ** (alpha - 2.0)
            else:
                v[a, b] = _dd1(x[a], x[b], alpha)
                xi[a, b] = _dd2(x[a], x[b], x[b], alpha)
    pattern = spec.pattern
    if pattern == "distinct":
        eta = _dd2(x[0], x[1], x[2], alpha)
    elif pattern == "all-equal":
        eta = 0.25 * (alpha - 1.0) * np.mean(x) ** (alpha - 2.0)
    else:
        # one coincident pair (a, b) and a lone index c: eta -> xi[c, a]
        a, b = [(i, j) for i in range(3) for j in range(i + 1, 3) if same[i, j]][0]
        c = 3 - a - b
        m = 0.5 * (x[a] + x[b])
        eta = _dd2(x[c], m, m, alpha)
    return ProjectionCoefficients(d, f, v, xi, float(eta))


# S[i, j, m, n]: components (m, n) of the symmetric unit direction (i, j)
_SYM_UNIT = 0.5 * (np.einsum("im,jn->ijmn", I3, I3) + np.einsum("in,jm->ijmn", I3, I3))


def projection_P(spec: Spectral, alpha: float) -> np.ndarray:
    """Fourth-order ``P = 2 dE/dC`` of the Seth-Hill strain of order ``alpha``.

    In the eigenbasis ``P = sum_a d_a M_a (x) M_a + sum_{a != b} v_ab G_ab``
    where ``G_ab`` is the symmetrised ``M_a (x) M_b`` product.
    """
    g1 = projection_coefficients(spec, alpha).first_table()
    Pe = 2.0 * g1[:, :, None, None] * _SYM_UNIT.transpose(2, 3, 0, 1)
    return rotate(Pe, spec.vectors)


def projection_L(spec: Spectral, alpha: float) -> np.ndarray:
    """Sixth-order ``L = 4 d^2E/dCdC`` of the Seth-Hill strain.

    The result has full symmetry and can be stored with ``pack(L, 3)``.
    """
    g2 = projection_coefficients(spec, alpha).second_table()
    S = _SYM_UNIT
    Le = np.einsum("mcn,ijmc,klcn->mnijkl", g2, S, S)
    Le = 4.0 * (Le + Le.transpose(0, 1, 4, 5, 2, 3))
    return rotate(Le, spec.vectors)
