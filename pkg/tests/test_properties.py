"""Property-based checks over generated inputs."""
import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from transnet.engine import (MaterialSpec, Network, evaluate, init_state, state_from_bytes,
                             state_to_bytes, step)
from transnet.kinematics import make_state, relative_b, relative_gradient, relative_invariants
from transnet.kinetics import ConstantRate, survival
from transnet.materials import hyper_stress
from transnet.tensor import contract_packed, pack, pack_map, spectral_decompose, unpack

from cases import MODEL_IDS, MODELS, mixed_materials

finite = st.floats(-10.0, 10.0, allow_nan=False, allow_infinity=False)
log_stretch = st.floats(math.log(0.25), math.log(4.0))
axis_angle = arrays(float, 3, elements=st.floats(-math.pi, math.pi))


def _rotation(v):
    """Rodrigues formula for the rotation vector ``v``."""
    th = float(np.linalg.norm(v))
    if th == 0.0:
        return np.eye(3)
    k = v / th
    K = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    return np.eye(3) + math.sin(th) * K + (1.0 - math.cos(th)) * K @ K


@st.composite
def gradients(draw):
    lam = np.exp(np.array([draw(log_stretch) for _ in range(3)]))
    return _rotation(draw(axis_angle)) @ np.diag(lam) @ _rotation(draw(axis_angle))


@given(st.integers(1, 3), st.data())
def test_pack_round_trip(npairs, data):
    size = pack_map(npairs).size
    v = data.draw(arrays(float, size, elements=finite))
    assert np.array_equal(pack(unpack(v, npairs), npairs), v)


@given(st.integers(1, 3), st.data())
def test_packed_contraction(npairs, data):
    size = pack_map(npairs).size
    v = data.draw(arrays(float, size, elements=finite))
    B = data.draw(arrays(float, (3,) * (2 * npairs), elements=finite))
    full = np.tensordot(unpack(v, npairs), B, 2 * npairs)
    scale = np.abs(v).max() * np.abs(B).max() * 3 ** (2 * npairs) + 1e-300
    assert abs(contract_packed(v, B, npairs) - full) <= 1e-13 * scale


@given(gradients())
def test_spectral_reconstruction(F):
    C = F.T @ F
    sp = spectral_decompose(C)
    assert np.all(np.diff(sp.eigenvalues) <= 0.0)
    assert np.max(np.abs(sp.reconstruct() - C)) <= 1e-13 * np.linalg.norm(C)
    assert np.max(np.abs(sp.vectors.T @ sp.vectors - np.eye(3))) <= 1e-13


@given(st.floats(0.0, 10.0), st.floats(0.0, 5.0), st.floats(0.0, 5.0))
def test_survival_composition(k, dt1, dt2):
    kin = ConstantRate(k)
    whole = survival(kin, 300.0, 300.0, dt1 + dt2)
    a = survival(kin, 300.0, 300.0, dt1)
    b = survival(kin, 300.0, 300.0, dt2)
    assert math.isclose(whole.e, a.e * b.e, rel_tol=1e-13, abs_tol=1e-300)
    assert 0.0 <= whole.w <= 1.0


@given(gradients(), gradients())
def test_relative_kinematics(Ft, Fs):
    at_t, at_s = make_state(Ft), make_state(Fs)
    Fr = Ft @ np.linalg.inv(Fs)
    assert np.allclose(relative_gradient(at_t, at_s), Fr, rtol=0, atol=1e-12 * np.abs(Fr).max())
    b = Fr @ Fr.T
    assert np.allclose(relative_b(at_t, at_s), b, rtol=0, atol=1e-12 * np.abs(b).max())
    I1 = relative_invariants(at_t, at_s)[0]
    assert math.isclose(I1, np.trace(b), rel_tol=1e-12)


@settings(max_examples=50)
@given(st.sampled_from(MODEL_IDS), gradients(), axis_angle)
def test_hyperelastic_objectivity(name, F, v):
    model = dict((m[0], m[1]) for m in MODELS)[name]
    Q = _rotation(v)
    s = hyper_stress(model, make_state(F))
    sq = hyper_stress(model, make_state(Q @ F))
    assert np.max(np.abs(sq - Q @ s @ Q.T)) <= 1e-11 * max(np.abs(s).max(), 1.0)


@st.composite
def paths(draw, n=4):
    lam = np.exp(np.array([[draw(st.floats(-0.4, 0.4)) for _ in range(3)] for _ in range(n)]))
    dts = [draw(st.floats(0.01, 2.0)) for _ in range(n)]
    return [np.diag(x) for x in lam], dts


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(MODEL_IDS), paths(), axis_angle)
def test_history_objectivity(name, path, v):
    spec = mixed_materials()[name]
    Q = _rotation(v)
    Fs, dts = path
    a, b = init_state(spec), init_state(spec)
    for F, dt in zip(Fs, dts):
        a = step(a, spec, F, 293.15, dt)
        b = step(b, spec, Q @ F, 293.15, dt)
    s, sq = evaluate(a, spec, tangent=False).sigma, evaluate(b, spec, tangent=False).sigma
    assert np.max(np.abs(sq - Q @ s @ Q.T)) <= 1e-10 * max(np.abs(s).max(), 1.0)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(MODEL_IDS), paths())
def test_serialization_round_trip(name, path):
    spec = mixed_materials()[name]
    state = init_state(spec)
    for F, dt in zip(*path):
        state = step(state, spec, F, 293.15, dt)
    data = state_to_bytes(state)
    back = state_from_bytes(data)
    assert state_to_bytes(back) == data
    assert np.array_equal(evaluate(back, spec, tangent=False).sigma,
                          evaluate(state, spec, tangent=False).sigma)


@settings(max_examples=30, deadline=None)
@given(paths(n=6))
def test_permanent_only_is_path_independent(path):
    # [TRIVIAL] without kinetics the stress depends on the current gradient only
    model = MODELS[0][1]
    spec = MaterialSpec((Network(model),))
    state = init_state(spec)
    for F, dt in zip(*path):
        state = step(state, spec, F, 293.15, dt)
    direct = hyper_stress(model, make_state(path[0][-1]))
    assert np.array_equal(evaluate(state, spec, tangent=False).sigma, direct)
