import math

import numpy as np
import pytest

from transnet.engine import (MaterialSpec, Network, evaluate, init_state, state_from_bytes,
                             state_to_bytes, step, trial)
from transnet.kinematics import make_state
from transnet.kinetics import ConstantRate, Permanent
from transnet.materials import Volumetric, hyper_stress, kernel_A, strain_energy
from transnet.oracle import dissipation_check, oracle_stress
from transnet.tensor import unpack

from cases import BK, NH, OGDEN, OGDEN_TRANSIENT, YEOH, mixed_materials
from oracles import fd_tangent, random_F, rel_err

I3 = np.eye(3)
MATERIALS = mixed_materials()
MAT_IDS = list(MATERIALS)


def _walk(spec, n, rng, size=0.05, dt=0.3, T0=300.0, dT=1.5):
    state = init_state(spec, T=T0)
    log = [state.current]
    F = I3
    for j in range(n):
        G = F + size * rng.normal(size=(3, 3))
        while np.linalg.det(G) < 0.3:
            G = F + size * rng.normal(size=(3, 3))
        F = G
        state = step(state, spec, F, T0 + dT * (j + 1), dt * (0.5 + rng.random()))
        log.append(state.current)
    return state, log


# ---------------------------------------------------------------- construction

def test_init_state_is_empty_history():
    spec = MATERIALS["yeoh"]
    st = init_state(spec)
    assert st.gamma0 == (1.0, 1.0)
    assert st.t == 0.0 and np.array_equal(st.F, I3)
    for h in st.histories:
        assert all(not np.any(H) for H in h.H)
        # rank-2, rank-4 and rank-6 history tensors
        assert tuple(2 * r for r in h.ranks) == (2, 4, 6)
        assert [H.size for H in h.H] == [6, 21, 56]


def test_single_permanent_network_reference_is_stress_free():
    spec = MaterialSpec((Network(NH),))
    assert np.max(np.abs(evaluate(init_state(spec), spec).sigma)) == 0.0


def test_material_spec_validation():
    with pytest.raises(ValueError):
        MaterialSpec(())
    with pytest.raises(ValueError):
        MaterialSpec((Network(YEOH),))
    with pytest.raises(ValueError):
        MaterialSpec((Network(NH),), Volumetric(1.0))
    with pytest.raises(TypeError):
        MaterialSpec((NH,))


def test_step_rejects_bad_input():
    spec = MATERIALS["neo-hookean"]
    st = init_state(spec)
    with pytest.raises(ValueError):
        step(st, spec, I3, 300.0, 0.0)
    with pytest.raises(ValueError):
        step(st, spec, I3, 300.0, -1.0)
    with pytest.raises(ValueError):
        step(st, spec, np.diag([1.0, 1.0, -1.0]), 300.0, 1.0)


# ---------------------------------------------------------------- recurrence

def test_half_life_step():
    """k dt = ln 2 from an empty history gives H = A_mean / 2."""
    spec = MaterialSpec((Network(NH, ConstantRate(math.log(2.0))),))
    F = np.diag([1.3, 0.9, 1.1])
    st = step(init_state(spec), spec, F, 300.0, 1.0)
    a = [0.5 * (x + y) for x, y in zip(kernel_A(NH, make_state(I3)), kernel_A(NH, make_state(F)))]
    h = st.histories[0]
    assert h.gamma0 == pytest.approx(0.5, rel=1e-15)
    for Hi, r, ai in zip(h.H, h.ranks, a):
        assert np.allclose(unpack(Hi, r), 0.5 * np.asarray(ai), rtol=1e-15, atol=1e-16)


def test_permanent_network_is_unchanged():
    spec = MaterialSpec((Network(BK, Permanent()),))
    st = init_state(spec, np.diag([1.2, 1.0, 0.9]))
    nxt = step(st, spec, st.F, st.T, 5.0)
    assert nxt.histories[0].gamma0 == 1.0
    assert all(a is b for a, b in zip(nxt.histories[0].H, st.histories[0].H))


@pytest.mark.parametrize("model", [NH, BK, OGDEN_TRANSIENT], ids=["neo-hookean", "blatz-ko", "ogden-hill"])
def test_step_strain_relaxation(model):
    k = 0.7
    spec = MaterialSpec((Network(model, ConstantRate(k)),))
    F0 = np.array([[1.3, 0.1, 0.0], [0.0, 0.8, 0.05], [0.02, 0.0, 1.1]])
    s0 = hyper_stress(model, make_state(F0))
    rng = np.random.default_rng(0)
    st = init_state(spec, F0)
    for _ in range(30):
        st = step(st, spec, F0, st.T, rng.uniform(0.01, 0.5))
        s = evaluate(st, spec, tangent=False).sigma
        assert rel_err(s, math.exp(-k * st.t) * s0) <= 1e-10


def test_two_short_steps_equal_one_long_step():
    spec = MATERIALS["blatz-ko"]
    st = step(init_state(spec, T=320.0), spec, np.diag([1.2, 0.9, 1.0]), 320.0, 0.4)
    F = st.F
    one = step(st, spec, F, 320.0, 0.6)
    two = step(step(st, spec, F, 320.0, 0.3), spec, F, 320.0, 0.3)
    for h1, h2 in zip(one.histories, two.histories):
        assert h1.gamma0 == pytest.approx(h2.gamma0, rel=1e-14)
        for a, b in zip(h1.H, h2.H):
            assert np.allclose(a, b, rtol=1e-14, atol=1e-15 * np.abs(b).max())


def test_yeoh_long_relaxation_leaves_volumetric_response():
    spec = MaterialSpec((Network(YEOH, ConstantRate(1.0)),), Volumetric(30.0))
    F = np.diag([1.4, 0.9, 0.85])
    st = init_state(spec, F)
    for _ in range(200):
        st = step(st, spec, F, st.T, 0.5)
    s = evaluate(st, spec, tangent=False).sigma
    vol = 30.0 * (np.linalg.det(F) - 1.0) * I3
    assert np.allclose(s, vol, atol=1e-12 * abs(vol[0, 0]))


def test_single_network_long_relaxation_vanishes():
    spec = MaterialSpec((Network(NH, ConstantRate(1.0)),))
    F = np.diag([1.4, 0.9, 0.85])
    st = init_state(spec, F)
    s0 = evaluate(st, spec, tangent=False).sigma
    for _ in range(100):
        st = step(st, spec, F, st.T, 1.0)
    # gamma0 ~ exp(-100); what remains is roundoff in the cancelling H : B terms
    assert np.linalg.norm(evaluate(st, spec, tangent=False).sigma) <= 1e-14 * np.linalg.norm(s0)


def test_nearly_permanent_copy_doubles_stress():
    one = MaterialSpec((Network(YEOH),), Volumetric(1e4))
    two = MaterialSpec((Network(YEOH), Network(YEOH, ConstantRate(1e-12))), Volumetric(1e4))
    rng = np.random.default_rng(1)
    st1, st2 = init_state(one), init_state(two)
    for j in range(10):
        F = np.diag([1.0 + 0.1 * (j + 1), 1.0, 1.0]) + 0.01 * rng.normal(size=(3, 3))
        st1, st2 = step(st1, one, F, 293.0, 1.0), step(st2, two, F, 293.0, 1.0)
    vol = 1e4 * (st1.current.J - 1.0) * I3
    dev1 = evaluate(st1, one, tangent=False).sigma - vol
    dev2 = evaluate(st2, two, tangent=False).sigma - vol
    assert rel_err(dev2, 2.0 * dev1) <= 1e-6


def test_fresh_state_is_hyperelastic():
    spec = MATERIALS["ogden-hill"]
    F = random_F(np.random.default_rng(2), 0.5, 2.0)
    s = evaluate(init_state(spec), spec, F, tangent=False).sigma
    ref = sum(hyper_stress(n.model, make_state(F)) for n in spec.networks)
    assert rel_err(s, ref) <= 1e-14


def test_evaluate_is_pure():
    spec = MATERIALS["yeoh"]
    st, _ = _walk(spec, 5, np.random.default_rng(3))
    raw = state_to_bytes(st)
    F = st.F + 0.01
    r1, r2 = evaluate(st, spec, F), evaluate(st, spec, F)
    assert np.array_equal(r1.sigma, r2.sigma) and np.array_equal(r1.tangent, r2.tangent)
    assert state_to_bytes(st) == raw


@pytest.mark.parametrize("name", MAT_IDS)
def test_recurrence_matches_explicit_sum(name):
    spec = MATERIALS[name]
    rng = np.random.default_rng(4)
    for _ in range(3):
        st, log = _walk(spec, 20, rng)
        s = evaluate(st, spec, tangent=False).sigma
        assert rel_err(s, oracle_stress(log, spec, mode="sum")) <= 1e-12


def test_oracle_modes_reproduce_step_strain():
    k = 0.4
    spec = MaterialSpec((Network(BK, ConstantRate(k)),))
    F0 = np.diag([1.25, 0.9, 1.05])
    st = init_state(spec, F0)
    log = [st.current]
    for _ in range(8):
        st = step(st, spec, F0, st.T, 0.25)
        log.append(st.current)
    exact = math.exp(-k * st.t) * hyper_stress(BK, make_state(F0))
    assert rel_err(oracle_stress(log, spec, mode="sum"), exact) <= 1e-12
    assert rel_err(oracle_stress(log, spec, mode="quadrature"), exact) <= 1e-12


def test_oracle_rejects_bad_logs():
    spec = MATERIALS["neo-hookean"]
    with pytest.raises(ValueError):
        oracle_stress([], spec)
    a = make_state(I3, 1.0)
    with pytest.raises(ValueError):
        oracle_stress([a, make_state(I3, 1.0)], spec)
    with pytest.raises(ValueError):
        oracle_stress([a], spec, mode="midpoint")


@pytest.mark.parametrize("name", MAT_IDS)
def test_frozen_history_tangent(name):
    spec = MATERIALS[name]
    rng = np.random.default_rng(5)
    for _ in range(3):
        st, _ = _walk(spec, 6, rng)
        h = evaluate(st, spec).tangent
        fd = fd_tangent(lambda G: evaluate(st, spec, G, tangent=False).sigma, st.F)
        assert rel_err(h, fd) <= 1e-5


@pytest.mark.parametrize("name", MAT_IDS)
def test_algorithmic_tangent_matches_trial_derivative(name):
    spec = MATERIALS[name]
    st, _ = _walk(spec, 4, np.random.default_rng(6))
    F1 = st.F + 0.03 * np.eye(3)
    _, res = trial(st, spec, F1, st.T + 1.0, 0.8, algorithmic=True)
    fd = fd_tangent(lambda G: trial(st, spec, G, st.T + 1.0, 0.8)[1].sigma, F1)
    assert rel_err(res.tangent, fd) <= 1e-5


def test_permanent_loop_returns_to_zero():
    spec = MaterialSpec((Network(NH), Network(BK), Network(OGDEN)))
    rng = np.random.default_rng(7)
    st = init_state(spec)
    F = I3
    for _ in range(15):
        F = F + 0.05 * rng.normal(size=(3, 3))
        st = step(st, spec, F, 300.0, 0.1)
    st = step(st, spec, I3, 300.0, 0.1)
    assert np.max(np.abs(evaluate(st, spec, tangent=False).sigma)) <= 1e-12


# ---------------------------------------------------------------- serialization

@pytest.mark.parametrize("name", MAT_IDS)
def test_serialization_round_trip(name):
    spec = MATERIALS[name]
    st, _ = _walk(spec, 5, np.random.default_rng(8))
    raw = state_to_bytes(st)
    back = state_from_bytes(raw)
    assert state_to_bytes(back) == raw
    assert np.array_equal(evaluate(back, spec).sigma, evaluate(st, spec).sigma)
    assert back.t == st.t and back.T == st.T


def test_serialization_rejects_garbage():
    spec = MATERIALS["neo-hookean"]
    raw = state_to_bytes(init_state(spec))
    with pytest.raises(ValueError):
        state_from_bytes(b"XXXX" + raw[4:])
    with pytest.raises(ValueError):
        state_from_bytes(raw + b"\x00")


def test_state_size_is_constant():
    spec = MATERIALS["yeoh"]
    rng = np.random.default_rng(9)
    sizes = {len(state_to_bytes(_walk(spec, n, rng)[0])) for n in (0, 3, 12)}
    assert len(sizes) == 1


# ---------------------------------------------------------------- dissipation

def test_hyperelastic_path_has_no_dissipation():
    spec = MaterialSpec((Network(NH), Network(OGDEN)))
    _, log = _walk(spec, 8, np.random.default_rng(10))
    res = dissipation_check(log, spec)
    assert np.max(np.abs(res.dissipation)) <= 1e-6 * np.max(res.stress_power)


def test_step_strain_dissipation_is_energy_decay():
    k = 0.5
    spec = MaterialSpec((Network(NH, ConstantRate(k)),))
    F0 = np.diag([1.3, 0.95, 0.9])
    W0 = float(strain_energy(NH, make_state(F0)))
    st = init_state(spec, F0)
    log = [st.current]
    for _ in range(6):
        st = step(st, spec, F0, st.T, 0.5)
        log.append(st.current)
    D = dissipation_check(log, spec).dissipation
    t = np.array([s.t for s in log])
    # interval mean of k exp(-k t) W0
    expected = W0 * (np.exp(-k * t[:-1]) - np.exp(-k * t[1:])) / np.diff(t)
    assert np.all(D > 0.0)
    assert np.allclose(D, expected, rtol=1e-10)
