import logging

import numpy as np
import pytest

from transnet.kinematics import (DefState, make_state, relative_b, relative_b_inv,
                                 relative_generalized_stretch_contraction, relative_gradient,
                                 relative_invariants)

from oracles import random_F, rel_err


def test_identity_state():
    st = make_state(np.eye(3))
    assert st.J == 1.0
    assert np.array_equal(st.C, np.eye(3)) and np.array_equal(st.b, np.eye(3))


def test_diagonal_state():
    st = make_state(np.diag([2.0, 1.0, 1.0]))
    assert st.J == pytest.approx(2.0, rel=1e-15)
    assert np.allclose(st.C, np.diag([4.0, 1.0, 1.0]))


def test_simple_shear_state():
    F = np.eye(3)
    F[0, 1] = 0.3
    st = make_state(F)
    assert st.J == pytest.approx(1.0, rel=1e-15)
    assert st.C[0, 1] == pytest.approx(0.3, rel=1e-15)
    assert st.C[1, 1] == pytest.approx(1.09, rel=1e-15)


@pytest.mark.parametrize("F", [np.diag([1.0, 1.0, -1.0]), np.zeros((3, 3)),
                               np.full((3, 3), np.inf), np.eye(2)])
def test_invalid_gradients_rejected(F):
    with pytest.raises(ValueError):
        make_state(F)


def test_large_stretch_warns(caplog):
    with caplog.at_level(logging.WARNING, logger="transnet.kinematics"):
        make_state(np.diag([12.0, 1.0, 1.0]))
    assert "exceeds" in caplog.text


def test_cached_fields_consistent():
    rng = np.random.default_rng(0)
    for _ in range(100):
        st = make_state(random_F(rng))
        assert np.allclose(st.Cinv @ st.C, np.eye(3), atol=1e-12 * np.linalg.cond(st.C))
        iso = st.iso
        assert np.linalg.det(iso.Fbar) == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.det(iso.Cbar) == pytest.approx(1.0, abs=1e-12)


def test_relative_invariant_examples():
    a, b = make_state(np.diag([2.0, 1.0, 1.0])), make_state(np.diag([1.0, 2.0, 1.0]))
    assert np.allclose(relative_invariants(a, a), (3.0, 3.0, 1.0), rtol=1e-15)
    I1, I2, I3 = relative_invariants(a, make_state(np.eye(3)))
    C = a.C
    assert (I1, I2, I3) == pytest.approx((np.trace(C), 0.5 * (np.trace(C) ** 2 - np.trace(C @ C)),
                                          np.linalg.det(C)), rel=1e-15)
    # C(t) = diag(4,1,1), C(s) = diag(1,4,1): 4 + 1/4 + 1
    assert relative_invariants(a, b)[0] == pytest.approx(5.25, rel=1e-15)


def test_relative_b_examples():
    rng = np.random.default_rng(1)
    a = make_state(random_F(rng))
    ref = make_state(np.eye(3))
    assert np.allclose(relative_b(a, ref), a.b, rtol=1e-14)
    assert np.allclose(relative_b_inv(a, ref), np.linalg.inv(a.b), rtol=1e-10)
    assert np.allclose(relative_b(a, a), np.eye(3), atol=1e-12)
    assert np.allclose(relative_b_inv(a, a), np.eye(3), atol=1e-12)
    b = make_state(random_F(rng))
    assert np.allclose(relative_b(a, b) @ relative_b_inv(a, b), np.eye(3), atol=1e-12)


def test_stretch_contraction_examples():
    rng = np.random.default_rng(2)
    a = make_state(random_F(rng))
    assert relative_generalized_stretch_contraction(a, a, 2.5) == pytest.approx(3.0, rel=1e-13)
    assert relative_generalized_stretch_contraction(a, make_state(np.eye(3)), 1.0) == \
        pytest.approx(np.trace(a.C), rel=1e-14)
    c = make_state(np.diag([2.0, 1.0, 1.0]))
    assert relative_generalized_stretch_contraction(c, make_state(np.eye(3)), -1.0) == \
        pytest.approx(2.25, rel=1e-15)


def test_identities_match_explicit_relative_gradient():
    """Endpoint identities versus forming F(t) F(s)^-1, over 1000 random pairs."""
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(1000):
        a, b = make_state(random_F(rng)), make_state(random_F(rng))
        Fr = a.F @ np.linalg.inv(b.F)
        Cr, br = Fr.T @ Fr, Fr @ Fr.T
        I1 = np.trace(Cr)
        ref = (I1, 0.5 * (I1**2 - np.trace(Cr @ Cr)), np.linalg.det(Cr))
        got = relative_invariants(a, b)
        worst = max(worst, *(abs(g - r) / abs(r) for g, r in zip(got, ref)))
        worst = max(worst, rel_err(relative_b(a, b), br))
        worst = max(worst, rel_err(relative_b_inv(a, b), np.linalg.inv(br)))
        worst = max(worst, rel_err(relative_gradient(a, b), Fr))
    assert worst <= 1e-12


def test_relative_gradient_composition():
    rng = np.random.default_rng(4)
    for _ in range(100):
        t, s, r = (make_state(random_F(rng)) for _ in range(3))
        lhs = relative_gradient(t, s) @ relative_gradient(s, r)
        assert rel_err(lhs, relative_gradient(t, r)) <= 1e-12


def test_batched_state():
    rng = np.random.default_rng(5)
    Fs = np.array([random_F(rng) for _ in range(4)])
    st = DefState(Fs)
    assert st.J.shape == (4,)
    assert np.allclose(st.C, np.swapaxes(Fs, -1, -2) @ Fs)
