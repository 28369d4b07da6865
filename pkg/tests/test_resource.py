import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cspace.linalg import H, X, Z, proportionality_to_identity, unitary_up_to_scale
from cspace.resource import (
    ResourceMPS,
    SizeGuardError,
    aklt,
    branch_operators,
    cluster_1d,
    conditional_W,
    random_resource,
    to_dense,
    to_dense_normalized,
    transfer_power,
    validate,
)

SQ3 = np.sqrt(3)


def test_aklt_tensors():
    m = aklt()
    assert (m.d, m.D) == (3, 2)
    assert np.array_equal(m.tensors[0], np.array([[0, 1], [1, 0]]) / SQ3)
    assert np.array_equal(m.tensors[1], np.array([[0, -1], [1, 0]]) / SQ3)
    assert np.array_equal(m.tensors[2], np.array([[1, 0], [0, -1]]) / SQ3)
    for a in m.tensors:
        assert np.allclose(a.conj().T @ a, np.eye(2) / 3, atol=1e-15)
    assert np.allclose(m.completeness(), np.eye(2), atol=1e-15)
    assert np.array_equal(m.left, [1, 0]) and np.array_equal(m.right, [1, 0])


def test_resource_rejects_bad_shapes():
    with pytest.raises(ValueError):
        ResourceMPS(np.zeros((3, 2, 3)), [1, 0], [1, 0])
    with pytest.raises(ValueError):
        ResourceMPS(np.zeros((3, 2, 2)), [1, 0, 0], [1, 0])
    with pytest.raises(ValueError):
        ResourceMPS(np.zeros((1, 2, 2)), [1, 0], [1, 0])


def test_aklt_validate_at_quarter_turns():
    rep = validate(aklt(), np.pi / 2, np.pi / 2)
    assert rep.valid
    for c in rep.constants.values():
        assert c == pytest.approx(1 / SQ3, abs=1e-12)
    assert rep.normalization_C == pytest.approx(1, abs=1e-12)
    # X (I -/+ iZ) / sqrt(6)
    ops = branch_operators(aklt(), np.pi / 2, np.pi / 2)
    assert np.allclose(ops["alpha"], X @ (np.eye(2) - 1j * Z) / np.sqrt(6))
    assert np.allclose(ops["beta"], X @ (np.eye(2) + 1j * Z) / np.sqrt(6))


def test_aklt_validate_fails_at_phi_zero():
    rep = validate(aklt(), np.pi / 2, 0.0)
    assert not rep.valid
    assert "alpha" in rep.failing
    alpha = branch_operators(aklt(), np.pi / 2, 0.0)["alpha"]
    assert np.allclose(alpha, X @ (np.eye(2) + Z) / np.sqrt(6))
    assert np.linalg.matrix_rank(alpha) == 1


def test_validate_rejects_theta_endpoints():
    with pytest.raises(ValueError):
        validate(aklt(), 0.0, 0.0)
    with pytest.raises(ValueError):
        random_resource(3, 2, np.pi, 0.0, 0)


def test_cluster_branches():
    c = cluster_1d()
    ops = branch_operators(c, np.pi / 2, 0.0)
    assert np.allclose(ops["alpha"], H / np.sqrt(2))
    assert unitary_up_to_scale(ops["alpha"]) == pytest.approx(1 / np.sqrt(2))
    assert unitary_up_to_scale(ops["beta"]) == pytest.approx(1 / np.sqrt(2))
    rep = validate(c, np.pi / 2, 0.0)
    assert rep.valid and rep.normalization_C == pytest.approx(1, abs=1e-12)


def cz_chain_state(n):
    """CZ on neighbouring qubits applied to |+>^n, built without any MPS machinery."""
    bits = np.array(list(itertools.product((0, 1), repeat=n)))
    signs = (-1.0) ** np.sum(bits[:, :-1] * bits[:, 1:], axis=1)
    return signs / np.sqrt(2**n)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_cluster_matches_cz_chain(n):
    psi = to_dense_normalized(cluster_1d(n))
    assert abs(np.vdot(psi, cz_chain_state(n))) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("seed", range(50))
def test_random_resource_validates(seed):
    d = 2 + seed % 3
    theta, phi = 0.3 + 0.05 * seed, 0.1 * seed
    m = random_resource(d, 2, theta, phi, seed)
    rep = validate(m, theta, phi)
    assert rep.valid
    assert rep.normalization_C == pytest.approx(1, abs=1e-12)
    assert np.linalg.norm(to_dense(m)) > 0


def test_random_resource_degenerate_bond():
    m = random_resource(2, 1, 1.0, 0.5, 3)
    rep = validate(m, 1.0, 0.5)
    assert rep.valid
    for name, op in branch_operators(m, 1.0, 0.5).items():
        assert abs(op[0, 0]) == pytest.approx(rep.constants[name])


@settings(max_examples=40)
@given(
    st.integers(2, 4),
    st.integers(1, 3),
    st.floats(0.05, 3.09),
    st.floats(0, 2 * np.pi - 1e-6),
    st.floats(0.05, 3.09),
    st.floats(0, 2 * np.pi - 1e-6),
    st.integers(0, 10**6),
)
def test_branch_completeness_is_basis_invariant(d, D, th0, ph0, theta, phi, seed):
    m = random_resource(d, D, th0, ph0, seed)
    total = sum(b.conj().T @ b for b in branch_operators(m, theta, phi).values())
    assert np.max(np.abs(total - m.completeness())) <= 1e-12


def test_to_dense_product_state():
    # D = 1: amplitudes factorize site by site
    a = np.array([0.6, 0.8j, 0.0])
    m = ResourceMPS(a.reshape(3, 1, 1), [1.0], [1.0], n_sites=3)
    psi = to_dense(m)
    assert np.allclose(psi, np.kron(np.kron(a, a), a))


def test_to_dense_aklt_two_sites_by_hand():
    m = aklt(n_sites=2)
    psi = to_dense(m)
    L, R = m.left, m.right
    for k2 in range(3):
        for k1 in range(3):
            expected = L.conj() @ m.tensors[k2] @ m.tensors[k1] @ R
            assert psi[3 * k2 + k1] == pytest.approx(expected, abs=1e-15)


def test_to_dense_zero_boundary_and_guard():
    m = aklt().with_boundaries(right=[0, 0])
    assert not np.any(to_dense(m))
    with pytest.raises(SizeGuardError):
        to_dense(aklt(n_sites=13))


def test_conditional_W_single_site_D1():
    a = np.array([0.6, 0.8j])
    m = ResourceMPS(a.reshape(2, 1, 1), [1.0], [1.0], n_sites=2)
    W = conditional_W(m, [2.0], 2)
    assert np.allclose(W, 4 * np.outer(a, a.conj()))


@pytest.mark.parametrize("seed", range(10))
def test_conditional_W_trace_matches_transfer_matrix(seed):
    rng = np.random.default_rng(seed)
    m = random_resource(3, 2, 1.1, 0.4, seed, n_sites=5).with_boundaries(left=rng.standard_normal(2) + 1j)
    psi = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    for r in range(1, 6):
        W = conditional_W(m, psi, r)
        T = transfer_power(m, np.outer(m.left, m.left.conj()), m.n_sites - r + 1)
        assert np.trace(W) == pytest.approx(psi.conj() @ T @ psi, abs=1e-12)
        assert np.allclose(W, W.conj().T)


def test_conditional_W_linear_in_psi():
    assert not np.any(conditional_W(aklt(), [0, 0], 2))
    with pytest.raises(SizeGuardError):
        conditional_W(aklt(n_sites=8), [1, 0], 1)
