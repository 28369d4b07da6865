import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cspace.linalg import (
    X,
    Z,
    dagger,
    is_hermitian_psd,
    kron,
    proportionality_to_identity,
    random_unitary,
    unitary_up_to_scale,
)

from conftest import random_matrix


def test_dagger_examples():
    assert np.array_equal(dagger(np.eye(2)), np.eye(2))
    assert np.array_equal(dagger([[0, 1], [0, 0]]), np.array([[0, 0], [1, 0]]))


@given(st.integers(0, 2**32 - 1))
def test_dagger_involution(seed):
    m = random_matrix(np.random.default_rng(seed), 3)
    assert np.allclose(dagger(dagger(m)), m, atol=1e-12)
    assert dagger(m)[0, 2] == np.conj(m[2, 0])


def test_kron_examples():
    assert np.array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))
    assert np.array_equal(kron(np.diag([1, 2]), np.eye(2)), np.diag([1, 1, 2, 2]))


def test_kron_index_formula():
    a, b = X, Z
    out = kron(a, b)
    p, q = b.shape
    for i in range(4):
        for j in range(4):
            assert out[i, j] == a[i // p, j // q] * b[i % p, j % q]


@given(st.integers(0, 2**32 - 1))
def test_kron_associative(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (random_matrix(rng, 2) for _ in range(3))
    assert np.max(np.abs(kron(kron(a, b), c) - kron(a, kron(b, c)))) <= 1e-12


def test_psd_examples():
    assert is_hermitian_psd(np.eye(4))
    assert not is_hermitian_psd(np.diag([1.0, -1.0]))
    assert not is_hermitian_psd(np.array([[1, 1], [0, 1]]))
    with pytest.raises(ValueError):
        is_hermitian_psd(np.ones((2, 3)))


@pytest.mark.parametrize("seed", range(200))
def test_gram_is_psd(seed):
    g = random_matrix(np.random.default_rng(seed), 4)
    assert is_hermitian_psd(g.conj().T @ g)


def test_proportionality_examples():
    assert proportionality_to_identity(3 * np.eye(2)) == pytest.approx(3)
    assert proportionality_to_identity(np.diag([1.0, 2.0])) is None
    a1 = X @ Z / np.sqrt(3)
    assert proportionality_to_identity(a1.conj().T @ a1) == pytest.approx(1 / 3, abs=1e-15)
    with pytest.raises(ValueError):
        proportionality_to_identity(np.ones((2, 3)))


def test_unitary_up_to_scale_examples():
    assert unitary_up_to_scale(X / np.sqrt(3)) == pytest.approx(1 / np.sqrt(3), abs=1e-15)
    assert unitary_up_to_scale(np.diag([1.0, 0.0])) is None
    u = random_unitary(3, np.random.default_rng(5))
    assert unitary_up_to_scale(0.7 * u) == pytest.approx(0.7, abs=1e-12)


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 10.0))
def test_unitary_up_to_scale_recovers_constant(seed, c):
    u = random_unitary(3, np.random.default_rng(seed))
    assert unitary_up_to_scale(c * u) == pytest.approx(c, rel=1e-10)
