import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cspace.channels import random_cptp
from cspace.cptp import (
    SuperOperator,
    Verdict,
    choi,
    classify,
    cp_min_eigenvalue,
    is_cp,
    is_tp,
    linear_extension,
    linearity_probe,
    tp_deviation,
)
from cspace.linalg import X, Z, random_density_matrix, random_unitary


def test_choi_of_identity_is_unnormalized_max_entangled():
    j = choi(SuperOperator.from_kraus(np.eye(2)))
    omega = np.zeros(4)
    omega[[0, 3]] = 1
    assert np.allclose(j, np.outer(omega, omega))


def test_choi_transpose_is_not_cp():
    so = SuperOperator.from_function(lambda e: e.T, 2)
    assert cp_min_eigenvalue(choi(so)) == pytest.approx(-1)
    assert classify(so).verdict is Verdict.NOT_CP


@pytest.mark.parametrize("seed", range(20))
def test_choi_kraus_matches_action_table(seed):
    ch = random_cptp(2 + seed % 2, 1 + seed % 3, seed)
    a = SuperOperator.from_kraus(ch.kraus)
    b = SuperOperator.from_function(a.apply, a.dim_in)
    assert np.allclose(choi(a), choi(b), atol=1e-13)
    assert np.allclose(a.gram().T, b.gram(), atol=1e-13)
    assert tp_deviation(a) <= 1e-12 and tp_deviation(b) <= 1e-12


def test_x_rho_z_is_not_cp():
    so = SuperOperator.from_function(lambda e: X @ e @ Z, 2)
    assert not is_cp(choi(so))
    assert classify(so).verdict is Verdict.NOT_CP


def test_cp_not_tp():
    so = SuperOperator.from_kraus(np.diag([1.0, 0.5]))
    assert is_cp(choi(so))
    assert not is_tp(so)
    assert tp_deviation(so) == pytest.approx(0.75)
    assert classify(so).verdict is Verdict.CP_NOT_TP


def test_compose_kraus_and_table_agree():
    a = SuperOperator.from_kraus(random_cptp(3, 2, 1).kraus)
    b = SuperOperator.from_kraus(random_cptp(3, 2, 2).kraus)
    k = a.compose(b)
    t = SuperOperator.from_function(a.apply, 3).compose(SuperOperator.from_function(b.apply, 3))
    assert np.allclose(choi(k), choi(t), atol=1e-13)


def test_superoperator_shape_errors():
    with pytest.raises(ValueError):
        SuperOperator(2, 2)
    with pytest.raises(ValueError):
        SuperOperator(2, 2, kraus=np.zeros((1, 3, 2)))
    with pytest.raises(ValueError):
        SuperOperator(2, 2, action=np.zeros((2, 2, 3, 3)))


def test_linearity_probe_linear_map_is_zero():
    so = SuperOperator.from_kraus(random_cptp(3, 2, 5).kraus)
    assert linearity_probe(so.apply, 3).deviation <= 1e-14


def test_linearity_probe_renormalized_oracle():
    # K = sqrt(2/3) X |1><1| renormalized: |0><0| -> 0, |1><1| -> |0><0|, mix -> |0><0|
    k = np.sqrt(2 / 3) * X @ np.diag([0, 1])

    def f(rho):
        out = k @ rho @ k.conj().T
        p = np.trace(out).real
        return np.zeros_like(out) if p <= 1e-14 else out / p

    probe = linearity_probe(f, 2, trials=0)
    assert probe.deviation == pytest.approx(0.5)
    assert probe.weight == 0.5
    assert classify(f, dim=2).verdict is Verdict.NON_LINEAR


def test_linear_extension_recovers_kraus_map():
    so = SuperOperator.from_kraus(random_cptp(2, 3, 8).kraus)
    ext = linear_extension(so.apply, 2)
    assert np.allclose(choi(ext), choi(so), atol=1e-13)


def test_classify_callable_needs_dim():
    with pytest.raises(ValueError):
        classify(lambda r: r)


@pytest.mark.parametrize("seed", range(30))
def test_random_channels_are_linear_cptp(seed):
    ch = random_cptp(2 + seed % 3, 1 + seed % 4, seed)
    res = classify(SuperOperator.from_kraus(ch.kraus))
    assert res.verdict is Verdict.LINEAR_CPTP
    assert res.cp_min_eigenvalue >= -1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_unitary_conjugation_preserves_verdict_and_spectrum(seed):
    rng = np.random.default_rng(seed)
    ch = random_cptp(2, 2, seed)
    u, v = random_unitary(2, rng), random_unitary(2, rng)
    so = SuperOperator.from_kraus(ch.kraus)
    conj = SuperOperator.from_kraus(np.array([u @ k @ v for k in ch.kraus]))
    assert classify(conj).verdict is classify(so).verdict
    assert np.allclose(np.linalg.eigvalsh(choi(conj)), np.linalg.eigvalsh(choi(so)), atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_cptp_maps_send_states_to_states(seed):
    rng = np.random.default_rng(seed)
    so = SuperOperator.from_kraus(random_cptp(3, 2, seed).kraus)
    out = so.apply(random_density_matrix(3, rng))
    assert np.trace(out).real == pytest.approx(1, abs=1e-12)
    assert np.linalg.eigvalsh(out)[0] >= -1e-12
