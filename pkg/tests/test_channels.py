import math

import numpy as np
import pytest

from qdephase import channels, qmath, states, tomography

from conftest import random_density

S = math.sqrt


def written_global_kraus(p):
    """The nine two-qubit dephasing operators written out entry by entry."""
    q = 1 - p
    r = S(p * q)
    d = np.diag
    return np.array([
        d([q, q, q, q]), d([r, 0, r, 0]), d([0, r, 0, r]),
        d([r, r, 0, 0]), d([p, 0, 0, 0]), d([0, p, 0, 0]),
        d([0, 0, r, r]), d([0, 0, p, 0]), d([0, 0, 0, p]),
    ], dtype=complex)


def test_single_qubit_kraus():
    ks = channels.dephase_1q_kraus(0.0)
    np.testing.assert_array_equal(ks.ops, [np.eye(2), np.zeros((2, 2)), np.zeros((2, 2))])
    rho = np.array([[0.6, 0.3], [0.3, 0.4]], dtype=complex)
    out = channels.apply_kraus(rho, channels.dephase_1q_kraus(1.0))
    np.testing.assert_allclose(out, np.diag([0.6, 0.4]), atol=1e-15)
    out = channels.apply_kraus(rho, channels.dephase_1q_kraus(0.25))
    assert out[0, 1] == pytest.approx(0.225, abs=1e-15)
    assert out[1, 0] == pytest.approx(0.3 * 0.75, abs=1e-15)
    with pytest.raises(ValueError):
        channels.dephase_1q_kraus(-0.1)


@pytest.mark.parametrize("p", [0.0, 0.3, 0.77, 1.0])
def test_global_kraus_matches_written_operators(p):
    ks = channels.dephase_global_kraus(p)
    np.testing.assert_allclose(ks.ops, written_global_kraus(p), atol=1e-15)
    assert ks.completeness_error() <= 1e-12


def test_e22_block():
    np.testing.assert_allclose(channels.dephase_global_kraus(0.4).ops[4], 0.4 * np.diag([1, 0, 0, 0]), atol=1e-15)


def test_kraus_equals_kron_of_single_qubit_ops():
    m = channels.dephase_1q_kraus(0.6).ops
    ops = channels.dephase_global_kraus(0.6).ops
    for i in range(3):
        for j in range(3):
            np.testing.assert_allclose(ops[3 * i + j], np.kron(m[i], m[j]), atol=0)


def test_apply_kraus_identity_and_mismatch(rng):
    rho = random_density(rng, 3)
    ident = channels.KrausSet(np.eye(4)[None], channels.KrausLabel.DEPHASE_GLOBAL_2Q)
    np.testing.assert_allclose(channels.apply_kraus(rho, ident), rho, atol=0)
    with pytest.raises(ValueError):
        channels.apply_kraus(rho, channels.dephase_1q_kraus(0.2))


def test_bell_corner_coherence():
    bell = states.pure_to_density(states.make_psi1(math.pi / 2, 0.0))
    for p in (0.1, 0.5, 0.9):
        out = channels.apply_kraus(bell, channels.dephase_global_kraus(p))
        assert out[0, 3] == pytest.approx(0.5 * (1 - p) ** 2, abs=1e-15)


def test_closed_form_examples(rng):
    rho = random_density(rng, 1)[0]
    np.testing.assert_array_equal(channels.dephase_global_closed_form(rho, 0.0), rho)
    np.testing.assert_allclose(channels.dephase_global_closed_form(rho, 1.0), np.diag(np.diag(rho)), atol=0)
    out = channels.dephase_global_closed_form(rho, 0.5)
    assert out[1, 2] == pytest.approx(0.25 * rho[1, 2], abs=1e-16)
    assert out[0, 1] == pytest.approx(0.5 * rho[0, 1], abs=1e-16)


def test_kraus_sum_matches_closed_form(rng):
    rho = random_density(rng, 1000)
    p = rng.uniform(size=1000)
    via_kraus = np.stack([channels.apply_kraus(r, channels.dephase_global_kraus(q)) for r, q in zip(rho, p)])
    assert np.max(np.abs(via_kraus - channels.dephase_global_closed_form(rho, p))) <= 1e-12


def test_composition(rng):
    rho = random_density(rng, 200)
    p1, p2 = rng.uniform(size=(2, 200))
    twice = channels.dephase_global_closed_form(channels.dephase_global_closed_form(rho, p1), p2)
    once = channels.dephase_global_closed_form(rho, 1 - (1 - p1) * (1 - p2))
    assert np.max(np.abs(twice - once)) <= 1e-12


def test_channels_preserve_states(rng):
    rho = np.concatenate([random_density(rng, 5000), random_density(rng, 5000, rank=1)])
    p = rng.uniform(size=len(rho))
    for out in (channels.dephase_global_closed_form(rho, p), channels.depolarize(rho, p)):
        assert np.max(np.abs(np.trace(out, axis1=1, axis2=2) - 1)) <= 1e-12
        assert np.max(qmath.hermiticity_error(out)) <= 1e-15
        assert np.min(qmath.hermitian_eigenvalues(out)) >= -1e-9


def test_depolarize_examples(rng):
    rho = random_density(rng, 1)[0]
    np.testing.assert_array_equal(channels.depolarize(rho, 0.0), rho)
    np.testing.assert_allclose(channels.depolarize(rho, 1.0), np.eye(4) / 4, atol=0)
    np.testing.assert_allclose(
        channels.apply_kraus(rho, channels.depolarize_kraus(0.3)), channels.depolarize(rho, 0.3), atol=1e-15
    )
    assert channels.depolarize_kraus(0.3).completeness_error() <= 1e-12


def test_depolarized_bell_boundary():
    bell = states.pure_to_density(states.make_psi1(math.pi / 2, 0.0))
    for p in np.linspace(0, 1, 61):
        label = tomography.ppt_label(channels.depolarize(bell, p))
        if abs(p - 2 / 3) > 1e-9:
            assert label.entangled == (p < 2 / 3)
    assert not tomography.ppt_label(channels.depolarize(bell, 0.7)).entangled


def test_concurrence_scaling_for_three_component_states(rng):
    c = rng.normal(size=(1000, 3)) + 1j * rng.normal(size=(1000, 3))
    psi = np.concatenate([c, np.zeros((1000, 1))], axis=1)
    psi /= np.linalg.norm(psi, axis=1, keepdims=True)
    p = rng.uniform(size=1000)
    rho = channels.dephase_global_closed_form(states.pure_to_density(psi), p)
    expected = (1 - p) ** 2 * tomography.concurrence_pure(psi)
    assert np.max(np.abs(tomography.concurrence(rho) - expected)) <= 1e-9
    np.testing.assert_allclose(expected, 2 * (1 - p) ** 2 * np.abs(psi[:, 1] * psi[:, 2]), atol=1e-15)


def test_three_component_classification_survives_dephasing(rng):
    psi = np.zeros((500, 4), dtype=complex)
    psi[:, :3] = rng.normal(size=(500, 3)) + 1j * rng.normal(size=(500, 3))
    psi[:100, 2] = 0  # product states c1|00> + c2|01>
    psi /= np.linalg.norm(psi, axis=1, keepdims=True)
    # the negative PT eigenvalue shrinks like (1-p)^4 here, so stay clear of the 1e-10 band
    p = rng.uniform(0, 0.95, size=500)
    before = tomography.min_pt_eigenvalue(states.pure_to_density(psi)) < -1e-10
    after = tomography.min_pt_eigenvalue(
        channels.dephase_global_closed_form(states.pure_to_density(psi), p)
    ) < -1e-10
    assert not before[:100].any()
    np.testing.assert_array_equal(before, after)
