"""Two-qubit state layer: Pauli algebra, transposition maps, state families."""

import numpy as np
import pytest

from corrsets.detect import Z_CHSH, chsh_settings, pauli_settings
from corrsets.twoqubit import (PAULI, PauliForm, apply_theta, bell_operator,
                               block_positivity_minimum, classify_state,
                               eigenvalues_hermitian, hull_state, max_entangled,
                               partial_transpose, pauli_assemble, pauli_expand,
                               qubit_state, random_product_state,
                               random_quantum_state, random_separable_state,
                               rho_max, tau_state, werner_state)

RNG = np.random.default_rng(33)


def test_pauli_algebra():
    for s in PAULI:
        assert np.allclose(s @ s.conj().T, np.eye(2))
        assert np.allclose(s, s.conj().T)
        assert np.isclose(np.trace(s), 0.0)
    # sigma_x sigma_y = i sigma_z and cyclic
    assert np.allclose(PAULI[0] @ PAULI[1], 1j * PAULI[2])
    assert np.allclose(PAULI[1] @ PAULI[2], 1j * PAULI[0])
    assert np.allclose(PAULI[2] @ PAULI[0], 1j * PAULI[1])


def test_pauli_expand_assemble_round_trip():
    for _ in range(100):
        rho = random_quantum_state(RNG)
        p = pauli_expand(rho)
        assert np.isclose(p.weight, 1.0)
        assert np.linalg.norm(pauli_assemble(p) - rho) <= 1e-12


def test_pauli_expand_phi_plus():
    p = pauli_expand(werner_state(0.0))
    assert np.allclose(p.ra, 0.0, atol=1e-12)
    assert np.allclose(p.rb, 0.0, atol=1e-12)
    assert np.allclose(p.t, np.diag([1.0, -1.0, 1.0]), atol=1e-12)


def test_bell_operator_correlation_block():
    s = chsh_settings()
    op = bell_operator(s, Z_CHSH)
    assert np.linalg.norm(op - op.conj().T) <= 1e-12
    assert np.isclose(np.trace(op).real, 0.0)
    # Tr[(a.sigma) sigma_i] = 2 a_i on each side, so the block is 4 A^T Z B
    p = pauli_expand(op)
    assert np.linalg.norm(p.t - 4.0 * s.a.T @ np.asarray(Z_CHSH) @ s.b) <= 1e-10


def test_bell_operator_spectra():
    swap_like = bell_operator(pauli_settings(), np.eye(3))
    assert np.allclose(eigenvalues_hermitian(swap_like), [-3.0, 1.0, 1.0, 1.0])
    chsh_op = bell_operator(chsh_settings(), Z_CHSH)
    root8 = 2.0 * np.sqrt(2.0)
    assert np.allclose(eigenvalues_hermitian(chsh_op), [-root8, 0.0, 0.0, root8])


def test_partial_transpose_involution():
    for _ in range(50):
        rho = random_quantum_state(RNG)
        assert np.linalg.norm(partial_transpose(partial_transpose(rho)) - rho) == 0.0
        assert np.isclose(np.trace(partial_transpose(rho)), np.trace(rho))


def test_partial_transpose_detects_entanglement():
    # Phi+ has negative partial transpose, any product state does not
    assert eigenvalues_hermitian(partial_transpose(werner_state(0.0)))[0] < -0.49
    for _ in range(20):
        rho = random_separable_state(RNG)
        assert eigenvalues_hermitian(partial_transpose(rho))[0] >= -1e-10


def test_werner_ppt_boundary():
    # min eigenvalue of the partial transpose is p/4 - (1-p)/2, zero at 2/3
    for p, sep in ((0.6, False), (0.64, False), (0.68, True), (0.75, True)):
        low = eigenvalues_hermitian(partial_transpose(werner_state(p)))[0]
        assert (low >= -1e-12) == sep
    boundary = eigenvalues_hermitian(partial_transpose(werner_state(2.0 / 3.0)))[0]
    assert abs(boundary) <= 1e-12


def test_apply_theta_flips_correlations():
    for _ in range(50):
        rho = random_quantum_state(RNG)
        p = pauli_expand(rho)
        q = pauli_expand(apply_theta(rho))
        assert np.isclose(q.weight, p.weight)
        assert np.linalg.norm(q.t + p.t) <= 1e-10


def test_apply_theta_preserves_separability():
    for _ in range(20):
        rho = random_separable_state(RNG)
        out = apply_theta(rho)
        assert eigenvalues_hermitian(out)[0] >= -1e-9
        assert eigenvalues_hermitian(partial_transpose(out))[0] >= -1e-9


def test_classify_werner_family():
    half = classify_state(werner_state(0.5))
    assert half.is_quantum and not half.is_separable
    deep = classify_state(werner_state(0.8))
    assert deep.is_quantum and deep.is_separable and deep.is_block_positive
    pure = classify_state(werner_state(0.0))
    assert pure.is_quantum and not pure.is_separable


def test_classify_rho_max():
    cls = classify_state(rho_max())
    assert not cls.is_quantum
    assert not cls.is_separable
    assert cls.is_block_positive
    assert abs(cls.min_product_overlap) <= 1e-6


def test_classify_tau_boundary():
    assert not classify_state(tau_state(0.6)).is_quantum
    assert classify_state(tau_state(0.7)).is_quantum
    # exactly on the boundary the smallest eigenvalue is zero
    evs = eigenvalues_hermitian(tau_state(2.0 / 3.0))
    assert abs(evs[0]) <= 1e-12


def test_classify_rejects_bad_trace():
    with pytest.raises(ValueError):
        classify_state(2.0 * werner_state(0.5))


def test_block_positivity_on_rho_max():
    # min over unit u, v of 1 + u.v is 0, attained at antipodal pairs
    value, u, v = block_positivity_minimum(pauli_expand(rho_max()))
    assert abs(value) <= 1e-7
    assert np.isclose(np.linalg.norm(u), 1.0)
    assert np.isclose(np.linalg.norm(v), 1.0)
    assert np.isclose(u @ v, -1.0, atol=1e-6)


def test_block_positivity_sees_negativity():
    p = pauli_expand(1.5 * rho_max() - 0.5 * np.eye(4) / 4.0)
    value, _, _ = block_positivity_minimum(p)
    assert value < -0.05


def test_hull_state_extremes():
    rot = np.eye(3)
    rho = hull_state(rot)
    assert np.isclose(np.trace(rho).real, 1.0)
    assert np.allclose(pauli_expand(rho).t, rot)
    with pytest.raises(ValueError):
        hull_state(np.diag([2.0, 1.0, 1.0]))


def test_max_entangled_states():
    rho = max_entangled(np.diag([1.0, -1.0, 1.0]))
    assert np.linalg.norm(rho - werner_state(0.0)) <= 1e-12
    evs = eigenvalues_hermitian(rho)
    assert np.allclose(evs, [0.0, 0.0, 0.0, 1.0], atol=1e-12)
    with pytest.raises(ValueError):
        max_entangled(np.eye(3))


def test_rho_max_spectrum():
    assert np.allclose(eigenvalues_hermitian(rho_max()), [-0.5, 0.5, 0.5, 0.5])


def test_state_family_validation():
    with pytest.raises(ValueError):
        werner_state(1.2)
    with pytest.raises(ValueError):
        tau_state(-0.1)
    with pytest.raises(ValueError):
        qubit_state([1.0, 1.0, 0.0])


def test_qubit_state_bloch():
    rho = qubit_state([0.0, 0.0, 1.0])
    assert np.allclose(rho, np.diag([1.0, 0.0]))
    mixed = qubit_state([0.3, -0.2, 0.1])
    assert np.isclose(np.trace(mixed).real, 1.0)
    assert np.linalg.eigvalsh(mixed)[0] >= 0.0


def test_samplers_produce_states():
    for draw in (random_product_state, random_separable_state,
                 random_quantum_state):
        for _ in range(25):
            rho = draw(RNG)
            assert np.isclose(np.trace(rho).real, 1.0)
            assert np.linalg.norm(rho - rho.conj().T) <= 1e-12
            assert np.linalg.eigvalsh(rho)[0] >= -1e-10


def test_product_states_have_rank_one_blocks():
    for _ in range(25):
        p = pauli_expand(random_product_state(RNG))
        assert np.linalg.matrix_rank(p.t, tol=1e-10) <= 1
        assert np.linalg.norm(p.t - np.outer(p.ra, p.rb)) <= 1e-10
