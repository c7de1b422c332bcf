"""Givens synthesis against the determinant oracle."""
import warnings

import numpy as np
import pytest

from fqaoa_lab.driver import build_driver, occupied_orbital_matrix, select_occupied
from fqaoa_lab.lattice import LatticeShape
from fqaoa_lab.operators import expectation, ladder_hamiltonian, variance
from fqaoa_lab.state_prep import (
    givens_decompose,
    givens_dense,
    givens_gates,
    prepare_initial_state,
    slater_amplitudes,
    synthesize_init_circuit,
    zero_upper_triangle,
)
from fqaoa_lab.statevector import StateVector


def random_orthonormal_rows(m, n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, m)) + 1j * rng.normal(size=(n, m))
    q, _ = np.linalg.qr(a)
    return q.T[:m].conj()


def ladder_occupied(n, d, m_prime, t_par=1.0, t_perp=1.0):
    drv = build_driver(LatticeShape(n, d), t_par, t_perp)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sel = select_occupied(drv, m_prime)
    return drv, sel, occupied_orbital_matrix(drv, sel)


def max_dev_up_to_phase(a: np.ndarray, b: np.ndarray) -> float:
    k = int(np.argmax(np.abs(b)))
    phase = a[k] / b[k]
    return float(np.max(np.abs(a - phase * b)))


# --- zeroing ------------------------------------------------------------


def test_zero_pattern_on_random_input():
    q = random_orthonormal_rows(4, 8, 1)
    w = zero_upper_triangle(q)
    for j in range(1, 5):
        assert np.max(np.abs(w[j - 1, 8 - 4 + j:]), initial=0.0) < 1e-12
    gram = w @ w.conj().T
    assert np.max(np.abs(gram - np.eye(4))) < 1e-9


def test_zeroing_single_row_is_trivial_region():
    q = random_orthonormal_rows(1, 6, 2)
    w = zero_upper_triangle(q)
    np.testing.assert_allclose(w, q, atol=1e-12)


def test_zeroing_identity_block_unchanged():
    q = np.zeros((3, 6), dtype=complex)
    q[0, 0] = q[1, 1] = q[2, 2] = 1.0
    np.testing.assert_allclose(zero_upper_triangle(q), q, atol=1e-14)


def test_zeroing_rejects_non_orthonormal():
    with pytest.raises(ValueError, match="orthonormal"):
        zero_upper_triangle(np.ones((2, 4)))


# --- decomposition ------------------------------------------------------


def test_diagonal_input_yields_trivial_rotations():
    q = np.zeros((2, 5), dtype=complex)
    q[0, 0] = 1.0
    q[1, 1] = np.exp(0.3j)
    plan = givens_decompose(q, skip_trivial=True)
    assert plan.rotations == ()
    full = givens_decompose(q)
    assert len(full.rotations) == 2 * 3
    assert all(r.theta == 0.0 for r in full.rotations)


def test_ladder_4x2_has_sixteen_rotations():
    _, _, occ = ladder_occupied(4, 2, 4)
    plan = givens_decompose(zero_upper_triangle(occ))
    assert len(plan.rotations) == 16
    assert plan.x_sites == (1, 2, 3, 4)


def test_rotation_count_formula():
    for (n, d, m_prime) in [(4, 2, 2), (8, 2, 4), (4, 4, 6)]:
        _, _, occ = ladder_occupied(n, d, m_prime)
        plan = givens_decompose(zero_upper_triangle(occ))
        assert len(plan.rotations) == m_prime * (n * d - m_prime)


def test_rotations_address_adjacent_sites():
    q = random_orthonormal_rows(3, 8, 3)
    plan = givens_decompose(zero_upper_triangle(q))
    for r in plan.rotations:
        assert 1 <= r.site < 8
        assert 0.0 <= r.theta < np.pi
        assert -np.pi < r.phi <= np.pi


def test_decompose_rejects_wrong_pattern():
    q = random_orthonormal_rows(3, 6, 4)  # upper triangle not zeroed
    with pytest.raises(ValueError, match="pattern"):
        givens_decompose(q)


def test_givens_gates_equal_dense_block():
    rng = np.random.default_rng(5)
    for _ in range(4):
        theta = rng.uniform(0, np.pi)
        phi = rng.uniform(-np.pi, np.pi)
        from fqaoa_lab.gates import Circuit

        circ = Circuit(2, label="g")
        circ.append_block(givens_gates(1, theta, phi))
        np.testing.assert_allclose(circ.fused[0][1],
                                   givens_dense(theta, phi), atol=1e-12)


# --- circuit vs oracle --------------------------------------------------


def test_single_orbital_unit_vector():
    q = np.zeros((1, 4), dtype=complex)
    q[0, 0] = 1.0
    sv = slater_amplitudes(q)
    assert sv.amplitudes[1] == pytest.approx(1.0)


def test_two_identity_orbitals():
    q = np.zeros((2, 4), dtype=complex)
    q[0, 0] = q[1, 1] = 1.0
    sv = slater_amplitudes(q)
    assert abs(sv.amplitudes[0b11]) == pytest.approx(1.0)


def test_empty_orbitals_give_vacuum():
    sv = slater_amplitudes(np.zeros((0, 4)))
    assert sv.amplitudes[0] == pytest.approx(1.0)


@pytest.mark.parametrize("m,n,seed", [(1, 4, 7), (2, 6, 8), (3, 6, 9), (4, 8, 10)])
def test_circuit_matches_oracle_random_orbitals(m, n, seed):
    q = random_orthonormal_rows(m, n, seed)
    state, _, _ = prepare_initial_state(q)
    oracle = slater_amplitudes(q)
    assert max_dev_up_to_phase(state.amplitudes, oracle.amplitudes) < 1e-8


def test_circuit_matches_oracle_ladder_states():
    for (n, d, m_prime) in [(4, 2, 2), (4, 2, 4), (8, 2, 4)]:
        _, _, occ = ladder_occupied(n, d, m_prime)
        state, circuit, plan = prepare_initial_state(occ)
        oracle = slater_amplitudes(occ)
        assert max_dev_up_to_phase(state.amplitudes, oracle.amplitudes) < 1e-8
        singles, twos = circuit.counts()
        n_g = len(plan.rotations)
        assert singles == n_g + m_prime
        assert twos == 3 * n_g


def test_full_filling_gives_all_ones_string():
    _, _, occ = ladder_occupied(4, 2, 8)
    state, circuit, plan = prepare_initial_state(occ)
    assert len(plan.rotations) == 0
    assert abs(abs(state.amplitudes[0xFF]) - 1.0) < 1e-10


def test_prepared_state_is_driver_ground_state():
    drv, sel, occ = ladder_occupied(4, 2, 4, t_par=0.8, t_perp=0.8)
    state, _, _ = prepare_initial_state(occ)
    h = ladder_hamiltonian(drv)
    assert expectation(h, state.amplitudes) == pytest.approx(sel.e0, abs=1e-8)
    assert variance(h, state.amplitudes) < 1e-9
    assert state.sector_weight(4) == pytest.approx(1.0, abs=1e-10)


def test_oracle_state_normalized_and_sector_pure():
    _, _, occ = ladder_occupied(6, 2, 3)
    sv = slater_amplitudes(occ)
    assert abs(sv.norm() - 1.0) < 1e-10
    assert sv.sector_weight(3) == pytest.approx(1.0, abs=1e-12)


def test_synthesize_order_reverses_plan():
    q = random_orthonormal_rows(2, 5, 11)
    plan = givens_decompose(zero_upper_triangle(q))
    circ = synthesize_init_circuit(plan)
    # first gates are the X seeds, then blocks in reverse plan order
    x_gates = [g for g in circ.gates[: len(plan.x_sites)]]
    assert all(g.species == "X" for g in x_gates)
    first_block_site = circ.gates[len(plan.x_sites)].sites
    assert plan.rotations[-1].site in first_block_site


def test_unfused_circuit_agrees_with_fused():
    q = random_orthonormal_rows(3, 6, 12)
    plan = givens_decompose(zero_upper_triangle(q))
    circ = synthesize_init_circuit(plan)
    a = StateVector(6).apply_circuit(circ, fused=True)
    b = StateVector(6).apply_circuit(circ, fused=False)
    np.testing.assert_allclose(a.amplitudes, b.amplitudes, atol=1e-10)
