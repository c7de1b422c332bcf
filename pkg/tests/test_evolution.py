"""Phase circuit, hop/FSWAP primitives, mixer layout and both backends."""
import numpy as np
import pytest
import scipy.linalg as sla
import scipy.sparse.linalg as spla

from fqaoa_lab.driver import build_driver
from fqaoa_lab.evolution import (
    FSWAP_DENSE,
    _mixer_ops,
    apply_mixer_exact,
    apply_mixer_trotter,
    apply_phase,
    build_mixer_layout,
    fswap_gate,
    hop_dense,
    hop_gate,
    synthesize_mixer_circuit,
    synthesize_phase_circuit,
)
from fqaoa_lab.analysis import power_law_slope
from fqaoa_lab.gates import Circuit
from fqaoa_lab.lattice import LatticeShape, ladder_edges
from fqaoa_lab.operators import ladder_hamiltonian
from fqaoa_lab.problem import build_diagonal, generate_instance
from fqaoa_lab.statevector import StateVector, hamming_weights


def random_state(n, seed, weight=None):
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    if weight is not None:
        amps[hamming_weights(n) != weight] = 0.0
    amps /= np.linalg.norm(amps)
    return StateVector(n, amps)


# --- phase rotation -----------------------------------------------------


def test_phase_gamma_zero_is_identity():
    inst = generate_instance(1, 4, 2, 2)
    ham = build_diagonal(inst)
    sv = random_state(8, 0)
    before = sv.amplitudes.copy()
    apply_phase(sv, 0.0, ham)
    np.testing.assert_allclose(sv.amplitudes, before, atol=1e-15)


def test_phase_on_basis_state_changes_only_phase():
    inst = generate_instance(1, 4, 2, 2)
    ham = build_diagonal(inst)
    sv = StateVector.basis_state(8, 37)
    apply_phase(sv, 2.1, ham)
    assert sv.amplitudes[37] == pytest.approx(np.exp(-2.1j * ham.energies[37]))
    assert sv.probabilities()[37] == pytest.approx(1.0)


def test_phase_additivity():
    inst = generate_instance(2, 4, 2, 2)
    ham = build_diagonal(inst)
    a = random_state(8, 1)
    b = a.copy()
    apply_phase(apply_phase(a, 0.4, ham), 0.9, ham)
    apply_phase(b, 1.3, ham)
    np.testing.assert_allclose(a.amplitudes, b.amplitudes, atol=1e-12)


def test_phase_circuit_counts():
    inst = generate_instance(3, 8, 2, 4)
    circ = synthesize_phase_circuit(0.5, inst)
    assert circ.counts() == (136, 240)
    inst4 = generate_instance(3, 4, 2, 2)
    assert synthesize_phase_circuit(0.5, inst4).counts() == (36, 56)


def test_phase_circuit_matches_diagonal_action():
    inst = generate_instance(5, 4, 2, 2)
    ham = build_diagonal(inst)
    gamma = 0.73
    circ = synthesize_phase_circuit(gamma, inst)
    sv = random_state(8, 2)
    direct = sv.copy()
    apply_phase(direct, gamma, ham)
    sv.apply_circuit(circ)
    assert abs(np.vdot(sv.amplitudes, direct.amplitudes)) > 1 - 1e-9


# --- hop gate -----------------------------------------------------------


def test_hop_identity_at_zero_angle():
    circ = Circuit(2, label="h")
    circ.append_block(hop_gate(1, 2, 0.0, 1.0))
    np.testing.assert_allclose(circ.fused[0][1], np.eye(4), atol=1e-12)


def test_hop_dense_matches_exponential():
    for bt in (0.3, -0.9, 2.2):
        xx_yy = np.zeros((4, 4), dtype=complex)
        xx_yy[1, 2] = xx_yy[2, 1] = 1.0
        np.testing.assert_allclose(hop_dense(bt), sla.expm(1j * bt * xx_yy),
                                   atol=1e-12)


def test_hop_circuit_equals_dense():
    for bt in (0.37, 1.4):
        circ = Circuit(2, label="h")
        circ.append_block(hop_gate(1, 2, bt, 1.0))
        np.testing.assert_allclose(circ.fused[0][1], hop_dense(bt), atol=1e-10)


def test_hop_full_transfer_at_quarter_period():
    u = hop_dense(np.pi / 2)
    assert abs(u[2, 1]) == pytest.approx(1.0)  # |01> fully transfers to |10>
    assert abs(hop_dense(0.6)[2, 1]) == pytest.approx(abs(np.sin(0.6)))


def test_hop_gate_species_counts():
    gates = hop_gate(3, 4, 0.5, 0.8)
    singles = sum(1 for g in gates if g.is_single)
    assert (singles, len(gates) - singles) == (6, 2)


def test_hop_rejects_non_adjacent():
    with pytest.raises(ValueError, match="adjacent"):
        hop_gate(1, 3, 0.5, 1.0)


# --- FSWAP --------------------------------------------------------------


def test_fswap_matrix():
    target = np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, -1]], dtype=complex
    )
    np.testing.assert_allclose(FSWAP_DENSE, target, atol=1e-12)
    circ = Circuit(2, label="f")
    circ.append_block(fswap_gate(1, 2))
    np.testing.assert_allclose(circ.fused[0][1], target, atol=1e-12)


def test_fswap_involution_and_counts():
    np.testing.assert_allclose(FSWAP_DENSE @ FSWAP_DENSE, np.eye(4), atol=1e-12)
    gates = fswap_gate(2, 3)
    singles = sum(1 for g in gates if g.is_single)
    assert (singles, len(gates) - singles) == (2, 2)
    with pytest.raises(ValueError):
        fswap_gate(2, 4)


def test_fswap_action_on_occupations():
    sv = StateVector.basis_state(2, 0b11)
    circ = Circuit(2, label="f")
    circ.append_block(fswap_gate(1, 2))
    sv.apply_circuit(circ)
    assert sv.amplitudes[0b11] == pytest.approx(-1.0)
    sv0 = StateVector.basis_state(2, 0)
    sv0.apply_circuit(circ)
    assert sv0.amplitudes[0] == pytest.approx(1.0)


# --- mixer layout -------------------------------------------------------


@pytest.mark.parametrize("n,d", [(4, 2), (6, 2), (8, 2), (4, 4), (6, 4)])
def test_layout_cardinalities(n, d):
    layout = build_mixer_layout(LatticeShape(n, d))
    assert layout.v_pre + layout.v_post == n
    assert layout.hops_per_mixer == 2 * n * d - n
    assert layout.fswaps_per_mixer == n * (n - 1) * d


def test_layout_rejects_odd_shapes():
    with pytest.raises(ValueError):
        build_mixer_layout(LatticeShape(5, 2))
    with pytest.raises(ValueError):
        build_mixer_layout(LatticeShape(4, 3))


@pytest.mark.parametrize("n,d", [(4, 2), (6, 2), (8, 2), (4, 4)])
def test_swap_network_covers_every_edge_once(n, d):
    """Track mode positions through the conveyor: each hop must land on a
    distinct ladder edge with the right hopping amplitude, and the final
    mode arrangement must return to the identity."""
    shape = LatticeShape(n, d)
    layout = build_mixer_layout(shape)
    t_par, t_perp = 1.25, 0.75
    perm = list(range(n * d + 1))
    hit = []
    for kind, i, t in _mixer_ops(layout, t_par, t_perp):
        if kind == "swap":
            perm[i], perm[i + 1] = perm[i + 1], perm[i]
        else:
            a, b = perm[i], perm[i + 1]
            hit.append((min(a, b), max(a, b), "par" if t == t_par else "perp"))
    assert perm == list(range(n * d + 1))
    assert sorted(hit) == sorted(ladder_edges(shape))


def test_mixer_counts():
    layout4 = build_mixer_layout(LatticeShape(4, 2))
    assert synthesize_mixer_circuit(0.3, layout4, 1.0, 1.0).counts() == (120, 72)
    layout8 = build_mixer_layout(LatticeShape(8, 2))
    assert synthesize_mixer_circuit(0.3, layout8, 1.0, 1.0).counts() == (368, 272)


def test_mixer_preserves_sector_weight_exactly():
    layout = build_mixer_layout(LatticeShape(4, 2))
    for weight in (2, 4):
        sv = random_state(8, 20 + weight, weight=weight)
        apply_mixer_trotter(sv, 0.8, layout, 1.0, 0.6)
        assert sv.sector_weight(weight) == pytest.approx(1.0, abs=1e-12)


def test_mixer_circuit_agrees_with_fast_path():
    layout = build_mixer_layout(LatticeShape(4, 2))
    circ = synthesize_mixer_circuit(0.43, layout, 1.1, 0.7)
    sv1 = random_state(8, 21)
    sv2 = sv1.copy()
    sv1.apply_circuit(circ)
    apply_mixer_trotter(sv2, 0.43, layout, 1.1, 0.7)
    np.testing.assert_allclose(sv1.amplitudes, sv2.amplitudes, atol=1e-10)


def test_mixer_norm_drift_over_deep_ansatz():
    layout = build_mixer_layout(LatticeShape(4, 2))
    inst = generate_instance(4, 4, 2, 2)
    ham = build_diagonal(inst)
    sv = random_state(8, 22, weight=2)
    for j in range(10):
        apply_phase(sv, 0.1 * (j + 1), ham)
        apply_mixer_trotter(sv, 0.8 / (j + 1), layout, 1.0, 1.0)
    assert abs(sv.norm() - 1.0) < 1e-9


# --- exact backend ------------------------------------------------------


def test_exact_mixer_zero_angle_is_identity():
    drv = build_driver(LatticeShape(4, 2), 0.9, 0.9)
    sv = random_state(8, 23)
    before = sv.amplitudes.copy()
    apply_mixer_exact(sv, 0.0, drv)
    np.testing.assert_allclose(sv.amplitudes, before, atol=1e-9)


def test_exact_mixer_matches_sparse_exponential():
    drv = build_driver(LatticeShape(4, 2), 1.2, 0.5)
    h = ladder_hamiltonian(drv).tocsc()
    for beta in (0.37, 1.9):
        sv = random_state(8, 24)
        ref = spla.expm_multiply(-1j * beta * h, sv.amplitudes)
        apply_mixer_exact(sv, beta, drv)
        np.testing.assert_allclose(sv.amplitudes, ref, atol=1e-9)


def test_exact_mixer_phases_eigenstate():
    import warnings as w

    from fqaoa_lab.driver import occupied_orbital_matrix, select_occupied
    from fqaoa_lab.state_prep import slater_amplitudes

    drv = build_driver(LatticeShape(4, 2))
    with w.catch_warnings():
        w.simplefilter("ignore")
        sel = select_occupied(drv, 4)
    ground = slater_amplitudes(occupied_orbital_matrix(drv, sel))
    sv = ground.copy()
    apply_mixer_exact(sv, 0.41, drv)
    np.testing.assert_allclose(
        sv.amplitudes, np.exp(-0.41j * sel.e0) * ground.amplitudes, atol=1e-9
    )


def test_trotter_error_is_second_order_at_six_vertices():
    """Log-log slope 2 of the Trotter deviation, measured where the
    deviation is nonzero (see the companion exactness test below)."""
    shape = LatticeShape(6, 2)
    drv = build_driver(shape, 0.9, 0.9)
    layout = build_mixer_layout(shape)
    sv0 = random_state(12, 25, weight=3)
    betas = [0.2, 0.1, 0.05, 0.025]
    errs = []
    for b in betas:
        trot = sv0.copy()
        apply_mixer_trotter(trot, b, layout, drv.t_par, drv.t_perp)
        exact = sv0.copy()
        apply_mixer_exact(exact, b, drv)
        errs.append(np.linalg.norm(trot.amplitudes - exact.amplitudes))
    slope = power_law_slope(betas, errs)
    assert slope == pytest.approx(2.0, abs=0.1)


def test_trotter_is_exact_on_four_vertex_two_leg_ladder():
    """At N=4, D=2 the published factorization reproduces exp(-i beta H_t)
    to machine precision for any beta and hopping values, so no Trotter
    order can be measured at that shape."""
    shape = LatticeShape(4, 2)
    drv = build_driver(shape, 1.3, 0.6)
    layout = build_mixer_layout(shape)
    for beta in (0.025, 0.2, 1.0, 3.0):
        sv = random_state(8, 26, weight=2)
        ref = sv.copy()
        apply_mixer_exact(ref, beta, drv)
        apply_mixer_trotter(sv, beta, layout, drv.t_par, drv.t_perp)
        assert np.linalg.norm(sv.amplitudes - ref.amplitudes) < 1e-12
