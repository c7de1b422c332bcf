"""Slater-determinant state synthesis via nearest-neighbour Givens rotations.

Pipeline: a row-mixing unitary V zeroes the upper-right triangle of the
occupied orbital matrix; adjacent-column Givens rotations then reduce it
to phases on the leading diagonal.  Undoing those rotations after X
gates on the first M' sites prepares the determinant on the register.
Global phases (det V, the diagonal phases, the accumulated half-angles)
are dropped throughout.

``slater_amplitudes`` computes the same state directly from column
determinants and serves as the independent oracle for the circuit path.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .gates import Circuit, Gate
from .statevector import StateVector

ZERO_TOL = 1e-12
PATTERN_TOL = 1e-10


@dataclass(frozen=True)
class GivensRotation:
    """One rotation on snake-adjacent columns (site, site+1)."""

    site: int
    theta: float
    phi: float


@dataclass(frozen=True)
class GivensPlan:
    """X-gate sites plus rotations in elimination order."""

    num_sites: int
    x_sites: tuple[int, ...]
    rotations: tuple[GivensRotation, ...]


def _check_orthonormal_rows(mat: np.ndarray) -> None:
    m = mat.shape[0]
    if m == 0:
        return
    gram = mat @ mat.conj().T
    if np.max(np.abs(gram - np.eye(m))) > 1e-9:
        raise ValueError("rows must be orthonormal")


def zero_upper_triangle(phi_occ: np.ndarray) -> np.ndarray:
    """Left-multiply by row rotations until W[j, c] = 0 for c > n - m + j.

    The mixing matrix is unphysical (it only reshuffles which orbitals
    represent the same determinant), so it is applied numerically and
    discarded; only the transformed orbital matrix is returned.
    """
    w = np.array(phi_occ, dtype=complex)
    m, n = w.shape
    if m > n:
        raise ValueError("need at most as many orbitals as sites")
    _check_orthonormal_rows(w)
    for c in range(n, n - m + 1, -1):          # columns n .. n-m+2
        for j in range(1, c - (n - m)):        # rows with n-m+j < c
            a, b = w[j - 1, c - 1], w[j, c - 1]
            r = np.hypot(abs(a), abs(b))
            if abs(a) <= ZERO_TOL or r <= ZERO_TOL:
                continue
            rot = np.array([[b, -a], [np.conj(a), np.conj(b)]]) / r
            w[j - 1 : j + 1, :] = rot @ w[j - 1 : j + 1, :]
            w[j - 1, c - 1] = 0.0
    return w


def _zero_pattern_holds(w: np.ndarray) -> bool:
    m, n = w.shape
    for j in range(1, m + 1):
        if np.max(np.abs(w[j - 1, n - m + j :]), initial=0.0) > PATTERN_TOL:
            return False
    return True


def _solve_rotation(a: complex, b: complex) -> tuple[float, float]:
    """Angles (theta, phi) with a*sin(theta) + b*exp(-i phi)*cos(theta) = 0."""
    theta = np.arctan2(abs(b), abs(a))
    phi = np.angle(b) - np.angle(a) + np.pi
    phi = (phi + np.pi) % (2.0 * np.pi) - np.pi
    if phi <= -np.pi:
        phi += 2.0 * np.pi
    return float(theta), float(phi)


def _apply_column_rotation(w: np.ndarray, col: int, theta: float, phi: float) -> None:
    """Right-multiply columns (col, col+1), 1-based, by the conjugated rotation."""
    c, s = np.cos(theta), np.sin(theta)
    e = np.exp(-1j * phi)
    left = w[:, col - 1].copy()
    right = w[:, col].copy()
    w[:, col - 1] = c * left - e * s * right
    w[:, col] = s * left + e * c * right


def givens_decompose(v_phi: np.ndarray, skip_trivial: bool = False) -> GivensPlan:
    """Anti-diagonal wavefront elimination into nearest-neighbour rotations.

    Entries (row r, column c) with r < c <= n - m + r are annihilated in
    waves of constant c - 2r, descending, ascending r within each wave;
    rows finish as phased unit vectors.  Entries that are already zero
    emit an identity rotation so the plan always holds m*(n - m)
    rotations and the synthesized gate count matches the closed forms
    even for symmetric (non-generic) orbital matrices; pass
    ``skip_trivial`` to drop them instead.
    """
    w = np.array(v_phi, dtype=complex)
    m, n = w.shape
    if not _zero_pattern_holds(w):
        raise ValueError("input violates the zeroed-triangle pattern")
    rotations: list[GivensRotation] = []
    for s in range(n - m - 1, -m, -1):
        for r in range(1, m + 1):
            c = s + 2 * r
            if not r < c <= n - m + r:
                continue
            b = w[r - 1, c - 1]
            if abs(b) <= ZERO_TOL:
                if not skip_trivial:
                    rotations.append(GivensRotation(site=c - 1, theta=0.0, phi=0.0))
                continue
            theta, phi = _solve_rotation(w[r - 1, c - 2], b)
            _apply_column_rotation(w, c - 1, theta, phi)
            w[r - 1, c - 1] = 0.0
            rotations.append(GivensRotation(site=c - 1, theta=theta, phi=phi))
    if m:
        resid = w.copy()
        diag_mag = np.abs(np.diagonal(resid)).copy()
        for j in range(m):
            resid[j, j] = 0.0
        if (np.max(np.abs(resid)) > PATTERN_TOL
                or np.max(np.abs(diag_mag - 1.0)) > PATTERN_TOL):
            raise ValueError("elimination failed to reach diagonal form")
    return GivensPlan(
        num_sites=n,
        x_sites=tuple(range(1, m + 1)),
        rotations=tuple(rotations),
    )


def givens_dense(theta: float, phi: float) -> np.ndarray:
    """4x4 matrix of one Givens operator on an adjacent pair.

    Basis b = bit(i) + 2*bit(i+1): a rotation in the single-particle
    subspace followed by the phase exp(-i phi (1/2 - n_{i+1})).
    """
    c, s = np.cos(theta), np.sin(theta)
    rot = np.eye(4, dtype=complex)
    rot[1, 1] = c
    rot[2, 2] = c
    rot[2, 1] = -s
    rot[1, 2] = s
    phase = np.exp(-1j * phi * np.array([0.5, 0.5, -0.5, -0.5]))
    return phase[:, None] * rot


def givens_gates(site: int, theta: float, phi: float) -> list[Gate]:
    """Drawn decomposition: CNOT, controlled-RY(-2 theta), CNOT, RZ(phi)."""
    i = site
    return [
        Gate("CNOT", (i + 1, i)),
        Gate("CRY", (i, i + 1), angle=-2.0 * theta),
        Gate("CNOT", (i + 1, i)),
        Gate("RZ", (i + 1,), angle=phi),
    ]


def synthesize_init_circuit(plan: GivensPlan) -> Circuit:
    """X gates on the occupied seed sites, then rotations in reverse order."""
    circ = Circuit(plan.num_sites, label="init")
    for s in plan.x_sites:
        circ.append(Gate("X", (s,)))
    for rot in reversed(plan.rotations):
        circ.append_block(givens_gates(rot.site, rot.theta, rot.phi))
    return circ


def slater_amplitudes(occ_orbitals: np.ndarray) -> StateVector:
    """Determinant oracle: amplitude of occupied set S is det(Q[:, S]).

    Exact expansion of the free-fermion state; nonzero only on strings
    of Hamming weight equal to the orbital count.
    """
    q = np.asarray(occ_orbitals, dtype=complex)
    m, n = q.shape
    _check_orthonormal_rows(q)
    amps = np.zeros(1 << n, dtype=complex)
    if m == 0:
        amps[0] = 1.0
        return StateVector(n, amps)
    subsets = list(combinations(range(n), m))
    blocks = np.stack([q[:, list(s)] for s in subsets])
    dets = np.linalg.det(blocks)
    for s, det in zip(subsets, dets):
        index = 0
        for site in s:
            index |= 1 << site
        amps[index] = det
    norm = np.linalg.norm(amps)
    if abs(norm - 1.0) > 1e-10:
        raise ValueError("determinant expansion lost normalization")
    return StateVector(n, amps / norm)


def prepare_initial_state(occ_orbitals: np.ndarray,
                          via_circuit: bool = True) -> tuple[StateVector, Circuit, GivensPlan]:
    """Full pipeline from occupied orbitals to the register state."""
    v_phi = zero_upper_triangle(occ_orbitals)
    plan = givens_decompose(v_phi)
    circuit = synthesize_init_circuit(plan)
    if via_circuit:
        state = StateVector(plan.num_sites)
        state.apply_circuit(circuit)
    else:
        state = slater_amplitudes(occ_orbitals)
    return state, circuit, plan
