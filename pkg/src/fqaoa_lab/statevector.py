"""Dense statevector engine over n = N*D qubits.

Basis index x is read little-endian: bit i-1 of x is the occupation of
snake-ordered site i.  Amplitudes live in one flat complex128 array of
length 2**n; practical up to n = 24.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .gates import Circuit, Gate

MAX_QUBITS = 24


@lru_cache(maxsize=16)
def hamming_weights(num_qubits: int) -> np.ndarray:
    """Hamming weight of every basis index, cached per register size."""
    w = np.bitwise_count(np.arange(1 << num_qubits, dtype=np.uint32))
    w.flags.writeable = False
    return w


def _apply_1q(amps: np.ndarray, q: int, u: np.ndarray) -> None:
    v = amps.reshape(-1, 2, 1 << q)
    a = v[:, 0, :].copy()
    b = v[:, 1, :]
    v[:, 0, :] = u[0, 0] * a + u[0, 1] * b
    v[:, 1, :] = u[1, 0] * a + u[1, 1] * b


def _apply_2q(amps: np.ndarray, qa: int, qb: int, u: np.ndarray) -> None:
    """Two-qubit gate; u is 4x4 in the b = bit(qa) + 2*bit(qb) basis."""
    if qb == qa + 1:
        v = amps.reshape(-1, 4, 1 << qa)
        v[...] = np.matmul(u, v)
        return
    if qa == qb + 1:
        sw = np.eye(4)[[0, 2, 1, 3]]
        v = amps.reshape(-1, 4, 1 << qb)
        v[...] = np.matmul(sw @ u @ sw, v)
        return
    idx = np.arange(amps.size)
    base = idx[((idx >> qa) & 1 == 0) & ((idx >> qb) & 1 == 0)]
    rows = (base, base | (1 << qa), base | (1 << qb),
            base | (1 << qa) | (1 << qb))
    v = np.stack([amps[r] for r in rows])
    v = u @ v
    for k, r in enumerate(rows):
        amps[r] = v[k]


class StateVector:
    """Mutable quantum register; gate application is in place."""

    __slots__ = ("num_qubits", "amplitudes")

    def __init__(self, num_qubits: int, amplitudes: np.ndarray | None = None):
        if not 1 <= num_qubits <= MAX_QUBITS:
            raise ValueError(f"register size must be 1..{MAX_QUBITS}")
        self.num_qubits = num_qubits
        if amplitudes is None:
            amplitudes = np.zeros(1 << num_qubits, dtype=complex)
            amplitudes[0] = 1.0
        else:
            amplitudes = np.asarray(amplitudes, dtype=complex)
            if amplitudes.shape != (1 << num_qubits,):
                raise ValueError("amplitude length must be 2**num_qubits")
            amplitudes = amplitudes.copy()
        self.amplitudes = amplitudes

    @classmethod
    def basis_state(cls, num_qubits: int, index: int) -> "StateVector":
        sv = cls(num_qubits)
        sv.amplitudes[0] = 0.0
        sv.amplitudes[index] = 1.0
        return sv

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def _bit(self, site: int) -> int:
        if not 1 <= site <= self.num_qubits:
            raise ValueError(f"site {site} outside 1..{self.num_qubits}")
        return site - 1

    def apply_gate(self, gate: Gate) -> "StateVector":
        m = gate.to_matrix()
        if gate.is_single:
            _apply_1q(self.amplitudes, self._bit(gate.sites[0]), m)
        else:
            _apply_2q(self.amplitudes, self._bit(gate.sites[0]),
                      self._bit(gate.sites[1]), m)
        return self

    def apply_dense(self, sites: tuple[int, ...], matrix: np.ndarray) -> "StateVector":
        if len(sites) == 1:
            _apply_1q(self.amplitudes, self._bit(sites[0]), matrix)
        else:
            _apply_2q(self.amplitudes, self._bit(sites[0]),
                      self._bit(sites[1]), matrix)
        return self

    def apply_circuit(self, circuit: Circuit, fused: bool = True) -> "StateVector":
        if circuit.num_sites != self.num_qubits:
            raise ValueError("circuit size mismatch")
        if fused:
            for sites, m in circuit.fused:
                self.apply_dense(sites, m)
        else:
            for g in circuit.gates:
                self.apply_gate(g)
        return self

    def phase_multiply(self, phases: np.ndarray) -> "StateVector":
        """Multiply amplitudes elementwise by a diagonal unitary."""
        self.amplitudes *= phases
        return self

    def expectation_diagonal(self, energies: np.ndarray) -> float:
        energies = np.asarray(energies)
        if energies.shape != self.amplitudes.shape:
            raise ValueError("diagonal length must be 2**num_qubits")
        return float(np.real(self.probabilities() @ energies))

    def sector_weight(self, hamming_weight: int) -> float:
        if not 0 <= hamming_weight <= self.num_qubits:
            raise ValueError("hamming weight out of range")
        mask = hamming_weights(self.num_qubits) == hamming_weight
        return float(self.probabilities()[mask].sum())

    def fidelity(self, other: "StateVector") -> float:
        """|<self|other>| (insensitive to global phase)."""
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)))
