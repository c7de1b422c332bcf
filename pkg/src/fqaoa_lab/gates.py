"""Gate and circuit containers.

Gates address lattice sites 1..n (the snake ordering); the statevector
engine maps site i to bit position i-1.  Two-site gate matrices use the
basis index b = bit(sites[0]) + 2*bit(sites[1]).

A circuit stores the literal gate stream (used for counting and audit
dumps) and, in parallel, a fused representation in which each logical
block (hop, FSWAP, Givens rotation, ZZ interaction) is collapsed into a
single dense matrix on its support.  Both representations implement the
same unitary; the fused one is what the dynamics code executes.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SINGLE_SPECIES = frozenset({"X", "H", "RX", "RY", "RZ"})
TWO_SPECIES = frozenset({"CNOT", "SWAP", "CRY", "CRZ", "DENSE2"})

_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
_H = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)
_I2 = np.eye(2, dtype=complex)

UNITARY_TOL = 1e-9


def _rot(axis: np.ndarray, theta: float) -> np.ndarray:
    return np.cos(theta / 2) * _I2 - 1j * np.sin(theta / 2) * axis


@dataclass(frozen=True, eq=False)
class Gate:
    species: str
    sites: tuple[int, ...]
    angle: float | None = None
    matrix: np.ndarray | None = None  # DENSE2 payload

    def __post_init__(self) -> None:
        if self.species in SINGLE_SPECIES:
            if len(self.sites) != 1:
                raise ValueError(f"{self.species} takes one site")
        elif self.species in TWO_SPECIES:
            if len(self.sites) != 2 or self.sites[0] == self.sites[1]:
                raise ValueError(f"{self.species} takes two distinct sites")
        else:
            raise ValueError(f"unknown gate species {self.species!r}")
        if any(s < 1 for s in self.sites):
            raise ValueError("site indices are 1-based")
        if self.species == "DENSE2":
            m = self.matrix
            if m is None or m.shape != (4, 4):
                raise ValueError("DENSE2 needs a 4x4 matrix")
            if np.max(np.abs(m @ m.conj().T - np.eye(4))) > UNITARY_TOL:
                raise ValueError("DENSE2 matrix is not unitary")

    @property
    def is_single(self) -> bool:
        return self.species in SINGLE_SPECIES

    def to_matrix(self) -> np.ndarray:
        """2x2 or 4x4 unitary in the b = bit(sites[0]) + 2*bit(sites[1]) basis."""
        s, a = self.species, self.angle
        if s == "X":
            return _X
        if s == "H":
            return _H
        if s == "RX":
            return _rot(_X, a)
        if s == "RY":
            return _rot(_Y, a)
        if s == "RZ":
            return _rot(_Z, a)
        if s == "DENSE2":
            return self.matrix
        m = np.eye(4, dtype=complex)
        if s == "CNOT":
            m[[1, 3], :] = m[[3, 1], :]
        elif s == "SWAP":
            m[[1, 2], :] = m[[2, 1], :]
        elif s == "CRY":
            m[np.ix_([1, 3], [1, 3])] = _rot(_Y, a)
        elif s == "CRZ":
            m[np.ix_([1, 3], [1, 3])] = _rot(_Z, a)
        return m


def _embed_on_pair(gate: Gate, pair: tuple[int, int]) -> np.ndarray:
    """Gate matrix promoted to the two-site support ``pair``."""
    m = gate.to_matrix()
    if len(gate.sites) == 2:
        if gate.sites == pair:
            return m
        if gate.sites == (pair[1], pair[0]):
            sw = np.eye(4)[[0, 2, 1, 3]]
            return sw @ m @ sw
        raise ValueError("gate acts outside the block support")
    if gate.sites[0] == pair[0]:
        return np.kron(_I2, m)  # sites[0] is the low bit
    if gate.sites[0] == pair[1]:
        return np.kron(m, _I2)
    raise ValueError("gate acts outside the block support")


@dataclass
class Circuit:
    """Ordered gate list with species tags plus a fused execution form."""

    num_sites: int
    label: str = ""
    gates: list[Gate] = field(default_factory=list)
    fused: list[tuple[tuple[int, ...], np.ndarray]] = field(default_factory=list)

    def _check_sites(self, gate: Gate) -> None:
        if max(gate.sites) > self.num_sites:
            raise ValueError(
                f"gate on sites {gate.sites} outside 1..{self.num_sites}"
            )

    def append(self, gate: Gate) -> None:
        self._check_sites(gate)
        self.gates.append(gate)
        self.fused.append((gate.sites, gate.to_matrix()))

    def append_block(self, gates: list[Gate]) -> None:
        """Append gates that jointly act on one adjacent pair as one block."""
        support: set[int] = set()
        for g in gates:
            self._check_sites(g)
            support.update(g.sites)
        pair = tuple(sorted(support))
        if len(pair) != 2:
            raise ValueError("block must span exactly two sites")
        m = np.eye(4, dtype=complex)
        for g in gates:
            m = _embed_on_pair(g, pair) @ m
        self.gates.extend(gates)
        self.fused.append((pair, m))

    def counts(self) -> tuple[int, int]:
        """(single-qubit, two-qubit) gate totals."""
        singles = sum(1 for g in self.gates if g.is_single)
        return singles, len(self.gates) - singles

    def extend(self, other: "Circuit") -> None:
        if other.num_sites != self.num_sites:
            raise ValueError("size mismatch")
        self.gates.extend(other.gates)
        self.fused.extend(other.fused)

    def dump(self) -> str:
        """One gate per line: species, sites, angle. For audit and diffing."""
        lines = []
        for g in self.gates:
            sites = " ".join(str(s) for s in g.sites)
            angle = "-" if g.angle is None else repr(g.angle)
            lines.append(f"{g.species} {sites} {angle}")
        return "\n".join(lines) + ("\n" if lines else "")
