"""Comparison ansatze: quadratic-penalty X mixing and ring-exchange XY
mixing with constraint-satisfying initial states.

Initial states are assembled directly as amplitude vectors; the gate
cost of preparing them on hardware is reported through the published
closed-form counts instead of synthesized circuits.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from .evolution import hop_dense
from .lattice import LatticeShape, site_to_index
from .problem import DiagonalHamiltonian
from .statevector import StateVector, hamming_weights


@dataclass(frozen=True, eq=False)
class PenaltyProblem:
    """Diagonal cost plus A * (total spin-z minus holding target)^2.

    The penalty vanishes identically on the feasible sector, where the
    Hamming weight equals the particle number.
    """

    base: DiagonalHamiltonian
    strength: float
    penalized_energies: np.ndarray


def make_penalty(base: DiagonalHamiltonian, strength: float = 0.003) -> PenaltyProblem:
    weights = hamming_weights(base.num_qubits).astype(float)
    violation = weights - base.m_prime  # = M - sum_i s_z(x)
    return PenaltyProblem(
        base=base,
        strength=strength,
        penalized_energies=base.energies + strength * violation**2,
    )


def plus_state(num_qubits: int) -> StateVector:
    """Uniform superposition, the transverse-field ground state."""
    dim = 1 << num_qubits
    return StateVector(num_qubits, np.full(dim, 1.0 / np.sqrt(dim), dtype=complex))


def x_qaoa_step(state: StateVector, gamma: float, beta: float,
                pen: PenaltyProblem) -> StateVector:
    """One penalized phase rotation followed by exp(-i beta H_X).

    H_X = -2 sum s^x, so the mixing layer is RX(-2 beta) on every qubit;
    both factors are exact.
    """
    state.phase_multiply(np.exp(-1j * gamma * pen.penalized_energies))
    rx = np.array(
        [[np.cos(beta), 1j * np.sin(beta)], [1j * np.sin(beta), np.cos(beta)]]
    )
    for site in range(1, state.num_qubits + 1):
        state.apply_dense((site,), rx)
    return state


def _require_two_legs(d: int) -> None:
    if d != 2:
        raise ValueError("XY baseline states are defined for D = 2 only")


def build_phi_i(n: int, m: int, d: int = 2) -> StateVector:
    """Long positions on stocks 1..M, equal no-hold mixtures elsewhere."""
    _require_two_legs(d)
    if not 0 <= m <= n:
        raise ValueError("holdings must lie in 0..N")
    shape = LatticeShape(n, d)
    free = list(range(m + 1, n + 1))
    amps = np.zeros(1 << shape.num_sites, dtype=complex)
    amp = 2.0 ** (-len(free) / 2.0)
    for choice in product((1, 2), repeat=len(free)):
        index = 0
        for l, which in zip(free, choice):
            index |= 1 << (site_to_index(l, which, shape) - 1)
        amps[index] = amp
    return StateVector(shape.num_sites, amps)


def build_phi_ii(n: int, m: int, d: int = 2) -> StateVector:
    """Permutation-symmetrized variant: uniform over all strings with M
    stocks long and the rest in single-occupation (no-hold) states."""
    _require_two_legs(d)
    if not 0 <= m <= n:
        raise ValueError("holdings must lie in 0..N")
    shape = LatticeShape(n, d)
    amps = np.zeros(1 << shape.num_sites, dtype=complex)
    stocks = range(1, n + 1)
    support = []
    for free in combinations(stocks, n - m):
        for choice in product((1, 2), repeat=len(free)):
            index = 0
            for l, which in zip(free, choice):
                index |= 1 << (site_to_index(l, which, shape) - 1)
            support.append(index)
    amps[support] = 1.0 / np.sqrt(len(support))
    return StateVector(shape.num_sites, amps)


def xy_exchange_layers(shape: LatticeShape) -> list[list[tuple[int, int]]]:
    """Commuting exchange-pair layers per leg ring: even-l, odd-l, boundary."""
    n = shape.vertices_per_leg
    if n % 2:
        raise ValueError("ring layering needs even N")
    even, odd, boundary = [], [], []
    for d in range(1, shape.legs + 1):
        for l in range(2, n - 1, 2):
            even.append((site_to_index(l, d, shape), site_to_index(l + 1, d, shape)))
        for l in range(1, n, 2):
            odd.append((site_to_index(l, d, shape), site_to_index(l + 1, d, shape)))
        boundary.append((site_to_index(n, d, shape), site_to_index(1, d, shape)))
    return [even, odd, boundary]


def xy_mixer_step(state: StateVector, beta: float,
                  shape: LatticeShape) -> StateVector:
    """Trotterized exp(-i beta H_XY) over the leg rings.

    Each pair receives exp(2 i beta (s^x s^x + s^y s^y)), a dense
    two-qubit rotation; every factor conserves the Hamming weight.
    """
    u = hop_dense(beta)
    for layer in xy_exchange_layers(shape):
        for pair in layer:
            state.apply_dense(pair, u)
    return state


def dicke_gate_counts(n: int, m: int) -> dict[str, tuple[int, int]]:
    """Published closed-form gate counts for the symmetrized initial state.

    Returns (singles, twos) for the Dicke sub-circuit alone and for the
    full permutation-symmetric preparation.  Counts only; no circuit is
    synthesized.  The formulas degenerate outside 1 <= M <= N-1.
    """
    if not 1 <= m <= n - 1:
        raise ValueError("Dicke count formulas require 1 <= M <= N-1")
    dicke = (4 * n * m - 4 * m**2 - 2 * n + 1, 5 * n * m - 5 * m**2 - 2 * n)
    full = (4 * n * m - 4 * m**2 + 4 * n + 1, 5 * m * (n - m))
    return {"dicke": dicke, "phi_ii_prep": full}
