"""Phase rotation and Trotterized mixing unitaries.

The phase unitary is diagonal and applied exactly.  The mixer Trotter
step walks the ladder's bonds: leg bonds in two parallel layers, rung
and periodic bonds through a fermionic-swap conveyor that repeatedly
shifts modes along each leg so every out-of-order bond becomes nearest
neighbour exactly once per application.

An exact mixer backend rotates into the driver's orbital eigenbasis
with a nearest-neighbour Givens network, applies the orbital phases,
and rotates back; it cross-validates the Trotterized circuit.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import ceil

import numpy as np

from .driver import LadderDriver
from .gates import Circuit, Gate
from .lattice import LatticeShape, site_to_index
from .problem import DiagonalHamiltonian, PortfolioInstance, _stock_columns
from .state_prep import _solve_rotation, givens_dense
from .statevector import StateVector


# ---------------------------------------------------------------------------
# phase rotation


def apply_phase(state: StateVector, gamma: float,
                ham: DiagonalHamiltonian) -> StateVector:
    """exp(-i gamma H_p): exact diagonal action, no Trotterization."""
    return state.phase_multiply(np.exp(-1j * gamma * ham.energies))


def synthesize_phase_circuit(gamma: float, inst: PortfolioInstance) -> Circuit:
    """ZZ block per site pair plus one RZ per site.

    Every unordered pair is emitted (dense covariance assumed), so the
    species counts depend only on the register size.  The circuit equals
    the exact diagonal action up to a global phase.
    """
    n_sites = inst.num_sites
    lam, m = inst.risk_tolerance, inst.holdings
    stock_of = np.empty(n_sites, dtype=int)
    for l, cols in enumerate(_stock_columns(inst)):
        for c in cols:
            stock_of[c] = l
    circ = Circuit(n_sites, label="phase")
    for i in range(1, n_sites + 1):
        for j in range(i + 1, n_sites + 1):
            sig = inst.covariance[stock_of[i - 1], stock_of[j - 1]]
            theta = gamma * lam / m**2 * sig
            circ.append_block([
                Gate("CNOT", (i, j)),
                Gate("RZ", (j,), angle=theta),
                Gate("CNOT", (i, j)),
            ])
    for i in range(1, n_sites + 1):
        h_i = (1.0 - lam) / m * inst.returns[stock_of[i - 1]]
        circ.append(Gate("RZ", (i,), angle=-gamma * h_i))
    return circ


# ---------------------------------------------------------------------------
# hop and FSWAP primitives


def hop_dense(beta_t: float) -> np.ndarray:
    """exp(i beta_t (XX + YY)/2) on an adjacent pair."""
    c, s = np.cos(beta_t), np.sin(beta_t)
    m = np.eye(4, dtype=complex)
    m[1, 1] = c
    m[2, 2] = c
    m[1, 2] = 1j * s
    m[2, 1] = 1j * s
    return m


FSWAP_DENSE = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, -1]], dtype=complex
)


def hop_gate(i: int, j: int, beta: float, t: float) -> list[Gate]:
    """Drawn hop decomposition on the snake-adjacent pair (i, i+1)."""
    if j != i + 1:
        raise ValueError("hop gates act on snake-adjacent pairs only")
    bt = beta * t
    return [
        Gate("RX", (i,), angle=-np.pi / 2),
        Gate("RX", (j,), angle=np.pi / 2),
        Gate("CNOT", (i, j)),
        Gate("RX", (i,), angle=-bt),
        Gate("RZ", (j,), angle=bt),
        Gate("CNOT", (i, j)),
        Gate("RX", (i,), angle=np.pi / 2),
        Gate("RX", (j,), angle=-np.pi / 2),
    ]


def fswap_gate(i: int, j: int) -> list[Gate]:
    """SWAP then CZ as SWAP, H, CNOT, H on the adjacent pair."""
    if j != i + 1:
        raise ValueError("FSWAP acts on snake-adjacent pairs only")
    return [
        Gate("SWAP", (i, j)),
        Gate("H", (j,)),
        Gate("CNOT", (i, j)),
        Gate("H", (j,)),
    ]


# ---------------------------------------------------------------------------
# mixer layout


@dataclass(frozen=True)
class MixerLayout:
    """Site positions of every hop and FSWAP in one mixer application.

    Leg hops split into two parallel layers; each conveyor application
    runs both FSWAP layers then one rung hop per leg boundary; the
    periodic boundary hops are embedded after ``v_pre`` conveyor steps.
    """

    shape: LatticeShape
    leg_hops_i: tuple[int, ...]
    leg_hops_ii: tuple[int, ...]
    v_swaps_i: tuple[int, ...]
    v_swaps_ii: tuple[int, ...]
    v_rung_hops: tuple[int, ...]
    bc_hops: tuple[int, ...]
    v_pre: int
    v_post: int

    @property
    def hops_per_mixer(self) -> int:
        n = self.shape.vertices_per_leg
        return (len(self.leg_hops_i) + len(self.leg_hops_ii)
                + n * len(self.v_rung_hops) + len(self.bc_hops))

    @property
    def fswaps_per_mixer(self) -> int:
        n = self.shape.vertices_per_leg
        return n * (len(self.v_swaps_i) + len(self.v_swaps_ii))


def build_mixer_layout(shape: LatticeShape) -> MixerLayout:
    shape.require_even()
    n, d_legs = shape.vertices_per_leg, shape.legs

    def leg_positions(first_layer: bool) -> tuple[int, ...]:
        pos = []
        for d in range(1, d_legs + 1):
            lo, hi = (d - 1) * n + 1, d * n - 1
            for l in range(1, n + 1):
                i = site_to_index(l, d, shape)
                if not lo <= i <= hi:
                    continue  # the wrap-around bond is handled by the BC layer
                if ((l % 2 == 1) == (d % 2 == 1)) == first_layer:
                    pos.append(i)
        return tuple(sorted(pos))

    layer_i, layer_ii = leg_positions(True), leg_positions(False)
    rungs = tuple(d * n for d in range(1, d_legs))
    p = (n + 1) // 2
    bc = tuple(
        site_to_index(p, d, shape) if d % 2 else site_to_index(p + 1, d, shape)
        for d in range(1, d_legs + 1)
    )
    return MixerLayout(
        shape=shape,
        leg_hops_i=layer_i,
        leg_hops_ii=layer_ii,
        v_swaps_i=layer_i,
        v_swaps_ii=layer_ii,
        v_rung_hops=rungs,
        bc_hops=bc,
        v_pre=(n + 1) // 4,
        v_post=ceil((3 * n - 1) / 4),
    )


def _mixer_ops(layout: MixerLayout, t_par: float,
               t_perp: float) -> list[tuple[str, int, float]]:
    """Flat (kind, position, amplitude) schedule of one mixer application."""
    ops: list[tuple[str, int, float]] = []
    ops += [("hop", i, t_par) for i in layout.leg_hops_i]
    ops += [("hop", i, t_par) for i in layout.leg_hops_ii]

    def conveyor() -> list[tuple[str, int, float]]:
        block = [("swap", i, 0.0) for i in layout.v_swaps_i]
        block += [("swap", i, 0.0) for i in layout.v_swaps_ii]
        block += [("hop", i, t_perp) for i in layout.v_rung_hops]
        return block

    for _ in range(layout.v_pre):
        ops += conveyor()
    ops += [("hop", i, t_par) for i in layout.bc_hops]
    for _ in range(layout.v_post):
        ops += conveyor()
    return ops


def synthesize_mixer_circuit(beta: float, layout: MixerLayout,
                             t_par: float, t_perp: float) -> Circuit:
    """Gate-level mixer; exactly number conserving block by block."""
    circ = Circuit(layout.shape.num_sites, label="mixer")
    for kind, i, t in _mixer_ops(layout, t_par, t_perp):
        if kind == "hop":
            circ.append_block(hop_gate(i, i + 1, beta, t))
        else:
            circ.append_block(fswap_gate(i, i + 1))
    return circ


def apply_mixer_trotter(state: StateVector, beta: float, layout: MixerLayout,
                        t_par: float, t_perp: float) -> StateVector:
    """Fast path: one dense two-site matrix per hop or FSWAP."""
    u_par = hop_dense(beta * t_par)
    u_perp = hop_dense(beta * t_perp)
    for kind, i, t in _mixer_ops(layout, t_par, t_perp):
        if kind == "swap":
            m = FSWAP_DENSE
        else:
            m = u_par if t == t_par else u_perp
        state.apply_dense((i, i + 1), m)
    return state


# ---------------------------------------------------------------------------
# exact mixer backend


def _unitary_givens_network(u: np.ndarray):
    """Reduce a square unitary to diagonal phases with adjacent-column
    rotations: returns (rotations in elimination order, residual phases).
    """
    w = np.array(u, dtype=complex)
    n = w.shape[0]
    rotations: list[tuple[int, float, float]] = []
    for r in range(1, n):
        for c in range(n, r, -1):
            b = w[r - 1, c - 1]
            if abs(b) <= 1e-14:
                continue
            theta, phi = _solve_rotation(w[r - 1, c - 2], b)
            cth, sth = np.cos(theta), np.sin(theta)
            e = np.exp(-1j * phi)
            left = w[:, c - 2].copy()
            right = w[:, c - 1].copy()
            w[:, c - 2] = cth * left - e * sth * right
            w[:, c - 1] = sth * left + e * cth * right
            w[r - 1, c - 1] = 0.0
            rotations.append((c - 1, theta, phi))
    lambdas = np.angle(np.diagonal(w))
    if np.max(np.abs(np.abs(np.diagonal(w)) - 1.0)) > 1e-9:
        raise ValueError("Givens reduction of the orbital matrix failed")
    return rotations, lambdas


def apply_mixer_exact(state: StateVector, beta: float,
                      driver: LadderDriver) -> StateVector:
    """exp(-i beta H_t) by orbital-basis rotation and per-orbital phases."""
    rotations, lambdas = _unitary_givens_network(driver.orbital_matrix)
    n = driver.shape.num_sites

    def occupancy_phase(values: np.ndarray) -> np.ndarray:
        idx = np.arange(1 << n, dtype=np.int64)
        acc = np.zeros(1 << n)
        for site in range(n):
            acc += values[site] * ((idx >> site) & 1)
        return acc

    # inverse basis change: rotations forward, then conjugate phases
    for site, theta, phi in rotations:
        state.apply_dense((site, site + 1), givens_dense(theta, phi).conj().T)
    state.phase_multiply(np.exp(-1j * occupancy_phase(lambdas)))
    # orbital-number phases
    state.phase_multiply(np.exp(-1j * beta * occupancy_phase(driver.energies)))
    # forward basis change
    state.phase_multiply(np.exp(1j * occupancy_phase(lambdas)))
    for site, theta, phi in reversed(rotations):
        state.apply_dense((site, site + 1), givens_dense(theta, phi))
    return state
