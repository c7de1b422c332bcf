"""Sparse many-body operator backend.

Builds explicit 2**n operators for the driver, XY and transverse-field
Hamiltonians so that eigenstate properties, commutation with the number
operator, and variances can be audited independently of the circuit
machinery.  Practical up to n = 16.
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .driver import LadderDriver
from .lattice import LatticeShape, ladder_edges, site_to_index
from .statevector import hamming_weights


def _transfer_indices(n_sites: int, a: int, b: int):
    """Basis indices x (bit b-1 set, bit a-1 clear) and their JW parity.

    Returns (src, dst, sign) for the operator c^dag_a c_b: dst = src with
    the particle moved from site b to site a, sign = (-1)**(occupation
    strictly between the two sites).
    """
    if a == b:
        raise ValueError("sites must differ")
    lo, hi = min(a, b), max(a, b)
    idx = np.arange(1 << n_sites, dtype=np.int64)
    src = idx[((idx >> (b - 1)) & 1 == 1) & ((idx >> (a - 1)) & 1 == 0)]
    between = np.zeros(src.shape, dtype=np.int64)
    for j in range(lo + 1, hi):
        between += (src >> (j - 1)) & 1
    sign = 1.0 - 2.0 * (between % 2)
    dst = src - (1 << (b - 1)) + (1 << (a - 1))
    return src, dst, sign


def hopping_term(n_sites: int, a: int, b: int) -> sp.csr_matrix:
    """Fermionic c^dag_a c_b + c^dag_b c_a with Jordan-Wigner strings."""
    src, dst, sign = _transfer_indices(n_sites, a, b)
    dim = 1 << n_sites
    half = sp.coo_matrix((sign, (dst, src)), shape=(dim, dim))
    return (half + half.T).tocsr()


def exchange_term(n_sites: int, a: int, b: int) -> sp.csr_matrix:
    """Spin exchange s^x s^x + s^y s^y on qubits of sites a and b."""
    src, dst, _ = _transfer_indices(n_sites, a, b)
    dim = 1 << n_sites
    half = sp.coo_matrix((0.5 * np.ones(src.size), (dst, src)), shape=(dim, dim))
    return (half + half.T).tocsr()


def ladder_hamiltonian(driver: LadderDriver) -> sp.csr_matrix:
    """Many-body driver H_t = -sum over ladder edges of t_e (c^dag c + h.c.)."""
    n = driver.shape.num_sites
    h = sp.csr_matrix((1 << n, 1 << n))
    for a, b, kind in ladder_edges(driver.shape):
        t = driver.t_par if kind == "par" else driver.t_perp
        h = h - t * hopping_term(n, a, b)
    return h


def xy_ring_hamiltonian(shape: LatticeShape) -> sp.csr_matrix:
    """H_XY = -2 sum over leg rings of (s^x s^x + s^y s^y)."""
    n = shape.num_sites
    h = sp.csr_matrix((1 << n, 1 << n))
    for d in range(1, shape.legs + 1):
        for l in range(1, shape.vertices_per_leg + 1):
            a = site_to_index(l, d, shape)
            b = site_to_index(l % shape.vertices_per_leg + 1, d, shape)
            h = h - 2.0 * exchange_term(n, a, b)
    return h


def x_field_hamiltonian(n_sites: int) -> sp.csr_matrix:
    """H_X = -2 sum_i s^x_i = -sum_i X_i."""
    dim = 1 << n_sites
    idx = np.arange(dim, dtype=np.int64)
    rows, cols = [], []
    for i in range(n_sites):
        rows.append(idx ^ (1 << i))
        cols.append(idx)
    data = -np.ones(dim * n_sites)
    return sp.coo_matrix(
        (data, (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
    ).tocsr()


def number_commutator_norm(h: sp.spmatrix, n_sites: int) -> float:
    """Max-entry norm of [H, C] where C is the total number operator."""
    weights = hamming_weights(n_sites).astype(float)
    c = sp.diags(weights)
    comm = h @ c - c @ h
    return 0.0 if comm.nnz == 0 else float(np.abs(comm.data).max())


def expectation(h: sp.spmatrix, amplitudes: np.ndarray) -> float:
    return float(np.real(np.vdot(amplitudes, h @ amplitudes)))


def variance(h: sp.spmatrix, amplitudes: np.ndarray) -> float:
    hv = h @ amplitudes
    e = np.real(np.vdot(amplitudes, hv))
    return float(np.real(np.vdot(hv, hv)) - e**2)


def feasible_sector_connected(shape: LatticeShape, m_prime: int) -> bool:
    """Whether single hops along ladder edges connect the weight sector.

    Breadth-first search over basis strings of Hamming weight m_prime,
    moving one particle along one ladder edge per step.  This is the
    graph-reachability content of the driver ergodicity condition.
    """
    n = shape.num_sites
    edges = [(a, b) for a, b, _ in ladder_edges(shape)]
    weights = hamming_weights(n)
    sector = np.flatnonzero(weights == m_prime)
    if sector.size == 0:
        return True
    start = int(sector[0])
    seen = {start}
    frontier = [start]
    while frontier:
        x = frontier.pop()
        for a, b in edges:
            ba, bb = (x >> (a - 1)) & 1, (x >> (b - 1)) & 1
            if ba == bb:
                continue
            y = x ^ (1 << (a - 1)) ^ (1 << (b - 1))
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    return len(seen) == sector.size
