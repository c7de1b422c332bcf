"""Tight-binding driver on the D-leg ladder: spectrum, orbitals, filling.

The single-particle problem diagonalises in closed form: plane waves
along the periodic legs, open-chain standing waves across the rungs.
The mixing unitary and the initial state are both built from this data.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .lattice import LatticeShape, site_to_index


def orbital_energy(k: int, m: int, shape: LatticeShape,
                   t_par: float, t_perp: float) -> float:
    """Single-particle energy of orbital (k, m)."""
    n, d = shape.vertices_per_leg, shape.legs
    return float(
        -2.0 * t_par * np.cos(2.0 * np.pi * k / n)
        - 2.0 * t_perp * np.cos(np.pi * m / (d + 1))
    )


@dataclass(frozen=True, eq=False)
class LadderDriver:
    """Hopping amplitudes, spectrum and orbital matrix of the ladder."""

    shape: LatticeShape
    t_par: float
    t_perp: float
    labels: tuple[tuple[int, int], ...]   # (k, m), aligned with rows below
    energies: np.ndarray                  # one energy per label
    orbital_matrix: np.ndarray            # rows: labels, cols: snake sites

    def energy_of(self, k: int, m: int) -> float:
        return float(self.energies[self.labels.index((k, m))])


def build_driver(shape: LatticeShape, t_par: float = 1.0,
                 t_perp: float = 1.0) -> LadderDriver:
    """Closed-form spectrum and unitary orbital matrix for the ladder."""
    n, d_legs = shape.vertices_per_leg, shape.legs
    nd = shape.num_sites
    labels = tuple((k, m) for m in range(1, d_legs + 1) for k in range(1, n + 1))
    energies = np.array(
        [orbital_energy(k, m, shape, t_par, t_perp) for k, m in labels]
    )
    phi = np.empty((nd, nd), dtype=complex)
    norm = np.sqrt(2.0 / ((d_legs + 1) * n))
    for row, (k, m) in enumerate(labels):
        for d in range(1, d_legs + 1):
            for l in range(1, n + 1):
                col = site_to_index(l, d, shape) - 1
                phi[row, col] = (
                    norm
                    * np.exp(2j * np.pi * l * k / n)
                    * np.sin(np.pi * d * m / (d_legs + 1))
                )
    return LadderDriver(shape, t_par, t_perp, labels, energies, phi)


@dataclass(frozen=True)
class OrbitalSelection:
    """The M' occupied orbitals, their total energy, and shell closure."""

    occupied: tuple[tuple[int, int], ...]
    e0: float
    closed_shell: bool


def select_occupied(driver: LadderDriver, m_prime: int) -> OrbitalSelection:
    """Fill the m_prime lowest orbitals.

    Ties at the Fermi level are broken lexicographically by (energy, m, k)
    and reported through ``closed_shell=False`` plus a warning; the summed
    energy is minimal either way.
    """
    nd = driver.shape.num_sites
    if not 0 <= m_prime <= nd:
        raise ValueError(f"particle number must be 0..{nd}")
    order = sorted(
        range(nd),
        key=lambda r: (driver.energies[r], driver.labels[r][1], driver.labels[r][0]),
    )
    chosen = order[:m_prime]
    e0 = float(driver.energies[chosen].sum()) if chosen else 0.0
    closed = True
    if 0 < m_prime < nd:
        fermi = driver.energies[order[m_prime - 1]]
        above = driver.energies[order[m_prime]]
        if abs(above - fermi) <= 1e-12:
            closed = False
            warnings.warn(
                f"degenerate Fermi level at filling {m_prime}: "
                "open shell, proceeding with lexicographic tie-break",
                stacklevel=2,
            )
    occupied = tuple(driver.labels[r] for r in chosen)
    return OrbitalSelection(occupied=occupied, e0=e0, closed_shell=closed)


def occupied_orbital_matrix(driver: LadderDriver,
                            selection: OrbitalSelection) -> np.ndarray:
    """M' x (N*D) matrix of occupied orbital rows, snake column order."""
    rows = [driver.labels.index(lbl) for lbl in selection.occupied]
    return driver.orbital_matrix[rows].copy()


def hopping_scale(w: float, shape: LatticeShape, m_prime: int) -> tuple[float, float]:
    """Hopping integrals t_par = t_perp = w / W_t.

    W_t is the driver's constrained-sector energy range at unit hopping:
    the difference between the largest and smallest possible sums of
    m_prime single-particle energies.
    """
    if w <= 0:
        raise ValueError("energy range must be positive")
    unit = build_driver(shape, 1.0, 1.0)
    eps = np.sort(unit.energies)
    w_t = float(eps[-m_prime:].sum() - eps[:m_prime].sum()) if m_prime else 0.0
    if abs(w_t) < 1e-12:
        raise ValueError("degenerate driver band: W_t = 0")
    t = w / w_t
    return t, t
