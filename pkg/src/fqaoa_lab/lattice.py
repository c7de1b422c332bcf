"""Snake-type Jordan-Wigner ordering on an N x D ladder.

Sites are labelled (l, d) with l = 1..N running along a leg and d = 1..D
indexing the legs.  The snake ordering assigns linear indices i = 1..N*D
so that consecutive sites along the traversal are nearest neighbours:
odd legs are walked in increasing l, even legs in decreasing l, and the
walk crosses to the next leg at the end of each one.  All fermionic
two-site operations emitted by the synthesis modules act on pairs
(i, i+1) of this ordering, which keeps them free of Z strings.
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class LatticeShape:
    """Ladder geometry: ``vertices_per_leg`` stocks, ``legs`` bits per stock."""

    vertices_per_leg: int
    legs: int

    def __post_init__(self) -> None:
        if self.vertices_per_leg < 2:
            raise ValueError("need at least two vertices per leg")
        if self.legs < 1:
            raise ValueError("need at least one leg")

    @property
    def num_sites(self) -> int:
        return self.vertices_per_leg * self.legs

    def require_even(self) -> None:
        """Ladder-driver and mixer synthesis assume even N and even D."""
        if self.vertices_per_leg % 2 or self.legs % 2:
            raise ValueError(
                f"mixer/driver construction needs even N and even D, "
                f"got N={self.vertices_per_leg}, D={self.legs}"
            )


def site_to_index(l: int, d: int, shape: LatticeShape) -> int:
    """Linear snake index i = 1..N*D of lattice site (l, d)."""
    n = shape.vertices_per_leg
    if not 1 <= l <= n:
        raise ValueError(f"vertex label l={l} outside 1..{n}")
    if not 1 <= d <= shape.legs:
        raise ValueError(f"leg label d={d} outside 1..{shape.legs}")
    sign = (-1) ** (d - 1)
    return sign * l + (d - 1) * n + (1 - sign) // 2 * (n + 1)


def index_to_site(i: int, shape: LatticeShape) -> tuple[int, int]:
    """Inverse of :func:`site_to_index`."""
    n = shape.vertices_per_leg
    if not 1 <= i <= shape.num_sites:
        raise ValueError(f"site index i={i} outside 1..{shape.num_sites}")
    d = -(-i // n)  # ceil(i / n)
    sign = (-1) ** d
    l = (n + 1 - sign * (n - 1)) // 2 + sign * (n * d - i)
    return l, d


def spin_of_bit(x: int) -> float:
    """Spin-z value of one occupation bit: s_z = 1/2 - x."""
    return 0.5 - x


def stock_site_indices(l: int, shape: LatticeShape) -> list[int]:
    """Snake indices of all D sites belonging to stock l."""
    return [site_to_index(l, d, shape) for d in range(1, shape.legs + 1)]


def ladder_edges(shape: LatticeShape) -> list[tuple[int, int, str]]:
    """Edge set of the D-leg ladder as snake-index pairs.

    Returns (i, j, kind) with i < j; kind is 'par' for leg bonds
    (periodic along each leg) and 'perp' for rung bonds between
    neighbouring legs.
    """
    n, d_legs = shape.vertices_per_leg, shape.legs
    edges = []
    for d in range(1, d_legs + 1):
        for l in range(1, n + 1):
            a = site_to_index(l, d, shape)
            b = site_to_index(l % n + 1, d, shape)
            edges.append((min(a, b), max(a, b), "par"))
    for d in range(1, d_legs):
        for l in range(1, n + 1):
            a = site_to_index(l, d, shape)
            b = site_to_index(l, d + 1, shape)
            edges.append((min(a, b), max(a, b), "perp"))
    return edges
