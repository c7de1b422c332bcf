"""Cost models: integer encodings, polynomial costs, the portfolio instance,
and the exact diagonal Hamiltonian with its brute-force constrained oracle.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .lattice import LatticeShape, stock_site_indices
from .statevector import hamming_weights

MAX_DIAGONAL_QUBITS = 24

ENCODING_KINDS = ("binary", "unary", "sequential", "one-hot")


@dataclass(frozen=True)
class EncodingScheme:
    """Integer-to-binary encoding z = sum_d f_d * x_d for z in 0..I."""

    kind: str
    largest_integer: int
    num_bits: int
    weights: tuple[int, ...]

    def decode(self, bits) -> int:
        if len(bits) != self.num_bits:
            raise ValueError("bit row length mismatch")
        return int(sum(f * int(x) for f, x in zip(self.weights, bits)))


def make_encoding(kind: str, largest_integer: int) -> EncodingScheme:
    """Encoding table: weights f_d and bit count D for each scheme."""
    i = largest_integer
    if i < 1:
        raise ValueError("largest integer must be >= 1")
    if kind == "binary":
        d = math.ceil(math.log2(i + 1))
        f = tuple(2 ** (k - 1) for k in range(1, d + 1))
    elif kind == "unary":
        d = i
        f = (1,) * d
    elif kind == "sequential":
        d = math.ceil((math.isqrt(1 + 8 * i) - 1) / 2)
        if d * (d + 1) // 2 < i:
            d += 1
        f = tuple(range(1, d + 1))
    elif kind == "one-hot":
        d = i + 1
        f = tuple(range(1, d + 1))
    else:
        raise ValueError(f"unknown encoding kind {kind!r}")
    return EncodingScheme(kind, i, d, f)


def position_from_bits(bits_row, scheme: EncodingScheme,
                       short_positions: bool = False) -> int:
    """Integer position of one stock from its D bits.

    Without shorts: w = sum f_d x_d.  With shorts: w = I/2 - sum f_d x_d,
    which requires an even largest integer.
    """
    raw = scheme.decode(bits_row)
    if not short_positions:
        return raw
    if scheme.largest_integer % 2:
        raise ValueError("short positions need an even largest integer")
    return scheme.largest_integer // 2 - raw


@dataclass(frozen=True)
class PolynomialProblem:
    """Polynomial cost over integer variables with equality constraints.

    ``terms`` maps vertex tuples (l1, ..., lk) to coefficients; each
    constraint is (vertex subset, target).
    """

    num_vertices: int
    terms: dict[tuple[int, ...], float]
    constraints: tuple[tuple[frozenset, int], ...] = ()

    def __post_init__(self) -> None:
        for vs in self.terms:
            if any(not 1 <= v <= self.num_vertices for v in vs):
                raise ValueError(f"vertex tuple {vs} out of range")


def polynomial_cost(bits, prob: PolynomialProblem,
                    scheme: EncodingScheme) -> float:
    """Cost of a full bit string under a bit-wise encoded polynomial.

    Bits are indexed by snake site order over an N x D lattice with
    D = scheme.num_bits.  One-hot encoding is rejected: it carries an
    extra per-variable constraint and is not used here.
    """
    if scheme.kind == "one-hot":
        raise ValueError(
            "one-hot encoding is excluded: it adds a per-variable "
            "constraint sum_d x_d = 1 on top of the problem constraints"
        )
    d = scheme.num_bits
    n = prob.num_vertices
    bits = np.asarray(bits)
    if bits.size != n * d:
        raise ValueError("bit string length mismatch")
    shape = LatticeShape(n, d) if d >= 1 else None
    f = np.array(scheme.weights)
    z = np.empty(n)
    for l in range(1, n + 1):
        cols = [i - 1 for i in stock_site_indices(l, shape)]
        z[l - 1] = f @ bits[cols]
    total = 0.0
    for vs, alpha in prob.terms.items():
        total += alpha * np.prod([z[v - 1] for v in vs])
    return float(total)


@dataclass(frozen=True)
class PortfolioInstance:
    """Markowitz-style instance: covariance, returns, and holding target."""

    num_stocks: int
    bits_per_stock: int
    holdings: int
    risk_tolerance: float
    covariance: np.ndarray
    returns: np.ndarray
    seed: int | None = None
    comment: str = ""

    def __post_init__(self) -> None:
        n, d = self.num_stocks, self.bits_per_stock
        if d % 2:
            raise ValueError("bits per stock must be even (short positions)")
        if self.holdings == 0 or abs(self.holdings) > n * d // 2:
            raise ValueError("need 0 < |M| <= N*D/2")
        if not 0.0 <= self.risk_tolerance <= 1.0:
            raise ValueError("risk tolerance must lie in [0, 1]")
        sigma = np.asarray(self.covariance, dtype=float)
        mu = np.asarray(self.returns, dtype=float)
        if sigma.shape != (n, n) or mu.shape != (n,):
            raise ValueError("covariance/returns shape mismatch")
        if np.max(np.abs(sigma - sigma.T)) > 1e-12:
            raise ValueError("covariance must be symmetric")
        object.__setattr__(self, "covariance", sigma)
        object.__setattr__(self, "returns", mu)

    @property
    def shape(self) -> LatticeShape:
        return LatticeShape(self.num_stocks, self.bits_per_stock)

    @property
    def num_sites(self) -> int:
        return self.num_stocks * self.bits_per_stock

    @property
    def particle_number(self) -> int:
        """M' = N*D/2 - M, the Hamming weight of every feasible string."""
        return self.num_sites // 2 - self.holdings


def _stock_columns(inst: PortfolioInstance) -> list[list[int]]:
    shape = inst.shape
    return [
        [i - 1 for i in stock_site_indices(l, shape)]
        for l in range(1, inst.num_stocks + 1)
    ]


def portfolio_cost(bits, inst: PortfolioInstance) -> float:
    """Binary-form cost of one bit string (snake site order)."""
    bits = np.asarray(bits, dtype=float)
    if bits.size != inst.num_sites:
        raise ValueError("bit string length mismatch")
    d = inst.bits_per_stock
    y = np.array([bits[cols].sum() - d / 2.0 for cols in _stock_columns(inst)])
    lam, m = inst.risk_tolerance, inst.holdings
    risk = lam / m**2 * (y @ inst.covariance @ y)
    ret = (1.0 - lam) / m * (inst.returns @ y)
    return float(risk + ret)


def portfolio_cost_positions(positions, inst: PortfolioInstance) -> float:
    """Position-form cost: risk term minus return term over integer w_l.

    Independent re-implementation used to cross-check
    :func:`portfolio_cost`.  Under the unary short encoding
    w_l = D/2 - sum_d x_{l,d} = -sum_d (x_{l,d} - 1/2), so the two
    forms agree exactly for every bit string.
    """
    w = np.asarray(positions, dtype=float)
    lam, m = inst.risk_tolerance, inst.holdings
    risk = lam / m**2 * (w @ inst.covariance @ w)
    ret = (1.0 - lam) / m * (inst.returns @ w)
    return float(risk - ret)


@dataclass(frozen=True, eq=False)
class DiagonalHamiltonian:
    """Exact cost per computational basis string plus feasible-sector data."""

    energies: np.ndarray
    m_prime: int
    e_min: float
    e_max: float
    w: float
    argmin: tuple[int, ...]
    num_qubits: int = field(default=0)

    def feasible_mask(self) -> np.ndarray:
        return hamming_weights(self.num_qubits) == self.m_prime


def build_diagonal(inst: PortfolioInstance) -> DiagonalHamiltonian:
    """Evaluate the cost on all 2**(N*D) strings and scan the feasible sector.

    The feasible extrema come from exact enumeration of the weight-M'
    sector; beyond 24 qubits construction refuses rather than estimates.
    """
    n_sites = inst.num_sites
    if n_sites > MAX_DIAGONAL_QUBITS:
        raise ValueError(f"diagonal build capped at {MAX_DIAGONAL_QUBITS} qubits")
    dim = 1 << n_sites
    idx = np.arange(dim, dtype=np.uint32)
    d = inst.bits_per_stock
    y = np.empty((dim, inst.num_stocks))
    for l, cols in enumerate(_stock_columns(inst)):
        acc = np.zeros(dim, dtype=np.int8)
        for c in cols:
            acc += ((idx >> np.uint32(c)) & 1).astype(np.int8)
        y[:, l] = acc - d / 2.0
    lam, m = inst.risk_tolerance, inst.holdings
    energies = (lam / m**2) * np.einsum("xl,lk,xk->x", y, inst.covariance, y)
    energies += (1.0 - lam) / m * (y @ inst.returns)

    m_prime = inst.particle_number
    mask = hamming_weights(n_sites) == m_prime
    feas = energies[mask]
    if feas.size == 0:
        raise ValueError("empty feasible sector")
    e_min = float(feas.min())
    e_max = float(feas.max())
    feas_idx = np.flatnonzero(mask)
    argmin = tuple(int(i) for i in feas_idx[feas == e_min])
    return DiagonalHamiltonian(
        energies=energies, m_prime=m_prime, e_min=e_min, e_max=e_max,
        w=e_max - e_min, argmin=argmin, num_qubits=n_sites,
    )


def generate_instance(seed: int, num_stocks: int, bits_per_stock: int,
                      holdings: int, risk_tolerance: float = 0.9,
                      num_factors: int = 2, factor_scale: float = 0.01,
                      noise_scale: float = 1e-4,
                      return_scale: float = 1e-3) -> PortfolioInstance:
    """Seeded factor-model instance: sigma = F F^T + diag(noise), mu normal.

    Default scales mimic daily market data (covariances around 1e-4,
    returns around 1e-3) so that the customary penalty strength 0.003
    is a real penalty relative to the cost range.
    """
    rng = np.random.default_rng(seed)
    f = factor_scale * rng.normal(size=(num_stocks, num_factors))
    sigma = f @ f.T + np.diag(noise_scale * rng.uniform(0.2, 1.0, num_stocks))
    mu = return_scale * rng.normal(size=num_stocks)
    return PortfolioInstance(
        num_stocks=num_stocks, bits_per_stock=bits_per_stock,
        holdings=holdings, risk_tolerance=risk_tolerance,
        covariance=sigma, returns=mu, seed=seed,
    )


INSTANCE_FORMAT_VERSION = 1


def save_instance(inst: PortfolioInstance, path: str, force: bool = False) -> None:
    """Write the instance as versioned JSON; refuses to overwrite."""
    if os.path.exists(path) and not force:
        raise FileExistsError(f"{path} exists; pass force to overwrite")
    payload = {
        "version": INSTANCE_FORMAT_VERSION,
        "N": inst.num_stocks,
        "D": inst.bits_per_stock,
        "M": inst.holdings,
        "lambda": inst.risk_tolerance,
        "sigma": [float(v) for v in inst.covariance.ravel()],
        "mu": [float(v) for v in inst.returns],
    }
    if inst.seed is not None:
        payload["seed"] = inst.seed
    if inst.comment:
        payload["comment"] = inst.comment
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_instance(path: str) -> PortfolioInstance:
    with open(path) as fh:
        payload = json.load(fh)
    if payload.get("version") != INSTANCE_FORMAT_VERSION:
        raise ValueError(f"unsupported instance file version in {path}")
    n = payload["N"]
    return PortfolioInstance(
        num_stocks=n,
        bits_per_stock=payload["D"],
        holdings=payload["M"],
        risk_tolerance=payload["lambda"],
        covariance=np.array(payload["sigma"], dtype=float).reshape(n, n),
        returns=np.array(payload["mu"], dtype=float),
        seed=payload.get("seed"),
        comment=payload.get("comment", ""),
    )
