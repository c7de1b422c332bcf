"""Distribution metrics, error statistics, and gate-count certification.

Probabilities are exact statevector weights, never samples, so the
cumulative success curve is a true step function and the residual
energy admits an exact integral cross-check.  Gate certification pins
every synthesized component to its closed-form count with integer
equality.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .baselines import dicke_gate_counts
from .gates import Circuit
from .lattice import LatticeShape
from .problem import DiagonalHamiltonian
from .statevector import StateVector, hamming_weights


@dataclass(frozen=True, eq=False)
class EnergyDistribution:
    """Probability mass binned by energy above the constrained optimum.

    Feasible and infeasible strings are kept separate; the cumulative
    function counts feasible mass only, so its limit equals the total
    feasibility of the state.
    """

    feasible_energies: np.ndarray
    feasible_probs: np.ndarray
    infeasible_energies: np.ndarray
    infeasible_probs: np.ndarray
    feasibility: float

    def cumulative(self, e: float) -> float:
        """F(e): feasible probability within e of the constrained optimum."""
        mask = self.feasible_energies <= e
        return float(self.feasible_probs[mask].sum())

    def residual_integral(self, w: float) -> float:
        """Exact integral of (1 - F) from 0 to w over the step function."""
        return float(
            w * (1.0 - self.feasibility)
            + (self.feasible_probs * self.feasible_energies).sum()
        )

    def median_residual(self) -> float:
        """Distribution median of E - E_min over all measured strings."""
        rel = np.concatenate([self.feasible_energies, self.infeasible_energies])
        prob = np.concatenate([self.feasible_probs, self.infeasible_probs])
        return box_stats(rel, weights=prob)["median"]


def distribution(state: StateVector, ham: DiagonalHamiltonian) -> EnergyDistribution:
    if state.num_qubits != ham.num_qubits:
        raise ValueError("state and Hamiltonian shapes differ")
    probs = state.probabilities()
    rel = ham.energies - ham.e_min
    feas = hamming_weights(ham.num_qubits) == ham.m_prime

    def collect(mask):
        values, inverse = np.unique(rel[mask], return_inverse=True)
        mass = np.bincount(inverse, weights=probs[mask], minlength=values.size)
        return values, mass

    fe, fp = collect(feas)
    ie, ip = collect(~feas)
    return EnergyDistribution(
        feasible_energies=fe, feasible_probs=fp,
        infeasible_energies=ie, infeasible_probs=ip,
        feasibility=float(fp.sum()),
    )


def residual_energy(e_p: float, ham: DiagonalHamiltonian) -> float:
    """Direct-expectation residual; the distribution integral is the
    independent second route."""
    return float(e_p - ham.e_min)


def box_stats(values, weights=None) -> dict[str, float]:
    """Quartiles, 5/95 percent whiskers, and mean.

    Plain samples use linearly interpolated percentiles; weighted input
    inverts the cumulative distribution with linear interpolation.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("empty input")
    qs = (0.05, 0.25, 0.5, 0.75, 0.95)
    if weights is None:
        w5, q1, median, q3, w95 = np.percentile(values, [100 * q for q in qs])
        mean = float(values.mean())
    else:
        weights = np.asarray(weights, dtype=float)
        order = np.argsort(values)
        v, w = values[order], weights[order]
        total = w.sum()
        if total <= 0:
            raise ValueError("weights must have positive mass")
        cw = np.cumsum(w) / total
        w5, q1, median, q3, w95 = np.interp(qs, cw, v)
        mean = float((v * w).sum() / total)
    return {
        "q1": float(q1), "median": float(median), "q3": float(q3),
        "w5": float(w5), "w95": float(w95), "mean": mean,
    }


def power_law_slope(times, residuals, window: tuple[float, float] | None = None) -> float:
    """Least-squares slope of log(residual) against log(time)."""
    t = np.asarray(times, dtype=float)
    r = np.asarray(residuals, dtype=float)
    if window is not None:
        mask = (t >= window[0]) & (t <= window[1])
        t, r = t[mask], r[mask]
    if t.size < 4:
        raise ValueError("need at least four points in the fit window")
    if np.any(t <= 0) or np.any(r <= 0):
        raise ValueError("power-law fit needs positive values")
    slope, _ = np.polyfit(np.log(t), np.log(r), 1)
    return float(slope)


# ---------------------------------------------------------------------------
# gate-count certification


class CertificationError(AssertionError):
    """A synthesized circuit disagrees with its closed-form gate count."""


def expected_init_counts(n: int, d: int, m: int) -> tuple[int, int]:
    nd = n * d
    return (
        (nd + 2 * m + 2) * (nd - 2 * m) // 4,
        3 * (nd * nd - 4 * m * m) // 4,
    )


def expected_phase_counts(n: int, d: int) -> tuple[int, int]:
    nd = n * d
    return nd * (nd + 1) // 2, nd * (nd - 1)


def expected_mixer_counts(n: int, d: int) -> tuple[int, int]:
    return (
        2 * n * n * d + 10 * n * d - 6 * n,
        2 * n * n * d + 2 * n * d - 2 * n,
    )


_EXPECTED = {
    "init": lambda n, d, m: expected_init_counts(n, d, m),
    "phase": lambda n, d, m: expected_phase_counts(n, d),
    "mixer": lambda n, d, m: expected_mixer_counts(n, d),
}


def certify_gate_counts(circuit: Circuit, shape: LatticeShape, m: int) -> dict:
    """Assert integer equality of a synthesized component with its formula."""
    if circuit.label not in _EXPECTED:
        raise ValueError(f"no certification formula for label {circuit.label!r}")
    expected = _EXPECTED[circuit.label](shape.vertices_per_leg, shape.legs, m)
    actual = circuit.counts()
    if actual != expected:
        raise CertificationError(
            f"U_{circuit.label} gate count mismatch at N={shape.vertices_per_leg} "
            f"D={shape.legs} M={m}: expected {expected}, counted {actual}"
        )
    return {
        "component": circuit.label,
        "N": shape.vertices_per_leg, "D": shape.legs, "M": m,
        "singles": actual[0], "twos": actual[1],
    }


def ansatz_gate_totals(method: str, n: int, d: int, m: int, p: int) -> tuple[int, int]:
    """Closed-form totals of a depth-p ansatz including state preparation."""
    ps, pt = expected_phase_counts(n, d)
    if method == "fqaoa":
        is_, it = expected_init_counts(n, d, m)
        ms, mt = expected_mixer_counts(n, d)
    elif method == "x_qaoa":
        is_, it = n * d, 0
        ms, mt = n * d, 0
    elif method in ("xy_qaoa_1", "xy_qaoa_2"):
        if d != 2:
            raise ValueError("XY gate counts are tabulated for D = 2 only")
        if method == "xy_qaoa_1":
            is_, it = 2 * (n - m), n - m
        else:
            is_, it = dicke_gate_counts(n, m)["phi_ii_prep"]
        ms, mt = 6 * n * d, 2 * n * d
    else:
        raise ValueError(f"unknown method {method!r}")
    return is_ + p * (ps + ms), it + p * (pt + mt)


# ---------------------------------------------------------------------------
# results table

RESULT_COLUMNS = [
    "method", "N", "D", "M", "p", "delta_t", "optimized", "E_p", "dE_over_W",
    "feasibility", "F_W_over_100", "q1", "median", "q3", "w5", "w95",
    "singles", "twos", "seed",
]


def write_results_csv(path: str, rows: list[list], extra_columns: list[str] | None = None) -> None:
    header = RESULT_COLUMNS + (extra_columns or [])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def _cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def read_results_csv(path: str) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
