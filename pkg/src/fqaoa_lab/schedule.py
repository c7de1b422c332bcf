"""Fixed-angle annealing schedules, ansatz assembly, and local optimization.

The fixed-angle schedule discretizes a linear driver-to-problem ramp of
total time T = p * dt; its angles seed the variational search, so the
optimizer never starts blind and its result can only improve on the
pure annealing energy.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import optimize as sciopt

from .analysis import ansatz_gate_totals, box_stats, distribution
from .baselines import (
    PenaltyProblem,
    build_phi_i,
    build_phi_ii,
    make_penalty,
    plus_state,
    x_qaoa_step,
    xy_mixer_step,
)
from .driver import build_driver, hopping_scale, occupied_orbital_matrix, select_occupied
from .evolution import apply_mixer_trotter, apply_phase, build_mixer_layout
from .problem import PortfolioInstance, build_diagonal
from .state_prep import prepare_initial_state
from .statevector import StateVector

METHODS = ("fqaoa", "x_qaoa", "xy_qaoa_1", "xy_qaoa_2")

DEFAULT_PENALTY_STRENGTH = 0.003


@dataclass(frozen=True)
class Schedule:
    """Depth-p parameter set; fixed-angle form keeps gamma_j + beta_j = dt."""

    p: int
    delta_t: float
    gammas: tuple[float, ...]
    betas: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.gammas) != self.p or len(self.betas) != self.p:
            raise ValueError("parameter count must equal depth p")

    @property
    def total_time(self) -> float:
        return self.p * self.delta_t

    def params(self) -> np.ndarray:
        return np.concatenate([self.gammas, self.betas])


def fixed_angles(p: int, delta_t: float) -> Schedule:
    """Time-discretized annealing angles for depth p and step dt."""
    if p < 1:
        raise ValueError("depth must be >= 1")
    if delta_t <= 0:
        raise ValueError("time step must be positive")
    j = np.arange(1, p + 1)
    ramp = (2 * j - 1) / (2 * p)
    return Schedule(
        p=p,
        delta_t=delta_t,
        gammas=tuple(ramp * delta_t),
        betas=tuple((1.0 - ramp) * delta_t),
    )


class AnsatzEngine:
    """Prepared initial state plus layer application for one method.

    Construction does all the per-instance work (diagonal build, driver
    scaling, Givens synthesis); evaluating a parameter set then costs
    one pass over the layers.
    """

    def __init__(self, inst: PortfolioInstance, method: str,
                 penalty_strength: float = DEFAULT_PENALTY_STRENGTH):
        if method not in METHODS:
            raise ValueError(f"unknown method {method!r}; pick one of {METHODS}")
        self.instance = inst
        self.method = method
        self.ham = build_diagonal(inst)
        self.shape = inst.shape
        self.penalty: PenaltyProblem | None = None
        self.driver = None
        self.layout = None
        self.init_circuit = None

        n, m = inst.num_stocks, inst.holdings
        if method == "fqaoa":
            t_par, t_perp = hopping_scale(self.ham.w, self.shape, self.ham.m_prime)
            self.driver = build_driver(self.shape, t_par, t_perp)
            self.layout = build_mixer_layout(self.shape)
            selection = select_occupied(self.driver, self.ham.m_prime)
            self.selection = selection
            occ = occupied_orbital_matrix(self.driver, selection)
            self._phi0, self.init_circuit, self.plan = prepare_initial_state(occ)
        elif method == "x_qaoa":
            self.penalty = make_penalty(self.ham, penalty_strength)
            self._phi0 = plus_state(inst.num_sites)
        elif method == "xy_qaoa_1":
            self._phi0 = build_phi_i(n, m, inst.bits_per_stock)
        else:
            self._phi0 = build_phi_ii(n, m, inst.bits_per_stock)

    @property
    def energy_scale(self) -> float:
        """Range used to express schedules in dimensionless units.

        Feasible-sector range of the cost for hard-constraint methods;
        full range of the penalized cost for the soft-constraint one.
        """
        if self.penalty is not None:
            e = self.penalty.penalized_energies
            return float(e.max() - e.min())
        return self.ham.w

    def initial_state(self) -> StateVector:
        return self._phi0.copy()

    def apply_layer(self, state: StateVector, gamma: float, beta: float) -> StateVector:
        if self.method == "fqaoa":
            apply_phase(state, gamma, self.ham)
            apply_mixer_trotter(state, beta, self.layout,
                                self.driver.t_par, self.driver.t_perp)
        elif self.method == "x_qaoa":
            x_qaoa_step(state, gamma, beta, self.penalty)
        else:
            apply_phase(state, gamma, self.ham)
            xy_mixer_step(state, beta, self.shape)
        return state

    def run(self, gammas, betas) -> StateVector:
        state = self.initial_state()
        for g, b in zip(gammas, betas):
            self.apply_layer(state, g, b)
        return state

    def energy_and_state(self, gammas, betas) -> tuple[float, StateVector]:
        """Expectation of the unpenalized cost plus the final state."""
        state = self.run(gammas, betas)
        return state.expectation_diagonal(self.ham.energies), state

    def objective(self, params: np.ndarray) -> float:
        """Scalar the optimizer minimizes; penalized for the soft method."""
        p = params.size // 2
        state = self.run(params[:p], params[p:])
        target = (self.penalty.penalized_energies if self.penalty is not None
                  else self.ham.energies)
        value = state.expectation_diagonal(target)
        if not np.isfinite(value):
            raise FloatingPointError("non-finite ansatz energy")
        return value

    def gate_totals(self, p: int) -> tuple[int, int]:
        return ansatz_gate_totals(
            self.method, self.instance.num_stocks, self.instance.bits_per_stock,
            self.instance.holdings, p,
        )


def evaluate_ansatz(method: str, schedule: Schedule, inst: PortfolioInstance,
                    penalty_strength: float = DEFAULT_PENALTY_STRENGTH,
                    ) -> tuple[float, StateVector]:
    engine = AnsatzEngine(inst, method, penalty_strength)
    return engine.energy_and_state(schedule.gammas, schedule.betas)


# ---------------------------------------------------------------------------
# local optimization


@dataclass
class OptimizerTrace:
    restart: int
    converged: bool
    iterations: int
    evaluations: int
    best_objective: float


@dataclass
class RunRecord:
    """Everything one run produced, in JSON-ready primitives."""

    method: str
    num_stocks: int
    bits_per_stock: int
    holdings: int
    risk_tolerance: float
    penalty_strength: float | None
    p: int
    delta_t: float
    scaled_delta_t: float
    optimized: bool
    optimizer: str | None
    restarts: int
    gammas: list[float]
    betas: list[float]
    initial_gammas: list[float]
    initial_betas: list[float]
    e_p: float
    e_min: float
    w: float
    delta_e: float
    feasibility: float
    f_w_over_100: float
    box: dict[str, float]
    gate_singles: int
    gate_twos: int
    seed: int
    instance_ref: str
    trace: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    def csv_row(self) -> list:
        return [
            self.method, self.num_stocks, self.bits_per_stock, self.holdings,
            self.p, self.scaled_delta_t, int(self.optimized), self.e_p,
            self.delta_e / self.w, self.feasibility, self.f_w_over_100,
            self.box["q1"], self.box["median"], self.box["q3"],
            self.box["w5"], self.box["w95"],
            self.gate_singles, self.gate_twos, self.seed,
        ]


def _central_difference_gradient(fun: Callable[[np.ndarray], float],
                                 step: float = 1e-6) -> Callable:
    def grad(x: np.ndarray) -> np.ndarray:
        g = np.empty_like(x)
        for k in range(x.size):
            e = np.zeros_like(x)
            e[k] = step
            g[k] = (fun(x + e) - fun(x - e)) / (2.0 * step)
        return g

    return grad


class _BestTracker:
    def __init__(self, fun):
        self.fun = fun
        self.best_x = None
        self.best_f = np.inf
        self.calls = 0

    def __call__(self, x: np.ndarray) -> float:
        f = self.fun(x)
        self.calls += 1
        if f < self.best_f:
            self.best_f = f
            self.best_x = np.array(x)
        return f


_SCIPY_NAMES = {"bfgs": "BFGS", "cg": "CG"}


def optimize(method: str, schedule0: Schedule, inst: PortfolioInstance,
             optimizer: str = "bfgs", restarts: int = 1, seed: int = 0,
             penalty_strength: float = DEFAULT_PENALTY_STRENGTH,
             gtol: float = 1e-6, maxiter: int = 500,
             instance_ref: str = "") -> RunRecord:
    """Quasi-Newton or conjugate-gradient descent from the fixed angles.

    Gradients are central finite differences (step 1e-6); the best
    iterate ever evaluated is kept, so the result never degrades the
    starting energy.  Additional restarts perturb the starting point
    with a seeded normal kick, for the baseline methods whose landscape
    is rougher.
    """
    if optimizer not in _SCIPY_NAMES:
        raise ValueError("optimizer must be 'bfgs' or 'cg'")
    engine = AnsatzEngine(inst, method, penalty_strength)
    rng = np.random.default_rng(seed)
    # Work in dimensionless parameters (angle times energy range) so that
    # the step and gradient tolerances mean the same thing on every
    # instance regardless of its absolute cost scale.
    scale = engine.energy_scale
    x0 = schedule0.params() * scale
    tracker = _BestTracker(lambda x: engine.objective(x / scale))
    start_value = tracker(x0)
    traces: list[OptimizerTrace] = []
    for r in range(restarts):
        kick = rng.normal(0.0, 0.1 * schedule0.delta_t * scale, size=x0.shape)
        start = x0 if r == 0 else x0 + kick
        calls_before = tracker.calls
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            res = sciopt.minimize(
                tracker, start, method=_SCIPY_NAMES[optimizer],
                jac=_central_difference_gradient(tracker),
                options={"gtol": gtol, "maxiter": maxiter},
            )
        traces.append(OptimizerTrace(
            restart=r, converged=bool(res.success), iterations=int(res.nit),
            evaluations=tracker.calls - calls_before,
            best_objective=float(res.fun),
        ))
    best = tracker.best_x / scale
    assert tracker.best_f <= start_value + 1e-12
    return _build_record(
        engine, schedule0, best, optimized=True, optimizer=optimizer,
        restarts=restarts, seed=seed, instance_ref=instance_ref,
        trace=[t.__dict__ for t in traces],
    )


def fixed_angle_record(method: str, schedule: Schedule, inst: PortfolioInstance,
                       penalty_strength: float = DEFAULT_PENALTY_STRENGTH,
                       seed: int = 0, instance_ref: str = "") -> RunRecord:
    engine = AnsatzEngine(inst, method, penalty_strength)
    return _build_record(
        engine, schedule, schedule.params(), optimized=False, optimizer=None,
        restarts=0, seed=seed, instance_ref=instance_ref, trace=[],
    )


def _build_record(engine: AnsatzEngine, schedule0: Schedule, params: np.ndarray,
                  optimized: bool, optimizer: str | None, restarts: int,
                  seed: int, instance_ref: str, trace: list[dict]) -> RunRecord:
    p = schedule0.p
    gammas, betas = params[:p], params[p:]
    e_p, state = engine.energy_and_state(gammas, betas)
    ham = engine.ham
    dist = distribution(state, ham)
    rel = np.concatenate([dist.feasible_energies, dist.infeasible_energies])
    prob = np.concatenate([dist.feasible_probs, dist.infeasible_probs])
    box = box_stats(rel, weights=prob) if rel.size else box_stats(np.zeros(1))
    singles, twos = engine.gate_totals(p)
    inst = engine.instance
    return RunRecord(
        method=engine.method,
        num_stocks=inst.num_stocks,
        bits_per_stock=inst.bits_per_stock,
        holdings=inst.holdings,
        risk_tolerance=inst.risk_tolerance,
        penalty_strength=(engine.penalty.strength if engine.penalty else None),
        p=p,
        delta_t=schedule0.delta_t,
        scaled_delta_t=schedule0.delta_t * engine.energy_scale,
        optimized=optimized,
        optimizer=optimizer,
        restarts=restarts,
        gammas=[float(g) for g in gammas],
        betas=[float(b) for b in betas],
        initial_gammas=list(schedule0.gammas),
        initial_betas=list(schedule0.betas),
        e_p=float(e_p),
        e_min=ham.e_min,
        w=ham.w,
        delta_e=float(e_p - ham.e_min),
        feasibility=dist.feasibility,
        f_w_over_100=dist.cumulative(ham.w / 100.0),
        box=box,
        gate_singles=singles,
        gate_twos=twos,
        seed=seed,
        instance_ref=instance_ref,
        trace=trace,
    )
