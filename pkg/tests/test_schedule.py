"""Fixed-angle schedules, ansatz evaluation, and the optimizer contract."""
import numpy as np
import pytest

import fqaoa_lab.schedule as sched_mod
from fqaoa_lab.schedule import (
    AnsatzEngine,
    Schedule,
    evaluate_ansatz,
    fixed_angle_record,
    fixed_angles,
    optimize,
)
from fqaoa_lab.analysis import RESULT_COLUMNS
from fqaoa_lab.problem import build_diagonal, generate_instance
from fqaoa_lab.state_prep import slater_amplitudes
from fqaoa_lab.statevector import hamming_weights


def test_fixed_angles_depth_one():
    s = fixed_angles(1, 1.0)
    assert s.gammas == (0.5,)
    assert s.betas == (0.5,)


def test_fixed_angles_depth_two():
    s = fixed_angles(2, 1.0)
    np.testing.assert_allclose(s.gammas, (0.25, 0.75))
    np.testing.assert_allclose(s.betas, (0.75, 0.25))


@pytest.mark.parametrize("p", [1, 3, 10])
def test_fixed_angle_sum_identity(p):
    dt = 0.37
    s = fixed_angles(p, dt)
    for g, b in zip(s.gammas, s.betas):
        assert g + b == pytest.approx(dt)
    assert np.all(np.diff(s.gammas) > 0)
    assert np.all(np.diff(s.betas) < 0)
    assert s.total_time == pytest.approx(p * dt)


def test_fixed_angles_validation():
    with pytest.raises(ValueError):
        fixed_angles(0, 1.0)
    with pytest.raises(ValueError):
        fixed_angles(2, -1.0)
    with pytest.raises(ValueError):
        Schedule(2, 1.0, (0.1,), (0.2, 0.3))


def test_parameter_count_contract():
    s = fixed_angles(5, 2.0)
    assert s.params().size == 10


def test_depth_zero_energy_matches_determinant_oracle():
    """The unevolved ansatz energy equals the determinant-oracle
    expectation, enumerated over the feasible sector."""
    inst = generate_instance(3, 4, 2, 2)
    engine = AnsatzEngine(inst, "fqaoa")
    e0, state = engine.energy_and_state([], [])
    from fqaoa_lab.driver import occupied_orbital_matrix

    oracle = slater_amplitudes(
        occupied_orbital_matrix(engine.driver, engine.selection))
    mask = hamming_weights(8) == engine.ham.m_prime
    probs = oracle.probabilities()[mask]
    expect = float(probs @ engine.ham.energies[mask])
    assert e0 == pytest.approx(expect, abs=1e-9)
    assert state.sector_weight(engine.ham.m_prime) == pytest.approx(1.0,
                                                                    abs=1e-10)


def test_zero_angles_equal_depth_zero():
    inst = generate_instance(4, 4, 2, 2)
    engine = AnsatzEngine(inst, "fqaoa")
    e0, _ = engine.energy_and_state([], [])
    e3, _ = engine.energy_and_state([0.0] * 3, [0.0] * 3)
    assert e3 == pytest.approx(e0, abs=1e-12)


def test_fixed_angle_energy_decreases_with_depth():
    inst = generate_instance(7, 6, 2, 3)
    engine = AnsatzEngine(inst, "fqaoa")
    dt = 0.5 / engine.energy_scale
    energies = []
    for p in (1, 2, 4, 8, 16):
        s = fixed_angles(p, dt)
        e, _ = engine.energy_and_state(s.gammas, s.betas)
        energies.append(e)
    diffs = np.diff(energies)
    assert energies[-1] < energies[0]
    assert np.sum(diffs < 0) >= 3


def test_energy_scale_definitions():
    inst = generate_instance(5, 4, 2, 2)
    ham = build_diagonal(inst)
    assert AnsatzEngine(inst, "fqaoa").energy_scale == pytest.approx(ham.w)
    xeng = AnsatzEngine(inst, "x_qaoa", penalty_strength=0.003)
    pen = xeng.penalty.penalized_energies
    assert xeng.energy_scale == pytest.approx(pen.max() - pen.min())
    assert xeng.energy_scale > ham.w


def test_evaluate_ansatz_methods_agree_with_engine():
    inst = generate_instance(6, 4, 2, 2)
    s = fixed_angles(2, 1.0)
    for method in ("fqaoa", "x_qaoa", "xy_qaoa_1", "xy_qaoa_2"):
        e, state = evaluate_ansatz(method, s, inst)
        engine = AnsatzEngine(inst, method)
        e2, _ = engine.energy_and_state(s.gammas, s.betas)
        assert e == pytest.approx(e2, abs=1e-12)
        assert abs(state.norm() - 1.0) < 1e-9


def test_unknown_method_rejected():
    inst = generate_instance(6, 4, 2, 2)
    with pytest.raises(ValueError, match="unknown method"):
        AnsatzEngine(inst, "grover")


def test_central_difference_gradient_on_quadratic():
    grad = sched_mod._central_difference_gradient(
        lambda x: float(x @ x + 3.0 * x[0]))
    g = grad(np.array([1.0, -2.0]))
    np.testing.assert_allclose(g, [5.0, -4.0], atol=1e-6)


def test_optimizer_reaches_quadratic_minimum():
    """Optimizer sanity on a convex bowl, threaded through the same scipy
    wiring used for ansatz parameters."""
    from scipy import optimize as sciopt

    fun = sched_mod._BestTracker(
        lambda x: float((x[0] - 0.3) ** 2 + 2.0 * (x[1] + 0.7) ** 2))
    res = sciopt.minimize(
        fun, np.zeros(2), method="BFGS",
        jac=sched_mod._central_difference_gradient(fun),
        options={"gtol": 1e-6, "maxiter": 500},
    )
    assert res.fun == pytest.approx(0.0, abs=1e-8)
    np.testing.assert_allclose(fun.best_x, [0.3, -0.7], atol=1e-6)


def test_optimize_never_degrades_fixed_angles():
    inst = generate_instance(8, 4, 2, 2)
    engine = AnsatzEngine(inst, "fqaoa")
    s = fixed_angles(2, 10.0 / engine.energy_scale)
    e_fixed, _ = engine.energy_and_state(s.gammas, s.betas)
    rec = optimize("fqaoa", s, inst, optimizer="bfgs", seed=0)
    assert rec.e_p <= e_fixed + 1e-12
    assert rec.optimized
    assert rec.trace and rec.trace[0]["evaluations"] > 0


def test_optimize_with_restarts_is_deterministic():
    inst = generate_instance(9, 4, 2, 2)
    s = fixed_angles(1, 10.0 / AnsatzEngine(inst, "xy_qaoa_2").energy_scale)
    a = optimize("xy_qaoa_2", s, inst, restarts=2, seed=5)
    b = optimize("xy_qaoa_2", s, inst, restarts=2, seed=5)
    assert a.e_p == b.e_p
    assert a.gammas == b.gammas


def test_optimize_rejects_unknown_optimizer():
    inst = generate_instance(9, 4, 2, 2)
    s = fixed_angles(1, 1.0)
    with pytest.raises(ValueError):
        optimize("fqaoa", s, inst, optimizer="adam")


def test_non_finite_energy_raises():
    inst = generate_instance(10, 4, 2, 2)
    engine = AnsatzEngine(inst, "fqaoa")
    engine.ham.energies[0] = np.nan
    with pytest.raises(FloatingPointError):
        engine.objective(np.array([0.1, 0.2]))


def test_x_qaoa_objective_is_penalized_but_report_is_not():
    inst = generate_instance(11, 4, 2, 2)
    engine = AnsatzEngine(inst, "x_qaoa", penalty_strength=0.01)
    params = np.array([0.3, 0.2])
    obj = engine.objective(params)
    e_plain, _ = engine.energy_and_state(params[:1], params[1:])
    assert obj != pytest.approx(e_plain)  # leakage makes the penalty bite


def test_record_row_matches_column_contract():
    inst = generate_instance(12, 4, 2, 2)
    s = fixed_angles(1, 10.0 / AnsatzEngine(inst, "fqaoa").energy_scale)
    rec = fixed_angle_record("fqaoa", s, inst, seed=3)
    row = rec.csv_row()
    assert len(row) == len(RESULT_COLUMNS)
    assert row[0] == "fqaoa"
    assert row[RESULT_COLUMNS.index("seed")] == 3
    assert rec.delta_e >= -1e-9
    assert rec.feasibility == pytest.approx(1.0, abs=1e-10)
    d = rec.to_dict()
    assert d["p"] == 1 and d["gate_singles"] > 0
