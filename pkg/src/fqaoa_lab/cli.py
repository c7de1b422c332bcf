"""Batch front door: instance generation, runs, sweeps, certification,
and CSV analysis.

Exit codes: 0 success, 2 configuration error, 3 certification failure,
4 numerical pathology.  All randomness flows from explicit seeds; rerunning
a plan with the same seeds reproduces every output byte for byte.
"""
from __future__ import annotations

import json
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor

import click
import numpy as np

from .analysis import (
    CertificationError,
    RESULT_COLUMNS,
    box_stats,
    certify_gate_counts,
    power_law_slope,
    read_results_csv,
    write_results_csv,
)
from .driver import build_driver, hopping_scale, select_occupied, occupied_orbital_matrix
from .evolution import build_mixer_layout, synthesize_mixer_circuit, synthesize_phase_circuit
from .lattice import LatticeShape
from .problem import (
    PortfolioInstance,
    build_diagonal,
    generate_instance,
    load_instance,
    save_instance,
)
from .schedule import (
    DEFAULT_PENALTY_STRENGTH,
    METHODS,
    fixed_angle_record,
    fixed_angles,
    optimize,
)
from .state_prep import prepare_initial_state

OUTDIR_ENV = "FQAOA_LAB_OUTDIR"

EXIT_CONFIG = 2
EXIT_CERTIFICATION = 3
EXIT_NUMERICAL = 4


def _outdir(value: str | None) -> str:
    out = value or os.environ.get(OUTDIR_ENV, ".")
    os.makedirs(out, exist_ok=True)
    return out


@click.group()
def main() -> None:
    """Simulation laboratory for constraint-preserving QAOA variants."""


@main.command()
@click.option("--n", type=int, required=True, help="number of stocks")
@click.option("--d", type=int, default=2, show_default=True, help="bits per stock")
@click.option("--m", type=int, required=True, help="total holdings")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--lambda", "lam", type=float, default=0.9, show_default=True,
              help="risk tolerance")
@click.option("--out", type=click.Path(), default=None, help="instance file path")
@click.option("--force", is_flag=True, help="overwrite an existing file")
def gen(n, d, m, seed, lam, out, force):
    """Generate a seeded factor-model instance file."""
    try:
        inst = generate_instance(seed, n, d, m, lam)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    feasible = math.comb(n * d, inst.particle_number)
    inst = PortfolioInstance(
        num_stocks=n, bits_per_stock=d, holdings=m, risk_tolerance=lam,
        covariance=inst.covariance, returns=inst.returns, seed=seed,
        comment=f"feasible sector: C({n * d},{inst.particle_number}) = {feasible} strings",
    )
    path = out or os.path.join(_outdir(None), f"instance_n{n}d{d}m{m}s{seed}.json")
    try:
        save_instance(inst, path, force=force)
    except FileExistsError as exc:
        raise click.UsageError(str(exc))
    click.echo(f"wrote {path} ({feasible} feasible strings)")


def _single_run(inst, instance_ref, method, p, wdt, do_optimize, optimizer,
                restarts, seed, penalty_strength):
    from .schedule import AnsatzEngine

    engine = AnsatzEngine(inst, method, penalty_strength)
    delta_t = wdt / engine.energy_scale
    schedule = fixed_angles(p, delta_t)
    if do_optimize:
        record = optimize(method, schedule, inst, optimizer=optimizer,
                          restarts=restarts, seed=seed,
                          penalty_strength=penalty_strength,
                          instance_ref=instance_ref)
    else:
        record = fixed_angle_record(method, schedule, inst,
                                    penalty_strength=penalty_strength,
                                    seed=seed, instance_ref=instance_ref)
    return record


@main.command()
@click.option("--instance", "instance_path", type=click.Path(exists=True),
              required=True)
@click.option("--method", type=click.Choice(METHODS), required=True)
@click.option("--p", type=int, required=True, help="circuit depth")
@click.option("--wdt", type=float, default=10.0, show_default=True,
              help="scaled time step (energy range times delta t)")
@click.option("--optimize/--no-optimize", "do_optimize", default=True,
              show_default=True)
@click.option("--optimizer", type=click.Choice(["bfgs", "cg"]), default="bfgs",
              show_default=True)
@click.option("--restarts", type=int, default=1, show_default=True)
@click.option("--penalty", type=float, default=DEFAULT_PENALTY_STRENGTH,
              show_default=True, help="penalty strength for x_qaoa")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="output directory")
def run(instance_path, method, p, wdt, do_optimize, optimizer, restarts,
        penalty, seed, out):
    """Execute one method at one depth; write a record and a CSV row."""
    inst = load_instance(instance_path)
    try:
        record = _single_run(inst, instance_path, method, p, wdt, do_optimize,
                             optimizer, restarts, seed, penalty)
    except FloatingPointError as exc:
        click.echo(f"numerical pathology: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL)
    outdir = _outdir(out)
    stem = f"run_{method}_p{p}_s{seed}"
    with open(os.path.join(outdir, stem + ".json"), "w") as fh:
        json.dump(record.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    write_results_csv(os.path.join(outdir, stem + ".csv"), [record.csv_row()])
    click.echo(
        f"{method} p={p} E_p={record.e_p:.6g} dE/W={record.delta_e / record.w:.6g} "
        f"feasibility={record.feasibility:.6g} gates=({record.gate_singles}, "
        f"{record.gate_twos})"
    )


def _sweep_point(args):
    (inst_payload, instance_ref, method, p, wdt, do_optimize, optimizer,
     restarts, seed, penalty) = args
    inst = PortfolioInstance(
        num_stocks=inst_payload["N"], bits_per_stock=inst_payload["D"],
        holdings=inst_payload["M"], risk_tolerance=inst_payload["lambda"],
        covariance=np.array(inst_payload["sigma"]).reshape(
            inst_payload["N"], inst_payload["N"]),
        returns=np.array(inst_payload["mu"]), seed=inst_payload.get("seed"),
    )
    try:
        record = _single_run(inst, instance_ref, method, p, wdt, do_optimize,
                             optimizer, restarts, seed, penalty)
        return record.csv_row() + ["ok"]
    except Exception as exc:  # isolated: one bad point must not kill the grid
        row = [method, inst.num_stocks, inst.bits_per_stock, inst.holdings,
               p, wdt, int(do_optimize)] + [float("nan")] * 9 + [0, 0, seed]
        return row + [f"error: {exc}"]


def _plan_instances(plan) -> list[tuple[dict, str, int]]:
    """Resolve the plan's instance source into per-seed payloads."""
    seeds = plan.get("seeds", [0])
    spec = plan.get("instance", {})
    out = []
    if "path" in spec:
        inst = load_instance(spec["path"])
        for seed in seeds:
            out.append((_instance_payload(inst), spec["path"], seed))
    elif "generate" in spec:
        g = spec["generate"]
        for seed in seeds:
            inst = generate_instance(seed, g["n"], g.get("d", 2), g["m"],
                                     g.get("lambda", 0.9))
            out.append((_instance_payload(inst), f"generated(seed={seed})", seed))
    else:
        raise click.UsageError("plan needs instance.path or instance.generate")
    return out


def _instance_payload(inst: PortfolioInstance) -> dict:
    return {
        "N": inst.num_stocks, "D": inst.bits_per_stock, "M": inst.holdings,
        "lambda": inst.risk_tolerance,
        "sigma": [float(v) for v in inst.covariance.ravel()],
        "mu": [float(v) for v in inst.returns], "seed": inst.seed,
    }


@main.command()
@click.option("--plan", "plan_path", type=click.Path(exists=True), required=True,
              help="JSON sweep plan")
@click.option("--out", type=click.Path(), default=None, help="output directory")
def sweep(plan_path, out):
    """Run a {method, p, wdt, seed} grid and emit one CSV."""
    with open(plan_path) as fh:
        plan = json.load(fh)
    methods = plan.get("methods", ["fqaoa"])
    p_values = plan.get("p", [1])
    wdt_values = plan.get("wdt", [10.0])
    do_optimize = bool(plan.get("optimize", False))
    optimizer = plan.get("optimizer", "bfgs")
    restarts = int(plan.get("restarts", 1))
    penalty = float(plan.get("penalty", DEFAULT_PENALTY_STRENGTH))
    parallelism = int(plan.get("parallelism", 1))

    points = []
    for payload, ref, seed in _plan_instances(plan):
        for method in methods:
            for p in p_values:
                for wdt in wdt_values:
                    points.append((payload, ref, method, p, wdt, do_optimize,
                                   optimizer, restarts, seed, penalty))
    if parallelism > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            rows = list(pool.map(_sweep_point, points))
    else:
        rows = [_sweep_point(pt) for pt in points]
    outdir = _outdir(out or plan.get("output"))
    path = os.path.join(outdir, plan.get("name", "sweep") + ".csv")
    write_results_csv(path, rows, extra_columns=["status"])
    failures = sum(1 for r in rows if r[-1] != "ok")
    click.echo(f"wrote {path}: {len(rows)} rows, {failures} failed")


@main.command()
@click.option("--n-list", default="4,6,8", show_default=True,
              help="comma-separated leg lengths")
@click.option("--d", type=int, default=2, show_default=True)
@click.option("--p", type=int, default=1, show_default=True,
              help="depth for the ansatz totals line")
@click.option("--corrupt", type=click.Choice(["init", "phase", "mixer"]),
              default=None, hidden=True,
              help="test hook: miscount one component to exercise failure")
def certify(n_list, d, p, corrupt):
    """Synthesize every component over a shape grid and certify counts."""
    try:
        n_values = [int(v) for v in n_list.split(",")]
    except ValueError:
        raise click.UsageError("--n-list must be comma-separated integers")
    failures = []
    for n in n_values:
        shape = LatticeShape(n, d)
        layout = build_mixer_layout(shape)
        driver = build_driver(shape)
        inst = generate_instance(1, n, d, max(1, n // 2))
        phase = synthesize_phase_circuit(0.37, inst)
        mixer = synthesize_mixer_circuit(0.59, layout, 1.0, 1.0)
        if corrupt in ("phase", "mixer"):
            {"phase": phase, "mixer": mixer}[corrupt].gates.pop()
        for circ in (phase, mixer):
            try:
                certify_gate_counts(circ, shape, 0)
            except CertificationError as exc:
                failures.append(str(exc))
        for m in range(0, n * d // 2 + 1):
            m_prime = n * d // 2 - m
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                selection = select_occupied(driver, m_prime)
            occ = occupied_orbital_matrix(driver, selection)
            _, init_circ, _ = prepare_initial_state(occ, via_circuit=False)
            if corrupt == "init":
                init_circ.gates.pop()
            try:
                certify_gate_counts(init_circ, shape, m)
            except CertificationError as exc:
                failures.append(str(exc))
        ps, pt = phase.counts()
        ms, mt = mixer.counts()
        click.echo(f"N={n} D={d}: U_p=({ps},{pt}) U_m=({ms},{mt}) certified "
                   f"for M=0..{n * d // 2}")
    if 8 in n_values and d == 2:
        from .analysis import ansatz_gate_totals

        singles, twos = ansatz_gate_totals("fqaoa", 8, 2, 4, p)
        click.echo(f"ansatz totals at N=8 M=4 D=2 p={p}: "
                   f"{singles} single-qubit, {twos} two-qubit")
    if failures:
        for f in failures:
            click.echo(f"FAIL {f}", err=True)
        sys.exit(EXIT_CERTIFICATION)
    click.echo("all components match their closed-form counts")


@main.command()
@click.option("--csv", "csv_path", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), default=None,
              help="summary output path (default: stdout)")
@click.option("--fit-window", default=None,
              help="lo,hi window in scaled total time for a power-law fit")
def analyze(csv_path, out, fit_window):
    """Summarize a sweep CSV: per-(method, p) statistics across seeds."""
    rows = [r for r in read_results_csv(csv_path) if r.get("status", "ok") == "ok"]
    if not rows:
        raise click.UsageError("no successful rows to analyze")
    groups: dict[tuple[str, str], list[dict]] = {}
    for r in rows:
        groups.setdefault((r["method"], r["p"]), []).append(r)
    lines = ["method,p,runs,dE_over_W_median,dE_over_W_q1,dE_over_W_q3,"
             "feasibility_mean,F_W_over_100_mean"]
    for (method, p), rs in sorted(groups.items()):
        de = [float(r["dE_over_W"]) for r in rs]
        stats = box_stats(de)
        feas = float(np.mean([float(r["feasibility"]) for r in rs]))
        fw = float(np.mean([float(r["F_W_over_100"]) for r in rs]))
        lines.append(
            f"{method},{p},{len(rs)},{stats['median']!r},{stats['q1']!r},"
            f"{stats['q3']!r},{feas!r},{fw!r}"
        )
    if fit_window:
        lo, hi = (float(v) for v in fit_window.split(","))
        by_method: dict[str, list[tuple[float, float]]] = {}
        for r in rows:
            t = float(r["p"]) * float(r["delta_t"])
            by_method.setdefault(r["method"], []).append(
                (t, float(r["dE_over_W"])))
        for method, pts in sorted(by_method.items()):
            pts.sort()
            try:
                slope = power_law_slope([t for t, _ in pts], [v for _, v in pts],
                                        window=(lo, hi))
                lines.append(f"# power-law slope {method}: {slope!r}")
            except ValueError as exc:
                lines.append(f"# power-law slope {method}: n/a ({exc})")
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
        click.echo(f"wrote {out}")
    else:
        click.echo(text, nl=False)


if __name__ == "__main__":
    main()
