"""Seeded Monte Carlo orchestration of the two shipped experiments and the
CSV surfaces shared with the CLI.

Stream derivation
-----------------
Each Monte Carlo unit owns a Philox stream keyed by (master_seed, stream
index). The 64-bit stream index packs, high to low:

    bits 58-63  experiment id (see EXPERIMENT_IDS)
    bits 32-57  grid value (N or N_q)
    bits 16-31  run index
    bits  0-15  reserved for per-trajectory offsets inside ensembles

so any single record can be reproduced in isolation from (master seed,
experiment id, grid value, run index) alone, and results are identical
regardless of the worker count.

CSV schemas
-----------
fig1.csv: header ``N,run_idx,rho_hat_alg1,err_alg1,bound_f2,rho_hat_alg2,
err_alg2,bound_f4``; one row per (N, run); floats carry 9 significant
digits.

fig2.csv: header ``N_q,espr,tspp``; one row per grid point.

trajectories CSV: header ``traj_id,t,u0..u{p-1},x0..x{n-1}``; one row per
time index t = 0..T+1 and trajectory; the final row of each trajectory
(t = T+1) has empty input fields because only its state is defined.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import ExperimentConfig
from .errors import DomainError
from .ident import (
    METHOD_MULTI_TRAJECTORY,
    METHOD_POOLED,
    RhoEstimateReport,
    estimate_rho,
    rho_bound_data_independent,
)
from .matops import spectral_radius
from .simkit import (
    RngSeed,
    Trajectory,
    last_tuples,
    pool_tuples,
    simulate_channel,
    simulate_ensemble,
)
from .stabtest import Outcome, StabVerdict, stab_margin_rhs, stabilizability_test, theorem3_conditions

__all__ = [
    "EXPERIMENT_IDS",
    "RunRecord",
    "derive_stream",
    "run_fig1",
    "run_fig2",
    "write_fig1_csv",
    "write_fig2_csv",
    "write_trajectories_csv",
    "read_trajectories_csv",
    "report_to_dict",
    "verdict_to_dict",
]

EXPERIMENT_IDS = {
    "simulate": 0,
    "fig1": 1,
    "fig2": 2,
    "estimate": 3,
    "stabtest": 4,
    "coverage": 5,
}

FIG1_HEADER = "N,run_idx,rho_hat_alg1,err_alg1,bound_f2,rho_hat_alg2,err_alg2,bound_f4"
FIG2_HEADER = "N_q,espr,tspp"


def derive_stream(experiment_id: int, grid_value: int, run_index: int) -> int:
    """Pack (experiment, grid value, run) into a base stream index."""
    if not 0 <= experiment_id < (1 << 6):
        raise DomainError(f"experiment_id out of range: {experiment_id}")
    if not 0 <= grid_value < (1 << 26):
        raise DomainError(f"grid_value out of range: {grid_value}")
    if not 0 <= run_index < (1 << 16):
        raise DomainError(f"run_index out of range: {run_index}")
    return (experiment_id << 58) | (grid_value << 32) | (run_index << 16)


@dataclass(frozen=True)
class RunRecord:
    """One Monte Carlo unit: its identity, its stream, and its outputs."""

    experiment: str
    grid_value: int
    run_index: int
    stream: int
    values: dict


def _fmt(v: float) -> str:
    return format(float(v), ".9g")


def _pool_map(fn, tasks, threads: int):
    if threads <= 1:
        return [fn(*t) for t in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda t: fn(*t), tasks))


def run_fig1(config: ExperimentConfig, *, threads: int = 1) -> list[RunRecord]:
    """Bound-comparison experiment over the trajectory-count grid.

    For each N and run: simulate an ensemble, run the pooled estimator with
    its data-dependent certificate and the final-transition estimator with
    the a-priori certificate, and record both errors and both bounds.
    Writes fig1.csv and fig1.svg under config.out_dir.
    """
    sys = config.system.to_system()
    x0 = config.system.x0_vector()
    fig1 = config.fig1
    if fig1.n_grid[-1] >= (1 << 16):
        raise DomainError(
            "trajectory counts above 65535 would exhaust the per-ensemble "
            f"stream reservation, got {fig1.n_grid[-1]}"
        )
    rho_true = spectral_radius(sys.A)
    f4_by_n = {
        n: rho_bound_data_independent(sys, fig1.T, n, fig1.delta)
        for n in fig1.n_grid
    }

    def one(n_traj: int, run: int) -> RunRecord:
        stream = derive_stream(EXPERIMENT_IDS["fig1"], n_traj, run)
        seed = RngSeed(config.master_seed, stream)
        trajs = simulate_ensemble(sys, fig1.T, n_traj, seed, x0=x0)
        pooled = estimate_rho(
            pool_tuples(trajs), fig1.delta, METHOD_POOLED, sigma_w=sys.sigma_w
        )
        multi = estimate_rho(
            last_tuples(trajs),
            fig1.delta,
            METHOD_MULTI_TRAJECTORY,
            bound=f4_by_n[n_traj],
        )
        return RunRecord(
            experiment="fig1",
            grid_value=n_traj,
            run_index=run,
            stream=stream,
            values={
                "rho_hat_alg1": pooled.rho_hat,
                "err_alg1": abs(rho_true - pooled.rho_hat),
                "bound_f2": pooled.bound,
                "rho_hat_alg2": multi.rho_hat,
                "err_alg2": abs(rho_true - multi.rho_hat),
                "bound_f4": multi.bound,
            },
        )

    tasks = [(n, r) for n in fig1.n_grid for r in range(fig1.runs)]
    records = _pool_map(one, tasks, threads)
    records.sort(key=lambda r: (r.grid_value, r.run_index))

    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_fig1_csv(out_dir / "fig1.csv", records)
    from .plotting import fig1_svg

    fig1_svg(out_dir / "fig1.svg", records)
    return records


def run_fig2(config: ExperimentConfig, *, threads: int = 1) -> list[RunRecord]:
    """Channel-test experiment over the sample-count grid.

    For each N_q: compute the TSPP from ground truth, run the three-way
    test on ``runs`` independent reception traces, and record the fraction
    of exactly-correct verdicts (undetermined counts as incorrect). Writes
    fig2.csv and fig2.svg under config.out_dir.
    """
    sys = config.system.to_system()
    fig2 = config.fig2
    rho_true = spectral_radius(sys.A)
    truth_holds = fig2.q > stab_margin_rhs(rho_true)
    correct_outcome = Outcome.HOLDS if truth_holds else Outcome.DOES_NOT_HOLD

    def one(nq: int, run: int) -> RunRecord:
        stream = derive_stream(EXPERIMENT_IDS["fig2"], nq, run)
        trace = simulate_channel(fig2.q, nq, RngSeed(config.master_seed, stream))
        verdict = stabilizability_test(fig2.rho_hat, fig2.epsilon, trace, fig2.delta_q)
        return RunRecord(
            experiment="fig2",
            grid_value=nq,
            run_index=run,
            stream=stream,
            values={
                "outcome": verdict.outcome.value,
                "correct": float(verdict.outcome is correct_outcome),
                "q_hat": verdict.q_hat,
                "f5": verdict.f5,
            },
        )

    tasks = [(nq, r) for nq in fig2.nq_grid for r in range(fig2.runs)]
    records = _pool_map(one, tasks, threads)
    records.sort(key=lambda r: (r.grid_value, r.run_index))

    rows = []
    for nq in fig2.nq_grid:
        tspp = theorem3_conditions(
            fig2.q, rho_true, nq, fig2.delta, fig2.delta_q, fig2.epsilon
        ).tspp
        sub = [r for r in records if r.grid_value == nq]
        espr = sum(r.values["correct"] for r in sub) / len(sub)
        rows.append((nq, espr, tspp))

    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_fig2_csv(out_dir / "fig2.csv", rows)
    from .plotting import fig2_svg

    fig2_svg(out_dir / "fig2.svg", rows)
    return records


def write_fig1_csv(path: str | Path, records: list[RunRecord]) -> None:
    cols = ["rho_hat_alg1", "err_alg1", "bound_f2", "rho_hat_alg2", "err_alg2", "bound_f4"]
    lines = [FIG1_HEADER]
    for rec in records:
        lines.append(
            ",".join(
                [str(rec.grid_value), str(rec.run_index)]
                + [_fmt(rec.values[c]) for c in cols]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_fig2_csv(path: str | Path, rows: list[tuple[int, float, float]]) -> None:
    lines = [FIG2_HEADER]
    for nq, espr, tspp in rows:
        lines.append(f"{nq},{_fmt(espr)},{_fmt(tspp)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_trajectories_csv(path: str | Path, trajs: list[Trajectory]) -> None:
    """Serialize trajectories with the documented column order."""
    if not trajs:
        raise DomainError("no trajectories to write")
    p = trajs[0].inputs.shape[1]
    n = trajs[0].states.shape[1]
    header = (
        ["traj_id", "t"]
        + [f"u{j}" for j in range(p)]
        + [f"x{j}" for j in range(n)]
    )
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for tid, traj in enumerate(trajs):
            horizon = traj.horizon
            for t in range(horizon + 2):
                u_cells = (
                    [_fmt(v) for v in traj.inputs[t]] if t <= horizon else [""] * p
                )
                writer.writerow(
                    [tid, t] + u_cells + [_fmt(v) for v in traj.states[t]]
                )


def read_trajectories_csv(path: str | Path) -> list[Trajectory]:
    """Parse the trajectories CSV back into Trajectory records."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[:2] != ["traj_id", "t"]:
            raise DomainError(f"unrecognized trajectory CSV header in {path}")
        p = sum(1 for c in header if c.startswith("u"))
        n = sum(1 for c in header if c.startswith("x"))
        by_traj: dict[int, list[tuple[int, list[str], list[str]]]] = {}
        for row in reader:
            if not row:
                continue
            tid, t = int(row[0]), int(row[1])
            by_traj.setdefault(tid, []).append((t, row[2 : 2 + p], row[2 + p :]))
    trajs = []
    for tid in sorted(by_traj):
        steps = sorted(by_traj[tid])
        states = np.array([[float(v) for v in x] for _, _, x in steps])
        inputs = np.array(
            [[float(v) for v in u] for _, u, _ in steps[:-1]]
        ).reshape(len(steps) - 1, p)
        trajs.append(Trajectory(inputs=inputs, states=states))
    return trajs


def report_to_dict(report: RhoEstimateReport) -> dict:
    """JSON-ready view of an estimate report."""
    return {
        "rho_hat": report.rho_hat,
        "bound": report.bound,
        "delta": report.delta,
        "method": report.method,
        "aux": dict(report.aux),
    }


def verdict_to_dict(verdict: StabVerdict) -> dict:
    """JSON-ready view of a stabilizability verdict with audit fields."""
    return {
        "outcome": verdict.outcome.value,
        "q_hat": verdict.q_hat,
        "f5": verdict.f5,
        "rho_hat": verdict.rho_hat,
        "epsilon": verdict.epsilon,
        "thresholds": dict(verdict.thresholds),
    }
