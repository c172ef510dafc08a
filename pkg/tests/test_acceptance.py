"""Acceptance suite: every exit criterion at its stated tolerance.

Each test prints one PASS/FAIL line (run pytest with -s or check captured
output). Criteria with runtime limits assert the measured wall time too.
"""

import math
import time

import numpy as np

from specrad import (
    ExperimentConfig,
    LtiSystem,
    RngSeed,
    bound_f1,
    bound_f5,
    estimate_q,
    estimate_rho,
    last_tuples,
    least_squares,
    pool_tuples,
    rho_bound_data_independent,
    run_fig1,
    run_fig2,
    sample_complexity_nq,
    sample_complexity_rho,
    simulate_channel,
    simulate_ensemble,
    spectral_radius,
    spectral_variation_bound,
)
from specrad.cli import cli
from specrad.harness import EXPERIMENT_IDS, derive_stream
from specrad.ident import METHOD_MULTI_TRAJECTORY

A_BENCH = np.array([[1.2, 0.1], [0.0, 1.0]])
B_BENCH = np.array([[0.0], [1.0]])


def bench_system() -> LtiSystem:
    return LtiSystem(A=A_BENCH, B=B_BENCH, sigma_w=0.1, sigma_u=0.1)


def _report(idx: int, ok: bool, detail: str) -> None:
    print(f"[acceptance] criterion {idx}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"criterion {idx} failed: {detail}"


def _coverage_seed(grid_value: int, rep: int) -> RngSeed:
    return RngSeed(0, derive_stream(EXPERIMENT_IDS["coverage"], grid_value, rep))


def test_criterion_1_noiseless_identification():
    start = time.perf_counter()
    sys_model = bench_system()
    trajs = simulate_ensemble(sys_model, 5, 2, RngSeed(1, 0), noise_free=True)
    tuples = pool_tuples(trajs)
    est = least_squares(tuples)
    err = float(np.linalg.norm(est.A_hat - sys_model.A, 2))
    rho_hat = spectral_radius(est.A_hat)
    elapsed = time.perf_counter() - start
    ok = len(tuples) >= 3 and err < 1e-8 and abs(rho_hat - 1.2) < 1e-8 and elapsed < 1.0
    _report(1, ok, f"err={err:.2e} rho_hat={rho_hat:.10f} time={elapsed:.2f}s")


def test_criterion_2_spectral_variation_suite():
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst_excess = -math.inf
    for _ in range(1000):
        n = int(rng.integers(1, 7))
        scale_p = rng.uniform(0.1, 5.0)
        scale_q = rng.uniform(0.1, 5.0)
        lhs, rhs = spectral_variation_bound(
            rng.normal(size=(n, n)) * scale_p, rng.normal(size=(n, n)) * scale_q
        )
        worst_excess = max(worst_excess, lhs - rhs)
    m = rng.normal(size=(4, 4))
    eq_lhs, eq_rhs = spectral_variation_bound(m, m)
    sc_lhs, sc_rhs = spectral_variation_bound(np.eye(1), -np.eye(1))
    elapsed = time.perf_counter() - start
    ok = (
        worst_excess <= 1e-9
        and abs(eq_lhs) <= 1e-12
        and abs(eq_rhs) <= 1e-12
        and abs(sc_lhs - 2.0) <= 1e-12
        and abs(sc_rhs - 2.0) <= 1e-12
        and elapsed < 5.0
    )
    _report(2, ok, f"worst lhs-rhs={worst_excess:.2e} time={elapsed:.2f}s")


def test_criterion_3_pooled_radius_coverage():
    start = time.perf_counter()
    sys_model = bench_system()
    reps = 2000
    violations = 0
    for rep in range(reps):
        trajs = simulate_ensemble(sys_model, 5, 200, _coverage_seed(200, rep))
        est = least_squares(pool_tuples(trajs))
        f1 = bound_f1(est, 0.1, sys_model.sigma_w)
        violations += float(np.linalg.norm(est.A_hat - sys_model.A, 2)) > f1
    rate = violations / reps
    limit = 0.1 + 3 * math.sqrt(0.09 / reps)
    elapsed = time.perf_counter() - start
    ok = rate <= limit and elapsed < 60.0
    _report(3, ok, f"violation rate={rate:.4f} (limit {limit:.4f}) time={elapsed:.1f}s")


def test_criterion_4_trajectory_count_bound_coverage():
    start = time.perf_counter()
    sys_model = bench_system()
    reps = 200
    f4 = rho_bound_data_independent(sys_model, 5, 1000, 0.1)
    violations = 0
    for rep in range(reps):
        trajs = simulate_ensemble(sys_model, 5, 1000, _coverage_seed(1000, rep))
        report = estimate_rho(
            last_tuples(trajs), 0.1, METHOD_MULTI_TRAJECTORY, bound=f4
        )
        violations += abs(1.2 - report.rho_hat) > f4
    rate = violations / reps
    elapsed = time.perf_counter() - start
    ok = rate <= 0.13 and elapsed < 60.0
    _report(4, ok, f"violation rate={rate:.4f} (limit 0.13) time={elapsed:.1f}s")


def test_criterion_5_reception_rate_coverage():
    start = time.perf_counter()
    q, n_q, delta_q = 0.75, 100, 0.1
    f5 = bound_f5(n_q, delta_q)
    reps = 5000
    violations = 0
    for rep in range(reps):
        trace = simulate_channel(q, n_q, _coverage_seed(100, rep))
        violations += abs(q - estimate_q(trace)) > f5
    rate = violations / reps
    elapsed = time.perf_counter() - start
    ok = rate <= delta_q and elapsed < 5.0
    _report(5, ok, f"violation rate={rate:.4f} (limit {delta_q}) time={elapsed:.1f}s")


def test_criterion_6_bound_comparison_experiment(tmp_path):
    start = time.perf_counter()
    cfg = ExperimentConfig(out_dir=str(tmp_path))
    records = run_fig1(cfg)
    grid = sorted({r.grid_value for r in records})

    medians_tighter = True
    for n in grid:
        sub = [r.values for r in records if r.grid_value == n]
        med_f2 = float(np.median([v["bound_f2"] for v in sub]))
        med_f4 = float(np.median([v["bound_f4"] for v in sub]))
        medians_tighter &= med_f2 < med_f4

    exceed = 0
    for r in records:
        exceed += r.values["err_alg1"] > r.values["bound_f2"]
        exceed += r.values["err_alg2"] > r.values["bound_f4"]
    exceed_rate = exceed / (2 * len(records))

    all_series = np.array(
        [
            [r.values[k] for k in ("err_alg1", "bound_f2", "err_alg2", "bound_f4")]
            for r in records
        ]
    )
    finite_positive = bool(np.all(np.isfinite(all_series)) and np.all(all_series > 0))

    elapsed = time.perf_counter() - start
    ok = (
        len(records) == 100
        and medians_tighter
        and exceed_rate <= 0.2
        and finite_positive
        and elapsed < 120.0
    )
    _report(
        6,
        ok,
        f"median f2<f4 at all N={medians_tighter}, exceed rate={exceed_rate:.3f}, "
        f"finite+positive={finite_positive}, time={elapsed:.1f}s",
    )


def test_criterion_7_channel_test_experiment(tmp_path):
    start = time.perf_counter()
    cfg = ExperimentConfig(out_dir=str(tmp_path))
    run_fig2(cfg)
    rows = [
        line.split(",")
        for line in (tmp_path / "fig2.csv").read_text().splitlines()[1:]
    ]
    table = {int(nq): (float(espr), float(tspp)) for nq, espr, tspp in rows}

    threshold_nq = sample_complexity_nq(cfg.fig2.q, 1.2, cfg.fig2.delta_q)
    below_zero = all(
        table[nq][1] == 0.0 for nq in table if nq < threshold_nq
    )
    top_tspp_ok = abs(table[1000][1] - 0.9801) <= 1e-9
    slack_ok = True
    for nq, (espr, tspp) in table.items():
        slack = 3 * math.sqrt(tspp * (1 - tspp) / cfg.fig2.runs)
        slack_ok &= espr >= tspp - slack
    top_espr_ok = table[1000][0] >= 0.99

    elapsed = time.perf_counter() - start
    ok = below_zero and top_tspp_ok and slack_ok and top_espr_ok and elapsed < 60.0
    _report(
        7,
        ok,
        f"tspp zero below N_q={threshold_nq}: {below_zero}, tspp(1000)={table[1000][1]:.10f}, "
        f"espr>=tspp-slack: {slack_ok}, espr(1000)={table[1000][0]:.3f}, time={elapsed:.1f}s",
    )


def test_criterion_8_planner_checks():
    nq_ok = sample_complexity_nq(0.75, 1.2, 0.01) == 170

    scalar = LtiSystem(
        A=np.array([[0.5]]), B=np.array([[1.0]]), sigma_w=0.1, sigma_u=0.1
    )
    n_ok = sample_complexity_rho(scalar, 0, 0.1, 0.1) == 226_027

    rng = np.random.default_rng(888)
    consistency_ok = True
    for _ in range(20):
        sys_model = LtiSystem(
            A=np.array([[rng.uniform(-0.9, 0.9)]]),
            B=np.array([[rng.uniform(0.2, 2.0)]]),
            sigma_w=float(rng.uniform(0.01, 0.5)),
            sigma_u=float(rng.uniform(0.01, 0.5)),
        )
        horizon = int(rng.integers(0, 4))
        epsilon = float(rng.uniform(0.02, 0.5))
        delta = float(rng.uniform(0.01, 0.3))
        n_plan = sample_complexity_rho(sys_model, horizon, epsilon, delta)
        f4 = rho_bound_data_independent(sys_model, horizon, n_plan, delta)
        consistency_ok &= f4 <= epsilon + 1e-9

    ok = nq_ok and n_ok and consistency_ok
    _report(
        8,
        ok,
        f"N_q plan=170: {nq_ok}, scalar N plan=226027: {n_ok}, "
        f"accuracy met at planned N: {consistency_ok}",
    )


def test_criterion_9_byte_determinism(tmp_path):
    dirs = {name: tmp_path / name for name in ("a1", "a2", "a4", "b1", "b2", "b4")}
    runs = [
        ("fig1", "a1", "1"),
        ("fig1", "a2", "1"),
        ("fig1", "a4", "4"),
        ("fig2", "b1", "1"),
        ("fig2", "b2", "1"),
        ("fig2", "b4", "4"),
    ]
    for cmd, out, threads in runs:
        code = cli([cmd, "--seed", "7", "--out-dir", str(dirs[out]), "--threads", threads])
        assert code == 0

    fig1_bytes = [
        (dirs[d] / "fig1.csv").read_bytes() for d in ("a1", "a2", "a4")
    ]
    fig2_bytes = [
        (dirs[d] / "fig2.csv").read_bytes() for d in ("b1", "b2", "b4")
    ]
    fig1_ok = fig1_bytes[0] == fig1_bytes[1] == fig1_bytes[2]
    fig2_ok = fig2_bytes[0] == fig2_bytes[1] == fig2_bytes[2]
    ok = fig1_ok and fig2_ok
    _report(9, ok, f"fig1 identical={fig1_ok}, fig2 identical={fig2_ok}")
