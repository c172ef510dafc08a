"""Command-line front end.

Subcommands: simulate, estimate, stabtest, fig1, fig2, plan. Exit codes:
0 on success, 1 on usage/domain/config errors, 2 when a sample-size plan
is infeasible. The output directory resolves as --out-dir, then the
SPECRAD_OUT_DIR environment variable, then the config value.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, load_config
from .errors import DomainError, InfeasibleError, SpecradError
from .harness import (
    EXPERIMENT_IDS,
    derive_stream,
    read_trajectories_csv,
    report_to_dict,
    run_fig1,
    run_fig2,
    verdict_to_dict,
    write_trajectories_csv,
)
from .ident import METHOD_MULTI_TRAJECTORY, METHOD_POOLED, estimate_rho, rho_bound_data_independent
from .matops import spectral_radius
from .simkit import ChannelTrace, RngSeed, last_tuples, pool_tuples, simulate_channel, simulate_ensemble
from .stabtest import sample_complexity_n_for_test, sample_complexity_nq, stabilizability_test

OUT_DIR_ENV = "SPECRAD_OUT_DIR"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 with usage text instead of argparse's 2
        raise _UsageError(message)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=str, default=None, help="JSON config path")
    parser.add_argument("--seed", type=int, default=None, help="master seed override")
    parser.add_argument("--out-dir", type=str, default=None, help="output directory")
    parser.add_argument("--runs", type=int, default=None, help="runs-per-point override")
    parser.add_argument("--threads", type=int, default=1, help="worker thread count")


def build_parser() -> _Parser:
    parser = _Parser(prog="specrad", description=__doc__)
    sub = parser.add_subparsers(dest="command")

    p_sim = sub.add_parser("simulate", help="emit a trajectories CSV")
    _add_common(p_sim)
    p_sim.add_argument("--n-traj", type=int, default=1, help="trajectories to draw")
    p_sim.add_argument("--noise-free", action="store_true", help="zero process noise")
    p_sim.set_defaults(func=_cmd_simulate)

    p_est = sub.add_parser("estimate", help="print a spectral-radius estimate report as JSON")
    _add_common(p_est)
    p_est.add_argument("--input", type=str, default=None, help="trajectories CSV to read")
    p_est.add_argument(
        "--method",
        choices=[METHOD_POOLED, METHOD_MULTI_TRAJECTORY],
        default=METHOD_POOLED,
    )
    p_est.add_argument("--n-traj", type=int, default=100, help="trajectories when simulating")
    p_est.add_argument("--noise-free", action="store_true", help="zero process noise when simulating")
    p_est.set_defaults(func=_cmd_estimate)

    p_stab = sub.add_parser("stabtest", help="print a stabilizability verdict as JSON")
    _add_common(p_stab)
    p_stab.add_argument("--gammas", type=str, default=None, help="file of 0/1 reception bits")
    p_stab.add_argument("--nq", type=int, default=1000, help="channel samples when simulating")
    p_stab.add_argument("--rho-hat", type=float, default=None, help="estimate override")
    p_stab.add_argument("--epsilon", type=float, default=None, help="accuracy override")
    p_stab.set_defaults(func=_cmd_stabtest)

    p_fig1 = sub.add_parser("fig1", help="bound-comparison experiment (CSV + SVG)")
    _add_common(p_fig1)
    p_fig1.set_defaults(func=_cmd_fig1)

    p_fig2 = sub.add_parser("fig2", help="channel-test experiment (CSV + SVG)")
    _add_common(p_fig2)
    p_fig2.set_defaults(func=_cmd_fig2)

    p_plan = sub.add_parser("plan", help="print required sample sizes for the config")
    _add_common(p_plan)
    p_plan.set_defaults(func=_cmd_plan)

    return parser


def _resolve_config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    out_dir = args.out_dir or os.environ.get(OUT_DIR_ENV)
    return cfg.with_overrides(master_seed=args.seed, out_dir=out_dir, runs=args.runs)


def _cmd_simulate(args) -> int:
    cfg = _resolve_config(args)
    sys_model = cfg.system.to_system()
    seed = RngSeed(cfg.master_seed, derive_stream(EXPERIMENT_IDS["simulate"], args.n_traj, 0))
    trajs = simulate_ensemble(
        sys_model,
        cfg.fig1.T,
        args.n_traj,
        seed,
        x0=cfg.system.x0_vector(),
        noise_free=args.noise_free,
    )
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "trajectories.csv"
    write_trajectories_csv(path, trajs)
    print(path)
    return 0


def _cmd_estimate(args) -> int:
    cfg = _resolve_config(args)
    sys_model = cfg.system.to_system()
    if args.input:
        trajs = read_trajectories_csv(args.input)
    else:
        seed = RngSeed(
            cfg.master_seed, derive_stream(EXPERIMENT_IDS["estimate"], args.n_traj, 0)
        )
        trajs = simulate_ensemble(
            sys_model,
            cfg.fig1.T,
            args.n_traj,
            seed,
            x0=cfg.system.x0_vector(),
            noise_free=args.noise_free,
        )
    if args.method == METHOD_POOLED:
        report = estimate_rho(
            pool_tuples(trajs), cfg.fig1.delta, METHOD_POOLED, sigma_w=sys_model.sigma_w
        )
    else:
        bound = rho_bound_data_independent(
            sys_model, cfg.fig1.T, len(trajs), cfg.fig1.delta
        )
        report = estimate_rho(
            last_tuples(trajs), cfg.fig1.delta, METHOD_MULTI_TRAJECTORY, bound=bound
        )
    print(json.dumps(report_to_dict(report), indent=2))
    return 0


def _read_gammas(path: str) -> ChannelTrace:
    text = Path(path).read_text(encoding="utf-8")
    bits = [tok for tok in text.replace(",", " ").split() if tok]
    try:
        return ChannelTrace(gammas=np.array([int(b) for b in bits]))
    except ValueError as exc:
        raise DomainError(f"cannot parse reception bits from {path}: {exc}") from exc


def _cmd_stabtest(args) -> int:
    cfg = _resolve_config(args)
    fig2 = cfg.fig2
    if args.gammas:
        trace = _read_gammas(args.gammas)
    else:
        seed = RngSeed(
            cfg.master_seed, derive_stream(EXPERIMENT_IDS["stabtest"], args.nq, 0)
        )
        trace = simulate_channel(fig2.q, args.nq, seed)
    rho_hat = fig2.rho_hat if args.rho_hat is None else args.rho_hat
    epsilon = fig2.epsilon if args.epsilon is None else args.epsilon
    verdict = stabilizability_test(rho_hat, epsilon, trace, fig2.delta_q)
    print(json.dumps(verdict_to_dict(verdict), indent=2))
    return 0


def _cmd_fig1(args) -> int:
    cfg = _resolve_config(args)
    run_fig1(cfg, threads=args.threads)
    print(Path(cfg.out_dir) / "fig1.csv")
    return 0


def _cmd_fig2(args) -> int:
    cfg = _resolve_config(args)
    run_fig2(cfg, threads=args.threads)
    print(Path(cfg.out_dir) / "fig2.csv")
    return 0


def _cmd_plan(args) -> int:
    cfg = _resolve_config(args)
    sys_model = cfg.system.to_system()
    fig2 = cfg.fig2
    rho_true = spectral_radius(sys_model.A)
    nq = sample_complexity_nq(fig2.q, rho_true, fig2.delta_q)
    print(f"N_q >= {nq}")
    plan = sample_complexity_n_for_test(
        sys_model, cfg.fig1.T, fig2.q, nq, fig2.delta, fig2.delta_q
    )
    print(f"epsilon = {plan.epsilon:.6g}")
    print(f"N >= {plan.n_traj}")
    return 0


def cli(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(parser.format_usage(), file=sys.stderr, end="")
        print(f"specrad: error: {exc}", file=sys.stderr)
        return 1
    if getattr(args, "func", None) is None:
        print(parser.format_help(), file=sys.stderr, end="")
        return 1
    try:
        return args.func(args)
    except InfeasibleError as exc:
        print(f"infeasible plan: {exc}", file=sys.stderr)
        return 2
    except SpecradError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    raise SystemExit(cli())
