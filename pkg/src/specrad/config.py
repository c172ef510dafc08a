"""Experiment configuration: JSON schema, defaults, validation.

The default profile reproduces both shipped experiments: a 2-state system
with state matrix [[1.2, 0.1], [0, 1]], input column [0; 1], noise and
input scales 0.1, horizon T = 5, and a reception rate of 0.75 for the
channel study. See configs/default.json for the serialized form.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .simkit import LtiSystem

__all__ = [
    "SystemConfig",
    "Fig1Config",
    "Fig2Config",
    "ExperimentConfig",
    "default_nq_grid",
    "load_config",
]

DEFAULT_N_GRID = tuple(range(100, 1001, 100))


def default_nq_grid(low: int = 3, high: int = 1000, points: int = 20) -> tuple[int, ...]:
    """Log-spaced integer grid of channel sample counts, endpoints included."""
    pts = np.geomspace(low, high, points)
    return tuple(sorted({int(round(v)) for v in pts}))


def _require_prob(value: float, fld: str) -> float:
    if not 0.0 < value < 1.0:
        raise ConfigError(fld, f"must be in (0, 1), got {value}")
    return float(value)


def _require_grid(values, fld: str) -> tuple[int, ...]:
    grid = tuple(int(v) for v in values)
    if not grid:
        raise ConfigError(fld, "grid must be nonempty")
    if any(v < 1 for v in grid):
        raise ConfigError(fld, f"grid entries must be >= 1, got {grid}")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError(fld, "grid must be strictly ascending")
    return grid


@dataclass(frozen=True)
class SystemConfig:
    A: tuple = ((1.2, 0.1), (0.0, 1.0))
    B: tuple = ((0.0,), (1.0,))
    sigma_w: float = 0.1
    sigma_u: float = 0.1
    x0: tuple | None = None

    def to_system(self) -> LtiSystem:
        try:
            return LtiSystem(
                A=np.asarray(self.A, dtype=float),
                B=np.asarray(self.B, dtype=float),
                sigma_w=self.sigma_w,
                sigma_u=self.sigma_u,
            )
        except ValueError as exc:
            raise ConfigError("system", str(exc)) from exc

    def x0_vector(self) -> np.ndarray | None:
        return None if self.x0 is None else np.asarray(self.x0, dtype=float)


@dataclass(frozen=True)
class Fig1Config:
    """Bound-comparison experiment: both estimators on shared ensembles."""

    T: int = 5
    delta: float = 0.1
    n_grid: tuple[int, ...] = DEFAULT_N_GRID
    runs: int = 10

    def __post_init__(self):
        if self.T < 0:
            raise ConfigError("fig1.T", f"must be >= 0, got {self.T}")
        _require_prob(self.delta, "fig1.delta")
        object.__setattr__(self, "n_grid", _require_grid(self.n_grid, "fig1.n_grid"))
        if self.runs < 1:
            raise ConfigError("fig1.runs", f"must be >= 1, got {self.runs}")


@dataclass(frozen=True)
class Fig2Config:
    """Channel-test experiment: empirical success rate vs the TSPP."""

    rho_hat: float = 1.15
    epsilon: float = 0.1
    delta: float = 0.01
    delta_q: float = 0.01
    q: float = 0.75
    nq_grid: tuple[int, ...] = field(default_factory=default_nq_grid)
    runs: int = 400

    def __post_init__(self):
        if self.rho_hat < 0:
            raise ConfigError("fig2.rho_hat", f"must be >= 0, got {self.rho_hat}")
        if self.epsilon < 0:
            raise ConfigError("fig2.epsilon", f"must be >= 0, got {self.epsilon}")
        _require_prob(self.delta, "fig2.delta")
        _require_prob(self.delta_q, "fig2.delta_q")
        _require_prob(self.q, "fig2.q")
        object.__setattr__(self, "nq_grid", _require_grid(self.nq_grid, "fig2.nq_grid"))
        if self.runs < 1:
            raise ConfigError("fig2.runs", f"must be >= 1, got {self.runs}")


@dataclass(frozen=True)
class ExperimentConfig:
    master_seed: int = 0
    out_dir: str = "out"
    system: SystemConfig = field(default_factory=SystemConfig)
    fig1: Fig1Config = field(default_factory=Fig1Config)
    fig2: Fig2Config = field(default_factory=Fig2Config)

    def with_overrides(
        self,
        *,
        master_seed: int | None = None,
        out_dir: str | None = None,
        runs: int | None = None,
    ) -> "ExperimentConfig":
        cfg = self
        if master_seed is not None:
            cfg = replace(cfg, master_seed=int(master_seed))
        if out_dir is not None:
            cfg = replace(cfg, out_dir=out_dir)
        if runs is not None:
            cfg = replace(
                cfg,
                fig1=replace(cfg.fig1, runs=int(runs)),
                fig2=replace(cfg.fig2, runs=int(runs)),
            )
        return cfg


def _build_section(cls, data: dict, section: str):
    known = set(cls.__dataclass_fields__)
    unknown = set(data) - known
    if unknown:
        raise ConfigError(section, f"unknown fields {sorted(unknown)}")
    kwargs = dict(data)
    for key in ("n_grid", "nq_grid", "A", "B", "x0"):
        if key in kwargs and kwargs[key] is not None:
            kwargs[key] = tuple(
                tuple(row) if isinstance(row, list) else row for row in kwargs[key]
            )
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(section, str(exc)) from exc


def config_from_dict(data: dict) -> ExperimentConfig:
    known = {"master_seed", "out_dir", "system", "fig1", "fig2"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError("<root>", f"unknown fields {sorted(unknown)}")
    return ExperimentConfig(
        master_seed=int(data.get("master_seed", 0)),
        out_dir=str(data.get("out_dir", "out")),
        system=_build_section(SystemConfig, data.get("system", {}), "system"),
        fig1=_build_section(Fig1Config, data.get("fig1", {}), "fig1"),
        fig2=_build_section(Fig2Config, data.get("fig2", {}), "fig2"),
    )


def config_to_dict(cfg: ExperimentConfig) -> dict:
    return {
        "master_seed": cfg.master_seed,
        "out_dir": cfg.out_dir,
        "system": {
            "A": [list(row) for row in cfg.system.A],
            "B": [list(row) for row in cfg.system.B],
            "sigma_w": cfg.system.sigma_w,
            "sigma_u": cfg.system.sigma_u,
            "x0": None if cfg.system.x0 is None else list(cfg.system.x0),
        },
        "fig1": {
            "T": cfg.fig1.T,
            "delta": cfg.fig1.delta,
            "n_grid": list(cfg.fig1.n_grid),
            "runs": cfg.fig1.runs,
        },
        "fig2": {
            "rho_hat": cfg.fig2.rho_hat,
            "epsilon": cfg.fig2.epsilon,
            "delta": cfg.fig2.delta,
            "delta_q": cfg.fig2.delta_q,
            "q": cfg.fig2.q,
            "nq_grid": list(cfg.fig2.nq_grid),
            "runs": cfg.fig2.runs,
        },
    }


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse a JSON config file, reporting bad fields by name."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("<root>", "top-level JSON value must be an object")
    return config_from_dict(data)
