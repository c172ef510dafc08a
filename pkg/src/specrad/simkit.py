"""Deterministic, seedable simulation of the noisy linear system and the
Bernoulli packet-drop channel, plus extraction of regression tuples.

Randomness is organized as counter-based Philox streams keyed by a
(master_seed, stream_index) pair, so every draw is a pure function of the
seed and independent of thread scheduling. Ensembles give each member its
own stream at a fixed offset from the base index; the low 16 bits of the
stream index are reserved for those offsets (see the harness module for
the full layout).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError
from .matops import as_matrix, as_square

__all__ = [
    "RngSeed",
    "LtiSystem",
    "Trajectory",
    "DataTuple",
    "ChannelTrace",
    "simulate_trajectory",
    "simulate_ensemble",
    "pool_tuples",
    "last_tuples",
    "simulate_channel",
]

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngSeed:
    """Identifies one reproducible random stream.

    Distinct (master_seed, stream_index) pairs key statistically
    independent Philox streams.
    """

    master_seed: int
    stream_index: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array(
            [self.master_seed & _MASK64, self.stream_index & _MASK64],
            dtype=np.uint64,
        )
        return np.random.Generator(np.random.Philox(key=key))

    def offset(self, k: int) -> "RngSeed":
        """Stream for the k-th member of an ensemble rooted at this seed."""
        return RngSeed(self.master_seed, self.stream_index + k)


@dataclass(frozen=True)
class LtiSystem:
    """Ground-truth model x_{t+1} = A x_t + B u_t + w_t.

    Process noise w_t ~ N(0, sigma_w^2 I) and exploratory inputs
    u_t ~ N(0, sigma_u^2 I), both i.i.d. across time.
    """

    A: np.ndarray
    B: np.ndarray
    sigma_w: float
    sigma_u: float

    def __post_init__(self):
        a = as_square(self.A, name="A")
        b = as_matrix(self.B, name="B")
        if b.shape[0] != a.shape[0]:
            raise DimensionError(
                f"B must have {a.shape[0]} rows to match A, got {b.shape[0]}"
            )
        if not self.sigma_w > 0:
            raise DomainError(f"sigma_w must be > 0, got {self.sigma_w}")
        if not self.sigma_u > 0:
            raise DomainError(f"sigma_u must be > 0, got {self.sigma_u}")
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "B", b)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def p(self) -> int:
        return self.B.shape[1]


@dataclass(frozen=True)
class Trajectory:
    """One rollout: inputs u_0..u_T (rows) and states x_0..x_{T+1} (rows).

    ``noises`` holds the injected w_0..w_T when the trajectory was produced
    in test mode, else None.
    """

    inputs: np.ndarray
    states: np.ndarray
    noises: np.ndarray | None = None

    def __post_init__(self):
        if self.states.shape[0] != self.inputs.shape[0] + 1:
            raise DimensionError(
                f"states must have exactly one more row than inputs, got "
                f"{self.states.shape[0]} vs {self.inputs.shape[0]}"
            )

    @property
    def horizon(self) -> int:
        return self.inputs.shape[0] - 1


@dataclass(frozen=True)
class DataTuple:
    """One regression sample (u, x, x_plus) with x_plus = A x + B u + w."""

    u: np.ndarray
    x: np.ndarray
    x_plus: np.ndarray


@dataclass(frozen=True)
class ChannelTrace:
    """Packet-reception record: gamma_k = 1 if packet k arrived, else 0."""

    gammas: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gammas)
        if g.ndim != 1:
            raise DimensionError(f"gammas must be 1-D, got shape {g.shape}")
        if g.size and not np.all((g == 0) | (g == 1)):
            raise DomainError("gammas entries must be 0 or 1")
        object.__setattr__(self, "gammas", g.astype(np.int64))

    def __len__(self) -> int:
        return self.gammas.shape[0]


def simulate_trajectory(
    sys: LtiSystem,
    horizon: int,
    seed: RngSeed,
    *,
    x0: np.ndarray | None = None,
    inputs: np.ndarray | None = None,
    noise_free: bool = False,
    record_noise: bool = False,
) -> Trajectory:
    """Roll out the system for t = 0..T starting from x_0 (zero by default).

    Inputs and noises are drawn in one batch each (inputs first) from the
    seed's stream, so the result is bit-reproducible for a fixed seed.

    Keyword hooks exist for tests and exploration: ``x0`` overrides the zero
    initial state, ``inputs`` injects a fixed (T+1, p) input sequence,
    ``noise_free`` zeroes the process noise, and ``record_noise`` attaches
    the injected noises to the returned trajectory.
    """
    if horizon < 0:
        raise DomainError(f"horizon must be >= 0, got {horizon}")
    n, p = sys.n, sys.p
    rng = seed.generator()
    if inputs is None:
        u = rng.normal(0.0, sys.sigma_u, size=(horizon + 1, p))
    else:
        u = np.asarray(inputs, dtype=float)
        if u.shape != (horizon + 1, p):
            raise DimensionError(
                f"inputs must have shape {(horizon + 1, p)}, got {u.shape}"
            )
    if noise_free:
        w = np.zeros((horizon + 1, n))
    else:
        w = rng.normal(0.0, sys.sigma_w, size=(horizon + 1, n))
    x = np.zeros((horizon + 2, n))
    if x0 is not None:
        x0 = np.asarray(x0, dtype=float).reshape(-1)
        if x0.shape != (n,):
            raise DimensionError(f"x0 must have shape ({n},), got {x0.shape}")
        x[0] = x0
    a_mat, b_mat = sys.A, sys.B
    for t in range(horizon + 1):
        x[t + 1] = a_mat @ x[t] + b_mat @ u[t] + w[t]
    return Trajectory(inputs=u, states=x, noises=w if record_noise else None)


def simulate_ensemble(
    sys: LtiSystem,
    horizon: int,
    n_traj: int,
    seed: RngSeed,
    *,
    x0: np.ndarray | None = None,
    noise_free: bool = False,
    record_noise: bool = False,
) -> list[Trajectory]:
    """N independent rollouts; member i uses the stream at seed.offset(i).

    Member contents depend only on their own derived stream, so results are
    identical no matter how the loop is scheduled or partitioned.
    """
    if n_traj < 1:
        raise DomainError(f"n_traj must be >= 1, got {n_traj}")
    return [
        simulate_trajectory(
            sys,
            horizon,
            seed.offset(i),
            x0=x0,
            noise_free=noise_free,
            record_noise=record_noise,
        )
        for i in range(n_traj)
    ]


def pool_tuples(trajs: list[Trajectory]) -> list[DataTuple]:
    """All (u_t, x_t, x_{t+1}) samples from every trajectory, t = 0..T."""
    if not trajs:
        raise DomainError("cannot pool an empty trajectory list")
    out: list[DataTuple] = []
    for traj in trajs:
        u, x = traj.inputs, traj.states
        for t in range(u.shape[0]):
            out.append(DataTuple(u=u[t], x=x[t], x_plus=x[t + 1]))
    return out


def last_tuples(trajs: list[Trajectory]) -> list[DataTuple]:
    """One sample per trajectory: the final input and last two states."""
    if not trajs:
        raise DomainError("cannot extract from an empty trajectory list")
    return [
        DataTuple(u=t.inputs[-1], x=t.states[-2], x_plus=t.states[-1])
        for t in trajs
    ]


def simulate_channel(q: float, n_samples: int, seed: RngSeed) -> ChannelTrace:
    """n_samples i.i.d. Bernoulli(q) reception bits, seed-deterministic."""
    if not 0.0 < q < 1.0:
        raise DomainError(f"packet reception rate must be in (0, 1), got {q}")
    if n_samples < 1:
        raise DomainError(f"n_samples must be >= 1, got {n_samples}")
    rng = seed.generator()
    return ChannelTrace(gammas=(rng.random(n_samples) < q).astype(np.int64))
