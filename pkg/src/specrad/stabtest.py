"""Three-way stabilizability verdict for control over a lossy channel,
its oracle-mode correctness conditions, and sample-size planning.

The stabilizability condition under Bernoulli packet drops with reception
rate q is q > 1 - 1/rho(A)^2. The data-facing test consumes only an
estimate rho_hat (with accuracy epsilon) and a finite reception trace; the
condition checker and both planners are oracle-mode and consume ground
truth.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .channel import bound_f5, estimate_q
from .errors import DomainError, PreconditionError
from .matops import spectral_radius
from .ident import sample_complexity_rho
from .simkit import ChannelTrace, LtiSystem

__all__ = [
    "Outcome",
    "StabVerdict",
    "TheoremConditions",
    "TrajectoryPlan",
    "stabilizability_test",
    "stab_margin_rhs",
    "theorem3_conditions",
    "sample_complexity_nq",
    "sample_complexity_n_for_test",
]


class Outcome(enum.Enum):
    """Verdict of the three-way stabilizability test."""

    HOLDS = "holds"
    DOES_NOT_HOLD = "does_not_hold"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class StabVerdict:
    """Test outcome plus every intermediate quantity, for auditability.

    ``thresholds`` records both branch right-hand sides; a branch whose
    guard q_hat -/+ f5 < 1 fails stores None for its threshold.
    """

    outcome: Outcome
    q_hat: float
    f5: float
    rho_hat: float
    epsilon: float
    thresholds: dict[str, float | None]


@dataclass(frozen=True)
class TheoremConditions:
    """The three correctness conditions of the test, plus the TSPP.

    tspp is (1 - delta)(1 - delta_q) when all three conditions hold and 0
    otherwise.
    """

    cond_nq1: bool
    cond_nq2: bool
    cond_eps: bool
    tspp: float


@dataclass(frozen=True)
class TrajectoryPlan:
    """Trajectory count required by the combined test plan, with the
    accuracy target epsilon it was derived from."""

    n_traj: int
    epsilon: float


def stabilizability_test(
    rho_hat: float, epsilon: float, trace: ChannelTrace, delta_q: float
) -> StabVerdict:
    """Three-way test of q > 1 - 1/rho(A)^2 from finite channel samples.

    Evaluates the two guarded branches in order with strict inequalities:

        q_hat - f5 < 1  and  rho_hat + epsilon < sqrt(1/(1 - q_hat + f5))
            -> HOLDS
        q_hat + f5 < 1  and  rho_hat - epsilon > sqrt(1/(1 - q_hat - f5))
            -> DOES_NOT_HOLD

    and returns UNDETERMINED when neither fires (ties included).
    """
    if rho_hat < 0.0:
        raise DomainError(f"rho_hat must be >= 0, got {rho_hat}")
    if epsilon < 0.0:
        raise DomainError(f"epsilon must be >= 0, got {epsilon}")
    if len(trace) == 0:
        raise DomainError("channel trace is empty")
    q_hat = estimate_q(trace)
    f5 = bound_f5(len(trace), delta_q)

    # 1 - q_hat + f5 > 0 always (q_hat <= 1, f5 > 0), so this threshold is
    # well defined even when the branch does not fire.
    holds_rhs = math.sqrt(1.0 / (1.0 - q_hat + f5))
    dnh_rhs = math.sqrt(1.0 / (1.0 - q_hat - f5)) if q_hat + f5 < 1.0 else None

    if q_hat - f5 < 1.0 and rho_hat + epsilon < holds_rhs:
        outcome = Outcome.HOLDS
    elif dnh_rhs is not None and rho_hat - epsilon > dnh_rhs:
        outcome = Outcome.DOES_NOT_HOLD
    else:
        outcome = Outcome.UNDETERMINED
    return StabVerdict(
        outcome=outcome,
        q_hat=q_hat,
        f5=f5,
        rho_hat=rho_hat,
        epsilon=epsilon,
        thresholds={"holds_rhs": holds_rhs, "does_not_hold_rhs": dnh_rhs},
    )


def stab_margin_rhs(rho: float) -> float:
    """The reception-rate threshold 1 - 1/rho^2 for stabilizability."""
    if rho <= 0.0:
        raise DomainError(f"rho must be > 0, got {rho}")
    return 1.0 - 1.0 / rho ** 2


def _check_standing_assumption(q: float, rho: float) -> None:
    if q == stab_margin_rhs(rho):
        raise DomainError(
            f"q = {q} sits exactly on the stabilizability boundary 1 - 1/rho^2; "
            "the test is undefined there"
        )


def _epsilon_headroom(q: float, rho: float, f5: float) -> float:
    """max of the two accuracy margins; an argument whose inner expression
    1 - q - 2 f5 is nonpositive is excluded (its square root is undefined
    and the other argument is the active one in that regime)."""
    lo = math.sqrt(1.0 / (1.0 - q + 2.0 * f5)) - rho
    inner = 1.0 - q - 2.0 * f5
    hi = rho - math.sqrt(1.0 / inner) if inner > 0.0 else -math.inf
    return max(lo, hi)


def theorem3_conditions(
    q: float,
    rho: float,
    n_samples: int,
    delta: float,
    delta_q: float,
    epsilon: float,
) -> TheoremConditions:
    """Oracle-mode check of the three conditions under which the test is
    correct with probability at least (1 - delta)(1 - delta_q).

        cond_nq1:  f5 < (1 - q) / 2
        cond_nq2:  f5 < |1 - q - 1/rho^2| / 2
        cond_eps:  epsilon <= half the accuracy headroom

    ``q`` and ``rho`` are the true reception rate and spectral radius; q
    must not sit exactly on the stabilizability boundary.
    """
    if not 0.0 < q < 1.0:
        raise DomainError(f"q must be in (0, 1), got {q}")
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must be in (0, 1), got {delta}")
    if epsilon < 0.0:
        raise DomainError(f"epsilon must be >= 0, got {epsilon}")
    _check_standing_assumption(q, rho)
    f5 = bound_f5(n_samples, delta_q)
    cond_nq1 = f5 < 0.5 * (1.0 - q)
    cond_nq2 = f5 < 0.5 * abs(1.0 - q - 1.0 / rho ** 2)
    cond_eps = epsilon <= 0.5 * _epsilon_headroom(q, rho, f5)
    tspp = (1.0 - delta) * (1.0 - delta_q) if (cond_nq1 and cond_nq2 and cond_eps) else 0.0
    return TheoremConditions(
        cond_nq1=cond_nq1, cond_nq2=cond_nq2, cond_eps=cond_eps, tspp=tspp
    )


def sample_complexity_nq(q: float, rho: float, delta_q: float) -> int:
    """Channel samples needed for the two reception-rate conditions.

    Ceiling of max(2 |1 - q - 1/rho^2|^-2 log(2/delta_q),
                   2 (1 - q)^-2 log(2/delta_q)).
    """
    if not 0.0 < q < 1.0:
        raise DomainError(f"q must be in (0, 1), got {q}")
    if not 0.0 < delta_q < 1.0:
        raise DomainError(f"delta_q must be in (0, 1), got {delta_q}")
    _check_standing_assumption(q, rho)
    margin = abs(1.0 - q - 1.0 / rho ** 2)
    log_term = math.log(2.0 / delta_q)
    return math.ceil(max(2.0 * margin ** -2 * log_term, 2.0 * (1.0 - q) ** -2 * log_term))


def sample_complexity_n_for_test(
    sys: LtiSystem,
    horizon: int,
    q: float,
    n_samples: int,
    delta: float,
    delta_q: float,
    *,
    epsilon: float | None = None,
    norm_a: float | None = None,
    sigma_w: float | None = None,
    lam_min_sigma: float | None = None,
) -> TrajectoryPlan:
    """Trajectories needed so the multi-trajectory estimate feeds a correct
    stabilizability test, given an admissible channel sample count.

    The accuracy target defaults to half the headroom left by f5(n_samples,
    delta_q); pass ``epsilon`` to force a different target. Raises
    PreconditionError when n_samples is below the channel requirement and
    InfeasibleError (stating the epsilon threshold) when the target is
    unreachable for this system dimension.
    """
    rho = spectral_radius(sys.A)
    if not 0.0 < q < 1.0:
        raise DomainError(f"q must be in (0, 1), got {q}")
    _check_standing_assumption(q, rho)
    margin = abs(1.0 - q - 1.0 / rho ** 2)
    log_term = math.log(2.0 / delta_q)
    nq_needed = max(2.0 * margin ** -2 * log_term, 2.0 * (1.0 - q) ** -2 * log_term)
    if n_samples <= nq_needed:
        raise PreconditionError(
            f"n_samples = {n_samples} does not meet the channel requirement "
            f"(> {nq_needed:.3f})"
        )
    if epsilon is None:
        f5 = bound_f5(n_samples, delta_q)
        epsilon = 0.5 * _epsilon_headroom(q, rho, f5)
    n_traj = sample_complexity_rho(
        sys,
        horizon,
        epsilon,
        delta,
        norm_a=norm_a,
        sigma_w=sigma_w,
        lam_min_sigma=lam_min_sigma,
    )
    return TrajectoryPlan(n_traj=n_traj, epsilon=epsilon)
