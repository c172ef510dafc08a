"""Finite-sample estimation of the packet reception rate."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .simkit import ChannelTrace

__all__ = ["ChannelEstimate", "estimate_q", "bound_f5", "estimate_channel"]


@dataclass(frozen=True)
class ChannelEstimate:
    """Sample reception rate with its two-sided concentration radius f5."""

    q_hat: float
    f5: float
    n_samples: int
    delta_q: float


def estimate_q(trace: ChannelTrace) -> float:
    """Exact sample mean of the reception bits.

    Computed as an integer count over the integer length, so the value does
    not depend on any floating-point summation order.
    """
    n = len(trace)
    if n == 0:
        raise DomainError("cannot estimate q from an empty trace")
    return int(trace.gammas.sum()) / n


def bound_f5(n_samples: int, delta_q: float) -> float:
    """Concentration radius sqrt(log(2/delta_q) / (2 n_samples)).

    |q - q_hat| <= f5 holds with probability at least 1 - delta_q.
    """
    if n_samples < 1:
        raise DomainError(f"n_samples must be >= 1, got {n_samples}")
    if not 0.0 < delta_q < 1.0:
        raise DomainError(f"delta_q must be in (0, 1), got {delta_q}")
    return math.sqrt(math.log(2.0 / delta_q) / (2.0 * n_samples))


def estimate_channel(trace: ChannelTrace, delta_q: float) -> ChannelEstimate:
    """Bundle the sample rate and its radius for a given confidence level."""
    n = len(trace)
    return ChannelEstimate(
        q_hat=estimate_q(trace), f5=bound_f5(n, delta_q), n_samples=n, delta_q=delta_q
    )
