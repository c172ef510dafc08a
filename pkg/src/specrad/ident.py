"""Least-squares identification and the spectral-radius error certificates.

Two estimation routes share the same least-squares core:

* ``pooled``: every sample from every trajectory enters the regression and
  the certificate (bound_f1 -> f2) is computed from the realized design.
* ``multi_trajectory``: one sample per trajectory (the final transition)
  and the certificate (bound_f3 -> f4) is a priori, computed from the true
  system parameters and the trajectory count in oracle mode.

All bound formulas take the noise scale sigma_w as a known configuration
input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import DomainError, InfeasibleError, PreconditionError, SingularDesignError
from .matops import gramian_sigma, real_power, spectral_norm, spectral_radius, sym_eig_extremes
from .simkit import DataTuple, LtiSystem

__all__ = [
    "LsEstimate",
    "RhoEstimateReport",
    "least_squares",
    "bound_C",
    "bound_f1",
    "bound_f1_from_gram",
    "rho_bound_data_dependent",
    "bound_f3",
    "rho_bound_data_independent",
    "estimate_rho",
    "sample_complexity_rho",
]

# Condition-number guard for the normal-equation solve.
COND_LIMIT = 1e12

# Gram eigenvalues below this fraction of the largest are treated as zero,
# which maps the certificate to +inf.
RANK_TOL = 1e-12

METHOD_POOLED = "pooled"
METHOD_MULTI_TRAJECTORY = "multi_trajectory"


@dataclass(frozen=True)
class LsEstimate:
    """Least-squares output (A_hat, B_hat) plus the design Gram matrix.

    ``gram`` is the (n+p) x (n+p) sum of outer products of the stacked
    regressors [x; u], exactly as accumulated by the solver.
    """

    A_hat: np.ndarray
    B_hat: np.ndarray
    gram: np.ndarray
    sample_count: int

    @property
    def n(self) -> int:
        return self.A_hat.shape[0]

    @property
    def p(self) -> int:
        return self.B_hat.shape[1]


@dataclass(frozen=True)
class RhoEstimateReport:
    """Spectral-radius point estimate with its certificate.

    ``bound`` is the high-probability radius on |rho(A) - rho_hat| at
    failure probability ``delta`` (+inf when no finite certificate exists).
    ``aux`` records the intermediate quantities used to build the bound.
    """

    rho_hat: float
    bound: float
    delta: float
    method: str
    aux: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise DomainError(f"delta must be in (0, 1), got {self.delta}")
        if self.bound < 0.0:
            raise DomainError(f"bound must be >= 0, got {self.bound}")
        if self.method not in (METHOD_POOLED, METHOD_MULTI_TRAJECTORY):
            raise DomainError(f"unknown method tag {self.method!r}")


def least_squares(tuples: list[DataTuple]) -> LsEstimate:
    """Minimize sum ||x_plus - A x - B u||^2 over (A, B).

    Solved through the normal equations with the stacked regressor
    z = [x; u] and a symmetric positive-definite factorization of the Gram
    matrix. Designs with an estimated condition number beyond COND_LIMIT
    raise SingularDesignError carrying the Gram matrix.
    """
    if not tuples:
        raise DomainError("least_squares requires at least one sample")
    n = tuples[0].x.shape[0]
    p = tuples[0].u.shape[0]
    for t in tuples:
        if t.x.shape != (n,) or t.x_plus.shape != (n,) or t.u.shape != (p,):
            raise DomainError("inconsistent sample dimensions")
    xs = np.stack([t.x for t in tuples])
    us = np.stack([t.u for t in tuples])
    ys = np.stack([t.x_plus for t in tuples])
    z = np.concatenate([xs, us], axis=1)  # (M, n+p)
    gram = z.T @ z
    w = np.linalg.eigvalsh(gram)
    if w[0] <= 0.0 or w[-1] > COND_LIMIT * w[0]:
        raise SingularDesignError(
            "regressor Gram matrix is numerically singular "
            f"(eigenvalue range [{w[0]:.3e}, {w[-1]:.3e}])",
            gram=gram,
        )
    theta = cho_solve(cho_factor(gram, lower=True), z.T @ ys).T  # (n, n+p)
    return LsEstimate(
        A_hat=theta[:, :n], B_hat=theta[:, n:], gram=gram, sample_count=len(tuples)
    )


def bound_C(n_dim: int, p_dim: int, delta: float, sigma_w: float) -> float:
    """Confidence scale sigma_w^2 (sqrt(n+p) + sqrt(n) + sqrt(2 log(1/delta)))^2."""
    if n_dim < 1:
        raise DomainError(f"n_dim must be >= 1, got {n_dim}")
    if p_dim < 0:
        raise DomainError(f"p_dim must be >= 0, got {p_dim}")
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must be in (0, 1), got {delta}")
    if sigma_w < 0.0:
        raise DomainError(f"sigma_w must be >= 0, got {sigma_w}")
    root = math.sqrt(n_dim + p_dim) + math.sqrt(n_dim) + math.sqrt(2.0 * math.log(1.0 / delta))
    return sigma_w ** 2 * root ** 2


def _design_inv_block_top(gram: np.ndarray, n_dim: int) -> float:
    """lambda_max of the top-left n x n block of gram^{-1}, or +inf.

    +inf is returned when some Gram eigenvalue falls below RANK_TOL times
    the largest one (a numerically zero eigenvalue).
    """
    w, v = np.linalg.eigh(gram)
    if w[-1] <= 0.0 or w[0] < RANK_TOL * w[-1]:
        return math.inf
    inv = (v / w) @ v.T
    block = inv[:n_dim, :n_dim]
    return float(np.linalg.eigvalsh(0.5 * (block + block.T))[-1])


def bound_f1_from_gram(
    gram: np.ndarray, n_dim: int, p_dim: int, delta: float, sigma_w: float
) -> float:
    """High-probability radius for ||A_hat - A|| from a realized design.

    Computed as sqrt(C(n, p, delta) * lambda_max of the state block of the
    inverted Gram matrix); the square root on the eigenvalue factor is the
    form consistent with the underlying matrix inequality. Rank-deficient
    designs yield +inf.
    """
    c = bound_C(n_dim, p_dim, delta, sigma_w)
    lam = _design_inv_block_top(np.asarray(gram, dtype=float), n_dim)
    if math.isinf(lam):
        return math.inf
    return math.sqrt(c * lam)


def bound_f1(est: LsEstimate, delta: float, sigma_w: float) -> float:
    """bound_f1_from_gram evaluated on an estimate's own design."""
    return bound_f1_from_gram(est.gram, est.n, est.p, delta, sigma_w)


def _spectral_gap_bound(norm_scale: float, radius: float, n_dim: int) -> float:
    """(2 ||A|| + r)^(1 - 1/n) * r^(1/n), the certificate on |rho - rho_hat|."""
    if math.isinf(radius):
        return math.inf
    return real_power(2.0 * norm_scale + radius, 1.0 - 1.0 / n_dim) * real_power(
        radius, 1.0 / n_dim
    )


def rho_bound_data_dependent(
    est: LsEstimate, delta: float, sigma_w: float
) -> RhoEstimateReport:
    """Point estimate rho(A_hat) with the data-dependent certificate f2.

    Requires sample_count >= n + p. A rank-deficient design degrades the
    bound to +inf but still produces a report.
    """
    if est.sample_count < est.n + est.p:
        raise PreconditionError(
            f"need at least n + p = {est.n + est.p} samples, got {est.sample_count}"
        )
    c = bound_C(est.n, est.p, delta, sigma_w)
    lam = _design_inv_block_top(est.gram, est.n)
    f1 = math.inf if math.isinf(lam) else math.sqrt(c * lam)
    norm_hat = spectral_norm(est.A_hat)
    f2 = _spectral_gap_bound(norm_hat, f1, est.n)
    return RhoEstimateReport(
        rho_hat=spectral_radius(est.A_hat),
        bound=f2,
        delta=delta,
        method=METHOD_POOLED,
        aux={"f1": f1, "C": c, "lam_max_design_inv": lam, "norm_a_hat": norm_hat},
    )


def bound_f3(
    sys: LtiSystem,
    horizon: int,
    n_traj: int,
    delta: float,
    *,
    sigma_w: float | None = None,
    lam_min_sigma: float | None = None,
) -> float:
    """A-priori radius for ||A_hat - A|| with one sample per trajectory.

    16 sigma_w lambda_min(Sigma)^(-1/2) sqrt((n + 2p) log(36/delta) / N),
    where Sigma is the horizon-T excitation Gramian. Oracle mode: consumes
    true system parameters; ``sigma_w`` and ``lam_min_sigma`` accept
    known-bound overrides.
    """
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must be in (0, 1), got {delta}")
    n, p = sys.n, sys.p
    min_n = 8 * (n + p) + 16 * math.log(4.0 / delta)
    if n_traj < min_n:
        raise PreconditionError(
            f"n_traj = {n_traj} is below the admissible minimum "
            f"{math.ceil(min_n)} (= 8(n+p) + 16 log(4/delta))"
        )
    if lam_min_sigma is None:
        lam_min_sigma = sym_eig_extremes(gramian_sigma(sys, horizon))[0]
    if lam_min_sigma <= 0.0:
        raise DomainError(
            f"degenerate excitation: lambda_min(Sigma) = {lam_min_sigma} is not positive"
        )
    sw = sys.sigma_w if sigma_w is None else sigma_w
    if sw < 0.0:
        raise DomainError(f"sigma_w must be >= 0, got {sw}")
    return 16.0 * sw * lam_min_sigma ** -0.5 * math.sqrt(
        (n + 2 * p) * math.log(36.0 / delta) / n_traj
    )


def rho_bound_data_independent(
    sys: LtiSystem,
    horizon: int,
    n_traj: int,
    delta: float,
    *,
    norm_a: float | None = None,
    sigma_w: float | None = None,
    lam_min_sigma: float | None = None,
) -> float:
    """The a-priori certificate f4 = (2 ||A|| + f3)^(1 - 1/n) * f3^(1/n).

    Only an upper bound on ||A|| and a lower bound on lambda_min(Sigma) are
    actually needed, so both accept overrides. For n = 1 the certificate
    collapses to f3 itself.
    """
    f3 = bound_f3(
        sys, horizon, n_traj, delta, sigma_w=sigma_w, lam_min_sigma=lam_min_sigma
    )
    na = spectral_norm(sys.A) if norm_a is None else norm_a
    return _spectral_gap_bound(na, f3, sys.n)


def estimate_rho(
    tuples: list[DataTuple],
    delta: float,
    method: str,
    *,
    sigma_w: float | None = None,
    bound: float | None = None,
    aux: dict[str, float] | None = None,
) -> RhoEstimateReport:
    """Run least squares and report rho(A_hat) with the method's certificate.

    ``pooled`` computes the data-dependent bound internally and needs
    ``sigma_w``. ``multi_trajectory`` carries whatever a-priori ``bound``
    (and ``aux``) the caller attaches, defaulting to +inf when none is
    given.
    """
    if method == METHOD_POOLED:
        if sigma_w is None:
            raise DomainError("pooled estimation requires sigma_w")
        return rho_bound_data_dependent(least_squares(tuples), delta, sigma_w)
    if method == METHOD_MULTI_TRAJECTORY:
        est = least_squares(tuples)
        return RhoEstimateReport(
            rho_hat=spectral_radius(est.A_hat),
            bound=math.inf if bound is None else bound,
            delta=delta,
            method=method,
            aux=dict(aux) if aux else {},
        )
    raise DomainError(f"unknown method tag {method!r}")


def sample_complexity_rho(
    sys: LtiSystem,
    horizon: int,
    epsilon: float,
    delta: float,
    *,
    norm_a: float | None = None,
    sigma_w: float | None = None,
    lam_min_sigma: float | None = None,
) -> int:
    """Trajectories needed so the a-priori certificate meets accuracy epsilon.

    Ceiling of max(N_1, 8(n+p) + 16 log(4/delta)) with

        N_1 = 256 sigma_w^2 (n + 2p) / (b^2 lambda_min(Sigma)) * log(36/delta),
        b   = epsilon - 2 (1 - 1/n) ||A||.

    Infeasible (b <= 0) targets raise InfeasibleError naming the minimal
    admissible epsilon.
    """
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must be in (0, 1), got {delta}")
    n, p = sys.n, sys.p
    na = spectral_norm(sys.A) if norm_a is None else norm_a
    min_eps = 2.0 * (1.0 - 1.0 / n) * na
    b = epsilon - min_eps
    if b <= 0.0:
        raise InfeasibleError(
            f"accuracy target epsilon = {epsilon} is infeasible: it must exceed "
            f"2(1 - 1/n)||A|| = {min_eps}",
            min_epsilon=min_eps,
        )
    if lam_min_sigma is None:
        lam_min_sigma = sym_eig_extremes(gramian_sigma(sys, horizon))[0]
    if lam_min_sigma <= 0.0:
        raise DomainError(
            f"degenerate excitation: lambda_min(Sigma) = {lam_min_sigma} is not positive"
        )
    sw = sys.sigma_w if sigma_w is None else sigma_w
    n1 = 256.0 * sw ** 2 * (n + 2 * p) / (b * b * lam_min_sigma) * math.log(36.0 / delta)
    n2 = 8 * (n + p) + 16 * math.log(4.0 / delta)
    return math.ceil(max(n1, n2))
