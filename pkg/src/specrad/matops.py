"""Dense linear-algebra kernels for small general real matrices.

Everything here operates on plain 2-D float64 ndarrays and is sized for the
package's regime (n <= 10): full eigenvalue sweeps, spectral radius and
norm, symmetric extremes, the spectral-variation perturbation ceiling, and
the finite-horizon excitation Gramian. All functions are pure and safe to
call concurrently.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConvergenceError, DimensionError, DomainError

__all__ = [
    "as_matrix",
    "as_square",
    "eigenvalues",
    "spectral_radius",
    "spectral_norm",
    "sym_eig_extremes",
    "real_power",
    "spectral_variation_bound",
    "gramian_sigma",
]

# Relative asymmetry tolerance for inputs that must be symmetric.
SYMMETRY_TOL = 1e-12


def as_matrix(m, *, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-D float64 array, rejecting non-finite entries."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {a.shape}")
    if a.size == 0:
        raise DimensionError(f"{name} must be nonempty")
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{name} contains NaN or infinite entries")
    return a


def as_square(m, *, name: str = "matrix") -> np.ndarray:
    a = as_matrix(m, name=name)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    return a


def eigenvalues(m) -> np.ndarray:
    """All n eigenvalues of a square real matrix, with multiplicity.

    Delegates to LAPACK's balanced Hessenberg + shifted-QR driver, which is
    the standard robust choice at this matrix size. Returns a complex
    vector in no particular order; conjugate pairs of a real matrix appear
    together up to roundoff.
    """
    a = as_square(m)
    try:
        return np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:  # QR sweep budget exhausted
        raise ConvergenceError(f"eigenvalue iteration did not converge: {exc}") from exc


def spectral_radius(m) -> float:
    """max |lambda| over the spectrum of a square matrix."""
    return float(np.max(np.abs(eigenvalues(m))))


def spectral_norm(m) -> float:
    """Largest singular value, via the symmetric eigenproblem of M^T M.

    Only the top singular value is ever needed here, so the full SVD is
    skipped in favour of sqrt(lambda_max(M^T M)).
    """
    a = as_matrix(m)
    top = float(np.linalg.eigvalsh(a.T @ a)[-1])
    return math.sqrt(max(top, 0.0))


def sym_eig_extremes(s) -> tuple[float, float]:
    """(lambda_min, lambda_max) of a symmetric matrix.

    The input is symmetrized by averaging with its transpose before the
    decomposition; asymmetry beyond SYMMETRY_TOL (relative to the largest
    entry magnitude) is rejected.
    """
    a = as_square(s, name="symmetric matrix")
    scale = max(1.0, float(np.max(np.abs(a))))
    if float(np.max(np.abs(a - a.T))) > SYMMETRY_TOL * scale:
        raise DomainError("matrix is not symmetric within tolerance")
    w = np.linalg.eigvalsh(0.5 * (a + a.T))
    return float(w[0]), float(w[-1])


def real_power(base: float, exponent: float) -> float:
    """base**exponent via exp/log, with 0**0 = 1 and 0**e = 0 for e > 0.

    The conventions make the degenerate cases of the perturbation ceiling
    exact: a zero perturbation yields a zero ceiling, and the n = 1
    exponent pair (0, 1) collapses to the plain difference.
    """
    if base < 0.0:
        raise DomainError(f"base must be nonnegative, got {base}")
    if exponent == 0.0:
        return 1.0
    if exponent == 1.0:  # keep the scalar case exact
        return base
    if base == 0.0:
        return 0.0
    return math.exp(exponent * math.log(base))


def spectral_variation_bound(p, q) -> tuple[float, float]:
    """One-sided eigenvalue matching distance and its perturbation ceiling.

    For equal-size square matrices with spectra {alpha_i} and {beta_j},
    returns

        lhs = max_j min_i |alpha_i - beta_j|
        rhs = (||P|| + ||Q||)**(1 - 1/n) * ||P - Q||**(1/n)

    lhs <= rhs always holds; equality is attained when P = Q and when
    P = -Q = I with n = 1. The matching is the literal one-sided max-min
    scan, not an optimal bipartite assignment.
    """
    a = as_square(p, name="p")
    b = as_square(q, name="q")
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")
    n = a.shape[0]
    alphas = eigenvalues(a)
    betas = eigenvalues(b)
    dist = np.abs(alphas[:, None] - betas[None, :])  # dist[i, j] = |alpha_i - beta_j|
    lhs = float(dist.min(axis=0).max())
    base = spectral_norm(a) + spectral_norm(b)
    diff = spectral_norm(a - b)
    rhs = real_power(base, 1.0 - 1.0 / n) * real_power(diff, 1.0 / n)
    return lhs, rhs


def gramian_sigma(sys, horizon: int) -> np.ndarray:
    """Finite-horizon excitation Gramian of a noisy linear system.

    Direct summation of

        sum_{t=0}^{T} sigma_u^2 A^t B B^T (A^T)^t + sigma_w^2 A^t (A^T)^t

    for ``sys`` with state matrix A, input matrix B and noise/input scales
    sigma_w, sigma_u. The result is symmetric positive semi-definite; its
    smallest eigenvalue controls the trajectory-count error radius.
    """
    if horizon < 0:
        raise DomainError(f"horizon must be >= 0, got {horizon}")
    a = as_square(sys.A, name="A")
    b = as_matrix(sys.B, name="B")
    su2 = sys.sigma_u ** 2
    sw2 = sys.sigma_w ** 2
    acc = np.zeros_like(a)
    a_pow = np.eye(a.shape[0])
    for _ in range(horizon + 1):
        ab = a_pow @ b
        acc += su2 * (ab @ ab.T) + sw2 * (a_pow @ a_pow.T)
        a_pow = a @ a_pow
    return 0.5 * (acc + acc.T)
