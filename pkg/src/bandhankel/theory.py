"""Closed-form limiting quantities for the trace-power fluctuation process.

The centered, scaled trace powers of the band matrix converge (even
powers, Brownian entries) to a Gaussian process W_p whose covariance is
a finite combinatorial sum: powers of the two times weighted by split
pair-partition class counts and factorials.  This module evaluates that
sum exactly, together with the limiting spectral moments, the
a_0-augmented variant, and Cholesky sampling of W_p on a time grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .combinat import class_counts
from .errors import NumericalError, ValidationError

R_CONVENTIONS = ("r", "literal_q")

# Relative ridge added before Cholesky so rank-deficient limit
# covariance matrices still factor.
_RIDGE_SCALE = 1e-12

_PSD_TOL = 1e-10


@dataclass(frozen=True)
class CovarianceQuery:
    """Evaluation point for the limiting covariance: even powers, ordered times."""

    p: int
    q: int
    t1: float
    t2: float

    def __post_init__(self):
        for name, value in (("p", self.p), ("q", self.q)):
            if not isinstance(value, int) or value < 2 or value % 2 != 0:
                raise ValidationError(
                    f"{name} must be a positive even integer, got {value!r}"
                )
        if not 0 <= self.t1 <= self.t2:
            raise ValidationError(
                f"times must satisfy 0 <= t1 <= t2, got ({self.t1}, {self.t2}); "
                "swap times and transpose (p, q) for the reversed order"
            )


@dataclass(frozen=True)
class LimitProcessSample:
    """One sampled path of the limiting Gaussian process on a time grid."""

    p: int
    grid: tuple[float, ...]
    values: np.ndarray
    cholesky_condition: float
    ridge: float


def limit_cov_terms(query: CovarianceQuery, convention: str = "r") -> dict[int, float]:
    """Per-r breakdown of the limiting covariance sum.

    Terms are indexed by the even cross order r = 2, 4, ..., q; their sum
    is ``limit_cov``.
    """
    if convention not in R_CONVENTIONS:
        raise ValidationError(f"convention must be one of {R_CONVENTIONS}, got {convention!r}")
    p, q, t1, t2 = query.p, query.q, query.t1, query.t2
    prefactor = 2.0 ** ((p + q) // 2)
    terms: dict[int, float] = {}
    for r in range(2, q + 1, 2):
        if convention == "r":
            weight = class_counts(p, r).r_value
        else:
            weight = (
                class_counts(p, q).delta2
                + class_counts(p, r).delta2_tilde
                + 2 * class_counts(p, r).delta24
            )
        terms[r] = (
            prefactor
            * math.comb(q, r)
            * t1 ** ((p + r) // 2)
            * (t2 - t1) ** ((q - r) // 2)
            * weight
            * math.factorial((q - r) // 2)
        )
    return terms


def limit_cov(query: CovarianceQuery, convention: str = "r") -> float:
    """Limiting covariance of the scaled trace-power fluctuations.

    Exact finite sum over even cross orders r: binomial in q, powers of
    t1 and t2 - t1, split class-count weight, and a factorial from the
    Gaussian increment moments; (t2 - t1)^0 is 1 at t1 = t2.
    """
    return math.fsum(limit_cov_terms(query, convention).values())


def band_integral_b0(p: int, r: int) -> float:
    """Boundary band-integral constant 2^((p+r)/2 - 1) for even p + r."""
    for name, value in (("p", p), ("r", r)):
        if not isinstance(value, int) or value < 0:
            raise ValidationError(f"{name} must be a nonnegative integer, got {value!r}")
    if (p + r) % 2 != 0:
        raise ValidationError(f"p + r must be even, got p={p}, r={r}")
    return 2.0 ** ((p + r) // 2 - 1)


def lsd_moment(k: int) -> float:
    """k-th moment of the limiting spectral law: (k/2)! for even k, else 0."""
    if not isinstance(k, int) or k < 0:
        raise ValidationError(f"moment order must be a nonnegative integer, got {k!r}")
    if k % 2 != 0:
        return 0.0
    return float(math.factorial(k // 2))


def scaled_moment_R(k: int) -> float:
    """Limit of (1/n) E Tr(A(1))^k: 2^(k/2) (k/2)! for even k, else 0.

    Rescales ``lsd_moment`` from the sqrt(2 b_n) to the sqrt(b_n)
    normalization.
    """
    if not isinstance(k, int) or k < 0:
        raise ValidationError(f"moment order must be a nonnegative integer, got {k!r}")
    if k % 2 != 0:
        return 0.0
    return float(2 ** (k // 2) * math.factorial(k // 2))


def tilde_cov(query: CovarianceQuery, convention: str = "r") -> float:
    """Covariance of the a_0-augmented process W_p + p t^((p-1)/2) R_{p-1} a_0.

    The cross term uses independence of a_0 from W_p and the Brownian
    covariance Cov(a_0(t1), a_0(t2)) = t1.  For even p and q the odd
    limiting moments R_{p-1}, R_{q-1} vanish, so it equals ``limit_cov``.
    """
    p, q, t1, t2 = query.p, query.q, query.t1, query.t2
    base = limit_cov(query, convention)
    correction = (
        p
        * q
        * t1 ** ((p - 1) / 2)
        * t2 ** ((q - 1) / 2)
        * scaled_moment_R(p - 1)
        * scaled_moment_R(q - 1)
        * t1
    )
    return base + correction


def _validate_grid(grid) -> tuple[float, ...]:
    times = tuple(float(t) for t in grid)
    if not times:
        raise ValidationError("time grid must be nonempty")
    if times[0] <= 0:
        raise ValidationError(f"grid times must be positive, got {times[0]}")
    if any(a >= z for a, z in zip(times, times[1:])):
        raise ValidationError(f"grid times must be strictly increasing, got {times}")
    return times


def limit_cov_matrix(p: int, grid, convention: str = "r") -> np.ndarray:
    """Covariance matrix of (W_p(t) for t in grid) under the limit law."""
    times = _validate_grid(grid)
    size = len(times)
    matrix = np.empty((size, size))
    for i in range(size):
        for j in range(i, size):
            lo, hi = min(times[i], times[j]), max(times[i], times[j])
            value = limit_cov(CovarianceQuery(p, p, lo, hi), convention)
            matrix[i, j] = value
            matrix[j, i] = value
    return matrix


def _factor_covariance(matrix: np.ndarray) -> tuple[np.ndarray, float, float]:
    """Lower Cholesky factor of a (possibly semidefinite) covariance matrix.

    Checks the spectrum against the PSD tolerance, adds a trace-scaled
    ridge so exactly singular matrices still factor, and reports the
    diagonal condition ratio of the factor.
    """
    eigs = np.linalg.eigvalsh(matrix)
    largest = float(eigs[-1])
    tol = _PSD_TOL * max(largest, 0.0)
    if eigs[0] < -tol:
        raise NumericalError(
            f"covariance matrix is not positive semidefinite: "
            f"smallest eigenvalue {eigs[0]:.6e} below tolerance {-tol:.6e}"
        )
    ridge = _RIDGE_SCALE * float(np.trace(matrix))
    try:
        factor = np.linalg.cholesky(matrix + ridge * np.eye(matrix.shape[0]))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"Cholesky factorization failed despite ridge {ridge:g}: {exc}") from exc
    diag = np.diag(factor)
    condition = float(np.max(diag) / np.min(diag))
    return factor, condition, ridge


def sample_limit_process(
    p: int, grid, seed: int, convention: str = "r"
) -> LimitProcessSample:
    """Draw one path of the limiting process on the grid, deterministically.

    The covariance matrix can be rank-deficient; factorization goes
    through a small trace-scaled ridge documented in the sample.
    """
    times = _validate_grid(grid)
    matrix = limit_cov_matrix(p, times, convention)
    factor, condition, ridge = _factor_covariance(matrix)
    rng = np.random.Generator(np.random.PCG64(seed))
    values = factor @ rng.standard_normal(len(times))
    values.setflags(write=False)
    return LimitProcessSample(p, times, values, condition, ridge)
