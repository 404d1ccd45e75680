"""Trace powers, centered-scaled statistics, and the closed-form trace sum.

``trace_power`` evaluates Tr(M^p) numerically (eigenvalues by default,
repeated multiplication as a cross-check).  ``trace_power_formula``
evaluates the same trace through the combinatorial sum over symbol index
tuples, which serves as an independent correctness oracle: for a banded
anti-diagonal matrix built from symbols x_j,

    Tr(H^p) = sum over i in [1, n] and j_1..j_p in [-b, b] of
              prod_l x_{j_l} * prod_l chi_[1,n](i - s_l) * delta,

where s_l = sum_{q <= l} (-1)^q j_q and delta pins s_p to 0 for even p
and to 2i - 1 - n for odd p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .ensemble import BandConfig, SymbolPaths, SymmetricBandMatrix
from .errors import BudgetError, NumericalError, ValidationError

DEFAULT_TERM_BUDGET = 10 ** 8

# Largest vectorized block of index tuples evaluated at once.
_CHUNK = 1 << 20

TRACE_METHODS = ("eigen", "matmul")
CENTERINGS = ("sample_mean", "wick_exact")


@dataclass(frozen=True)
class TracePowerResult:
    p: int
    value: float
    method: str


@dataclass(frozen=True)
class WStatistic:
    """One centered, sqrt(b_n)/n scaled trace-power fluctuation."""

    p: int
    t: float
    value: float
    centering: str


def trace_power(M: SymmetricBandMatrix, p: int, method: str = "eigen") -> TracePowerResult:
    """Tr(M^p) from eigenvalues or from p-fold matrix products."""
    if not isinstance(p, int) or p < 1:
        raise ValidationError(f"trace power must be a positive integer, got {p!r}")
    if method not in TRACE_METHODS:
        raise ValidationError(f"method must be one of {TRACE_METHODS}, got {method!r}")
    # LAPACK may return finite garbage on non-finite input, so check first.
    if not np.all(np.isfinite(M.values)):
        raise NumericalError(
            f"matrix of order {M.order}, bandwidth {M.b_n} has non-finite entries"
        )
    if method == "eigen":
        try:
            eigs = np.linalg.eigvalsh(M.values)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(
                f"eigendecomposition failed for matrix of order {M.order}, bandwidth {M.b_n}: {exc}"
            ) from exc
        value = float(np.sum(eigs ** p))
    else:
        acc = M.values
        for _ in range(p - 1):
            acc = acc @ M.values
        value = float(np.trace(acc))
    if not math.isfinite(value):
        raise NumericalError(f"trace power p={p} is not finite (order {M.order})")
    return TracePowerResult(p, value, method)


def trace_powers_from_eigs(eigs: np.ndarray, p_list) -> dict[int, float]:
    """Tr(M^p) for several powers from one set of eigenvalues."""
    return {int(p): float(np.sum(eigs ** int(p))) for p in p_list}


def _tail_tables(x: np.ndarray, b: int, signs: list[int]):
    """Vectorized tables over the trailing index slots of the formula sum.

    Returns per-tuple products of symbol values, the running-sum extrema
    over the tail prefixes, and the total tail sum (lexicographic order).
    """
    j_range = np.arange(-b, b + 1)
    k = len(signs)
    grids = np.meshgrid(*([j_range] * k), indexing="ij")
    flat = [g.reshape(-1) for g in grids]
    prod = np.ones(flat[0].shape[0])
    running = np.zeros(flat[0].shape[0], dtype=np.int64)
    pref_min = np.full(flat[0].shape[0], np.iinfo(np.int64).max, dtype=np.int64)
    pref_max = np.full(flat[0].shape[0], np.iinfo(np.int64).min, dtype=np.int64)
    for sign, j in zip(signs, flat):
        prod = prod * x[j + b]
        running = running + sign * j
        np.minimum(pref_min, running, out=pref_min)
        np.maximum(pref_max, running, out=pref_max)
    return prod, pref_min, pref_max, running


def trace_power_formula(
    paths: SymbolPaths,
    t: float,
    config: BandConfig,
    p: int,
    term_budget: float = DEFAULT_TERM_BUDGET,
) -> float:
    """Tr(H^p) via the combinatorial sum over symbol index tuples.

    The sum over the row index collapses to a per-tuple multiplicity
    (the number of rows satisfying all range indicators), so the cost is
    (2 b_n + 1)^p tuple evaluations.  Tuples are processed in a fixed
    lexicographic order in vectorized blocks with compensated
    accumulation across blocks, so the result is bit-for-bit reproducible.
    """
    if not isinstance(p, int) or p < 1:
        raise ValidationError(f"trace power must be a positive integer, got {p!r}")
    n, b = config.n, config.b_n
    total_tuples = (2 * b + 1) ** p
    if total_tuples > term_budget:
        raise BudgetError(
            f"trace formula would evaluate {total_tuples} index tuples, "
            f"exceeding the term budget {term_budget:g}"
        )
    ti = paths.time_index(t)
    x = paths.symbol_values(ti)
    signs = [(-1) ** l for l in range(1, p + 1)]

    # Split slots into a scalar head loop and a vectorized tail block.
    k = p
    while k > 1 and (2 * b + 1) ** k > _CHUNK:
        k -= 1
    h = p - k
    tail_prod, tail_min, tail_max, tail_sum = _tail_tables(x, b, signs[h:])

    even = (p % 2 == 0)
    head_range = range(-b, b + 1)
    total = 0.0
    comp = 0.0
    for head in product(head_range, repeat=h):
        head_prod = 1.0
        run = 0
        head_min = 0
        head_max = 0
        first = True
        for sign, j in zip(signs[:h], head):
            head_prod *= x[j + b]
            run += sign * j
            if first:
                head_min = run
                head_max = run
                first = False
            else:
                head_min = min(head_min, run)
                head_max = max(head_max, run)
        if h == 0:
            s_min = tail_min
            s_max = tail_max
        else:
            s_min = np.minimum(head_min, run + tail_min)
            s_max = np.maximum(head_max, run + tail_max)
        s_last = run + tail_sum
        low = np.maximum(0, s_max)
        high = np.minimum(0, s_min)
        if even:
            counts = np.where(s_last == 0, np.maximum(n + high - low, 0), 0)
            block = head_prod * tail_prod * counts
        else:
            num = n + 1 + s_last
            i_row = num >> 1
            valid = (num % 2 == 0) & (i_row >= 1 + low) & (i_row <= n + high)
            block = head_prod * tail_prod * valid
        chunk = float(np.sum(block))
        # Kahan step: blocks are accumulated in fixed head order.
        y = chunk - comp
        tmp = total + y
        comp = (tmp - total) - y
        total = tmp
    return total


def w_stat(
    trace_values,
    p: int,
    config: BandConfig,
    centering: str = "sample_mean",
    centering_value: float | None = None,
) -> np.ndarray:
    """Centered, sqrt(b_n)/n scaled fluctuations of a trace-power batch.

    ``sample_mean`` centers at the compensated batch mean; ``wick_exact``
    centers at a supplied exact expectation (zero for odd powers under a
    centered Gaussian model).
    """
    traces = np.asarray(trace_values, dtype=np.float64)
    if traces.ndim != 1 or traces.size == 0:
        raise ValidationError("trace batch must be a nonempty one-dimensional sequence")
    if centering not in CENTERINGS:
        raise ValidationError(f"centering must be one of {CENTERINGS}, got {centering!r}")
    if centering == "sample_mean":
        c = math.fsum(traces) / traces.size
    else:
        if centering_value is None:
            raise ValidationError("wick_exact centering requires a centering_value")
        c = float(centering_value)
    scale = math.sqrt(config.b_n) / config.n
    return scale * (traces - c)
