"""Exact finite-size Gaussian moments of trace powers via Wick factorization.

Under a Gaussian entry model the symbols a_k are independent, so any
expectation of a product of trace-formula terms factors over distinct
symbols.  Grouping index tuples by the multiset of symbols they touch
reduces E Tr(H^p) and Cov(Tr H^p(t1), Tr H^q(t2)) to small sums of
closed-form Gaussian moments, giving machine-precision ground truth
against which both the limit formulas and Monte Carlo runs are judged.

Time layers: with u = a(t1) and v = a(t2) - a(t1) independent, every
mixed moment E[a(t1)^m a(t2)^r] expands binomially into one-variable
even moments of u (variance t1) and v (variance t2 - t1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

from .combinat import double_factorial
from .ensemble import BandConfig, EntryModel
from .errors import BudgetError, ValidationError

DEFAULT_TERM_BUDGET = 10 ** 8

_LAYERS = ("u", "v")


@dataclass(frozen=True)
class TermProfile:
    """Multiset of (symbol key, time layer, multiplicity) with a scalar weight.

    The symbol key is |j| under the symmetric negative-index convention
    and the signed index otherwise; layer "u" means the symbol evaluated
    at t1 and layer "v" its increment to t2.
    """

    entries: tuple[tuple[int, str, int], ...]
    coefficient: float = 1.0

    def __post_init__(self):
        seen = set()
        for key, layer, mult in self.entries:
            if layer not in _LAYERS:
                raise ValidationError(f"layer must be one of {_LAYERS}, got {layer!r}")
            if not isinstance(mult, int) or mult < 1:
                raise ValidationError(f"multiplicity must be a positive integer, got {mult!r}")
            if (key, layer) in seen:
                raise ValidationError(f"duplicate profile entry for symbol {key}, layer {layer}")
            seen.add((key, layer))
        object.__setattr__(self, "entries", tuple(sorted(self.entries)))

    @property
    def degree(self) -> int:
        return sum(mult for _, _, mult in self.entries)


@dataclass(frozen=True)
class ExactValue:
    """One exact oracle number with enough config echo to reproduce it."""

    value: float
    term_count: int
    n: int
    b_n: int
    convention: str
    include_a0: bool
    budget: float


@dataclass(frozen=True)
class LimitProbeResult:
    """Exact values along an n-sequence with gap and extrapolation diagnostics."""

    values: tuple[ExactValue, ...]
    abs_gaps: tuple[float, ...]
    rel_gaps: tuple[float, ...]
    cauchy_gap: float
    richardson: float | None


def _gaussian_moment(m: int, var: float) -> float:
    """E Z^m for Z ~ N(0, var); zero for odd m, 1 for m = 0."""
    if m % 2 != 0:
        return 0.0
    if m == 0:
        return 1.0
    return double_factorial(m - 1) * var ** (m // 2)


def gaussian_product_moment(profile: TermProfile, t1: float, t2: float) -> float:
    """Expectation of the profile monomial under independent symbols.

    Factors as a product over distinct symbols of E[u^a] E[v^b] where u
    has variance t1 and v has variance t2 - t1.
    """
    if not 0 <= t1 <= t2:
        raise ValidationError(f"times must satisfy 0 <= t1 <= t2, got ({t1}, {t2})")
    u_pow: dict[int, int] = {}
    v_pow: dict[int, int] = {}
    for key, layer, mult in profile.entries:
        side = u_pow if layer == "u" else v_pow
        side[key] = side.get(key, 0) + mult
    value = profile.coefficient
    for key in set(u_pow) | set(v_pow):
        value *= _gaussian_moment(u_pow.get(key, 0), t1)
        value *= _gaussian_moment(v_pow.get(key, 0), t2 - t1)
        if value == 0.0:
            return 0.0
    return value


def mixed_moment(alpha: int, beta: int, t1: float, t2: float) -> float:
    """E[a(t1)^alpha a(t2)^beta] for one standard Brownian symbol a.

    Binomial expansion over a(t2) = u + v with independent u ~ N(0, t1)
    and v ~ N(0, t2 - t1).
    """
    if not isinstance(alpha, int) or not isinstance(beta, int) or alpha < 0 or beta < 0:
        raise ValidationError(f"powers must be nonnegative integers, got ({alpha!r}, {beta!r})")
    if not 0 <= t1 <= t2:
        raise ValidationError(f"times must satisfy 0 <= t1 <= t2, got ({t1}, {t2})")
    if (alpha + beta) % 2 != 0:
        return 0.0
    total = 0.0
    for k in range(beta + 1):
        head = _gaussian_moment(alpha + k, t1)
        if head == 0.0:
            continue
        tail = _gaussian_moment(beta - k, t2 - t1)
        if tail == 0.0:
            continue
        total += math.comb(beta, k) * head * tail
    return total


def _enumeration_cost(b: int, p: int) -> int:
    """Index tuples one trace expansion enumerates.

    The row sum collapses to a per-tuple multiplicity and the Kronecker
    delta eliminates one index slot for even p, so the cost never
    carries a factor of n.
    """
    free = p - 1 if p % 2 == 0 else p
    return (2 * b + 1) ** free


def _require_gaussian(model: EntryModel) -> None:
    if model.kind == "brownian":
        return
    if model.kind == "iid" and model.iid_law == "standard_gaussian":
        return
    raise ValidationError(
        f"exact oracle requires a Gaussian entry model, got kind={model.kind!r}, "
        f"law={model.iid_law!r}"
    )


def _effective_times(model: EntryModel, t1: float, t2: float) -> tuple[float, float]:
    """Symbol variances per time layer for the given model.

    Brownian symbols have variance t at time t; i.i.d. Gaussian symbols
    have variance 1 with no time evolution, so both layers collapse.
    """
    if model.kind == "brownian":
        return t1, t2
    if t1 != t2:
        raise ValidationError("i.i.d. models have no time coupling; require t1 == t2")
    return 1.0, 1.0


def _enumerate_profiles(
    config: BandConfig, model: EntryModel, p: int
) -> tuple[dict[tuple, float], int]:
    """Weights of Tr(H^p) grouped by symbol-multiset profile.

    Returns a map from sorted ((key, multiplicity), ...) tuples to the
    summed row-indicator multiplicity of all index tuples realizing that
    multiset, plus the number of tuples enumerated.  The Kronecker delta
    eliminates the last index for even p and pins the row for odd p.
    """
    n, b = config.n, config.b_n
    symmetric = not model.independent_negative_indices
    skip_zero = not model.include_a0
    even = (p % 2 == 0)
    signs = [(-1) ** l for l in range(1, p + 1)]
    free = p - 1 if even else p
    profiles: dict[tuple, float] = {}
    count = 0
    for js in product(range(-b, b + 1), repeat=free):
        count += 1
        if skip_zero and (0 in js):
            continue
        run = 0
        lo = 0
        hi = 0
        for sign, j in zip(signs, js):
            run += sign * j
            lo = min(lo, run)
            hi = max(hi, run)
        if even:
            # delta pins the alternating sum to zero: solve the last index
            j_last = -run
            if abs(j_last) > b or (skip_zero and j_last == 0):
                continue
            js = js + (j_last,)
            weight = n + lo - hi
            if weight <= 0:
                continue
        else:
            # delta pins the row: i = (n + 1 + s_p) / 2 when integral
            num = n + 1 + run
            if num % 2 != 0:
                continue
            i_row = num // 2
            if not (1 + hi <= i_row <= n + lo):
                continue
            weight = 1
        mults: dict[int, int] = {}
        for j in js:
            key = abs(j) if symmetric else j
            mults[key] = mults.get(key, 0) + 1
        prof = tuple(sorted(mults.items()))
        profiles[prof] = profiles.get(prof, 0.0) + weight
    return profiles, count


def _profile_mean(prof: tuple, var: float) -> float:
    value = 1.0
    for key, mult in prof:
        value *= _gaussian_moment(mult, var)
        if value == 0.0:
            return 0.0
    return value


def exact_mean_trace(
    config: BandConfig,
    p: int,
    t: float,
    model: EntryModel = EntryModel(),
    budget: float = DEFAULT_TERM_BUDGET,
) -> ExactValue:
    """Exact E Tr(H^p(t)), unscaled; divide by b_n^(p/2) for A."""
    if not isinstance(p, int) or p < 1:
        raise ValidationError(f"trace power must be a positive integer, got {p!r}")
    if t < 0:
        raise ValidationError(f"time must be nonnegative, got {t}")
    _require_gaussian(model)
    n, b = config.n, config.b_n
    cost = _enumeration_cost(b, p)
    if cost > budget:
        raise BudgetError(
            f"mean-trace oracle needs {cost} index tuples, exceeding the budget {budget:g}"
        )
    var, _ = _effective_times(model, t, t)
    profiles, count = _enumerate_profiles(config, model, p)
    value = math.fsum(w * _profile_mean(prof, var) for prof, w in profiles.items())
    return ExactValue(value, count, n, b, model.convention, model.include_a0, budget)


def exact_cov_w(
    config: BandConfig,
    p: int,
    q: int,
    t1: float,
    t2: float,
    model: EntryModel = EntryModel(),
    budget: float = DEFAULT_TERM_BUDGET,
) -> ExactValue:
    """Exact finite-size Cov(w_p(t1), w_q(t2)) for a Gaussian model.

    Computed as (b_n / n^2) b_n^{-(p+q)/2} [E XY - E X E Y] with
    X = Tr H^p(t1), Y = Tr H^q(t2), both expanded over symbol profiles.
    Profile pairs whose combined multiset has any odd-degree symbol
    vanish by parity and are pruned by grouping on the odd-key set.
    """
    for name, value in (("p", p), ("q", q)):
        if not isinstance(value, int) or value < 1:
            raise ValidationError(f"{name} must be a positive integer, got {value!r}")
    if not 0 <= t1 <= t2:
        raise ValidationError(f"times must satisfy 0 <= t1 <= t2, got ({t1}, {t2})")
    _require_gaussian(model)
    n, b = config.n, config.b_n
    cost = _enumeration_cost(b, p) + _enumeration_cost(b, q)
    if cost > budget:
        raise BudgetError(
            f"covariance oracle needs {cost} index tuples, exceeding the budget {budget:g}"
        )
    v1, v2 = _effective_times(model, t1, t2)
    prof_p, count_p = _enumerate_profiles(config, model, p)
    prof_q, count_q = _enumerate_profiles(config, model, q)
    scale = b ** (1 - (p + q) / 2) / n ** 2

    def odd_signature(prof: tuple) -> frozenset:
        return frozenset(key for key, mult in prof if mult % 2)

    groups_q: dict[frozenset, list] = {}
    for prof, w in prof_q.items():
        mean = _profile_mean(prof, v2)
        groups_q.setdefault(odd_signature(prof), []).append((dict(prof), w, mean))

    terms = []
    for prof, w in prof_p.items():
        bucket = groups_q.get(odd_signature(prof))
        if not bucket:
            continue
        a_pow = dict(prof)
        mean_a = _profile_mean(prof, v1)
        for b_pow, w2, mean_b in bucket:
            joint = 1.0
            for key in set(a_pow) | set(b_pow):
                joint *= mixed_moment(a_pow.get(key, 0), b_pow.get(key, 0), v1, v2)
                if joint == 0.0:
                    break
            terms.append(w * w2 * (joint - mean_a * mean_b))
    value = scale * math.fsum(terms)
    return ExactValue(
        value, count_p + count_q, n, b, model.convention, model.include_a0, budget
    )


def limit_probe(
    p: int,
    q: int,
    t1: float,
    t2: float,
    configs,
    model: EntryModel = EntryModel(),
    budget: float = DEFAULT_TERM_BUDGET,
) -> LimitProbeResult:
    """Exact covariance values along an increasing-n sequence of configs.

    Reports adjacent gaps, the largest adjacent gap, and an Aitken
    delta-squared extrapolation of the limit when three or more values
    are available and the second difference is nondegenerate.
    """
    configs = tuple(configs)
    if len(configs) < 2:
        raise ValidationError("limit probe needs at least two configs")
    orders = [c.n for c in configs]
    if any(a >= z for a, z in zip(orders, orders[1:])):
        raise ValidationError(f"configs must be strictly increasing in n, got {orders}")
    values = tuple(exact_cov_w(c, p, q, t1, t2, model=model, budget=budget) for c in configs)
    seq = [v.value for v in values]
    abs_gaps = tuple(abs(z - a) for a, z in zip(seq, seq[1:]))
    rel_gaps = tuple(
        gap / abs(z) if z != 0 else math.inf for gap, z in zip(abs_gaps, seq[1:])
    )
    richardson = None
    if len(seq) >= 3:
        v0, v1_, v2_ = seq[-3], seq[-2], seq[-1]
        denom = (v2_ - v1_) - (v1_ - v0)
        if denom != 0.0:
            richardson = v2_ - (v2_ - v1_) ** 2 / denom
    return LimitProbeResult(values, abs_gaps, rel_gaps, max(abs_gaps), richardson)
