"""Band matrix construction from coupled random symbol paths.

A symbol family ``a_0, a_1, ..., a_b`` (independent standard Brownian
motions, or a single draw of an i.i.d. law) fills an n x n matrix along
anti-diagonals: entry (i, j) carries the symbol with index
``k = n + 1 - i - j`` and vanishes when ``|k| > b``.  The index 0
anti-diagonal carries ``a_0``, which is identically zero unless the
entry model opts in.  Negative indices either mirror the positive ones
(symmetric convention, the default) or use an independent family
(a sensitivity variant).  Matrices built this way are exactly symmetric
under either convention because entries depend on i + j only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ValidationError

ENTRY_KINDS = ("brownian", "iid")
IID_LAWS = ("standard_gaussian", "rademacher", "centered_uniform")

# Guards floor(n ** gamma) against representation error at exact powers,
# e.g. 1024 ** 0.6 evaluating to 63.99999999999999 instead of 64.
_BANDWIDTH_FLOOR_EPS = 1e-9


def bandwidth_from_rule(n: int, gamma: float) -> int:
    """Bandwidth floor(n ** gamma) for a growth exponent 0 < gamma < 1."""
    if not (0.0 < gamma < 1.0):
        raise ValidationError(f"bandwidth exponent must satisfy 0 < gamma < 1, got {gamma}")
    if n < 1:
        raise ValidationError(f"matrix order must be >= 1, got {n}")
    return int(math.floor(n ** gamma + _BANDWIDTH_FLOOR_EPS))


@dataclass(frozen=True)
class BandConfig:
    """Matrix order and bandwidth, optionally tagged with the growth exponent used."""

    n: int
    b_n: int
    bandwidth_rule: float | None = None

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValidationError(f"matrix order must be a positive integer, got {self.n!r}")
        if not isinstance(self.b_n, int) or not (1 <= self.b_n <= self.n):
            raise ValidationError(
                f"bandwidth must be an integer with 1 <= b_n <= n, got b_n={self.b_n!r} for n={self.n}"
            )
        if self.bandwidth_rule is not None and not (0.0 < self.bandwidth_rule < 1.0):
            raise ValidationError(
                f"bandwidth exponent must satisfy 0 < gamma < 1, got {self.bandwidth_rule}"
            )

    @classmethod
    def from_rule(cls, n: int, gamma: float = 0.6) -> "BandConfig":
        return cls(n, bandwidth_from_rule(n, gamma), bandwidth_rule=gamma)


@dataclass(frozen=True)
class EntryModel:
    """Distributional choices for the symbol family.

    ``kind`` selects Brownian paths or a one-time i.i.d. draw; the i.i.d.
    laws all have mean zero and unit variance.  ``include_a0`` activates
    the index 0 symbol (otherwise identically zero).  With
    ``independent_negative_indices`` the negative-index symbols form an
    independent family instead of mirroring the positive ones.
    """

    kind: str = "brownian"
    iid_law: str = "standard_gaussian"
    include_a0: bool = False
    independent_negative_indices: bool = False

    def __post_init__(self):
        if self.kind not in ENTRY_KINDS:
            raise ValidationError(f"entry kind must be one of {ENTRY_KINDS}, got {self.kind!r}")
        if self.iid_law not in IID_LAWS:
            raise ValidationError(f"iid law must be one of {IID_LAWS}, got {self.iid_law!r}")

    @property
    def convention(self) -> str:
        return "independent" if self.independent_negative_indices else "symmetric"


@dataclass(frozen=True)
class SymbolPaths:
    """Symbol values on a time grid.

    ``values`` has one row per symbol index 0..b_n; ``neg_values`` holds
    rows for indices -1..-b_n and is present only under the independent
    negative-index convention.
    """

    time_grid: tuple[float, ...]
    values: np.ndarray
    neg_values: np.ndarray | None
    model: EntryModel

    @property
    def b_n(self) -> int:
        return self.values.shape[0] - 1

    def time_index(self, t: float) -> int:
        for i, g in enumerate(self.time_grid):
            if g == t:
                return i
        raise ValidationError(f"time {t} is not on the sampled grid {self.time_grid}")

    def symbol_values(self, time_index: int) -> np.ndarray:
        """Vector of symbol values indexed by j + b_n for j in -b_n..b_n."""
        pos = self.values[:, time_index]
        if self.neg_values is not None:
            neg = self.neg_values[::-1, time_index]
        else:
            neg = pos[:0:-1]
        return np.concatenate([neg, pos])


def _validate_grid(grid) -> tuple[float, ...]:
    grid = tuple(float(t) for t in grid)
    if len(grid) == 0:
        raise ValidationError("time grid must contain at least one point")
    if any(t < 0 for t in grid):
        raise ValidationError(f"time grid must be nonnegative, got {grid}")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValidationError(f"time grid must be strictly increasing, got {grid}")
    return grid


def sample_symbol_paths(model: EntryModel, config: BandConfig, grid, rng_seed: int) -> SymbolPaths:
    """Draw one realization of all symbol paths on a time grid.

    Brownian paths are built from independent Gaussian increments with
    variance equal to the grid spacing (the first point uses its distance
    from zero, so a leading grid time 0 gives an exactly zero column).
    The i.i.d. kinds admit a single grid time only.  Output is
    deterministic given the seed: one block of draws in fixed order.
    """
    grid = _validate_grid(grid)
    rows = config.b_n + 1
    total_rows = rows + (config.b_n if model.independent_negative_indices else 0)
    rng = np.random.default_rng(np.random.PCG64(rng_seed))

    if model.kind == "brownian":
        dt = np.diff(np.concatenate([[0.0], np.asarray(grid)]))
        increments = rng.standard_normal((total_rows, len(grid))) * np.sqrt(dt)
        values = np.cumsum(increments, axis=1)
    else:
        if len(grid) != 1:
            raise ValidationError("iid entry models admit exactly one grid time")
        if model.iid_law == "standard_gaussian":
            values = rng.standard_normal((total_rows, 1))
        elif model.iid_law == "rademacher":
            values = rng.integers(0, 2, size=(total_rows, 1)).astype(np.float64) * 2.0 - 1.0
        else:
            half = math.sqrt(3.0)  # uniform on [-sqrt(3), sqrt(3)] has unit variance
            values = rng.uniform(-half, half, size=(total_rows, 1))

    if not model.include_a0:
        values[0, :] = 0.0
    pos = values[:rows]
    neg = values[rows:] if model.independent_negative_indices else None
    pos.setflags(write=False)
    if neg is not None:
        neg.setflags(write=False)
    return SymbolPaths(grid, pos, neg, model)


@dataclass(frozen=True)
class SymmetricBandMatrix:
    """Dense symmetric matrix whose entries are constant on anti-diagonals."""

    order: int
    b_n: int
    values: np.ndarray


@lru_cache(maxsize=8)
def _antidiagonal_index(n: int) -> np.ndarray:
    """Matrix of n - 1 - i - j offsets (0-based), shared across builds of order n."""
    idx = np.arange(n)
    k = (n - 1) - np.add.outer(idx, idx)
    k.setflags(write=False)
    return k


def build_band_hankel(paths: SymbolPaths, t: float, config: BandConfig) -> SymmetricBandMatrix:
    """Assemble the banded anti-diagonal matrix H at one grid time.

    Entry (i, j) equals the symbol with index ``n + 1 - i - j`` when that
    index lies within the band ``|k| <= b_n`` and zero otherwise.
    """
    if paths.b_n != config.b_n:
        raise ValidationError(
            f"paths were sampled for bandwidth {paths.b_n}, config has {config.b_n}"
        )
    n, b = config.n, config.b_n
    ti = paths.time_index(t)
    symbols = paths.symbol_values(ti)

    # Full anti-diagonal value table for k in [-(n-1), n-1], band applied.
    full = np.zeros(2 * n - 1)
    kmax = min(b, n - 1)
    center = n - 1
    lo, hi = center - kmax, center + kmax
    full[lo:hi + 1] = symbols[b - kmax:b + kmax + 1]

    k = _antidiagonal_index(n)
    return SymmetricBandMatrix(n, b, full[k + center])


def scale_to_A(H: SymmetricBandMatrix, config: BandConfig) -> SymmetricBandMatrix:
    """Divide every entry by sqrt(b_n)."""
    return SymmetricBandMatrix(H.order, H.b_n, H.values / math.sqrt(config.b_n))


def build_tilde_A(A: SymmetricBandMatrix, a0_value: float, config: BandConfig) -> SymmetricBandMatrix:
    """Shift the diagonal by a0_value / sqrt(b_n), leaving all other entries untouched."""
    shifted = A.values + (a0_value / math.sqrt(config.b_n)) * np.eye(A.order)
    return SymmetricBandMatrix(A.order, A.b_n, shifted)


def dump_matrix_csv(M: SymmetricBandMatrix, fh) -> None:
    """Write entries row-major as CSV with 17 significant digits."""
    for row in M.values:
        fh.write(",".join(format(v, ".17g") for v in row))
        fh.write("\n")
