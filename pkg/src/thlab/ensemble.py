"""Moving-average entry sequences and the patterned matrices built on them.

Entry model: Y_j = sum_{r=-m..m} c_r X_{j+r}, with X an i.i.d. driving
sequence of mean 0 and variance 1.  Matrices are n x n real symmetric
with entries scaled by 1/sqrt(n): the Toeplitz kind reads Y_{|i-j|}, the
Hankel kind reads the anti-diagonal index and uses a two-sided sequence,
so entries at mirrored anti-diagonal offsets stay distinct.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import InvalidArgumentError, MissingSupportError, NumericInputError

_SQRT3 = math.sqrt(3.0)
_U64_MAX = 2**64 - 1


class MatrixKind(str, Enum):
    TOEPLITZ = "toeplitz"
    HANKEL = "hankel"


class BaseDistribution(str, Enum):
    """Driving distributions, all standardized to mean 0 and variance 1."""

    STANDARD_NORMAL = "standard_normal"
    RADEMACHER = "rademacher"
    UNIFORM_SYM = "uniform_sym"


@dataclass(frozen=True)
class MovingAverageProcess:
    """Specification of the entry process: window radius, weights, driver, seed.

    ``weights`` has length 2m+1 (index r = -m..m); None means all ones,
    the case covered by the closed-form limit moments.
    """

    m: int
    weights: tuple[float, ...] | None = None
    dist: BaseDistribution = BaseDistribution.STANDARD_NORMAL
    seed: int = 0

    def __post_init__(self) -> None:
        if self.m < 0:
            raise InvalidArgumentError("m must be >= 0")
        if not 0 <= self.seed <= _U64_MAX:
            raise InvalidArgumentError("seed must fit in 64 unsigned bits")
        object.__setattr__(self, "dist", BaseDistribution(self.dist))
        if self.weights is not None:
            w = tuple(float(x) for x in self.weights)
            if len(w) != 2 * self.m + 1:
                raise InvalidArgumentError(
                    f"weights must have length 2m+1 = {2 * self.m + 1}, got {len(w)}"
                )
            if not all(math.isfinite(x) for x in w):
                raise NumericInputError("weights must be finite")
            object.__setattr__(self, "weights", w)

    @property
    def resolved_weights(self) -> tuple[float, ...]:
        if self.weights is None:
            return (1.0,) * (2 * self.m + 1)
        return self.weights

    @property
    def has_unit_weights(self) -> bool:
        return all(x == 1.0 for x in self.resolved_weights)


@dataclass(frozen=True)
class EntrySequence:
    """A finite real sequence on the integer window [lo, hi]."""

    lo: int
    hi: int
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        if self.lo > self.hi:
            raise InvalidArgumentError("lo must be <= hi")
        if vals.ndim != 1 or len(vals) != self.hi - self.lo + 1:
            raise InvalidArgumentError("values must be a vector of length hi - lo + 1")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.hi - self.lo + 1

    def covers(self, lo: int, hi: int) -> bool:
        return self.lo <= lo and hi <= self.hi

    def value(self, j: int) -> float:
        if not self.lo <= j <= self.hi:
            raise MissingSupportError(f"index {j} outside window [{self.lo}, {self.hi}]")
        return float(self.values[j - self.lo])

    def window(self, lo: int, hi: int) -> "EntrySequence":
        if not self.covers(lo, hi):
            raise MissingSupportError(
                f"window [{lo}, {hi}] not contained in [{self.lo}, {self.hi}]"
            )
        return EntrySequence(lo, hi, self.values[lo - self.lo : hi - self.lo + 1])


@dataclass(frozen=True)
class PatternedMatrix:
    """A scaled symmetric patterned matrix and the process that generated it."""

    kind: MatrixKind
    n: int
    entries: np.ndarray
    source: EntrySequence
    scale: float
    variant: str = "full"

    @property
    def dense(self) -> np.ndarray:
        return self.entries


def derive_seed(root: int, *key: int) -> int:
    """Deterministic 64-bit stream seed from a root seed and an index path.

    Uses ``numpy.random.SeedSequence(root, spawn_key=key)``, so distinct
    key paths give statistically independent generators.
    """
    ss = np.random.SeedSequence(root, spawn_key=key)
    return int(ss.generate_state(1, np.uint64)[0])


def _draw(rng: np.random.Generator, dist: BaseDistribution, size: int) -> np.ndarray:
    if dist == BaseDistribution.STANDARD_NORMAL:
        return rng.standard_normal(size)
    if dist == BaseDistribution.RADEMACHER:
        return rng.integers(0, 2, size=size).astype(float) * 2.0 - 1.0
    if dist == BaseDistribution.UNIFORM_SYM:
        return rng.uniform(-_SQRT3, _SQRT3, size=size)
    raise InvalidArgumentError(f"unknown distribution {dist!r}")


def sample_raw(process: MovingAverageProcess, lo: int, hi: int) -> EntrySequence:
    """Draw the i.i.d. driving sequence X on the window [lo, hi]."""
    if lo > hi:
        raise InvalidArgumentError("lo must be <= hi")
    rng = np.random.default_rng(np.random.SeedSequence(process.seed))
    return EntrySequence(lo, hi, _draw(rng, process.dist, hi - lo + 1))


def moving_average(raw: EntrySequence, m: int, weights=None) -> EntrySequence:
    """Windowed linear filter Y_j = sum_{r=-m..m} c_r X_{j+r}.

    Returns the maximal output window [raw.lo + m, raw.hi - m]; the raw
    window must be long enough for at least one output value.
    """
    if m < 0:
        raise InvalidArgumentError("m must be >= 0")
    if weights is None:
        w = np.ones(2 * m + 1)
    else:
        w = np.asarray([float(x) for x in weights])
        if len(w) != 2 * m + 1:
            raise InvalidArgumentError(f"weights must have length {2 * m + 1}")
    if len(raw) < 2 * m + 1:
        raise MissingSupportError("raw window shorter than the filter span")
    # np.convolve(a, v)[k] = sum_r a[k - r] v[r]; with v reversed this is
    # the sliding dot product sum_r c_r X_{j+r}.
    out = np.convolve(raw.values, w[::-1], mode="valid")
    return EntrySequence(raw.lo + m, raw.hi - m, out)


def build_toeplitz(seq: EntrySequence, n: int) -> PatternedMatrix:
    """Symmetric Toeplitz matrix M[i, j] = Y_{|i-j|} / sqrt(n)."""
    if n < 1:
        raise InvalidArgumentError("n must be >= 1")
    if not seq.covers(0, n - 1):
        raise MissingSupportError(f"sequence must cover [0, {n - 1}]")
    y = seq.window(0, n - 1).values
    idx = np.abs(np.arange(n)[:, None] - np.arange(n)[None, :])
    scale = 1.0 / math.sqrt(n)
    return PatternedMatrix(MatrixKind.TOEPLITZ, n, y[idx] * scale, seq, scale)


def build_hankel(seq: EntrySequence, n: int) -> PatternedMatrix:
    """Symmetric Hankel matrix reading the two-sided sequence by anti-diagonal.

    With rows and columns numbered 1..n the entry is Y_{n - (i + j) + 1}
    / sqrt(n); the anti-diagonal index runs over [-(n-1), n-1].
    """
    if n < 1:
        raise InvalidArgumentError("n must be >= 1")
    if not seq.covers(-(n - 1), n - 1):
        raise MissingSupportError(f"sequence must cover [{-(n - 1)}, {n - 1}]")
    y2 = seq.window(-(n - 1), n - 1).values
    idx = 2 * (n - 1) - (np.arange(n)[:, None] + np.arange(n)[None, :])
    scale = 1.0 / math.sqrt(n)
    return PatternedMatrix(MatrixKind.HANKEL, n, y2[idx] * scale, seq, scale)


def entry_window(kind: MatrixKind, n: int) -> tuple[int, int]:
    """Index window of Y needed to build an n x n matrix of the given kind."""
    if MatrixKind(kind) == MatrixKind.TOEPLITZ:
        return 0, n - 1
    return -(n - 1), n - 1


def sample_patterned_matrix(
    kind: MatrixKind, n: int, process: MovingAverageProcess
) -> PatternedMatrix:
    """Full pipeline: raw draw, moving average, matrix assembly.

    The raw window is the entry window extended by m on both sides, so a
    single draw feeds every entry the matrix needs.  The Toeplitz kind
    also uses the two-sided window; only [0, n-1] enters the matrix.
    """
    kind = MatrixKind(kind)
    if n < 1:
        raise InvalidArgumentError("n must be >= 1")
    lo, hi = -(n - 1), n - 1
    raw = sample_raw(process, lo - process.m, hi + process.m)
    y = moving_average(raw, process.m, process.weights)
    if kind == MatrixKind.TOEPLITZ:
        return build_toeplitz(y, n)
    return build_hankel(y, n)
