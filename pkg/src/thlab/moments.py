"""Limiting spectral moments of the scaled patterned ensembles.

For unit moving-average weights the odd limit moments vanish and the
2p-th moment factors as gamma(p) * card(p, m), where card is the integer
offset-vector count from ``combinatorics`` and gamma(p) is a sum of
indicator-polytope volumes over pair partitions (all of them for the
Toeplitz kind, the odd-even ones for the Hankel kind).  gamma does not
depend on m.  This module estimates gamma by Monte Carlo or by a
midpoint grid rule and assembles the moment sequence; ``exactvol`` holds
the exact oracle for p <= 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .combinatorics import (
    card_offsets_hankel,
    card_offsets_toeplitz,
    cumulative_sign_rows,
    enumerate_oe_pair_partitions,
    enumerate_pair_partitions,
)
from .ensemble import MatrixKind
from .errors import (
    InvalidArgumentError,
    NumericInputError,
    ResourceLimitError,
    UnsupportedTheoryError,
)

MC_CHUNK = 1 << 18
MAX_GRID_POINTS = 8 << 20
DEFAULT_MAX_P = 6

_DEFAULT_GRID_SIDE = {1: 512, 2: 200, 3: 64, 4: 24, 5: 12, 6: 8}


def default_mc_budget(p: int) -> int:
    """Per-partition sample count balancing cost against partition count."""
    return 10**6 if p <= 3 else 10**5


def default_grid_side(p: int) -> int:
    return _DEFAULT_GRID_SIDE.get(p, 8)


@dataclass(frozen=True)
class GammaEstimate:
    """One estimate of the volume factor gamma(p) for a matrix kind."""

    p: int
    kind: MatrixKind
    value: float
    std_error: float
    method: str
    samples_or_gridsize: int


@dataclass(frozen=True)
class MomentEntry:
    h: int
    beta: float
    std_error: float
    cardinality: int | None
    gamma: GammaEstimate | None


@dataclass(frozen=True)
class MomentReport:
    """Limit moments beta_1..beta_{h_max} for one kind and window radius."""

    kind: MatrixKind
    m: int
    entries: tuple[MomentEntry, ...]

    def beta(self, h: int) -> float:
        for e in self.entries:
            if e.h == h:
                return e.beta
        raise InvalidArgumentError(f"moment h={h} not in report")

    def even_betas(self) -> dict[int, tuple[float, float]]:
        """{p: (beta_2p, std_error)} for the even moments in the report."""
        return {e.h // 2: (e.beta, e.std_error) for e in self.entries if e.h % 2 == 0}


def _partitions(kind: MatrixKind, p: int):
    if MatrixKind(kind) == MatrixKind.TOEPLITZ:
        return enumerate_pair_partitions(p)
    return enumerate_oe_pair_partitions(p)


def _constraint_rows(pi, kind: MatrixKind) -> np.ndarray:
    """Unique nonzero cumulative coefficient rows, as a float matrix."""
    rows = cumulative_sign_rows(pi, alternating=(MatrixKind(kind) == MatrixKind.HANKEL))
    uniq = sorted({r for r in rows if any(c != 0 for c in r)})
    return np.array(uniq, dtype=float)


def _mc_partition(rows: np.ndarray, p: int, samples: int, rng) -> tuple[float, float]:
    """Monte Carlo volume of one partition polytope and its variance.

    Samples (z0, z) uniformly on [0,1] x [-1,1]^p and scales the hit
    fraction by 2^p.  Boundary ties count as inside.
    """
    hits = 0
    done = 0
    while done < samples:
        c = min(MC_CHUNK, samples - done)
        z0 = rng.random(c)
        z = rng.uniform(-1.0, 1.0, size=(c, p))
        acc = np.ones(c, dtype=bool)
        for w in rows:
            s = z0 + z @ w
            np.logical_and(acc, (s >= 0.0) & (s <= 1.0), out=acc)
        hits += int(np.count_nonzero(acc))
        done += c
    q = hits / samples
    scale = 2.0**p
    return scale * q, (scale * scale) * q * (1.0 - q) / samples


def _grid_points(side: int, p: int) -> np.ndarray:
    """Midpoint grid on [-1,1]^p as a (side^p, p) matrix."""
    if side**p > MAX_GRID_POINTS:
        raise ResourceLimitError(f"grid of {side**p} points exceeds the supported size")
    mids = -1.0 + (2.0 * np.arange(side) + 1.0) / side
    grids = np.meshgrid(*([mids] * p), indexing="ij")
    return np.stack([g.reshape(-1) for g in grids], axis=1)


def _grid_partition(rows: np.ndarray, p: int, side: int) -> float:
    """Midpoint-rule volume of one partition polytope.

    For a fixed z the constraints confine z0 to an interval, so the z0
    axis is counted in closed form instead of being gridded explicitly.
    """
    pts = _grid_points(side, p)
    svals = pts @ rows.T
    lo = np.maximum(np.max(-svals, axis=1), 0.0)
    hi = np.minimum(np.min(1.0 - svals, axis=1), 1.0)
    # z0 midpoints are (i + 0.5)/side; count indices with lo <= mid <= hi
    i_lo = np.ceil(lo * side - 0.5)
    i_hi = np.floor(hi * side - 0.5)
    counts = np.maximum(i_hi - i_lo + 1.0, 0.0)
    cell = (1.0 / side) * (2.0 / side) ** p
    return float(counts.sum()) * cell


def grid_bias_bound(kind: MatrixKind, p: int, side: int) -> float:
    """Crude bound on the midpoint-rule error of ``gamma_estimate``.

    Each constraint hyperplane can misclassify at most the cells it
    cuts; a slab of width 1/side around each of the two faces of every
    unique constraint covers them.
    """
    total = 0.0
    for pi in _partitions(kind, p):
        rows = _constraint_rows(pi, MatrixKind(kind))
        for w in rows:
            nnz = int(np.count_nonzero(w)) + 1
            total += 2.0 * nnz * (2.0**p) / side
    return total


@lru_cache(maxsize=256)
def _gamma_cached(kind_value: str, p: int, method: str, budget: int, seed: int) -> GammaEstimate:
    kind = MatrixKind(kind_value)
    parts = _partitions(kind, p)
    if method == "monte_carlo":
        value = 0.0
        var = 0.0
        for idx, pi in enumerate(parts):
            rows = _constraint_rows(pi, kind)
            rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(idx,)))
            v, vv = _mc_partition(rows, p, budget, rng)
            value += v
            var += vv
        return GammaEstimate(p, kind, value, float(np.sqrt(var)), method, budget)
    value = 0.0
    for pi in parts:
        value += _grid_partition(_constraint_rows(pi, kind), p, budget)
    return GammaEstimate(p, kind, value, 0.0, method, budget)


def gamma_estimate(
    kind: MatrixKind,
    p: int,
    method: str = "monte_carlo",
    budget: int | None = None,
    seed: int = 0,
) -> GammaEstimate:
    """Estimate gamma(p) for one kind.

    ``budget`` is samples per partition for ``monte_carlo`` (minimum
    1000) and the grid side for ``riemann_grid`` (minimum 8).  Runs are
    deterministic for a fixed seed: every partition gets its own derived
    substream.
    """
    if p < 1:
        raise InvalidArgumentError("p must be >= 1")
    if method not in ("monte_carlo", "riemann_grid"):
        raise InvalidArgumentError(f"unknown method {method!r}")
    if budget is None:
        budget = default_mc_budget(p) if method == "monte_carlo" else default_grid_side(p)
    if method == "monte_carlo" and budget < 1000:
        raise InvalidArgumentError("monte_carlo budget must be >= 1000 samples")
    if method == "riemann_grid" and budget < 8:
        raise InvalidArgumentError("grid side must be >= 8")
    return _gamma_cached(MatrixKind(kind).value, p, method, int(budget), int(seed))


def gamma_toeplitz(p: int, method: str = "monte_carlo", budget=None, seed: int = 0):
    return gamma_estimate(MatrixKind.TOEPLITZ, p, method, budget, seed)


def gamma_hankel(p: int, method: str = "monte_carlo", budget=None, seed: int = 0):
    return gamma_estimate(MatrixKind.HANKEL, p, method, budget, seed)


def pair_partition_count(kind: MatrixKind, p: int) -> int:
    """(2p-1)!! for the Toeplitz kind, p! for the Hankel kind."""
    return len(_partitions(MatrixKind(kind), p))


def beta_sequence(
    kind: MatrixKind,
    m: int,
    h_max: int,
    method: str = "monte_carlo",
    budget: int | None = None,
    seed: int = 0,
    weights: Sequence[float] | None = None,
    max_p: int = DEFAULT_MAX_P,
) -> MomentReport:
    """Limit moments beta_1..beta_{h_max} for unit weights.

    Odd moments are exactly zero.  Even moments are card(p, m) times a
    gamma estimate; the gamma error scales accordingly.  Non-unit
    ``weights`` raise ``UnsupportedTheoryError``: the closed form is only
    proven in the unit-weight case.  ``max_p`` caps the moment order
    because the pair-partition count makes higher orders impractical.
    """
    kind = MatrixKind(kind)
    if m < 0:
        raise InvalidArgumentError("m must be >= 0")
    if h_max < 2:
        raise InvalidArgumentError("h_max must be >= 2")
    if weights is not None and any(float(w) != 1.0 for w in weights):
        raise UnsupportedTheoryError(
            "limit moments are only available for unit moving-average weights"
        )
    if h_max // 2 > max_p:
        raise InvalidArgumentError(
            f"h_max={h_max} needs p={h_max // 2} > max_p={max_p}; raise max_p explicitly"
        )
    card = card_offsets_toeplitz if kind == MatrixKind.TOEPLITZ else card_offsets_hankel
    entries = []
    for h in range(1, h_max + 1):
        if h % 2:
            entries.append(MomentEntry(h, 0.0, 0.0, None, None))
            continue
        p = h // 2
        g = gamma_estimate(kind, p, method, budget, derive_gamma_seed(seed, p))
        c = card(p, m)
        entries.append(MomentEntry(h, c * g.value, c * g.std_error, c, g))
    return MomentReport(kind, m, tuple(entries))


def derive_gamma_seed(root: int, p: int) -> int:
    """Per-order gamma seed, kept away from the matrix trial streams."""
    ss = np.random.SeedSequence(root, spawn_key=(1, p))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class GrowthRow:
    p: int
    riesz_value: float
    support_value: float


def growth_from_moments(beta_2p: Mapping[int, float]) -> list[GrowthRow]:
    """Diagnostics (beta_2p)^{1/(2p)} / p and (beta_2p)^{1/p} per order.

    The support values growing without bound witness an unbounded limit
    support; a Riesz-style bound on the first column witnesses that the
    moments still determine the limit.
    """
    if not beta_2p:
        raise InvalidArgumentError("no even moments supplied")
    rows = []
    for p in sorted(beta_2p):
        b = float(beta_2p[p])
        if p < 1:
            raise InvalidArgumentError("orders must be >= 1")
        if not np.isfinite(b) or b <= 0.0:
            raise NumericInputError(f"beta_{2 * p} = {b} is not a positive finite number")
        rows.append(GrowthRow(p, b ** (1.0 / (2 * p)) / p, b ** (1.0 / p)))
    return rows


def growth_diagnostics(report: MomentReport, min_orders: int = 3) -> list[GrowthRow]:
    """Growth diagnostics of the even moments of a ``MomentReport``."""
    evens = {p: v for p, (v, _) in report.even_betas().items()}
    if len(evens) < min_orders:
        raise InvalidArgumentError(f"need at least {min_orders} even moments")
    return growth_from_moments(evens)


def riesz_growth_bound(p: int, m: int) -> float:
    """Explicit bound on the Riesz diagnostic for the 2p-th moment.

    (beta_2p)^{1/(2p)} / p <= 2 * ((2p)! / (2^p p!))^{1/(2p)} * (2m+1) / p,
    which tends to zero; the moment problem for the limit is determinate.
    """
    if p < 1 or m < 0:
        raise InvalidArgumentError("need p >= 1 and m >= 0")
    dfact = math.factorial(2 * p) / (2**p * math.factorial(p))
    return 2.0 * dfact ** (1.0 / (2 * p)) * (2 * m + 1) / p
