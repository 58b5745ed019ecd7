"""Spectral tooling: eigenvalues, empirical distributions, fast products.

All matrices here are real symmetric, so eigenvalues are real and the
empirical spectral distribution is the step function placing mass 1/n at
each eigenvalue.  The structured kinds admit O(n log n) matrix-vector
products through a circulant embedding, used by the stochastic trace
estimator and the fast moment path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .ensemble import EntrySequence, MatrixKind, PatternedMatrix
from .errors import InvalidArgumentError, NumericInputError

HIST_BINS_DEFAULT = 101
MIN_PROBES = 8


@dataclass(frozen=True)
class EsdSummary:
    """Empirical spectral distribution: eigenvalues, histogram, moments."""

    n: int
    eigenvalues: np.ndarray
    hist_edges: np.ndarray
    hist_counts: np.ndarray
    empirical_moments: tuple[float, ...]

    def cdf(self, x: float) -> float:
        """Fraction of eigenvalues <= x (right-continuous step function)."""
        return float(np.searchsorted(self.eigenvalues, x, side="right")) / self.n

    def moment(self, h: int) -> float:
        if not 1 <= h <= len(self.empirical_moments):
            raise InvalidArgumentError(f"moment h={h} not stored")
        return self.empirical_moments[h - 1]

    def eigenvalues_csv(self) -> str:
        lines = ["index,eigenvalue"]
        lines += [f"{k},{v:.17g}" for k, v in enumerate(self.eigenvalues)]
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "histogram": {
                "edges": [float(e) for e in self.hist_edges],
                "counts": [int(c) for c in self.hist_counts],
            },
            "moments": {str(h + 1): v for h, v in enumerate(self.empirical_moments)},
        }


def _as_dense(matrix) -> np.ndarray:
    if isinstance(matrix, PatternedMatrix):
        return matrix.entries
    return np.asarray(matrix, dtype=float)


def eigenvalues_symmetric(matrix) -> np.ndarray:
    """Sorted eigenvalues of a real symmetric matrix (LAPACK, lower triangle)."""
    a = _as_dense(matrix)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidArgumentError("expected a square matrix")
    if not np.isfinite(a).all():
        raise NumericInputError("matrix entries must be finite")
    return np.sort(np.linalg.eigvalsh(a))


def esd(eigenvalues: np.ndarray, bins: int = HIST_BINS_DEFAULT, h_max: int = 8) -> EsdSummary:
    """Summarize a sorted (or unsorted) eigenvalue vector."""
    ev = np.sort(np.asarray(eigenvalues, dtype=float))
    if ev.ndim != 1 or len(ev) == 0:
        raise InvalidArgumentError("eigenvalues must be a nonempty vector")
    if not np.isfinite(ev).all():
        raise NumericInputError("eigenvalues must be finite")
    if bins < 1:
        raise InvalidArgumentError("bins must be >= 1")
    lo, hi = float(ev[0]), float(ev[-1])
    pad = 1e-9 * max(1.0, abs(lo), abs(hi))
    counts, edges = np.histogram(ev, bins=bins, range=(lo - pad, hi + pad))
    moms = tuple(float(np.mean(ev**h)) for h in range(1, h_max + 1))
    return EsdSummary(len(ev), ev, edges, counts, moms)


def power_trace_moments(matrix, h_max: int) -> np.ndarray:
    """(1/n) tr(M^h) for h = 1..h_max via symmetric power factorization.

    Computes M^k for k <= ceil(h_max / 2) and pairs powers through
    Frobenius inner products, so only about h_max/2 matrix products are
    needed.
    """
    a = _as_dense(matrix)
    n = a.shape[0]
    if h_max < 1:
        raise InvalidArgumentError("h_max must be >= 1")
    k_top = (h_max + 1) // 2
    powers = {1: a}
    for k in range(2, k_top + 1):
        powers[k] = powers[k - 1] @ a
    out = np.empty(h_max)
    out[0] = float(np.trace(a)) / n
    for h in range(2, h_max + 1):
        x = powers[h // 2]
        y = powers[h - h // 2]
        out[h - 1] = float(np.sum(x * y)) / n
    return out


def empirical_moment(matrix, h: int, path: str = "eigen") -> float:
    """(1/n) tr(M^h), either from eigenvalues or from matrix powers.

    The two paths are mathematically identical; keeping both supports
    cross-validation of the spectral pipeline.
    """
    if h < 0:
        raise InvalidArgumentError("h must be >= 0")
    if h == 0:
        return 1.0
    if path == "eigen":
        ev = eigenvalues_symmetric(matrix)
        return float(np.mean(ev**h))
    if path == "dense":
        return float(power_trace_moments(matrix, h)[h - 1])
    raise InvalidArgumentError(f"unknown path {path!r}")


@dataclass(frozen=True)
class StructuredOperator:
    """Matrix-free patterned operator via a 2n-point circulant embedding.

    ``spectrum`` is the FFT of the first column of the circulant that
    embeds the (possibly asymmetric) Toeplitz form of the operator; the
    Hankel kind is a Toeplitz product applied to the reversed input.
    """

    kind: MatrixKind
    n: int
    spectrum: np.ndarray  # complex, length 2n

    @classmethod
    def from_sequence(cls, kind: MatrixKind, seq: EntrySequence, n: int) -> "StructuredOperator":
        kind = MatrixKind(kind)
        if n < 1:
            raise InvalidArgumentError("n must be >= 1")
        scale = 1.0 / math.sqrt(n)
        if kind == MatrixKind.TOEPLITZ:
            t = seq.window(0, n - 1).values * scale
            col = t
            row = t
        else:
            y2 = seq.window(-(n - 1), n - 1).values * scale
            col = y2[:n][::-1]  # y_0, y_-1, ..., y_-(n-1)
            row = y2[n - 1 :]  # y_0, y_1, ..., y_{n-1}
        circ = np.concatenate([col, [0.0], row[1:][::-1]])
        return cls(kind, n, np.fft.fft(circ))

    @classmethod
    def from_matrix(cls, matrix: PatternedMatrix) -> "StructuredOperator":
        return cls.from_sequence(matrix.kind, matrix.source, matrix.n)

    def apply(self, v: np.ndarray) -> np.ndarray:
        """Product with a vector (n,) or with each column of an (n, k) block."""
        x = np.asarray(v, dtype=float)
        single = x.ndim == 1
        if single:
            x = x[:, None]
        if x.shape[0] != self.n:
            raise InvalidArgumentError(f"expected leading dimension {self.n}")
        if self.kind == MatrixKind.HANKEL:
            x = x[::-1, :]
        buf = np.zeros((2 * self.n, x.shape[1]))
        buf[: self.n] = x
        prod = np.fft.ifft(np.fft.fft(buf, axis=0) * self.spectrum[:, None], axis=0)
        out = prod[: self.n].real
        return out[:, 0] if single else out


def fast_matvec(op: StructuredOperator, v: np.ndarray) -> np.ndarray:
    """Structured matrix-vector product in O(n log n)."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or len(v) != op.n:
        raise InvalidArgumentError(f"expected a vector of length {op.n}")
    return op.apply(v)


def hutchinson_moment(
    op: StructuredOperator, h: int, probes: int = 64, seed: int = 0
) -> tuple[float, float]:
    """Stochastic estimate of (1/n) tr(M^h) with Rademacher probes.

    Returns (estimate, standard error); the standard error is the sample
    standard deviation of the per-probe values divided by sqrt(probes).
    """
    if h < 1:
        raise InvalidArgumentError("h must be >= 1")
    if probes < MIN_PROBES:
        raise InvalidArgumentError(f"need at least {MIN_PROBES} probes")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    v = rng.integers(0, 2, size=(op.n, probes)).astype(float) * 2.0 - 1.0
    w = v
    for _ in range(h):
        w = op.apply(w)
    vals = np.sum(v * w, axis=0) / op.n
    est = float(np.mean(vals))
    se = float(np.std(vals, ddof=1) / math.sqrt(probes))
    return est, se


def w2_distance(a: EsdSummary, b: EsdSummary) -> float:
    """Order-2 Wasserstein distance between two empirical distributions.

    For equal sizes this is the root mean square gap between sorted
    eigenvalues; otherwise both quantile functions are evaluated on a
    common midpoint grid of 4 * max(n_a, n_b) points.
    """
    ea, eb = a.eigenvalues, b.eigenvalues
    if a.n == b.n:
        return float(np.sqrt(np.mean((ea - eb) ** 2)))
    g = 4 * max(a.n, b.n)
    u = (np.arange(g) + 0.5) / g
    qa = ea[np.minimum((u * a.n).astype(int), a.n - 1)]
    qb = eb[np.minimum((u * b.n).astype(int), b.n - 1)]
    return float(np.sqrt(np.mean((qa - qb) ** 2)))


def zero_diagonal(matrix: PatternedMatrix) -> PatternedMatrix:
    """Copy of the matrix with its diagonal set to zero.

    Zeroing the diagonal perturbs the metric by at most the diagonal
    mass: w2^2 <= (1/n) sum_i M_ii^2.
    """
    entries = matrix.entries.copy()
    np.fill_diagonal(entries, 0.0)
    return replace(matrix, entries=entries, variant="zero_diagonal")


def diagonal_w2_bound(matrix: PatternedMatrix) -> float:
    """(1/n) sum_i M_ii^2, the squared-W2 budget of ``zero_diagonal``."""
    d = np.diagonal(matrix.entries)
    return float(np.sum(d * d) / matrix.n)
