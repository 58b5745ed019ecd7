"""Exact trace identities for small patterned matrices.

For an unscaled symmetric Toeplitz matrix built from values x_0..x_{n-1},
tr(M^h) equals a sum over offset vectors J = (j_1..j_h) with zero total
sum, each weighted by the product of the touched values and by the
number of starting rows i for which every partial walk position stays
inside [1, n].  The Hankel kind walks anti-diagonals, so its offsets are
two-sided, the constraint is an alternating sum, and odd powers tie the
constraint to the starting row.  Everything here is exact integer (or
Fraction) arithmetic; ``dense_power_trace`` recomputes the same numbers
by literal matrix powering and serves as the independent route.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterator, Sequence

from .ensemble import MatrixKind
from .errors import InvalidArgumentError, ResourceLimitError

DEFAULT_TRACE_BUDGET = 10**7

_KINDS = ("toeplitz", "hankel_even", "hankel_odd")


@dataclass(frozen=True)
class IndexSetSpec:
    """Description of one exact offset-vector family.

    ``kind`` is "toeplitz" (zero plain sum), "hankel_even" (zero
    alternating sum) or "hankel_odd" (alternating sum tied to the row
    ``i``).  Offsets range over [-n, n]; the indicator later kills any
    vector touching +-n, but the family itself is defined on the full
    box.
    """

    h: int
    n: int
    kind: str
    i: int | None = None

    def __post_init__(self) -> None:
        if self.h < 1 or self.n < 1:
            raise InvalidArgumentError("need h >= 1 and n >= 1")
        if self.kind not in _KINDS:
            raise InvalidArgumentError(f"kind must be one of {_KINDS}")
        if self.kind == "hankel_odd":
            if self.i is None or not 1 <= self.i <= self.n:
                raise InvalidArgumentError("hankel_odd needs a row index i in [1, n]")
        elif self.i is not None:
            raise InvalidArgumentError("row index only applies to hankel_odd")

    @property
    def constant(self) -> int:
        """Right-hand side of the sum constraint."""
        if self.kind == "hankel_odd":
            return 2 * self.i - 1 - self.n
        return 0


def _check_budget(n: int, h: int, budget: int) -> None:
    if (2 * n + 1) ** (h - 1) > budget:
        raise ResourceLimitError(
            f"(2n+1)^(h-1) = {(2 * n + 1) ** (h - 1)} exceeds budget {budget}"
        )


def enumerate_index_set(
    spec: IndexSetSpec, budget: int = DEFAULT_TRACE_BUDGET
) -> Iterator[tuple[int, ...]]:
    """Yield the offset vectors of ``spec`` in lexicographic prefix order.

    The last coordinate is solved from the constraint rather than
    enumerated, so the work is (2n+1)^(h-1) candidate prefixes.
    """
    h, n = spec.h, spec.n
    _check_budget(n, h, budget)
    c = spec.constant
    alternating = spec.kind != "toeplitz"
    sign_last = (-1) ** h if alternating else 1
    for prefix in product(range(-n, n + 1), repeat=h - 1):
        if alternating:
            acc = sum(((-1) ** k) * j for k, j in enumerate(prefix, start=1))
        else:
            acc = sum(prefix)
        # acc + sign_last * j_h = c
        last = (c - acc) * sign_last
        if -n <= last <= n:
            yield prefix + (last,)


@lru_cache(maxsize=128)
def _toeplitz_terms(n: int, h: int, shift: int, budget: int):
    """Aggregated terms {(|j_1|..|j_h|): total row count} for tr(M^h).

    Offsets touching +-n are dropped: two consecutive walk positions
    cannot both stay in [1, n] across a jump of size n, shifted or not.
    """
    _check_budget(n, h, budget)
    terms: dict[tuple[int, ...], int] = {}
    for prefix in product(range(-(n - 1), n), repeat=h - 1):
        last = -sum(prefix)
        if abs(last) >= n:
            continue
        run = 0
        smin = 0
        smax = 0
        for j in prefix:
            run += j
            smin = min(smin, run)
            smax = max(smax, run)
        # partial sums include the final zero via smin/smax seeds
        lo = max(1, 1 - shift - smin)
        hi = min(n, n - shift - smax)
        count = hi - lo + 1
        if count <= 0:
            continue
        key = tuple(sorted(abs(j) for j in prefix + (last,)))
        terms[key] = terms.get(key, 0) + count
    return tuple(terms.items())


def trace_formula_toeplitz(
    x: Sequence,
    n: int,
    h: int,
    budget: int = DEFAULT_TRACE_BUDGET,
    index_shift: int = 0,
):
    """tr(M^h) of the unscaled symmetric Toeplitz matrix on x_0..x_{n-1}.

    Exact when fed ints or Fractions.  ``index_shift`` displaces every
    walk-position indicator and exists to prove the validators can catch
    a broken indicator; 0 is the true identity.
    """
    if n < 1 or h < 1:
        raise InvalidArgumentError("need n >= 1 and h >= 1")
    if len(x) < n:
        raise InvalidArgumentError(f"need at least n = {n} values")
    total = 0
    for key, count in _toeplitz_terms(n, h, index_shift, budget):
        total += count * math.prod(x[t] for t in key)
    return total


@lru_cache(maxsize=128)
def _hankel_terms(n: int, h: int, shift: int, budget: int):
    """Aggregated terms {(j_1..j_h): total row count} for the Hankel trace.

    Keys are signed offsets (mirrored anti-diagonals carry distinct
    values), stored sorted since the value product is symmetric.
    """
    _check_budget(n, h, budget)
    terms: dict[tuple[int, ...], int] = {}
    even = h % 2 == 0
    for prefix in product(range(-(n - 1), n), repeat=h - 1):
        balt = 0
        bmin = 0
        bmax = 0
        sign = 1
        for j in prefix:
            sign = -sign
            balt += sign * j
            bmin = min(bmin, balt)
            bmax = max(bmax, balt)
        sign_last = 1 if even else -1
        if even:
            # alternating sum must vanish: balt + j_h = 0
            last = -balt
            if abs(last) >= n:
                continue
            bfin = balt + sign_last * last  # = 0
            lo = max(1, 1 + max(bmax, bfin) - shift)
            hi = min(n, n + min(bmin, bfin) - shift)
            count = hi - lo + 1
            if count <= 0:
                continue
            key = tuple(sorted(prefix + (last,)))
            terms[key] = terms.get(key, 0) + count
        else:
            for i in range(1, n + 1):
                c = 2 * i - 1 - n
                last = balt - c  # from balt - j_h = c
                if abs(last) >= n:
                    continue
                ok = True
                for b in (bmin, bmax, c):
                    pos = i - b + shift
                    if not 1 <= pos <= n:
                        ok = False
                        break
                if not ok:
                    continue
                key = tuple(sorted(prefix + (last,)))
                terms[key] = terms.get(key, 0) + 1
    return tuple(terms.items())


def trace_formula_hankel(
    x: Sequence,
    n: int,
    h: int,
    budget: int = DEFAULT_TRACE_BUDGET,
    index_shift: int = 0,
):
    """tr(M^h) of the unscaled symmetric Hankel matrix on a two-sided x.

    ``x`` has length 2n-1 and position t holds the value at anti-diagonal
    index t - (n - 1), matching ``build_hankel``.  Exact when fed ints or
    Fractions.
    """
    if n < 1 or h < 1:
        raise InvalidArgumentError("need n >= 1 and h >= 1")
    if len(x) != 2 * n - 1:
        raise InvalidArgumentError(f"need exactly 2n-1 = {2 * n - 1} values")
    off = n - 1
    total = 0
    for key, count in _hankel_terms(n, h, index_shift, budget):
        total += count * math.prod(x[t + off] for t in key)
    return total


def dense_power_trace(x: Sequence, n: int, h: int, kind: MatrixKind):
    """tr(M^h) by literal matrix assembly and repeated multiplication.

    Independent of the offset-vector formulas; exact over ints and
    Fractions.  Conventions match ``trace_formula_toeplitz`` and
    ``trace_formula_hankel``.
    """
    kind = MatrixKind(kind)
    if n < 1 or h < 1:
        raise InvalidArgumentError("need n >= 1 and h >= 1")
    if kind == MatrixKind.TOEPLITZ:
        if len(x) < n:
            raise InvalidArgumentError(f"need at least n = {n} values")
        mat = [[x[abs(a - b)] for b in range(n)] for a in range(n)]
    else:
        if len(x) != 2 * n - 1:
            raise InvalidArgumentError(f"need exactly 2n-1 = {2 * n - 1} values")
        mat = [[x[2 * (n - 1) - a - b] for b in range(n)] for a in range(n)]
    acc = mat
    for _ in range(h - 1):
        acc = [
            [sum(acc[a][k] * mat[k][b] for k in range(n)) for b in range(n)]
            for a in range(n)
        ]
    return sum(acc[a][a] for a in range(n))
