"""Pair partitions, matched index vectors, and offset-vector counts.

The even limiting moments of the scaled Toeplitz and Hankel ensembles
factor into a volume term (see ``moments`` / ``exactvol``) and an integer
count of bounded offset vectors summing to zero, handled here.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterator, Sequence

from .errors import InvalidArgumentError, ResourceLimitError

DEFAULT_ENUM_BUDGET = 10**8


@dataclass(frozen=True)
class PairPartition:
    """A partition of {1, ..., 2p} into p blocks of size two.

    Blocks are stored canonically: each block as (leader, follower) with
    leader < follower, blocks sorted by leader.  ``epsilon`` is +1 on the
    first (leader) position of a block and -1 on the second; ``project``
    maps a position to the leader of its block.
    """

    p: int
    blocks: tuple[tuple[int, int], ...]
    _pos_to_block: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.p < 1:
            raise InvalidArgumentError("p must be >= 1")
        norm = tuple(sorted((min(r, s), max(r, s)) for r, s in self.blocks))
        object.__setattr__(self, "blocks", norm)
        if len(norm) != self.p:
            raise InvalidArgumentError("expected exactly p blocks")
        seen = [x for blk in norm for x in blk]
        if sorted(seen) != list(range(1, 2 * self.p + 1)):
            raise InvalidArgumentError("blocks must cover {1..2p} disjointly")
        lookup = [0] * (2 * self.p + 1)
        for t, (r, s) in enumerate(norm):
            lookup[r] = t
            lookup[s] = t
        object.__setattr__(self, "_pos_to_block", tuple(lookup))

    def block_of(self, ell: int) -> int:
        """Index (0-based) of the block containing position ell."""
        self._check_pos(ell)
        return self._pos_to_block[ell]

    def project(self, ell: int) -> int:
        """Leader of the block containing position ell."""
        self._check_pos(ell)
        return self.blocks[self._pos_to_block[ell]][0]

    def epsilon(self, ell: int) -> int:
        """+1 if ell is the leader of its block, -1 otherwise."""
        self._check_pos(ell)
        return 1 if self.blocks[self._pos_to_block[ell]][0] == ell else -1

    def is_odd_even(self) -> bool:
        """True when every block pairs an odd position with an even one."""
        return all((r + s) % 2 == 1 for r, s in self.blocks)

    def _check_pos(self, ell: int) -> None:
        if not 1 <= ell <= 2 * self.p:
            raise InvalidArgumentError(f"position {ell} outside 1..{2 * self.p}")


def enumerate_pair_partitions(p: int) -> list[PairPartition]:
    """All (2p-1)!! pair partitions of {1..2p}, in a fixed deterministic order."""
    if p < 1:
        raise InvalidArgumentError("p must be >= 1")

    def rec(avail: tuple[int, ...]) -> Iterator[tuple[tuple[int, int], ...]]:
        if not avail:
            yield ()
            return
        r = avail[0]
        for k in range(1, len(avail)):
            s = avail[k]
            rest = avail[1:k] + avail[k + 1 :]
            for tail in rec(rest):
                yield ((r, s),) + tail

    return [PairPartition(p, blocks) for blocks in rec(tuple(range(1, 2 * p + 1)))]


def enumerate_oe_pair_partitions(p: int) -> list[PairPartition]:
    """The p! pair partitions whose blocks each hold one odd and one even position."""
    if p < 1:
        raise InvalidArgumentError("p must be >= 1")
    odds = tuple(range(1, 2 * p + 1, 2))
    evens = tuple(range(2, 2 * p + 1, 2))
    out = []
    for perm in permutations(evens):
        out.append(PairPartition(p, tuple(zip(odds, perm))))
    return out


def cumulative_sign_rows(pi: PairPartition, alternating: bool = False) -> list[tuple[int, ...]]:
    """Cumulative coefficient rows of the indicator constraints of ``pi``.

    Row s (1-based) gives the coefficients of the block variables inside
    the s-th partial sum sum_{ell<=s} eps(ell) z_{block(ell)}.  With
    ``alternating`` the sign of every contribution is flipped, matching
    the Hankel-kind constraint written as z0 - sum(...).  The final row
    is always all zeros because the two positions of each block cancel.
    """
    p = pi.p
    rows: list[tuple[int, ...]] = []
    cur = [0] * p
    for ell in range(1, 2 * p + 1):
        coef = pi.epsilon(ell)
        if alternating:
            coef = -coef
        cur[pi.block_of(ell)] += coef
        rows.append(tuple(cur))
    return rows


def is_pm_pair_matched(v: Sequence[int]) -> bool:
    """True when the entries split into pairs of the form (a, -a), a != 0.

    Each absolute value must occur exactly twice, once with each sign.
    """
    if len(v) == 0:
        raise InvalidArgumentError("empty vector")
    if len(v) % 2:
        return False
    counts = Counter(v)
    abs_counts = Counter(abs(x) for x in v)
    for x in v:
        if x == 0 or abs_counts[abs(x)] != 2:
            return False
        if counts[x] != 1 or counts[-x] != 1:
            return False
    return True


def is_oe_pair_matched(v: Sequence[int]) -> bool:
    """True when each value occurs exactly twice, once at an odd and once at
    an even position (1-based)."""
    if len(v) == 0:
        raise InvalidArgumentError("empty vector")
    if len(v) % 2:
        return False
    positions: dict[int, list[int]] = {}
    for k, x in enumerate(v, start=1):
        positions.setdefault(x, []).append(k)
    for pos in positions.values():
        if len(pos) != 2 or (pos[0] + pos[1]) % 2 == 0:
            return False
    return True


def _check_pm(p: int, m: int) -> None:
    if p < 1:
        raise InvalidArgumentError("p must be >= 1")
    if m < 0:
        raise InvalidArgumentError("m must be >= 0")


def card_offsets_toeplitz(p: int, m: int) -> int:
    """#{d in [-m, m]^{2p} : d_1 + ... + d_{2p} = 0}, in closed form.

    Inclusion-exclusion on the generating function
    (x^{-m} + ... + x^{m})^{2p}; binomials outside their support count
    as zero.
    """
    _check_pm(p, m)
    h = 2 * p
    top = (2 * m * p) // (2 * m + 1)
    total = 0
    for ell in range(top + 1):
        upper = h + 2 * p * m - (2 * m + 1) * ell - 1
        term = math.comb(h, ell) * math.comb(upper, h - 1)
        total += -term if ell % 2 else term
    return total


def card_offsets_hankel(p: int, m: int) -> int:
    """#{d in [-m, m]^{2p} : alternating sum of d is 0}.

    Negating the odd-position coordinates is a bijection onto the plain
    zero-sum set, so the count equals ``card_offsets_toeplitz``.
    """
    _check_pm(p, m)
    return card_offsets_toeplitz(p, m)


def card_offsets_bruteforce(
    p: int, m: int, alternating: bool = False, budget: int = DEFAULT_ENUM_BUDGET
) -> int:
    """Count the same offset vectors by depth-first enumeration.

    Independent of the closed form; prunes any prefix whose partial sum
    cannot return to zero.  Raises ``ResourceLimitError`` when the full
    box (2m+1)^{2p} exceeds ``budget``.
    """
    _check_pm(p, m)
    h = 2 * p
    if (2 * m + 1) ** h > budget:
        raise ResourceLimitError(
            f"(2m+1)^(2p) = {(2 * m + 1) ** h} exceeds budget {budget}"
        )
    signs = [(-1) ** k if alternating else 1 for k in range(1, h + 1)]

    def rec(k: int, partial: int) -> int:
        rem = h - k
        if abs(partial) > rem * m:
            return 0
        if rem == 1:
            return 1
        s = signs[k]
        return sum(rec(k + 1, partial + s * d) for d in range(-m, m + 1))

    return rec(0, 0)
