"""Exact rational volumes of the small indicator polytopes.

Every constraint is affine with integer coefficients, so for dimension
up to three the polytope volume can be computed exactly with Fractions:
enumerate vertices as intersections of constraint hyperplanes, group
them into facets, order each facet boundary exactly, and fan into
tetrahedra around the centroid.  This is the independent oracle for the
small-order volume factors; the Monte Carlo and grid estimators in
``moments`` are checked against it.
"""
from __future__ import annotations

from fractions import Fraction
from functools import cmp_to_key
from itertools import combinations
from math import gcd
from typing import Sequence

from .combinatorics import (
    PairPartition,
    cumulative_sign_rows,
    enumerate_oe_pair_partitions,
    enumerate_pair_partitions,
)
from .ensemble import MatrixKind
from .errors import InvalidArgumentError

Halfspace = tuple[tuple[int, ...], int]  # coeffs . x <= rhs, exact integers
Point = tuple[Fraction, ...]


def _solve_square(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]):
    """Solve an exact square linear system; None when singular."""
    d = len(rows)
    aug = [list(rows[i]) + [rhs[i]] for i in range(d)]
    for col in range(d):
        piv = next((r for r in range(col, d) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = aug[col][col]
        aug[col] = [x / inv for x in aug[col]]
        for r in range(d):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return tuple(aug[i][d] for i in range(d))


def _dot(a: Sequence[int], x: Point) -> Fraction:
    return sum((Fraction(ai) * xi for ai, xi in zip(a, x)), Fraction(0))


def polytope_vertices(halfspaces: Sequence[Halfspace], dim: int) -> list[Point]:
    """Vertices of the polytope {x : A x <= b} by exhaustive intersection."""
    frs = [([Fraction(c) for c in a], Fraction(b)) for a, b in halfspaces]
    verts: set[Point] = set()
    for combo in combinations(range(len(frs)), dim):
        pt = _solve_square([frs[i][0] for i in combo], [frs[i][1] for i in combo])
        if pt is None:
            continue
        if all(_dot(a, pt) <= b for a, b in halfspaces):
            verts.add(pt)
    return sorted(verts)


def _order_convex(points: list[tuple[Fraction, Fraction]]) -> list[int]:
    """Indices of 2-d points in counterclockwise order around their centroid.

    The points must be in convex position (true for polytope vertices).
    """
    k = len(points)
    cx = sum(p[0] for p in points) / k
    cy = sum(p[1] for p in points) / k
    rel = [(p[0] - cx, p[1] - cy) for p in points]

    def half(v: tuple[Fraction, Fraction]) -> int:
        return 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1

    def cmp(i: int, j: int) -> int:
        a, b = rel[i], rel[j]
        ha, hb = half(a), half(b)
        if ha != hb:
            return -1 if ha < hb else 1
        cross = a[0] * b[1] - a[1] * b[0]
        if cross > 0:
            return -1
        if cross < 0:
            return 1
        return 0

    return sorted(range(k), key=cmp_to_key(cmp))


def _polygon_area(points: list[tuple[Fraction, Fraction]]) -> Fraction:
    order = _order_convex(points)
    area = Fraction(0)
    for t in range(len(order)):
        x1, y1 = points[order[t]]
        x2, y2 = points[order[(t + 1) % len(order)]]
        area += x1 * y2 - x2 * y1
    return abs(area) / 2


def _plane_key(a: Sequence[int], b_num: int, b_den: int) -> tuple:
    """Canonical key of the hyperplane a.x = b (orientation removed)."""
    ints = [x * b_den for x in a] + [-b_num]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g:
        ints = [x // g for x in ints]
    lead = next((x for x in ints if x != 0), 1)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(ints)


def polytope_volume(halfspaces: Sequence[Halfspace], dim: int) -> Fraction:
    """Exact volume for dim in {1, 2, 3}; zero when not full-dimensional."""
    if dim not in (1, 2, 3):
        raise InvalidArgumentError("exact volume supports dimensions 1..3 only")
    verts = polytope_vertices(halfspaces, dim)
    if len(verts) < dim + 1:
        return Fraction(0)
    if dim == 1:
        xs = [v[0] for v in verts]
        return max(xs) - min(xs)
    if dim == 2:
        return _polygon_area([(v[0], v[1]) for v in verts])

    k = len(verts)
    centroid = tuple(sum(v[i] for v in verts) / k for i in range(3))
    volume = Fraction(0)
    seen_planes: set[tuple] = set()
    for a, b in halfspaces:
        key = _plane_key(a, b, 1)
        if key in seen_planes:
            continue
        seen_planes.add(key)
        face = [v for v in verts if _dot(a, v) == b]
        if len(face) < 3:
            continue
        p0 = face[0]
        e1 = tuple(face[1][i] - p0[i] for i in range(3))
        af = (Fraction(a[0]), Fraction(a[1]), Fraction(a[2]))
        e2 = (
            af[1] * e1[2] - af[2] * e1[1],
            af[2] * e1[0] - af[0] * e1[2],
            af[0] * e1[1] - af[1] * e1[0],
        )
        coords = []
        for v in face:
            d = tuple(v[i] - p0[i] for i in range(3))
            coords.append(
                (sum(d[i] * e1[i] for i in range(3)), sum(d[i] * e2[i] for i in range(3)))
            )
        order = _order_convex(coords)
        ordered = [face[i] for i in order]
        for t in range(1, len(ordered) - 1):
            u = tuple(ordered[0][i] - centroid[i] for i in range(3))
            v1 = tuple(ordered[t][i] - centroid[i] for i in range(3))
            v2 = tuple(ordered[t + 1][i] - centroid[i] for i in range(3))
            det = (
                u[0] * (v1[1] * v2[2] - v1[2] * v2[1])
                - u[1] * (v1[0] * v2[2] - v1[2] * v2[0])
                + u[2] * (v1[0] * v2[1] - v1[1] * v2[0])
            )
            volume += abs(det) / 6
    return volume


def partition_polytope(pi: PairPartition, kind: MatrixKind) -> list[Halfspace]:
    """Halfspaces of the indicator polytope of one pair partition.

    Variables are (z0, z_1..z_p) with z0 in [0,1], z_t in [-1,1], and for
    every proper prefix s the running sum z0 +/- sum eps z must stay in
    [0,1].  The final prefix is omitted: its coefficient row is zero.
    """
    p = pi.p
    dim = p + 1
    hs: list[Halfspace] = []

    def bound(coefs: Sequence[int], lo: int, hi: int) -> None:
        hs.append((tuple(coefs), hi))
        hs.append((tuple(-c for c in coefs), -lo))

    e0 = [1] + [0] * p
    bound(e0, 0, 1)
    for t in range(p):
        et = [0] * dim
        et[1 + t] = 1
        bound(et, -1, 1)
    rows = cumulative_sign_rows(pi, alternating=(kind == MatrixKind.HANKEL))
    for row in rows[:-1]:
        if all(c == 0 for c in row):
            continue
        bound([1, *row], 0, 1)
    return hs


def partition_volume_exact(pi: PairPartition, kind: MatrixKind) -> Fraction:
    """Exact indicator-polytope volume of one pair partition (p <= 2)."""
    if pi.p > 2:
        raise InvalidArgumentError("exact volumes are implemented for p <= 2")
    return polytope_volume(partition_polytope(pi, kind), pi.p + 1)


def gamma_exact(kind: MatrixKind, p: int) -> Fraction:
    """Exact volume factor of the 2p-th limiting moment, p in {1, 2}.

    Sums the indicator-polytope volumes over all pair partitions for the
    Toeplitz kind and over the odd-even pair partitions for the Hankel
    kind.
    """
    if p not in (1, 2):
        raise InvalidArgumentError("exact gamma is implemented for p in {1, 2}")
    kind = MatrixKind(kind)
    if kind == MatrixKind.TOEPLITZ:
        parts = enumerate_pair_partitions(p)
    else:
        parts = enumerate_oe_pair_partitions(p)
    return sum((partition_volume_exact(pi, kind) for pi in parts), Fraction(0))
