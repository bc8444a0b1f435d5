"""Cones and joins over finite metric spaces on rational parameter grids.

The cone places the apex at t = 1 over a base sampled at grid values in
[0, 1]; its two-case distance is the two-hop quotient metric of the l1
product with the top slice collapsed (checked against that construction).
The join samples X x Y x [-1, 1]; the X factor survives at t = -1, the Y
factor at t = +1, and the four-case distance realizes the three-hop chains
through the two collapsed ends.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from .combinators import product_metric
from .errors import PreconditionError, StructuralError
from .quotients import GluedUnion, glue_parts, quotient_by_discrete_family
from .scalars import ONE, ZERO, Scalar, ScalarLike, as_scalar
from .spaces import FiniteMetricSpace, ensure_diameter_at_most, ensure_metric

TWO = Fraction(2)


def _clean_grid(grid, low: Scalar, high: Scalar, required: Sequence[Scalar]) -> tuple:
    values = sorted({as_scalar(t) for t in grid})
    if not values:
        raise StructuralError("parameter grid must be nonempty")
    for t in values:
        if not low <= t <= high:
            raise StructuralError(f"grid value {t} outside [{low}, {high}]")
    for needed in required:
        if needed not in values:
            raise StructuralError(f"grid must contain {needed}")
    return tuple(values)


def interval_space(grid: Sequence[ScalarLike]) -> FiniteMetricSpace:
    """Grid points of a real interval with the absolute-value metric."""
    values = tuple(sorted({as_scalar(t) for t in grid}))
    rows = tuple(tuple(abs(a - b) for b in values) for a in values)
    return FiniteMetricSpace(values, rows)


# ---- cone ----


@dataclass(frozen=True)
class ConeSpace:
    """Cone over a base space, sampled at a t grid with the apex at t = 1.

    Points are ("seg", base label, t) for grid values t < 1, base-major,
    then ("apex",) last.
    """

    space: FiniteMetricSpace
    base: FiniteMetricSpace
    t_grid: tuple

    @property
    def inner_ts(self) -> tuple:
        return tuple(t for t in self.t_grid if t < 1)

    @property
    def apex_index(self) -> int:
        return self.base.n * len(self.inner_ts)

    def seg_index(self, base_index: int, t: Scalar) -> int:
        ts = self.inner_ts
        return base_index * len(ts) + ts.index(t)

    def class_index(self, base_index: int, t: Scalar) -> int:
        return self.apex_index if t == 1 else self.seg_index(base_index, t)


def cone_distance(
    base: FiniteMetricSpace, i: int, t: Scalar, j: int, s: Scalar
) -> Scalar:
    """Two-case cone distance: around the base or through the apex."""
    through_base = base.d(i, j) + abs(t - s)
    through_apex = (1 - t) + (1 - s)
    return through_base if through_base <= through_apex else through_apex


def cone_metric(space: FiniteMetricSpace, t_grid) -> ConeSpace:
    """Cone over a space of diameter <= 2 (so the base slice is isometric).

    d([(x,t)], [(x',t')]) = min(d(x,x') + |t-t'|, (1-t) + (1-t')), with the
    whole slice t = 1 collapsed to the apex.
    """
    ensure_metric(space, "cone_metric")
    ensure_diameter_at_most(space, TWO, "cone_metric")
    grid = _clean_grid(t_grid, ZERO, ONE, (ZERO, ONE))
    inner = tuple(t for t in grid if t < 1)
    points = [("seg", space.points[i], t) for i in range(space.n) for t in inner]
    points.append(("apex",))
    size = len(points)
    rows = []
    for a in range(size):
        row = []
        for b in range(size):
            if a == size - 1 and b == size - 1:
                row.append(ZERO)
            elif a == size - 1:
                j, s = divmod(b, len(inner))
                row.append(ONE - inner[s])
            elif b == size - 1:
                i, t = divmod(a, len(inner))
                row.append(ONE - inner[t])
            else:
                i, tp = divmod(a, len(inner))
                j, sp = divmod(b, len(inner))
                row.append(cone_distance(space, i, inner[tp], j, inner[sp]))
        rows.append(tuple(row))
    return ConeSpace(FiniteMetricSpace(tuple(points), tuple(rows)), space, grid)


def cone_quotient_check(space: FiniteMetricSpace, t_grid) -> Scalar:
    """Largest gap between the cone formula and the collapsed-slice quotient.

    Builds the l1 product of the base with the grid interval, collapses the
    top slice through the two-hop quotient, and compares entrywise with the
    cone distances.  Exactness means a return value of 0.
    """
    cone = cone_metric(space, t_grid)
    grid = cone.t_grid
    product = product_metric(space, interval_space(grid), "l1")
    top = [i * len(grid) + len(grid) - 1 for i in range(space.n)]
    quotient = quotient_by_discrete_family(product, [top])
    class_of = quotient.chain.surjection.class_of

    def q_index(cone_idx: int) -> int:
        if cone_idx == cone.apex_index:
            return class_of[top[0]]
        i, tp = divmod(cone_idx, len(cone.inner_ts))
        t = cone.inner_ts[tp]
        return class_of[i * len(grid) + grid.index(t)]

    worst = ZERO
    for a in range(cone.space.n):
        for b in range(cone.space.n):
            gap = abs(cone.space.d(a, b) - quotient.space.d(q_index(a), q_index(b)))
            if gap > worst:
                worst = gap
    return worst


# ---- join ----


@dataclass(frozen=True)
class JoinSpace:
    """Join of two spaces sampled over a grid in [-1, 1].

    The X factor survives at t = -1 and the Y factor at t = +1.  Points are
    ordered: ("xend", x label) per X point, ("yend", y label) per Y point,
    then ("seg", x label, y label, t) for interior grid values, x-major.
    """

    space: FiniteMetricSpace
    left: FiniteMetricSpace
    right: FiniteMetricSpace
    t_grid: tuple

    @property
    def inner_ts(self) -> tuple:
        return tuple(t for t in self.t_grid if -1 < t < 1)

    def xend_index(self, i: int) -> int:
        return i

    def yend_index(self, j: int) -> int:
        return self.left.n + j

    def seg_index(self, i: int, j: int, t: Scalar) -> int:
        ts = self.inner_ts
        return (
            self.left.n
            + self.right.n
            + (i * self.right.n + j) * len(ts)
            + ts.index(t)
        )

    def class_index(self, i: int, j: int, t: Scalar) -> int:
        if t == -1:
            return self.xend_index(i)
        if t == 1:
            return self.yend_index(j)
        return self.seg_index(i, j, t)


def join_distance(
    left: FiniteMetricSpace,
    right: FiniteMetricSpace,
    a: Tuple[Optional[int], Optional[int], Scalar],
    b: Tuple[Optional[int], Optional[int], Scalar],
) -> Scalar:
    """Four-case join distance between class descriptors.

    A descriptor is (x index or None, y index or None, t); None marks the
    collapsed coordinate at an end, whose distance term drops out (the
    infimum over representatives picks equal values there).
    """
    xa, ya, ta = a
    xb, yb, tb = b
    term_x = left.d(xa, xb) if xa is not None and xb is not None else ZERO
    term_y = right.d(ya, yb) if ya is not None and yb is not None else ZERO
    direct = term_x + term_y + abs(ta - tb)
    via_bottom = term_x + (ta + 1) + (tb + 1)
    via_top = term_y + (1 - ta) + (1 - tb)
    via_both = (2 - abs(ta - tb)) + 2
    return min(direct, via_bottom, via_top, via_both)


def join_metric(
    left: FiniteMetricSpace, right: FiniteMetricSpace, t_grid
) -> JoinSpace:
    """Join of two spaces of diameter <= 2 over a [-1, 1] grid.

    The metric realizes the cheapest of: a direct product hop, a detour
    through either collapsed end, or a crossing using both ends.
    """
    ensure_metric(left, "join_metric left factor")
    ensure_metric(right, "join_metric right factor")
    ensure_diameter_at_most(left, TWO, "join_metric left factor")
    ensure_diameter_at_most(right, TWO, "join_metric right factor")
    grid = _clean_grid(t_grid, -ONE, ONE, (-ONE, ONE))
    inner = tuple(t for t in grid if -1 < t < 1)
    descriptors: list = []
    points: list = []
    for i in range(left.n):
        points.append(("xend", left.points[i]))
        descriptors.append((i, None, -ONE))
    for j in range(right.n):
        points.append(("yend", right.points[j]))
        descriptors.append((None, j, ONE))
    for i in range(left.n):
        for j in range(right.n):
            for t in inner:
                points.append(("seg", left.points[i], right.points[j], t))
                descriptors.append((i, j, t))
    rows = []
    for da in descriptors:
        rows.append(tuple(join_distance(left, right, da, db) for db in descriptors))
    return JoinSpace(
        FiniteMetricSpace(tuple(points), tuple(rows)), left, right, grid
    )


# ---- the amalgam identity ----


@dataclass(frozen=True)
class JoinAmalgamReport:
    """Comparison of the join with the glued union of cone products."""

    join: JoinSpace
    amalgam: GluedUnion
    equal: bool
    max_discrepancy: Scalar
    two_hops_suffice: bool


def join_amalgam_equality(
    left: FiniteMetricSpace, right: FiniteMetricSpace, t_grid
) -> JoinAmalgamReport:
    """Check that the join equals CX x Y and X x CY glued along X x Y.

    Both cone products carry l1 metrics; they are glued along the middle
    slice t = 0 with no direct cross hops, so chains pivot at glued classes.
    The grid must contain -1, 0 and 1.  The report compares the glued
    two-hop metric with the join distance entrywise.
    """
    join = join_metric(left, right, t_grid)
    grid = join.t_grid
    if ZERO not in grid:
        raise StructuralError("the amalgam comparison needs 0 in the grid")
    grid_pos = tuple(t for t in grid if t >= 0)
    grid_neg_u = tuple(sorted({-t for t in grid if t <= 0}))
    cone_x = cone_metric(left, grid_pos)
    cone_y = cone_metric(right, grid_neg_u)
    part_top = product_metric(cone_x.space, right, "l1")
    part_bottom = product_metric(left, cone_y.space, "l1")

    def top_index(i: int, t: Scalar, j: int) -> int:
        return cone_x.class_index(i, t) * right.n + j

    def bottom_index(i: int, j: int, t: Scalar) -> int:
        return i * cone_y.space.n + cone_y.class_index(j, -t)

    identifications = []
    for i in range(left.n):
        for j in range(right.n):
            identifications.append(
                ((0, top_index(i, ZERO, j)), (1, bottom_index(i, j, ZERO)))
            )
    glued = glue_parts([part_top, part_bottom], identifications, None, 2)
    class_of_top = glued.class_of_part[0]
    class_of_bottom = glued.class_of_part[1]

    def amalgam_class(i: int, j: int, t: Scalar) -> int:
        if t > 0:
            return class_of_top[top_index(i, t, j)]
        if t < 0:
            return class_of_bottom[bottom_index(i, j, t)]
        return class_of_top[top_index(i, ZERO, j)]

    worst = ZERO
    for i in range(left.n):
        for j in range(right.n):
            for t in grid:
                for i2 in range(left.n):
                    for j2 in range(right.n):
                        for s in grid:
                            a = join.class_index(i, j, t)
                            b = join.class_index(i2, j2, s)
                            ga = amalgam_class(i, j, t)
                            gb = amalgam_class(i2, j2, s)
                            gap = abs(join.space.d(a, b) - glued.space.d(ga, gb))
                            if gap > worst:
                                worst = gap
    return JoinAmalgamReport(
        join, glued, worst == 0, worst, glued.dn_equals_dinf
    )
