"""Product, union, hyperspace, and extension combinators on finite spaces.

Everything here is exact.  The one deliberate wrinkle is the "l2" product,
which returns squared distances (rationals) because square roots leave the
exact field; its matrix is not a metric in general and is marked pseudo-unsafe
by documentation rather than by flag, since squared distances still satisfy
symmetry and positivity.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import PreconditionError, StructuralError
from .scalars import ONE, ZERO, Scalar, ScalarLike, as_scalar
from .sequences import SequencePoint, sup_distance
from .spaces import FiniteMetricSpace, as_mapping, ensure_metric

PRODUCT_NORMS = ("l1", "linf", "l2")

# Hyperspaces grow as 2^n; refuse grounds larger than this many points.
HYPERSPACE_CAP = 12


def product_metric(
    left: FiniteMetricSpace,
    right: FiniteMetricSpace,
    norm: str = "linf",
) -> FiniteMetricSpace:
    """Product space on pairs (p, q), left index varying slowest.

    norm "l1" sums the factor distances, "linf" takes their max, and "l2"
    returns the *squared* Euclidean combination d_X^2 + d_Y^2 so the result
    stays rational; the l2 matrix is a squared metric, not a metric.
    """
    if norm not in PRODUCT_NORMS:
        raise StructuralError(f"unknown product norm {norm!r}; use one of {PRODUCT_NORMS}")
    points = []
    for p in left.points:
        for q in right.points:
            points.append((p, q))
    n_r = right.n
    size = left.n * n_r
    rows = []
    for a in range(size):
        i, j = divmod(a, n_r)
        row = []
        for b in range(size):
            k, l = divmod(b, n_r)
            dx = left.d(i, k)
            dy = right.d(j, l)
            if norm == "l1":
                row.append(dx + dy)
            elif norm == "linf":
                row.append(dx if dx >= dy else dy)
            else:
                row.append(dx * dx + dy * dy)
        rows.append(tuple(row))
    return FiniteMetricSpace(tuple(points), tuple(rows), pseudo=left.pseudo or right.pseudo)


def _diameter_witness(space: FiniteMetricSpace, bound: Scalar):
    for i in range(space.n):
        for j in range(i + 1, space.n):
            if space.d(i, j) > bound:
                return (space.points[i], space.points[j], space.d(i, j))
    return None


def disjoint_union_metric(
    left: FiniteMetricSpace,
    right: FiniteMetricSpace,
) -> FiniteMetricSpace:
    """Disjoint union with every cross distance exactly 1.

    Both factors must have diameter at most 1, otherwise the triangle
    inequality through the other side fails; violations are reported with the
    offending pair.
    """
    for name, side in (("left", left), ("right", right)):
        bad = _diameter_witness(side, ONE)
        if bad is not None:
            raise PreconditionError(
                f"disjoint union needs diameter <= 1; {name} factor has "
                f"d({bad[0]!r}, {bad[1]!r}) = {bad[2]}"
            )
    points = tuple(("L", p) for p in left.points) + tuple(("R", q) for q in right.points)
    n_l = left.n
    size = n_l + right.n
    rows = []
    for a in range(size):
        row = []
        for b in range(size):
            if a < n_l and b < n_l:
                row.append(left.d(a, b))
            elif a >= n_l and b >= n_l:
                row.append(right.d(a - n_l, b - n_l))
            else:
                row.append(ONE)
        rows.append(tuple(row))
    return FiniteMetricSpace(points, tuple(rows), pseudo=left.pseudo or right.pseudo)


def weighted_sup_metric(levels: Sequence[FiniteMetricSpace]) -> FiniteMetricSpace:
    """Countable-product style metric on the full product of the levels.

    d((x_i), (y_i)) = max_i 2^{-i} d_i(x_i, y_i), levels weighted from i = 1.
    Each level must have diameter at most 1 so the weights dominate.
    """
    if not levels:
        raise StructuralError("weighted_sup_metric needs at least one level")
    for pos, level in enumerate(levels):
        bad = _diameter_witness(level, ONE)
        if bad is not None:
            raise PreconditionError(
                f"weighted sup needs diameter <= 1; level {pos} has "
                f"d({bad[0]!r}, {bad[1]!r}) = {bad[2]}"
            )
    index_tuples = [()]
    for level in levels:
        index_tuples = [t + (i,) for t in index_tuples for i in range(level.n)]
    points = tuple(
        tuple(levels[k].points[t[k]] for k in range(len(levels))) for t in index_tuples
    )
    weights = [Fraction(1, 2 ** (k + 1)) for k in range(len(levels))]
    rows = []
    for ta in index_tuples:
        row = []
        for tb in index_tuples:
            best = ZERO
            for k, level in enumerate(levels):
                val = weights[k] * level.d(ta[k], tb[k])
                if val > best:
                    best = val
            row.append(best)
        rows.append(tuple(row))
    return FiniteMetricSpace(points, tuple(rows), pseudo=any(l.pseudo for l in levels))


# ---- hyperspace ----


def _subset_labels(space: FiniteMetricSpace, mask: int) -> tuple:
    return tuple(space.points[i] for i in range(space.n) if mask >> i & 1)


def hausdorff_hyperspace(space: FiniteMetricSpace, cap: int = HYPERSPACE_CAP) -> FiniteMetricSpace:
    """Space of nonempty subsets under the Hausdorff distance capped at 1.

    Points are label tuples in index order; the metric is min(d_H, 1).  The
    construction enumerates all 2^n - 1 subsets, so grounds beyond ``cap``
    points are refused.
    """
    ensure_metric(space, "hausdorff_hyperspace")
    if space.n > cap:
        raise PreconditionError(
            f"hyperspace over {space.n} points exceeds the cap of {cap}"
        )
    n = space.n
    masks = list(range(1, 1 << n))
    # dist_to[mask][x] = d(x, subset mask)
    dist_to = {}
    for mask in masks:
        members = [i for i in range(n) if mask >> i & 1]
        dist_to[mask] = [min(space.d(x, m) for m in members) for x in range(n)]
    points = tuple(_subset_labels(space, mask) for mask in masks)
    rows = []
    for ma in masks:
        row = []
        for mb in masks:
            if ma == mb:
                row.append(ZERO)
                continue
            da = dist_to[mb]
            db = dist_to[ma]
            best = ZERO
            for i in range(n):
                if ma >> i & 1 and da[i] > best:
                    best = da[i]
                if mb >> i & 1 and db[i] > best:
                    best = db[i]
                if best >= 1:
                    best = ONE
                    break
            row.append(best)
        rows.append(tuple(row))
    return FiniteMetricSpace(points, tuple(rows))


def hausdorff_distance(space: FiniteMetricSpace, a: Iterable[int], b: Iterable[int]) -> Scalar:
    """Uncapped Hausdorff distance between two nonempty index sets."""
    sa = sorted(set(a))
    sb = sorted(set(b))
    if not sa or not sb:
        raise StructuralError("hausdorff_distance needs nonempty subsets")
    for idx in sa + sb:
        if not 0 <= idx < space.n:
            raise StructuralError(f"subset index {idx} out of range")
    d_a = max(min(space.d(x, y) for y in sb) for x in sa)
    d_b = max(min(space.d(x, y) for y in sa) for x in sb)
    return d_a if d_a >= d_b else d_b


# ---- embeddings and extensions ----


def kuratowski_embed(space: FiniteMetricSpace) -> list:
    """Isometric embedding into sequence space by distance coordinates.

    Point x maps to the sequence (d(x, p_0), d(x, p_1), ...) with tail 0.
    Requires diameter <= 1 so the image lives in the unit cube; rescale
    first if needed.  The embedding is exactly isometric for the sup norm.
    """
    ensure_metric(space, "kuratowski_embed", allow_pseudo=True)
    bad = _diameter_witness(space, ONE)
    if bad is not None:
        raise PreconditionError(
            f"kuratowski_embed needs diameter <= 1; got d({bad[0]!r}, {bad[1]!r}) = {bad[2]}"
        )
    out = []
    for x in range(space.n):
        support = tuple((i, space.d(x, i)) for i in range(space.n))
        out.append(SequencePoint(support, ZERO))
    return out


def mcshane_extend(
    space: FiniteMetricSpace,
    subset: Sequence[int],
    values,
    lipschitz: ScalarLike,
) -> list:
    """Extend an L-Lipschitz function off a subset, preserving the constant L.

    g'(x) = min over a in the subset of g(a) + L d(x, a).  The restriction to
    the subset is exactly g, and g' is L-Lipschitz on the whole space.
    """
    L = as_scalar(lipschitz)
    if L < 0:
        raise StructuralError("Lipschitz constant must be nonnegative")
    idxs = list(subset)
    if not idxs:
        raise PreconditionError("mcshane_extend needs a nonempty subset")
    seen = set()
    for a in idxs:
        if not isinstance(a, int) or not 0 <= a < space.n:
            raise StructuralError(f"subset index {a} out of range")
        if a in seen:
            raise StructuralError(f"duplicate subset index {a}")
        seen.add(a)
    if isinstance(values, Mapping):
        g = {a: as_scalar(values[a]) for a in idxs}
    else:
        vals = list(values)
        if len(vals) != len(idxs):
            raise StructuralError("values must align with the subset")
        g = {a: as_scalar(v) for a, v in zip(idxs, vals)}
    for a in idxs:
        for b in idxs:
            if abs(g[a] - g[b]) > L * space.d(a, b):
                raise PreconditionError(
                    f"values are not {L}-Lipschitz on the subset: "
                    f"|g({space.points[a]!r}) - g({space.points[b]!r})| = {abs(g[a] - g[b])} "
                    f"> {L * space.d(a, b)}"
                )
    out = []
    for x in range(space.n):
        out.append(min(g[a] + L * space.d(x, a) for a in idxs))
    return out
