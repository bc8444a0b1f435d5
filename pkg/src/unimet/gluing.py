"""Metric extension off a subset and adjunction (attaching) spaces.

``extend_metric`` solves: given a metric D on a subset A of a metric space
X, produce a metric on all of X restricting to D exactly.  It pairs two
pseudo-metrics by pointwise max: the sup of clamped one-point Lipschitz
extensions of the coordinate functions D(., a), which restricts to D, and
the quotient metric of X with A collapsed, scaled into [0, 1], which is
positive off A.

``adjunction_space`` attaches X to Y along a map f on A: it equips the
disjoint union with a metric making f 1-Lipschitz (by default the capped
extension of d_X + d_Y(f., f.)), glues the graph classes, and certifies the
three-hop identity, the isometry of Y inside the result, and the positive
clearance of X - A from the attached part.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple

from .combinators import mcshane_extend
from .errors import PreconditionError, StructuralError
from .quotients import GluedUnion, glue_parts, quotient_by_discrete_family
from .scalars import ONE, ZERO, Scalar, ScalarLike, as_scalar
from .spaces import (
    FiniteMetricSpace,
    as_mapping,
    check_metric_axioms,
    ensure_diameter_at_most,
    ensure_metric,
)


def _clean_subset(space: FiniteMetricSpace, subset: Iterable[int], what: str) -> tuple:
    idxs = tuple(sorted(set(subset)))
    if not idxs:
        raise PreconditionError(f"{what}: the subset must be nonempty")
    for a in idxs:
        if not isinstance(a, int) or not 0 <= a < space.n:
            raise StructuralError(f"{what}: subset index {a} out of range")
    return idxs


def _partial_matrix(partial, size: int, what: str) -> tuple:
    if isinstance(partial, FiniteMetricSpace):
        rows = partial.dist
    else:
        rows = tuple(tuple(as_scalar(v) for v in row) for row in partial)
    if len(rows) != size or any(len(r) != size for r in rows):
        raise StructuralError(f"{what}: partial metric must be {size}x{size}")
    probe = FiniteMetricSpace(tuple(range(size)), rows)
    ensure_metric(probe, f"{what}: partial metric")
    return rows


def extend_metric(
    space: FiniteMetricSpace,
    subset: Iterable[int],
    partial,
) -> FiniteMetricSpace:
    """Extend a metric D given on a subset A to all of X, exactly.

    The result restricts to D on A (checked), is a metric on X (checked),
    and has diameter at most max(diam D, 1).  The extension is the pointwise
    max of the coordinate construction sup_a |D~(x, a) - D~(y, a)| (each
    D~(., a) a clamped Lipschitz extension of D(., a)) with the collapsed
    quotient metric scaled into [0, 1]; the first part carries D, the second
    separates points outside A.
    """
    ensure_metric(space, "extend_metric")
    A = _clean_subset(space, subset, "extend_metric")
    D = _partial_matrix(partial, len(A), "extend_metric")
    pos = {a: k for k, a in enumerate(A)}
    diam_d = max((D[i][j] for i in range(len(A)) for j in range(len(A))), default=ZERO)

    # Lipschitz constant of the coordinate functions relative to d_X
    L = ONE
    for i, a in enumerate(A):
        for j, b in enumerate(A):
            if a == b:
                continue
            ratio = D[i][j] / space.d(a, b)
            if ratio > L:
                L = ratio

    coords = []
    for i, a in enumerate(A):
        values = {b: D[i][pos[b]] for b in A}
        extended = mcshane_extend(space, A, values, L)
        coords.append([v if v <= diam_d else diam_d for v in extended])

    quotient = quotient_by_discrete_family(space, [A]) if len(A) < space.n else None
    if quotient is not None:
        q_class = quotient.chain.surjection.class_of
        q_diam = quotient.space.diameter()
        q_scale = ONE / q_diam if q_diam > 1 else ONE
    rows = []
    for x in range(space.n):
        row = []
        for y in range(space.n):
            best = ZERO
            for coord in coords:
                gap = abs(coord[x] - coord[y])
                if gap > best:
                    best = gap
            if quotient is not None:
                q = quotient.space.d(q_class[x], q_class[y]) * q_scale
                if q > best:
                    best = q
            row.append(best)
        rows.append(tuple(row))
    result = FiniteMetricSpace(space.points, tuple(rows))
    for a in A:
        for b in A:
            if result.d(a, b) != D[pos[a]][pos[b]]:
                raise PreconditionError(
                    "extension failed to restrict to the given metric at "
                    f"({space.points[a]!r}, {space.points[b]!r})"
                )
    report = check_metric_axioms(result)
    if not report.ok:
        raise PreconditionError(f"extension failed the metric axioms: {report.violations[0]}")
    return result


@dataclass(frozen=True)
class AdjunctionResult:
    """Attached space with its computed certificates.

    ``space`` is the quotient with the three-hop metric; ``x_class`` and
    ``y_class`` locate the images of the original points.  ``clearance``
    gives, for each X point, its extension distance to the subset; the
    positivity certificate asserts every class distance from [x], x outside
    the subset, to any attached class is at least that clearance.
    """

    space: FiniteMetricSpace
    extension: FiniteMetricSpace
    x_class: tuple
    y_class: tuple
    clearance: tuple
    d3_equals_dinf: bool
    metric_ok: bool
    y_isometric: bool
    positivity_ok: bool

    def all_certified(self) -> bool:
        return (
            self.d3_equals_dinf
            and self.metric_ok
            and self.y_isometric
            and self.positivity_ok
        )


def adjunction_space(
    space: FiniteMetricSpace,
    subset: Iterable[int],
    target: FiniteMetricSpace,
    attaching,
    cross: Optional[ScalarLike] = None,
    extension: Optional[FiniteMetricSpace] = None,
) -> AdjunctionResult:
    """Attach ``space`` to ``target`` along a map defined on the subset.

    Default route (no explicit extension): both spaces need diameter <= 1;
    the union metric on the X side is the extension of
    D(a, b) = d_X(a, b) + d_Y(f(a), f(b)) capped at 1, and cross pairs sit
    at distance 1.  With an explicit extension (a metric on X's points
    making f 1-Lipschitz, checked), the cross constant defaults to
    1 + diam(extension) + diam(target) so cross hops never shorten chains.

    The returned certificates are computed on the instance: the three-hop
    chain distance equals the chain limit, it is a metric, the target embeds
    isometrically, and points of X off the subset keep positive clearance
    from every attached class.
    """
    ensure_metric(space, "adjunction_space")
    ensure_metric(target, "adjunction_space target")
    A = _clean_subset(space, subset, "adjunction_space")
    f = as_mapping(attaching)
    if set(f.keys()) != set(A):
        raise PreconditionError("attaching map must be defined exactly on the subset")
    for a, y in f.items():
        if not isinstance(y, int) or not 0 <= y < target.n:
            raise StructuralError(f"attaching image {y} out of range")

    if extension is None:
        ensure_diameter_at_most(space, ONE, "adjunction_space")
        ensure_diameter_at_most(target, ONE, "adjunction_space target")
        pos = {a: k for k, a in enumerate(A)}
        D = [
            [space.d(a, b) + target.d(f[a], f[b]) for b in A]
            for a in A
        ]
        raw = extend_metric(space, A, D)
        capped = tuple(
            tuple(v if v <= 1 else ONE for v in row) for row in raw.dist
        )
        ext = FiniteMetricSpace(space.points, capped)
        cross_val = ONE if cross is None else as_scalar(cross)
    else:
        if extension.n != space.n:
            raise StructuralError("extension must live on the points of the space")
        ensure_metric(extension, "adjunction_space extension")
        ext = extension
        cross_val = (
            ONE + ext.diameter() + target.diameter()
            if cross is None
            else as_scalar(cross)
        )
    for a in A:
        for b in A:
            if target.d(f[a], f[b]) > ext.d(a, b):
                raise PreconditionError(
                    "attaching map is not 1-Lipschitz for the union metric at "
                    f"({space.points[a]!r}, {space.points[b]!r})"
                )

    groups = {}
    for a in A:
        groups.setdefault(f[a], []).append(a)
    identifications = [
        tuple([(1, y)] + [(0, a) for a in sorted(members)])
        for y, members in sorted(groups.items())
    ]
    glued = glue_parts([ext, target], identifications, cross_val, 3)

    x_class = glued.class_of_part[0]
    y_class = glued.class_of_part[1]
    result_space = FiniteMetricSpace(
        glued.space.points, glued.space.dist, pseudo=not glued.is_metric()
    )
    y_isometric = True
    for i in range(target.n):
        for j in range(target.n):
            if result_space.d(y_class[i], y_class[j]) != target.d(i, j):
                y_isometric = False
    clearance = tuple(
        min(ext.d(x, a) for a in A) for x in range(space.n)
    )
    positivity_ok = True
    attached_classes = sorted(set(y_class))
    for x in range(space.n):
        if x in set(A):
            continue
        for q in attached_classes:
            if result_space.d(x_class[x], q) < clearance[x] or clearance[x] <= 0:
                positivity_ok = False
    return AdjunctionResult(
        result_space,
        ext,
        x_class,
        y_class,
        clearance,
        glued.dn_equals_dinf,
        glued.is_metric(),
        y_isometric,
        positivity_ok,
    )
