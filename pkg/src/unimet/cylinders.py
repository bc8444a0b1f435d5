"""Mapping cylinders with exact metrics, and the uniform modulus function.

The cylinder glues X x I onto Y along (x, 1) -> f(x).  Its metric is the
three-hop adjunction distance for the drift-adjusted l1 product upstairs,
which closes to three exact formulas; the construction computes both sides
and refuses to return a cylinder whose formulas disagree with the quotient.

The uniform modulus assigns to every member of a finite family of maps a
positive continuity threshold delta(p) for a common epsilon, varying in a
Lipschitz way with the map: nearby maps receive nearby thresholds.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from .cones import _clean_grid, interval_space
from .combinators import product_metric
from .errors import PreconditionError, StructuralError
from .gluing import adjunction_space
from .moduli import check_uniform_continuity
from .scalars import ONE, ZERO, Scalar, ScalarLike, as_scalar, pow2
from .spaces import (
    FiniteMetricSpace,
    as_mapping,
    ensure_diameter_at_most,
    ensure_metric,
    ensure_total_map,
)

CYLINDER_CROSS = as_scalar(3)


# ---- mapping cylinder ----


@dataclass(frozen=True)
class CylinderSpace:
    """Mapping cylinder of f: X -> Y on a t grid over [0, 1].

    Classes are ("seg", x label, t) for grid values t < 1, x-major, then
    ("y", y label); the top slice (x, 1) lands in the class of f(x).
    ``adjusted`` is the drift-adjusted metric on X actually used upstairs:
    d_X(x, x') + d_Y(f(x), f(x')).
    """

    space: FiniteMetricSpace
    source: FiniteMetricSpace
    target: FiniteMetricSpace
    mapping: tuple
    t_grid: tuple
    adjusted: FiniteMetricSpace

    @property
    def inner_ts(self) -> tuple:
        return tuple(t for t in self.t_grid if t < 1)

    def seg_index(self, source_index: int, t: Scalar) -> int:
        ts = self.inner_ts
        return source_index * len(ts) + ts.index(t)

    def y_index(self, target_index: int) -> int:
        return self.source.n * len(self.inner_ts) + target_index

    def class_index(self, source_index: int, t: Scalar) -> int:
        if t == 1:
            return self.y_index(self.mapping[source_index])
        return self.seg_index(source_index, t)


def adjusted_metric(
    source: FiniteMetricSpace, target: FiniteMetricSpace, mapping
) -> FiniteMetricSpace:
    """The drift-adjusted metric d_X(x,x') + d_Y(f(x),f(x')) on X's points.

    Always a metric (the image term obeys the triangle inequality and the
    d_X term keeps distinct points apart), and f is 1-Lipschitz for it.
    """
    m = as_mapping(mapping)
    ensure_total_map(m, source, target, "adjusted_metric")
    rows = tuple(
        tuple(
            source.d(i, j) + target.d(m[i], m[j]) for j in range(source.n)
        )
        for i in range(source.n)
    )
    return FiniteMetricSpace(source.points, rows)


def mapping_cylinder_metric(
    source: FiniteMetricSpace,
    target: FiniteMetricSpace,
    mapping,
    t_grid,
) -> CylinderSpace:
    """Mapping cylinder of a map between spaces of diameter <= 1.

    The metric is given by three exact formulas (rho is the adjusted metric):
    d([y],[y']) = d_Y(y,y'); d([(x,t)],[y]) = (1-t) + d_Y(f(x),y);
    d([(x,t)],[(x',t')]) = min(rho(x,x') + |t-t'|,
    (1-t) + (1-t') + d_Y(f(x),f(x'))).  The same space is built a second
    time as an adjunction of the adjusted l1 product onto Y (cross hops at
    3, above every displayed value, so chains pivot at glued classes); the
    two must agree entrywise and carry full certificates, else this raises.
    """
    ensure_metric(source, "mapping_cylinder_metric source")
    ensure_metric(target, "mapping_cylinder_metric target")
    ensure_diameter_at_most(source, ONE, "mapping_cylinder_metric source")
    ensure_diameter_at_most(target, ONE, "mapping_cylinder_metric target")
    m = as_mapping(mapping)
    ensure_total_map(m, source, target, "mapping_cylinder_metric")
    f = tuple(m[i] for i in range(source.n))
    grid = _clean_grid(t_grid, ZERO, ONE, (ZERO, ONE))
    inner = tuple(t for t in grid if t < 1)
    adjusted = adjusted_metric(source, target, f)

    points: list = []
    for i in range(source.n):
        for t in inner:
            points.append(("seg", source.points[i], t))
    for j in range(target.n):
        points.append(("y", target.points[j]))
    seg_count = source.n * len(inner)

    def dist(a: int, b: int) -> Scalar:
        if a >= seg_count and b >= seg_count:
            return target.d(a - seg_count, b - seg_count)
        if a >= seg_count or b >= seg_count:
            if a >= seg_count:
                a, b = b, a
            i, tp = divmod(a, len(inner))
            return (ONE - inner[tp]) + target.d(f[i], b - seg_count)
        i, tp = divmod(a, len(inner))
        j, sp = divmod(b, len(inner))
        t, s = inner[tp], inner[sp]
        around = adjusted.d(i, j) + abs(t - s)
        through = (ONE - t) + (ONE - s) + target.d(f[i], f[j])
        return around if around <= through else through

    size = len(points)
    rows = tuple(tuple(dist(a, b) for b in range(size)) for a in range(size))
    space = FiniteMetricSpace(tuple(points), rows)
    cylinder = CylinderSpace(space, source, target, f, grid, adjusted)
    gap = cylinder_adjunction_check(cylinder)
    if gap != 0:
        raise PreconditionError(
            f"cylinder formulas differ from the adjunction metric by {gap}"
        )
    return cylinder


def cylinder_adjunction_check(cylinder: CylinderSpace) -> Scalar:
    """Largest gap between the cylinder formulas and the adjunction route.

    Rebuilds the cylinder as adjunction_space(adjusted X x I, top slice, Y)
    with cross hops at 3 and the product metric itself as the extension,
    requires every adjunction certificate, and compares entrywise.
    """
    grid = cylinder.t_grid
    product = product_metric(cylinder.adjusted, interval_space(grid), "l1")
    top = [
        i * len(grid) + len(grid) - 1 for i in range(cylinder.source.n)
    ]
    attaching = {a: cylinder.mapping[i] for i, a in enumerate(top)}
    result = adjunction_space(
        product,
        top,
        cylinder.target,
        attaching,
        cross=CYLINDER_CROSS,
        extension=product,
    )
    if not result.all_certified():
        raise PreconditionError(
            "cylinder adjunction oracle failed its certificates"
        )

    def adjunction_class(cyl_idx: int) -> int:
        seg_count = cylinder.source.n * len(cylinder.inner_ts)
        if cyl_idx >= seg_count:
            return result.y_class[cyl_idx - seg_count]
        i, tp = divmod(cyl_idx, len(cylinder.inner_ts))
        t = cylinder.inner_ts[tp]
        return result.x_class[i * len(grid) + grid.index(t)]

    worst = ZERO
    for a in range(cylinder.space.n):
        for b in range(cylinder.space.n):
            gap = abs(
                cylinder.space.d(a, b)
                - result.space.d(adjunction_class(a), adjunction_class(b))
            )
            if gap > worst:
                worst = gap
    return worst


def sub_cylinder(cylinder: CylinderSpace, indices: Sequence[int]):
    """Cylinder of the restriction f|_A, with the induced-submetric check.

    Returns (restricted cylinder, True/False): the cylinder built from
    scratch on the sub-source, and whether its metric equals the submetric
    induced from the ambient cylinder on the matching classes entrywise.
    """
    idx = list(indices)
    sub_source = cylinder.source.submetric(idx)
    sub = mapping_cylinder_metric(
        sub_source,
        cylinder.target,
        tuple(cylinder.mapping[i] for i in idx),
        cylinder.t_grid,
    )
    ambient: list = []
    for pos in range(len(idx)):
        for t in sub.inner_ts:
            ambient.append(cylinder.seg_index(idx[pos], t))
    for j in range(cylinder.target.n):
        ambient.append(cylinder.y_index(j))
    induced = cylinder.space.submetric(ambient)
    return sub, induced.dist == sub.space.dist


# ---- uniform modulus ----


@dataclass(frozen=True)
class UniformModulus:
    """Continuity thresholds for a family of maps at a common epsilon.

    ``values[k]`` is delta for the k-th map, in (0, 1]; every map is
    (values[k], epsilon)-continuous and the assignment is Lipschitz in the
    sup distance between maps with constant ``lipschitz_constant``.  The
    certificate flags are computed by exhaustive check.
    """

    epsilon: Scalar
    values: tuple
    band_count: int
    continuity_ok: bool
    lipschitz_ok: bool

    @property
    def lipschitz_constant(self) -> Scalar:
        return 6 / self.epsilon

    def delta_for(self, k: int) -> Scalar:
        return self.values[k]


def map_sup_distance(target: FiniteMetricSpace, f: Sequence[int], g) -> Scalar:
    """Sup distance between two maps into the same target, coordinatewise."""
    return max(target.d(f[i], g[i]) for i in range(len(f)))


def uniform_modulus(
    source: FiniteMetricSpace,
    target: FiniteMetricSpace,
    maps: Sequence,
    epsilon: ScalarLike,
) -> UniformModulus:
    """Assign each map a positive (delta, epsilon)-continuity threshold.

    Z_n collects the members that are (2^-n, epsilon/3)-continuous; they
    exhaust the family once 2^-n drops below the smallest positive source
    distance.  Each band contributes the taper
    (2^-(n+1) - (3/epsilon) * (d(p, Z_n) - R_n)_+)_+ with R_n the band
    radius (1 - 2^-(n+1)) * epsilon/3, and delta(p) is the largest
    contribution.  A member of Z_n collects at least 2^-(n+1), so delta is
    positive; each band's taper is (3/epsilon)-Lipschitz in p, so delta is
    too, within the 6/epsilon certificate bound.
    """
    eps = as_scalar(epsilon)
    if eps <= 0:
        raise PreconditionError("epsilon must be positive")
    family = []
    for mp in maps:
        m = as_mapping(mp)
        ensure_total_map(m, source, target, "uniform_modulus")
        family.append(tuple(m[i] for i in range(source.n)))
    if not family:
        raise PreconditionError("uniform_modulus needs at least one map")

    third = eps / 3
    floor = source.min_positive_distance()
    bands: list = []
    n = 0
    while True:
        members = [
            k
            for k, f in enumerate(family)
            if check_uniform_continuity(source, target, f, pow2(-n), third)
            is None
        ]
        bands.append(members)
        if len(members) == len(family):
            break
        # vacuous once 2^-n is below every positive distance, so this ends
        if floor is not None and pow2(-n) < floor:
            raise AssertionError("continuity bands failed to exhaust the family")
        n += 1

    values = []
    for k, f in enumerate(family):
        best = ZERO
        for n, members in enumerate(bands):
            if not members:
                continue
            to_band = min(map_sup_distance(target, f, family[j]) for j in members)
            radius = (1 - pow2(-n - 1)) * third
            over = to_band - radius
            if over < 0:
                over = ZERO
            taper = pow2(-n - 1) - over * 3 / eps
            if taper > best:
                best = taper
        values.append(best)

    continuity_ok = all(
        check_uniform_continuity(source, target, f, values[k], eps) is None
        for k, f in enumerate(family)
    )
    bound = 6 / eps
    lipschitz_ok = True
    for a in range(len(family)):
        for b in range(a + 1, len(family)):
            gap = abs(values[a] - values[b])
            if gap > bound * map_sup_distance(target, family[a], family[b]):
                lipschitz_ok = False
    return UniformModulus(
        eps, tuple(values), len(bands), continuity_ok, lipschitz_ok
    )
