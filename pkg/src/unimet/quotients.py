"""Chain metrics on quotients of finite metric spaces.

A surjection onto classes induces the block distance (infimum over
representatives) and the chain distances d_n = cheapest n-segment chain of
block hops.  d_infinity is the shortest-path closure.  The classical facts
made checkable here: d_n decreases in n, doubling composes in the min-plus
sense, and d_infinity = d_n exactly when d_n already satisfies the triangle
inequality.

Gluing several spaces along identifications runs through the same engine via
a parts list: block hops inside a part use its metric, hops across parts use
a constant (or are forbidden), and identified points share a class.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from .errors import PreconditionError, StructuralError
from .moduli import ModulusTable
from .scalars import ONE, ZERO, Scalar, ScalarLike, as_scalar
from .spaces import (
    AxiomViolation,
    FiniteMetricSpace,
    PartialMap,
    as_mapping,
    check_metric_axioms,
    ensure_diameter_at_most,
    ensure_metric,
)


@dataclass(frozen=True)
class Surjection:
    """Class assignment for the points of a finite space.

    ``class_of[i]`` is the class index of point i; every class in
    range(class_count) must be hit.
    """

    source: FiniteMetricSpace
    class_count: int
    class_of: tuple

    def __post_init__(self) -> None:
        if not isinstance(self.class_count, int) or self.class_count <= 0:
            raise StructuralError("class_count must be a positive integer")
        if len(self.class_of) != self.source.n:
            raise StructuralError("class_of must assign every point")
        hit = set()
        for c in self.class_of:
            if not isinstance(c, int) or not 0 <= c < self.class_count:
                raise StructuralError(f"class index {c} out of range")
            hit.add(c)
        if len(hit) != self.class_count:
            missing = sorted(set(range(self.class_count)) - hit)
            raise StructuralError(f"classes {missing} are empty")

    @staticmethod
    def from_classes(space: FiniteMetricSpace, classes: Sequence[Iterable[int]]) -> "Surjection":
        """Build from explicit index sets; unlisted points become singleton
        classes appended in index order."""
        class_of: list = [None] * space.n
        count = 0
        for cls in classes:
            members = sorted(set(cls))
            if not members:
                raise StructuralError("classes must be nonempty")
            for i in members:
                if not isinstance(i, int) or not 0 <= i < space.n:
                    raise StructuralError(f"class member {i} out of range")
                if class_of[i] is not None:
                    raise StructuralError(f"point {i} assigned to two classes")
                class_of[i] = count
            count += 1
        for i in range(space.n):
            if class_of[i] is None:
                class_of[i] = count
                count += 1
        return Surjection(space, count, tuple(class_of))

    def classes(self) -> tuple:
        out: list = [[] for _ in range(self.class_count)]
        for i, c in enumerate(self.class_of):
            out[c].append(i)
        return tuple(tuple(members) for members in out)

    def class_labels(self) -> tuple:
        return tuple(
            tuple(self.source.points[i] for i in members) for members in self.classes()
        )


def block_distance(sur: Surjection) -> tuple:
    """Matrix of infimum distances between class preimages."""
    classes = sur.classes()
    k = sur.class_count
    space = sur.source
    rows = []
    for p in range(k):
        row = []
        for q in range(k):
            best: Optional[Scalar] = None
            for u in classes[p]:
                for v in classes[q]:
                    val = space.d(u, v)
                    if best is None or val < best:
                        best = val
            row.append(best)
        rows.append(tuple(row))
    return tuple(rows)


def _min_plus(a: Sequence[Sequence[Optional[Scalar]]],
              b: Sequence[Sequence[Optional[Scalar]]]) -> list:
    n = len(a)
    out = []
    for i in range(n):
        row_a = a[i]
        row = []
        for j in range(n):
            best: Optional[Scalar] = None
            for k in range(n):
                x = row_a[k]
                y = b[k][j]
                if x is None or y is None:
                    continue
                s = x + y
                if best is None or s < best:
                    best = s
            row.append(best)
        out.append(row)
    return out


def _shortest_paths(block: Sequence[Sequence[Optional[Scalar]]]) -> list:
    n = len(block)
    dist = [[block[i][j] for j in range(n)] for i in range(n)]
    for i in range(n):
        dist[i][i] = ZERO
    for k in range(n):
        for i in range(n):
            dik = dist[i][k]
            if dik is None:
                continue
            row_i = dist[i]
            row_k = dist[k]
            for j in range(n):
                dkj = row_k[j]
                if dkj is None:
                    continue
                alt = dik + dkj
                if row_i[j] is None or alt < row_i[j]:
                    row_i[j] = alt
    return dist


@dataclass(frozen=True)
class ChainMetric:
    """A chain distance d_n (or d_infinity for steps None) on the classes.

    ``space`` wraps the values with the class labels; it is flagged pseudo
    because positivity is a theorem to check, not a given.  The axiom flags
    record what the values actually satisfy.
    """

    surjection: Surjection
    steps: Optional[int]
    space: FiniteMetricSpace
    pseudo_metric_ok: bool
    positive_ok: bool
    first_violation: Optional[AxiomViolation]

    @property
    def values(self) -> tuple:
        return self.space.dist

    def is_metric(self) -> bool:
        return self.pseudo_metric_ok and self.positive_ok


def _finish_chain(sur: Surjection, steps: Optional[int], matrix: Sequence[Sequence[Optional[Scalar]]]) -> ChainMetric:
    for row in matrix:
        for entry in row:
            if entry is None:
                raise PreconditionError(
                    "chain distance is infinite: the quotient is disconnected "
                    "at the requested chain length"
                )
    space = FiniteMetricSpace(
        sur.class_labels(), tuple(tuple(row) for row in matrix), pseudo=True
    )
    report = check_metric_axioms(space, allow_pseudo=True)
    strict = check_metric_axioms(space, allow_pseudo=False)
    violation = strict.violations[0] if strict.violations else None
    return ChainMetric(
        sur,
        steps,
        space,
        report.ok,
        "positivity" not in strict.violated_axioms(),
        violation,
    )


def chain_metric(sur: Surjection, steps: Optional[int]) -> ChainMetric:
    """Chain distance over the quotient classes.

    steps = n >= 1 gives d_n (cheapest chain of at most n block hops; chains
    may idle at a class for free, so at-most equals exactly-n).  steps = None
    gives d_infinity via all-pairs shortest paths.  Chains never need more
    hops than class_count - 1 (repeats drop out), so d_n with larger n equals
    d_infinity; the computation caps there.
    """
    block = block_distance(sur)
    if steps is None:
        return _finish_chain(sur, None, _shortest_paths(block))
    if not isinstance(steps, int) or steps < 1:
        raise StructuralError("steps must be a positive integer or None")
    effective = min(steps, max(1, sur.class_count - 1))
    power: Sequence[Sequence[Optional[Scalar]]] = block
    for _ in range(effective - 1):
        power = _min_plus(power, block)
    return _finish_chain(sur, steps, power)


def quotient_order_modulus(sur: Surjection, steps: int) -> ModulusTable:
    """How well d_n tracks d_infinity, as a modulus table.

    For each delta in the d_infinity spectrum, the row's epsilon is the
    largest d_n value among class pairs at d_infinity distance <= delta.
    The identity map (Q, d_infinity) -> (Q, d_n) is uniformly continuous on
    the finite instance exactly when small deltas give small epsilons.
    """
    fine = chain_metric(sur, None)
    coarse = chain_metric(sur, steps)
    k = sur.class_count
    values = sorted({fine.values[p][q] for p in range(k) for q in range(k)})
    rows = []
    for delta in values:
        eps = ZERO
        for p in range(k):
            for q in range(k):
                if fine.values[p][q] <= delta and coarse.values[p][q] > eps:
                    eps = coarse.values[p][q]
        rows.append((delta, eps))
    return ModulusTable("quotient_order", tuple(rows))


# ---- quotients by families and glued unions ----


@dataclass(frozen=True)
class QuotientResult:
    """Quotient by a disjoint family with its certificates.

    ``chain`` holds d_2; ``settled_at`` is the least n with d_n = d_infinity
    (None if that never happens below the class count, which cannot occur);
    ``d2_equals_dinf`` is the identity the two-hop formula relies on.
    """

    space: FiniteMetricSpace
    chain: ChainMetric
    d2_equals_dinf: bool
    settled_at: Optional[int]


def quotient_by_discrete_family(
    space: FiniteMetricSpace,
    family: Sequence[Iterable[int]],
) -> QuotientResult:
    """Collapse each set of a disjoint family to a point, with certificates.

    For a metric source, the result is certified to be a metric.  The
    two-hop distance d_2 is certified equal to d_infinity; this holds
    automatically when the family has a single set (chains pivot at the one
    glued class), and is checked, not assumed, for larger families, where it
    can genuinely fail; failure raises, because callers rely on d_2 being
    the quotient metric.
    """
    ensure_metric(space, "quotient_by_discrete_family")
    seen: set = set()
    cleaned = []
    for cls in family:
        members = sorted(set(cls))
        if not members:
            raise StructuralError("family sets must be nonempty")
        for i in members:
            if i in seen:
                raise PreconditionError(
                    f"family sets overlap at point {space.points[i]!r}"
                )
            seen.add(i)
        cleaned.append(members)
    sur = Surjection.from_classes(space, cleaned)
    two = chain_metric(sur, 2)
    inf = chain_metric(sur, None)
    equal = two.values == inf.values
    block = block_distance(sur)
    target = [list(row) for row in inf.values]
    power = [list(row) for row in block]
    for i in range(len(power)):
        power[i][i] = ZERO
    settled: Optional[int] = None
    for n in range(1, max(2, sur.class_count)):
        if power == target:
            settled = n
            break
        power = _min_plus(power, block)
    if not equal:
        raise PreconditionError(
            "two-hop quotient distance differs from the chain limit for this "
            f"family (they agree first at n = {settled})"
        )
    if not inf.is_metric():
        raise PreconditionError(
            "quotient of a metric by a disjoint family failed to be a metric; "
            f"violation: {inf.first_violation}"
        )
    quotient_space = FiniteMetricSpace(two.space.points, two.values)
    return QuotientResult(quotient_space, two, equal, settled)


@dataclass(frozen=True)
class GluedUnion:
    """Union of parts glued along identified points, via the chain engine.

    ``space`` carries d_steps on the classes; ``class_of_part`` maps (part
    index, point index) to a class index; the equality and axiom flags are
    computed, never assumed.
    """

    space: FiniteMetricSpace
    steps: int
    dn_equals_dinf: bool
    pseudo_metric_ok: bool
    positive_ok: bool
    first_violation: Optional[AxiomViolation]
    class_of_part: tuple

    def is_metric(self) -> bool:
        return self.pseudo_metric_ok and self.positive_ok


def glue_parts(
    parts: Sequence[FiniteMetricSpace],
    identifications: Sequence[Sequence[Tuple[int, int]]],
    cross: Optional[ScalarLike],
    steps: int,
) -> GluedUnion:
    """Glue parts along classes of (part, point) pairs.

    Cross-part block hops cost the constant ``cross``; None forbids them, so
    every chain must pivot through glued classes.  Identified pairs must list
    existing points; points not identified become singleton classes.  The
    block structure is assembled into one auxiliary space (cross None uses a
    None sentinel internally), then the chain engine runs on it.
    """
    if not parts:
        raise StructuralError("glue_parts needs at least one part")
    cross_val = as_scalar(cross) if cross is not None else None
    offsets = []
    total = 0
    for part in parts:
        offsets.append(total)
        total += part.n
    # classes over global indices
    class_of: list = [None] * total
    count = 0
    for group in identifications:
        members = []
        for part_idx, point_idx in group:
            if not 0 <= part_idx < len(parts):
                raise StructuralError(f"part index {part_idx} out of range")
            if not 0 <= point_idx < parts[part_idx].n:
                raise StructuralError(f"point index {point_idx} out of range in part {part_idx}")
            members.append(offsets[part_idx] + point_idx)
        if not members:
            raise StructuralError("identification groups must be nonempty")
        for g in members:
            if class_of[g] is not None:
                raise StructuralError("a point appears in two identification groups")
            class_of[g] = count
        count += 1
    for g in range(total):
        if class_of[g] is None:
            class_of[g] = count
            count += 1

    def part_of(g: int) -> int:
        for p in range(len(parts) - 1, -1, -1):
            if g >= offsets[p]:
                return p
        raise AssertionError

    # block matrix over classes, with None for missing cross hops
    members_of: list = [[] for _ in range(count)]
    for g in range(total):
        members_of[class_of[g]].append(g)
    block: list = []
    for p in range(count):
        row: list = []
        for q in range(count):
            best: Optional[Scalar] = None
            for u in members_of[p]:
                pu = part_of(u)
                for v in members_of[q]:
                    pv = part_of(v)
                    if pu == pv:
                        val = parts[pu].d(u - offsets[pu], v - offsets[pv])
                    elif cross_val is not None and p != q:
                        val = cross_val
                    elif p == q:
                        val = ZERO
                    else:
                        continue
                    if best is None or val < best:
                        best = val
            row.append(best)
        block.append(row)

    labels = []
    for p in range(count):
        labels.append(
            tuple((part_of(g), parts[part_of(g)].points[g - offsets[part_of(g)]])
                  for g in members_of[p])
        )

    # run the chain engine on the assembled block matrix
    power: Sequence[Sequence[Optional[Scalar]]] = block
    for _ in range(max(1, min(steps, count - 1)) - 1):
        power = _min_plus(power, block)
    inf_matrix = _shortest_paths(block)
    for i in range(count):
        for j in range(count):
            if power[i][j] is None or inf_matrix[i][j] is None:
                raise PreconditionError("glued union is disconnected")
    space = FiniteMetricSpace(tuple(labels), tuple(tuple(r) for r in power), pseudo=True)
    report = check_metric_axioms(space, allow_pseudo=True)
    strict = check_metric_axioms(space, allow_pseudo=False)
    violation = strict.violations[0] if strict.violations else None
    equal = [list(r) for r in power] == inf_matrix
    class_of_part = tuple(
        tuple(class_of[offsets[p] + i] for i in range(parts[p].n))
        for p in range(len(parts))
    )
    return GluedUnion(
        space,
        steps,
        equal,
        report.ok,
        "positivity" not in strict.violated_axioms(),
        violation,
        class_of_part,
    )


def amalgamated_union(
    left: FiniteMetricSpace,
    right: FiniteMetricSpace,
    h,
) -> FiniteMetricSpace:
    """Glue two spaces along an isometry between subsets, cross distance 1.

    h maps indices of left to indices of right, must be injective and
    isometric on its domain; both spaces need diameter <= 1.  The result is
    the two-hop chain metric on the disjoint union with all cross distances
    1 and the pairs {a, h(a)} collapsed, certified to be a metric equal to
    the chain limit, with both factors embedded isometrically.
    """
    ensure_metric(left, "amalgamated_union left factor")
    ensure_metric(right, "amalgamated_union right factor")
    ensure_diameter_at_most(left, ONE, "amalgamated_union left factor")
    ensure_diameter_at_most(right, ONE, "amalgamated_union right factor")
    mapping = as_mapping(h)
    if not mapping:
        raise PreconditionError("amalgamated_union needs a nonempty gluing map")
    targets = set()
    for a, b in mapping.items():
        if not 0 <= a < left.n:
            raise StructuralError(f"gluing source index {a} out of range")
        if not 0 <= b < right.n:
            raise StructuralError(f"gluing target index {b} out of range")
        if b in targets:
            raise PreconditionError("gluing map must be injective")
        targets.add(b)
    items = sorted(mapping.items())
    for a, b in items:
        for a2, b2 in items:
            if left.d(a, a2) != right.d(b, b2):
                raise PreconditionError(
                    "gluing map is not isometric: "
                    f"d({left.points[a]!r}, {left.points[a2]!r}) = {left.d(a, a2)} "
                    f"but d({right.points[b]!r}, {right.points[b2]!r}) = {right.d(b, b2)}"
                )
    glued = glue_parts(
        [left, right],
        [((0, a), (1, b)) for a, b in items],
        ONE,
        2,
    )
    if not glued.dn_equals_dinf:
        raise PreconditionError("amalgamated union: d_2 differs from the chain limit")
    if not glued.is_metric():
        raise PreconditionError(
            f"amalgamated union failed the metric axioms: {glued.first_violation}"
        )
    # isometric embedding checks for both factors
    left_classes = glued.class_of_part[0]
    right_classes = glued.class_of_part[1]
    space = FiniteMetricSpace(glued.space.points, glued.space.dist)
    for i in range(left.n):
        for j in range(left.n):
            if space.d(left_classes[i], left_classes[j]) != left.d(i, j):
                raise PreconditionError("left factor does not embed isometrically")
    for i in range(right.n):
        for j in range(right.n):
            if space.d(right_classes[i], right_classes[j]) != right.d(i, j):
                raise PreconditionError("right factor does not embed isometrically")
    return space
