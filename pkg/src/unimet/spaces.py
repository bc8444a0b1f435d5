"""Finite metric spaces with exact rational distances.

A ``FiniteMetricSpace`` is a tuple of point labels plus a square matrix of
``Fraction`` distances.  The constructor enforces only structure (unique
labels, square matrix, exact scalars); the metric axioms themselves are the
job of ``check_metric_axioms`` so that defective matrices can be represented,
checked, and reported with witnesses.

Witness order is deterministic: the checker scans index tuples in
lexicographic order and reports, per violated axiom, the first witness found.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence, Union

from .errors import PreconditionError, StructuralError
from .scalars import ZERO, Scalar, ScalarLike, as_scalar

Label = object  # any hashable, JSON-encodable label


@dataclass(frozen=True)
class FiniteMetricSpace:
    """Labeled points with an exact, symmetric distance matrix.

    ``pseudo`` marks a space intended as a pseudo-metric (distinct points at
    distance zero allowed); it is advisory and consulted by the axiom checker
    and the CLI, never by constructions.
    """

    points: tuple
    dist: tuple
    pseudo: bool = False

    def __post_init__(self) -> None:
        n = len(self.points)
        if len(set(self.points)) != n:
            raise StructuralError("point labels must be unique")
        if len(self.dist) != n or any(len(row) != n for row in self.dist):
            raise StructuralError(f"distance matrix must be {n}x{n}")
        for row in self.dist:
            for value in row:
                if not isinstance(value, Fraction):
                    raise StructuralError("distance entries must be exact scalars")

    @staticmethod
    def from_rows(points: Sequence, rows: Sequence[Sequence[ScalarLike]],
                  pseudo: bool = False) -> "FiniteMetricSpace":
        dist = tuple(tuple(as_scalar(v) for v in row) for row in rows)
        return FiniteMetricSpace(tuple(points), dist, pseudo)

    @property
    def n(self) -> int:
        return len(self.points)

    def d(self, i: int, j: int) -> Scalar:
        return self.dist[i][j]

    @cached_property
    def _index(self) -> dict:
        return {p: i for i, p in enumerate(self.points)}

    def index_of(self, label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise StructuralError(f"unknown point label {label!r}") from None

    def diameter(self) -> Scalar:
        return max((v for row in self.dist for v in row), default=ZERO)

    def spectrum(self) -> tuple:
        """Sorted distinct distance values, zero included."""
        values = {ZERO}
        for i in range(self.n):
            for j in range(i + 1, self.n):
                values.add(self.dist[i][j])
        return tuple(sorted(values))

    def positive_spectrum(self) -> tuple:
        return tuple(v for v in self.spectrum() if v > 0)

    def min_positive_distance(self) -> Optional[Scalar]:
        pos = self.positive_spectrum()
        return pos[0] if pos else None

    def submetric(self, indices: Sequence[int]) -> "FiniteMetricSpace":
        idx = list(indices)
        for i in idx:
            if not (0 <= i < self.n):
                raise StructuralError(f"index {i} out of range")
        if len(set(idx)) != len(idx):
            raise StructuralError("subset indices must be distinct")
        pts = tuple(self.points[i] for i in idx)
        dist = tuple(tuple(self.dist[i][j] for j in idx) for i in idx)
        return FiniteMetricSpace(pts, dist, self.pseudo)

    def scaled(self, factor: ScalarLike) -> "FiniteMetricSpace":
        f = as_scalar(factor)
        if f <= 0:
            raise PreconditionError("scale factor must be positive")
        dist = tuple(tuple(f * v for v in row) for row in self.dist)
        return FiniteMetricSpace(self.points, dist, self.pseudo)

    def rescaled_to_diameter(self, target: ScalarLike = 1) -> "FiniteMetricSpace":
        """Explicit normalization helper: scale so the diameter equals target.

        Operations that require diameter bounds never rescale silently; call
        this first.  A space of diameter zero is returned unchanged.
        """
        diam = self.diameter()
        if diam == 0:
            return self
        return self.scaled(as_scalar(target) / diam)

    def relabeled(self, points: Sequence) -> "FiniteMetricSpace":
        if len(points) != self.n:
            raise StructuralError("relabeling must preserve point count")
        return FiniteMetricSpace(tuple(points), self.dist, self.pseudo)


@dataclass(frozen=True)
class AxiomViolation:
    axiom: str
    witness: tuple
    lhs: Scalar
    rhs: Scalar


@dataclass(frozen=True)
class AxiomReport:
    ok: bool
    allow_pseudo: bool
    violations: tuple

    def violated_axioms(self) -> tuple:
        return tuple(v.axiom for v in self.violations)


def check_metric_axioms(space: FiniteMetricSpace,
                        allow_pseudo: Optional[bool] = None) -> AxiomReport:
    """Check symmetry, zero diagonal, nonnegativity, positivity, triangle.

    One violation per axiom, carrying the lexicographically first witness.
    ``allow_pseudo`` defaults to the space's own pseudo flag; when true, the
    positivity axiom is skipped.
    """
    if allow_pseudo is None:
        allow_pseudo = space.pseudo
    d = space.dist
    pts = space.points
    n = space.n
    violations = []

    for i in range(n):
        if d[i][i] != 0:
            violations.append(AxiomViolation("diagonal", (pts[i],), d[i][i], ZERO))
            break
    for i in range(n):
        found = False
        for j in range(n):
            if d[i][j] < 0:
                violations.append(AxiomViolation("nonnegativity", (pts[i], pts[j]), d[i][j], ZERO))
                found = True
                break
        if found:
            break
    for i in range(n):
        found = False
        for j in range(i + 1, n):
            if d[i][j] != d[j][i]:
                violations.append(AxiomViolation("symmetry", (pts[i], pts[j]), d[i][j], d[j][i]))
                found = True
                break
        if found:
            break
    if not allow_pseudo:
        for i in range(n):
            found = False
            for j in range(i + 1, n):
                if d[i][j] == 0 and d[j][i] == 0:
                    violations.append(AxiomViolation("positivity", (pts[i], pts[j]), ZERO, ZERO))
                    found = True
                    break
            if found:
                break
    done = False
    for i in range(n):
        for j in range(n):
            if j == i:
                continue
            for k in range(n):
                if k == i or k == j:
                    continue
                lhs = d[i][k]
                rhs = d[i][j] + d[j][k]
                if lhs > rhs:
                    violations.append(AxiomViolation("triangle", (pts[i], pts[j], pts[k]), lhs, rhs))
                    done = True
                    break
            if done:
                break
        if done:
            break

    return AxiomReport(ok=not violations, allow_pseudo=allow_pseudo,
                       violations=tuple(violations))


def ensure_metric(space: FiniteMetricSpace, what: str = "space",
                  allow_pseudo: bool = False) -> None:
    """Raise PreconditionError unless the space passes the metric axioms."""
    report = check_metric_axioms(space, allow_pseudo=allow_pseudo)
    if not report.ok:
        first = report.violations[0]
        raise PreconditionError(
            f"{what} is not a {'pseudo-metric' if allow_pseudo else 'metric'}: "
            f"{first.axiom} fails at {first.witness} ({first.lhs} vs {first.rhs})")


def ensure_diameter_at_most(space: FiniteMetricSpace, bound: ScalarLike,
                            what: str = "space") -> None:
    b = as_scalar(bound)
    diam = space.diameter()
    if diam > b:
        raise PreconditionError(
            f"{what} has diameter {diam} > {b}; rescale explicitly first "
            f"(rescaled_to_diameter)")


@dataclass(frozen=True)
class PartialMap:
    """A map between index ranges, total or partial, as (source, target) pairs."""

    pairs: tuple

    def __post_init__(self) -> None:
        seen = set()
        for pair in self.pairs:
            if len(pair) != 2:
                raise StructuralError("map pairs must be (source, target)")
            s, t = pair
            if not isinstance(s, int) or not isinstance(t, int) or s < 0 or t < 0:
                raise StructuralError("map indices must be nonnegative integers")
            if s in seen:
                raise StructuralError(f"duplicate source index {s} in map")
            seen.add(s)

    @staticmethod
    def from_dict(mapping: Mapping[int, int]) -> "PartialMap":
        return PartialMap(tuple(sorted((int(s), int(t)) for s, t in mapping.items())))

    def as_dict(self) -> dict:
        return {s: t for s, t in self.pairs}

    def domain(self) -> tuple:
        return tuple(sorted(s for s, _ in self.pairs))

    def is_total(self, source_size: int) -> bool:
        return set(self.domain()) == set(range(source_size))


MappingLike = Union[PartialMap, Mapping[int, int], Iterable]


def as_mapping(obj: MappingLike) -> dict:
    """Normalize a map given as a PartialMap, a dict, an iterable of
    (source, image) pairs, or a flat sequence of images (i -> seq[i])."""
    if isinstance(obj, PartialMap):
        return obj.as_dict()
    if isinstance(obj, Mapping):
        return PartialMap.from_dict(obj).as_dict()
    items = list(obj)
    if all(isinstance(e, int) and not isinstance(e, bool) for e in items):
        return PartialMap(tuple(enumerate(items))).as_dict()
    return PartialMap(tuple((int(s), int(t)) for s, t in items)).as_dict()


def ensure_total_map(mapping: dict, source: FiniteMetricSpace,
                     target: FiniteMetricSpace, what: str = "map") -> None:
    if set(mapping) != set(range(source.n)):
        raise PreconditionError(f"{what} must be total on the source points")
    for t in mapping.values():
        if not (0 <= t < target.n):
            raise StructuralError(f"{what} has target index {t} out of range")
