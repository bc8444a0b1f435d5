"""Cover calculus on finite grounds: refinement, stars, metrization.

A cover is an ordered list of index sets over a ground {0, ..., g-1}.  Order
matters (constructions key certificates to member indices), duplicates are
dropped keeping the first occurrence, and empty members are rejected.

The metrization routine turns a fundamental sequence of covers (each level a
star-refinement of the one before) into an exact metric via shortest chains,
with the classical two-sided comparison d <= f <= 2d checked entrywise.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from .errors import PreconditionError, StructuralError
from .scalars import ONE, ZERO, Scalar, ScalarLike, as_scalar, pow2
from .spaces import FiniteMetricSpace


@dataclass(frozen=True)
class Cover:
    """Ordered cover of {0, ..., ground-1} by nonempty index sets."""

    ground: int
    members: tuple

    def __post_init__(self) -> None:
        if not isinstance(self.ground, int) or self.ground <= 0:
            raise StructuralError("cover ground must be a positive integer")
        cleaned = []
        seen = set()
        for member in self.members:
            ordered = tuple(sorted(set(member)))
            if not ordered:
                raise StructuralError("cover members must be nonempty")
            for i in ordered:
                if not isinstance(i, int) or not 0 <= i < self.ground:
                    raise StructuralError(f"cover member index {i} out of range")
            if ordered in seen:
                continue
            seen.add(ordered)
            cleaned.append(ordered)
        object.__setattr__(self, "members", tuple(cleaned))
        covered = set()
        for member in self.members:
            covered.update(member)
        if len(covered) != self.ground:
            missing = sorted(set(range(self.ground)) - covered)
            raise StructuralError(f"not a cover: points {missing} uncovered")

    def __len__(self) -> int:
        return len(self.members)

    def member_sets(self) -> list:
        return [frozenset(m) for m in self.members]

    def members_containing(self, point: int) -> list:
        return [k for k, m in enumerate(self.members) if point in m]


def refines(cover: Cover, target: Cover):
    """None if every member of cover sits inside some member of target,
    else the index of the first member that does not."""
    targets = target.member_sets()
    for k, member in enumerate(cover.members):
        s = set(member)
        if not any(s <= t for t in targets):
            return k
    return None


def star(cover: Cover, subset: Iterable[int]) -> tuple:
    """Union of the members meeting the subset, as a sorted index tuple."""
    s = set(subset)
    out = set()
    for member in cover.members:
        if s & set(member):
            out.update(member)
    return tuple(sorted(out))


def star_refines(cover: Cover, target: Cover):
    """None if the star of every member of cover lies in a member of target,
    else the index of the first member whose star does not."""
    targets = target.member_sets()
    for k, member in enumerate(cover.members):
        st = set(star(cover, member))
        if not any(st <= t for t in targets):
            return k
    return None


def barycentric_refines(cover: Cover, target: Cover):
    """None if the star of every point lies in a member of target, else the
    first offending point."""
    targets = target.member_sets()
    for x in range(cover.ground):
        st = set(star(cover, (x,)))
        if not any(st <= t for t in targets):
            return x
    return None


def meet(left: Cover, right: Cover) -> Cover:
    """Common refinement by pairwise intersections (left-major order)."""
    if left.ground != right.ground:
        raise StructuralError("meet needs covers of the same ground")
    members = []
    for a in left.members:
        sa = set(a)
        for b in right.members:
            common = tuple(sorted(sa & set(b)))
            if common:
                members.append(common)
    return Cover(left.ground, tuple(members))


def ball_cover(space: FiniteMetricSpace, radius: ScalarLike) -> Cover:
    """Cover by the closed balls of the given radius, one per point."""
    r = as_scalar(radius)
    if r < 0:
        raise StructuralError("ball radius must be nonnegative")
    members = []
    for x in range(space.n):
        members.append(tuple(y for y in range(space.n) if space.d(x, y) <= r))
    return Cover(space.n, tuple(members))


# ---- Lebesgue-style numbers ----


@dataclass(frozen=True)
class LebesgueNumber:
    """Largest spectrum threshold at which small sets sit inside members.

    ``infinite`` marks the degenerate case of a member equal to the whole
    ground, where every set qualifies.  ``value`` is None when no positive
    threshold works at all (possible only for pseudo-metrics).
    """

    value: Optional[Scalar]
    infinite: bool


def _cliques_within(space: FiniteMetricSpace, threshold: Scalar, strict: bool) -> list:
    graph = nx.Graph()
    graph.add_nodes_from(range(space.n))
    for i in range(space.n):
        for j in range(i + 1, space.n):
            d = space.d(i, j)
            if (d < threshold) if strict else (d <= threshold):
                graph.add_edge(i, j)
    return [frozenset(c) for c in nx.find_cliques(graph)]


def _sets_within_members(cliques: list, cover: Cover) -> bool:
    targets = cover.member_sets()
    return all(any(c <= t for t in targets) for c in cliques)


def lebesgue_number(space: FiniteMetricSpace, cover: Cover) -> LebesgueNumber:
    """Largest positive spectrum value L such that every set of diameter
    strictly below L lies in some member.

    Sets of diameter < L are exactly the cliques of the graph with edges
    d < L, so it suffices to test maximal cliques.
    """
    if cover.ground != space.n:
        raise StructuralError("cover ground does not match the space")
    if any(len(m) == space.n for m in cover.members):
        return LebesgueNumber(None, True)
    best: Optional[Scalar] = None
    for threshold in space.positive_spectrum():
        cliques = _cliques_within(space, threshold, strict=True)
        if _sets_within_members(cliques, cover):
            best = threshold
        else:
            break
    return LebesgueNumber(best, False)


def ball_containment_number(
    space: FiniteMetricSpace,
    cover: Cover,
    cap: Optional[ScalarLike] = None,
) -> Optional[Scalar]:
    """Largest threshold L (from the spectrum, optionally capped) such that
    for every point some single member contains its open ball B(x, L).

    Stronger than a Lebesgue number for the uses here: it names a containing
    member per point rather than per small set.  Returns the cap itself when
    even the cap works, None when no positive threshold works.
    """
    if cover.ground != space.n:
        raise StructuralError("cover ground does not match the space")
    capped = as_scalar(cap) if cap is not None else None
    candidates = [v for v in space.positive_spectrum()]
    if capped is not None:
        candidates = [v for v in candidates if v <= capped]
        candidates.append(capped)
    targets = cover.member_sets()
    best: Optional[Scalar] = None
    for threshold in sorted(set(candidates)):
        ok = True
        for x in range(space.n):
            ball = frozenset(y for y in range(space.n) if space.d(x, y) < threshold)
            if not any(ball <= t for t in targets):
                ok = False
                break
        if ok:
            best = threshold
        else:
            break
    return best


# ---- fundamental sequences and metrization ----


@dataclass(frozen=True)
class FundamentalSequence:
    """Covers C_1, ..., C_N of one ground, each star-refining its predecessor."""

    ground: int
    levels: tuple

    def __post_init__(self) -> None:
        if not self.levels:
            raise StructuralError("a fundamental sequence needs at least one level")
        for cover in self.levels:
            if not isinstance(cover, Cover):
                raise StructuralError("levels must be Cover instances")
            if cover.ground != self.ground:
                raise StructuralError("all levels must share the ground")

    @property
    def depth(self) -> int:
        return len(self.levels)

    def level(self, k: int) -> Cover:
        """1-based access: level(1) is the coarsest cover C_1."""
        if not 1 <= k <= self.depth:
            raise StructuralError(f"level {k} out of range 1..{self.depth}")
        return self.levels[k - 1]


def validate_fundamental_sequence(seq: FundamentalSequence):
    """None if each level star-refines the previous one, else a witness
    (level k, member index) meaning: the star of that member of C_{k+1}
    lies in no member of C_k."""
    for k in range(1, seq.depth):
        bad = star_refines(seq.levels[k], seq.levels[k - 1])
        if bad is not None:
            return (k + 1, bad)
    return None


def ball_fundamental_sequence(
    space: FiniteMetricSpace,
    depth: int,
    base: ScalarLike = Fraction(1, 3),
    ratio: ScalarLike = Fraction(1, 3),
) -> FundamentalSequence:
    """Fundamental sequence of ball covers with geometrically shrinking radii.

    Radii r_k = base * ratio^(k-1) with ratio <= 1/3 guarantee the
    star-refinement property outright: the star of a radius-r ball in the
    radius-r cover sits inside the concentric ball of radius 3r.
    """
    b = as_scalar(base)
    q = as_scalar(ratio)
    if depth < 1:
        raise StructuralError("depth must be at least 1")
    if not (0 < q <= Fraction(1, 3)) or b <= 0:
        raise PreconditionError("need 0 < ratio <= 1/3 and base > 0 for guaranteed star-refinement")
    levels = []
    r = b
    for _ in range(depth):
        levels.append(ball_cover(space, r))
        r = r * q
    seq = FundamentalSequence(space.n, tuple(levels))
    bad = validate_fundamental_sequence(seq)
    if bad is not None:
        raise PreconditionError(f"ball covers failed star-refinement at {bad}")
    return seq


@dataclass(frozen=True)
class AuMetrization:
    """Output of the cover metrization: exact metric plus checked bounds."""

    space: FiniteMetricSpace
    gauge: tuple  # the two-point function f as a matrix
    comparison_ok: bool  # d <= f <= 2d entrywise
    member_diameter_ok: bool  # members of C_{2n} have d-diameter <= 2^-n
    clique_containment_ok: bool  # d-diameter <= 2^-(n+1) sets sit in C_{2n-1}
    witnesses: tuple = ()


def _co_contained(cover: Cover, x: int, y: int) -> bool:
    for member in cover.members:
        if x in member and y in member:
            return True
    return False


def au_metrize(seq: FundamentalSequence) -> AuMetrization:
    """Metrize a fundamental sequence by chaining the level gauge.

    The gauge is f(x, y) = 2^-n with n the largest index such that x and y
    share a member of C_{2n} (C_0 is the trivial cover, so n = 0 always
    qualifies); the metric is the shortest-chain closure of f.  The
    star-refinement axiom makes f at most 2d, so the metric determines the
    same uniformity as the covers; both inequalities are checked exactly.
    """
    bad = validate_fundamental_sequence(seq)
    if bad is not None:
        raise PreconditionError(
            f"not a fundamental sequence: star of member {bad[1]} of level {bad[0]} "
            f"is in no member of level {bad[0] - 1}"
        )
    g = seq.ground
    even_levels = [n for n in range(1, seq.depth + 1) if n % 2 == 0]
    gauge = [[ZERO] * g for _ in range(g)]
    for x in range(g):
        for y in range(x, g):
            depth_hit = 0
            for n in reversed(even_levels):
                if _co_contained(seq.level(n), x, y):
                    depth_hit = n // 2
                    break
            val = pow2(-depth_hit)
            gauge[x][y] = val
            gauge[y][x] = val
    dist = [[gauge[x][y] for y in range(g)] for x in range(g)]
    for x in range(g):
        dist[x][x] = ZERO
    for k in range(g):
        for i in range(g):
            dik = dist[i][k]
            row_k = dist[k]
            row_i = dist[i]
            for j in range(g):
                alt = dik + row_k[j]
                if alt < row_i[j]:
                    row_i[j] = alt
    witnesses = []
    comparison_ok = True
    for x in range(g):
        for y in range(g):
            if not (dist[x][y] <= gauge[x][y] <= 2 * dist[x][y] or x == y):
                comparison_ok = False
                witnesses.append(("comparison", x, y, dist[x][y], gauge[x][y]))
    space = FiniteMetricSpace(
        tuple(range(g)), tuple(tuple(row) for row in dist)
    )
    member_diameter_ok = True
    for n in even_levels:
        bound = pow2(-(n // 2))
        for idx, member in enumerate(seq.level(n).members):
            pts = list(member)
            for a in range(len(pts)):
                for b in range(a + 1, len(pts)):
                    if dist[pts[a]][pts[b]] > bound:
                        member_diameter_ok = False
                        witnesses.append(("member_diameter", n, idx, pts[a], pts[b]))
    clique_containment_ok = True
    for n in even_levels:
        half = n // 2
        if n - 1 < 1:
            continue
        threshold = pow2(-(half + 1))
        cliques = _cliques_within(space, threshold, strict=False)
        targets = seq.level(n - 1).member_sets()
        for clique in cliques:
            if not any(clique <= t for t in targets):
                clique_containment_ok = False
                witnesses.append(("clique_containment", n, tuple(sorted(clique))))
    return AuMetrization(
        space,
        tuple(tuple(row) for row in gauge),
        comparison_ok,
        member_diameter_ok,
        clique_containment_ok,
        tuple(witnesses),
    )


# ---- point-finite refinement ----


@dataclass(frozen=True)
class RefinementResult:
    """Point-finite style refinement with certified index control.

    ``cover`` lists the surviving stars V_n, ``origins`` their indices in the
    input cover, ``core`` the pairwise disjoint kernels W_n.  Certificates:
    every V sits inside the double star of its origin member, and for every
    point x, every origin n with x in V_n is at most j for any input member
    U_j containing st(x, helper).
    """

    cover: Cover
    origins: tuple
    core: tuple
    double_star_ok: bool
    index_bound_ok: bool


def point_finite_refinement(target: Cover, helper: Cover) -> RefinementResult:
    """Refine an ordered cover into one with disjoint kernels and index bounds.

    Requires the helper to star-refine the target (star of every helper
    member inside some target member).  Kernels W_n peel the helper-star of
    target member n off the earlier stars; the output members are the helper
    stars of the surviving kernels.
    """
    if target.ground != helper.ground:
        raise StructuralError("covers must share the ground")
    bad = star_refines(helper, target)
    if bad is not None:
        raise PreconditionError(
            f"helper member {bad} has a star inside no target member"
        )
    ground = target.ground
    eaten: set = set()
    members = []
    origins = []
    core = []
    for n, member in enumerate(target.members):
        st_n = set(star(helper, member))
        kernel = st_n - eaten
        eaten |= st_n
        if not kernel:
            continue
        v = star(helper, kernel)
        members.append(v)
        origins.append(n)
        core.append(tuple(sorted(kernel)))
    result_cover = Cover(ground, tuple(members))
    double_star_ok = True
    for pos, v in enumerate(result_cover.members):
        u = target.members[origins[pos]]
        double = set(star(helper, star(helper, u)))
        if not set(v) <= double:
            double_star_ok = False
    index_bound_ok = True
    target_sets = target.member_sets()
    for x in range(ground):
        hits = [origins[pos] for pos, v in enumerate(result_cover.members) if x in v]
        if not hits:
            index_bound_ok = False
            continue
        point_star = set(star(helper, (x,)))
        bounds = [j for j, u in enumerate(target_sets) if point_star <= u]
        if not bounds or max(hits) > min(bounds):
            index_bound_ok = False
    return RefinementResult(
        result_cover, tuple(origins), tuple(core), double_star_ok, index_bound_ok
    )
