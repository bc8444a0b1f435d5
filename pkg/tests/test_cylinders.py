"""Mapping cylinders and the uniform modulus for map families."""

import random
from fractions import Fraction

import pytest

from helpers import interval_points, random_space, space
from unimet.cylinders import (
    CYLINDER_CROSS,
    adjusted_metric,
    cylinder_adjunction_check,
    map_sup_distance,
    mapping_cylinder_metric,
    sub_cylinder,
    uniform_modulus,
)
from unimet.errors import PreconditionError, StructuralError
from unimet.moduli import check_uniform_continuity
from unimet.spaces import check_metric_axioms

GRID = (Fraction(0), Fraction(1, 2), Fraction(1))


def random_cylinder(rng):
    source = random_space(rng, rng.randint(2, 4), den=16, top=16)
    target = random_space(rng, rng.randint(1, 3), den=16, top=16)
    mapping = tuple(rng.randrange(target.n) for _ in range(source.n))
    return mapping_cylinder_metric(source, target, mapping, GRID)


# ---- adjusted metric ----


def test_adjusted_metric_values_and_lipschitz():
    rng = random.Random(307)
    for _ in range(10):
        source = random_space(rng, rng.randint(2, 5))
        target = random_space(rng, rng.randint(1, 4))
        mapping = [rng.randrange(target.n) for _ in range(source.n)]
        rho = adjusted_metric(source, target, mapping)
        assert check_metric_axioms(rho).ok
        for i in range(source.n):
            for j in range(source.n):
                assert rho.d(i, j) == source.d(i, j) + target.d(mapping[i], mapping[j])
                assert target.d(mapping[i], mapping[j]) <= rho.d(i, j)


# ---- cylinder formulas ----


def expected_distance(cyl, a, b):
    inner = cyl.inner_ts
    seg_count = cyl.source.n * len(inner)
    if a >= seg_count and b >= seg_count:
        return cyl.target.d(a - seg_count, b - seg_count)
    if a >= seg_count or b >= seg_count:
        if a >= seg_count:
            a, b = b, a
        i, tp = divmod(a, len(inner))
        return (1 - inner[tp]) + cyl.target.d(cyl.mapping[i], b - seg_count)
    i, tp = divmod(a, len(inner))
    j, sp = divmod(b, len(inner))
    t, s = inner[tp], inner[sp]
    around = cyl.adjusted.d(i, j) + abs(t - s)
    through = (1 - t) + (1 - s) + cyl.target.d(cyl.mapping[i], cyl.mapping[j])
    return min(around, through)


def test_cylinder_matches_displayed_formulas():
    rng = random.Random(311)
    for _ in range(8):
        cyl = random_cylinder(rng)
        assert check_metric_axioms(cyl.space).ok
        for a in range(cyl.space.n):
            for b in range(cyl.space.n):
                assert cyl.space.d(a, b) == expected_distance(cyl, a, b)
        assert cylinder_adjunction_check(cyl) == 0


def test_cylinder_indexing_and_top_slice():
    source = space("ab", {(0, 1): "1/2"})
    target = space("xy", {(0, 1): "1/4"})
    cyl = mapping_cylinder_metric(source, target, (1, 0), GRID)
    assert cyl.inner_ts == (Fraction(0), Fraction(1, 2))
    assert cyl.space.points[cyl.seg_index(1, Fraction(1, 2))] == (
        "seg",
        "b",
        Fraction(1, 2),
    )
    assert cyl.space.points[cyl.y_index(0)] == ("y", "x")
    # the top slice is glued onto the image point
    assert cyl.class_index(0, Fraction(1)) == cyl.y_index(1)
    assert cyl.space.d(cyl.seg_index(0, Fraction(1, 2)), cyl.y_index(1)) == Fraction(1, 2)
    # Y sits isometrically at the end of the cylinder
    assert cyl.space.d(cyl.y_index(0), cyl.y_index(1)) == Fraction(1, 4)


def test_cylinder_guards():
    small = space("ab", {(0, 1): "1/2"})
    big = interval_points([0, 1], Fraction(3, 2))
    with pytest.raises(PreconditionError, match="diameter"):
        mapping_cylinder_metric(big, small, (0, 0), GRID)
    with pytest.raises(PreconditionError, match="diameter"):
        mapping_cylinder_metric(small, big, (0, 0), GRID)
    with pytest.raises(StructuralError, match="contain"):
        mapping_cylinder_metric(small, small, (0, 1), (Fraction(0), Fraction(1, 2)))
    with pytest.raises(StructuralError):
        mapping_cylinder_metric(small, small, (0, 1), (Fraction(0), Fraction(2)))
    assert CYLINDER_CROSS == 3


def test_sub_cylinder_is_the_induced_submetric():
    rng = random.Random(313)
    for _ in range(8):
        source = random_space(rng, rng.randint(3, 4), den=16, top=16)
        target = random_space(rng, rng.randint(1, 3), den=16, top=16)
        mapping = tuple(rng.randrange(target.n) for _ in range(source.n))
        cyl = mapping_cylinder_metric(source, target, mapping, GRID)
        keep = sorted(rng.sample(range(source.n), rng.randint(1, source.n - 1)))
        sub, induced_equal = sub_cylinder(cyl, keep)
        assert induced_equal
        assert sub.source.n == len(keep)
        assert sub.mapping == tuple(mapping[i] for i in keep)


# ---- uniform modulus ----


def test_map_sup_distance():
    target = interval_points([0, 1, 2], Fraction(1, 4))
    assert map_sup_distance(target, (0, 1), (2, 1)) == Fraction(1, 2)
    assert map_sup_distance(target, (0, 1), (0, 1)) == 0


def test_uniform_modulus_certificates():
    rng = random.Random(331)
    for _ in range(8):
        source = random_space(rng, rng.randint(2, 5))
        target = random_space(rng, rng.randint(2, 4))
        count = rng.randint(1, 6)
        maps = [
            tuple(rng.randrange(target.n) for _ in range(source.n))
            for _ in range(count)
        ]
        eps = Fraction(rng.randint(1, 4), 4)
        table = uniform_modulus(source, target, maps, eps)
        assert table.continuity_ok and table.lipschitz_ok
        assert table.band_count >= 1
        assert table.lipschitz_constant == 6 / eps
        for k, f in enumerate(maps):
            delta = table.delta_for(k)
            assert 0 < delta <= 1
            assert check_uniform_continuity(source, target, f, delta, eps) is None
        for a in range(count):
            for b in range(count):
                gap = abs(table.values[a] - table.values[b])
                bound = table.lipschitz_constant * map_sup_distance(
                    target, maps[a], maps[b]
                )
                assert gap <= bound


def test_uniform_modulus_guards():
    source = interval_points([0, 1], Fraction(1, 2))
    with pytest.raises(PreconditionError, match="positive"):
        uniform_modulus(source, source, [(0, 1)], 0)
    with pytest.raises(PreconditionError, match="at least one"):
        uniform_modulus(source, source, [], Fraction(1, 2))
