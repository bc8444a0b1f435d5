"""Chain quotient metrics against independent oracles."""

import random
from fractions import Fraction

import pytest

from helpers import (
    interval_points,
    matrix_of,
    metric_closure,
    random_partition,
    random_space,
    space,
)
from oracles import (
    block_distance_matrix,
    chain_limit_apsp,
    chain_power,
    triangle_valid,
)
from unimet.errors import PreconditionError, StructuralError
from unimet.spaces import FiniteMetricSpace, check_metric_axioms
from unimet.quotients import (
    Surjection,
    amalgamated_union,
    block_distance,
    chain_metric,
    glue_parts,
    quotient_by_discrete_family,
    quotient_order_modulus,
)


# ---- surjections ----


def test_surjection_guards():
    s = interval_points([0, 1, 2], Fraction(1, 4))
    with pytest.raises(StructuralError):
        Surjection(s, 2, (0, 1))
    with pytest.raises(StructuralError):
        Surjection(s, 3, (0, 1, 1))
    with pytest.raises(StructuralError):
        Surjection(s, 2, (0, 2, 1))


def test_surjection_from_classes_appends_singletons():
    s = interval_points([0, 1, 2, 3], Fraction(1, 8))
    sur = Surjection.from_classes(s, [[1, 3]])
    assert sur.class_of == (1, 0, 2, 0)
    assert sur.classes() == ((1, 3), (0,), (2,))
    with pytest.raises(StructuralError):
        Surjection.from_classes(s, [[0], [0]])
    with pytest.raises(StructuralError):
        Surjection.from_classes(s, [[]])


# ---- chain metrics vs oracle ----


def test_chain_metrics_match_oracle_and_biconditional():
    rng = random.Random(2024)
    for _ in range(60):
        size = rng.randint(2, 8)
        classes = rng.randint(1, size)
        sp = random_space(rng, size)
        class_of = random_partition(rng, size, classes)
        sur = Surjection(sp, classes, tuple(class_of))
        block = block_distance_matrix(matrix_of(sp), class_of)
        assert [list(r) for r in block_distance(sur)] == block
        inf = chain_metric(sur, None)
        assert [list(r) for r in inf.values] == chain_limit_apsp(block)
        previous = None
        for n in range(1, classes + 1):
            dn = chain_metric(sur, n)
            assert [list(r) for r in dn.values] == chain_power(block, n)
            # d_n decreases in n
            if previous is not None:
                for p in range(classes):
                    for q in range(classes):
                        assert dn.values[p][q] <= previous[p][q]
            previous = dn.values
            # the settling criterion: d_n = d_inf iff d_n is triangle-valid
            assert (dn.values == inf.values) == triangle_valid(
                [list(r) for r in dn.values]
            )


def test_chain_doubling_composes():
    # d_{2n}(p, q) = min_r d_n(p, r) + d_n(r, q)
    rng = random.Random(77)
    for _ in range(20):
        size = rng.randint(3, 7)
        classes = rng.randint(2, size)
        sp = random_space(rng, size)
        sur = Surjection(sp, classes, tuple(random_partition(rng, size, classes)))
        for n in (1, 2):
            dn = chain_metric(sur, n).values
            d2n = chain_metric(sur, 2 * n).values
            for p in range(classes):
                for q in range(classes):
                    best = min(dn[p][r] + dn[r][q] for r in range(classes))
                    assert d2n[p][q] == best


def test_chain_metric_guards():
    s = interval_points([0, 1, 2], Fraction(1, 4))
    sur = Surjection.from_classes(s, [[0, 1]])
    with pytest.raises(StructuralError):
        chain_metric(sur, 0)
    # steps beyond class_count - 1 equal the chain limit
    big = chain_metric(sur, 99)
    assert big.values == chain_metric(sur, None).values


def test_quotient_order_modulus_tracks_identity():
    s = interval_points([0, 1, 2, 3], Fraction(1, 4))
    sur = Surjection.from_classes(s, [[0, 3]])
    table = quotient_order_modulus(sur, 1)
    fine = chain_metric(sur, None).values
    coarse = chain_metric(sur, 1).values
    k = sur.class_count
    for delta, eps in table.rows:
        for p in range(k):
            for q in range(k):
                if fine[p][q] <= delta:
                    assert coarse[p][q] <= eps


# ---- quotients by families ----


def test_single_set_quotient_settles_at_two_hops():
    rng = random.Random(55)
    for _ in range(20):
        size = rng.randint(3, 7)
        sp = random_space(rng, size)
        members = sorted(rng.sample(range(size), rng.randint(2, size - 1)))
        result = quotient_by_discrete_family(sp, [members])
        assert result.d2_equals_dinf
        assert result.settled_at is not None and result.settled_at <= 2
        assert check_metric_axioms(result.space).ok


def test_quotient_family_guards():
    s = interval_points([0, 1, 2], Fraction(1, 4))
    with pytest.raises(PreconditionError):
        quotient_by_discrete_family(s, [[0, 1], [1, 2]])
    with pytest.raises(StructuralError):
        quotient_by_discrete_family(s, [[]])
    bad = space("abc", {(0, 1): 1, (0, 2): "1/4", (1, 2): "1/4"})
    with pytest.raises(PreconditionError):
        quotient_by_discrete_family(bad, [[0, 1]])


def test_two_set_family_failure_raises():
    # collapsing both ends of a long path makes two hops beat three only
    # through the glued classes; engineered so d_2 > d_inf
    s = interval_points([0, 1, 2, 3, 4, 5], Fraction(1, 8))
    family = [[0, 2], [3, 5]]
    sur = Surjection.from_classes(s, family)
    two = chain_metric(sur, 2).values
    inf = chain_metric(sur, None).values
    if two != inf:
        with pytest.raises(PreconditionError, match="two-hop"):
            quotient_by_discrete_family(s, family)
    else:
        quotient_by_discrete_family(s, family)


# ---- glued unions ----


def test_glue_parts_cross_none_forces_pivots():
    a = interval_points([0, 1], Fraction(1, 2))
    b = interval_points([0, 1], Fraction(1, 2))
    glued = glue_parts([a, b], [((0, 1), (1, 0))], None, 2)
    assert glued.is_metric()
    ca, cb = glued.class_of_part
    # the glued class is shared; opposite free ends connect through it
    assert ca[1] == cb[0]
    assert glued.space.d(ca[0], cb[1]) == 1


def test_glue_parts_disconnected_raises():
    a = interval_points([0], Fraction(1))
    b = interval_points([0], Fraction(1))
    with pytest.raises(PreconditionError, match="disconnected"):
        glue_parts([a, b], [], None, 2)


def test_amalgamated_union_certificates():
    rng = random.Random(31)
    for _ in range(15):
        left = random_space(rng, rng.randint(2, 5), den=16, top=16)
        shared = rng.randint(1, min(2, left.n))
        picks = sorted(rng.sample(range(left.n), shared))
        # build the right factor to contain an isometric copy of the picks
        right_size = rng.randint(shared, shared + 3)
        right = random_space(rng, right_size, den=16, top=16)
        rows = [list(r) for r in right.dist]
        for a in range(shared):
            for b in range(shared):
                rows[a][b] = left.d(picks[a], picks[b])
        # re-close so the patched matrix stays a metric
        rows = metric_closure(rows)
        ok = all(
            rows[a][b] == left.d(picks[a], picks[b])
            for a in range(shared)
            for b in range(shared)
        )
        if not ok:
            continue
        right = FiniteMetricSpace(right.points, tuple(tuple(r) for r in rows))
        h = {picks[a]: a for a in range(shared)}
        glued = amalgamated_union(left, right, h)
        assert check_metric_axioms(glued).ok
        assert glued.n == left.n + right.n - shared


def test_amalgamated_union_guards():
    left = interval_points([0, 1], Fraction(1, 2))
    right = interval_points([0, 1], Fraction(1, 4))
    with pytest.raises(PreconditionError, match="isometric"):
        amalgamated_union(left, right, {0: 0, 1: 1})
    big = interval_points([0, 1], Fraction(3, 2))
    with pytest.raises(PreconditionError, match="diameter"):
        amalgamated_union(big, right, {0: 0})
    with pytest.raises(PreconditionError, match="injective"):
        amalgamated_union(left, right, {0: 0, 1: 0})
    with pytest.raises(PreconditionError, match="nonempty"):
        amalgamated_union(left, right, {})
