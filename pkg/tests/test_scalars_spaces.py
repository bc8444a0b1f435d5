"""Exact scalars, finite metric spaces, and the axiom checker."""

import random
from fractions import Fraction

import pytest

from helpers import interval_points, metric_closure, random_matrix, random_space, space
from unimet.errors import PreconditionError, StructuralError
from unimet.scalars import ONE, ZERO, as_scalar, format_scalar, pow2
from unimet.spaces import (
    FiniteMetricSpace,
    PartialMap,
    as_mapping,
    check_metric_axioms,
    ensure_diameter_at_most,
    ensure_metric,
    ensure_total_map,
)


# ---- scalars ----


def test_as_scalar_accepts_exact_forms():
    assert as_scalar(3) == Fraction(3)
    assert as_scalar("5/8") == Fraction(5, 8)
    assert as_scalar("0.25") == Fraction(1, 4)
    assert as_scalar("-7/2") == Fraction(-7, 2)
    assert as_scalar(Fraction(2, 3)) == Fraction(2, 3)


def test_as_scalar_rejects_floats_bools_and_garbage():
    with pytest.raises(TypeError):
        as_scalar(0.5)
    with pytest.raises(TypeError):
        as_scalar(True)
    with pytest.raises(ValueError):
        as_scalar("abc")
    with pytest.raises(ValueError):
        as_scalar("1/0")


def test_format_scalar_round_trips():
    for v in (Fraction(0), Fraction(3), Fraction(-5, 8), Fraction(22, 7)):
        assert as_scalar(format_scalar(v)) == v


def test_pow2_both_signs():
    assert pow2(0) == 1
    assert pow2(3) == 8
    assert pow2(-4) == Fraction(1, 16)


# ---- space structure ----


def test_space_structural_guards():
    with pytest.raises(StructuralError):
        FiniteMetricSpace(("a", "a"), ((ZERO, ZERO), (ZERO, ZERO)))
    with pytest.raises(StructuralError):
        FiniteMetricSpace(("a", "b"), ((ZERO,),))
    with pytest.raises(StructuralError):
        FiniteMetricSpace(("a",), ((0.0,),))


def test_space_lookup_and_views():
    s = space("abc", {(0, 1): "1/2", (0, 2): "1/3", (1, 2): "1/4"})
    assert s.n == 3
    assert s.index_of("b") == 1
    with pytest.raises(StructuralError):
        s.index_of("zzz")
    assert s.diameter() == Fraction(1, 2)
    assert s.spectrum() == (ZERO, Fraction(1, 4), Fraction(1, 3), Fraction(1, 2))
    assert s.positive_spectrum() == (Fraction(1, 4), Fraction(1, 3), Fraction(1, 2))
    assert s.min_positive_distance() == Fraction(1, 4)
    sub = s.submetric([0, 2])
    assert sub.points == ("a", "c")
    assert sub.d(0, 1) == Fraction(1, 3)
    assert s.relabeled(["x", "y", "z"]).points == ("x", "y", "z")


def test_scaling_helpers():
    s = interval_points([0, 1, 2], Fraction(1, 2))
    assert s.scaled(2).diameter() == 2
    assert s.rescaled_to_diameter().diameter() == 1
    assert s.rescaled_to_diameter(Fraction(1, 4)).diameter() == Fraction(1, 4)
    with pytest.raises(PreconditionError):
        s.scaled(0)
    # zero-diameter spaces come back unchanged
    z = FiniteMetricSpace(("p",), ((ZERO,),))
    assert z.rescaled_to_diameter() is z


# ---- axiom checker ----


def test_axiom_checker_passes_a_metric():
    s = space("abc", {(0, 1): "1/2", (0, 2): "1/3", (1, 2): "1/4"})
    report = check_metric_axioms(s)
    assert report.ok and not report.violations


def test_axiom_checker_finds_each_violation():
    tri = FiniteMetricSpace.from_rows(
        "abc",
        [["0", "1", "1/4"], ["1", "0", "1/4"], ["1/4", "1/4", "0"]],
    )
    report = check_metric_axioms(tri)
    assert "triangle" in report.violated_axioms()
    first = [v for v in report.violations if v.axiom == "triangle"][0]
    assert first.lhs == 1 and first.rhs == Fraction(1, 2)

    asym = FiniteMetricSpace.from_rows("ab", [["0", "1"], ["2", "0"]])
    assert "symmetry" in check_metric_axioms(asym).violated_axioms()

    diag = FiniteMetricSpace.from_rows("ab", [["1", "1"], ["1", "0"]])
    assert "diagonal" in check_metric_axioms(diag).violated_axioms()

    neg = FiniteMetricSpace.from_rows("ab", [["0", "-1"], ["-1", "0"]])
    assert "nonnegativity" in check_metric_axioms(neg).violated_axioms()


def test_pseudo_flag_waives_positivity_only():
    glued = FiniteMetricSpace.from_rows("ab", [["0", "0"], ["0", "0"]])
    assert "positivity" in check_metric_axioms(glued).violated_axioms()
    assert check_metric_axioms(glued, allow_pseudo=True).ok
    flagged = FiniteMetricSpace.from_rows("ab", [["0", "0"], ["0", "0"]], pseudo=True)
    assert check_metric_axioms(flagged).ok


def test_ensure_helpers_raise_with_context():
    tri = FiniteMetricSpace.from_rows(
        "abc", [["0", "1", "1/4"], ["1", "0", "1/4"], ["1/4", "1/4", "0"]]
    )
    with pytest.raises(PreconditionError, match="triangle"):
        ensure_metric(tri, "probe")
    s = interval_points([0, 1], Fraction(3, 2))
    with pytest.raises(PreconditionError, match="rescale"):
        ensure_diameter_at_most(s, ONE, "probe")


def test_random_closures_are_metrics():
    rng = random.Random(101)
    for _ in range(25):
        s = random_space(rng, rng.randint(2, 8))
        assert check_metric_axioms(s).ok


def test_closure_is_largest_metric_below_weights():
    rng = random.Random(102)
    for _ in range(10):
        size = rng.randint(3, 6)
        weights = random_matrix(rng, size)
        dist = metric_closure(weights)
        for i in range(size):
            for j in range(size):
                assert dist[i][j] <= weights[i][j] or i == j


# ---- maps ----


def test_as_mapping_forms():
    assert as_mapping([2, 0, 1]) == {0: 2, 1: 0, 2: 1}
    assert as_mapping({1: 5, 0: 3}) == {0: 3, 1: 5}
    assert as_mapping([(0, 4), (2, 1)]) == {0: 4, 2: 1}
    assert as_mapping(PartialMap(((0, 1), (1, 0)))) == {0: 1, 1: 0}
    with pytest.raises(StructuralError):
        as_mapping([(0, 1), (0, 2)])


def test_ensure_total_map():
    src = interval_points([0, 1, 2], Fraction(1, 4))
    tgt = interval_points([0, 1], Fraction(1, 4))
    ensure_total_map({0: 0, 1: 1, 2: 1}, src, tgt)
    with pytest.raises(PreconditionError):
        ensure_total_map({0: 0, 1: 1}, src, tgt)
    with pytest.raises(StructuralError):
        ensure_total_map({0: 0, 1: 1, 2: 9}, src, tgt)
