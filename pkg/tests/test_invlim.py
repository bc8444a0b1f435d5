"""Inverse sequences: threads, convergence reports, telescopes, ladders."""

from fractions import Fraction

import pytest

from helpers import halving_chain, interval_points, retraction_tower, window_chain
from unimet.cylinders import mapping_cylinder_metric
from unimet.errors import PreconditionError, StructuralError
from unimet.invlim import (
    THREAD_CAP,
    cauchy_report,
    cauchy_row,
    convergence_report,
    convergence_row,
    inverse_sequence,
    ladder,
    level_anchor_verdict,
    level_shadow_reached,
    mittag_leffler_report,
    perturbation_limit,
    separation_index,
    telescope_metric,
    thread_space,
    threads,
)

GRID = (Fraction(0), Fraction(1, 2), Fraction(1))


# ---- truncation structure ----


def test_truncation_composites_and_images():
    tower = retraction_tower(5)
    assert tower.top == 4
    # composing all bonds from the top collapses everything onto point 0
    assert tower.composite(4, 0) == (0, 0, 0, 0, 0)
    assert tower.composite(3, 1) == (0, 1, 1, 1)
    assert tower.composite(2, 2) == (0, 1, 2)
    assert tower.image(4, 2) == (0, 1, 2)
    assert tower.surjective_bonds() == (True, True, True, True)


def test_truncation_bond_validation():
    level = interval_points([0, 1], Fraction(1, 2))
    with pytest.raises(StructuralError, match="bond"):
        inverse_sequence([level, level], [])
    with pytest.raises(StructuralError, match="range"):
        inverse_sequence([level, level], [(0, 7)])


# ---- threads ----


def test_threads_of_retraction_tower():
    tower = retraction_tower(5)
    ths = threads(tower)
    assert len(ths) == 5
    for thread in ths:
        assert thread.compatible_with(tower)
    # the thread through point 3 saturates at levels that lack it
    assert ths[3].entries == (0, 1, 2, 3, 3)


def test_thread_cap_enforced():
    big = interval_points(range(THREAD_CAP + 1), Fraction(1, 32))
    with pytest.raises(PreconditionError, match="cap"):
        threads(inverse_sequence([big], []))


def test_thread_space_weighted_metric():
    tower = retraction_tower(5)
    bundle = thread_space(tower)
    assert bundle.space.n == 5
    want = max(
        Fraction(1, 2 ** (i + 1)) * Fraction(min(4, i), 8) for i in range(5)
    )
    assert bundle.space.d(0, 4) == want
    # projections list the level entries in thread order
    assert bundle.projection(2) == tuple(t.entries[2] for t in threads(tower))


def test_thread_space_needs_small_levels():
    wide = interval_points([0, 3], Fraction(1))
    with pytest.raises(PreconditionError, match="diameter"):
        thread_space(inverse_sequence([wide], []))


# ---- stabilization and convergence reports ----


def test_mittag_leffler_on_tower():
    tower = retraction_tower(5)
    report = mittag_leffler_report(tower)
    assert report.all_stabilized
    for row in report.rows:
        assert row.stabilized_at == row.level


def test_identity_tower_reports():
    level = interval_points([0, 1], Fraction(1, 2))
    ident = inverse_sequence([level, level, level], [(0, 1), (0, 1)])
    assert mittag_leffler_report(ident).all_stabilized
    assert convergence_report(ident).all_hold
    sep = separation_index(ident, Fraction(0))
    assert sep.found and sep.level == 0
    assert sep.scanned[0].threshold == Fraction(1, 2)


def test_halving_chain_never_stabilizes_below_top():
    chain = halving_chain(5, 6)
    assert chain.top == 4
    report = mittag_leffler_report(chain)
    assert not report.all_stabilized
    assert report.rows[chain.top].stabilized


def test_convergence_and_cauchy_rows_on_halving_chain():
    chain = halving_chain(5, 6)
    conv = convergence_row(chain, 0, Fraction(1, 64))
    assert conv.holds_from == chain.top and not conv.witnessed
    cau = cauchy_row(chain, 0, Fraction(1, 8))
    assert cau.witnessed and cau.holds_from == 3


def test_two_epsilon_transfer_on_halving_chain():
    # a convergence bound at eps always yields a Cauchy bound at 2 eps
    chain = halving_chain(5, 6)
    for i in range(chain.top + 1):
        for eps in chain.levels[i].spectrum():
            cau = cauchy_row(chain, i, 2 * eps)
            conv = convergence_row(chain, i, eps)
            assert cau.holds_from <= conv.holds_from


def test_window_chain_rows():
    chain = window_chain(4)
    report = mittag_leffler_report(chain)
    assert not report.all_stabilized
    assert not report.rows[0].stabilized
    cau = cauchy_row(chain, 0, Fraction(1, 16))
    assert cau.holds_from == chain.top and not cau.witnessed
    assert cauchy_row(chain, 0, Fraction(3, 8)).witnessed


def test_full_reports_on_tower():
    tower = retraction_tower(5)
    conv = convergence_report(tower)
    assert conv.all_hold
    cau = cauchy_report(tower)
    for row in cau.rows:
        assert row.holds_from <= row.level + 1


# ---- shadow levels and Cauchy anchors ----


def test_shadow_levels():
    tower = retraction_tower(5)
    assert all(level_shadow_reached(tower, i) for i in range(tower.top + 1))
    chain = halving_chain(5, 6)
    assert not level_shadow_reached(chain, 0)
    assert not level_shadow_reached(chain, 1)
    assert level_shadow_reached(chain, chain.top)


def test_anchor_verdicts_on_tower():
    tower = retraction_tower(5)
    for i in range(tower.top + 1):
        verdict = level_anchor_verdict(tower, i)
        assert verdict.stabilized and verdict.anchored


def test_anchor_verdicts_on_halving_chain():
    chain = halving_chain(5, 6)
    for level in (0, 1):
        verdict = level_anchor_verdict(chain, level)
        assert not verdict.stabilized and not verdict.short_window
        assert verdict.anchor_scale == Fraction(3, 16)
        assert verdict.anchor_from == 2
        assert verdict.anchored
    for level in (2, 3):
        assert level_anchor_verdict(chain, level).short_window
    assert level_anchor_verdict(chain, 4).stabilized


def test_window_chain_base_level_not_anchored():
    chain = window_chain(4)
    verdict = level_anchor_verdict(chain, 0)
    assert not verdict.stabilized
    assert not verdict.short_window
    assert verdict.anchor_scale is None
    assert not verdict.anchored
    # the two levels just under the top are too close to judge
    assert level_anchor_verdict(chain, 1).short_window
    assert level_anchor_verdict(chain, 2).short_window
    assert level_anchor_verdict(chain, 3).stabilized


def test_short_chain_gives_short_windows():
    chain = halving_chain(3, 6)
    assert level_anchor_verdict(chain, 0).short_window
    assert level_anchor_verdict(chain, 1).short_window
    assert level_anchor_verdict(chain, 2).stabilized


# ---- separation indices ----


def test_separation_index_on_tower():
    tower = retraction_tower(5)
    bundle = thread_space(tower)
    fine = separation_index(tower, Fraction(1, 1000))
    assert fine.found and fine.level == 4
    coarse = separation_index(tower, bundle.space.diameter())
    assert coarse.found and coarse.level == 0

    # direct check of the certified threshold at the found level
    level = fine.level
    proj = bundle.projection(level)
    for a in range(bundle.space.n):
        for b in range(bundle.space.n):
            if tower.levels[level].d(proj[a], proj[b]) < fine.threshold:
                assert bundle.space.d(a, b) <= fine.epsilon


# ---- telescopes ----


def test_telescope_matches_mapping_cylinder():
    base = interval_points([0, 1], Fraction(1, 2))
    target = interval_points([0], Fraction(1))
    trunc = inverse_sequence([target, base], [(0, 0)])
    tele = telescope_metric(trunc, 0, 1, GRID)
    cyl = mapping_cylinder_metric(base, target, (0, 0), GRID)
    assert tele.space.points == cyl.space.points
    for a in range(tele.space.n):
        for b in range(tele.space.n):
            assert tele.space.d(a, b) == cyl.space.d(a, b)
    assert tele.level_class(0) == tuple(cyl.y_index(j) for j in range(target.n))
    assert tele.level_class(1) == tuple(
        cyl.class_index(i, Fraction(0)) for i in range(base.n)
    )


def test_telescope_stacks_cylinder_lengths():
    tower = retraction_tower(4)
    tele = telescope_metric(tower, 0, 3, GRID)
    assert tele.all_certified
    deep = tele.level_class(3)
    for a in range(tower.levels[3].n):
        for b in range(tower.levels[3].n):
            want = tower.levels[3].d(a, b) + tower.levels[2].d(min(a, 2), min(b, 2))
            assert tele.space.d(deep[a], deep[b]) == want


def test_telescope_single_level_is_the_level():
    tower = retraction_tower(4)
    assert telescope_metric(tower, 2, 2).space is tower.levels[2]


def test_telescope_range_validation():
    tower = retraction_tower(4)
    with pytest.raises(StructuralError, match="range"):
        telescope_metric(tower, 0, 9)
    with pytest.raises(StructuralError, match="range"):
        telescope_metric(tower, 2, 1)


# ---- ladders and perturbation limits ----


def identity_cross(truncation):
    return [tuple(range(truncation.levels[i].n)) for i in range(truncation.top + 1)]


def test_exact_ladder_has_zero_closeness():
    tower = retraction_tower(5)
    data = ladder(tower, tower, cross=identity_cross(tower))
    report = perturbation_limit(data)
    assert report.hypotheses_ok
    assert report.bounds_ok
    for row in report.limit_rows:
        assert row.measured == 0
    assert report.thread_map == tuple(range(tower.levels[tower.top].n))
    assert report.unique is True
    assert report.injective_observed
    assert report.injective_certified is True


def test_zero_budget_ladder_flags_bad_squares():
    tower = retraction_tower(5)
    cross = identity_cross(tower)
    cross[2] = (0, 2, 1)
    data = ladder(tower, tower, cross=cross, alphas=[Fraction(0)] * tower.top)
    report = perturbation_limit(data)
    assert not report.hypotheses_ok
    bad = {row.level for row in report.square_rows if not row.ok}
    assert bad and bad <= {1, 2}


def test_measured_budgets_absorb_the_swap():
    tower = retraction_tower(5)
    cross = identity_cross(tower)
    cross[2] = (0, 2, 1)
    data = ladder(tower, tower, cross=cross)
    report = perturbation_limit(data)
    assert all(row.ok for row in report.square_rows)
    assert report.bounds_ok
    # every limit row stays within its advertised two-beta bound
    for row in report.limit_rows:
        assert row.measured <= row.bound


def test_ladder_shape_validation():
    tower = retraction_tower(4)
    cross = identity_cross(tower)
    with pytest.raises(StructuralError, match="cross"):
        ladder(tower, tower, cross=cross[:-1])
    with pytest.raises(StructuralError, match="alpha"):
        ladder(tower, tower, cross=cross, alphas=[Fraction(1)])
    with pytest.raises(StructuralError, match="beta"):
        ladder(tower, tower, cross=cross, betas=[Fraction(1, 9)])
    with pytest.raises(PreconditionError, match="positive"):
        ladder(
            tower, tower, cross=cross, betas=[Fraction(0)] * (tower.top + 1)
        )
    with pytest.raises(StructuralError, match="nondecreasing"):
        ladder(
            tower,
            tower,
            cross=cross,
            indices=[3, 2, 1, 0][: tower.top + 1],
        )
