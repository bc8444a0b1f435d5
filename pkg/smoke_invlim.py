"""Smoke checks for invlim before the real test suite."""
from fractions import Fraction

from unimet.errors import PreconditionError
from unimet.invlim import (
    THREAD_CAP,
    cauchy_report,
    cauchy_row,
    convergence_report,
    convergence_row,
    inverse_sequence,
    ladder,
    mittag_leffler_report,
    perturbation_limit,
    separation_index,
    telescope_metric,
    thread_space,
    threads,
)
from unimet.cylinders import mapping_cylinder_metric
from unimet.spaces import FiniteMetricSpace


def interval_points(labels, scale=Fraction(1)):
    """Metric space on numeric labels with |a-b| * scale distances."""
    pts = tuple(labels)
    rows = tuple(
        tuple(abs(Fraction(a) - Fraction(b)) * scale for b in pts) for a in pts
    )
    return FiniteMetricSpace(pts, rows)


# ---- retraction ladder [i] = {0..i-1}, h_i = min(x, i-1) ----

def retraction_tower(depth, scale=Fraction(1, 8)):
    levels = []
    for i in range(1, depth + 1):
        levels.append(interval_points(range(i), scale))
    bonds = []
    for i in range(1, depth):
        bonds.append(tuple(min(x, i - 1) for x in range(i + 1)))
    return inverse_sequence(levels, bonds)


T = retraction_tower(5)
assert T.top == 4
assert T.composite(4, 0) == (0, 0, 0, 0, 0)
assert T.composite(3, 1) == (0, 1, 1, 1)
assert T.image(4, 2) == (0, 1, 2)
assert T.surjective_bonds() == (True, True, True, True)

ths = threads(T)
assert len(ths) == 5
for t in ths:
    assert t.compatible_with(T)
# thread generated by top point x has entries min(x, i)
assert ths[3].entries == (0, 1, 2, 3, 3)

bundle = thread_space(T)
assert bundle.space.n == 5
# d(thread_0, thread_4): max_i 2^-(i+1) * |min(0,i)-min(4,i)|/8
expected = max(
    Fraction(1, 2 ** (i + 1)) * Fraction(min(4, i), 8) for i in range(5)
)
assert bundle.space.d(0, 4) == expected

ml = mittag_leffler_report(T)
assert ml.all_stabilized
for row in ml.rows:
    # surjective bonds keep every image chain constant from its own level
    assert row.stabilized_at == row.level, row

conv = convergence_report(T)
for row in conv.rows:
    assert row.all_hold, row   # images equal the shadow from level+1 on
cau = cauchy_report(T)
for row in cau.rows:
    assert row.holds_from <= row.level + 1, row

sep = separation_index(T, Fraction(1, 1000))
assert sep.found and sep.level == 4, sep
sep_diam = separation_index(T, bundle.space.diameter())
assert sep_diam.found and sep_diam.level == 0, sep_diam

# ---- identity tower: everything trivially stable ----

X = interval_points([0, 1], Fraction(1, 2))
ident = inverse_sequence([X, X, X], [(0, 1), (0, 1)])
assert mittag_leffler_report(ident).all_stabilized
for row in convergence_report(ident).rows:
    assert row.all_hold
si = separation_index(ident, Fraction(0))
assert si.level == 0 and si.threshold == Fraction(1, 2), si

# ---- Cauchy-but-divergent shape: grids of (0, 2^-i] shrinking away ----
# Level i holds {2^-k : k = i..floor}; bonds are the inclusions.

def halving_chain(depth, floor):
    levels = []
    for i in range(depth):
        pts = tuple(Fraction(1, 2 ** k) for k in range(floor, i - 1, -1))
        levels.append(interval_points(pts))
    bonds = []
    for i in range(depth - 1):
        # level i+1 is the initial segment of level i missing its top point
        bonds.append(tuple(range(floor - i)))
    return inverse_sequence(levels, bonds)


H = halving_chain(5, 6)
assert H.top == 4
# inclusion bonds: images strictly shrink, nothing stabilizes below the top
mlh = mittag_leffler_report(H)
assert not mlh.all_stabilized
assert mlh.rows[H.top].stabilized
# at scales below the window resolution, only the top containment holds
row = convergence_row(H, 0, Fraction(1, 64))
assert row.holds_from == H.top and not row.witnessed, row
# Cauchy with a real witness once 2^-k dips under eps + deepest point
row = cauchy_row(H, 0, Fraction(1, 8))
assert row.witnessed and row.holds_from == 3, row

# finite-scale: convergence at eps implies cauchy at 2 eps from the same anchor
for i in range(H.top + 1):
    for eps in H.levels[i].spectrum():
        c = convergence_row(H, i, eps)
        k = cauchy_row(H, i, 2 * eps)
        assert k.holds_from <= c.holds_from, (i, eps, c, k)

# ---- never-Cauchy shape: windows [k, k+3] sliding right ----

def window_chain(depth, width=3):
    levels = []
    for k in range(depth):
        pts = tuple(range(k, k + width + 1))
        levels.append(interval_points(pts, Fraction(1, 8)))
    bonds = []
    for k in range(depth - 1):
        # level k+1 points k+1..k+1+width; clip into level k's window
        bonds.append(tuple(min(x + 1, width) for x in range(width + 1)))
    return inverse_sequence(levels, bonds)


W = window_chain(4)
# images shift right each step and never settle
mlw = mittag_leffler_report(W)
assert not mlw.all_stabilized
assert not mlw.rows[0].stabilized
# at scales below the shift, no anchor works except the vacuous top
roww = cauchy_row(W, 0, Fraction(1, 16))
assert roww.holds_from == W.top and not roww.witnessed, roww
# at the full shift scale the previous level is a witness
roww2 = cauchy_row(W, 0, Fraction(3, 8))
assert roww2.witnessed, roww2

# ---- telescope vs raw cylinder ----

grid = (0, Fraction(1, 2), 1)
A = interval_points([0, 1], Fraction(1, 2))
B = interval_points([0], Fraction(1))
TT = inverse_sequence([B, A], [(0, 0)])
tele = telescope_metric(TT, 0, 1, grid)
cyl = mapping_cylinder_metric(A, B, (0, 0), grid)
assert tele.space.points == cyl.space.points
assert tele.space.dist == cyl.space.dist
assert tele.level_class(0) == tuple(cyl.y_index(j) for j in range(B.n))
assert tele.level_class(1) == tuple(cyl.class_index(i, Fraction(0)) for i in range(A.n))

# three-level telescope over the retraction tower (rescaled levels fit <= 1)
T3 = retraction_tower(4)
tele3 = telescope_metric(T3, 0, 3, grid)
assert tele3.all_certified
assert tele3.space.n > 0
# deep end slice keeps the adjusted metric of the last cylinder:
last_src = T3.levels[3]
last_tgt = T3.levels[2]
deep = tele3.level_class(3)
for a in range(last_src.n):
    for b in range(last_src.n):
        want = last_src.d(a, b) + last_tgt.d(min(a, 2), min(b, 2))
        assert tele3.space.d(deep[a], deep[b]) == want, (a, b)
# single level comes back unchanged
t_same = telescope_metric(T3, 2, 2)
assert t_same.space is T3.levels[2]

# ---- perturbation ladder: exact commuting gives zero defects ----

L = ladder(T, T, cross=[tuple(range(T.levels[i].n)) for i in range(T.top + 1)])
rep = perturbation_limit(L)
assert rep.hypotheses_ok, (rep.square_rows, rep.continuity_rows)
assert rep.bounds_ok
for row in rep.limit_rows:
    assert row.measured == 0, row
assert rep.thread_map == tuple(range(T.levels[T.top].n))
assert rep.unique is True, rep.uniqueness_rows
assert rep.injective_observed
assert rep.injective_certified is True, rep.injectivity_rows

# perturbed cross map at level 1: swap two points -> nonzero defect detected
cross = [tuple(range(T.levels[i].n)) for i in range(T.top + 1)]
cross[2] = (0, 2, 1)
L2 = ladder(T, T, cross=cross, alphas=[Fraction(0)] * T.top)
rep2 = perturbation_limit(L2)
assert not rep2.hypotheses_ok
bad = [r for r in rep2.square_rows if not r.ok]
assert {r.level for r in bad} <= {1, 2} and bad, bad
assert any(not r.ok for r in rep2.limit_rows) or rep2.bounds_ok

# with measured alphas the closeness hypothesis holds by construction
L3 = ladder(T, T, cross=cross)
rep3 = perturbation_limit(L3)
assert all(r.ok for r in rep3.square_rows)

# cap enforcement
big = interval_points(range(THREAD_CAP + 1), Fraction(1, 32))
Tbig = inverse_sequence([big], [])
try:
    threads(Tbig)
except PreconditionError as e:
    assert "cap" in str(e)
else:
    raise AssertionError("cap not enforced")

print("invlim smoke OK")
