from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from nadsys.plmap import (
    DomainError,
    Interval,
    IntervalSet,
    PLMap,
    as_rational,
    compose,
    constant,
    evaluate,
    hausdorff_distance,
    identity,
    image,
    is_feeble_open,
    is_invariant,
    preimage,
    sup_distance,
    validate_nodes,
    validate_pieces,
)

from conftest import TENT, grid, interval_sets, pl, pl_maps


def probe_points(*sets):
    """Endpoints plus midpoints between them: enough to decide set equality."""
    ends = {F(0), F(1)}
    for s in sets:
        for p in s.parts:
            ends |= {p.lo, p.hi}
    ends = sorted(ends)
    return ends + [(a + b) / 2 for a, b in zip(ends, ends[1:])]


# --- rationals and intervals -------------------------------------------------


def test_as_rational_rejects_floats():
    with pytest.raises(TypeError):
        as_rational(0.5)
    with pytest.raises(TypeError):
        as_rational(True)
    assert as_rational("3/6") == F(1, 2)


def test_interval_membership_respects_endpoints():
    iv = Interval(F(1, 4), F(1, 2), lo_closed=False, hi_closed=True)
    assert F(1, 4) not in iv and F(1, 2) in iv and F(1, 3) in iv
    assert str(iv) == "(1/4,1/2]"
    assert str(Interval.point(F(1, 3))) == "{1/3}"
    with pytest.raises(ValueError):
        Interval(F(1, 2), F(1, 2), False, True)


def test_interval_set_merges_touching_parts():
    s = IntervalSet.of(Interval.open(0, F(1, 2)), Interval.closed(F(1, 2), F(3, 4)))
    assert len(s) == 1 and str(s) == "(0,3/4]"
    gap = IntervalSet.of(Interval.open(0, F(1, 2)), Interval.open(F(1, 2), 1))
    assert len(gap) == 2 and F(1, 2) not in gap


@given(interval_sets(), interval_sets())
def test_set_algebra_matches_pointwise(a, b):
    u, i = a | b, a & b
    for x in probe_points(a, b):
        assert (x in u) == (x in a or x in b)
        assert (x in i) == (x in a and x in b)
    assert a.meets(b) == (not i.is_empty)
    assert (a <= b) == all(x in b for x in probe_points(a, b) if x in a)


@given(interval_sets())
def test_canonical_form_is_idempotent(a):
    assert IntervalSet(a.parts) == a
    for p, q in zip(a.parts, a.parts[1:]):
        assert p.hi < q.lo or (p.hi == q.lo and not p.hi_closed and not q.lo_closed)


# --- maps --------------------------------------------------------------------


def test_tent_values():
    assert TENT(F(1, 2)) == 1
    assert evaluate(TENT, F(1, 4)) == F(1, 2)
    assert TENT(1) == 0
    with pytest.raises(DomainError):
        TENT(F(3, 2))


def test_collinear_nodes_are_removed():
    m = pl((0, 0), ("1/4", "1/4"), (1, 1))
    assert m == identity() and len(m.nodes) == 2


def test_validate_nodes_messages():
    assert validate_nodes([(F(0), F(0)), (F(1), F(2))]) == [(1, "value 2 at x=1 outside [0,1]")]
    probs = validate_nodes([(F(0), F(0)), (F(1, 2), F(1)), (F(1, 3), F(0)), (F(1), F(1))])
    assert [i for i, _ in probs] == [2]
    assert validate_nodes([(F(0), F(0)), (F(1, 2), F(1))])[0][1].startswith("last node")


def test_validate_pieces_one_problem_per_typo():
    printed = [(F(0), F(1, 4), F(-2), F(1, 2)), (F(1, 4), F(1, 2), F(4), F(-1)),
               (F(1, 2), F(1), F(-2), F(-2))]
    assert validate_pieces(printed) == [(2, "value -3 at x=1/2 outside [0,1]")]
    jump = [(F(0), F(1, 2), F(0), F(0)), (F(1, 2), F(1), F(0), F(1))]
    assert validate_pieces(jump)[0][1].startswith("discontinuity at x=1/2")


def test_from_pieces_matches_nodes():
    m = PLMap.from_pieces([(0, F(1, 2), 2, 0), (F(1, 2), 1, -2, 2)])
    assert m == TENT
    assert m.pieces() == [(0, F(1, 2), 2, 0), (F(1, 2), 1, -2, 2)]


def test_tent_image_and_preimage():
    assert str(image(TENT, IntervalSet.open(F(1, 4), F(3, 4)))) == "(1/2,1]"
    half_up = IntervalSet.of(Interval(F(1, 2), 1, False, True))
    assert str(preimage(TENT, half_up)) == "(1/4,3/4)"
    # 1 = tent(1/2) is excluded from (1/2,1), which splits the preimage
    assert str(preimage(TENT, IntervalSet.open(F(1, 2), 1))) == "(1/4,1/2) | (1/2,3/4)"


def test_flat_piece_image_and_preimage():
    f = pl((0, 0), ("1/4", "1/2"), ("1/2", "1/2"), (1, 1))
    assert str(image(f, IntervalSet.open(F(1, 4), F(1, 2)))) == "{1/2}"
    assert str(preimage(f, IntervalSet.open(F(1, 4), F(1, 2)))) == "(1/8,1/4)"
    assert not is_feeble_open(f) and is_feeble_open(TENT)


@given(pl_maps(), pl_maps())
def test_compose_matches_pointwise(f, g):
    h = compose(g, f)
    pts = set(grid(25)) | set(f.breakpoints) | set(h.breakpoints)
    for x in pts:
        assert h(x) == g(f(x))


@given(pl_maps(), pl_maps(), pl_maps())
def test_compose_is_associative(f, g, k):
    assert compose(k, compose(g, f)) == compose(compose(k, g), f)


@given(pl_maps())
def test_identity_is_neutral(f):
    assert compose(f, identity()) == f == compose(identity(), f)


@given(pl_maps(), interval_sets())
def test_image_oracle(f, s):
    img = image(f, s)
    xs = [x for x in probe_points(s) + list(f.breakpoints) if x in s]
    for x in xs:
        assert f(x) in img
    # every point of the image has a preimage inside s
    for y in probe_points(img):
        if y in img:
            assert preimage(f, IntervalSet.points([y])).meets(s)


@given(pl_maps(), interval_sets())
def test_preimage_oracle(f, s):
    pre = preimage(f, s)
    for x in set(probe_points(pre)) | set(f.breakpoints):
        assert (x in pre) == (f(x) in s)


@given(pl_maps(), pl_maps())
def test_sup_distance_bounds_samples(f, g):
    d = sup_distance(f, g)
    assert all(abs(f(x) - g(x)) <= d for x in grid(41))
    assert d == sup_distance(g, f)
    assert d == max(abs(f(x) - g(x)) for x in set(f.breakpoints) | set(g.breakpoints))


def test_constant_and_invariance():
    assert constant(F(1, 3))(F(1, 7)) == F(1, 3)
    f1 = pl((0, 0), ("1/4", 1), (1, "1/4"))
    assert is_invariant(f1, Interval.closed(F(1, 4), 1))
    assert not is_invariant(f1, Interval.closed(0, F(1, 4)))


def _brute_hausdorff(a, b):
    def d(A, B):
        return max(min(abs(x - y) for y in B) for x in A)
    return max(d(a, b), d(b, a))


@given(st.lists(st.fractions(0, 1, max_denominator=20), min_size=1, max_size=6),
       st.lists(st.fractions(0, 1, max_denominator=20), min_size=1, max_size=6))
def test_hausdorff_points_matches_brute_force(a, b):
    assert hausdorff_distance(a, b) == _brute_hausdorff(a, b)


def test_hausdorff_of_intervals():
    a = IntervalSet.closed(0, F(1, 2))
    b = IntervalSet.of(Interval.closed(0, F(1, 8)), Interval.closed(F(3, 8), F(1, 2)))
    # the gap midpoint 1/4 is 1/8 from b
    assert hausdorff_distance(a, b) == F(1, 8)
    assert hausdorff_distance(IntervalSet.open(0, 1), [F(0), F(1)]) == F(1, 2)
