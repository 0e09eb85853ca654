from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from nadsys.classify import (
    FiniteSubset,
    OpenSetGrid,
    PreconditionError,
    Verdict,
    VietorisOpen,
    check_finite_family_prop,
    check_shift_relation,
    check_uniform_limit,
    classify_ergodic,
    classify_mixing,
    classify_transitive,
    hyper_hit,
    product_hit_set,
)
from nadsys.family import Decision, Family
from nadsys.ndsys import Cycle, EventuallyConstant, constant_system, hit_set, shift_system
from nadsys.plmap import IntervalSet, compose, identity

from conftest import TENT, dyadic_open, grid, pl, pl_maps

# maps generating an invariant-interval pair whose composition is transitive
F1 = pl((0, 0), ("1/4", 1), (1, "1/4"))
F2 = pl((0, "1/4"), ("1/4", 0), (1, 1))
CRUSH = pl((0, 1), ("1/3", 1), (1, 0))
G2 = pl((0, 0), ("1/3", 1), (1, 0))


def test_grid_cells():
    cells = OpenSetGrid(2).cells()
    assert [str(c) for c in cells] == ["(0,1/4)", "(1/4,1/2)", "(1/2,3/4)", "(3/4,1)"]
    with pytest.raises(ValueError):
        OpenSetGrid(0)


def test_tent_is_transitive_and_mixing():
    rep = classify_transitive(constant_system(TENT), Family.INFINITE, OpenSetGrid(2), 200)
    assert rep.verdict is Verdict.CERTIFIED_YES and rep.all_pairs_hit
    assert len(rep.pairs) == 16 and rep.witness is None
    mix = classify_mixing(constant_system(TENT), Family.INFINITE, OpenSetGrid(2), 200)
    assert mix.verdict is Verdict.CERTIFIED_YES and len(mix.pairs) == 256


def test_identity_is_not_transitive():
    rep = classify_transitive(constant_system(identity()), Family.INFINITE, OpenSetGrid(2), 100)
    assert rep.verdict is Verdict.PROVEN_NO
    # lexicographic order puts ((0,1/4), (1/4,1/2)) first among refuting pairs
    assert str(rep.witness.U[0]) == "(0,1/4)" and str(rep.witness.V[0]) == "(1/4,1/2)"
    assert rep.witness_report.certificate.is_empty
    assert len(rep.refuting_pairs) == 12


def test_crushing_first_map_refutes_transitivity():
    rep = classify_transitive(EventuallyConstant([CRUSH], G2), Family.INFINITE,
                              OpenSetGrid(3), 500)
    assert rep.verdict is Verdict.PROVEN_NO
    assert rep.witness.decision is Decision.NO_CERTIFIED


def test_ergodic_positive_and_negative():
    assert classify_ergodic(constant_system(TENT), OpenSetGrid(2), 300).verdict.positive
    crushed = EventuallyConstant([pl((0, "1/2"), ("1/2", "1/2"), (1, 1))], TENT)
    rep = classify_ergodic(crushed, OpenSetGrid(2), 300)
    assert rep.verdict is Verdict.PROVEN_NO
    assert rep.evidence["min_estimate"] == 0


def test_certificates_do_not_depend_on_horizon():
    # tail certificates come from orbit search, not from the observed prefix
    rep = classify_transitive(constant_system(TENT), Family.INFINITE, OpenSetGrid(3), 4)
    assert rep.verdict is Verdict.CERTIFIED_YES


@given(st.lists(pl_maps(max_nodes=4), min_size=1, max_size=2),
       dyadic_open(), dyadic_open(), dyadic_open(), dyadic_open())
def test_product_hit_set_is_intersection(maps, U1, V1, U2, V2):
    seq = Cycle(maps)
    prod = product_hit_set(seq, U1, V1, U2, V2, 80)
    a, b = hit_set(seq, U1, V1, 80), hit_set(seq, U2, V2, 80)
    assert set(prod.hits) == set(a.hits) & set(b.hits)
    if a.certificate.is_empty or b.certificate.is_empty:
        assert prod.certificate.is_empty


# --- hyperspace --------------------------------------------------------------


def test_vietoris_membership():
    U1, U2 = IntervalSet.open(0, F(1, 4)), IntervalSet.open(F(1, 2), 1)
    V = VietorisOpen([U1, U2])
    assert FiniteSubset([F(1, 8), F(3, 4)]) in V
    assert FiniteSubset([F(1, 8)]) not in V          # misses U2
    assert FiniteSubset([F(1, 8), F(1, 3), F(3, 4)]) not in V  # 1/3 outside the union
    with pytest.raises(ValueError):
        FiniteSubset([])


@given(st.lists(pl_maps(max_nodes=4), min_size=1, max_size=2), dyadic_open(), dyadic_open(),
       st.lists(st.integers(0, 7), min_size=1, max_size=3), st.integers(1, 12))
def test_hyperspace_hit_implies_base_hit(maps, U, V, offsets, n):
    seq = Cycle(maps)
    part = U.parts[0]
    pts = [part.lo + (part.hi - part.lo) * (2 * k + 1) / 16 for k in offsets]
    K = FiniteSubset(pts)
    assert K in VietorisOpen([U])
    if hyper_hit(seq, K, n, VietorisOpen([V])):
        assert n in hit_set(seq, U, V, n)


# --- instance checkers -------------------------------------------------------


def test_uniform_limit_bounds_for_tent_iterates():
    T2 = compose(TENT, TENT)
    seq = EventuallyConstant([T2, identity(), T2], TENT)
    rep = check_uniform_limit(seq, TENT, grid(41), k_max=20)
    assert rep.bounds_hold
    assert rep.distance_sum == sum(rep.distances)
    assert rep.checked_points == 41


def test_uniform_limit_preconditions():
    with pytest.raises(PreconditionError) as err:
        check_uniform_limit(EventuallyConstant([F1], TENT), TENT, grid(5), 3)
    assert err.value.index == 1
    with pytest.raises(PreconditionError):
        check_uniform_limit(Cycle([TENT, F1]), TENT, grid(5), 3)


def test_uniform_limit_classifications():
    seq = EventuallyConstant([compose(TENT, TENT)], TENT)
    rep = check_uniform_limit(seq, TENT, grid(9), 5, grid=OpenSetGrid(2), horizon=200)
    assert rep.classifications_agree and rep.seq_verdict.positive


def test_shift_relation_feeble_open():
    seq = Cycle([F1, F2])
    r = check_shift_relation(seq, IntervalSet.open(0, F(1, 8)),
                             IntervalSet.open(F(1, 2), F(3, 4)), 3, 200)
    assert r.status == "ok" and r.violations == []
    assert set(m + 2 for m in r.shifted_hits) <= set(r.hits)


def test_shift_relation_hypothesis_failure():
    seq = EventuallyConstant([CRUSH], G2)
    r = check_shift_relation(seq, IntervalSet.open(0, F(1, 6)),
                             IntervalSet.open(F(1, 2), F(3, 4)), 2, 100)
    assert r.status == "hypothesis-failure" and r.U_star.is_empty


def test_finite_family_composition_transitive():
    rep = check_finite_family_prop(Cycle([F1, F2]), OpenSetGrid(2), 400)
    assert rep.composition == compose(F2, F1)
    assert rep.composition_verdict.positive and rep.cycle_verdict.positive
    assert rep.implication_holds and rep.index_violations == []
    with pytest.raises(TypeError):
        check_finite_family_prop(constant_system(TENT), OpenSetGrid(2), 10)


def test_finite_family_converse_can_fail():
    # the composition keeps [1/2,1] invariant, yet the cycle still reaches everywhere
    f1 = pl((0, "1/2"), ("1/4", 1), ("3/4", 0), (1, "1/2"))
    f2 = pl((0, "1/2"), ("1/2", 1), ("2/3", 0), (1, 1))
    rep = check_finite_family_prop(Cycle([f1, f2]), OpenSetGrid(2), 500)
    assert rep.composition_verdict is Verdict.PROVEN_NO
    assert rep.cycle_verdict.positive and rep.implication_holds


def test_finite_family_identity_cycle():
    rep = check_finite_family_prop(Cycle([identity(), identity()]), OpenSetGrid(2), 100)
    assert rep.composition_verdict is Verdict.PROVEN_NO is rep.cycle_verdict


@pytest.mark.parametrize("seq", [constant_system(identity()),
                                 EventuallyConstant([CRUSH], G2)])
def test_mixing_refutation_survives_refinement(seq):
    coarse = classify_mixing(seq, Family.INFINITE, OpenSetGrid(2), 200)
    fine = classify_mixing(seq, Family.INFINITE, OpenSetGrid(3), 200)
    assert coarse.verdict is Verdict.PROVEN_NO is fine.verdict


@pytest.mark.parametrize("k", [1, 2])
def test_shifted_cycle_agrees_when_feeble_open(k):
    seq = Cycle([F1, F2])
    a = classify_transitive(seq, Family.INFINITE, OpenSetGrid(2), 200)
    b = classify_transitive(shift_system(seq, k), Family.INFINITE, OpenSetGrid(2), 200)
    assert a.verdict.positive == b.verdict.positive
