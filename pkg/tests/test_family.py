from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from nadsys.family import (
    CustomFamily,
    Decision,
    Family,
    dual_check,
    member,
    prefix_densities,
    translate,
    upper_density,
)
from nadsys.ndsys import CertificateKind, HitSetReport, TailCertificate, constant_system, hit_set
from nadsys.plmap import IntervalSet

from conftest import TENT

UNKNOWN = TailCertificate.unknown()


def report(hits, horizon, cert=UNKNOWN):
    return HitSetReport(tuple(sorted(hits)), horizon, cert)


def test_family_metadata():
    assert Family.INFINITE.dual is Family.COFINITE and Family.COFINITE.dual is Family.INFINITE
    assert Family.INFINITE.filterdual and not Family.SYNDETIC.filterdual
    assert all(f.translation_invariant for f in Family)
    assert Family.parse("PUD") is Family.POSITIVE_UPPER_DENSITY
    with pytest.raises(NotImplementedError):
        Family.THICK.dual


def test_certificates_decide_every_builtin_family():
    empty = TailCertificate(CertificateKind.EVENTUALLY_EMPTY, 3, 1)
    full = TailCertificate(CertificateKind.EVENTUALLY_FULL, 5, 2)
    for fam in Family:
        assert member(report([1, 2], 50, empty), fam).decision is Decision.NO_CERTIFIED
        assert member(report(range(5, 51), 50, full), fam).decision is Decision.YES_CERTIFIED


def test_syndetic_gap_bound_from_certificate():
    full = TailCertificate(CertificateKind.EVENTUALLY_FULL, 10, 1)
    v = member(report([2] + list(range(10, 31)), 30, full), Family.SYNDETIC)
    # gaps: 0->2, 2->10
    assert v.evidence["gap_bound"] == 8


def test_horizon_rules():
    h = 100
    assert member(report([], h), Family.INFINITE).decision is Decision.NO_AT_HORIZON
    assert member(report([3, 7], h), Family.INFINITE).decision is Decision.INCONCLUSIVE
    assert member(report([3, 90], h), Family.INFINITE).decision is Decision.YES_AT_HORIZON

    v = member(report(range(40, 101), h), Family.COFINITE)
    assert v.decision is Decision.YES_AT_HORIZON
    assert v.evidence == {"first_miss": 1, "last_miss": 39}
    assert member(report([1, 2, 3], h), Family.COFINITE).decision is Decision.INCONCLUSIVE

    evens = range(2, 101, 2)
    assert member(report(evens, h), Family.SYNDETIC).decision is Decision.YES_AT_HORIZON
    assert member(report([1, 99], h), Family.SYNDETIC).decision is Decision.NO_AT_HORIZON

    assert member(report(range(10, 40), h), Family.THICK).decision is Decision.YES_AT_HORIZON
    assert member(report(evens, h), Family.THICK).decision is Decision.NO_AT_HORIZON

    assert member(report(evens, h), Family.POSITIVE_UPPER_DENSITY).decision.is_yes
    # 1/200 falls under the default 1/100 threshold; 3/100 does not
    assert (member(report([1], 200), Family.POSITIVE_UPPER_DENSITY).decision
            is Decision.NO_AT_HORIZON)
    assert member(report([1, 2, 3], h), Family.POSITIVE_UPPER_DENSITY).decision.is_yes
    assert (member(report([1, 2, 3], h), Family.POSITIVE_UPPER_DENSITY, F(1, 20)).decision
            is Decision.NO_AT_HORIZON)


@given(st.sets(st.integers(1, 60)), st.integers(1, 60))
def test_prefix_densities_oracle(hits, h):
    hits = {n for n in hits if n <= h}
    dens = prefix_densities(report(hits, h))
    assert dens == [F(sum(1 for m in hits if m <= n), n) for n in range(1, h + 1)]
    ud = upper_density(report(hits, h))
    assert ud.estimate == max(dens) and ud.final == dens[-1] and ud.exact is None


def test_upper_density_exact_from_certificate():
    rep = hit_set(constant_system(TENT), IntervalSet.open(0, F(1, 8)),
                  IntervalSet.open(F(1, 2), F(3, 4)), 40)
    ud = upper_density(rep)
    assert ud.exact == 1 and ud.final == F(38, 40)


@given(st.sets(st.integers(1, 40)), st.integers(-5, 5))
def test_translate(hits, i):
    assert translate(hits, i) == {n + i for n in hits if n + i >= 1}


def test_dual_check():
    rep = report(range(40, 101), 100)
    assert dual_check(Family.INFINITE, rep).family == "cofinite"
    assert dual_check(Family.INFINITE, rep).decision is Decision.YES_AT_HORIZON
    with pytest.raises(NotImplementedError):
        dual_check(Family.SYNDETIC, rep)


def test_custom_family():
    def odd_prefix(hits, horizon):
        return (Decision.YES_AT_HORIZON if any(n % 2 for n in hits) else Decision.NO_AT_HORIZON,
                {"odd": [n for n in hits if n % 2]})

    fam = CustomFamily("has-odd", odd_prefix)
    assert member(report([2, 3], 10), fam).decision is Decision.YES_AT_HORIZON
    assert member(report([2, 4], 10), fam).evidence == {"odd": []}

    cheat = CustomFamily("cheat", lambda hits, h: (Decision.YES_CERTIFIED, {}))
    with pytest.raises(ValueError):
        member(report([1], 10), cheat)

    handled = CustomFamily("finite-ok", odd_prefix,
                           lambda cert, hits: Decision.YES_CERTIFIED if cert.is_empty else None)
    empty = TailCertificate(CertificateKind.EVENTUALLY_EMPTY, 1, 1)
    assert member(report([], 10, empty), handled).decision is Decision.YES_CERTIFIED
