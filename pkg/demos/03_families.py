"""Deciding family membership of hit sets.

Certified tails give exact answers. Without one the answer is labelled as a
horizon observation.

Run: python demos/03_families.py
"""

from fractions import Fraction as F

from nadsys import Family, IntervalSet, PLMap, constant_system, hit_set, member, upper_density
from nadsys.ndsys import Cycle

tent = PLMap(((F(0), F(0)), (F(1, 2), F(1)), (F(1), F(0))))
flip = PLMap(((F(0), F(1)), (F(1), F(0))))

U, V = IntervalSet.open(0, F(1, 8)), IntervalSet.open(F(1, 2), F(3, 4))

rep = hit_set(constant_system(tent), U, V, 200)
print("tent, certificate", rep.certificate.kind.value)
for fam in Family:
    v = member(rep, fam)
    print(f"  {fam.value:10s} {v.decision.value}")

# the reflection swaps two halves, so hits alternate
A, B = IntervalSet.open(0, F(1, 4)), IntervalSet.open(F(3, 4), 1)
rep = hit_set(Cycle([flip]), A, B, 200)
print("reflection, hits", rep.hits[:6], "...")
for fam in (Family.COFINITE, Family.SYNDETIC, Family.THICK):
    print(f"  {fam.value:10s} {member(rep, fam).decision.value}")
ud = upper_density(rep)
print("  upper density exact =", ud.exact, " final prefix density =", ud.final)
