"""Grid classification of transitivity, mixing and ergodicity.

A negative verdict comes with one certified refuting pair. A positive verdict
is relative to the dyadic grid.

Run: python demos/04_classification.py
"""

from fractions import Fraction as F

from nadsys import (
    EventuallyConstant,
    Family,
    OpenSetGrid,
    PLMap,
    classify_ergodic,
    classify_transitive,
    constant_system,
)
from nadsys.classify import check_finite_family_prop
from nadsys.ndsys import Cycle
from nadsys.plmap import compose


def pl(*nodes):
    return PLMap(tuple((F(x), F(y)) for x, y in nodes))


tent = pl((0, 0), ("1/2", 1), (1, 0))
half_flat = pl((0, "1/2"), ("1/2", "1/2"), (1, 1))
grid = OpenSetGrid(3)

rep = classify_transitive(constant_system(tent), Family.INFINITE, grid, 500)
print("tent                  :", rep.verdict.value, f"({len(rep.pairs)} pairs)")

rep = classify_ergodic(EventuallyConstant([half_flat], tent), grid, 500)
w = rep.witness
print("flatten then tent     :", rep.verdict.value)
print("   refuting pair U =", w.U[0], " V =", w.V[0],
      " certificate", rep.witness_report.certificate.kind.value)

# two maps, each with an invariant interval, whose cycle is still transitive
f1 = pl((0, 0), ("1/4", 1), (1, "1/4"))
f2 = pl((0, "1/4"), ("1/4", 0), (1, 1))
for f in (f1, f2):
    print("single map            :",
          classify_transitive(constant_system(f), Family.INFINITE, grid, 500).verdict.value)
ff = check_finite_family_prop(Cycle([f1, f2]), grid, 500)
print("composition f2∘f1     :", ff.composition_verdict.value, "  pieces:", compose(f2, f1))
print("cycle f1, f2, f1, ... :", ff.cycle_verdict.value)
