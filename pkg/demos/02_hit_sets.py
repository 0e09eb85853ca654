"""Hit sets of a non-autonomous system and the certificates that settle their tails.

A crushing first map sends an open set onto a point orbit, so the
tent map applied afterwards never reaches V. The certificate proves this for
every n, not only up to the horizon.

Run: python demos/02_hit_sets.py
"""

from fractions import Fraction as F

from nadsys import EventuallyConstant, IntervalSet, PLMap, constant_system, hit_set
from nadsys.ndsys import orbit_images

tent = PLMap(((F(0), F(0)), (F(1, 2), F(1)), (F(1), F(0))))
crush = PLMap(((F(0), F(1)), (F(1, 3), F(1)), (F(1), F(0))))

U, V = IntervalSet.open(0, F(1, 6)), IntervalSet.open(F(1, 2), F(3, 4))

print("tent alone:")
rep = hit_set(constant_system(tent), U, V, 30)
print("  first hits :", rep.hits[:8], "...")
print("  certificate:", rep.certificate.kind.value, "from n =", rep.certificate.base_index)

print("crush first, then tent forever:")
seq = EventuallyConstant([crush], tent)
print("  orbit of U :", [str(A) for A in orbit_images(seq, U, 4)])
rep = hit_set(seq, U, V, 2000)
c = rep.certificate
print("  hits       :", list(rep.hits))
print(f"  certificate: {c.kind.value} from n = {c.base_index}, period {c.period}, "
      f"method {c.method}")
