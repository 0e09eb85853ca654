"""Exact piecewise linear maps: composition, images and preimages.

Run: python demos/01_exact_maps.py
"""

from fractions import Fraction as F

from nadsys import IntervalSet, PLMap
from nadsys.plmap import compose, image, preimage, sup_distance

tent = PLMap.from_pieces([(0, F(1, 2), 2, 0), (F(1, 2), 1, -2, 2)])
print("tent       :", tent)

# composition keeps every breakpoint exact; no floats anywhere
t2 = compose(tent, tent)
print("tent∘tent  :", t2)
for lo, hi, a, b in t2.pieces():
    print(f"   on [{lo},{hi}]  y = {a}x {'-' if b < 0 else '+'} {abs(b)}")

U = IntervalSet.open(F(1, 8), F(1, 4))
print("U          :", U)
print("tent(U)    :", image(tent, U))
print("tent²(U)   :", image(t2, U))

# the preimage of an open set splits where the peak value is excluded
V = IntervalSet.open(F(1, 2), 1)
print("tent⁻¹(V)  :", preimage(tent, V))

print("D(tent², tent) =", sup_distance(t2, tent))
