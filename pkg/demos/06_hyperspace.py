"""Finite subsets in the hyperspace and the distances between them.

Run: python demos/06_hyperspace.py
"""

from fractions import Fraction as F

from nadsys import IntervalSet, PLMap, constant_system
from nadsys.classify import FiniteSubset, VietorisOpen, hyper_hit
from nadsys.plmap import hausdorff_distance

tent = PLMap(((F(0), F(0)), (F(1, 2), F(1)), (F(1), F(0))))
seq = constant_system(tent)

U1, U2 = IntervalSet.open(0, F(1, 4)), IntervalSet.open(F(1, 2), F(3, 4))
K = FiniteSubset([F(1, 8), F(5, 8)])
print("K =", [str(x) for x in K.points], " in <U1,U2>:", K in VietorisOpen([U1, U2]))

target = VietorisOpen([IntervalSet.open(F(1, 4), 1)])
for n in range(1, 5):
    print(f"n={n}: image points", [str(x) for x in K.image(seq, n).points],
          " in target:", hyper_hit(seq, K, n, target))

A = [F(0), F(1, 2)]
B = IntervalSet.closed(F(1, 4), F(3, 4))
print("Hausdorff distance between", [str(x) for x in A], "and", B, "=", hausdorff_distance(A, B))
