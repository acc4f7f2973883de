"""Finite groups, their subgroup lattices, and finite G-sets.

Everything downstream is indexed by subgroups up to conjugacy, so this
demo walks the combinatorial ground floor: classes, Weyl groups, double
cosets, and the limit/colimit calculus of G-sets.
"""

from mackeykit import builtin_group, find_isomorphism, product, pullback
from mackeykit.gsets import GMap, point_gset, standard_orbit

S3 = builtin_group("S3")
print(f"{S3.name}: order {S3.order}, {len(S3.subgroups())} subgroups")

print("\nsubgroup classes (label, order, #conjugates, Weyl order):")
for cls in S3.subgroup_classes():
    print(f"  {cls.label:<4} {len(cls.representative):>3} "
          f"{len(cls.conjugates):>3} {cls.weyl_order:>3}")

# double cosets drive the Mackey formula; C2\S3/C2 has two of them
C2sub = S3.subgroup_classes()[1].representative
reps = S3.double_cosets(C2sub, C2sub)
sizes = [len(S3.double_coset_of(g, C2sub, C2sub)) for g in reps]
print(f"\nC2\\S3/C2: {len(reps)} double cosets of sizes {sizes}")

# the orbit category: S3/C2 x S3/C2 decomposes as S3/C2 + S3/e
OC2 = standard_orbit(S3, 1)
P = product(OC2, OC2)
labels = [S3.subgroup_classes()[S3.class_index_of(P.gset.stabilizer(o[0]))].label
          for o in P.gset.orbits()]
print(f"\n(S3/C2) x (S3/C2) has orbits with stabilizers {labels}")

# pullbacks over the point recover double cosets
pt = point_gset(S3)
f = GMap(OC2, pt, [0] * OC2.size)
W = pullback(f, f)
print(f"pullback of S3/C2 -> pt <- S3/C2 has {len(W.gset.orbits())} orbits "
      "(= number of double cosets)")

# orbit type is a complete isomorphism invariant
X = product(OC2, standard_orbit(S3, 2)).gset
Y = product(standard_orbit(S3, 2), OC2).gset
iso = find_isomorphism(X, Y)
print(f"\n(S3/C2) x (S3/C3) = (S3/C3) x (S3/C2): "
      f"{'isomorphic' if iso else 'NOT isomorphic'}")
