import itertools
import random

import pytest

from mackeykit.groups import builtin_group
from mackeykit.gsets import (
    GMap,
    GSet,
    canonicalize,
    coproduct,
    coset_index_of,
    disjoint_union_of_orbits,
    empty_gset,
    find_isomorphism,
    orbit_decompose,
    point_gset,
    product,
    pullback,
    standard_orbit,
)

BATTERY = ("trivial", "C2", "C3", "C4", "C2xC2", "S3", "C6")


def random_relabel(X, rng):
    perm = list(range(X.size))
    rng.shuffle(perm)
    inv = [perm.index(i) for i in range(X.size)]
    return GSet(X.group, [[perm[X.act(g, inv[p])] for p in range(X.size)]
                          for g in X.group.elements()])


def backtracking_isomorphism(X, Y):
    """Independent oracle: exhaustive equivariant bijection search."""
    if X.size != Y.size:
        return None
    group = X.group
    orbits = X.orbits()

    def extend(assigned, used):
        if len(assigned) == len(orbits):
            return dict_to_map(assigned)
        orbit = orbits[len(assigned)]
        base = orbit[0]
        for y in range(Y.size):
            if y in used:
                continue
            # try sending base -> y and propagating equivariantly
            image = {}
            ok = True
            for g in group.elements():
                src = X.act(g, base)
                tgt = Y.act(g, y)
                if src in image and image[src] != tgt:
                    ok = False
                    break
                image[src] = tgt
            if not ok:
                continue
            vals = set(image.values())
            if len(vals) != len(image) or (vals & used):
                continue
            out = extend(assigned + [image], used | vals)
            if out is not None:
                return out
        return None

    def dict_to_map(assigned):
        mapping = {}
        for image in assigned:
            mapping.update(image)
        return GMap(X, Y, [mapping[x] for x in range(X.size)])

    return extend([], set())


def test_orbit_decompose_examples():
    S3 = builtin_group("S3")
    # empty G-set
    assert orbit_decompose(empty_gset(S3))[0] == []
    # G acting on itself by left translation: one free orbit
    Ge = standard_orbit(S3, 0)
    counts, iso = orbit_decompose(Ge)
    assert counts == [(0, 1)]
    assert iso.is_bijective()
    # S3 on 3 letters = S3/C2
    letters = GSet(S3, [[p[x] for x in range(3)] for p in
                        sorted(itertools.permutations(range(3)))])
    counts, iso = orbit_decompose(letters)
    labels = [(S3.subgroup_classes()[c].label, m) for c, m in counts]
    assert labels == [("C2", 1)]


def test_stabilizer_letters_oracle():
    S3 = builtin_group("S3")
    letters = GSet(S3, [[p[x] for x in range(3)] for p in
                        sorted(itertools.permutations(range(3)))])
    stab = letters.stabilizer(0)
    # direct check against the permutation action
    perms = sorted(itertools.permutations(range(3)))
    assert set(stab) == {i for i, p in enumerate(perms) if p[0] == 0}


def test_product_examples():
    S3 = builtin_group("S3")
    C2 = builtin_group("C2")
    pt = point_gset(S3)
    OC2 = standard_orbit(S3, 1)
    # X x pt = X
    for cidx in range(4):
        X = standard_orbit(S3, cidx)
        P = product(X, pt)
        assert find_isomorphism(P.gset, X) is not None
    # (C2/e) x (C2/e) = 2 free orbits
    O2e = standard_orbit(C2, 0)
    P = product(O2e, O2e)
    assert P.gset.orbit_type() == (0, 0)
    # (S3/C2) x (S3/C2) = S3/C2 + S3/e
    P2 = product(OC2, OC2)
    assert sorted(P2.gset.orbit_type()) == sorted((0, 1))
    # projections equivariant and jointly injective
    for x in range(OC2.size):
        for y in range(OC2.size):
            p = P2.of_pair(x, y)
            assert P2.left(p) == x and P2.right(p) == y


def test_product_size_and_fixed_points_multiplicative():
    for name in BATTERY:
        group = builtin_group(name)
        norb = len(group.subgroup_classes())
        for i in range(norb):
            for j in range(norb):
                X, Y = standard_orbit(group, i), standard_orbit(group, j)
                P = product(X, Y)
                assert P.gset.size == X.size * Y.size
                for cls in group.subgroup_classes():
                    H = cls.representative
                    assert len(P.gset.fixed_points(H)) == \
                        len(X.fixed_points(H)) * len(Y.fixed_points(H))


def test_coproduct_examples():
    C2 = builtin_group("C2")
    O = standard_orbit(C2, 0)
    cp = coproduct(O, empty_gset(C2))
    assert find_isomorphism(cp.gset, O) is not None
    cp2 = coproduct(O, O)
    assert cp2.gset.orbit_type() == (0, 0)
    # injections are jointly surjective and equivariant
    hit = set(cp2.left.mapping) | set(cp2.right.mapping)
    assert hit == set(range(cp2.gset.size))


def test_distributivity_witness():
    rng = random.Random(2)
    S3 = builtin_group("S3")
    orbs = [standard_orbit(S3, i) for i in range(4)]
    for _ in range(6):
        X, U, V = (orbs[rng.randrange(4)] for _ in range(3))
        lhs = product(X, coproduct(U, V).gset).gset
        rhs = coproduct(product(X, U).gset, product(X, V).gset).gset
        assert find_isomorphism(lhs, rhs) is not None


def test_pullback_examples():
    C2 = builtin_group("C2")
    pt = point_gset(C2)
    O = standard_orbit(C2, 0)
    # pullback of id, id over Z is Z
    for Z in (pt, O):
        from mackeykit.gsets import identity_map
        pb = pullback(identity_map(Z), identity_map(Z))
        assert find_isomorphism(pb.gset, Z) is not None
    # C2/e x_pt C2/e = two free orbits (2 of 4 pairs per fiber survive)
    f = GMap(O, pt, [0, 0])
    pb = pullback(f, f)
    assert pb.gset.size == 4 and pb.gset.orbit_type() == (0, 0)


def test_pullback_orbits_match_double_cosets():
    for name in BATTERY:
        group = builtin_group(name)
        pt = point_gset(group)
        for ci in group.subgroup_classes():
            for cj in group.subgroup_classes():
                XH = standard_orbit(group, ci.index)
                XK = standard_orbit(group, cj.index)
                pb = pullback(GMap(XH, pt, [0] * XH.size),
                              GMap(XK, pt, [0] * XK.size))
                expected = len(group.double_cosets(ci.representative,
                                                   cj.representative))
                assert len(pb.gset.orbits()) == expected


def test_pullback_commutes_with_coproduct():
    rng = random.Random(3)
    S3 = builtin_group("S3")
    orbs = [standard_orbit(S3, i) for i in range(4)]
    pt = point_gset(S3)
    for _ in range(5):
        X1, X2, Y = (orbs[rng.randrange(4)] for _ in range(3))
        cp = coproduct(X1, X2)
        f = GMap(cp.gset, pt, [0] * cp.gset.size)
        g = GMap(Y, pt, [0] * Y.size)
        lhs = pullback(f, g).gset
        rhs = coproduct(
            pullback(GMap(X1, pt, [0] * X1.size), g).gset,
            pullback(GMap(X2, pt, [0] * X2.size), g).gset).gset
        assert find_isomorphism(lhs, rhs) is not None


def test_fixed_points_examples():
    C2 = builtin_group("C2")
    O = standard_orbit(C2, 0)
    pt = point_gset(C2)
    G = (0, 1)
    assert O.fixed_points((0,)) == (0, 1)
    assert len(O.fixed_points(G)) == 0
    assert len(pt.fixed_points(G)) == 1
    # (G/H)^G nonempty iff H = G
    for name in BATTERY:
        group = builtin_group(name)
        whole = tuple(range(group.order))
        for cls in group.subgroup_classes():
            X = standard_orbit(group, cls.index)
            fixed = X.fixed_points(whole)
            assert (len(fixed) > 0) == (len(cls.representative) == group.order)


def test_find_isomorphism_matches_backtracking_oracle():
    rng = random.Random(9)
    S3 = builtin_group("S3")
    base = coproduct(standard_orbit(S3, 1), standard_orbit(S3, 2)).gset
    for _ in range(6):
        relab = random_relabel(base, rng)
        found = find_isomorphism(relab, base)
        oracle = backtracking_isomorphism(relab, base)
        assert found is not None and oracle is not None
        assert found.is_bijective()
    # non-isomorphic pairs agree with the oracle too
    A = standard_orbit(S3, 0)
    B = standard_orbit(S3, 1)
    assert find_isomorphism(A, B) is None
    assert backtracking_isomorphism(A, B) is None


def test_orbit_type_complete_invariant_small():
    # exhaustive over C2-sets with at most 3 points: same type <-> isomorphic
    C2 = builtin_group("C2")
    sets = []
    perms1 = [(0,)]
    for size in range(0, 4):
        # enumerate all involutions on `size` points as the action of g=1
        for tau in itertools.permutations(range(size)):
            if all(tau[tau[x]] == x for x in range(size)):
                action = [list(range(size)), list(tau)]
                sets.append(GSet(C2, action))
    for X in sets:
        for Y in sets:
            same = X.orbit_type() == Y.orbit_type()
            assert (find_isomorphism(X, Y) is not None) == same


def test_canonicalize_idempotent_and_invariant():
    rng = random.Random(4)
    for name in ("C4", "S3"):
        group = builtin_group(name)
        X = coproduct(standard_orbit(group, 0),
                      standard_orbit(group, 1)).gset
        canon, iso = canonicalize(X)
        assert canon == canonicalize(canon)[0]
        for _ in range(4):
            relab = random_relabel(X, rng)
            canon2, _ = canonicalize(relab)
            assert canon == canon2
