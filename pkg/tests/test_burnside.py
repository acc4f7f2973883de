import itertools
import random

import pytest

from mackeykit.groups import builtin_group
from mackeykit.gsets import (
    GMap,
    GSet,
    compose_maps,
    coproduct,
    identity_map,
    point_gset,
    product,
    standard_orbit,
)
from mackeykit.burnside import (
    BurnsideElement,
    basis_element,
    burnside_ring_from_spans,
    burnside_ring_table,
    coevaluation_span,
    compose,
    direct_sum_decompose,
    direct_sum_reassemble,
    dual,
    evaluation_span,
    hom_basis,
    identity_element,
    materialize_code,
    multi_product,
    multimap_basis,
    promonoidal_coend_check,
    restriction_element,
    span_codes,
    span_element,
    table_of_marks,
    tensor,
    transfer_element,
    transitive_code,
    triangle_composite,
    weyl_element,
)

BATTERY = ("trivial", "C2", "C3", "C4", "C2xC2", "S3", "C6")


def orbits_of(group):
    return [standard_orbit(group, i)
            for i in range(len(group.subgroup_classes()))]


def random_element(rng, X, Y, support=2, lo=-2, hi=2):
    basis = hom_basis(X, Y)
    picks = rng.sample(basis, min(support, len(basis)))
    return BurnsideElement(X, Y, {c: rng.randint(lo, hi) for c in picks})


# -- canonical forms -----------------------------------------------------------


def test_identity_and_zero_spans():
    C2 = builtin_group("C2")
    O = standard_orbit(C2, 0)
    ident = identity_element(O)
    assert len(ident.coeffs) == 1
    from mackeykit.gsets import empty_gset
    zero_mid = empty_gset(C2)
    z = span_element(O, O, zero_mid, GMap(zero_mid, O, []), GMap(zero_mid, O, []))
    assert z.is_zero()


def test_translation_span_distinct_from_identity():
    # C2, X = Y = C2/e: middle C2/e with legs (id, translation) is a
    # different class from the identity span
    C2 = builtin_group("C2")
    O = standard_orbit(C2, 0)
    ident = identity_element(O)
    trans = GMap(O, O, [O.act(1, x) for x in range(O.size)])
    tspan = span_element(O, O, O, identity_map(O), trans)
    assert set(tspan.coeffs) != set(ident.coeffs)
    # exhaustive: no equivariant middle iso over X x Y interchanges them
    assert hom_basis(O, O) == sorted(set(ident.coeffs) | set(tspan.coeffs))


def test_canonical_form_invariant_under_middle_relabeling():
    rng = random.Random(0)
    S3 = builtin_group("S3")
    orbs = orbits_of(S3)
    for _ in range(25):
        X, Y = orbs[rng.randrange(4)], orbs[rng.randrange(4)]
        code = rng.choice(hom_basis(X, Y))
        U, left, right = materialize_code(X, Y, code)
        # relabel the middle by a random permutation
        perm = list(range(U.size))
        rng.shuffle(perm)
        inv = [perm.index(i) for i in range(U.size)]
        U2 = GSet(S3, [[perm[U.act(g, inv[p])] for p in range(U.size)]
                       for g in S3.elements()])
        left2 = GMap(U2, X, [left(inv[p]) for p in range(U.size)])
        right2 = GMap(U2, Y, [right(inv[p]) for p in range(U.size)])
        assert span_codes(X, Y, U2, left2, right2) == {code: 1}


def test_hom_basis_against_orbit_enumeration():
    # oracle: orbits of triples (subgroup, x, y) under simultaneous action
    for name in ("C2", "C4", "S3"):
        group = builtin_group(name)
        orbs = orbits_of(group)
        for X in orbs:
            for Y in orbs:
                triples = set()
                for L in group.subgroups():
                    for x in X.fixed_points(L):
                        for y in Y.fixed_points(L):
                            triples.add((L, x, y))
                orbit_count = 0
                seen = set()
                for (L, x, y) in triples:
                    if (L, x, y) in seen:
                        continue
                    orbit_count += 1
                    for g in group.elements():
                        seen.add((group.conjugate_subgroup(g, L),
                                  X.act(g, x), Y.act(g, y)))
                basis = hom_basis(X, Y)
                assert len(basis) == orbit_count
                # each code is the canonical minimum of its orbit
                for (cidx, x, y) in basis:
                    rep = group.subgroup_classes()[cidx].representative
                    cands = []
                    for g in group.elements():
                        conj = group.conjugate_subgroup(g, rep)
                        cands.append((conj, X.act(g, x), Y.act(g, y)))
                    assert min(cands) == (rep, x, y)


def test_hom_basis_examples():
    triv = builtin_group("trivial")
    pt0 = point_gset(triv)
    assert len(hom_basis(pt0, pt0)) == 1
    C2 = builtin_group("C2")
    pt = point_gset(C2)
    O = standard_orbit(C2, 0)
    assert len(hom_basis(pt, pt)) == 2
    assert len(hom_basis(O, O)) == 2


# -- composition ----------------------------------------------------------------


def test_identity_laws_random():
    rng = random.Random(1)
    for name in ("C2", "S3"):
        group = builtin_group(name)
        orbs = orbits_of(group)
        for _ in range(50):
            X, Y = (orbs[rng.randrange(len(orbs))] for _ in range(2))
            s = random_element(rng, X, Y)
            assert compose(identity_element(Y), s) == s
            assert compose(s, identity_element(X)) == s


def test_res_tr_composite_c2():
    C2 = builtin_group("C2")
    pt = point_gset(C2)
    O = standard_orbit(C2, 0)
    f = GMap(O, pt, [0, 0])
    composite = compose(restriction_element(f), transfer_element(f))
    expected = identity_element(O) + span_element(
        O, O, O, identity_map(O),
        GMap(O, O, [O.act(1, x) for x in range(O.size)]))
    assert composite == expected


def test_res_tr_composite_indexed_by_double_cosets():
    S3 = builtin_group("S3")
    pt = point_gset(S3)
    OC2 = standard_orbit(S3, 1)
    f = GMap(OC2, pt, [0] * 3)
    composite = compose(restriction_element(f), transfer_element(f))
    C2rep = S3.subgroup_classes()[1].representative
    assert len(composite.coeffs) == len(S3.double_cosets(C2rep, C2rep))
    assert all(v == 1 for v in composite.coeffs.values())


def test_associativity_random_triples():
    rng = random.Random(2)
    for name in ("C4", "S3"):
        group = builtin_group(name)
        orbs = orbits_of(group)
        for _ in range(60):
            A, B, C, D = (orbs[rng.randrange(len(orbs))] for _ in range(4))
            s1 = random_element(rng, A, B)
            s2 = random_element(rng, B, C)
            s3 = random_element(rng, C, D)
            assert compose(s3, compose(s2, s1)) == compose(compose(s3, s2), s1)


def test_semiadditivity_of_hom_bases():
    S3 = builtin_group("S3")
    orbs = orbits_of(S3)
    X, Xp, Y = orbs[1], orbs[2], orbs[0]
    cp = coproduct(X, Xp)
    total = hom_basis(cp.gset, Y)
    assert len(total) == len(hom_basis(X, Y)) + len(hom_basis(Xp, Y))
    # every basis element restricts to one summand and vanishes on the other
    for code in total:
        e = basis_element(cp.gset, Y, code)
        e1, e2 = direct_sum_decompose(e, X, Xp)
        sizes = sorted((len(e1.coeffs), len(e2.coeffs)))
        assert sizes == [0, 1]
    # and in the target slot
    cpt = coproduct(X, Xp)
    total_t = hom_basis(Y, cpt.gset)
    assert len(total_t) == len(hom_basis(Y, X)) + len(hom_basis(Y, Xp))


def test_direct_sum_roundtrip():
    rng = random.Random(3)
    C2 = builtin_group("C2")
    O = standard_orbit(C2, 0)
    pt = point_gset(C2)
    cp = coproduct(O, pt)
    for _ in range(10):
        e = random_element(rng, cp.gset, O, support=3)
        e1, e2 = direct_sum_decompose(e, O, pt)
        assert direct_sum_reassemble(e1, e2, O, pt) == e
    z = BurnsideElement(cp.gset, O)
    z1, z2 = direct_sum_decompose(z, O, pt)
    assert z1.is_zero() and z2.is_zero()


# -- tensor ----------------------------------------------------------------------


def test_tensor_unit_laws():
    rng = random.Random(4)
    C2 = builtin_group("C2")
    pt = point_gset(C2)
    orbs = orbits_of(C2)
    ipt = identity_element(pt)
    for _ in range(10):
        X, Y = (orbs[rng.randrange(2)] for _ in range(2))
        s = random_element(rng, X, Y)
        t = tensor(s, ipt)
        # X x pt is canonically X; transport through the unitor
        rho_s = product(X, pt).left
        rho_t = product(Y, pt).left
        back = compose(transfer_element(rho_t),
                       compose(t, transfer_element(rho_s.inverse())))
        assert back == s


def test_tensor_of_identities():
    S3 = builtin_group("S3")
    X, Y = standard_orbit(S3, 1), standard_orbit(S3, 2)
    assert tensor(identity_element(X), identity_element(Y)) == \
        identity_element(product(X, Y).gset)


def test_tensor_of_transfers_c2():
    # [transfer C2/e -> pt] (x) itself decomposes as 2 copies of the
    # transitive free-middle span
    C2 = builtin_group("C2")
    pt = point_gset(C2)
    O = standard_orbit(C2, 0)
    f = GMap(O, pt, [0, 0])
    t = tensor(transfer_element(f), transfer_element(f))
    assert sorted(t.coeffs.values()) in ([2], [1, 1])
    total = sum(t.coeffs.values())
    assert total == 2
    # the middle classes are free
    for (cidx, _x, _y) in t.coeffs:
        assert C2.subgroup_classes()[cidx].label == "e"


def test_interchange_law():
    rng = random.Random(5)
    for name in ("C2", "S3"):
        group = builtin_group(name)
        orbs = orbits_of(group)
        for _ in range(12):
            A, B, C = (orbs[rng.randrange(len(orbs))] for _ in range(3))
            Ap, Bp, Cp = (orbs[rng.randrange(len(orbs))] for _ in range(3))
            s1, s2 = random_element(rng, A, B), random_element(rng, B, C)
            t1, t2 = random_element(rng, Ap, Bp), random_element(rng, Bp, Cp)
            assert compose(tensor(s2, t2), tensor(s1, t1)) == \
                tensor(compose(s2, s1), compose(t2, t1))


# -- duality -----------------------------------------------------------------------


def test_dual_involution_and_contravariance():
    rng = random.Random(6)
    S3 = builtin_group("S3")
    orbs = orbits_of(S3)
    for _ in range(50):
        X, Y, Z = (orbs[rng.randrange(4)] for _ in range(3))
        s = random_element(rng, X, Y)
        t = random_element(rng, Y, Z)
        assert dual(dual(s)) == s
        assert dual(compose(t, s)) == compose(dual(s), dual(t))
    ide = identity_element(orbs[1])
    assert dual(ide) == ide


def test_dual_of_transfer_is_restriction():
    S3 = builtin_group("S3")
    pt = point_gset(S3)
    O = standard_orbit(S3, 0)
    f = GMap(O, pt, [0] * O.size)
    assert dual(transfer_element(f)) == restriction_element(f)


def test_evaluation_on_point_is_identity():
    C2 = builtin_group("C2")
    pt = point_gset(C2)
    ev = evaluation_span(pt)
    coev = coevaluation_span(pt)
    # pt x pt is pt, so both are the identity span after the unitor
    assert len(ev.coeffs) == 1 and len(coev.coeffs) == 1
    ppt = product(pt, pt).gset
    assert ev.source == ppt and ev.target == pt


def test_evaluation_middle_is_diagonal():
    C2 = builtin_group("C2")
    O = standard_orbit(C2, 0)
    ev = evaluation_span(O)
    ((cidx, x, y), mult), = ev.coeffs.items()
    assert mult == 1
    assert C2.subgroup_classes()[cidx].label == "e"
    P = product(O, O)
    # the marked point of the product lies on the diagonal
    assert P.left(x) == P.right(x)


def test_triangle_identity_all_orbits():
    for name in BATTERY:
        group = builtin_group(name)
        for cls in group.subgroup_classes():
            X = standard_orbit(group, cls.index)
            assert triangle_composite(X) == identity_element(X), \
                (name, cls.label)


# -- marks and the ring -------------------------------------------------------------


def test_marks_examples():
    assert table_of_marks(builtin_group("trivial")) == [[1]]
    assert table_of_marks(builtin_group("C2")) == [[2, 0], [1, 1]]


def test_marks_triangular_with_nonzero_diagonal():
    for name in BATTERY:
        marks = table_of_marks(builtin_group(name))
        n = len(marks)
        for i in range(n):
            assert marks[i][i] != 0
            for j in range(n):
                if j > i:
                    # higher class cannot fix points of a smaller orbit
                    # unless subgroup orders tie; triangularity holds in the
                    # (order, lex) class order
                    group = builtin_group(name)
                    oi = len(group.subgroup_classes()[i].representative)
                    oj = len(group.subgroup_classes()[j].representative)
                    if oj > oi:
                        assert marks[i][j] == 0


def test_marks_ring_homomorphism():
    # the ghost map sends products to entrywise products
    for name in BATTERY:
        group = builtin_group(name)
        marks = table_of_marks(group)
        table = burnside_ring_table(group)
        n = len(marks)
        for i in range(n):
            for j in range(n):
                for col in range(n):
                    lhs = marks[i][col] * marks[j][col]
                    rhs = sum(table[i][j][k] * marks[k][col] for k in range(n))
                    assert lhs == rhs


def test_burnside_ring_c2():
    table = burnside_ring_table(builtin_group("C2"))
    # [C2/e]^2 = 2 [C2/e]
    assert table[0][0] == [2, 0]
    assert table[1][1] == [0, 1]


def test_ring_table_matches_span_composition():
    for name in BATTERY:
        group = builtin_group(name)
        _, spans = burnside_ring_from_spans(group)
        assert burnside_ring_table(group) == spans


def test_trivial_group_ring():
    _, spans = burnside_ring_from_spans(builtin_group("trivial"))
    assert spans == [[[1]]]


# -- multimaps ----------------------------------------------------------------------


def test_multimap_single_foot_is_hom_basis():
    S3 = builtin_group("S3")
    O = standard_orbit(S3, 1)
    pt = point_gset(S3)
    assert multimap_basis([O], pt) == hom_basis(O, pt)


def test_multimap_two_point_feet_trivial_group():
    triv = builtin_group("trivial")
    pt = point_gset(triv)
    assert len(multimap_basis([pt, pt], pt)) == 1


def test_multimap_grouped_product_decomposition():
    # morphism data over a grouping J -> I is a tuple of per-target
    # multimaps; cardinality and an explicit bijection, for C2 orbit feet
    C2 = builtin_group("C2")
    O = standard_orbit(C2, 0)
    pt = point_gset(C2)
    feet = [O, pt, O]
    groups_of = [[0, 1], [2]]        # contiguous grouping of the feet
    targets = [pt, O]
    per_target = [multimap_basis([feet[i] for i in grp], targets[j])
                  for j, grp in enumerate(groups_of)]
    tuples = list(itertools.product(*per_target))
    # the tensor of the tuple components is a span between the iterated
    # products; distinct tuples give distinct tensors
    seen = set()
    for tup in tuples:
        parts = []
        for j, grp in enumerate(groups_of):
            P = multi_product([feet[i] for i in grp])
            parts.append(basis_element(P.gset, targets[j], tup[j]))
        t = tensor(parts[0], parts[1])
        key = tuple(sorted(t.coeffs.items()))
        assert key not in seen
        seen.add(key)
    assert len(seen) == len(per_target[0]) * len(per_target[1])


def test_multimap_composition_associative_over_regrouping():
    # compose an outer 2-foot multimap with inner multimaps by tensoring,
    # two different ways of bracketing agree
    rng = random.Random(8)
    C2 = builtin_group("C2")
    O = standard_orbit(C2, 0)
    pt = point_gset(C2)
    inner1 = multi_product([O, pt])
    inner2 = multi_product([O])
    for _ in range(8):
        m1 = random_element(rng, inner1.gset, O)
        m2 = random_element(rng, inner2.gset, pt)
        outer_src = multi_product([O, pt])
        m_out = random_element(rng, outer_src.gset, O)
        lhs = compose(m_out, tensor(m1, m2))
        # rebracket: the same composite built stepwise
        rhs = compose(compose(m_out, tensor(identity_element(O), m2)),
                      tensor(m1, identity_element(inner2.gset)))
        assert lhs == rhs


def test_weyl_element_is_isomorphism_span():
    S3 = builtin_group("S3")
    for cls in S3.subgroup_classes():
        for n in cls.normalizer:
            w = weyl_element(S3, cls.index, n)
            winv = weyl_element(S3, cls.index, S3.inv(n))
            O = standard_orbit(S3, cls.index)
            assert compose(w, winv) == identity_element(O)


# -- promonoidal coend condition ------------------------------------------------------


@pytest.mark.parametrize("name", ["trivial", "C2"])
def test_promonoidal_coend_small(name):
    group = builtin_group(name)
    pt = point_gset(group)
    O = standard_orbit(group, 0)
    ok, detail = promonoidal_coend_check([O], pt)
    assert ok, detail
    ok2, detail2 = promonoidal_coend_check([O, pt], O)
    assert ok2, detail2
