import random

import pytest

from mackeykit import intmat as im
from mackeykit.abgroups import FinPresAbGroup, groups_isomorphic
from mackeykit.groups import builtin_group
from mackeykit.gsets import point_gset, product, standard_orbit
from mackeykit.mackey import (
    MackeyMorphism,
    burnside_mackey,
    cokernel,
    compose_morphisms,
    fixed_point_mackey,
    hom_mackey,
    identity_morphism,
    representable,
    trivial_module,
    zero_mackey,
    zero_morphism,
)
from mackeykit.convolution import box, burnside_green
from mackeykit.homalg import (
    ChainComplex,
    FilteredComplex,
    canonical_module,
    classifying_morphism,
    free_module,
    free_unit_vector,
    hom_modules,
    homology_filtration_graded,
    module_cover,
    module_kernel,
    module_resolution,
    rel_box,
    rel_box_map,
    skeletal_filtration,
    ss_pages,
    tor,
)


@pytest.fixture(scope="module")
def c2_setup():
    C2 = builtin_group("C2")
    R = burnside_green(C2, check=False)
    Z = FinPresAbGroup.free(1)
    FP = fixed_point_mackey(C2, Z, trivial_module(C2, Z))
    return C2, R, FP


def invariants(M):
    return [l.invariant_factors for l in M.levels]


# -- free modules ------------------------------------------------------------------


def test_free_module_on_point_is_ring(c2_setup):
    C2, R, FP = c2_setup
    F = free_module(R, point_gset(C2))
    assert invariants(F.underlying) == invariants(R.underlying)


def test_free_module_over_unit_is_representable(c2_setup):
    # A_pt-free module on X has the levels of A_X
    C2, R, FP = c2_setup
    O = standard_orbit(C2, 0)
    F = free_module(R, O)
    assert invariants(F.underlying) == invariants(representable(O))


def test_free_module_levels_are_values_of_fp(c2_setup):
    # rank data of FP(Z)^{C2/e}: levels (Z^2, Z) via M(X x -)
    C2, R, FP = c2_setup
    O = standard_orbit(C2, 0)
    FPmod = canonical_module(R, FP)
    # FP box A_X has levels FP(X x -): use the box directly
    data = box(FP, representable(O))
    val_e, _ = FP.value_at(product(O, standard_orbit(C2, 0)).gset)
    val_pt, _ = FP.value_at(product(O, point_gset(C2)).gset)
    assert groups_isomorphic(data.functor.levels[0], val_e)
    assert groups_isomorphic(data.functor.levels[1], val_pt)
    assert val_e.invariant_factors == (0, 0)
    assert val_pt.invariant_factors == (0,)


def test_free_module_adjunction(c2_setup):
    # hom_{R-mod}(R^X, M) = M(X), with explicit unit and classifying maps
    C2, R, FP = c2_setup
    FPmod = canonical_module(R, FP)
    for cidx in (0, 1):
        X = standard_orbit(C2, cidx)
        F = free_module(R, X)
        hg = hom_modules(F.module, FPmod)
        val, _ = FP.value_at(X)
        assert groups_isomorphic(hg.group, val)
        # unit element classifies back and forth
        eta = free_unit_vector(F)
        for phi in hg.basis:
            m_vec = phi.at_gset(X) @ eta
            psi = classifying_morphism(F, FPmod, m_vec)
            for c in range(len(FP.levels)):
                from mackeykit.abgroups import maps_equal
                assert maps_equal(psi.mats[c], phi.mats[c],
                                  F.underlying.levels[c], FP.levels[c])


def test_free_module_adjunction_over_second_ring(c2_setup):
    # the fixed-point Green functor of the trivial ring Z also works as a
    # base: hom_{R-mod}(R^X, R) = R(X)
    from mackeykit.convolution import green_from_levelwise, ring_as_module
    C2, R, FP = c2_setup
    tables = [[[im.intvec([1])]], [[im.intvec([1])]]]
    G2 = green_from_levelwise(FP, tables, im.intvec([1]))
    Rmod = ring_as_module(G2)
    for cidx in (0, 1):
        X = standard_orbit(C2, cidx)
        F = free_module(G2, X)
        hg = hom_modules(F.module, Rmod)
        val, _ = FP.value_at(X)
        assert groups_isomorphic(hg.group, val)


# -- covers and resolutions -----------------------------------------------------------


def test_cover_is_levelwise_surjective(c2_setup):
    C2, R, FP = c2_setup
    FPmod = canonical_module(R, FP)
    F, surj = module_cover(FPmod)
    for c, mat in enumerate(surj.mats):
        img = im.lattice_sum(mat, FP.levels[c].relation_lattice)
        diag = im.snf_diagonal(img)
        assert len([d for d in diag if d != 0]) == FP.levels[c].generator_count
        assert all(d == 1 for d in diag if d != 0)


def test_resolution_of_free_module_is_itself(c2_setup):
    C2, R, FP = c2_setup
    F = free_module(R, standard_orbit(C2, 0))
    res = module_resolution(R, F, 3)
    assert len(res.modules) == 1
    assert res.diffs == []


def test_resolution_of_zero_module(c2_setup):
    C2, R, FP = c2_setup
    Zmod = canonical_module(R, zero_mackey(C2))
    res = module_resolution(R, Zmod, 3)
    assert all(all(l.is_trivial() for l in F.underlying.levels)
               for F in res.modules)


def test_resolution_exact_in_middle_degrees(c2_setup):
    C2, R, FP = c2_setup
    two = MackeyMorphism(FP, FP, [im.intmat([[2]])] * 2)
    Q = cokernel(two)[0]         # FP with mod-2 levels
    Qmod = canonical_module(R, Q)
    res = module_resolution(R, Qmod, 4)
    C = res.complex()
    C.validate()
    for p in range(1, len(res.modules) - 1):
        H = C.homology(p)
        assert all(l.is_trivial() for l in H.levels), p
    # the augmentation is a quasi-isomorphism in degree 0
    H0 = C.homology(0)
    assert groups_isomorphic(H0.levels[0], Q.levels[0])
    assert groups_isomorphic(H0.levels[1], Q.levels[1])


# -- relative box -----------------------------------------------------------------------


def test_rel_box_with_ring_is_identity(c2_setup):
    # M box_R R = M
    C2, R, FP = c2_setup
    FPmod = canonical_module(R, FP)
    Rmod = canonical_module(R, R.underlying)
    rb = rel_box(FPmod, Rmod)
    assert invariants(rb.functor) == invariants(FP)


def test_rel_box_over_unit_ring_is_plain_box(c2_setup):
    # M box_{A_pt} N = M box N
    C2, R, FP = c2_setup
    A = burnside_mackey(C2)
    Mmod = canonical_module(R, FP)
    Nmod = canonical_module(R, A)
    rb = rel_box(Mmod, Nmod)
    plain = box(FP, A)
    assert invariants(rb.functor) == invariants(plain.functor)


def test_rel_box_with_free_module_gives_levelwise_values(c2_setup):
    # M box_R R^X = M box A_X, levelwise M(X x -)
    C2, R, FP = c2_setup
    FPmod = canonical_module(R, FP)
    O = standard_orbit(C2, 0)
    F = free_module(R, O)
    rb = rel_box(FPmod, F.module)
    for c in range(2):
        Y = standard_orbit(C2, c)
        val, _ = FP.value_at(product(O, Y).gset)
        assert groups_isomorphic(rb.functor.levels[c], val)


def test_rel_box_right_exact(c2_setup):
    # a levelwise surjection N -> N' induces a surjection on M box_R -
    C2, R, FP = c2_setup
    FPmod = canonical_module(R, FP)
    two = MackeyMorphism(FP, FP, [im.intmat([[2]])] * 2)
    Q, proj = cokernel(two)
    Qmod = canonical_module(R, Q)
    src = rel_box(FPmod, FPmod)
    tgt = rel_box(FPmod, Qmod)
    induced = rel_box_map(src, tgt, proj)
    for c, mat in enumerate(induced.mats):
        img = im.lattice_sum(mat, tgt.functor.levels[c].relation_lattice)
        diag = im.snf_diagonal(img)
        assert len([d for d in diag if d != 0]) == \
            tgt.functor.levels[c].generator_count
        assert all(d == 1 for d in diag if d != 0)


# -- Tor -----------------------------------------------------------------------------------


def test_tor_vanishes_on_free_arguments(c2_setup):
    C2, R, FP = c2_setup
    FPmod = canonical_module(R, FP)
    F = free_module(R, standard_orbit(C2, 0))
    result = tor(R, FPmod, F, 3)
    for p in range(1, 4):
        assert all(l.is_trivial() for l in result.tor[p].levels)
    result.tor0_witness.inverse()    # raises unless invertible


def test_tor0_is_rel_box_with_witness(c2_setup):
    C2, R, FP = c2_setup
    FPmod = canonical_module(R, FP)
    two = MackeyMorphism(FP, FP, [im.intmat([[2]])] * 2)
    Qmod = canonical_module(R, cokernel(two)[0])
    result = tor(R, FPmod, Qmod, 2)
    wit = result.tor0_witness
    inv = wit.inverse()
    assert compose_morphisms(wit, inv).equals(identity_morphism(wit.target))


def test_tor_independent_of_resolution(c2_setup):
    C2, R, FP = c2_setup
    FPmod = canonical_module(R, FP)
    two = MackeyMorphism(FP, FP, [im.intmat([[2]])] * 2)
    Qmod = canonical_module(R, cokernel(two)[0])
    a = tor(R, FPmod, Qmod, 2)
    b = tor(R, FPmod, Qmod, 2, reverse=True)
    for p in range(3):
        assert invariants(a.tor[p]) == invariants(b.tor[p]), p


def test_tor_symmetric_for_commutative_ring(c2_setup):
    C2, R, FP = c2_setup
    A = burnside_mackey(C2)
    M = canonical_module(R, FP)
    N = canonical_module(R, A)
    ab = tor(R, M, N, 2)
    ba = tor(R, N, M, 2)
    for p in range(3):
        assert invariants(ab.tor[p]) == invariants(ba.tor[p]), p


# -- module kernels carry the action ----------------------------------------------------------


def test_module_kernel_is_a_module(c2_setup):
    C2, R, FP = c2_setup
    FPmod = canonical_module(R, FP)
    F, surj = module_cover(FPmod)
    K, incl = module_kernel(F.module, surj)
    # the kernel's action restricts the free action through the inclusion
    lhs = compose_morphisms(incl, K.action)
    from mackeykit.convolution import box_map
    rhs = compose_morphisms(F.module.action,
                            box_map(identity_morphism(R.underlying), incl,
                                    presentation=False))
    assert lhs.equals(rhs)


# -- spectral sequences -------------------------------------------------------------------------


def test_trivial_filtration_gives_homology(c2_setup):
    C2, R, FP = c2_setup
    two = MackeyMorphism(FP, FP, [im.intmat([[2]])] * 2)
    C = ChainComplex(C2, {0: FP, 1: FP}, {1: two})
    filt = FilteredComplex([C], [], 0)
    pages = ss_pages(filt, 3)
    # one filtration jump: E_1 concentrates the homology at p = 0 and all
    # later pages agree with it
    for n in (0, 1):
        H = C.homology(n)
        E = pages[0].entry(0, n)
        assert invariants(E) == invariants(H)
        for page in pages[1:]:
            assert invariants(page.entry(0, n)) == invariants(H)


def test_two_step_filtration_les(c2_setup):
    C2, R, FP = c2_setup
    two = MackeyMorphism(FP, FP, [im.intmat([[2]])] * 2)
    C = ChainComplex(C2, {0: FP, 1: FP}, {1: two})
    F0 = ChainComplex(C2, {0: FP}, {})
    filt = FilteredComplex([F0, C], [{0: identity_morphism(FP)}], 0)
    filt.validate()
    pages = ss_pages(filt, 3)
    E1, E2, E3 = pages
    # E_1 entries are the associated-graded complex
    assert invariants(E1.entry(0, 0)) == [(0,), (0,)]
    assert invariants(E1.entry(1, 0)) == [(0,), (0,)]
    # d_1 is the induced differential: kernel and cokernel match x2
    assert invariants(E2.entry(0, 0)) == [(2,), (2,)]
    assert all(l.is_trivial() for l in E2.entry(1, 0).levels)
    # degeneration from E_2 on
    assert invariants(E3.entry(0, 0)) == invariants(E2.entry(0, 0))


def test_page_turn_is_homology_of_previous_page(c2_setup):
    C2, R, FP = c2_setup
    two = MackeyMorphism(FP, FP, [im.intmat([[2]])] * 2)
    C = ChainComplex(C2, {0: FP, 1: FP}, {1: two})
    F0 = ChainComplex(C2, {0: FP}, {})
    filt = FilteredComplex([F0, C], [{0: identity_morphism(FP)}], 0)
    pages = ss_pages(filt, 2)
    E1, E2 = pages
    from mackeykit.mackey import homology_at
    for (p, q), E in E2.entries.items():
        src = E1.entry(p, q)
        dout = E1.differentials.get((p, q))
        din = E1.differentials.get((p + 1, q))
        if dout is None:
            dout = zero_morphism(src, zero_mackey(C2))
        if din is None:
            din = zero_morphism(zero_mackey(C2), src)
        H, _, _, _ = homology_at(din, dout)
        assert invariants(H) == invariants(E), (p, q)


def test_skeletal_ss_first_quadrant_and_tor(c2_setup):
    C2, R, FP = c2_setup
    FPmod = canonical_module(R, FP)
    two = MackeyMorphism(FP, FP, [im.intmat([[2]])] * 2)
    Qmod = canonical_module(R, cokernel(two)[0])
    result = tor(R, FPmod, Qmod, 2)
    filt = skeletal_filtration(result.complex)
    pages = ss_pages(filt, 3)
    E2 = pages[1]
    for p in range(3):
        assert invariants(E2.entry(p, 0)) == invariants(result.tor[p]), p
    # first-quadrant: nothing off the q = 0 row
    for (p, q), E in E2.entries.items():
        if q != 0:
            assert all(l.is_trivial() for l in E.levels), (p, q)
    # E_infinity equals the associated graded of the homology filtration
    Einf = pages[-1]
    for n in range(3):
        graded = homology_filtration_graded(filt, n)
        for p, piece in graded.items():
            E = Einf.entry(p, n - p)
            if E is None:
                assert all(l.is_trivial() for l in piece.levels)
            else:
                assert invariants(E) == invariants(piece), (p, n)


def test_ss_rejects_nonsense_differentials(c2_setup):
    C2, R, FP = c2_setup
    bad = ChainComplex(C2, {0: FP, 1: FP, 2: FP},
                       {1: MackeyMorphism(FP, FP, [im.intmat([[1]])] * 2),
                        2: MackeyMorphism(FP, FP, [im.intmat([[1]])] * 2)})
    with pytest.raises(ValueError, match="d.d"):
        bad.validate()
