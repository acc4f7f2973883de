"""Modules over Green functors, Tor, and filtered-complex spectral sequences.

Free modules are R box A_X; covers pick one free generator per level
generator, resolutions iterate kernels, and Tor is the homology of the
relative box product against a free resolution.  Spectral sequence pages
follow the image formula im[H(F(p)/F(p-r)) -> H(F(p+r-1)/F(p-1))] with
differentials induced by the connecting morphism of the obvious short
exact sequence of quotient complexes; everything is levelwise exact
integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import abgroups, intmat
from .abgroups import FinPresAbGroup
from .burnside import basis_element, hom_basis, restriction_element, transfer_element
from .convolution import (
    BoxData,
    GreenFunctor,
    GreenModule,
    box,
    box_assoc_iso,
    box_comm_iso,
    box_map,
    box_pairing,
    box_unit_eval,
    box_unit_iso,
    module_from_action,
    point_representable,
    struct_gmap,
)
from .gsets import (
    GSet,
    coproduct,
    disjoint_union_of_orbits,
    empty_gset,
    point_gset,
    standard_orbit,
)
from .mackey import (
    MackeyFunctor,
    MackeyMorphism,
    NatSolver,
    compose_morphisms,
    cokernel,
    homology_at,
    identity_morphism,
    image,
    kernel,
    lift_through_inclusion,
    representable,
    zero_mackey,
    zero_morphism,
)


# -- free modules -------------------------------------------------------------------


@dataclass
class FreeModule:
    """The left R-module R box A_X on a basis G-set X.

    Stored as a direct sum of the per-orbit free modules R box A_{G/H},
    which are built once per subgroup class and reused, so covers with
    many summands stay cheap.
    """
    ring: GreenFunctor
    basis_gsets: tuple
    base: GSet                   # disjoint union of the basis G-sets
    module: GreenModule
    summand_classes: tuple       # class index per block
    pieces: tuple                # per block: (AX, data, act) shared per class

    @property
    def underlying(self):
        return self.module.underlying


def _free_piece(R: GreenFunctor, cidx):
    """R box A_{G/H} with its action, cached per subgroup class."""
    key = ("free_piece", cidx)
    cache = R.underlying._cache
    if key not in cache:
        O = standard_orbit(R.group, cidx)
        AX = representable(O, name=f"A[{O.name}]")
        data = box(R.underlying, AX)
        source = box(R.underlying, data.functor, presentation=False)
        act = _free_action(R, AX, data, source)
        cache[key] = (AX, data, act)
    return cache[key]


def free_module(R: GreenFunctor, X: GSet, name=None) -> FreeModule:
    """R^X = R box A_X with the multiplication-induced action."""
    from .mackey import direct_sum_many
    group = X.group
    block_classes = tuple(group.class_index_of(X.stabilizer(o[0]))
                          for o in X.orbits())
    if not block_classes:
        Z = zero_mackey(group)
        data = box(R.underlying, Z, presentation=False)
        act = MackeyMorphism(data.functor, Z,
                             [intmat.zeros(0, 0) for _ in Z.levels],
                             check=False)
        mod = GreenModule(R, Z, act, data)
        return FreeModule(R, (), X, mod, (), ())
    pieces = tuple(_free_piece(R, c) for c in block_classes)
    D, _incls, _projs = direct_sum_many([p[1].functor for p in pieces],
                                        name=name or f"R^[{X.size}]")
    source = box(R.underlying, D, presentation=False)
    offsets = D._cache["direct_sum_of"][1]
    classes = R.group.subgroup_classes()
    mats = []
    for c in range(len(classes)):
        n_tgt = D.levels[c].generator_count
        cols = [None] * source.functor.levels[c].generator_count
        for (code, r_i, j), idx in source.layout[c].items():
            cw = code[0]
            # locate the block of the direct-sum coordinate j at level cw
            b = max(bb for bb in range(len(pieces))
                    if offsets[cw][bb] <= j)
            j_b = j - offsets[cw][b]
            AX, data_b, act_b = pieces[b]
            src_b = box(R.underlying, data_b.functor, presentation=False)
            col_small = act_b.mats[c][:, src_b.layout[c][(code, r_i, j_b)]]
            col = intmat.zero_vec(n_tgt)
            off_c = offsets[c][b]
            for t in range(len(col_small)):
                if col_small[t]:
                    col[off_c + t] = col_small[t]
            cols[idx] = col
        mats.append(intmat.from_cols(cols, n_tgt))
    act = MackeyMorphism(source.functor, D, mats, check=False)
    mod = GreenModule(R, D, act, source)
    orbit_list = tuple(standard_orbit(group, c) for c in block_classes)
    return FreeModule(R, orbit_list, X, mod, block_classes, pieces)


def _free_action(R: GreenFunctor, AX, data: BoxData,
                 source: BoxData) -> MackeyMorphism:
    """Action R box (R box A_X) -> R box A_X on generators.

    A generator is (outer code c, r, (inner code c', r', a)); its image
    restricts r along the inner structure map, twists everything onto the
    canonical over-code, multiplies the two ring legs, and reinjects.
    """
    from .convolution import _canonical_over, _diag_code, struct_gmap
    from .burnside import restriction_element
    group = R.group
    Rk = R.underlying
    RR = R.data               # box(R, R), already presented
    mult = R.mult
    mats = []
    for c in range(len(group.subgroup_classes())):
        X_level = standard_orbit(group, c)
        inner_gens = [data.generators(cw)
                      for cw in range(len(group.subgroup_classes()))]
        cols = [None] * source.functor.levels[c].generator_count
        for (code, i, beta), idx in source.layout[c].items():
            cw, _x = code
            (code_in, j, k) = inner_gens[cw][beta]
            cwp, xp = code_in
            phi = struct_gmap(standard_orbit(group, cw), code_in)
            sc = struct_gmap(X_level, code)
            z = sc(xp)
            zstar, u = _canonical_over(group, cwp, z, X_level)
            WM = Rk.weyl[cwp][u] @ Rk.eval_span(restriction_element(phi))
            WN = Rk.weyl[cwp][u]
            WA = AX.weyl[cwp][u]
            outer_code = (cwp, zstar)
            diag = _diag_code(group, cwp)
            col = intmat.zero_vec(data.functor.levels[c].generator_count)
            for a in range(WM.shape[0]):
                va = WM[a, i]
                if va == 0:
                    continue
                for b in range(WN.shape[0]):
                    vb = WN[b, j]
                    if vb == 0:
                        continue
                    prod = mult.mats[cwp][:, RR.layout[cwp][(diag, a, b)]]
                    for d in range(WA.shape[0]):
                        vd = WA[d, k]
                        if vd == 0:
                            continue
                        for t in range(len(prod)):
                            if prod[t]:
                                col[data.layout[c][(outer_code, t, d)]] += \
                                    va * vb * vd * prod[t]
            cols[idx] = col
        mats.append(intmat.from_cols(cols,
                                     data.functor.levels[c].generator_count))
    return MackeyMorphism(source.functor, data.functor, mats, check=False)


def free_unit_vector(F: FreeModule):
    """The canonical element of (R^X)(X) classifying the identity."""
    from .gsets import product
    from .burnside import identity_element
    R = F.ring
    X = F.base
    group = X.group
    pt = point_gset(group)
    D = F.underlying
    grp, val_offsets = D.value_at(X)
    sum_offsets = D._cache["direct_sum_of"][1]
    out = intmat.zero_vec(grp.generator_count)
    nclasses = len(group.subgroup_classes())
    unit_vec = R.unit.mats[nclasses - 1] @ _unit_elt(group, R)
    for b, cidx in enumerate(F.summand_classes):
        O = standard_orbit(group, cidx)
        AXb, data_b, _act = F.pieces[b]
        lam = product(pt, O).right
        e = transfer_element(lam)
        id_vec = intmat.zero_vec(AXb.levels[cidx].generator_count)
        ident = identity_element(O)
        basis = hom_basis(O, O)
        for code, v in ident.coeffs.items():
            id_vec[basis.index(code)] += v
        piece_vec = box_pairing(data_b, pt, O, e, unit_vec, id_vec)
        # place into the value block for orbit b, summand-b slice
        off = val_offsets[b] + sum_offsets[cidx][b]
        for t in range(len(piece_vec)):
            out[off + t] = piece_vec[t]
    return out


def _unit_elt(group, R: GreenFunctor):
    from .convolution import _unit_vector
    return _unit_vector(group, R.unit_rep)


def classifying_morphism(F: FreeModule, M: GreenModule, m_vec) -> MackeyMorphism:
    """The R-module map R^X -> M classified by m_vec in M(X).

    Sends r (x) a over a transitive over-object to act(r (x) M(a)(m)),
    block by block over the basis orbits of X.
    """
    from .burnside import transitive_code
    from .mackey import orbit_embeddings
    R = F.ring
    X = F.base
    group = X.group
    Mk = M.underlying
    data_RM = M.data
    D = F.underlying
    offsets = D._cache["direct_sum_of"][1] if F.summand_classes else None
    embeds = orbit_embeddings(X)
    m_vec = np.asarray(m_vec, dtype=object)
    classes = group.subgroup_classes()
    mats = []
    for c in range(len(classes)):
        O_level = standard_orbit(group, c)
        cols = [None] * D.levels[c].generator_count
        for b, cidx in enumerate(F.summand_classes):
            AXb, data_b, _act = F.pieces[b]
            Ob = standard_orbit(group, cidx)
            emb = embeds[b]
            for (code, i, j), idx in data_b.layout[c].items():
                cw = code[0]
                Ocw = standard_orbit(group, cw)
                (ca, xa, ya) = hom_basis(Ob, Ocw)[j]
                rep = group.subgroup_classes()[ca].representative
                shifted = transitive_code(X, Ocw, rep, emb(xa), ya)
                a_span = basis_element(X, Ocw, shifted)
                m_img = Mk.eval_span(a_span) @ m_vec
                vec = intmat.zero_vec(
                    data_RM.functor.levels[c].generator_count)
                for t in range(len(m_img)):
                    if m_img[t]:
                        vec[data_RM.layout[c][(code, i, t)]] += m_img[t]
                cols[offsets[c][b] + idx] = M.action.mats[c] @ vec
        mats.append(intmat.from_cols(cols, Mk.levels[c].generator_count))
    return MackeyMorphism(D, Mk, mats, check=False)


def hom_modules(P: GreenModule, M: GreenModule):
    """R-linear natural transformations P -> M as a HomGroup."""
    if P.ring is not M.ring and P.ring.underlying != M.ring.underlying:
        raise ValueError("modules over different rings")
    solver = NatSolver(P.underlying, M.underlying)
    group = P.group
    data_P, data_M = P.data, M.data
    for c in range(len(P.underlying.levels)):
        actP = P.action.mats[c]
        actM = M.action.mats[c]
        ngen_t = M.underlying.levels[c].generator_count
        for (code, i, j), gamma in data_P.layout[c].items():
            cw = code[0]
            coeff_rows = []
            for t in range(ngen_t):
                row = {}
                for k in range(actP.shape[0]):
                    if actP[k, gamma]:
                        key = solver.entry(c, t, k)
                        row[key] = row.get(key, 0) + actP[k, gamma]
                for b in range(M.underlying.levels[cw].generator_count):
                    delta = data_M.layout[c][(code, i, b)]
                    if actM[t, delta]:
                        key = solver.entry(cw, b, j)
                        row[key] = row.get(key, 0) - actM[t, delta]
                coeff_rows.append(row)
            solver.add_condition(coeff_rows, M.underlying.levels[c])
    return solver.solve()


# -- covers and resolutions ------------------------------------------------------------


def _single_orbit_free(R: GreenFunctor, cidx) -> FreeModule:
    key = ("free_on_orbit", cidx)
    cache = R.underlying._cache
    if key not in cache:
        cache[key] = free_module(R, standard_orbit(R.group, cidx))
    return cache[key]


def module_cover(M: GreenModule, prune=True, reverse=False):
    """A deterministic free cover F -> M.

    Walks level generators in canonical level order (reversed when
    `reverse` is set, giving an independent second cover for resolution
    comparisons), one free summand R^{G/H} per generator; with prune=True
    a generator already in the image of the partial cover is skipped,
    which keeps iterated kernels from growing multiplicatively.
    Returns (F: FreeModule, surj).
    """
    group = M.group
    classes = group.subgroup_classes()
    images = [M.underlying.levels[c].relation_lattice.copy()
              for c in range(len(classes))]
    slots = []       # (class index, generator index) per chosen summand
    class_order = range(len(classes) - 1, -1, -1) if reverse \
        else range(len(classes))
    for c in class_order:
        n = M.underlying.levels[c].generator_count
        for k in range(n):
            ek = intmat.zero_vec(n)
            ek[k] = 1
            if prune and intmat.in_lattice(ek, images[c]):
                continue
            slots.append((c, k))
            if prune:
                Fc = _single_orbit_free(M.ring, c)
                phi = classifying_morphism(Fc, M, ek)
                for cp in range(len(classes)):
                    images[cp] = intmat.lattice_sum(images[cp], phi.mats[cp])
    if slots:
        X = disjoint_union_of_orbits(group, tuple(c for (c, _k) in slots))
    else:
        X = empty_gset(group)
    F = free_module(M.ring, X)
    # element of M(X): block b holds generator k of level c per slot
    grp, offsets = M.underlying.value_at(X)
    m_vec = intmat.zero_vec(grp.generator_count)
    for b, (c, k) in enumerate(slots):
        m_vec[offsets[b] + k] = 1
    surj = classifying_morphism(F, M, m_vec)
    return F, surj


def module_kernel(M: GreenModule, f: MackeyMorphism):
    """Kernel of an R-linear map as a GreenModule, with its inclusion."""
    K, incl = kernel(f)
    data_RK = box(M.ring.underlying, K, presentation=False)
    act = lift_through_inclusion(
        incl, compose_morphisms(M.action,
                                box_map(identity_morphism(M.ring.underlying),
                                        incl, presentation=False)))
    return GreenModule(M.ring, K, act, data_RK), incl


@dataclass
class Resolution:
    """Free modules F_p with differentials d_p: F_p -> F_{p-1}."""
    ring: GreenFunctor
    target: GreenModule
    modules: list                  # FreeModule per degree
    diffs: list                    # d_p for p >= 1
    augmentation: MackeyMorphism   # F_0 -> target

    def complex(self):
        terms = {p: F.underlying for p, F in enumerate(self.modules)}
        diffs = {p: self.diffs[p - 1] for p in range(1, len(self.modules))}
        return ChainComplex(self.ring.group, terms, diffs)


def module_resolution(R: GreenFunctor, M, length: int,
                      reverse=False) -> Resolution:
    """Iterated free covers out to the given length.

    A FreeModule is its own resolution of length zero.  Results are
    cached per module, so several Tor computations against the same
    argument share one resolution.
    """
    if isinstance(M, FreeModule):
        return Resolution(R, M.module, [M], [],
                          identity_morphism(M.underlying))
    key = ("resolution", id(R), reverse)
    cached = M.underlying._cache.get(key)
    if cached is not None:
        asked, res = cached
        terminated = len(res.modules) < asked + 1
        if asked >= length or terminated:
            return Resolution(R, res.target, res.modules[:length + 1],
                              res.diffs[:length], res.augmentation)
    out = _module_resolution_uncached(R, M, length, reverse)
    M.underlying._cache[key] = (length, out)
    return out


def _module_resolution_uncached(R, M, length, reverse):
    F0, eps = module_cover(M, reverse=reverse)
    modules = [F0]
    diffs = []
    current_free, current_map = F0, eps
    for _p in range(length):
        Kmod, incl = module_kernel(current_free.module, current_map)
        if all(l.is_trivial() for l in Kmod.underlying.levels):
            break
        Fnext, cover_map = module_cover(Kmod, reverse=reverse)
        diffs.append(compose_morphisms(incl, cover_map))
        modules.append(Fnext)
        current_free, current_map = Fnext, cover_map
    return Resolution(R, M, modules, diffs, eps)


# -- relative box product ----------------------------------------------------------------


@dataclass
class RelBox:
    """M box_R N as a cokernel of the two action routes, minimized."""
    left: GreenModule
    right: GreenModule
    functor: MackeyFunctor
    projection: MackeyMorphism     # from box(M, N).functor
    plain: BoxData                 # presentation of M box N
    section: MackeyMorphism        # functor -> box coordinates, splits projection


def rel_box(M: GreenModule, N: GreenModule) -> RelBox:
    """Coequalizer of the two action routes on M box N.

    The image of (act_M box id - id box act_N) is generated by the
    balanced-product relations over diagonal transitive over-objects:
    for m, r, n all at one over-code, (r.m) (x) n = m (x) (r.n).  One
    relation column per (over-code, m, r, n) generator triple.
    """
    from .convolution import _diag_code
    R = M.ring
    Mk, Nk, Rk = M.underlying, N.underlying, R.underlying
    group = R.group
    data = box(Mk, Nk)
    dRM, dRN = M.data, N.data

    def level_act(act_mats, dat, cw, r_idx, other_idx):
        idx = dat.layout[cw][(_diag_code(group, cw), r_idx, other_idx)]
        return act_mats[cw][:, idx]

    levels = []
    for c in range(len(group.subgroup_classes())):
        cols = []
        for code in data.codes[c]:
            cw = code[0]
            nM = Mk.levels[cw].generator_count
            nN = Nk.levels[cw].generator_count
            nR = Rk.levels[cw].generator_count
            for r_idx in range(nR):
                for i in range(nM):
                    rm = level_act(M.action.mats, dRM, cw, r_idx, i)
                    for k in range(nN):
                        rn = level_act(N.action.mats, dRN, cw, r_idx, k)
                        col = intmat.zero_vec(
                            data.functor.levels[c].generator_count)
                        for a in range(nM):
                            if rm[a]:
                                col[data.layout[c][(code, a, k)]] += rm[a]
                        for b in range(nN):
                            if rn[b]:
                                col[data.layout[c][(code, i, b)]] -= rn[b]
                        if not intmat.is_zero(col):
                            cols.append(col)
        rels = intmat.from_cols(cols, data.functor.levels[c].generator_count)
        grp, _ = abgroups.quotient_by_columns(data.functor.levels[c], rels)
        levels.append(grp)
    F = data.functor
    Qbig = MackeyFunctor(group, levels, F.res, F.tr,
                         [dict(w) for w in F.weyl],
                         name=f"({Mk.name} box_R {Nk.name})", check=False)
    from .mackey import minimize_presentation
    Q, section, projection = minimize_presentation(Qbig)
    proj = MackeyMorphism(F, Q, projection.mats, check=False)
    sect = MackeyMorphism(Q, F, section.mats, check=False)
    return RelBox(M, N, Q, proj, data, sect)


def rel_box_map(src: RelBox, tgt: RelBox, phi: MackeyMorphism) -> MackeyMorphism:
    """Induced map M box_R N -> M box_R N' from an R-linear phi: N -> N'."""
    raw = box_map(identity_morphism(src.left.underlying), phi)
    mats = [tgt.projection.mats[c] @ raw.mats[c] @ src.section.mats[c]
            for c in range(len(src.functor.levels))]
    return MackeyMorphism(src.functor, tgt.functor, mats, check=False)


def canonical_module(G: GreenFunctor, M: MackeyFunctor) -> GreenModule:
    """Every Mackey functor is a module over the Burnside Green functor."""
    data = box(G.unit_rep, M, presentation=False)
    eps = box_unit_eval(M, data)
    return GreenModule(G, M, eps, data)


# -- chain complexes ----------------------------------------------------------------------


@dataclass
class ChainComplex:
    """A bounded complex of Mackey functors, d_n: C_n -> C_{n-1}."""
    group: object
    terms: dict
    diffs: dict
    _hcache: dict = field(default_factory=dict, repr=False)

    def term(self, n) -> MackeyFunctor:
        if n in self.terms:
            return self.terms[n]
        return zero_mackey(self.group)

    def diff(self, n) -> MackeyMorphism:
        if n in self.diffs:
            return self.diffs[n]
        return zero_morphism(self.term(n), self.term(n - 1))

    def degrees(self):
        return sorted(self.terms)

    def validate(self):
        for n in self.degrees():
            dd = compose_morphisms(self.diff(n), self.diff(n + 1))
            if not dd.is_zero():
                raise ValueError(f"d.d != 0 at degree {n + 1}")

    def homology(self, n) -> MackeyFunctor:
        return self.homology_data(n)[0]

    def homology_data(self, n):
        if n not in self._hcache:
            self._hcache[n] = homology_at(self.diff(n + 1), self.diff(n))
        return self._hcache[n]


def complex_map_homology(C: ChainComplex, D: ChainComplex, maps: dict, n):
    """Induced morphism H_n(C) -> H_n(D) from a chain map (dict of mats)."""
    HC, inclC, projC, sectC = C.homology_data(n)
    HD, inclD, projD, _sectD = D.homology_data(n)
    u = maps[n] if n in maps else zero_morphism(C.term(n), D.term(n))
    j = lift_through_inclusion(inclD, compose_morphisms(u, inclC))
    mats = [projD.mats[c] @ j.mats[c] @ sectC.mats[c]
            for c in range(len(HC.levels))]
    return MackeyMorphism(HC, HD, mats, check=False), HC, HD


# -- Tor ------------------------------------------------------------------------------------


@dataclass
class TorResult:
    ring: GreenFunctor
    left: GreenModule
    right: GreenModule
    resolution: Resolution
    complex: ChainComplex
    tor: list                     # MackeyFunctor per degree 0..p_max
    tor0_witness: MackeyMorphism  # H_0 -> rel_box(left, right), invertible
    rel: RelBox


def tor(R: GreenFunctor, M, N, p_max: int, reverse=False) -> TorResult:
    """Tor_p^R(M, N) for p = 0..p_max via a free resolution of N."""
    if isinstance(M, FreeModule):
        M = M.module
    res = module_resolution(R, N, p_max + 1, reverse=reverse)
    if isinstance(N, FreeModule):
        N = N.module
    rels = [rel_box(M, F.module) for F in res.modules]
    terms = {p: rb.functor for p, rb in enumerate(rels)}
    diffs = {}
    for p in range(1, len(res.modules)):
        diffs[p] = rel_box_map(rels[p], rels[p - 1], res.diffs[p - 1])
    C = ChainComplex(R.group, terms, diffs)
    tor_list = [C.homology(p) for p in range(p_max + 1)]

    # Tor_0 = M box_R N, witnessed by the augmentation
    target = rel_box(M, N)
    aug_map = rel_box_map(rels[0], target, res.augmentation)
    H0, incl0, _proj0, sect0 = C.homology_data(0)
    wit = MackeyMorphism(H0, target.functor,
                         [aug_map.mats[c] @ incl0.mats[c] @ sect0.mats[c]
                          for c in range(len(H0.levels))], check=False)
    return TorResult(R, M, N, res, C, tor_list, wit, target)


# -- filtered complexes and the spectral sequence ---------------------------------------------


@dataclass
class FilteredComplex:
    """An increasing, bounded-below filtration of a chain complex.

    steps[i] is F(min_index + i); F(p) vanishes below min_index and equals
    the total complex from the last step on.  step_incls[i] holds the
    per-degree inclusions of steps[i] into steps[i+1].
    """
    steps: list
    step_incls: list
    min_index: int
    _empty: ChainComplex = field(default=None, repr=False)
    _qcache: dict = field(default_factory=dict, repr=False)

    @property
    def max_index(self):
        return self.min_index + len(self.steps) - 1

    def complex_at(self, p) -> ChainComplex:
        if p < self.min_index:
            if self._empty is None:
                self._empty = ChainComplex(self.steps[-1].group, {}, {})
            return self._empty
        i = min(p - self.min_index, len(self.steps) - 1)
        return self.steps[i]

    def inclusion(self, p, q, n) -> MackeyMorphism:
        """The inclusion F(p)_n -> F(q)_n for p <= q."""
        lo = self.complex_at(p).term(n)
        hi = self.complex_at(q).term(n)
        i = max(min(p, self.max_index) - self.min_index, -1)
        j = max(min(q, self.max_index) - self.min_index, -1)
        if i < 0:
            return zero_morphism(lo, hi)
        out = identity_morphism(self.steps[i].term(n))
        for k in range(i, j):
            step_in = self.step_incls[k].get(n)
            if step_in is None:
                step_in = zero_morphism(self.steps[k].term(n),
                                        self.steps[k + 1].term(n))
            out = compose_morphisms(step_in, out)
        return out

    def validate(self):
        """Each step is a complex and each inclusion is a chain map."""
        for step in self.steps:
            step.validate()
        for i, incls in enumerate(self.step_incls):
            lo, hi = self.steps[i], self.steps[i + 1]
            for n in lo.degrees():
                inc = incls.get(n)
                prev = incls.get(n - 1)
                if inc is None:
                    continue
                if prev is None and (n - 1) in hi.terms:
                    prev = zero_morphism(lo.term(n - 1), hi.term(n - 1))
                if prev is None:
                    continue
                lhs = compose_morphisms(prev, lo.diff(n))
                rhs = compose_morphisms(hi.diff(n), inc)
                if not lhs.equals(rhs):
                    raise ValueError(
                        f"filtration step {i} is not a chain map at degree {n}")


def skeletal_filtration(C: ChainComplex) -> FilteredComplex:
    """Brutal truncations sigma_{<=p} as an increasing filtration."""
    degs = C.degrees()
    lo, hi = min(degs), max(degs)
    steps = []
    incls = []
    for p in range(lo, hi + 1):
        terms = {n: C.term(n) for n in degs if n <= p}
        diffs = {n: C.diff(n) for n in degs if n <= p and (n - 1) in terms}
        steps.append(ChainComplex(C.group, terms, diffs))
    for i in range(len(steps) - 1):
        mapping = {}
        for n in steps[i].degrees():
            mapping[n] = identity_morphism(steps[i].term(n))
        incls.append(mapping)
    return FilteredComplex(steps, incls, lo)


def quotient_complex(filt: FilteredComplex, a, b):
    """F(a)/F(b) with generator sets inherited from F(a)."""
    a = min(a, filt.max_index)
    b = min(max(b, filt.min_index - 1), a)
    key = (a, b)
    if key in filt._qcache:
        return filt._qcache[key]
    Fa = filt.complex_at(a)
    terms = {}
    diffs = {}
    projs = {}
    for n in Fa.degrees():
        inc = filt.inclusion(b, a, n)
        Q, proj = cokernel(inc)
        terms[n] = Q
        projs[n] = proj
    for n in Fa.degrees():
        if (n - 1) in terms:
            diffs[n] = MackeyMorphism(terms[n], terms[n - 1],
                                      Fa.diff(n).mats, check=False)
    out = (ChainComplex(Fa.group, terms, diffs), projs)
    filt._qcache[key] = out
    return out


@dataclass
class SpectralSequencePage:
    """One page: entries E_r^{p,q} and differentials of bidegree (-r, r-1)."""
    r: int
    entries: dict                 # (p, q) -> MackeyFunctor
    differentials: dict           # (p, q) -> MackeyMorphism E^{p,q} -> E^{p-r,q+r-1}
    window: tuple                 # (p_range, n_range)

    def entry(self, p, q):
        return self.entries.get((p, q))


def _entry_data(filt: FilteredComplex, r, p, n):
    """E_r at filtration p, total degree n: the image formula with maps."""
    Q1, _ = quotient_complex(filt, p, p - r)
    Q2, _ = quotient_complex(filt, p + r - 1, p - 1)
    u = {m: MackeyMorphism(Q1.term(m), Q2.term(m),
                           filt.inclusion(p, p + r - 1, m).mats, check=False)
         for m in Q1.degrees()}
    Hmap, H1, H2 = complex_map_homology(Q1, Q2, u, n)
    E, incl = image(Hmap)
    return E, incl, H2, Q2


def ss_pages(filt: FilteredComplex, r_max: int):
    """Pages E_1 .. E_{r_max} of the filtration spectral sequence."""
    total = filt.steps[-1]
    degs = total.degrees()
    if not degs:
        return [SpectralSequencePage(r, {}, {}, ((0, -1), (0, -1)))
                for r in range(1, r_max + 1)]
    nmin, nmax = min(degs), max(degs)
    pmin, pmax = filt.min_index, filt.max_index
    pages = []
    for r in range(1, r_max + 1):
        entries = {}
        data = {}
        for p in range(pmin, pmax + 1):
            for n in range(nmin, nmax + 1):
                q = n - p
                E, incl, H2, Q2 = _entry_data(filt, r, p, n)
                entries[(p, q)] = E
                data[(p, q)] = (E, incl, H2, Q2)
        diffs = {}
        for p in range(pmin, pmax + 1):
            for n in range(nmin, nmax + 1):
                q = n - p
                tp, tq = p - r, q + r - 1
                if (tp, tq) not in data:
                    continue
                E, incl, H2, Q2 = data[(p, q)]
                Et, inclt, H2t, Q2t = data[(tp, tq)]
                bd = _connecting(filt, r, p, n)
                if bd is None:
                    continue
                lift = compose_morphisms(bd, incl)
                diffs[(p, q)] = lift_through_inclusion(inclt, lift)
        pages.append(SpectralSequencePage(r, entries, diffs,
                                          ((pmin, pmax), (nmin, nmax))))
    return pages


def _connecting(filt: FilteredComplex, r, p, n):
    """Connecting H_n(F(p+r-1)/F(p-1)) -> H_{n-1}(F(p-1)/F(p-r-1)).

    Built from the short exact sequence of quotient complexes whose middle
    is F(p+r-1)/F(p-r-1); generator sets are shared, so lifting a cycle is
    the identity on coordinates and only the boundary needs solving.
    """
    A, _ = quotient_complex(filt, p - 1, p - r - 1)
    B, _ = quotient_complex(filt, p + r - 1, p - r - 1)
    C, _ = quotient_complex(filt, p + r - 1, p - 1)
    HC, inclC, _projC, sectC = C.homology_data(n)
    HA, inclA, projA, _sectA = A.homology_data(n - 1)
    iota = filt.inclusion(p - 1, p + r - 1, n - 1)
    dB = B.diff(n)
    mats = []
    for c in range(len(HC.levels)):
        relB = B.term(n - 1).levels[c].relation_lattice
        iota_c = iota.mats[c]
        stacked = intmat.hstack([iota_c, relB]) if relB.shape[1] else iota_c
        solver1 = intmat.Solver(stacked)
        KA = inclA.mats[c]
        relA = A.term(n - 1).levels[c].relation_lattice
        stacked2 = intmat.hstack([KA, relA]) if relA.shape[1] else KA
        solver2 = intmat.Solver(stacked2)
        reps = inclC.mats[c] @ sectC.mats[c]
        cols = []
        for k in range(HC.levels[c].generator_count):
            target = dB.mats[c] @ reps[:, k]
            sol = solver1.solve(target)
            if sol is None:
                raise ValueError("connecting morphism failed to solve")
            w = sol[:iota_c.shape[1]]
            sol2 = solver2.solve(w)
            if sol2 is None:
                raise ValueError("connecting image is not a cycle")
            cols.append(projA.mats[c] @ sol2[:KA.shape[1]])
        mats.append(intmat.from_cols(cols, HA.levels[c].generator_count))
    return MackeyMorphism(HC, HA, mats, check=False)


def homology_filtration_graded(filt: FilteredComplex, n):
    """Associated graded of H_n(total) along the filtration images.

    Returns {p: MackeyFunctor} with piece p equal to
    im(H_n(F(p)) -> H_n(total)) / im(H_n(F(p-1)) -> H_n(total)).
    """
    total = filt.steps[-1]
    out = {}
    prev = None
    prev_incl = None
    for p in range(filt.min_index - 1, filt.max_index + 1):
        Fp = filt.complex_at(p)
        u = {m: MackeyMorphism(Fp.term(m), total.term(m),
                               filt.inclusion(p, filt.max_index, m).mats,
                               check=False) for m in Fp.degrees()}
        if Fp.degrees():
            Hmap, _, _ = complex_map_homology(Fp, total, u, n)
            Im, incl = image(Hmap)
        else:
            Htot = total.homology(n)
            Im, incl = kernel(identity_morphism(Htot))
        if prev is not None:
            j = lift_through_inclusion(incl, prev_incl)
            piece, _ = cokernel(j)
            out[p] = piece
        prev, prev_incl = Im, incl
    return out
