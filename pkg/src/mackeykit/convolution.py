"""The box product of Mackey functors and Green functors as its monoids.

The box product is the Day convolution against the Burnside hom of a
product, additivized over orbits.  At each orbit X it is presented by
generators m (x) n indexed by transitive G-sets over X (one block of
M(G/L) (x) N(G/L) per class of transitive over-object), modulo the coend
relations generated by equivariant maps between transitive over-objects:
a transfer in one slot trades for a restriction in the other.  The
universal bilinear pairing, the unit/associativity/commutativity
witnesses, and the internal hom against representables are all exact,
and every isomorphism returns a two-sided matrix witness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import intmat
from .abgroups import FinPresAbGroup
from .burnside import (
    BurnsideElement,
    basis_element,
    compose,
    hom_basis,
    materialize_code,
    res_element,
    restriction_element,
    span_element,
    tensor,
    tr_element,
    transfer_element,
    weyl_element,
)
from .gsets import GMap, GSet, compose_maps, point_gset, product, standard_orbit
from .mackey import (
    MackeyFunctor,
    MackeyMorphism,
    compose_morphisms,
    covering_pairs,
    identity_morphism,
    orbit_embeddings,
    representable,
    yoneda_element,
)


def over_codes(X: GSet):
    """Canonical codes (class, base image) of transitive G-sets over X."""
    pt = point_gset(X.group)
    return tuple((c, x) for (c, _z, x) in hom_basis(pt, X))


def struct_gmap(X: GSet, code) -> GMap:
    """The structure map ORB(class) -> X of an over-code."""
    cidx, x = code
    group = X.group
    O = standard_orbit(group, cidx)
    reps = [c[0] for c in group.left_cosets(
        group.subgroup_classes()[cidx].representative)]
    return GMap(O, X, tuple(X.act(g, x) for g in reps))


def _canonical_over(group, cidx, z, Ob: GSet):
    """Canonical representative z* = min n.z over the normalizer, with witness."""
    cls = group.subgroup_classes()[cidx]
    zstar = min(Ob.act(n, z) for n in cls.normalizer)
    u = min(n for n in cls.normalizer if Ob.act(n, z) == zstar)
    return zstar, u


@dataclass
class BoxData:
    """Presentation bookkeeping for M box N."""
    left: MackeyFunctor
    right: MackeyFunctor
    codes: tuple          # per class: over-codes of the class orbit
    layout: tuple         # per class: dict (code, i, j) -> generator index
    functor: MackeyFunctor = None

    def generator_index(self, level_class, code, i, j):
        return self.layout[level_class][(code, i, j)]

    def generators(self, level_class):
        """Generator keys (code, i, j) in index order."""
        lay = self.layout[level_class]
        out = [None] * len(lay)
        for key, idx in lay.items():
            out[idx] = key
        return out


def _box_level_presentation(M: MackeyFunctor, N: MackeyFunctor, X: GSet):
    """Generators, layout and relations of (M box N)(X) for an orbit X."""
    group = X.group
    codes = over_codes(X)
    layout = {}
    gens = 0
    for c in codes:
        cw = c[0]
        for i in range(M.levels[cw].generator_count):
            for j in range(N.levels[cw].generator_count):
                layout[(c, i, j)] = gens
                gens += 1

    rows = set()

    def add_row(entries):
        row = [0] * gens
        for idx, v in entries.items():
            row[idx] += v
        if any(row):
            rows.add(tuple(row))

    for c in codes:
        cw = c[0]
        relM = M.levels[cw].relation_lattice
        relN = N.levels[cw].relation_lattice
        for r in range(relM.shape[1]):
            for j in range(N.levels[cw].generator_count):
                add_row({layout[(c, i, j)]: relM[i, r]
                         for i in range(M.levels[cw].generator_count)
                         if relM[i, r] != 0})
        for r in range(relN.shape[1]):
            for i in range(M.levels[cw].generator_count):
                add_row({layout[(c, i, j)]: relN[j, r]
                         for j in range(N.levels[cw].generator_count)
                         if relN[j, r] != 0})

    for cp in codes:
        for c in codes:
            for phi in _over_maps(X, cp, c):
                trM = M.eval_span(transfer_element(phi))
                rsM = M.eval_span(restriction_element(phi))
                trN = N.eval_span(transfer_element(phi))
                rsN = N.eval_span(restriction_element(phi))
                nMp, nNp = trM.shape[1], trN.shape[1]
                nM, nN = trM.shape[0], trN.shape[0]
                for ip in range(nMp):
                    for j in range(nN):
                        entries = {}
                        for a in range(nM):
                            if trM[a, ip]:
                                k = layout[(c, a, j)]
                                entries[k] = entries.get(k, 0) + trM[a, ip]
                        for b in range(nNp):
                            if rsN[b, j]:
                                k = layout[(cp, ip, b)]
                                entries[k] = entries.get(k, 0) - rsN[b, j]
                        add_row(entries)
                for i in range(nM):
                    for jp in range(nNp):
                        entries = {}
                        for b in range(nN):
                            if trN[b, jp]:
                                k = layout[(c, i, b)]
                                entries[k] = entries.get(k, 0) + trN[b, jp]
                        for a in range(nMp):
                            if rsM[a, i]:
                                k = layout[(cp, a, jp)]
                                entries[k] = entries.get(k, 0) - rsM[a, i]
                        add_row(entries)

    grp = FinPresAbGroup(gens, intmat.intmat(sorted(rows), gens))
    return codes, layout, grp


def _over_maps(X: GSet, code_src, code_tgt):
    """Equivariant maps between transitive over-objects of X."""
    group = X.group
    cwp, _ = code_src
    cw, _ = code_tgt
    Op = standard_orbit(group, cwp)
    O = standard_orbit(group, cw)
    Lp = group.subgroup_classes()[cwp].representative
    sp = struct_gmap(X, code_src)
    sc = struct_gmap(X, code_tgt)
    reps = [c[0] for c in group.left_cosets(Lp)]
    out = []
    for q in O.fixed_points(Lp):
        if sc(q) != sp(0):
            continue
        out.append(GMap(Op, O, tuple(O.act(g, q) for g in reps)))
    return out


def _level_offsets(levels, X: GSet):
    """Block offsets of the box value at X, matching value_at ordering."""
    group = X.group
    offs = []
    total = 0
    for o in X.orbits():
        c = group.class_index_of(X.stabilizer(o[0]))
        offs.append(total)
        total += levels[c].generator_count
    return offs, total


def _pairing_terms(data: BoxData, levels, U: GSet, V: GSet, e: BurnsideElement):
    """Twisted evaluation matrices for pairing along e: U x V -> X.

    Yields (TM, TN, slot) per transitive code of e, where the image of
    m (x) n accumulates (TM @ m) outer (TN @ n) at the generator slots
    slot(a, b) of the box value at e.target.
    """
    M, N = data.left, data.right
    group = M.group
    PD = product(U, V)
    if e.source != PD.gset:
        raise ValueError("pairing element must start at product(U, V)")
    X = e.target
    offs, _total = _level_offsets(levels, X)
    embeds = orbit_embeddings(X)
    inv_embeds = [{emb(w): w for w in range(emb.source.size)} for emb in embeds]
    orbit_index = {}
    for b, o in enumerate(X.orbits()):
        for y in o:
            orbit_index[y] = b
    out = []
    for code, a in e.coeffs.items():
        cw, _p, y = code
        W, legP, legY = materialize_code(PD.gset, X, code)
        legU = compose_maps(PD.left, legP)
        legV = compose_maps(PD.right, legP)
        RU = M.eval_span(restriction_element(legU))
        RV = N.eval_span(restriction_element(legV))
        b = orbit_index[y]
        cb = group.class_index_of(X.stabilizer(X.orbits()[b][0]))
        z = inv_embeds[b][y]
        Ob = standard_orbit(group, cb)
        zstar, u = _canonical_over(group, cw, z, Ob)
        TM = (M.weyl[cw][u] @ RU) * a
        TN = N.weyl[cw][u] @ RV
        lay = data.layout[cb]
        offset = offs[b]
        key = (cw, zstar)

        def slot(aa, bb, lay=lay, key=key, offset=offset):
            return offset + lay[(key, aa, bb)]

        out.append((TM, TN, slot))
    return out


def box(M: MackeyFunctor, N: MackeyFunctor, presentation=True) -> BoxData:
    """The box product M box N, with pairing data attached.

    With presentation=False only the generator layout is computed: the
    level groups are left free on the generators and the structure maps
    are zero placeholders.  That skeleton is enough for module plumbing
    (injections, action matrices, pairings), and avoids presenting the
    large auxiliary boxes that never get used as honest functors.
    """
    if M.group != N.group:
        raise ValueError("different groups")
    group = M.group
    key = ("box", id(N), presentation)
    if key in M._cache:
        return M._cache[key]
    if presentation and "direct_sum_of" in N._cache:
        data = _box_of_direct_sum(M, N)
        M._cache[key] = data
        return data
    classes = group.subgroup_classes()
    if not presentation:
        codes, layouts, levels = [], [], []
        for cls in classes:
            cs = over_codes(standard_orbit(group, cls.index))
            lay = {}
            gens = 0
            for c in cs:
                cw = c[0]
                for i in range(M.levels[cw].generator_count):
                    for j in range(N.levels[cw].generator_count):
                        lay[(c, i, j)] = gens
                        gens += 1
            codes.append(tuple(cs))
            layouts.append(lay)
            levels.append(FinPresAbGroup.free(gens))
        data = BoxData(M, N, tuple(codes), tuple(layouts))
        res = {p: intmat.zeros(levels[group.class_index_of(p[0])].generator_count,
                               levels[group.class_index_of(p[1])].generator_count)
               for p in covering_pairs(group)}
        tr = {p: intmat.zeros(levels[group.class_index_of(p[1])].generator_count,
                              levels[group.class_index_of(p[0])].generator_count)
              for p in covering_pairs(group)}
        weyl = [{n: intmat.zeros(levels[cls.index].generator_count,
                                 levels[cls.index].generator_count)
                 for n in cls.normalizer} for cls in classes]
        F = MackeyFunctor(group, levels, res, tr, weyl,
                          name="(layout-only box)", check=False)
        F._cache["layout_only"] = True
        data.functor = F
        M._cache[key] = data
        return data
    codes, layouts, levels = [], [], []
    for cls in classes:
        c, l, grp = _box_level_presentation(M, N, standard_orbit(group, cls.index))
        codes.append(c)
        layouts.append(l)
        levels.append(grp)
    data = BoxData(M, N, tuple(codes), tuple(layouts))

    def entry_matrix(e: BurnsideElement, c_src, c_tgt):
        src = standard_orbit(group, c_src)
        cols = [None] * levels[c_src].generator_count
        for code in codes[c_src]:
            terms = _pairing_terms(data, levels, standard_orbit(group, code[0]),
                                   standard_orbit(group, code[0]),
                                   compose(e, _struct_span(src, code)))
            cw = code[0]
            nM = M.levels[cw].generator_count
            nN = N.levels[cw].generator_count
            for i in range(nM):
                for j in range(nN):
                    col = intmat.zero_vec(levels[c_tgt].generator_count)
                    for (TM, TN, slot) in terms:
                        for aa in range(TM.shape[0]):
                            va = TM[aa, i]
                            if va == 0:
                                continue
                            for bb in range(TN.shape[0]):
                                vb = TN[bb, j]
                                if vb:
                                    col[slot(aa, bb)] += va * vb
                    cols[layouts[c_src][(code, i, j)]] = col
        return intmat.from_cols(cols, levels[c_tgt].generator_count)

    res, tr = {}, {}
    for (A, B) in covering_pairs(group):
        ca, cb = group.class_index_of(A), group.class_index_of(B)
        res[(A, B)] = entry_matrix(res_element(group, A, B), cb, ca)
        tr[(A, B)] = entry_matrix(tr_element(group, A, B), ca, cb)
    weyl = []
    for cls in classes:
        weyl.append({n: entry_matrix(weyl_element(group, cls.index, n),
                                     cls.index, cls.index)
                     for n in cls.normalizer})
    name_l = M.name or "M"
    name_r = N.name or "N"
    F = MackeyFunctor(group, levels, res, tr, weyl,
                      name=f"({name_l} box {name_r})", check=False)
    data.functor = F
    F._cache["box_data"] = data
    M._cache[key] = data
    return data


def _box_of_direct_sum(M: MackeyFunctor, N: MackeyFunctor) -> BoxData:
    """Assemble box(M, (+)_b N_b) = (+)_b box(M, N_b), block-major.

    The coend relations never mix summands of the right slot, so the box
    of a tagged direct sum is the direct sum of the per-summand boxes,
    with the layout translating through the summand offsets.
    """
    from .mackey import direct_sum_many
    group = M.group
    summands, offsets_per_class = N._cache["direct_sum_of"]
    parts = [box(M, B) for B in summands]
    functor, _incls, _projs = direct_sum_many(
        [p.functor for p in parts], name=f"({M.name} box sum)")
    classes = group.subgroup_classes()
    codes = parts[0].codes if parts else ()
    layouts = []
    for c in range(len(classes)):
        off = 0
        lay = {}
        for b, p in enumerate(parts):
            for (code, i, j), idx in p.layout[c].items():
                cw = code[0]
                lay[(code, i, offsets_per_class[cw][b] + j)] = off + idx
            off += p.functor.levels[c].generator_count
        layouts.append(lay)
    data = BoxData(M, N, codes, tuple(layouts))
    data.functor = functor
    functor._cache["box_data"] = data
    return data


def _struct_span(X: GSet, code) -> BurnsideElement:
    """Span product(O_L, O_L) => X with legs (diagonal, structure map)."""
    cidx, _x = code
    group = X.group
    O = standard_orbit(group, cidx)
    P = product(O, O)
    diag = GMap(O, P.gset, tuple(P.of_pair(w, w) for w in range(O.size)))
    return span_element(P.gset, X, O, diag, struct_gmap(X, code))


def box_pairing(data: BoxData, U: GSet, V: GSet, e: BurnsideElement,
                u_vec, v_vec):
    """Universal bilinear pairing M(U) x N(V) -> (M box N)(target of e)."""
    levels = data.functor.levels
    _offs, total = _level_offsets(levels, e.target)
    out = intmat.zero_vec(total)
    u_vec = np.asarray(u_vec, dtype=object)
    v_vec = np.asarray(v_vec, dtype=object)
    for (TM, TN, slot) in _pairing_terms(data, levels, U, V, e):
        mv = TM @ u_vec
        nv = TN @ v_vec
        for aa in range(len(mv)):
            if mv[aa] == 0:
                continue
            for bb in range(len(nv)):
                if nv[bb]:
                    out[slot(aa, bb)] += mv[aa] * nv[bb]
    return out


def box_map(f: MackeyMorphism, g: MackeyMorphism,
            presentation=True) -> MackeyMorphism:
    """The induced morphism f box g on box products (same over-codes)."""
    src = box(f.source, g.source, presentation=presentation)
    tgt = box(f.target, g.target, presentation=presentation)
    mats = []
    for c in range(len(src.functor.levels)):
        cols = [None] * src.functor.levels[c].generator_count
        for (code, i, j), idx in src.layout[c].items():
            cw = code[0]
            col = intmat.zero_vec(tgt.functor.levels[c].generator_count)
            for a in range(f.mats[cw].shape[0]):
                va = f.mats[cw][a, i]
                if va == 0:
                    continue
                for b in range(g.mats[cw].shape[0]):
                    vb = g.mats[cw][b, j]
                    if vb:
                        col[tgt.layout[c][(code, a, b)]] += va * vb
            cols[idx] = col
        mats.append(intmat.from_cols(cols, tgt.functor.levels[c].generator_count))
    return MackeyMorphism(src.functor, tgt.functor, mats, check=False)


# -- unit, commutativity, associativity ---------------------------------------------


def point_representable(group) -> MackeyFunctor:
    """The Burnside Mackey functor A_pt, cached per group."""
    key = "point_representable"
    if key not in group._cache:
        group._cache[key] = representable(point_gset(group), name="Burnside")
    return group._cache[key]


def box_unit_eval(M: MackeyFunctor, data: BoxData) -> MackeyMorphism:
    """The evaluation morphism A_pt box M -> M on generators.

    Works on layout-only data as well; no invertibility claims.
    """
    group = M.group
    pt = point_gset(group)
    F = data.functor
    classes = group.subgroup_classes()
    mats = []
    for cls in classes:
        X = standard_orbit(group, cls.index)
        cols = [None] * F.levels[cls.index].generator_count
        for (code, i, j), idx in data.layout[cls.index].items():
            cw = code[0]
            O = standard_orbit(group, cw)
            a_code = hom_basis(pt, O)[i]
            a_span = basis_element(pt, O, a_code)
            lam = product(pt, O).right        # pt x O -> O, bijective
            E = compose(_struct_span(X, code),
                        compose(tensor(a_span, _identity_elt(O)),
                                transfer_element(lam.inverse())))
            cols[idx] = M.eval_span(E)[:, j].copy()
        mats.append(intmat.from_cols(cols, M.levels[cls.index].generator_count))
    return MackeyMorphism(F, M, mats, check=False)


def box_unit_iso(M: MackeyFunctor, unit_rep=None):
    """Isomorphism A_pt box M -> M with verified two-sided inverse.

    Returns (iso, data) where data is the box presentation.  Raises if the
    constructed map fails invertibility, which would signal an
    implementation fault rather than a mathematical one.
    """
    group = M.group
    pt = point_gset(group)
    A = unit_rep if unit_rep is not None else point_representable(group)
    data = box(A, M)
    F = data.functor
    classes = group.subgroup_classes()
    eps = box_unit_eval(M, data)

    # inverse: m |-> [unit (x) m] over the unitor span
    inv_mats = []
    unit_index = _unit_code_index(group)
    for cls in classes:
        X = standard_orbit(group, cls.index)
        lamX = product(pt, X).right
        e = transfer_element(lamX)
        cols = []
        for k in range(M.levels[cls.index].generator_count):
            u_vec = intmat.zero_vec(A.levels[len(classes) - 1].generator_count)
            u_vec[unit_index] = 1
            m_vec = intmat.zero_vec(M.levels[cls.index].generator_count)
            m_vec[k] = 1
            cols.append(box_pairing(data, pt, X, e, u_vec, m_vec))
        inv_mats.append(intmat.from_cols(cols, F.levels[cls.index].generator_count))
    eta = MackeyMorphism(M, F, inv_mats, check=False)

    _verify_two_sided(eps, eta)
    return eps, data


def _identity_elt(X: GSet):
    from .burnside import identity_element
    return identity_element(X)


def _unit_code_index(group):
    pt = point_gset(group)
    basis = hom_basis(pt, pt)
    from .burnside import identity_element
    ident = identity_element(pt)
    (code, v), = ident.coeffs.items()
    assert v == 1
    return basis.index(code)


def _verify_two_sided(f: MackeyMorphism, g: MackeyMorphism):
    if not compose_morphisms(f, g).equals(identity_morphism(f.target)):
        raise ValueError(f"{f.source.name}: witness is not a right inverse")
    if not compose_morphisms(g, f).equals(identity_morphism(f.source)):
        raise ValueError(f"{f.source.name}: witness is not a left inverse")


def box_comm_iso(M: MackeyFunctor, N: MackeyFunctor) -> MackeyMorphism:
    """The symmetry M box N -> N box M, swapping tensor slots."""
    src = box(M, N)
    tgt = box(N, M)
    mats = []
    for c in range(len(src.functor.levels)):
        cols = [None] * src.functor.levels[c].generator_count
        for (code, i, j), idx in src.layout[c].items():
            col = intmat.zero_vec(tgt.functor.levels[c].generator_count)
            col[tgt.layout[c][(code, j, i)]] = 1
            cols[idx] = col
        mats.append(intmat.from_cols(cols, tgt.functor.levels[c].generator_count))
    return MackeyMorphism(src.functor, tgt.functor, mats, check=False)


def box_assoc_iso(M: MackeyFunctor, N: MackeyFunctor, P: MackeyFunctor):
    """Associator (M box N) box P -> M box (N box P), with verified inverse."""
    group = M.group
    MN = box(M, N)
    NP = box(N, P)
    left = box(MN.functor, P)
    right = box(M, NP.functor)

    fwd = _assoc_matrix(left, MN, right, NP, M, N, P)
    bwd = _assoc_matrix_rev(left, MN, right, NP, M, N, P)
    f = MackeyMorphism(left.functor, right.functor, fwd, check=False)
    g = MackeyMorphism(right.functor, left.functor, bwd, check=False)
    _verify_two_sided(f, g)
    return f, g


def _diag_code(group, cw):
    """Canonical over-code of the identity over-object of ORB(cw)."""
    O = standard_orbit(group, cw)
    zstar, _u = _canonical_over(group, cw, 0, O)
    return (cw, zstar)


def _assoc_matrix(left, MN, right, NP, M, N, P):
    """(M box N) box P -> M box (N box P) on generators."""
    group = M.group
    inner_gens = [MN.generators(c) for c in range(len(MN.functor.levels))]
    mats = []
    for c in range(len(left.functor.levels)):
        X = standard_orbit(group, c)
        cols = [None] * left.functor.levels[c].generator_count
        for (code, alpha, k), idx in left.layout[c].items():
            cw, _x = code
            # alpha is a generator of (M box N)(O_cw)
            (code_in, i, j) = inner_gens[cw][alpha]
            cwp, xp = code_in
            phi = struct_gmap(standard_orbit(group, cw), code_in)
            sc = struct_gmap(X, code)
            z = sc(xp)
            zstar, u = _canonical_over(group, cwp, z, X)
            # not canonical yet over X: canonicalize against the block orbit
            # X here is a single orbit, so block = X itself
            WM = M.weyl[cwp][u]
            WN = N.weyl[cwp][u]
            RP = P.eval_span(restriction_element(phi))
            WP = P.weyl[cwp][u] @ RP
            outer_code = (cwp, zstar)
            inner_code = _diag_code(group, cwp)
            col = intmat.zero_vec(right.functor.levels[c].generator_count)
            for a in range(WM.shape[0]):
                va = WM[a, i]
                if va == 0:
                    continue
                for b in range(WN.shape[0]):
                    vb = WN[b, j]
                    if vb == 0:
                        continue
                    for d in range(WP.shape[0]):
                        vd = WP[d, k]
                        if vd == 0:
                            continue
                        beta = NP.layout[cwp][(inner_code, b, d)]
                        col[right.layout[c][(outer_code, a, beta)]] += va * vb * vd
            cols[idx] = col
        mats.append(intmat.from_cols(cols,
                                     right.functor.levels[c].generator_count))
    return mats


def _assoc_matrix_rev(left, MN, right, NP, M, N, P):
    """M box (N box P) -> (M box N) box P on generators."""
    group = M.group
    inner_gens = [NP.generators(c) for c in range(len(NP.functor.levels))]
    mats = []
    for c in range(len(right.functor.levels)):
        X = standard_orbit(group, c)
        cols = [None] * right.functor.levels[c].generator_count
        for (code, i, beta), idx in right.layout[c].items():
            cw, _x = code
            (code_in, j, k) = inner_gens[cw][beta]
            cwp, xp = code_in
            phi = struct_gmap(standard_orbit(group, cw), code_in)
            sc = struct_gmap(X, code)
            z = sc(xp)
            zstar, u = _canonical_over(group, cwp, z, X)
            WN = N.weyl[cwp][u]
            WP = P.weyl[cwp][u]
            RM = M.eval_span(restriction_element(phi))
            WM = M.weyl[cwp][u] @ RM
            outer_code = (cwp, zstar)
            inner_code = _diag_code(group, cwp)
            col = intmat.zero_vec(left.functor.levels[c].generator_count)
            for a in range(WM.shape[0]):
                va = WM[a, i]
                if va == 0:
                    continue
                for b in range(WN.shape[0]):
                    vb = WN[b, j]
                    if vb == 0:
                        continue
                    for d in range(WP.shape[0]):
                        vd = WP[d, k]
                        if vd == 0:
                            continue
                        alpha = MN.layout[cwp][(inner_code, a, b)]
                        col[left.layout[c][(outer_code, alpha, d)]] += va * vb * vd
            cols[idx] = col
        mats.append(intmat.from_cols(cols,
                                     left.functor.levels[c].generator_count))
    return mats


def rep_monoidal_iso(X: GSet, Y: GSet):
    """The natural isomorphism A_X box A_Y -> A_{X x Y}, with inverse.

    Sends a generator (over-code c, a, b) to s_c . (a tensor b); the
    two-sided inverse is solved for and verified.
    """
    group = X.group
    AX, AY = representable(X), representable(Y)
    data = box(AX, AY)
    P = product(X, Y).gset
    AP = representable(P)
    classes = group.subgroup_classes()
    mats = []
    for cls in classes:
        c = cls.index
        O_level = standard_orbit(group, c)
        target_basis = hom_basis(P, O_level)
        cols = [None] * data.functor.levels[c].generator_count
        for (code, i, j), idx in data.layout[c].items():
            cw = code[0]
            O = standard_orbit(group, cw)
            a_code = hom_basis(X, O)[i]
            b_code = hom_basis(Y, O)[j]
            t = tensor(basis_element(X, O, a_code), basis_element(Y, O, b_code))
            e = compose(_struct_span(O_level, code), t)
            col = intmat.zero_vec(len(target_basis))
            for cc, v in e.coeffs.items():
                col[target_basis.index(cc)] += v
            cols[idx] = col
        mats.append(intmat.from_cols(cols, len(target_basis)))
    fwd = MackeyMorphism(data.functor, AP, mats, check=False)
    bwd = fwd.inverse()
    _verify_two_sided(fwd, bwd)
    return fwd, bwd, data


def free_evaluation_iso(M: MackeyFunctor, X: GSet):
    """The natural isomorphism M(X x -) -> M box A_X, with inverse.

    The source is the internal hom F(A_X, M); the map pairs an element of
    M(X x Y) with the identity class of A_X(X) along the evident span.
    """
    group = M.group
    FX = internal_hom_rep(X, M)
    AX = representable(X)
    data = box(M, AX)
    from .mackey import identity_element_vector
    idvec, _rep = identity_element_vector(X)
    classes = group.subgroup_classes()
    mats = []
    for cls in classes:
        c = cls.index
        Y = standard_orbit(group, c)
        U = product(X, Y)
        PU = product(U.gset, X)
        leg1 = GMap(U.gset, PU.gset,
                    tuple(PU.of_pair(w, U.left(w)) for w in range(U.gset.size)))
        e = span_element(PU.gset, Y, U.gset, leg1, U.right)
        grp, _ = M.value_at(U.gset)
        cols = []
        for k in range(grp.generator_count):
            m_vec = intmat.zero_vec(grp.generator_count)
            m_vec[k] = 1
            cols.append(box_pairing(data, U.gset, X, e, m_vec, idvec))
        mats.append(intmat.from_cols(cols,
                                     data.functor.levels[c].generator_count))
    fwd = MackeyMorphism(FX, data.functor, mats, check=True)
    bwd = fwd.inverse()
    _verify_two_sided(fwd, bwd)
    return fwd, bwd, FX, data


# -- internal hom against representables ---------------------------------------------


def internal_hom_rep(X: GSet, M: MackeyFunctor) -> MackeyFunctor:
    """F(A_X, M), with level G/H equal to M(X x G/H)."""
    group = X.group
    from .burnside import identity_element
    idX = identity_element(X)
    classes = group.subgroup_classes()
    levels = []
    for cls in classes:
        grp, _ = M.value_at(product(X, standard_orbit(group, cls.index)).gset)
        levels.append(grp)

    def entry(e: BurnsideElement):
        return M.eval_span(tensor(idX, e))

    res, tr = {}, {}
    for (A, B) in covering_pairs(group):
        res[(A, B)] = entry(res_element(group, A, B))
        tr[(A, B)] = entry(tr_element(group, A, B))
    weyl = []
    for cls in classes:
        weyl.append({n: entry(weyl_element(group, cls.index, n))
                     for n in cls.normalizer})
    return MackeyFunctor(group, levels, res, tr, weyl,
                         name=f"F(A_X, {M.name})", check=False)


# -- Green functors -------------------------------------------------------------------


@dataclass
class GreenFunctor:
    """A Mackey functor with a validated box-product multiplication."""
    underlying: MackeyFunctor
    mult: MackeyMorphism          # (R box R) -> R
    unit: MackeyMorphism          # A_pt -> R
    data: BoxData                 # presentation of R box R
    unit_rep: MackeyFunctor       # the representable A_pt used by unit

    @property
    def group(self):
        return self.underlying.group

    def level_product(self, cidx, x_vec, y_vec):
        """The ring product on R(G/H) through the diagonal pairing."""
        group = self.group
        O = standard_orbit(group, cidx)
        PD = product(O, O)
        diag = GMap(O, PD.gset, tuple(PD.of_pair(w, w) for w in range(O.size)))
        e = restriction_element(diag)
        vec = box_pairing(self.data, O, O, e, x_vec, y_vec)
        return self.mult.mats[cidx] @ vec

    def level_unit(self, cidx):
        """The multiplicative unit of R(G/H)."""
        group = self.group
        pt = point_gset(group)
        O = standard_orbit(group, cidx)
        to_pt = GMap(O, pt, (0,) * O.size)
        res_map = self.underlying.eval_span(restriction_element(to_pt))
        unit_pt = self.unit.mats[len(group.subgroup_classes()) - 1] \
            @ _unit_vector(group, self.unit_rep)
        return res_map @ unit_pt

    def ring_table(self, cidx):
        """Structure constants of the level ring on its generators."""
        n = self.underlying.levels[cidx].generator_count
        out = []
        for i in range(n):
            xi = intmat.zero_vec(n)
            xi[i] = 1
            row = []
            for j in range(n):
                yj = intmat.zero_vec(n)
                yj[j] = 1
                row.append(self.level_product(cidx, xi, yj))
            out.append(row)
        return out


def _unit_vector(group, unit_rep):
    nclasses = len(group.subgroup_classes())
    vec = intmat.zero_vec(unit_rep.levels[nclasses - 1].generator_count)
    vec[_unit_code_index(group)] = 1
    return vec


class GreenValidationError(ValueError):
    pass


def green_from_mult(R: MackeyFunctor, mult: MackeyMorphism,
                    unit: MackeyMorphism, data: BoxData = None,
                    unit_rep: MackeyFunctor = None,
                    check=True) -> GreenFunctor:
    """Assemble a Green functor and verify all its axioms exactly."""
    data = data or box(R, R)
    unit_rep = unit_rep if unit_rep is not None else unit.source
    G = GreenFunctor(R, mult, unit, data, unit_rep)
    if check:
        validate_green(G)
    return G


def validate_green(G: GreenFunctor):
    """Exact associativity/commutativity/unit squares plus Frobenius.

    Raises GreenValidationError naming the first failing axiom and cell.
    """
    R = G.underlying
    group = G.group

    # commutativity: mult . comm = mult
    comm = box_comm_iso(R, R)
    if not compose_morphisms(G.mult, comm).equals(G.mult):
        raise GreenValidationError("multiplication is not commutative")

    # unit square: mult . (unit box id) = unit isomorphism
    eps, data_AR = box_unit_iso(R, unit_rep=G.unit_rep)
    u_boxed = box_map(G.unit, identity_morphism(R))
    if not compose_morphisms(G.mult, u_boxed).equals(eps):
        raise GreenValidationError("unit law fails")

    # associativity through the associator witness
    f, _g = box_assoc_iso(R, R, R)
    path1 = compose_morphisms(G.mult, box_map(G.mult, identity_morphism(R)))
    path2 = compose_morphisms(
        G.mult, compose_morphisms(box_map(identity_morphism(R), G.mult), f))
    if not path1.equals(path2):
        raise GreenValidationError("multiplication is not associative")

    # levelwise: restriction is a ring map; Frobenius reciprocity
    _validate_levelwise(G)


def _validate_levelwise(G: GreenFunctor):
    R = G.underlying
    group = G.group
    for (A, B) in covering_pairs(group):
        ca, cb = group.class_index_of(A), group.class_index_of(B)
        res = R.res[(A, B)]
        tr = R.tr[(A, B)]
        la, lb = R.levels[ca], R.levels[cb]
        nb, na = lb.generator_count, la.generator_count
        for i in range(nb):
            xi = intmat.zero_vec(nb)
            xi[i] = 1
            for j in range(nb):
                yj = intmat.zero_vec(nb)
                yj[j] = 1
                lhs = res @ G.level_product(cb, xi, yj)
                rhs = G.level_product(ca, res @ xi, res @ yj)
                if not la.elements_equal(lhs, rhs):
                    raise GreenValidationError(
                        f"restriction is not a ring map at {A}<{B}, "
                        f"cell ({i},{j})")
        if not la.elements_equal(res @ G.level_unit(cb), G.level_unit(ca)):
            raise GreenValidationError(
                f"restriction does not preserve the unit at {A}<{B}")
        # Frobenius: tr(x . res(y)) = tr(x) . y
        for i in range(na):
            xi = intmat.zero_vec(na)
            xi[i] = 1
            for j in range(nb):
                yj = intmat.zero_vec(nb)
                yj[j] = 1
                lhs = tr @ G.level_product(ca, xi, res @ yj)
                rhs = G.level_product(cb, tr @ xi, yj)
                if not lb.elements_equal(lhs, rhs):
                    raise GreenValidationError(
                        f"Frobenius reciprocity fails at {A}<{B}, "
                        f"cell ({i},{j})")


def green_from_levelwise(R: MackeyFunctor, ring_tables, unit_vec,
                         check=True) -> GreenFunctor:
    """Build the mult/unit morphisms from levelwise ring tables.

    `ring_tables[c][i][j]` is the vector of e_i * e_j in R(G/H_c); `unit_vec`
    is the multiplicative unit of R at the one-point level.  Round-trips
    with green_from_mult through the same validation.
    """
    group = R.group
    classes = group.subgroup_classes()
    data = box(R, R)

    def level_mult(cidx, x_vec, y_vec):
        n = R.levels[cidx].generator_count
        out = intmat.zero_vec(n)
        for i in range(n):
            if x_vec[i] == 0:
                continue
            for j in range(n):
                if y_vec[j]:
                    out += x_vec[i] * y_vec[j] * \
                        np.asarray(ring_tables[cidx][i][j], dtype=object)
        return out

    mats = []
    for cls in classes:
        c = cls.index
        X = standard_orbit(group, c)
        cols = [None] * data.functor.levels[c].generator_count
        for (code, i, j), idx in data.layout[c].items():
            cw = code[0]
            xi = intmat.zero_vec(R.levels[cw].generator_count)
            xi[i] = 1
            yj = intmat.zero_vec(R.levels[cw].generator_count)
            yj[j] = 1
            prod_vec = level_mult(cw, xi, yj)
            push = R.eval_span(transfer_element(struct_gmap(X, code)))
            cols[idx] = push @ prod_vec
        mats.append(intmat.from_cols(cols, R.levels[c].generator_count))
    mult = MackeyMorphism(data.functor, R, mats, check=False)
    unit, unit_rep = yoneda_element(R, point_gset(group), unit_vec)
    return green_from_mult(R, mult, unit, data=data, unit_rep=unit_rep,
                           check=check)


def burnside_green(group, check=True) -> GreenFunctor:
    """The Burnside Green functor: A_pt with the unitor multiplication."""
    key = ("burnside_green", check)
    if key in group._cache:
        return group._cache[key]
    R = point_representable(group)
    eps, data = box_unit_iso(R, unit_rep=R)
    unit = identity_morphism(R)
    G = green_from_mult(R, eps, unit, data=data, unit_rep=R, check=check)
    group._cache[key] = G
    return G


# -- modules over Green functors -------------------------------------------------------


@dataclass
class GreenModule:
    """A Mackey functor with a validated action of a Green functor."""
    ring: GreenFunctor
    underlying: MackeyFunctor
    action: MackeyMorphism        # (R box M) -> M
    data: BoxData                 # presentation of R box M

    @property
    def group(self):
        return self.underlying.group


def module_from_action(ring: GreenFunctor, M: MackeyFunctor,
                       action: MackeyMorphism, data: BoxData = None,
                       check=True) -> GreenModule:
    data = data or box(ring.underlying, M)
    mod = GreenModule(ring, M, action, data)
    if check:
        validate_module(mod)
    return mod


def validate_module(mod: GreenModule):
    """Exact unit and associativity squares for the action."""
    R = mod.ring.underlying
    M = mod.underlying

    eps, data_AM = box_unit_iso(M, unit_rep=mod.ring.unit_rep)
    u_boxed = box_map(mod.ring.unit, identity_morphism(M))
    if not compose_morphisms(mod.action, u_boxed).equals(eps):
        raise GreenValidationError("module unit law fails")

    f, _g = box_assoc_iso(R, R, M)
    path1 = compose_morphisms(mod.action,
                              box_map(mod.ring.mult, identity_morphism(M)))
    path2 = compose_morphisms(
        mod.action, compose_morphisms(box_map(identity_morphism(R), mod.action),
                                      f))
    if not path1.equals(path2):
        raise GreenValidationError("module associativity fails")


def ring_as_module(G: GreenFunctor) -> GreenModule:
    """R regarded as a module over itself via its multiplication."""
    return GreenModule(G, G.underlying, G.mult, G.data)
