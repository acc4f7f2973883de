"""Ordinary Mackey functors for a finite group, with exact arithmetic.

A Mackey functor stores one finitely presented abelian group per
subgroup-conjugacy class, restriction/transfer matrices on covering pairs
of the actual subgroup lattice, and the normalizer action on each class
representative.  Values at arbitrary subgroups are reached through fixed
transport elements (the minimal conjugator onto the class
representative), and arbitrary spans are evaluated by factoring each
transitive span as transfer . conjugation . restriction.  Functoriality
of that evaluation is exactly the Mackey double-coset formula, and is
enforced by randomized validation rather than trusted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import abgroups, intmat
from .abgroups import FinPresAbGroup
from .burnside import (
    BurnsideElement,
    basis_element,
    compose,
    hom_basis,
    res_element,
    tr_element,
    weyl_element,
)
from .groups import FiniteGroup
from .gsets import GMap, GSet, standard_orbit


def covering_pairs(group: FiniteGroup):
    """Covering pairs (A, B) of the full subgroup lattice, A maximal in B."""
    if "covers" in group._cache:
        return group._cache["covers"]
    subs = group.subgroups()
    out = []
    for B in subs:
        Bs = set(B)
        inside = [A for A in subs if set(A) < Bs]
        for A in inside:
            As = set(A)
            if not any(As < set(C) and set(C) < Bs for C in inside):
                out.append((A, B))
    out = tuple(out)
    group._cache["covers"] = out
    return out


def _maximal_under(group, A, B):
    """Minimal-labelled maximal subgroup of B containing A (A < B)."""
    As, Bs = set(A), set(B)
    best = None
    for C, D in covering_pairs(group):
        if D == B and As <= set(C):
            if best is None or C < best:
                best = C
    if best is None:
        raise ValueError("no covering step found")
    return best


class MackeyFunctor:
    """Levels on subgroup classes plus generating structure matrices."""

    def __init__(self, group: FiniteGroup, levels, res, tr, weyl,
                 name=None, check=True):
        self.group = group
        self.levels = tuple(levels)
        classes = group.subgroup_classes()
        if len(self.levels) != len(classes):
            raise ValueError("need one level per subgroup class")
        self.res = {k: intmat.intmat(v, self.levels[group.class_index_of(k[1])]
                                     .generator_count)
                    for k, v in res.items()}
        self.tr = {k: intmat.intmat(v, self.levels[group.class_index_of(k[0])]
                                    .generator_count)
                   for k, v in tr.items()}
        self.weyl = tuple(dict((n, intmat.intmat(m, self.levels[c].generator_count))
                               for n, m in w.items())
                          for c, w in enumerate(weyl))
        self.name = name
        self._cache = {}
        if check:
            self._check_shapes()

    # -- bookkeeping -----------------------------------------------------------

    def _check_shapes(self):
        group = self.group
        classes = group.subgroup_classes()
        for (A, B) in covering_pairs(group):
            ca, cb = group.class_index_of(A), group.class_index_of(B)
            if (A, B) not in self.res or (A, B) not in self.tr:
                raise ValueError(f"missing structure data for {A} < {B}")
            r, t = self.res[(A, B)], self.tr[(A, B)]
            if r.shape != (self.levels[ca].generator_count,
                           self.levels[cb].generator_count):
                raise ValueError(f"restriction shape mismatch at {A} < {B}")
            if t.shape != (self.levels[cb].generator_count,
                           self.levels[ca].generator_count):
                raise ValueError(f"transfer shape mismatch at {A} < {B}")
            if not abgroups.map_is_welldefined(r, self.levels[cb], self.levels[ca]):
                raise ValueError(f"restriction not well-defined at {A} < {B}")
            if not abgroups.map_is_welldefined(t, self.levels[ca], self.levels[cb]):
                raise ValueError(f"transfer not well-defined at {A} < {B}")
        for cls in classes:
            w = self.weyl[cls.index]
            lvl = self.levels[cls.index]
            for n in cls.normalizer:
                if n not in w:
                    raise ValueError(f"missing normalizer action {n} at class "
                                     f"{cls.label}")
                if not abgroups.map_is_welldefined(w[n], lvl, lvl):
                    raise ValueError(f"conjugation not well-defined at {cls.label}")
            for h in cls.representative:
                if not abgroups.maps_equal(w[h], intmat.identity(lvl.generator_count),
                                           lvl, lvl):
                    raise ValueError(f"inner conjugation must act trivially "
                                     f"at class {cls.label}")

    def level(self, cidx) -> FinPresAbGroup:
        return self.levels[cidx]

    def __repr__(self):
        name = self.name or "MackeyFunctor"
        ranks = [lvl.describe() for lvl in self.levels]
        return f"{name}({', '.join(ranks)})"

    # -- derived structure matrices ---------------------------------------------

    def conj_mat(self, g, L):
        """Matrix of conjugation by g from M@L to M@(gLg^-1), in class coords."""
        group = self.group
        L = tuple(sorted(L))
        Lp = group.conjugate_subgroup(g, L)
        cidx = group.class_index_of(L)
        n = group.mul(group.mul(group.transport(Lp), g),
                      group.inv(group.transport(L)))
        return self.weyl[cidx][n]

    def res_mat(self, A, B):
        """Matrix of restriction from M@B to M@A (A <= B), in class coords."""
        A, B = tuple(sorted(A)), tuple(sorted(B))
        key = ("res", A, B)
        if key in self._cache:
            return self._cache[key]
        if A == B:
            out = intmat.identity(self.levels[self.group.class_index_of(A)]
                                  .generator_count)
        else:
            M = _maximal_under(self.group, A, B)
            out = self.res_mat(A, M) @ self.res[(M, B)]
        self._cache[key] = out
        return out

    def tr_mat(self, A, B):
        """Matrix of transfer from M@A to M@B (A <= B), in class coords."""
        A, B = tuple(sorted(A)), tuple(sorted(B))
        key = ("tr", A, B)
        if key in self._cache:
            return self._cache[key]
        if A == B:
            out = intmat.identity(self.levels[self.group.class_index_of(A)]
                                  .generator_count)
        else:
            M = _maximal_under(self.group, A, B)
            out = self.tr[(M, B)] @ self.tr_mat(A, M)
        self._cache[key] = out
        return out

    # -- values at arbitrary G-sets ----------------------------------------------

    def blocks_of(self, X: GSet):
        """Per-orbit block data of M(X): (base, stabilizer, class index)."""
        return [(o[0], X.stabilizer(o[0]),
                 self.group.class_index_of(X.stabilizer(o[0])))
                for o in X.orbits()]

    def value_at(self, X: GSet):
        """M(X) as a direct sum of class levels; returns (group, offsets)."""
        key = ("value", X)
        if key in self._cache:
            return self._cache[key]
        grp, offsets = abgroups.direct_sum_groups(
            [self.levels[c] for (_, _, c) in self.blocks_of(X)])
        self._cache[key] = (grp, offsets)
        return grp, offsets

    def eval_span(self, e: BurnsideElement):
        """Matrix of M applied to a Burnside element, M(source) -> M(target)."""
        if e.group != self.group:
            raise ValueError("element lives over a different group")
        X, Y = e.source, e.target
        gx, offx = self.value_at(X)
        gy, offy = self.value_at(Y)
        out = intmat.zeros(gy.generator_count, gx.generator_count)
        for code, a in e.coeffs.items():
            block, (bx, by) = self._eval_code(X, Y, code)
            rows, cols = block.shape
            out[offy[by]:offy[by] + rows, offx[bx]:offx[bx] + cols] += a * block
        return out

    def _eval_code(self, X, Y, code):
        key = ("code", X, Y, code)
        if key in self._cache:
            return self._cache[key]
        group = self.group
        cidx, x, y = code
        L = group.subgroup_classes()[cidx].representative
        bxs, bys = self.blocks_of(X), self.blocks_of(Y)
        bx = next(i for i, o in enumerate(X.orbits()) if x in o)
        by = next(i for i, o in enumerate(Y.orbits()) if y in o)
        basex, stabx, cx = bxs[bx]
        basey, staby, cy = bys[by]
        a = next(g for g in group.elements() if X.act(g, basex) == x)
        b = next(g for g in group.elements() if Y.act(g, basey) == y)
        # transport to the standard-orbit picture:  h carries the middle
        # base point into the class representative's coset space
        h = group.mul(a, group.inv(group.transport(stabx)))
        k = group.mul(b, group.inv(group.transport(staby)))
        Sx0 = group.subgroup_classes()[cx].representative
        Sy0 = group.subgroup_classes()[cy].representative
        A2 = group.conjugate_subgroup(group.inv(h), L)
        B2 = group.conjugate_subgroup(group.inv(k), L)
        left = self.conj_mat(h, A2) @ self.res_mat(A2, Sx0)
        right = self.tr_mat(B2, Sy0) @ self.conj_mat(group.inv(k), L)
        block = right @ left
        self._cache[key] = (block, (bx, by))
        return block, (bx, by)

    # -- validation ----------------------------------------------------------------

    def validate_functoriality(self, rng, pairs=60, raise_on_fail=True):
        """Randomized check that eval(compose) = eval . eval on span pairs.

        This is exactly the double-coset (Mackey) formula for the stored
        data.  Returns None on success, else the offending span pair.
        """
        group = self.group
        norb = len(group.subgroup_classes())
        orbs = [standard_orbit(group, i) for i in range(norb)]
        for _ in range(pairs):
            X, Y, Z = (orbs[rng.randrange(norb)] for _ in range(3))
            bx, by = hom_basis(X, Y), hom_basis(Y, Z)
            if not bx or not by:
                continue
            s1 = basis_element(X, Y, bx[rng.randrange(len(bx))])
            s2 = basis_element(Y, Z, by[rng.randrange(len(by))])
            lhs = self.eval_span(compose(s2, s1))
            rhs = self.eval_span(s2) @ self.eval_span(s1)
            gx, _ = self.value_at(X)
            gz, _ = self.value_at(Z)
            if not abgroups.maps_equal(lhs, rhs, gx, gz):
                if raise_on_fail:
                    raise ValueError(
                        f"functoriality fails on spans {s1.coeffs} ; {s2.coeffs} "
                        f"between {X}, {Y}, {Z}")
                return (s1, s2)
        return None


# -- morphisms ---------------------------------------------------------------------


class MackeyMorphism:
    """Levelwise matrices commuting with res, tr and conjugation."""

    def __init__(self, source: MackeyFunctor, target: MackeyFunctor,
                 mats, check=True):
        if source.group != target.group:
            raise ValueError("source and target over different groups")
        self.source = source
        self.target = target
        self.mats = tuple(intmat.intmat(m, source.levels[c].generator_count)
                          for c, m in enumerate(mats))
        if check:
            self._check()

    def _check(self):
        group = self.source.group
        for c, mat in enumerate(self.mats):
            if not abgroups.map_is_welldefined(mat, self.source.levels[c],
                                               self.target.levels[c]):
                raise ValueError(f"morphism not well-defined at class {c}")
        for (A, B) in covering_pairs(group):
            ca, cb = group.class_index_of(A), group.class_index_of(B)
            if not abgroups.maps_equal(
                    self.mats[ca] @ self.source.res[(A, B)],
                    self.target.res[(A, B)] @ self.mats[cb],
                    self.source.levels[cb], self.target.levels[ca]):
                raise ValueError(f"morphism does not commute with res at {A}<{B}")
            if not abgroups.maps_equal(
                    self.mats[cb] @ self.source.tr[(A, B)],
                    self.target.tr[(A, B)] @ self.mats[ca],
                    self.source.levels[ca], self.target.levels[cb]):
                raise ValueError(f"morphism does not commute with tr at {A}<{B}")
        for cls in group.subgroup_classes():
            c = cls.index
            for n in cls.normalizer:
                if not abgroups.maps_equal(
                        self.mats[c] @ self.source.weyl[c][n],
                        self.target.weyl[c][n] @ self.mats[c],
                        self.source.levels[c], self.target.levels[c]):
                    raise ValueError(
                        f"morphism does not commute with conjugation at class {c}")

    def at_gset(self, X: GSet):
        """Induced matrix M(X) -> N(X) in block coordinates."""
        blocks = self.source.blocks_of(X)
        return intmat.block_diag([self.mats[c] for (_, _, c) in blocks])

    def __add__(self, other):
        self._check_parallel(other)
        return MackeyMorphism(self.source, self.target,
                              [a + b for a, b in zip(self.mats, other.mats)],
                              check=False)

    def __sub__(self, other):
        self._check_parallel(other)
        return MackeyMorphism(self.source, self.target,
                              [a - b for a, b in zip(self.mats, other.mats)],
                              check=False)

    def _check_parallel(self, other):
        if self.source is not other.source or self.target is not other.target:
            if self.source != other.source or self.target != other.target:
                raise ValueError("morphisms are not parallel")

    def is_zero(self):
        return all(abgroups.maps_equal(m, intmat.zeros(*m.shape),
                                       self.source.levels[c], self.target.levels[c])
                   for c, m in enumerate(self.mats))

    def equals(self, other):
        return all(abgroups.maps_equal(a, b, self.source.levels[c],
                                       self.target.levels[c])
                   for c, (a, b) in enumerate(zip(self.mats, other.mats)))

    def is_isomorphism(self):
        try:
            self.inverse()
            return True
        except ValueError:
            return False

    def inverse(self):
        """Two-sided inverse morphism; raises if any level is not invertible."""
        invs = []
        for c, mat in enumerate(self.mats):
            inv = _invert_mod(mat, self.source.levels[c], self.target.levels[c])
            if inv is None:
                raise ValueError(f"morphism is not invertible at class {c}")
            invs.append(inv)
        return MackeyMorphism(self.target, self.source, invs, check=False)


def compose_morphisms(g: MackeyMorphism, f: MackeyMorphism) -> MackeyMorphism:
    if f.target != g.source and f.target is not g.source:
        raise ValueError("morphisms are not composable")
    return MackeyMorphism(f.source, g.target,
                          [g.mats[c] @ f.mats[c] for c in range(len(f.mats))],
                          check=False)


def identity_morphism(M: MackeyFunctor) -> MackeyMorphism:
    return MackeyMorphism(M, M, [intmat.identity(l.generator_count)
                                 for l in M.levels], check=False)


def zero_morphism(M: MackeyFunctor, N: MackeyFunctor) -> MackeyMorphism:
    return MackeyMorphism(M, N, [intmat.zeros(N.levels[c].generator_count,
                                              M.levels[c].generator_count)
                                 for c in range(len(M.levels))], check=False)


def _invert_mod(mat, src: FinPresAbGroup, tgt: FinPresAbGroup):
    """Matrix g with mat@g = id (mod tgt rels) and g@mat = id (mod src rels)."""
    n_t, n_s = mat.shape
    lat = tgt.relation_lattice
    stacked = intmat.hstack([mat, lat]) if lat.shape[1] else mat
    solver = intmat.Solver(stacked)
    cols = []
    for j in range(n_t):
        rhs = intmat.zero_vec(n_t)
        rhs[j] = 1
        sol = solver.solve(rhs)
        if sol is None:
            return None
        cols.append(sol[:n_s])
    g = intmat.from_cols(cols, n_s)
    if not abgroups.map_is_welldefined(g, tgt, src):
        return None
    if not abgroups.maps_equal(g @ mat, intmat.identity(n_s), src, src):
        return None
    return g


# -- constructions: representables, span actions ------------------------------------


def mackey_from_span_action(group: FiniteGroup, levels, action, name=None):
    """Build atlas data by evaluating a functor on structure spans.

    `action(e)` must return the matrix of the functor on a Burnside element
    e between standard orbits, in the corresponding level coordinates.
    """
    res, tr = {}, {}
    for (A, B) in covering_pairs(group):
        res[(A, B)] = action(res_element(group, A, B))
        tr[(A, B)] = action(tr_element(group, A, B))
    weyl = []
    for cls in group.subgroup_classes():
        weyl.append({n: action(weyl_element(group, cls.index, n))
                     for n in cls.normalizer})
    return MackeyFunctor(group, levels, res, tr, weyl, name=name)


def representable(X: GSet, name=None) -> MackeyFunctor:
    """The Mackey functor A_X = A(X, -), free on transitive span codes."""
    group = X.group
    classes = group.subgroup_classes()
    bases = [hom_basis(X, standard_orbit(group, c.index)) for c in classes]
    levels = [FinPresAbGroup.free(len(b)) for b in bases]

    def action(e: BurnsideElement):
        src_c = group.class_index_of(e.source.stabilizer(0))
        tgt_c = group.class_index_of(e.target.stabilizer(0))
        out = intmat.zeros(len(bases[tgt_c]), len(bases[src_c]))
        for j, code in enumerate(bases[src_c]):
            comp = compose(e, basis_element(X, e.source, code))
            for c2, v in comp.coeffs.items():
                out[bases[tgt_c].index(c2), j] += v
        return out

    M = mackey_from_span_action(group, levels, action,
                                name=name or f"A[{X.name or X.size}]")
    M._cache["rep_base"] = X
    M._cache["rep_bases"] = bases
    return M


def representable_basis(M: MackeyFunctor, cidx):
    return M._cache["rep_bases"][cidx]


def burnside_mackey(group: FiniteGroup) -> MackeyFunctor:
    """The Burnside Mackey functor, represented by the one-point G-set."""
    from .gsets import point_gset
    return representable(point_gset(group), name="Burnside")


def zero_mackey(group: FiniteGroup) -> MackeyFunctor:
    if "zero_mackey" in group._cache:
        return group._cache["zero_mackey"]
    classes = group.subgroup_classes()
    levels = [FinPresAbGroup.zero() for _ in classes]
    res = {p: intmat.zeros(0, 0) for p in covering_pairs(group)}
    tr = {p: intmat.zeros(0, 0) for p in covering_pairs(group)}
    weyl = [{n: intmat.zeros(0, 0) for n in cls.normalizer} for cls in classes]
    Z = MackeyFunctor(group, levels, res, tr, weyl, name="0")
    group._cache["zero_mackey"] = Z
    return Z


# -- levelwise abelian-category structure ---------------------------------------------


def _literally_zero(f: MackeyMorphism) -> bool:
    return all(intmat.is_zero(m) for m in f.mats)


def kernel(f: MackeyMorphism):
    """Kernel subfunctor with its inclusion morphism."""
    if _literally_zero(f):
        return f.source, identity_morphism(f.source)
    incls = []
    levels = []
    for c, mat in enumerate(f.mats):
        K = intmat.preimage_lattice(mat, f.target.levels[c].relation_lattice)
        grp, basis = abgroups.subgroup_from_lattice(K, f.source.levels[c])
        incls.append(basis)
        levels.append(grp)
    sub = _subfunctor(f.source, levels, incls, name="ker")
    incl = MackeyMorphism(sub, f.source, incls, check=False)
    return sub, incl


def image(f: MackeyMorphism):
    """Image subfunctor of the target with its inclusion morphism."""
    levels, incls = [], []
    for c, mat in enumerate(f.mats):
        grp, basis = abgroups.image_of_map(mat, f.source.levels[c],
                                           f.target.levels[c])
        levels.append(grp)
        incls.append(basis)
    sub = _subfunctor(f.target, levels, incls, name="im")
    incl = MackeyMorphism(sub, f.target, incls, check=False)
    return sub, incl


def _subfunctor(M: MackeyFunctor, levels, incls, name=None):
    """Subfunctor on given level sublattices (columns of incls)."""
    group = M.group

    solvers = {}

    def restrict(mat, c_src, c_tgt):
        cols = []
        if c_tgt not in solvers:
            lat = intmat.hstack([incls[c_tgt],
                                 M.levels[c_tgt].relation_lattice]) \
                if M.levels[c_tgt].relation_lattice.shape[1] else incls[c_tgt]
            solvers[c_tgt] = intmat.Solver(lat)
        k = incls[c_tgt].shape[1]
        for j in range(incls[c_src].shape[1]):
            v = mat @ incls[c_src][:, j]
            sol = solvers[c_tgt].solve(v)
            if sol is None:
                raise ValueError("level lattices are not structure-stable")
            cols.append(sol[:k])
        return intmat.from_cols(cols, k)

    res, tr = {}, {}
    for (A, B) in covering_pairs(group):
        ca, cb = group.class_index_of(A), group.class_index_of(B)
        res[(A, B)] = restrict(M.res[(A, B)], cb, ca)
        tr[(A, B)] = restrict(M.tr[(A, B)], ca, cb)
    weyl = []
    for cls in group.subgroup_classes():
        weyl.append({n: restrict(M.weyl[cls.index][n], cls.index, cls.index)
                     for n in cls.normalizer})
    return MackeyFunctor(group, levels, res, tr, weyl,
                         name=name or f"sub({M.name})", check=False)


def minimize_presentation(M: MackeyFunctor):
    """Isomorphic functor with one generator per invariant factor.

    Returns (Mmin, section, projection) with projection . section the
    identity of Mmin and section . projection the identity of M modulo
    relations.  Quotient constructions leave many redundant generators
    behind; shrinking them keeps later solves small.
    """
    projs, sects, levels = [], [], []
    for lvl in M.levels:
        keep = [i for i, d in enumerate(lvl._diag) if d != 1]
        levels.append(FinPresAbGroup.from_invariants(
            [lvl._diag[i] for i in keep]))
        projs.append(lvl._U[keep, :] if keep else
                     intmat.zeros(0, lvl.generator_count))
        sects.append(lvl._Uinv[:, keep] if keep else
                     intmat.zeros(lvl.generator_count, 0))
    group = M.group

    def squeeze(P, W, S):
        return P @ intmat.sparse_mm(W, S)

    res, tr = {}, {}
    for (A, B) in covering_pairs(group):
        ca, cb = group.class_index_of(A), group.class_index_of(B)
        res[(A, B)] = squeeze(projs[ca], M.res[(A, B)], sects[cb])
        tr[(A, B)] = squeeze(projs[cb], M.tr[(A, B)], sects[ca])
    weyl = []
    for cls in group.subgroup_classes():
        c = cls.index
        weyl.append({n: squeeze(projs[c], M.weyl[c][n], sects[c])
                     for n in cls.normalizer})
    Mmin = MackeyFunctor(group, levels, res, tr, weyl,
                         name=M.name, check=False)
    section = MackeyMorphism(Mmin, M, sects, check=False)
    projection = MackeyMorphism(M, Mmin, projs, check=False)
    return Mmin, section, projection


def cokernel(f: MackeyMorphism):
    """Cokernel functor with its projection morphism."""
    group = f.source.group
    levels = []
    for c, mat in enumerate(f.mats):
        grp, _ = abgroups.cokernel_of_map(mat, f.source.levels[c],
                                          f.target.levels[c])
        levels.append(grp)
    M = f.target
    quo = MackeyFunctor(group, levels, M.res, M.tr,
                        [dict(w) for w in M.weyl],
                        name=f"coker({M.name})", check=False)
    proj = MackeyMorphism(M, quo,
                          [intmat.identity(l.generator_count) for l in M.levels],
                          check=False)
    return quo, proj


def direct_sum_many(functors, name=None):
    """n-ary biproduct, tagged so box products can split over it.

    Returns (D, inclusions, projections).
    """
    functors = list(functors)
    if not functors:
        raise ValueError("need at least one summand")
    group = functors[0].group
    levels = []
    offsets_per_class = []
    for c in range(len(functors[0].levels)):
        grp, offs = abgroups.direct_sum_groups([F.levels[c] for F in functors])
        levels.append(grp)
        offsets_per_class.append(offs)
    res = {k: intmat.block_diag([F.res[k] for F in functors])
           for k in functors[0].res}
    tr = {k: intmat.block_diag([F.tr[k] for F in functors])
          for k in functors[0].tr}
    weyl = [{n: intmat.block_diag([F.weyl[c][n] for F in functors])
             for n in functors[0].weyl[c]}
            for c in range(len(functors[0].levels))]
    D = MackeyFunctor(group, levels, res, tr, weyl,
                      name=name or "(+)", check=False)
    D._cache["direct_sum_of"] = (tuple(functors), tuple(offsets_per_class))
    incls, projs = [], []
    for b, F in enumerate(functors):
        inc_mats, proj_mats = [], []
        for c in range(len(levels)):
            n_f = F.levels[c].generator_count
            n_d = levels[c].generator_count
            off = offsets_per_class[c][b]
            inc = intmat.zeros(n_d, n_f)
            for j in range(n_f):
                inc[off + j, j] = 1
            inc_mats.append(inc)
            proj_mats.append(inc.T.copy())
        incls.append(MackeyMorphism(F, D, inc_mats, check=False))
        projs.append(MackeyMorphism(D, F, proj_mats, check=False))
    return D, incls, projs


def direct_sum(M: MackeyFunctor, N: MackeyFunctor):
    """Biproduct with its two inclusion and two projection morphisms."""
    group = M.group
    levels = []
    for c in range(len(M.levels)):
        grp, _ = abgroups.direct_sum_groups([M.levels[c], N.levels[c]])
        levels.append(grp)
    res = {k: intmat.block_diag([M.res[k], N.res[k]]) for k in M.res}
    tr = {k: intmat.block_diag([M.tr[k], N.tr[k]]) for k in M.tr}
    weyl = [{n: intmat.block_diag([M.weyl[c][n], N.weyl[c][n]])
             for n in M.weyl[c]} for c in range(len(M.levels))]
    D = MackeyFunctor(group, levels, res, tr, weyl,
                      name=f"{M.name}+{N.name}", check=False)
    i1 = MackeyMorphism(M, D, [intmat.vstack([
        intmat.identity(M.levels[c].generator_count),
        intmat.zeros(N.levels[c].generator_count, M.levels[c].generator_count)])
        for c in range(len(levels))], check=False)
    i2 = MackeyMorphism(N, D, [intmat.vstack([
        intmat.zeros(M.levels[c].generator_count, N.levels[c].generator_count),
        intmat.identity(N.levels[c].generator_count)])
        for c in range(len(levels))], check=False)
    p1 = MackeyMorphism(D, M, [intmat.hstack([
        intmat.identity(M.levels[c].generator_count),
        intmat.zeros(M.levels[c].generator_count, N.levels[c].generator_count)])
        for c in range(len(levels))], check=False)
    p2 = MackeyMorphism(D, N, [intmat.hstack([
        intmat.zeros(N.levels[c].generator_count, M.levels[c].generator_count),
        intmat.identity(N.levels[c].generator_count)])
        for c in range(len(levels))], check=False)
    return D, i1, i2, p1, p2


def lift_through_inclusion(incl: MackeyMorphism, f: MackeyMorphism):
    """Factor f: X -> M through a subfunctor inclusion S -> M."""
    if all(m.shape[0] == m.shape[1] and intmat.mats_equal(m, intmat.identity(m.shape[0]))
           for m in incl.mats):
        return MackeyMorphism(f.source, incl.source, f.mats, check=False)
    mats = []
    for c, mat in enumerate(f.mats):
        amb = incl.target.levels[c]
        lat = intmat.hstack([incl.mats[c], amb.relation_lattice]) \
            if amb.relation_lattice.shape[1] else incl.mats[c]
        k = incl.mats[c].shape[1]
        solver = intmat.Solver(lat)
        cols = []
        for j in range(mat.shape[1]):
            sol = solver.solve(mat[:, j])
            if sol is None:
                raise ValueError("morphism does not factor through the subfunctor")
            cols.append(sol[:k])
        mats.append(intmat.from_cols(cols, k))
    return MackeyMorphism(f.source, incl.source, mats, check=False)


def homology_at(d_in: MackeyMorphism, d_out: MackeyMorphism):
    """ker(d_out)/im(d_in), minimized.

    Returns (H, ker_incl, proj, section): proj carries kernel coordinates
    onto H, and section picks a representing cycle (in kernel coordinates)
    for each H generator.
    """
    K, incl = kernel(d_out)
    j = lift_through_inclusion(incl, d_in)
    Hbig, _proj_big = cokernel(j)          # generators = kernel generators
    H, section, projection = minimize_presentation(Hbig)
    return H, incl, projection, section


# -- natural transformations ------------------------------------------------------


@dataclass
class HomGroup:
    """hom(M, N) as a finitely presented group with explicit basis morphisms."""
    group: FinPresAbGroup
    basis: list            # MackeyMorphism per generator
    source: MackeyFunctor
    target: MackeyFunctor
    _entry_layout: tuple
    _lattice: object

    def morphism_from_coords(self, coords):
        vec = self._lattice @ np.asarray(coords, dtype=object)
        return _morphism_from_vec(self.source, self.target,
                                  self._entry_layout, vec)

    def coords_of(self, f: MackeyMorphism):
        vec = _vec_of_morphism(self._entry_layout, f)
        lat = self._lattice
        rel = _hom_zero_lattice(self.source, self.target, self._entry_layout)
        stacked = intmat.hstack([lat, rel]) if rel.shape[1] else lat
        sol = intmat.solve(stacked, vec)
        if sol is None:
            raise ValueError("morphism is not in the computed hom lattice")
        return sol[:lat.shape[1]]


def _hom_layout(M: MackeyFunctor, N: MackeyFunctor):
    layout = []
    total = 0
    for c in range(len(M.levels)):
        rows = N.levels[c].generator_count
        cols = M.levels[c].generator_count
        layout.append((total, rows, cols))
        total += rows * cols
    return tuple(layout), total


def _morphism_from_vec(M, N, layout, vec):
    mats = []
    for (off, rows, cols) in layout:
        m = intmat.zeros(rows, cols)
        for i in range(rows):
            for j in range(cols):
                m[i, j] = vec[off + i * cols + j]
        mats.append(m)
    return MackeyMorphism(M, N, mats, check=False)


def _vec_of_morphism(layout, f: MackeyMorphism):
    total = layout[-1][0] + layout[-1][1] * layout[-1][2] if layout else 0
    vec = intmat.zero_vec(total)
    for c, (off, rows, cols) in enumerate(layout):
        for i in range(rows):
            for j in range(cols):
                vec[off + i * cols + j] = f.mats[c][i, j]
    return vec


def _hom_zero_lattice(M, N, layout):
    """Tuples representing the zero morphism: single columns of N-relators."""
    total = layout[-1][0] + layout[-1][1] * layout[-1][2] if layout else 0
    cols = []
    for c, (off, rows, ncols) in enumerate(layout):
        rel = N.levels[c].relation_lattice
        for r in range(rel.shape[1]):
            for j in range(ncols):
                v = intmat.zero_vec(total)
                for i in range(rows):
                    v[off + i * ncols + j] = rel[i, r]
                cols.append(v)
    return intmat.from_cols(cols, total)


class NatSolver:
    """Integer solver for naturality-style constraints on hom(M, N).

    Unknowns are the per-class matrix entries of a would-be morphism; each
    condition is a vector of linear forms in those entries read modulo the
    relation lattice of a target level (handled by slack variables).
    """

    def __init__(self, M: MackeyFunctor, N: MackeyFunctor):
        self.M = M
        self.N = N
        self.layout, self.total = _hom_layout(M, N)
        self.conditions = []
        self._add_welldefined()
        self._add_structure()

    def entry(self, c, i, j):
        off, _, cols = self.layout[c]
        return off + i * cols + j

    def add_condition(self, coeff_rows, tgt_level):
        """coeff_rows: one {var: coeff} dict per generator of the target."""
        self.conditions.append((coeff_rows, tgt_level))

    def _add_welldefined(self):
        for c in range(len(self.M.levels)):
            src, tgt = self.M.levels[c], self.N.levels[c]
            rel = src.relation_lattice
            for r in range(rel.shape[1]):
                coeff_rows = []
                for i in range(tgt.generator_count):
                    row = {}
                    for j in range(src.generator_count):
                        if rel[j, r] != 0:
                            row[self.entry(c, i, j)] = rel[j, r]
                    coeff_rows.append(row)
                self.add_condition(coeff_rows, tgt)

    def add_commuting(self, c_src, c_tgt, m_src, m_tgt):
        """U_{c_tgt} @ m_src = m_tgt @ U_{c_src}  (mod N relations)."""
        for j in range(m_src.shape[1]):
            coeff_rows = []
            for i in range(self.N.levels[c_tgt].generator_count):
                row = {}
                for k in range(m_src.shape[0]):
                    if m_src[k, j] != 0:
                        key = self.entry(c_tgt, i, k)
                        row[key] = row.get(key, 0) + m_src[k, j]
                for k in range(self.N.levels[c_src].generator_count):
                    if m_tgt[i, k] != 0:
                        key = self.entry(c_src, k, j)
                        row[key] = row.get(key, 0) - m_tgt[i, k]
                coeff_rows.append(row)
            self.add_condition(coeff_rows, self.N.levels[c_tgt])

    def _add_structure(self):
        group = self.M.group
        for (A, B) in covering_pairs(group):
            ca, cb = group.class_index_of(A), group.class_index_of(B)
            self.add_commuting(cb, ca, self.M.res[(A, B)], self.N.res[(A, B)])
            self.add_commuting(ca, cb, self.M.tr[(A, B)], self.N.tr[(A, B)])
        for cls in group.subgroup_classes():
            c = cls.index
            for n in cls.normalizer:
                self.add_commuting(c, c, self.M.weyl[c][n], self.N.weyl[c][n])

    def solve(self) -> HomGroup:
        total = self.total
        nrows = sum(len(cr) for cr, _ in self.conditions)
        nslack = sum(lvl.relation_lattice.shape[1]
                     for _, lvl in self.conditions)
        big = intmat.zeros(nrows, total + nslack)
        r0, s0 = 0, total
        for coeff_rows, lvl in self.conditions:
            rel = lvl.relation_lattice
            for i, row in enumerate(coeff_rows):
                for var, cf in row.items():
                    big[r0 + i, var] += cf
                for s in range(rel.shape[1]):
                    big[r0 + i, s0 + s] += rel[i, s]
            r0 += len(coeff_rows)
            s0 += rel.shape[1]
        ker = intmat.kernel(big)
        sol_lattice = intmat.hermite_normal_form(ker[:total, :]) if total \
            else intmat.zeros(0, 0)
        zero_lat = _hom_zero_lattice(self.M, self.N, self.layout)
        rels = intmat.preimage_lattice(sol_lattice, zero_lat) if total \
            else intmat.zeros(0, 0)
        grp = FinPresAbGroup(sol_lattice.shape[1], rels.T)
        basis = [_morphism_from_vec(self.M, self.N, self.layout,
                                    sol_lattice[:, j])
                 for j in range(sol_lattice.shape[1])]
        return HomGroup(grp, basis, self.M, self.N, self.layout, sol_lattice)


def hom_mackey(M: MackeyFunctor, N: MackeyFunctor) -> HomGroup:
    """Natural transformations M -> N, solved as one integer linear system."""
    return NatSolver(M, N).solve()


# -- Yoneda -----------------------------------------------------------------------


def orbit_embeddings(X: GSet):
    """Standard-orbit isomorphisms onto the orbits of X, one per block."""
    group = X.group
    out = []
    for o in X.orbits():
        base = o[0]
        stab = X.stabilizer(base)
        cidx = group.class_index_of(stab)
        t = group.transport(stab)
        O = standard_orbit(group, cidx)
        reps = [c[0] for c in group.left_cosets(
            group.subgroup_classes()[cidx].representative)]
        out.append(GMap(O, X, tuple(X.act(group.mul(g, t), base) for g in reps)))
    return out


def yoneda_element(M: MackeyFunctor, X: GSet, vec):
    """Morphism A_X -> M classified by the element vec of M(X)."""
    from .burnside import restriction_element
    group = X.group
    rep = representable(X)
    _, offsets = M.value_at(X)
    mats = []
    for c, cls in enumerate(group.subgroup_classes()):
        basis = representable_basis(rep, c)
        O = standard_orbit(group, c)
        cols = []
        for code in basis:
            e = basis_element(X, O, code)
            cols.append(M.eval_span(e) @ np.asarray(vec, dtype=object))
        cols = [np.asarray(col, dtype=object) for col in cols]
        mats.append(intmat.from_cols(cols, M.levels[c].generator_count))
    return MackeyMorphism(rep, M, mats, check=False), rep


def identity_element_vector(X: GSet):
    """Coordinates of [id_X] inside A_X(X) block coordinates."""
    from .burnside import restriction_element
    rep = representable(X)
    grp, offsets = rep.value_at(X)
    vec = intmat.zero_vec(grp.generator_count)
    embeds = orbit_embeddings(X)
    for b, emb in enumerate(embeds):
        cidx = rep.blocks_of(X)[b][2]
        basis = representable_basis(rep, cidx)
        comp = restriction_element(emb)
        for code, v in comp.coeffs.items():
            vec[offsets[b] + basis.index(code)] += v
    return vec, rep


# -- fixed-point (Borel) construction ----------------------------------------------


def fixed_point_mackey(group: FiniteGroup, V: FinPresAbGroup, action,
                       name=None) -> MackeyFunctor:
    """Right Kan extension of a G-module from free orbits.

    Levels are the H-fixed subgroups of V, restrictions are inclusions,
    transfers are coset sums, and conjugation is the module action.
    `action` maps each group element to a matrix on V's generators.
    """
    n = V.generator_count
    act = {g: intmat.intmat(action[g], n) for g in group.elements()}
    ident = intmat.identity(n)
    if not abgroups.maps_equal(act[0], ident, V, V):
        raise ValueError("identity must act trivially")
    for g in group.elements():
        if not abgroups.map_is_welldefined(act[g], V, V):
            raise ValueError(f"action of {g} is not well-defined")
        for h in group.elements():
            if not abgroups.maps_equal(act[g] @ act[h], act[group.mul(g, h)], V, V):
                raise ValueError("action matrices are not a representation")

    classes = group.subgroup_classes()
    fixed_basis = []
    levels = []
    for cls in classes:
        H = cls.representative
        if len(H) == 1:
            lat = intmat.identity(n)
        else:
            stacked = intmat.vstack([act[h] - ident for h in H if h != 0])
            rel = V.relation_lattice
            big_rel = intmat.block_diag([rel] * (len(H) - 1)) if rel.shape[1] \
                else intmat.zeros(stacked.shape[0], 0)
            lat = intmat.preimage_lattice(stacked, big_rel)
        grp, basis = abgroups.subgroup_from_lattice(lat, V)
        fixed_basis.append(basis)
        levels.append(grp)

    coord_solvers = {}

    def coords_in(cidx, v):
        basis = fixed_basis[cidx]
        if cidx not in coord_solvers:
            rel = V.relation_lattice
            lat = intmat.hstack([basis, rel]) if rel.shape[1] else basis
            coord_solvers[cidx] = intmat.Solver(lat)
        sol = coord_solvers[cidx].solve(v)
        if sol is None:
            raise AssertionError("fixed-point bookkeeping is broken")
        return sol[:basis.shape[1]]

    res, tr = {}, {}
    for (A, B) in covering_pairs(group):
        ca, cb = group.class_index_of(A), group.class_index_of(B)
        tA, tB = group.transport(A), group.transport(B)
        # res: V^B -> V^A transported into representative coordinates
        mat_r = act[tA] @ act[group.inv(tB)]
        cols = [coords_in(ca, mat_r @ fixed_basis[cb][:, j])
                for j in range(fixed_basis[cb].shape[1])]
        res[(A, B)] = intmat.from_cols(cols, fixed_basis[ca].shape[1])
        # tr: V^A -> V^B, sum over B/A coset translates
        cos_sum = intmat.zeros(n, n)
        for coset in _subcosets(group, A, B):
            cos_sum += act[coset]
        mat_t = act[tB] @ cos_sum @ act[group.inv(tA)]
        cols = [coords_in(cb, mat_t @ fixed_basis[ca][:, j])
                for j in range(fixed_basis[ca].shape[1])]
        tr[(A, B)] = intmat.from_cols(cols, fixed_basis[cb].shape[1])
    weyl = []
    for cls in classes:
        w = {}
        for nn in cls.normalizer:
            cols = [coords_in(cls.index, act[nn] @ fixed_basis[cls.index][:, j])
                    for j in range(fixed_basis[cls.index].shape[1])]
            w[nn] = intmat.from_cols(cols, fixed_basis[cls.index].shape[1])
        weyl.append(w)
    M = MackeyFunctor(group, levels, res, tr, weyl,
                      name=name or "FP")
    M._cache["fp_module"] = (V, act, fixed_basis)
    return M


def _subcosets(group, A, B):
    """Minimal representatives of the cosets bA inside B."""
    seen = set()
    reps = []
    for b in B:
        coset = tuple(sorted(group.mul(b, a) for a in A))
        if coset not in seen:
            seen.add(coset)
            reps.append(coset[0])
    return reps


def trivial_module(group: FiniteGroup, V: FinPresAbGroup):
    """Constant action data for fixed_point_mackey."""
    n = V.generator_count
    return {g: intmat.identity(n) for g in group.elements()}


def regular_module(group: FiniteGroup):
    """Z[G] with the left regular action."""
    n = group.order
    V = FinPresAbGroup.free(n)
    act = {}
    for g in group.elements():
        m = intmat.zeros(n, n)
        for x in group.elements():
            m[group.mul(g, x), x] = 1
        act[g] = m
    return V, act


# -- user-facing constructor --------------------------------------------------------


def mackey_from_levels(group: FiniteGroup, levels, res_data, tr_data, conj_data,
                       rng=None, validation_pairs=60, name=None):
    """Build and validate a Mackey functor from generating data.

    `res_data`/`tr_data` are keyed by class covering pairs (ca, cb); the
    matrices are read against the canonical subgroup pair (the minimal
    maximal subgroup of the class-cb representative lying in class ca).
    `conj_data[c]` maps elements of the normalizer of the class-c
    representative to matrices; missing elements are filled by closure.
    Validation runs the randomized functoriality test and rejects data
    violating the double-coset formula.
    """
    import random as _random
    classes = group.subgroup_classes()
    levels = tuple(levels)

    weyl = []
    for cls in classes:
        c = cls.index
        n_gens = dict(conj_data.get(c, {}))
        ident = intmat.identity(levels[c].generator_count)
        known = {h: ident for h in cls.representative}
        for g, m in n_gens.items():
            if g not in cls.normalizer:
                raise ValueError(f"{g} does not normalize class {cls.label}")
            known[g] = intmat.intmat(m, levels[c].generator_count)
        changed = True
        while changed:
            changed = False
            for a in list(known):
                for b in list(known):
                    ab = group.mul(a, b)
                    if ab not in known:
                        known[ab] = known[a] @ known[b]
                        changed = True
        missing = [n for n in cls.normalizer if n not in known]
        if missing:
            raise ValueError(f"conjugation data does not generate the "
                             f"normalizer action at class {cls.label}: "
                             f"missing {missing}")
        weyl.append({n: known[n] for n in cls.normalizer})

    tmp = MackeyFunctor(group, levels,
                        {p: intmat.zeros(levels[group.class_index_of(p[0])].generator_count,
                                         levels[group.class_index_of(p[1])].generator_count)
                         for p in covering_pairs(group)},
                        {p: intmat.zeros(levels[group.class_index_of(p[1])].generator_count,
                                         levels[group.class_index_of(p[0])].generator_count)
                         for p in covering_pairs(group)},
                        weyl, check=False)

    def conj_mat(g, L):
        return tmp.conj_mat(g, L)

    res, tr = {}, {}
    for (A, B) in covering_pairs(group):
        ca, cb = group.class_index_of(A), group.class_index_of(B)
        if (ca, cb) not in res_data or (ca, cb) not in tr_data:
            raise ValueError(f"missing res/tr data for class pair ({ca},{cb})")
        K0 = classes[cb].representative
        # canonical stored subgroup: minimal maximal subgroup of K0 in class ca
        stored_sub = min(C for (C, D) in covering_pairs(group)
                         if D == K0 and group.class_index_of(C) == ca)
        r_in = intmat.intmat(res_data[(ca, cb)], levels[cb].generator_count)
        t_in = intmat.intmat(tr_data[(ca, cb)], levels[ca].generator_count)
        cB = group.transport(B)
        A2 = group.conjugate_subgroup(cB, A)
        u = next((x for x in classes[cb].normalizer
                  if group.conjugate_subgroup(x, A2) == stored_sub), None)
        if u is None:
            raise ValueError(
                f"covering pair {A} < {B}: subgroup {A2} is not normalizer-"
                f"conjugate to the canonical {stored_sub}; supply explicit data")
        wB_u = weyl[cb][u]
        # res^{K0}_{A2} = conj_{u^{-1}} . stored . conj_u ; then transport by cB
        r = conj_mat(group.inv(u), stored_sub) @ r_in @ wB_u
        t = weyl[cb][group.inv(u)] @ t_in @ conj_mat(u, A2)
        cA2_back = conj_mat(group.inv(cB), A2)
        res[(A, B)] = cA2_back @ r
        tr[(A, B)] = t @ conj_mat(cB, A)
    M = MackeyFunctor(group, levels, res, tr, weyl, name=name)
    rng = rng or _random.Random(0)
    M.validate_functoriality(rng, pairs=validation_pairs)
    return M
