"""The effective Burnside category of finite G-sets at isomorphism level.

Morphisms X -> Y are integer combinations of isomorphism classes of spans
X <- U -> Y with transitive middle.  A transitive span is coded by the
G-orbit of the pair (stabilizer L of a middle point, its image point in
X x Y) under simultaneous conjugation; codes are minimized
lexicographically, with the subgroup part landing on its conjugacy-class
representative.  That single canonical form drives composition (by
pullback), the tensor structure (by products), duality and the table of
marks.
"""

from __future__ import annotations

from dataclasses import dataclass

from .groups import FiniteGroup
from .gsets import (
    GMap,
    GSet,
    compose_maps,
    coproduct,
    point_gset,
    product,
    pullback,
    standard_orbit,
)

# code := (subgroup class index, x, y) with (x, y) minimal in its orbit


def transitive_code(X: GSet, Y: GSet, L, x, y):
    """Canonical code of the transitive span with middle G/L marked at (x, y)."""
    group = X.group
    cidx = group.class_index_of(L)
    cls = group.subgroup_classes()[cidx]
    t = group.transport(L)
    best = None
    for n in cls.normalizer:
        g = group.mul(n, t)
        cand = (X.act(g, x), Y.act(g, y))
        if best is None or cand < best:
            best = cand
    return (cidx, best[0], best[1])


def span_codes(X: GSet, Y: GSet, U: GSet, left: GMap, right: GMap):
    """Multiset of transitive codes of the span X <- U -> Y."""
    if left.source != U or right.source != U:
        raise ValueError("legs must start at the middle")
    if left.target != X or right.target != Y:
        raise ValueError("legs do not match the stated feet")
    out = {}
    for orbit in U.orbits():
        u0 = orbit[0]
        code = transitive_code(X, Y, U.stabilizer(u0), left(u0), right(u0))
        out[code] = out.get(code, 0) + 1
    return out


class BurnsideElement:
    """An integer combination of transitive span classes X -> Y."""

    __slots__ = ("source", "target", "coeffs")

    def __init__(self, source: GSet, target: GSet, coeffs=None):
        if source.group != target.group:
            raise ValueError("feet live over different groups")
        self.source = source
        self.target = target
        self.coeffs = {c: int(v) for c, v in (coeffs or {}).items() if v != 0}

    @property
    def group(self):
        return self.source.group

    def __add__(self, other):
        self._check_parallel(other)
        out = dict(self.coeffs)
        for c, v in other.coeffs.items():
            out[c] = out.get(c, 0) + v
        return BurnsideElement(self.source, self.target, out)

    def __sub__(self, other):
        return self + (-1) * other

    def __rmul__(self, k):
        return BurnsideElement(self.source, self.target,
                               {c: k * v for c, v in self.coeffs.items()})

    def __neg__(self):
        return (-1) * self

    def __eq__(self, other):
        if not isinstance(other, BurnsideElement):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.source, self.target,
                     tuple(sorted(self.coeffs.items()))))

    def __repr__(self):
        return f"BurnsideElement({self.coeffs})"

    def is_zero(self):
        return not self.coeffs

    def _check_parallel(self, other):
        if self.source != other.source or self.target != other.target:
            raise ValueError("elements have different feet")


def zero_element(X: GSet, Y: GSet) -> BurnsideElement:
    return BurnsideElement(X, Y)


def basis_element(X: GSet, Y: GSet, code) -> BurnsideElement:
    return BurnsideElement(X, Y, {code: 1})


def span_element(X: GSet, Y: GSet, U: GSet, left: GMap, right: GMap):
    """Canonicalize an explicit span into a BurnsideElement."""
    return BurnsideElement(X, Y, span_codes(X, Y, U, left, right))


def identity_element(X: GSet) -> BurnsideElement:
    from .gsets import identity_map
    i = identity_map(X)
    return span_element(X, X, X, i, i)


def transfer_element(f: GMap) -> BurnsideElement:
    """The span X <- X -> Y with right leg f (pushforward along f)."""
    from .gsets import identity_map
    return span_element(f.source, f.target, f.source,
                        identity_map(f.source), f)


def restriction_element(f: GMap) -> BurnsideElement:
    """The span Y <- X -> X with left leg f (pullback along f)."""
    from .gsets import identity_map
    return span_element(f.target, f.source, f.source,
                        f, identity_map(f.source))


# -- materialization -----------------------------------------------------------


def _coset_reps(group: FiniteGroup, H):
    """Minimal representative of each left coset of H, in point order."""
    return [c[0] for c in group.left_cosets(H)]


def materialize_code(X: GSet, Y: GSet, code):
    """Explicit transitive span (middle, left leg, right leg) for a code."""
    cidx, x, y = code
    group = X.group
    U = standard_orbit(group, cidx)
    reps = _coset_reps(group, group.subgroup_classes()[cidx].representative)
    left = GMap(U, X, tuple(X.act(g, x) for g in reps))
    right = GMap(U, Y, tuple(Y.act(g, y) for g in reps))
    return U, left, right


def hom_basis(X: GSet, Y: GSet):
    """All transitive span codes X -> Y, sorted by (class, x, y)."""
    if X.group != Y.group:
        raise ValueError("different groups")
    group = X.group
    out = set()
    for cls in group.subgroup_classes():
        L = cls.representative
        xs = X.fixed_points(L)
        ys = Y.fixed_points(L)
        for x in xs:
            for y in ys:
                best = min((X.act(n, x), Y.act(n, y)) for n in cls.normalizer)
                out.add((cls.index, best[0], best[1]))
    return sorted(out)


# -- composition, tensor, duality ----------------------------------------------

_compose_cache = {}
_tensor_cache = {}


def _compose_codes(X, Y, Z, c1, c2):
    key = (X, Y, Z, c1, c2)
    hit = _compose_cache.get(key)
    if hit is not None:
        return hit
    U, ux, uy = materialize_code(X, Y, c1)
    V, vy, vz = materialize_code(Y, Z, c2)
    W = pullback(uy, vy)
    left = compose_maps(ux, W.left)
    right = compose_maps(vz, W.right)
    out = span_codes(X, Z, W.gset, left, right)
    _compose_cache[key] = out
    return out


def compose(s2: BurnsideElement, s1: BurnsideElement) -> BurnsideElement:
    """Composite s2 . s1 of spans X -> Y -> Z, by pullback of middles."""
    if s1.target != s2.source:
        raise ValueError("feet do not match for composition")
    X, Y, Z = s1.source, s1.target, s2.target
    out = {}
    for c1, a1 in s1.coeffs.items():
        for c2, a2 in s2.coeffs.items():
            for code, mult in _compose_codes(X, Y, Z, c1, c2).items():
                out[code] = out.get(code, 0) + a1 * a2 * mult
    return BurnsideElement(X, Z, out)


def _tensor_codes(X, Xp, Y, Yp, c1, c2):
    key = (X, Xp, Y, Yp, c1, c2)
    hit = _tensor_cache.get(key)
    if hit is not None:
        return hit
    group = X.group
    ps, pt = product(X, Xp), product(Y, Yp)
    U, ux, uy = materialize_code(X, Y, c1)
    V, vx, vy = materialize_code(Xp, Yp, c2)
    n = U.size * V.size
    raw = GSet(group, [[U.act(g, w // V.size) * V.size + V.act(g, w % V.size)
                        for w in range(n)] for g in group.elements()])
    left = GMap(raw, ps.gset, tuple(ps.of_pair(ux(w // V.size), vx(w % V.size))
                                    for w in range(n)))
    right = GMap(raw, pt.gset, tuple(pt.of_pair(uy(w // V.size), vy(w % V.size))
                                     for w in range(n)))
    out = span_codes(ps.gset, pt.gset, raw, left, right)
    _tensor_cache[key] = out
    return out


def tensor(s: BurnsideElement, t: BurnsideElement) -> BurnsideElement:
    """External product A(X,Y) x A(X',Y') -> A(X x X', Y x Y')."""
    if s.group != t.group:
        raise ValueError("different groups")
    X, Y, Xp, Yp = s.source, s.target, t.source, t.target
    src = product(X, Xp).gset
    tgt = product(Y, Yp).gset
    out = {}
    for c1, a1 in s.coeffs.items():
        for c2, a2 in t.coeffs.items():
            for code, mult in _tensor_codes(X, Xp, Y, Yp, c1, c2).items():
                out[code] = out.get(code, 0) + a1 * a2 * mult
    return BurnsideElement(src, tgt, out)


def dual(s: BurnsideElement) -> BurnsideElement:
    """Flip every span; a contravariant involution A(X,Y) -> A(Y,X)."""
    group = s.group
    out = {}
    for (cidx, x, y), a in s.coeffs.items():
        L = group.subgroup_classes()[cidx].representative
        code = transitive_code(s.target, s.source, L, y, x)
        out[code] = out.get(code, 0) + a
    return BurnsideElement(s.target, s.source, out)


def evaluation_span(X: GSet) -> BurnsideElement:
    """X (x) X -> pt with middle X and legs (diagonal, terminal)."""
    group = X.group
    pt = point_gset(group)
    pd = product(X, X)
    left = GMap(X, pd.gset, tuple(pd.of_pair(x, x) for x in range(X.size)))
    right = GMap(X, pt, (0,) * X.size)
    return span_element(pd.gset, pt, X, left, right)


def coevaluation_span(X: GSet) -> BurnsideElement:
    """pt -> X (x) X with middle X and legs (terminal, diagonal)."""
    group = X.group
    pt = point_gset(group)
    pd = product(X, X)
    left = GMap(X, pt, (0,) * X.size)
    right = GMap(X, pd.gset, tuple(pd.of_pair(x, x) for x in range(X.size)))
    return span_element(pt, pd.gset, X, left, right)


def triangle_composite(X: GSet) -> BurnsideElement:
    """The duality triangle around X, routed through the unitors.

    Builds lambda . (ev (x) id) . assoc . (id (x) coev) . rho^{-1}; for the
    self-dual objects of this category it must equal the identity span.
    """
    from .gsets import identity_map
    group = X.group
    pt = point_gset(group)
    PXX = product(X, X)
    ev, coev = evaluation_span(X), coevaluation_span(X)
    rho = product(X, pt).left        # X x pt -> X, bijective
    lam = product(pt, X).right       # pt x X -> X, bijective
    P_in = product(X, PXX.gset)
    P_out = product(PXX.gset, X)
    assoc = GMap(P_in.gset, P_out.gset,
                 [P_out.of_pair(PXX.of_pair(P_in.left(p),
                                            PXX.left.mapping[P_in.right(p)]),
                                PXX.right.mapping[P_in.right(p)])
                  for p in range(P_in.gset.size)])
    steps = [
        transfer_element(rho.inverse()),
        tensor(identity_element(X), coev),
        transfer_element(assoc),
        tensor(ev, identity_element(X)),
        transfer_element(lam),
    ]
    out = steps[0]
    for s in steps[1:]:
        out = compose(s, out)
    return out


def direct_sum_decompose(e: BurnsideElement, X: GSet, Xp: GSet):
    """Split e: (X + X') -> Y over the two summands of the coproduct."""
    cp = coproduct(X, Xp)
    if e.source != cp.gset:
        raise ValueError("source is not the stated coproduct")
    return (compose(e, transfer_element(cp.left)),
            compose(e, transfer_element(cp.right)))


def direct_sum_reassemble(e1: BurnsideElement, e2: BurnsideElement,
                          X: GSet, Xp: GSet) -> BurnsideElement:
    cp = coproduct(X, Xp)
    return (compose(e1, restriction_element(cp.left))
            + compose(e2, restriction_element(cp.right)))


# -- structure spans between standard orbits ----------------------------------


def raw_coset_gset(group: FiniteGroup, H) -> GSet:
    """Left cosets of an arbitrary subgroup H, ordered by minimal element."""
    cosets = group.left_cosets(H)
    index = {c: i for i, c in enumerate(cosets)}
    action = [[index[tuple(sorted(group.mul(g, x) for x in c))] for c in cosets]
              for g in group.elements()]
    return GSet(group, action)


def _std_point(group: FiniteGroup, cidx: int, g: int) -> int:
    from .gsets import coset_index_of
    return coset_index_of(group, cidx, g)


def res_element(group: FiniteGroup, A, B) -> BurnsideElement:
    """Restriction span ORB([B]) -> ORB([A]) along the inclusion A <= B."""
    A, B = tuple(sorted(A)), tuple(sorted(B))
    if not set(A) <= set(B):
        raise ValueError("A must be contained in B")
    ca, cb = group.class_index_of(A), group.class_index_of(B)
    OA, OB = standard_orbit(group, ca), standard_orbit(group, cb)
    mid = raw_coset_gset(group, A)
    reps = _coset_reps(group, A)
    ta, tb = group.transport(A), group.transport(B)
    left = GMap(mid, OB, tuple(_std_point(group, cb, group.mul(g, group.inv(tb)))
                               for g in reps))
    right = GMap(mid, OA, tuple(_std_point(group, ca, group.mul(g, group.inv(ta)))
                                for g in reps))
    return span_element(OB, OA, mid, left, right)


def tr_element(group: FiniteGroup, A, B) -> BurnsideElement:
    """Transfer span ORB([A]) -> ORB([B]) along the inclusion A <= B."""
    return dual(res_element(group, A, B))


def weyl_element(group: FiniteGroup, cidx: int, n: int) -> BurnsideElement:
    """Conjugation-by-n isomorphism span on ORB([H]), for n normalizing H."""
    cls = group.subgroup_classes()[cidx]
    if n not in cls.normalizer:
        raise ValueError("element does not normalize the representative")
    O = standard_orbit(group, cidx)
    reps = _coset_reps(group, cls.representative)
    phi = GMap(O, O, tuple(_std_point(group, cidx, group.mul(g, group.inv(n)))
                           for g in reps))
    return transfer_element(phi)


# -- table of marks and the Burnside ring --------------------------------------


def table_of_marks(group: FiniteGroup):
    """marks[i][j] = number of K_j-fixed points of G/H_i."""
    classes = group.subgroup_classes()
    return [[len(standard_orbit(group, ci.index).fixed_points(cj.representative))
             for cj in classes] for ci in classes]


def burnside_ring_table(group: FiniteGroup):
    """Structure constants of A(G) on the orbit basis, via products of G-sets.

    entry [i][j] is the list of multiplicities over the orbit basis.
    """
    classes = group.subgroup_classes()
    k = len(classes)
    table = []
    for i in range(k):
        row = []
        for j in range(k):
            pd = product(standard_orbit(group, i), standard_orbit(group, j))
            counts = [0] * k
            for orbit in pd.gset.orbits():
                stab = pd.gset.stabilizer(orbit[0])
                counts[group.class_index_of(stab)] += 1
            row.append(counts)
        table.append(row)
    return table


def burnside_ring_from_spans(group: FiniteGroup):
    """Same structure constants computed by composing A(pt, pt) endospans."""
    pt = point_gset(group)
    basis = hom_basis(pt, pt)
    k = len(basis)
    table = []
    for c1 in basis:
        row = []
        for c2 in basis:
            prod = compose(basis_element(pt, pt, c1), basis_element(pt, pt, c2))
            row.append([prod.coeffs.get(c, 0) for c in basis])
        table.append(row)
    return basis, table


# -- multimaps ----------------------------------------------------------------


@dataclass(frozen=True)
class MultiFeet:
    """Iterated product of a tuple of feet, with projections to each foot."""
    feet: tuple
    gset: GSet
    projections: tuple


def multi_product(feet) -> MultiFeet:
    feet = tuple(feet)
    if not feet:
        raise ValueError("need at least one foot")
    from .gsets import identity_map
    P = feet[0]
    projs = [identity_map(P)]
    for nxt in feet[1:]:
        pd = product(P, nxt)
        projs = [compose_maps(pr, pd.left) for pr in projs]
        projs.append(pd.right)
        P = pd.gset
    return MultiFeet(feet, P, tuple(projs))


def multimap_basis(feet, z: GSet):
    """Transitive multimap codes from a tuple of feet into z."""
    return hom_basis(multi_product(feet).gset, z)


def multimap_element(feet, z: GSet, code) -> BurnsideElement:
    return basis_element(multi_product(feet).gset, z, code)


def multimap_compose(h: BurnsideElement, m: BurnsideElement) -> BurnsideElement:
    """Pair a one-target span h: y -> z with a multimap m: feet -> y."""
    return compose(h, m)


def promonoidal_coend_check(feet, z: GSet):
    """Decategorified promonoidal coend condition.

    Forms (+)_y hom(y, z) (x) multimap(feet, y) over orbit objects y, modulo
    the relations generated by transitive spans between orbits, and checks
    that composition induces an isomorphism onto multimap(feet, z).
    Returns (ok, detail dict).
    """
    import numpy as np

    from . import intmat

    group = z.group
    P = multi_product(feet).gset
    classes = group.subgroup_classes()
    blocks = []   # (y class index, h code, m code)
    for cls in classes:
        Oy = standard_orbit(group, cls.index)
        for h in hom_basis(Oy, z):
            for m in hom_basis(P, Oy):
                blocks.append((cls.index, h, m))
    pos = {b: i for i, b in enumerate(blocks)}
    rhs = hom_basis(P, z)
    rpos = {c: i for i, c in enumerate(rhs)}

    # composition pairing on generators
    pairing = intmat.zeros(len(rhs), len(blocks))
    for b, i in pos.items():
        cy, h, m = b
        Oy = standard_orbit(group, cy)
        comp = compose(basis_element(Oy, z, h), basis_element(P, Oy, m))
        for code, v in comp.coeffs.items():
            pairing[rpos[code], i] += v

    # coend relations from spans a: O_{y'} -> O_y
    rel_cols = []
    for cy in range(len(classes)):
        for cyp in range(len(classes)):
            Oy = standard_orbit(group, cy)
            Oyp = standard_orbit(group, cyp)
            for a in hom_basis(Oyp, Oy):
                amap = basis_element(Oyp, Oy, a)
                for h in hom_basis(Oy, z):
                    ha = compose(basis_element(Oy, z, h), amap)
                    for m in hom_basis(P, Oyp):
                        am = compose(amap, basis_element(P, Oyp, m))
                        col = intmat.zero_vec(len(blocks))
                        for code, v in ha.coeffs.items():
                            col[pos[(cyp, code, m)]] += v
                        for code, v in am.coeffs.items():
                            col[pos[(cy, h, code)]] -= v
                        if not intmat.is_zero(col):
                            rel_cols.append(col)
    rels = intmat.from_cols(rel_cols, len(blocks))

    # the pairing must kill the relations, be surjective, and have kernel
    # exactly the relation lattice
    kills = intmat.is_zero(pairing @ rels) if rels.size else True
    diag = intmat.snf_diagonal(pairing)
    surjective = (len([d for d in diag if d != 0]) == len(rhs)
                  and all(d == 1 for d in diag if d != 0))
    ker = intmat.kernel(pairing)
    kernel_matches = intmat.lattices_equal(ker, rels)
    ok = kills and surjective and kernel_matches
    return ok, {
        "generators": len(blocks),
        "relations": rels.shape[1],
        "target_rank": len(rhs),
        "kills_relations": kills,
        "surjective": surjective,
        "kernel_matches": kernel_matches,
    }
