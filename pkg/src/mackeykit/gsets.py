"""Finite G-sets, equivariant maps, and their limit/colimit calculus.

G-sets are stored as explicit action tables, so products, pullbacks and
fixed points are direct set operations.  Every construction relabels its
result into canonical form: a disjoint union of standard orbits (cosets
of subgroup-class representatives) sorted by class.  This makes GSet
equality plain table equality and keeps all downstream span
canonicalization deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .groups import FiniteGroup


class GSet:
    """A finite set with a validated G-action."""

    def __init__(self, group: FiniteGroup, action, name=None):
        action = tuple(tuple(int(x) for x in row) for row in action)
        if len(action) != group.order:
            raise ValueError("action table needs one row per group element")
        size = len(action[0]) if action else 0
        for row in action:
            if len(row) != size:
                raise ValueError("ragged action table")
            for x in row:
                if not 0 <= x < size:
                    raise ValueError("action value out of range")
        if action and action[0] != tuple(range(size)):
            raise ValueError("identity must act as the identity")
        for g in range(group.order):
            for h in range(group.order):
                gh = group.mul(g, h)
                for x in range(size):
                    if action[g][action[h][x]] != action[gh][x]:
                        raise ValueError(f"not a group action at ({g},{h},{x})")
        self.group = group
        self.size = size
        self.action = action
        self.name = name
        self._cache = {}

    def act(self, g, x):
        return self.action[g][x]

    def __eq__(self, other):
        if not isinstance(other, GSet):
            return NotImplemented
        return self.group == other.group and self.action == other.action

    def __hash__(self):
        return hash((self.group, self.action))

    def __repr__(self):
        label = self.name or f"gset{self.size}"
        return f"GSet({label}, |X|={self.size})"

    def orbits(self):
        """Orbits as sorted tuples, ordered by their minimal point."""
        if "orbits" in self._cache:
            return self._cache["orbits"]
        seen = [False] * self.size
        out = []
        for x in range(self.size):
            if seen[x]:
                continue
            orb = sorted({self.act(g, x) for g in self.group.elements()})
            for y in orb:
                seen[y] = True
            out.append(tuple(orb))
        out = tuple(out)
        self._cache["orbits"] = out
        return out

    def stabilizer(self, x):
        return tuple(g for g in self.group.elements() if self.act(g, x) == x)

    def orbit_type(self):
        """Multiset of subgroup-class indices, one per orbit, sorted."""
        if "orbit_type" in self._cache:
            return self._cache["orbit_type"]
        out = tuple(sorted(self.group.class_index_of(self.stabilizer(o[0]))
                           for o in self.orbits()))
        self._cache["orbit_type"] = out
        return out

    def fixed_points(self, H):
        """Points fixed by every element of the subgroup H."""
        return tuple(x for x in range(self.size)
                     if all(self.act(h, x) == x for h in H))


class GMap:
    """An equivariant map of G-sets."""

    def __init__(self, source: GSet, target: GSet, mapping):
        mapping = tuple(int(x) for x in mapping)
        if source.group != target.group:
            raise ValueError("source and target live over different groups")
        if len(mapping) != source.size:
            raise ValueError("mapping has the wrong length")
        for x in mapping:
            if not 0 <= x < target.size:
                raise ValueError("mapping value out of range")
        for g in source.group.elements():
            for x in range(source.size):
                if mapping[source.act(g, x)] != target.act(g, mapping[x]):
                    raise ValueError(f"map is not equivariant at ({g},{x})")
        self.source = source
        self.target = target
        self.mapping = mapping

    def __call__(self, x):
        return self.mapping[x]

    def __eq__(self, other):
        if not isinstance(other, GMap):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and self.mapping == other.mapping)

    def __hash__(self):
        return hash((self.source, self.target, self.mapping))

    def __repr__(self):
        return f"GMap({self.mapping})"

    def is_bijective(self):
        return sorted(self.mapping) == list(range(self.target.size))

    def inverse(self):
        if not self.is_bijective():
            raise ValueError("map is not bijective")
        inv = [0] * self.target.size
        for x, y in enumerate(self.mapping):
            inv[y] = x
        return GMap(self.target, self.source, inv)


def identity_map(X: GSet) -> GMap:
    return GMap(X, X, range(X.size))


def compose_maps(g: GMap, f: GMap) -> GMap:
    if f.target != g.source:
        raise ValueError("maps are not composable")
    return GMap(f.source, g.target, tuple(g.mapping[f.mapping[x]]
                                          for x in range(f.source.size)))


# -- standard orbits and canonical form ---------------------------------------


@lru_cache(maxsize=None)
def standard_orbit(group: FiniteGroup, class_index: int) -> GSet:
    """The orbit G/H for the class representative H, on sorted cosets."""
    cls = group.subgroup_classes()[class_index]
    cosets = group.left_cosets(cls.representative)
    index = {c: i for i, c in enumerate(cosets)}
    action = [[index[tuple(sorted(group.mul(g, x) for x in c))] for c in cosets]
              for g in group.elements()]
    return GSet(group, action, name=f"{group.name}/{cls.label}")


def orbit_gset(group: FiniteGroup, H) -> GSet:
    """Standard orbit of the class of the subgroup H."""
    return standard_orbit(group, group.class_index_of(H))


def point_gset(group: FiniteGroup) -> GSet:
    """The terminal G-set (one point)."""
    return standard_orbit(group, len(group.subgroup_classes()) - 1)


def empty_gset(group: FiniteGroup) -> GSet:
    return GSet(group, [[] for _ in group.elements()], name="empty")


def coset_index_of(group: FiniteGroup, class_index: int, g: int) -> int:
    """Index of the coset g*H inside the standard orbit of the class."""
    H = group.subgroup_classes()[class_index].representative
    coset = tuple(sorted(group.mul(g, h) for h in H))
    cosets = group.left_cosets(H)
    return cosets.index(coset)


def canonicalize(X: GSet):
    """Canonical form of X plus the witnessing isomorphism X -> canonical.

    The canonical form lists one standard-orbit block per orbit, sorted by
    subgroup class; blocks of equal class keep the order of their original
    minimal points.
    """
    group = X.group
    orbs = X.orbits()
    keyed = []
    for o in orbs:
        base = o[0]
        stab = X.stabilizer(base)
        cidx = group.class_index_of(stab)
        keyed.append((cidx, base, o, stab))
    keyed.sort(key=lambda t: (t[0], t[1]))
    classes = tuple(t[0] for t in keyed)
    target = disjoint_union_of_orbits(group, classes)
    mapping = [0] * X.size
    offset = 0
    for cidx, base, orbit, stab in keyed:
        t = group.transport(stab)
        # g*base  |->  coset (g * t^{-1}) H0, shifted by the block offset
        for g in group.elements():
            x = X.act(g, base)
            c = coset_index_of(group, cidx, group.mul(g, group.inv(t)))
            mapping[x] = offset + c
        offset += standard_orbit(group, cidx).size
    return target, GMap(X, target, mapping)


@lru_cache(maxsize=None)
def disjoint_union_of_orbits(group: FiniteGroup, classes: tuple) -> GSet:
    """Explicit disjoint union of standard orbits for the given classes."""
    classes = tuple(classes)
    blocks = [standard_orbit(group, c) for c in classes]
    action = []
    for g in group.elements():
        row = []
        offset = 0
        for b in blocks:
            row.extend(offset + b.act(g, x) for x in range(b.size))
            offset += b.size
        action.append(row)
    return GSet(group, action)


def is_canonical(X: GSet) -> bool:
    Xc, _ = canonicalize(X)
    return X == Xc


# -- limits and colimits -------------------------------------------------------


@dataclass(frozen=True)
class ProductData:
    gset: GSet
    left: GMap      # projection onto the first factor
    right: GMap     # projection onto the second factor
    pair_index: tuple  # pair_index[x][y] = point of the product

    def of_pair(self, x, y):
        return self.pair_index[x][y]


@lru_cache(maxsize=None)
def product(X: GSet, Y: GSet) -> ProductData:
    """Cartesian product with the diagonal action, canonically relabelled."""
    if X.group != Y.group:
        raise ValueError("factors live over different groups")
    group = X.group
    n = X.size * Y.size
    raw = GSet(group, [[X.act(g, x) * Y.size + Y.act(g, y)
                        for x in range(X.size) for y in range(Y.size)]
                       for g in group.elements()])
    canon, iso = canonicalize(raw)
    pair = tuple(tuple(iso(x * Y.size + y) for y in range(Y.size))
                 for x in range(X.size))
    inv = iso.inverse()
    left = GMap(canon, X, tuple(inv(p) // Y.size for p in range(n)))
    right = GMap(canon, Y, tuple(inv(p) % Y.size for p in range(n)))
    return ProductData(canon, left, right, pair)


@dataclass(frozen=True)
class CoproductData:
    gset: GSet
    left: GMap      # injection of the first summand
    right: GMap     # injection of the second summand


@lru_cache(maxsize=None)
def coproduct(X: GSet, Y: GSet) -> CoproductData:
    """Disjoint union, canonically relabelled, with its injections."""
    if X.group != Y.group:
        raise ValueError("summands live over different groups")
    group = X.group
    raw = GSet(group, [[X.act(g, x) for x in range(X.size)]
                       + [X.size + Y.act(g, y) for y in range(Y.size)]
                       for g in group.elements()])
    canon, iso = canonicalize(raw)
    left = GMap(X, canon, tuple(iso(x) for x in range(X.size)))
    right = GMap(Y, canon, tuple(iso(X.size + y) for y in range(Y.size)))
    return CoproductData(canon, left, right)


@dataclass(frozen=True)
class PullbackData:
    gset: GSet
    left: GMap      # projection to the source of f
    right: GMap     # projection to the source of g


def pullback(f: GMap, g: GMap) -> PullbackData:
    """Fiber product of f and g over their common target."""
    if f.target != g.target:
        raise ValueError("pullback needs a common target")
    group = f.source.group
    pairs = [(x, y) for x in range(f.source.size) for y in range(g.source.size)
             if f(x) == g(y)]
    index = {p: i for i, p in enumerate(pairs)}
    raw = GSet(group, [[index[(f.source.act(h, x), g.source.act(h, y))]
                        for (x, y) in pairs] for h in group.elements()])
    canon, iso = canonicalize(raw)
    inv = iso.inverse()
    left = GMap(canon, f.source, tuple(pairs[inv(p)][0]
                                       for p in range(canon.size)))
    right = GMap(canon, g.source, tuple(pairs[inv(p)][1]
                                        for p in range(canon.size)))
    return PullbackData(canon, left, right)


def orbit_decompose(X: GSet):
    """Orbit multiplicities plus an isomorphism onto standard orbits.

    Returns ([(class_index, multiplicity), ...], iso) where iso maps X onto
    the matching disjoint union of standard orbits.
    """
    canon, iso = canonicalize(X)
    counts = []
    for cidx in sorted({X.group.class_index_of(X.stabilizer(o[0]))
                        for o in X.orbits()}):
        mult = sum(1 for o in X.orbits()
                   if X.group.class_index_of(X.stabilizer(o[0])) == cidx)
        counts.append((cidx, mult))
    return counts, iso


def find_isomorphism(X: GSet, Y: GSet):
    """An equivariant bijection X -> Y, or None.

    Orbit decomposition is a complete isomorphism invariant, so this
    succeeds exactly when the orbit types agree.
    """
    if X.group != Y.group:
        raise ValueError("different groups")
    if X.orbit_type() != Y.orbit_type():
        return None
    _, ix = canonicalize(X)
    cy, iy = canonicalize(Y)
    if ix.target != cy:
        return None
    return compose_maps(iy.inverse(), ix)
