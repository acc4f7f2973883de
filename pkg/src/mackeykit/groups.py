"""Finite groups given by exact multiplication tables.

Elements are dense integer labels 0..order-1 with 0 the identity.  The
subgroup lattice, conjugacy classes of subgroups, normalizers and double
cosets are all enumerated exactly; every downstream module treats groups
opaquely through `mul`, `inv` and the subgroup-class data computed here.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache


@dataclass(frozen=True)
class SubgroupClass:
    """One conjugacy class of subgroups.

    `representative` is the lexicographically minimal member (as sorted
    label tuples), which downstream canonical forms rely on.
    """
    representative: tuple
    conjugates: tuple
    normalizer: tuple
    weyl_order: int
    index: int
    label: str


class FiniteGroup:
    """A finite group with a validated multiplication table."""

    def __init__(self, table, name=None):
        table = tuple(tuple(int(x) for x in row) for row in table)
        n = len(table)
        if n == 0:
            raise ValueError("empty multiplication table")
        for row in table:
            if len(row) != n:
                raise ValueError("multiplication table is not square")
            for x in row:
                if not 0 <= x < n:
                    raise ValueError("table entry out of range")
        for a in range(n):
            if table[0][a] != a or table[a][0] != a:
                raise ValueError("label 0 is not a two-sided identity")
        for a in range(n):
            for b in range(n):
                tab_ab = table[a][b]
                for c in range(n):
                    if table[tab_ab][c] != table[a][table[b][c]]:
                        raise ValueError(
                            f"table is not associative at ({a},{b},{c})")
        inverse = [None] * n
        for a in range(n):
            for b in range(n):
                if table[a][b] == 0 and table[b][a] == 0:
                    inverse[a] = b
                    break
            if inverse[a] is None:
                raise ValueError(f"element {a} has no two-sided inverse")
        self.order = n
        self.table = table
        self.inverse = tuple(inverse)
        self.name = name or f"group{n}"
        self._cache = {}

    def mul(self, a, b):
        return self.table[a][b]

    def inv(self, a):
        return self.inverse[a]

    def conj(self, g, a):
        """g * a * g^-1."""
        return self.mul(self.mul(g, a), self.inverse[g])

    def elements(self):
        return range(self.order)

    def __eq__(self, other):
        if not isinstance(other, FiniteGroup):
            return NotImplemented
        return self.table == other.table

    def __hash__(self):
        return hash(self.table)

    def __repr__(self):
        return f"FiniteGroup({self.name}, order={self.order})"

    # -- subgroup machinery -------------------------------------------------

    def closure(self, seed):
        """Smallest subgroup containing the seed labels, as a sorted tuple."""
        got = {0}
        frontier = set(seed) | {0}
        got |= frontier
        while frontier:
            new = set()
            for a in got:
                for b in frontier:
                    for c in (self.mul(a, b), self.mul(b, a)):
                        if c not in got:
                            new.add(c)
            for b in frontier:
                c = self.inverse[b]
                if c not in got:
                    new.add(c)
            got |= new
            frontier = new
        return tuple(sorted(got))

    def is_subgroup(self, S) -> bool:
        S = set(S)
        if 0 not in S:
            return False
        return all(self.mul(a, b) in S for a in S for b in S)

    def subgroups(self):
        """All subgroups, sorted by (order, labels).

        Breadth-first closure over subsets seeded by the cyclic subgroups;
        fine at the target scale of |G| <= 12.
        """
        if "subgroups" in self._cache:
            return self._cache["subgroups"]
        found = {self.closure([g]) for g in range(self.order)}
        frontier = set(found)
        while frontier:
            new = set()
            for H in frontier:
                inside = set(H)
                for g in range(self.order):
                    if g not in inside:
                        S = self.closure(H + (g,))
                        if S not in found:
                            found.add(S)
                            new.add(S)
            frontier = new
        out = tuple(sorted(found, key=lambda H: (len(H), H)))
        self._cache["subgroups"] = out
        return out

    def conjugate_subgroup(self, g, H):
        return tuple(sorted(self.conj(g, h) for h in H))

    def normalizer(self, H):
        H = tuple(sorted(H))
        return tuple(g for g in range(self.order)
                     if self.conjugate_subgroup(g, H) == H)

    def subgroup_classes(self):
        """Conjugacy classes of subgroups, ordered by (order, representative)."""
        if "classes" in self._cache:
            return self._cache["classes"]
        seen = set()
        classes = []
        for H in self.subgroups():
            if H in seen:
                continue
            conjs = tuple(sorted({self.conjugate_subgroup(g, H)
                                  for g in range(self.order)}))
            seen.update(conjs)
            rep = conjs[0]
            norm = self.normalizer(rep)
            classes.append((rep, conjs, norm))
        classes.sort(key=lambda c: (len(c[0]), c[0]))
        labels = _class_labels(self, [c[0] for c in classes])
        out = tuple(
            SubgroupClass(representative=rep, conjugates=conjs,
                          normalizer=norm,
                          weyl_order=len(norm) // len(rep),
                          index=i, label=labels[i])
            for i, (rep, conjs, norm) in enumerate(classes))
        self._cache["classes"] = out
        return out

    def class_index_of(self, H):
        """Index of the conjugacy class containing the subgroup H."""
        key = ("clsidx", tuple(sorted(H)))
        if key in self._cache:
            return self._cache[key]
        H = tuple(sorted(H))
        for cls in self.subgroup_classes():
            if H in cls.conjugates:
                self._cache[key] = cls.index
                return cls.index
        raise ValueError(f"{H} is not a subgroup")

    def class_by_label(self, label):
        for cls in self.subgroup_classes():
            if cls.label == label:
                return cls
        aliases = {"1": 0, "e": 0}
        if label in aliases:
            return self.subgroup_classes()[aliases[label]]
        if label == "G":
            return self.subgroup_classes()[-1]
        raise ValueError(f"unknown subgroup-class label {label!r} "
                         f"(known: {[c.label for c in self.subgroup_classes()]})")

    def transport(self, H):
        """Smallest g conjugating H onto its class representative."""
        key = ("transport", tuple(sorted(H)))
        if key in self._cache:
            return self._cache[key]
        H = tuple(sorted(H))
        rep = self.subgroup_classes()[self.class_index_of(H)].representative
        for g in range(self.order):
            if self.conjugate_subgroup(g, H) == rep:
                self._cache[key] = g
                return g
        raise AssertionError("conjugacy class bookkeeping is broken")

    def double_cosets(self, H, K):
        """Representatives of H\\G/K, each the minimal label in its coset."""
        if not self.is_subgroup(H):
            raise ValueError("H is not a subgroup")
        if not self.is_subgroup(K):
            raise ValueError("K is not a subgroup")
        covered = [False] * self.order
        reps = []
        for g in range(self.order):
            if covered[g]:
                continue
            reps.append(g)
            for h in H:
                hg = self.mul(h, g)
                for k in K:
                    covered[self.mul(hg, k)] = True
        return reps

    def double_coset_of(self, g, H, K):
        return tuple(sorted({self.mul(self.mul(h, g), k) for h in H for k in K}))

    def left_cosets(self, H):
        """Cosets gH as sorted tuples, ordered by minimal element."""
        H = tuple(sorted(H))
        seen = [False] * self.order
        cosets = []
        for g in range(self.order):
            if seen[g]:
                continue
            coset = tuple(sorted(self.mul(g, h) for h in H))
            for x in coset:
                seen[x] = True
            cosets.append(coset)
        return cosets


def _element_orders(group, H):
    out = []
    for h in H:
        k, x = 1, h
        while x != 0:
            x = group.mul(x, h)
            k += 1
        out.append(k)
    return out


def _structure_name(group, H):
    n = len(H)
    orders = _element_orders(group, H)
    if n == 1:
        return "e"
    if n in orders:
        return f"C{n}"
    two = orders.count(2)
    abelian = all(group.mul(a, b) == group.mul(b, a) for a in H for b in H)
    if n == 4:
        return "C2xC2"
    if n == 6:
        return "S3"
    if n == 8:
        if abelian:
            return "C2xC2xC2" if two == 7 else "C2xC4"
        return "Q8" if two == 1 else "D4"
    if n == 9:
        return "C3xC3"
    if n == 10:
        return "D5"
    if n == 12:
        if abelian:
            return "C2xC6"
        if two == 7:
            return "D6"
        if two == 3:
            return "A4"
        return "Dic3"
    return f"order{n}"


def _class_labels(group, reps):
    names = [_structure_name(group, rep) for rep in reps]
    labels = []
    for i, name in enumerate(names):
        if names.count(name) == 1:
            labels.append(name)
        else:
            nth = sum(1 for j in range(i) if names[j] == name)
            labels.append(f"{name}.{nth}")
    return labels


# -- construction ------------------------------------------------------------


def group_from_permutations(degree, generators, name=None):
    """Group generated by one-line permutations of range(degree).

    Elements are labelled by the lexicographic order of their one-line
    forms, which puts the identity at label 0.
    """
    degree = int(degree)
    gens = []
    for g in generators:
        g = tuple(int(x) for x in g)
        if sorted(g) != list(range(degree)):
            raise ValueError(f"{g} is not a permutation of {degree} points")
        gens.append(g)
    ident = tuple(range(degree))
    elems = {ident}
    frontier = {ident}
    while frontier:
        new = set()
        for p in frontier:
            for g in gens:
                q = tuple(g[p[i]] for i in range(degree))
                if q not in elems:
                    elems.add(q)
                    new.add(q)
        frontier = new
    elems = sorted(elems)
    index = {p: i for i, p in enumerate(elems)}
    table = [[index[tuple(p[q[i]] for i in range(degree))] for q in elems]
             for p in elems]
    return FiniteGroup(table, name=name)


def cyclic_group_table(n):
    return [[(i + j) % n for j in range(n)] for i in range(n)]


def _quaternion_table():
    # units 1,-1,i,-i,j,-j,k,-k as (symbol, sign), symbol in "1ijk"
    def unpack(x):
        return "1ijk"[x // 2], 1 - 2 * (x % 2)

    def pack(sym, sign):
        return "1ijk".index(sym) * 2 + (0 if sign == 1 else 1)

    rules = {("1", "1"): ("1", 1), ("1", "i"): ("i", 1), ("1", "j"): ("j", 1),
             ("1", "k"): ("k", 1), ("i", "1"): ("i", 1), ("j", "1"): ("j", 1),
             ("k", "1"): ("k", 1), ("i", "i"): ("1", -1), ("j", "j"): ("1", -1),
             ("k", "k"): ("1", -1), ("i", "j"): ("k", 1), ("j", "i"): ("k", -1),
             ("j", "k"): ("i", 1), ("k", "j"): ("i", -1), ("k", "i"): ("j", 1),
             ("i", "k"): ("j", -1)}
    table = []
    for a in range(8):
        row = []
        for b in range(8):
            sa, na = unpack(a)
            sb, nb = unpack(b)
            sym, sign = rules[(sa, sb)]
            row.append(pack(sym, sign * na * nb))
        table.append(row)
    return table


_BUILTIN_SPECS = {
    "trivial": lambda: FiniteGroup([[0]], name="trivial"),
    "C2": lambda: FiniteGroup(cyclic_group_table(2), name="C2"),
    "C3": lambda: FiniteGroup(cyclic_group_table(3), name="C3"),
    "C4": lambda: FiniteGroup(cyclic_group_table(4), name="C4"),
    "C6": lambda: FiniteGroup(cyclic_group_table(6), name="C6"),
    "C2xC2": lambda: group_from_permutations(
        4, [(1, 0, 3, 2), (2, 3, 0, 1)], name="C2xC2"),
    "S3": lambda: group_from_permutations(
        3, [(1, 0, 2), (1, 2, 0)], name="S3"),
    "D4": lambda: group_from_permutations(
        4, [(1, 2, 3, 0), (0, 3, 2, 1)], name="D4"),
    "Q8": lambda: FiniteGroup(_quaternion_table(), name="Q8"),
}

BUILTIN_GROUP_NAMES = tuple(_BUILTIN_SPECS)


@lru_cache(maxsize=None)
def builtin_group(name):
    if name not in _BUILTIN_SPECS:
        raise ValueError(f"unknown group {name!r}; "
                         f"built-ins: {', '.join(BUILTIN_GROUP_NAMES)}")
    return _BUILTIN_SPECS[name]()


def load_group(spec):
    """Build a group from a name or a JSON-style description.

    Accepted forms: a built-in name, {"kind": "table", "table": [[...]]},
    or {"kind": "perm", "degree": n, "generators": [[one-line perm], ...]}.
    """
    if isinstance(spec, str):
        return builtin_group(spec)
    if isinstance(spec, FiniteGroup):
        return spec
    if not isinstance(spec, dict):
        raise ValueError("group spec must be a name or an object")
    kind = spec.get("kind")
    if kind == "table":
        return FiniteGroup(spec["table"], name=spec.get("name"))
    if kind == "perm":
        return group_from_permutations(spec["degree"], spec["generators"],
                                       name=spec.get("name"))
    raise ValueError(f"unknown group kind {kind!r}")
