"""JSON schemas for groups, G-sets, Mackey functors and Green functors.

Groups load from built-in names, multiplication tables, or permutation
generators.  Mackey functors are keyed by subgroup-class labels in the
canonical class order (ascending subgroup order, then lexicographic
representative); restriction and transfer matrices are read against the
canonical covering pair of each class pair, and conjugation data against
normalizer elements of the class representative.  Every loader validates
and every dump reloads to an equal object.
"""

from __future__ import annotations

import json

from . import intmat
from .abgroups import FinPresAbGroup
from .convolution import GreenFunctor, green_from_levelwise
from .groups import FiniteGroup, load_group
from .gsets import GSet, disjoint_union_of_orbits, empty_gset
from .mackey import MackeyFunctor, covering_pairs, mackey_from_levels


def group_to_json(group: FiniteGroup):
    return {"kind": "table", "name": group.name,
            "table": [list(r) for r in group.table]}


def gset_from_json(doc, group=None) -> GSet:
    """{"group":..., "size": n, "action": [...]} or {"group":..., "orbits": [[label, mult], ...]}."""
    if group is None:
        group = load_group(doc["group"])
    if "orbits" in doc:
        classes = []
        for label, mult in doc["orbits"]:
            cls = group.class_by_label(label)
            classes.extend([cls.index] * int(mult))
        if not classes:
            return empty_gset(group)
        return disjoint_union_of_orbits(group, tuple(sorted(classes)))
    action = doc["action"]
    if doc.get("size") is not None and action and len(action[0]) != doc["size"]:
        raise ValueError("size does not match the action table")
    return GSet(group, action)


def gset_to_json(X: GSet):
    return {"group": group_to_json(X.group), "size": X.size,
            "action": [list(r) for r in X.action]}


def parse_gset_expr(group: FiniteGroup, expr: str) -> GSet:
    """Orbit-sum shorthand like 'e+e+C2' or 'C2*2+e'."""
    classes = []
    for part in expr.split("+"):
        part = part.strip()
        if not part:
            continue
        if "*" in part:
            label, mult = part.split("*")
            mult = int(mult)
        else:
            label, mult = part, 1
        cls = group.class_by_label(label.strip())
        classes.extend([cls.index] * mult)
    if not classes:
        return empty_gset(group)
    return disjoint_union_of_orbits(group, tuple(sorted(classes)))


def _canonical_cover_key(group, ca, cb):
    """The canonical stored subgroup pair for a class covering pair."""
    K0 = group.subgroup_classes()[cb].representative
    return min(C for (C, D) in covering_pairs(group)
               if D == K0 and group.class_index_of(C) == ca), K0


def class_cover_pairs(group):
    """Covering pairs of subgroup classes, via the canonical subgroup pairs."""
    seen = []
    for (A, B) in covering_pairs(group):
        ca, cb = group.class_index_of(A), group.class_index_of(B)
        if (ca, cb) not in seen:
            seen.append((ca, cb))
    return seen


def mackey_to_json(M: MackeyFunctor):
    group = M.group
    classes = group.subgroup_classes()
    levels = {}
    for cls in classes:
        lvl = M.levels[cls.index]
        levels[cls.label] = {
            "generators": lvl.generator_count,
            "relations": [list(r) for r in lvl.relations],
            "invariant_factors": list(lvl.invariant_factors),
        }
    res, tr = {}, {}
    for (ca, cb) in class_cover_pairs(group):
        Hp, K0 = _canonical_cover_key(group, ca, cb)
        key = f"{classes[ca].label}<{classes[cb].label}"
        res[key] = [list(r) for r in M.res[(Hp, K0)]]
        tr[key] = [list(r) for r in M.tr[(Hp, K0)]]
    conj = {}
    for cls in classes:
        conj[cls.label] = {str(n): [list(r) for r in M.weyl[cls.index][n]]
                           for n in cls.normalizer}
    return {
        "group": group_to_json(group),
        "class_order": [cls.label for cls in classes],
        "levels": levels,
        "res": res,
        "tr": tr,
        "conj": conj,
        "name": M.name,
    }


def mackey_from_json(doc, rng=None, validation_pairs=60) -> MackeyFunctor:
    group = load_group(doc["group"])
    classes = group.subgroup_classes()
    if "class_order" in doc:
        expect = [cls.label for cls in classes]
        if list(doc["class_order"]) != expect:
            raise ValueError(f"class_order must be {expect}")
    levels = []
    for cls in classes:
        entry = doc["levels"][cls.label]
        levels.append(FinPresAbGroup(entry["generators"],
                                     intmat.intmat(entry.get("relations", []),
                                                   entry["generators"])))
    label_to_idx = {cls.label: cls.index for cls in classes}

    def read_pairs(table):
        out = {}
        for key, mat in table.items():
            la, lb = key.split("<")
            out[(label_to_idx[la], label_to_idx[lb])] = mat
        return out

    conj = {}
    for cls in classes:
        given = doc.get("conj", {}).get(cls.label, {})
        conj[cls.index] = {int(g): m for g, m in given.items()}
    return mackey_from_levels(group, levels, read_pairs(doc["res"]),
                              read_pairs(doc["tr"]), conj, rng=rng,
                              validation_pairs=validation_pairs,
                              name=doc.get("name"))


def green_to_json(G: GreenFunctor):
    group = G.group
    classes = group.subgroup_classes()
    rings = {}
    for cls in classes:
        table = G.ring_table(cls.index)
        rings[cls.label] = [[list(v) for v in row] for row in table]
    unit = list(G.level_unit(len(classes) - 1))
    return {"mackey": mackey_to_json(G.underlying),
            "rings": rings,
            "unit": [int(u) for u in unit]}


def green_from_json(doc, rng=None, check=True) -> GreenFunctor:
    M = mackey_from_json(doc["mackey"], rng=rng)
    group = M.group
    classes = group.subgroup_classes()
    tables = []
    for cls in classes:
        raw = doc["rings"][cls.label]
        tables.append([[intmat.intvec(v) for v in row] for row in raw])
    unit_vec = intmat.intvec(doc["unit"])
    return green_from_levelwise(M, tables, unit_vec, check=check)


def load_json_file(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def code_to_json(group, code):
    cidx, x, y = code
    return [group.subgroup_classes()[cidx].label, x, y]


def code_from_json(group, doc):
    label, x, y = doc
    return (group.class_by_label(label).index, int(x), int(y))


def element_to_json(e):
    group = e.group
    return {"coefficients": [[code_to_json(group, c), int(v)]
                             for c, v in sorted(e.coeffs.items())]}


def element_from_json(group, source, target, doc):
    from .burnside import BurnsideElement
    coeffs = {}
    for code_doc, v in doc["coefficients"]:
        coeffs[code_from_json(group, code_doc)] = int(v)
    return BurnsideElement(source, target, coeffs)
