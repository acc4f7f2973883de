"""Command-line surface: stable, machine-readable access to the library.

Every subcommand emits either aligned text or a single JSON object with
"schema_version": 1.  Exit codes: 0 success, 1 verification failure,
2 usage errors.  Randomized subcommands take --seed and are then
byte-reproducible.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys

from . import jsonio
from .burnside import (
    basis_element,
    burnside_ring_from_spans,
    burnside_ring_table,
    compose,
    hom_basis,
    identity_element,
    multimap_basis,
    promonoidal_coend_check,
    table_of_marks,
    triangle_composite,
)
from .convolution import GreenValidationError, box, burnside_green
from .groups import BUILTIN_GROUP_NAMES, load_group
from .gsets import point_gset, standard_orbit
from .homalg import (
    canonical_module,
    skeletal_filtration,
    ss_pages,
    tor,
    ChainComplex,
)
from .ktheory import bpq_verify
from .mackey import MackeyFunctor, MackeyMorphism

SCHEMA_VERSION = 1


def _styled(text, code):
    if os.environ.get("MACKEYKIT_NO_COLOR") or not sys.stdout.isatty():
        return text
    return f"\x1b[{code}m{text}\x1b[0m"


def _ok(text="ok"):
    return _styled(text, "32")


def _fail(text="FAIL"):
    return _styled(text, "31")


def _emit(args, payload, text_lines):
    if args.format == "json":
        payload = {"schema_version": SCHEMA_VERSION, **payload}
        out = json.dumps(payload, indent=2, sort_keys=True)
    else:
        out = "\n".join(text_lines)
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out + "\n")
    else:
        print(out)


def _table(rows, headers=None):
    rows = [[str(c) for c in r] for r in rows]
    if headers:
        rows = [list(headers)] + rows
    if not rows:
        return []
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip()
             for r in rows]
    if headers:
        lines.insert(1, "  ".join("-" * w for w in widths))
    return lines


def _load_group_arg(args):
    spec = args.group
    if spec.endswith(".json") or os.path.exists(spec):
        return load_group(jsonio.load_json_file(spec))
    if spec.startswith("{"):
        return load_group(json.loads(spec))
    return load_group(spec)


def _gset_arg(group, text):
    if text.endswith(".json") or os.path.exists(text):
        return jsonio.gset_from_json(jsonio.load_json_file(text), group)
    if text.startswith("{"):
        return jsonio.gset_from_json(json.loads(text), group)
    return jsonio.parse_gset_expr(group, text)


def cmd_group_info(args):
    group = _load_group_arg(args)
    classes = group.subgroup_classes()
    rows = [[c.label, len(c.representative), len(c.conjugates), c.weyl_order]
            for c in classes]
    payload = {"group": group.name, "order": group.order,
               "subgroups": len(group.subgroups()),
               "classes": [{"label": c.label,
                            "order": len(c.representative),
                            "conjugates": len(c.conjugates),
                            "weyl_order": c.weyl_order} for c in classes]}
    lines = [f"group {group.name}: order {group.order}, "
             f"{len(group.subgroups())} subgroups, {len(classes)} classes"]
    lines += _table(rows, headers=("class", "order", "conjugates", "weyl"))
    _emit(args, payload, lines)
    return 0


def cmd_marks(args):
    group = _load_group_arg(args)
    marks = table_of_marks(group)
    labels = [c.label for c in group.subgroup_classes()]
    payload = {"group": group.name, "classes": labels, "marks": marks}
    lines = [f"table of marks for {group.name} (rows G/H, columns K)"]
    lines += _table([[labels[i]] + marks[i] for i in range(len(labels))],
                    headers=["orbit"] + labels)
    _emit(args, payload, lines)
    return 0


def cmd_burnside_ring(args):
    group = _load_group_arg(args)
    table = burnside_ring_table(group)
    basis, spans = burnside_ring_from_spans(group)
    agree = table == spans
    labels = [c.label for c in group.subgroup_classes()]
    payload = {"group": group.name, "basis": labels, "table": table,
               "span_composition_agrees": agree}
    lines = [f"Burnside ring of {group.name} on the orbit basis"]
    for i, li in enumerate(labels):
        for j, lj in enumerate(labels):
            terms = [f"{c}*[{labels[k]}]" for k, c in enumerate(table[i][j]) if c]
            lines.append(f"[{li}] * [{lj}] = {' + '.join(terms) if terms else '0'}")
    lines.append(f"endomorphism-composition check: "
                 f"{_ok() if agree else _fail()}")
    _emit(args, payload, lines)
    return 0 if agree else 1


def cmd_hom_basis(args):
    group = _load_group_arg(args)
    X = _gset_arg(group, args.source)
    Y = _gset_arg(group, args.target)
    basis = hom_basis(X, Y)
    payload = {"group": group.name,
               "basis": [jsonio.code_to_json(group, c) for c in basis]}
    lines = [f"A(X, Y) has rank {len(basis)}; basis codes "
             f"(stabilizer class, x, y):"]
    lines += [f"  {jsonio.code_to_json(group, c)}" for c in basis]
    _emit(args, payload, lines)
    return 0


def cmd_compose(args):
    first = jsonio.load_json_file(args.first)
    second = jsonio.load_json_file(args.second)
    group = load_group(first["group"])
    X = jsonio.gset_from_json(first["source"], group)
    Y = jsonio.gset_from_json(first["target"], group)
    Yp = jsonio.gset_from_json(second["source"], group)
    Z = jsonio.gset_from_json(second["target"], group)
    f = jsonio.element_from_json(group, X, Y, first)
    g = jsonio.element_from_json(group, Yp, Z, second)
    out = compose(g, f)
    payload = {"group": group.name, "composite": jsonio.element_to_json(out)}
    lines = ["composite (second . first):"]
    for c, v in sorted(out.coeffs.items()):
        lines.append(f"  {v} * {jsonio.code_to_json(group, c)}")
    if not out.coeffs:
        lines.append("  0")
    _emit(args, payload, lines)
    return 0


def cmd_mackey_check(args):
    rng = random.Random(args.seed)
    try:
        M = jsonio.mackey_from_json(jsonio.load_json_file(args.file),
                                    rng=rng, validation_pairs=args.pairs)
    except ValueError as err:
        _emit(args, {"valid": False, "error": str(err)},
              [f"mackey-check: {_fail()}", f"  {err}"])
        return 1
    labels = [c.label for c in M.group.subgroup_classes()]
    payload = {"valid": True,
               "levels": {labels[c]: list(M.levels[c].invariant_factors)
                          for c in range(len(labels))}}
    lines = [f"mackey-check: {_ok()}"]
    lines += _table([[labels[c], M.levels[c].describe()]
                     for c in range(len(labels))],
                    headers=("level", "group"))
    _emit(args, payload, lines)
    return 0


def cmd_box(args):
    rng = random.Random(args.seed)
    M = jsonio.mackey_from_json(jsonio.load_json_file(args.left), rng=rng)
    N = jsonio.mackey_from_json(jsonio.load_json_file(args.right), rng=rng)
    data = box(M, N)
    labels = [c.label for c in M.group.subgroup_classes()]
    payload = {"levels": {labels[c]:
                          list(data.functor.levels[c].invariant_factors)
                          for c in range(len(labels))}}
    lines = ["box product levels:"]
    lines += _table([[labels[c], data.functor.levels[c].describe()]
                     for c in range(len(labels))],
                    headers=("level", "group"))
    _emit(args, payload, lines)
    return 0


def cmd_green_check(args):
    rng = random.Random(args.seed)
    doc = jsonio.load_json_file(args.file)
    try:
        G = jsonio.green_from_json(doc, rng=rng, check=True)
    except (GreenValidationError, ValueError) as err:
        _emit(args, {"valid": False, "error": str(err)},
              [f"green-check: {_fail()}", f"  {err}"])
        return 1
    labels = [c.label for c in G.group.subgroup_classes()]
    payload = {"valid": True,
               "levels": {labels[c]:
                          list(G.underlying.levels[c].invariant_factors)
                          for c in range(len(labels))}}
    lines = [f"green-check: {_ok()} (associativity, commutativity, unit, "
             "Frobenius all hold)"]
    lines += _table([[labels[c], G.underlying.levels[c].describe()]
                     for c in range(len(labels))],
                    headers=("level", "ring underlying"))
    _emit(args, payload, lines)
    return 0


def _tor_ring(args, doc):
    if isinstance(doc, dict) and "burnside" in doc:
        return burnside_green(load_group(doc["burnside"]), check=False)
    raise ValueError(
        'tor/ss expect the ring file to be {"burnside": "<group>"}; general '
        "Green rings need module actions and are library-level only")


def cmd_tor(args):
    rng = random.Random(args.seed)
    ring_doc = jsonio.load_json_file(args.ring)
    R = _tor_ring(args, ring_doc)
    group = R.group
    M = jsonio.mackey_from_json(jsonio.load_json_file(args.left), rng=rng)
    N = jsonio.mackey_from_json(jsonio.load_json_file(args.right), rng=rng)
    result = tor(R, canonical_module(R, M), canonical_module(R, N), args.pmax)
    labels = [c.label for c in group.subgroup_classes()]
    payload = {"group": group.name,
               "tor": [{labels[c]: list(T.levels[c].invariant_factors)
                        for c in range(len(labels))} for T in result.tor]}
    lines = []
    for p, T in enumerate(result.tor):
        lines.append(f"Tor_{p}:")
        lines += _table([[labels[c], T.levels[c].describe()]
                         for c in range(len(labels))],
                        headers=("level", "group"))
    _emit(args, payload, lines)
    return 0


def cmd_ss(args):
    rng = random.Random(args.seed)
    doc = jsonio.load_json_file(args.file)
    group = load_group(doc["group"])
    terms = {}
    for deg, mdoc in doc["terms"].items():
        terms[int(deg)] = jsonio.mackey_from_json(mdoc, rng=rng)
    diffs = {}
    labels = {c.label: c.index for c in group.subgroup_classes()}
    for deg, mats in doc.get("diffs", {}).items():
        n = int(deg)
        ordered = [mats[lbl] for lbl in
                   [c.label for c in group.subgroup_classes()]]
        diffs[n] = MackeyMorphism(terms[n], terms[n - 1], ordered)
    C = ChainComplex(group, terms, diffs)
    C.validate()
    if doc.get("filtration", "skeletal") != "skeletal":
        raise ValueError("only the skeletal filtration is supported in JSON")
    filt = skeletal_filtration(C)
    pages = ss_pages(filt, args.rmax)
    class_labels = [c.label for c in group.subgroup_classes()]
    payload = {"group": group.name, "pages": []}
    lines = []
    for page in pages:
        page_doc = {"r": page.r, "entries": {}}
        lines.append(f"page E_{page.r}:")
        for (p, q), E in sorted(page.entries.items()):
            inv = {class_labels[c]: list(E.levels[c].invariant_factors)
                   for c in range(len(class_labels))}
            if any(v for v in inv.values()):
                page_doc["entries"][f"{p},{q}"] = inv
                desc = ", ".join(f"{lbl}: {E.levels[c].describe()}"
                                 for c, lbl in enumerate(class_labels))
                lines.append(f"  E^{{{p},{q}}}: {desc}")
        payload["pages"].append(page_doc)
    _emit(args, payload, lines)
    return 0


def cmd_bpq(args):
    group = _load_group_arg(args)
    try:
        result = bpq_verify(group)
    except ValueError as err:
        _emit(args, {"verified": False, "error": str(err)},
              [f"bpq: {_fail()}", f"  {err}"])
        return 1
    labels = [c.label for c in group.subgroup_classes()]
    iso = {labels[c]: [list(r) for r in result.iso.mats[c]]
           for c in range(len(labels))}
    payload = {"verified": True, "group": group.name, "iso": iso}
    lines = [f"bpq({group.name}): {_ok('verified')} — K0 of finite "
             f"{group.name}-sets is the Burnside Green functor"]
    for c, lbl in enumerate(labels):
        lines.append(f"  level {lbl}: iso matrix {iso[lbl]}")
    _emit(args, payload, lines)
    return 0


def cmd_duality_check(args):
    group = _load_group_arg(args)
    rows = []
    all_ok = True
    for cls in group.subgroup_classes():
        X = standard_orbit(group, cls.index)
        ok = triangle_composite(X) == identity_element(X)
        all_ok = all_ok and ok
        rows.append([f"G/{cls.label}", "ok" if ok else "FAIL"])
    payload = {"group": group.name, "verified": all_ok,
               "orbits": {r[0]: r[1] == "ok" for r in rows}}
    lines = [f"duality triangle identities for {group.name}:"]
    lines += _table(rows, headers=("orbit", "triangle"))
    lines.append(_ok("all orbits pass") if all_ok else _fail())
    _emit(args, payload, lines)
    return 0 if all_ok else 1


def cmd_promonoidal_check(args):
    group = _load_group_arg(args)
    feet = [_gset_arg(group, f) for f in (args.feet or ["e"])]
    target = _gset_arg(group, args.target) if args.target else point_gset(group)
    ok, detail = promonoidal_coend_check(feet, target)
    payload = {"group": group.name, "verified": ok, **detail}
    lines = [f"promonoidal coend condition over {group.name}: "
             f"{_ok() if ok else _fail()}"]
    for k, v in detail.items():
        lines.append(f"  {k}: {v}")
    _emit(args, payload, lines)
    return 0 if ok else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mackeykit",
        description="Exact Burnside-category, Mackey/Green-functor and "
                    "equivariant K0 computations for finite groups.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, group=False):
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="write output to a file")
        if group:
            p.add_argument("--group", required=True,
                           help=f"built-in name ({', '.join(BUILTIN_GROUP_NAMES)}), "
                                "JSON, or a file")

    p = sub.add_parser("group-info", help="order, subgroup classes, Weyl data")
    common(p, group=True)
    p.set_defaults(func=cmd_group_info)

    p = sub.add_parser("marks", help="table of marks")
    common(p, group=True)
    p.set_defaults(func=cmd_marks)

    p = sub.add_parser("burnside-ring", help="orbit-basis multiplication table")
    common(p, group=True)
    p.set_defaults(func=cmd_burnside_ring)

    p = sub.add_parser("hom-basis", help="span-code basis of A(X, Y)")
    common(p, group=True)
    p.add_argument("--source", required=True, help="orbit sum like 'e+C2' or JSON")
    p.add_argument("--target", required=True)
    p.set_defaults(func=cmd_hom_basis)

    p = sub.add_parser("compose", help="compose two Burnside elements")
    common(p)
    p.add_argument("first", help="element JSON file (applied first)")
    p.add_argument("second", help="element JSON file (applied second)")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("mackey-check", help="validate a Mackey functor file")
    common(p)
    p.add_argument("file")
    p.add_argument("--pairs", type=int, default=60,
                   help="random span pairs for the functoriality test")
    p.set_defaults(func=cmd_mackey_check)

    p = sub.add_parser("box", help="box product of two Mackey functor files")
    common(p)
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(func=cmd_box)

    p = sub.add_parser("green-check", help="validate a Green functor file")
    common(p)
    p.add_argument("file")
    p.set_defaults(func=cmd_green_check)

    p = sub.add_parser("tor", help="Tor over the Burnside Green functor")
    common(p)
    p.add_argument("ring", help='ring file: {"burnside": "<group>"}')
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--pmax", type=int, default=3)
    p.set_defaults(func=cmd_tor)

    p = sub.add_parser("ss", help="spectral sequence of a filtered complex")
    common(p)
    p.add_argument("file")
    p.add_argument("--rmax", type=int, default=4)
    p.set_defaults(func=cmd_ss)

    p = sub.add_parser("bpq", help="verify Barratt-Priddy-Quillen at K0")
    common(p, group=True)
    p.set_defaults(func=cmd_bpq)

    p = sub.add_parser("duality-check", help="triangle identities on orbits")
    common(p, group=True)
    p.set_defaults(func=cmd_duality_check)

    p = sub.add_parser("promonoidal-check",
                       help="decategorified promonoidal coend condition")
    common(p, group=True)
    p.add_argument("--feet", nargs="*", help="orbit sums, e.g. --feet e C2")
    p.add_argument("--target", help="orbit sum for the target (default: pt)")
    p.set_defaults(func=cmd_promonoidal_check)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
