"""Shared brute-force oracles used by the Mackey and acceptance tests."""

from mackeykit import intmat as im
from mackeykit.abgroups import FinPresAbGroup
from mackeykit.gsets import standard_orbit


def gmodule_hom_group(group, M, V, act):
    """G-module maps M(G/e) -> V as a presented group.

    Independent oracle for the Borel adjunction: solves the equivariance
    conditions directly, one slack block per vector congruence.
    """
    lvl = M.levels[0]
    n_src = lvl.generator_count
    n_tgt = V.generator_count
    weyl = M.weyl[0]
    total = n_src * n_tgt

    def entry(i, j):
        return i * n_src + j

    blocks = []   # each block: list of n_tgt rows ({var: coeff})
    rel_src = lvl.relation_lattice
    for r in range(rel_src.shape[1]):
        rows = []
        for i in range(n_tgt):
            rows.append({entry(i, j): int(rel_src[j, r])
                         for j in range(n_src) if rel_src[j, r]})
        blocks.append(rows)
    for g in group.elements():
        for j in range(n_src):
            rows = []
            for i in range(n_tgt):
                row = {}
                for k in range(n_src):
                    if weyl[g][k, j]:
                        row[entry(i, k)] = row.get(entry(i, k), 0) + \
                            int(weyl[g][k, j])
                for k in range(n_tgt):
                    if act[g][i, k]:
                        row[entry(k, j)] = row.get(entry(k, j), 0) - \
                            int(act[g][i, k])
                rows.append(row)
            blocks.append(rows)
    relV = V.relation_lattice
    nslack = relV.shape[1]
    big = im.zeros(len(blocks) * n_tgt, total + len(blocks) * nslack)
    for bix, rows in enumerate(blocks):
        for i, row in enumerate(rows):
            r = bix * n_tgt + i
            for var, cf in row.items():
                big[r, var] += cf
            for s in range(nslack):
                big[r, total + bix * nslack + s] = relV[i, s]
    ker = im.kernel(big)
    lat = im.hermite_normal_form(ker[:total, :])
    zero_cols = []
    for j in range(n_src):
        for r in range(nslack):
            v = im.zero_vec(total)
            for i in range(n_tgt):
                v[entry(i, j)] = relV[i, r]
            zero_cols.append(v)
    zl = im.from_cols(zero_cols, total)
    rels = im.preimage_lattice(lat, zl)
    return FinPresAbGroup(lat.shape[1], rels.T)


def brute_force_borel_level(group, V, act, H):
    """Limit over free orbits mapping to G/H: equivariant point families."""
    O = standard_orbit(group, group.class_index_of(H))
    n = V.generator_count
    npts = O.size
    rel = V.relation_lattice
    rows = []
    # family (v_p) with v_{u.q} = act(u) v_q for all u, q
    for q in range(npts):
        for u in group.elements():
            p = O.act(u, q)
            for i in range(n):
                row = [0] * (n * npts)
                row[p * n + i] += 1
                for j in range(n):
                    if act[u][i, j]:
                        row[q * n + j] -= int(act[u][i, j])
                rows.append(row)
    big = im.intmat(rows, n * npts)
    nrows = big.shape[0]
    slack = im.block_diag([rel] * nrows) if rel.shape[1] else \
        im.zeros(nrows, 0)
    stacked = im.hstack([big, -slack]) if slack.shape[1] else big
    ker = im.kernel(stacked)
    fam = im.hermite_normal_form(ker[:n * npts, :])
    relfull = im.block_diag([rel] * npts) if rel.shape[1] else \
        im.zeros(n * npts, 0)
    rels = im.preimage_lattice(fam, relfull)
    return FinPresAbGroup(fam.shape[1], rels.T)
