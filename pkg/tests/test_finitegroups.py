"""Character tables vs explicit matrix models.

The brute-force oracle builds every irreducible as explicit matrices over
an exact cyclotomic field, averages the triple tensor action, and compares
the invariant-subspace dimension with the character-sum computation.
"""

from fractions import Fraction

import pytest

from shimtril.cyclotomic import CycNum
from shimtril.finitegroups import (
    S4,
    CapabilityError,
    FiniteQuotientId,
    Group,
    build_table,
    cqext,
    dihedral,
    hom_triple_dim,
)

FIELD = 24


def _mat(rows):
    return tuple(tuple(x for x in r) for r in rows)


def _mat_mul(A, B, n=FIELD):
    out = []
    for i in range(len(A)):
        row = []
        for j in range(len(B[0])):
            acc = CycNum.zero(n)
            for k in range(len(B)):
                acc = acc + A[i][k] * B[k][j]
            row.append(acc)
        out.append(row)
    return _mat(out)


def _kron(A, B):
    out = []
    for i1 in range(len(A)):
        for i2 in range(len(B)):
            row = []
            for j1 in range(len(A[0])):
                for j2 in range(len(B[0])):
                    row.append(A[i1][j1] * B[i2][j2])
            out.append(row)
    return _mat(out)


def _one(v):
    return CycNum.rational(FIELD, v)


def _root(k, d):
    return CycNum.root(FIELD, (k * (FIELD // d)) % FIELD)


def dihedral_models(q):
    """Matrices for every irreducible of the dihedral group of order
    2(q+1), indexed like the table rows."""
    n = q + 1
    G = Group(dihedral(q))
    tbl = build_table(dihedral(q))
    models = {}
    for lab, dim in tbl.dims.items():
        if dim == 1:
            vals = {}
            for k, e in G.elements:
                if lab == "triv":
                    v = 1
                elif lab == "sgn":
                    v = (-1) ** e
                elif lab == "alt":
                    v = (-1) ** k
                else:
                    v = (-1) ** (k + e)
                vals[(k, e)] = _mat([[_one(v)]])
            models[lab] = vals
        else:
            j = int(lab[1:])
            vals = {}
            for k, e in G.elements:
                rot = _mat(
                    [
                        [_root(j * k, n), _one(0)],
                        [_one(0), _root(-j * k, n)],
                    ]
                )
                if e:
                    refl = _mat([[_one(0), _one(1)], [_one(1), _one(0)]])
                    rot = _mat_mul(rot, refl)
                vals[(k, e)] = rot
            models[lab] = vals
    return G, tbl, models


def s4_models():
    """Matrices for the second-layer q = 2 quotient (symmetric group on
    four letters), using its concrete realization."""
    G = Group(cqext(2))
    tbl = build_table(S4)
    # 1-dims from the table itself; higher dims built from the natural
    # 4-point action: the group acts on the four additive characters? we
    # instead use the faithful permutation action on the 4 elements of the
    # normal subgroup's character group union fixed structure. Simplest:
    # the group acts on the 4 cosets of a point stabilizer; locate an
    # index-4 subgroup by brute force.
    elements = G.elements
    import itertools

    # find a subgroup of order 6 (point stabilizer in the 4-point action)
    H = None
    for seed1, seed2 in itertools.combinations(elements, 2):
        grown = {G.identity, seed1, seed2}
        frontier = [seed1, seed2]
        while frontier and len(grown) <= 6:
            x = frontier.pop()
            for y in list(grown):
                for z in (G.mul(x, y), G.mul(y, x)):
                    if z not in grown:
                        grown.add(z)
                        frontier.append(z)
        if len(grown) == 6:
            H = grown
            break
    assert H is not None
    cosets = []
    seen = set()
    for g in elements:
        key = frozenset(G.mul(g, h) for h in H)
        if key not in seen:
            seen.add(key)
            cosets.append(key)
    assert len(cosets) == 4

    def perm_of(g):
        out = []
        for c in cosets:
            img = frozenset(G.mul(g, x) for x in c)
            out.append(cosets.index(img))
        return out

    # permutation matrices -> standard 3-dim on the sum-zero subspace with
    # basis e0-e1, e1-e2, e2-e3
    basis = [(0, 1), (1, 2), (2, 3)]

    def std_matrix(g):
        p = perm_of(g)
        # e_i -> e_{p...}: position j of the permutation matrix: e_j -> e_{inv}
        # work with images of basis vectors
        cols = []
        import numpy as np  # only used to assemble integer matrices

        M = [[0] * 4 for _ in range(4)]
        for j in range(4):
            M[p[j]][j] = 1
        # express images of (e_a - e_b) in the basis
        out = []
        for a, b in basis:
            img = [M[i][a] - M[i][b] for i in range(4)]
            # solve img = sum c_k (e_{basis[k][0]} - e_{basis[k][1]})
            # triangular: c_1 = img[0], c_2 = img[0]+img[1], c_3 = ...
            c1 = img[0]
            c2 = img[0] + img[1]
            c3 = img[0] + img[1] + img[2]
            out.append([c1, c2, c3])
        # transpose to columns
        return _mat(
            [[_one(out[j][i]) for j in range(3)] for i in range(3)]
        )

    def sgn_of(g):
        p = perm_of(g)
        s = 1
        for i in range(4):
            for j in range(i + 1, 4):
                if p[i] > p[j]:
                    s = -s
        return s

    models = {}
    models["triv"] = {g: _mat([[_one(1)]]) for g in elements}
    models["sgn"] = {g: _mat([[_one(sgn_of(g))]]) for g in elements}
    std = {g: std_matrix(g) for g in elements}
    stdsgn = {
        g: _mat(
            [[x * sgn_of(g) for x in row] for row in std[g]]
        )
        for g in elements
    }
    # assign the two 3-dimensionals to their table rows by matching the
    # trace on the class the table uses to separate them
    refl = ((0, 0), 0, 1)
    tr_std = CycNum.zero(FIELD)
    for k in range(3):
        tr_std = tr_std + std[refl][k][k]
    want_v3plus = build_table(S4)
    import shimtril.finitegroups as fg

    idx = want_v3plus.class_reps.index(refl)
    v3plus_trace = fg._embed(
        want_v3plus.rows["V3+"][idx], want_v3plus.field_n, FIELD
    )
    if tr_std == v3plus_trace:
        models["V3+"], models["V3-"] = std, stdsgn
    else:
        models["V3+"], models["V3-"] = stdsgn, std
    # 2-dim: pull back the two-dimensional of the order-6 quotient by the
    # Klein subgroup; realize via the quotient map computed from cosets of
    # the normal subgroup of order 4
    V4 = set()
    for g in elements:
        o = 1
        x = g
        while x != G.identity:
            x = G.mul(x, g)
            o += 1
        if o in (1, 2):
            V4.add(g)
    # normal order-4 subgroup = the additive part
    N4 = {g for g in elements if g[1] == 0 and g[2] == 0}
    qcosets = []
    qseen = set()
    for g in elements:
        key = frozenset(G.mul(g, h) for h in N4)
        if key not in qseen:
            qseen.add(key)
            qcosets.append(key)
    assert len(qcosets) == 6
    # the quotient is the symmetric group on 3 letters; build its 2-dim by
    # brute force: find generators r (order 3), s (order 2) of the quotient
    def qmul(c1, c2):
        x = next(iter(c1))
        y = next(iter(c2))
        z = G.mul(x, y)
        for c in qcosets:
            if z in c:
                return c
        raise RuntimeError

    ident = next(c for c in qcosets if G.identity in c)
    r = None
    s = None
    for c in qcosets:
        o = 1
        x = c
        while x != ident:
            x = qmul(x, c)
            o += 1
        if o == 3 and r is None:
            r = c
        if o == 2 and s is None:
            s = c
    rep2 = {
        ident: _mat([[_one(1), _one(0)], [_one(0), _one(1)]]),
    }
    rmat = _mat([[_root(1, 3), _one(0)], [_one(0), _root(-1, 3)]])
    smat = _mat([[_one(0), _one(1)], [_one(1), _one(0)]])
    # enumerate quotient elements as words in r, s
    words = {tuple(): ident}
    mats = {ident: rep2[ident]}
    frontier = [ident]
    while frontier:
        c = frontier.pop()
        for gen, gm in ((r, rmat), (s, smat)):
            nc = qmul(c, gen)
            if nc not in mats:
                mats[nc] = _mat_mul(mats[c], gm)
                frontier.append(nc)
    def coset_of(g):
        for c in qcosets:
            if g in c:
                return c
        raise RuntimeError
    models["std2"] = {g: mats[coset_of(g)] for g in elements}
    return G, tbl, models


def invariant_dim(G, models, r1, r2, r3):
    """Rank of the averaged triple-tensor action (exact)."""
    d1 = len(models[r1][G.identity])
    d2 = len(models[r2][G.identity])
    d3 = len(models[r3][G.identity])
    size = d1 * d2 * d3
    acc = [[CycNum.zero(FIELD) for _ in range(size)] for _ in range(size)]
    for g in G.elements:
        big = _kron(_kron(models[r1][g], models[r2][g]), models[r3][g])
        for i in range(size):
            for j in range(size):
                acc[i][j] = acc[i][j] + big[i][j]
    inv = Fraction(1, len(G.elements))
    proj = [[acc[i][j] * inv for j in range(size)] for i in range(size)]
    # exact rank by Gaussian elimination
    rank = 0
    rows = [list(r) for r in proj]
    cols = size
    r = 0
    for c in range(cols):
        piv = None
        for i in range(r, len(rows)):
            if not rows[i][c].is_zero:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pivval = rows[r][c]
        for i in range(len(rows)):
            if i != r and not rows[i][c].is_zero:
                # rows[i] -= rows[i][c]/piv * rows[r]
                factor = _cyc_div(rows[i][c], pivval)
                rows[i] = [
                    a - factor * b for a, b in zip(rows[i], rows[r])
                ]
        r += 1
        rank += 1
    return rank


def _cyc_div(a: CycNum, b: CycNum):
    """a / b for b in the implemented tables (b is rational or a root times
    rational in practice; invert by solving b * x = a by linear algebra)."""
    br = b.as_rational()
    if br is not None:
        return a * Fraction(1, br)
    # generic inverse via linear solve over the power basis
    d = len(b.coeffs)
    # build multiplication matrix of b
    cols = []
    for k in range(d):
        e = CycNum.zero(b.n)
        e.coeffs[k] = Fraction(1)
        cols.append((b * e).coeffs)
    # solve sum_k x_k col_k = a
    import itertools

    n = d
    A = [[cols[k][i] for k in range(n)] for i in range(n)]
    rhs = list(a.coeffs)
    # gaussian elimination over Q
    for c in range(n):
        piv = None
        for i in range(c, n):
            if A[i][c] != 0:
                piv = i
                break
        assert piv is not None
        A[c], A[piv] = A[piv], A[c]
        rhs[c], rhs[piv] = rhs[piv], rhs[c]
        pv = A[c][c]
        A[c] = [x / pv for x in A[c]]
        rhs[c] = rhs[c] / pv
        for i in range(n):
            if i != c and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
                rhs[i] = rhs[i] - f * rhs[c]
    out = CycNum.zero(b.n)
    out.coeffs = rhs
    return out


@pytest.mark.parametrize("q", [2, 3, 5, 7])
def test_dihedral_tables_match_matrix_models(q):
    G, tbl, models = dihedral_models(q)
    # character check
    for lab, vals in models.items():
        for i, rep in enumerate(tbl.class_reps):
            tr = CycNum.zero(FIELD)
            M = vals[rep]
            for k in range(len(M)):
                tr = tr + M[k][k]
            from shimtril.finitegroups import _embed

            assert tr == _embed(tbl.rows[lab][i], tbl.field_n, FIELD), (
                q,
                lab,
                rep,
            )
    labels = list(tbl.rows)
    for r1 in labels:
        for r2 in labels:
            for r3 in labels:
                expect = hom_triple_dim(tbl, r1, r2, r3)
                got = invariant_dim(G, models, r1, r2, r3)
                assert got == expect, (q, r1, r2, r3, got, expect)


def test_s4_table_matches_matrix_models():
    G, tbl, models = s4_models()
    from shimtril.finitegroups import _embed

    for lab, vals in models.items():
        for i, rep in enumerate(tbl.class_reps):
            tr = CycNum.zero(FIELD)
            M = vals[rep]
            for k in range(len(M)):
                tr = tr + M[k][k]
            assert tr == _embed(tbl.rows[lab][i], tbl.field_n, FIELD), (
                lab,
                rep,
            )
    labels = list(tbl.rows)
    for r1 in labels:
        for r2 in labels:
            for r3 in labels:
                expect = hom_triple_dim(tbl, r1, r2, r3)
                got = invariant_dim(G, models, r1, r2, r3)
                assert got == expect, (r1, r2, r3, got, expect)


def test_table_shapes():
    t = build_table(dihedral(3))
    assert sorted(t.dims.values()) == [1, 1, 1, 1, 2]
    assert t.order == 8
    t = build_table(S4)
    assert sorted(t.dims.values()) == [1, 1, 2, 3, 3]
    t = build_table(dihedral(2))
    assert sorted(t.dims.values()) == [1, 1, 2]
    t = build_table(cqext(3))
    assert t.order == 72
    assert sorted(t.dims.values()) == [1, 1, 1, 1, 2, 4, 4, 4, 4]


def test_orthogonality_and_duality():
    for gid in (dihedral(2), dihedral(3), dihedral(5), dihedral(7), S4, cqext(3)):
        tbl = build_table(gid)
        for lab in tbl.rows:
            dual = tbl.conjugate_row(lab)
            assert hom_triple_dim(tbl, lab, dual, "triv" if "triv" in tbl.rows else "D.triv") == 1
            for other in tbl.rows:
                if other != dual:
                    assert (
                        hom_triple_dim(
                            tbl,
                            lab,
                            tbl.conjugate_row(other),
                            "triv" if "triv" in tbl.rows else "D.triv",
                        )
                        == 0
                        or tbl.conjugate_row(other) == dual
                    )


def test_dn_verdict_lemmas():
    # the dihedral lemmas as stated: same 2-dim against an unramified sign
    for q in (2, 3, 5, 7):
        tbl = build_table(dihedral(q))
        for W in tbl.rows_of_dim(2):
            assert hom_triple_dim(tbl, W, W, "triv") >= 1
            assert hom_triple_dim(tbl, W, W, "sgn") >= 1
            for W2 in tbl.rows_of_dim(2):
                if W2 != W:
                    assert hom_triple_dim(tbl, W, W2, "triv") == 0
    # q in {3, 7}: triple self-product of a 2-dim has no invariants
    for q in (3, 7):
        tbl = build_table(dihedral(q))
        for W in tbl.rows_of_dim(2):
            assert hom_triple_dim(tbl, W, W, W) == 0
    # q = 2 second layer: dims in {2, 3} with pattern != (2, 2, 3)
    tbl = build_table(S4)
    for a in ("std2", "V3+", "V3-"):
        for b in ("std2", "V3+", "V3-"):
            for c in ("std2", "V3+", "V3-"):
                dims = sorted(
                    (tbl.dims[a], tbl.dims[b], tbl.dims[c])
                )
                h = hom_triple_dim(tbl, a, b, c)
                if dims == [2, 2, 3]:
                    assert h == 0
                else:
                    assert h >= 1, (a, b, c)


def test_capability_errors():
    with pytest.raises(CapabilityError):
        FiniteQuotientId("cqext", 7)
    with pytest.raises(CapabilityError):
        FiniteQuotientId("s4", 3)
    with pytest.raises(CapabilityError):
        FiniteQuotientId("weird", 2)


def test_dn_trilinear_verdict_surface():
    from shimtril.finitegroups import DnPattern, dn_trilinear_verdict

    W = DnPattern(dim=2, anchor="w")
    triv = DnPattern(dim=1, ram=False, uniformizer_sign=1)
    # same 2-dim twice against an unramified character: invariants exist
    assert dn_trilinear_verdict(3, (W, W, triv)) == "nonzero"
    # the triple self-product of a 2-dim vanishes at residue sizes 3 and 7
    for q in (3, 7):
        Wq = DnPattern(dim=2, anchor="w")
        assert dn_trilinear_verdict(q, (Wq, Wq, Wq)) == "zero"
    # residue size 2, dims (3,3,3): always nonzero whatever the rows
    V = DnPattern(dim=3)
    assert dn_trilinear_verdict(2, (V, V, V)) == "nonzero"
    # the excluded (2,2,3) shape: always zero
    U = DnPattern(dim=2)
    assert dn_trilinear_verdict(2, (U, U, V)) == "zero"
    # distinct unknown 2-dims at residue size 5: row-dependent
    A = DnPattern(dim=2, anchor="a")
    B = DnPattern(dim=2, anchor="b")
    assert dn_trilinear_verdict(5, (A, A, B)) == "undetermined"
    # three one-dimensionals: plain character arithmetic
    minus = DnPattern(dim=1, ram=False, uniformizer_sign=-1)
    assert dn_trilinear_verdict(3, (minus, minus, triv)) == "nonzero"
    assert dn_trilinear_verdict(3, (minus, triv, triv)) == "zero"
