import itertools

import pytest

from shimtril.chars import RootOfUnity
from shimtril.reptheory import (
    CompactInductionData,
    DirichletLocal,
    Kind,
    MaximalCompact,
    TwistDescriptor,
    classify_from_newform_local,
)
from shimtril.trilinear import (
    Component,
    LocalTriple,
    Outcome,
    Side,
    central_product_trivial,
    epsilon_division,
    epsilon_split,
)

ONE = RootOfUnity.one()
NEG = RootOfUnity.minus_one()


def St(p, sign, anchor):
    rep = classify_from_newform_local(
        p, 1, DirichletLocal.trivial(p), RootOfUnity.from_sign(sign), True
    )
    return Component(rep, anchor=anchor)


def SC(p, cond, anchor, al=None, induction=None, row=None, self_twist=None):
    rep = classify_from_newform_local(
        p,
        cond,
        DirichletLocal.trivial(p),
        None,
        True,
        al_sign=al,
        induction=induction,
    )
    return Component(rep, anchor=anchor, row_hint=row, self_twist_at_minus_p=self_twist)


def PS(p, anchor):
    rep = classify_from_newform_local(
        p, 0, DirichletLocal.trivial(p), None, True
    )
    return Component(rep, anchor=anchor)


def T(p, *comps, side=Side.SPLIT):
    return LocalTriple(p, side, tuple(comps))


def test_central_product_trivial():
    t = T(11, St(11, 1, "a"), St(11, 1, "b"), St(11, -1, "c"))
    assert central_product_trivial(t)


def test_eight_case_steinberg_grid():
    # vanishing exactly when the product of the twist signs is +1
    for s1, s2, s3 in itertools.product((1, -1), repeat=3):
        t = T(11, St(11, s1, "a"), St(11, s2, "b"), St(11, s3, "c"))
        v = epsilon_split(t)
        want = Outcome.ZERO if s1 * s2 * s3 == 1 else Outcome.NONZERO
        assert v.outcome is want, (s1, s2, s3, v)
        assert v.criterion == "ep-2"


def test_principal_series_wins():
    v = epsilon_split(T(11, PS(11, "a"), St(11, 1, "b"), SC(11, 2, "c")))
    assert v.outcome is Outcome.NONZERO and v.criterion == "ep-1"


def test_two_steinbergs_plus_supercuspidal():
    v = epsilon_split(T(11, St(11, 1, "a"), St(11, -1, "b"), SC(11, 2, "c")))
    assert v.outcome is Outcome.NONZERO and v.criterion == "ep-2"


def test_conductor_separation():
    v = epsilon_split(T(2, SC(2, 2, "a"), SC(2, 2, "a"), SC(2, 3, "b", al=1)))
    assert v.outcome is Outcome.NONZERO and v.criterion == "ep-4"


def test_dual_pair_with_steinberg():
    v = epsilon_split(T(3, SC(3, 2, "x"), SC(3, 2, "x"), St(3, 1, "y")))
    assert v.outcome is Outcome.ZERO and v.criterion == "ep-3"
    # twisted Steinberg goes through the division tables, same answer
    v = epsilon_split(T(3, SC(3, 2, "x"), SC(3, 2, "x"), St(3, -1, "y")))
    assert v.outcome is Outcome.ZERO


def test_nondual_pair_with_steinberg():
    # two supercuspidals of different conductors cannot be dual
    a = SC(2, 2, "a")
    b = SC(2, 3, "b", al=1)
    v = epsilon_split(T(2, a, b, St(2, 1, "c")))
    # conductors 1, 2, 3 distinct: separation applies first
    assert v.outcome is Outcome.NONZERO


def test_same_conductor_triples_via_tables():
    # q = 2, conductor 2: the unique dihedral 2-dim, any triple combination
    v = epsilon_split(T(2, SC(2, 2, "a"), SC(2, 2, "a"), SC(2, 2, "a")))
    assert v.outcome is Outcome.ZERO and v.criterion == "dichotomy"
    # q = 7, conductor 2, same form cubed: division side vanishes
    v = epsilon_split(T(7, SC(7, 2, "a"), SC(7, 2, "a"), SC(7, 2, "a")))
    assert v.outcome is Outcome.NONZERO and v.criterion == "dichotomy"
    # q = 2, conductor 3 with new-vector signs: all patterns but (2,2,3)
    c24 = SC(2, 3, "x", al=-1)
    v = epsilon_split(T(2, c24, c24, c24))
    assert v.outcome is Outcome.ZERO
    v = epsilon_split(T(2, SC(2, 2, "a"), SC(2, 2, "a"), c24))
    assert v.outcome is Outcome.NONZERO  # the excluded shape


def test_scusp_sign_shortcut():
    ind = CompactInductionData(MaximalCompact.RAMIFIED, 2, -1, 2)
    c = SC(2, 5, "a", induction=ind)
    v = epsilon_split(T(2, c, c, c))
    assert v.outcome is Outcome.ZERO and v.criterion == "scusp"
    # without induction data the same pattern is undetermined
    c2 = SC(2, 5, "b")
    v = epsilon_split(T(2, c2, c2, c2))
    assert v.outcome is Outcome.UNDETERMINED


def test_induction_resolves_second_layer_row():
    ind = CompactInductionData(MaximalCompact.RAMIFIED, 2, -1, 1)
    c = SC(3, 3, "a", induction=ind)
    v = epsilon_split(T(3, c, c, c))
    assert v.outcome is Outcome.ZERO  # scusp shortcut fires first
    # the division side agrees through the table row resolved from the sign
    vd = epsilon_division(T(3, c, c, c, side=Side.DIVISION))
    assert vd.outcome is Outcome.NONZERO


def test_self_twist_pins_row():
    # at p = 7 the twist-stable 2-dim row is unique, so a self-twisted
    # conductor-2 supercuspidal is fully resolved: its cube has no
    # invariants on the division side
    c = SC(7, 2, "b", self_twist=-1)
    v = epsilon_division(T(7, c, c, c, side=Side.DIVISION))
    assert v.outcome is Outcome.ZERO
    # at p = 3, conductor 3, the stable rows still disagree on the diagonal
    c3 = SC(3, 3, "e", self_twist=-1)
    v3 = epsilon_division(T(3, c3, c3, c3, side=Side.DIVISION))
    assert v3.outcome is Outcome.UNDETERMINED
    # at p = 5, conductor 3, every row has a self-invariant: determinate
    c5 = SC(5, 3, "x")
    v5 = epsilon_division(T(5, c5, c5, c5, side=Side.DIVISION))
    assert v5.outcome is Outcome.NONZERO


def test_division_one_dimensionals():
    a = St(11, 1, "a")
    b = St(11, 1, "b")
    c = St(11, -1, "c")
    v = epsilon_division(T(11, a, b, c, side=Side.DIVISION))
    assert v.outcome is Outcome.ZERO
    v = epsilon_division(T(11, a, a, b, side=Side.DIVISION))
    assert v.outcome is Outcome.NONZERO


def test_division_w_w_one():
    # same 2-dim against an unramified character: invariants exist
    a = SC(3, 2, "x")
    one = St(3, 1, "u")
    v = epsilon_division(T(3, a, a, one, side=Side.DIVISION))
    assert v.outcome is Outcome.NONZERO


def test_permutation_invariance():
    comps = [SC(2, 2, "a"), SC(2, 3, "b", al=1), St(2, 1, "c")]
    outcomes = set()
    for perm in itertools.permutations(comps):
        v = epsilon_split(T(2, *perm))
        outcomes.add(v.outcome)
    assert len(outcomes) == 1


def test_dichotomy_consistency():
    # wherever both sides are determinate, exactly one is nonzero
    cases = [
        (T(2, SC(2, 2, "a"), SC(2, 2, "a"), SC(2, 2, "a")),),
        (T(7, SC(7, 2, "a"), SC(7, 2, "a"), SC(7, 2, "a")),),
        (T(3, SC(3, 2, "x"), SC(3, 2, "x"), St(3, 1, "y")),),
        (T(11, St(11, 1, "a"), St(11, 1, "b"), St(11, -1, "c")),),
    ]
    for (t,) in cases:
        vs = epsilon_split(t)
        vd = epsilon_division(
            LocalTriple(t.prime, Side.DIVISION, t.components)
        )
        if vs.determinate and vd.determinate:
            assert vs.is_nonzero != vd.is_nonzero, (t.prime, vs, vd)


def test_memo_is_consistent():
    memo = {}
    t = T(2, SC(2, 2, "a"), SC(2, 2, "a"), SC(2, 2, "a"))
    v1 = epsilon_split(t, memo=memo)
    v2 = epsilon_split(t, memo=memo)
    assert v1.outcome is v2.outcome
    assert memo


def test_monotone_determinism():
    # more optional data only resolves undetermined verdicts; it never
    # flips a determinate one
    base = SC(3, 3, "a")
    v0 = epsilon_division(T(3, base, base, base, side=Side.DIVISION))
    assert v0.outcome is Outcome.UNDETERMINED
    for row in ("I1", "I2", "I3", "I4"):
        c = SC(3, 3, "a", row=row)
        v1 = epsilon_division(T(3, c, c, c, side=Side.DIVISION))
        assert v1.determinate
    # a determinate table verdict agrees with and without a truthful hint
    plain = SC(3, 2, "x")
    hinted = SC(3, 2, "x", row="W1")
    one = St(3, 1, "u")
    a = epsilon_division(T(3, plain, plain, one, side=Side.DIVISION))
    b = epsilon_division(T(3, hinted, hinted, one, side=Side.DIVISION))
    assert a.determinate and a.outcome is b.outcome
