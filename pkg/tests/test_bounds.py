import math
from fractions import Fraction

import pytest

from shimtril.bounds import (
    BoundParams,
    BoundsError,
    LRS_LAMBDA,
    SELBERG_LAMBDA,
    enumerate_candidates,
    genus_lower_bound,
    gonality_lower_bound,
    phi,
    psi,
    quotient_gonality_lower_bound,
)


def test_phi_psi_values():
    assert phi(6) == 2
    assert phi(1) == 1
    assert phi(2 * 3 * 5 * 7) == 48
    assert psi(1) == 1
    assert psi(12) == 24
    assert psi(11) == 12


def test_phi_rejects_non_squarefree():
    with pytest.raises(BoundsError):
        phi(12)


def test_multiplicativity():
    def fac(n):
        out = {}
        d = 2
        while d * d <= n:
            while n % d == 0:
                out[d] = out.get(d, 0) + 1
                n //= d
            d += 1
        if n > 1:
            out[n] = out.get(n, 0) + 1
        return out

    squarefree = [n for n in range(1, 400) if all(e == 1 for e in fac(n).values())]
    for a in squarefree[:40]:
        for b in squarefree[:40]:
            if math.gcd(a, b) == 1:
                assert phi(a * b) == phi(a) * phi(b)
    for a in range(1, 120):
        for b in range(1, 120):
            if math.gcd(a, b) == 1 and a * b <= 10_000:
                assert psi(a * b) == psi(a) * psi(b)


def test_genus_lower_bound_values():
    params = BoundParams()
    b = genus_lower_bound(6, 1, params)
    assert b == SELBERG_LAMBDA * Fraction(2, 24) - 1
    assert b < 0
    # monotone in the volume factor
    prev = None
    for N in (1, 2, 6, 30, 210):
        cur = genus_lower_bound(1, N, params)
        if prev is not None:
            assert cur >= prev
        prev = cur
    assert genus_lower_bound(1, 10_000) > 0


def test_gonality_lower_bound():
    params = BoundParams()
    assert gonality_lower_bound(33, params) == Fraction(3)
    assert gonality_lower_bound(1, params) == 1
    assert gonality_lower_bound(0, params) == 1


def test_lambda_validation():
    with pytest.raises(BoundsError):
        BoundParams(lam=Fraction(1, 2))
    BoundParams(lam=LRS_LAMBDA)


def test_enumerate_contains_good_pairs(source):
    # every (D, N) pair good in the classification tables must lie in the
    # candidate set at twice the subhyperelliptic gonality bound
    cs = enumerate_candidates(4, d_max=40, n_max=110)
    good_pairs = [(1, n) for n in range(1, 101)] + [
        (6, 5), (6, 37), (10, 23), (14, 5), (15, 4), (21, 2), (22, 5),
        (26, 3), (39, 2), (210, 1), (330, 1),
    ]
    for D, N in good_pairs:
        assert cs.contains(D, N), (D, N)
        cert = cs.certificate(D, N)
        assert cert.bound < 4


def test_enumerate_window_deterministic():
    a = enumerate_candidates(2, d_max=30, n_max=50)
    b = enumerate_candidates(2, d_max=30, n_max=50)
    assert a.pairs == b.pairs
    assert not a.truncated
    assert a.pairs  # nonempty
    # divisor-shrinking closure within the window
    in_window = set(a.pairs)
    for D, N in a.pairs:
        for d in range(1, N):
            if N % d == 0:
                assert (D, d) in in_window, (D, N, d)


def test_exclusion_certificates():
    cs = enumerate_candidates(Fraction(101, 100), d_max=20, n_max=20)
    # a pair with a huge volume factor is excluded, with its inequality
    big = quotient_gonality_lower_bound(2 * 3 * 5 * 7 * 11 * 13 * 17 * 19, 1)
    assert big > Fraction(101, 100)
    cert = cs.certificate(2 * 3 * 5 * 7 * 11 * 13 * 17 * 19, 1)
    assert ">=" in cert.inequality


def test_bounds_sound_against_true_genus(source):
    from shimtril.curves import CurveSpec, genus

    params = BoundParams()
    for N in range(1, 101):
        lower = genus_lower_bound(1, N, params)
        true = genus(CurveSpec(level=N), source).total
        assert lower <= true, (N, lower, true)
