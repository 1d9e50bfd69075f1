"""Part 3 of the fixture generator: exact dimension formulas used as
independent oracles (Cohen-Oesterle for S_2(N, chi), genus of X_1(N)),
plus the character-orbit letter assignment."""

from __future__ import annotations

import math
from fractions import Fraction

from msym import DirichletChar, all_even_chars, divisors, factorize, euler_phi, unit_group_gens


def dim_s2_chi(N: int, chi: DirichletChar) -> int:
    """Cohen-Oesterle dimension of S_2(Gamma0(N), chi), chi even mod N."""
    assert chi.is_even()
    cond = chi.conductor
    assert N % cond == 0
    psi = N
    for p in factorize(N):
        psi += psi // p
    total = Fraction(psi, 12)
    lam = 1
    for p, r in factorize(N).items():
        s = factorize(cond).get(p, 0)
        if 2 * s <= r:
            lam *= (p ** (r // 2) + p ** (r // 2 - 1)) if r % 2 == 0 else 2 * p ** ((r - 1) // 2)
        else:
            lam *= 2 * p ** (r - s)
    total -= Fraction(lam, 2)
    # elliptic terms: sums of chi over square roots of -1 and primitive
    # cube roots of unity mod N; the values land in mu_4 resp. mu_3.
    s4 = Fraction(0)
    for xx in range(N if N > 1 else 2):
        if N > 1 and (xx * xx + 1) % N == 0:
            e = chi.value_exponent(xx)
            o = chi.order
            t = (4 * e // o) % 4 if o else 0
            assert (4 * e) % o == 0 if o else True
            s4 += (1, 0, -1, 0)[t]
    s3 = Fraction(0)
    for xx in range(N if N > 1 else 2):
        if N > 1 and (xx * xx + xx + 1) % N == 0:
            e = chi.value_exponent(xx)
            o = chi.order
            assert (3 * e) % o == 0
            t = (3 * e // o) % 3
            s3 += Fraction(1) if t == 0 else Fraction(-1, 2)
    if N == 1:
        s4 = Fraction(1)
        s3 = Fraction(1)
    total += Fraction(-1, 4) * s4 + Fraction(-1, 3) * s3
    if chi.order == 1:
        total += 1
    assert total.denominator == 1, (N, chi, total)
    return int(total)


def genus_X1(N: int) -> int:
    if N <= 4:
        return 0
    mu = N * N
    for p in factorize(N):
        mu = mu // (p * p) * (p * p - 1)
    mu //= 2
    nuinf = sum(euler_phi(d) * euler_phi(N // d) for d in divisors(N)) // 2
    g12 = 12 + mu - 6 * nuinf
    assert g12 % 12 == 0, N
    return g12 // 12


def char_orbits_all(M: int):
    """All Galois orbits of Dirichlet characters mod M (even and odd),
    as (representative, orbit_size, order, trace_vector)."""
    from itertools import product as iproduct

    gens = unit_group_gens(M)
    seen = set()
    orbits = []
    for combo in iproduct(*[range(n) for (_, n) in gens]):
        chi = DirichletChar(M, tuple(combo))
        if chi.exponents in seen:
            continue
        orbit = []
        o = chi.order
        for k in range(1, o + 1):
            if math.gcd(k, o) == 1:
                orbit.append(chi.power(k).exponents)
        for e in orbit:
            seen.add(e)
        rep = DirichletChar(M, min(orbit))
        # integer trace vector of chi(n) summed over the orbit
        tr = []
        for nn in range(1, min(M, 30) + 1):
            e = rep.value_exponent(nn)
            if e is None:
                tr.append(None)
                continue
            # sum over k coprime to o of zeta_o^{k e} = ramanujan-type sum
            s = 0
            for k in range(1, o + 1):
                if math.gcd(k, o) == 1:
                    # rational only in aggregate; use ramanujan sum c_o(e)
                    pass
            s = _ramanujan(o, e)
            tr.append(s)
        orbits.append((rep, len(orbit), o, tr))
    orbits.sort(key=lambda t: (t[2], [x if x is not None else 10**9 for x in t[3]]))
    return orbits


def _ramanujan(o: int, e: int) -> int:
    """Ramanujan sum c_o(e) = sum over k coprime to o of zeta_o^{k e}."""
    g = math.gcd(o, e)
    m = o // g
    # c_o(e) = mu(m) * phi(o) / phi(m)
    mu = 1
    for _, ee in factorize(m).items():
        if ee > 1:
            return 0
        mu = -mu
    return mu * euler_phi(o) // euler_phi(m)


def char_orbit_letter(M: int, chi: DirichletChar) -> str:
    orbits = char_orbits_all(M)
    target = set()
    o = chi.order
    for k in range(1, o + 1):
        if math.gcd(k, o) == 1:
            target.add(chi.power(k).exponents)
    for i, (rep, _, _, _) in enumerate(orbits):
        if rep.exponents in target:
            s = ""
            i += 1
            while i > 0:
                i, r = divmod(i - 1, 26)
                s = chr(ord("a") + r) + s
            return s
    raise ValueError((M, chi))
