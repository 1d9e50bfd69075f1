"""Effective finiteness calculator over Q: the multiplicative volume
factors, the spectral genus lower bound, the gonality lower bound, and the
enumeration of (discriminant, level) pairs whose total Atkin-Lehner
quotient could have small gonality.

All arithmetic is exact rational; every bound is certified on its
conservative side. Over Q the zeta-value and the power of pi in the genus
bound cancel to the rational constant 1/24, so no pi approximation enters
any comparison (the committed interval for pi is retained for reference).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional

from .chars import factorize

# 50-decimal-digit rational bracket of pi (reference constants; the
# comparisons over Q never consult them because the zeta factor cancels)
PI_LOWER = Fraction(
    31415926535897932384626433832795028841971693993751,
    10**49,
)
PI_UPPER = Fraction(
    31415926535897932384626433832795028841971693993752,
    10**49,
)

SELBERG_LAMBDA = Fraction(3, 16)
# spectral gap 975/4096 = 1/4 - (7/64)^2 from the sharpest known bound
# toward the eigenvalue conjecture
LRS_LAMBDA = Fraction(975, 4096)


class BoundsError(ValueError):
    pass


@dataclass(frozen=True)
class BoundParams:
    lam: Fraction = SELBERG_LAMBDA
    field_degree: int = 1
    disc_f: int = 1
    # exact rational value of zeta(2)/(2 pi)^2 over Q
    zeta2_over_two_pi_sq: Fraction = Fraction(1, 24)

    def __post_init__(self):
        if not (0 < self.lam <= Fraction(1, 4)):
            raise BoundsError("the spectral constant lies in (0, 1/4]")
        if self.field_degree != 1 or self.disc_f != 1:
            raise BoundsError("only the rational field is supported")

    @property
    def c1(self) -> Fraction:
        """Gonality-versus-genus constant."""
        return self.lam / 2

    @property
    def c2(self) -> Fraction:
        """Genus-versus-volume constant."""
        return self.lam * self.zeta2_over_two_pi_sq


def phi(D: int) -> int:
    """Product of (p - 1) over the primes dividing the squarefree D."""
    fac = factorize(D)
    if any(e > 1 for e in fac.values()):
        raise BoundsError("the discriminant must be squarefree")
    out = 1
    for p in fac:
        out *= p - 1
    return out


def psi(N: int) -> Fraction:
    """N times the product of (1 + 1/p) over primes dividing N."""
    if N < 1:
        raise BoundsError("the level must be positive")
    out = Fraction(N)
    for p in factorize(N):
        out *= Fraction(p + 1, p)
    return out


def genus_lower_bound(D: int, N: int, params: BoundParams = BoundParams()) -> Fraction:
    """Certified rational lower bound for the genus of the norm-one curve:
    lambda * (1/24) * Phi(D) * Psi(N) - 1 over Q."""
    if math.gcd(D, N) != 1:
        raise BoundsError("discriminant and level must be coprime")
    return params.c2 * phi(D) * psi(N) - 1


def gonality_lower_bound(g, params: BoundParams = BoundParams()) -> Fraction:
    """lambda/2 * (g - 1), clamped below at 1 for a nonempty curve."""
    val = params.c1 * (Fraction(g) - 1)
    return max(val, Fraction(1))


def quotient_gonality_lower_bound(
    D: int, N: int, params: BoundParams = BoundParams()
) -> Fraction:
    """Certified lower bound for the gonality of the total Atkin-Lehner
    quotient: c1 (c2 Phi Psi - 2) / 2^(#division primes + #level primes),
    clamped below at 1."""
    s = len(factorize(D)) + len(factorize(N))
    raw = params.c1 * (params.c2 * phi(D) * psi(N) - 2) / 2**s
    return max(raw, Fraction(1))


@dataclass(frozen=True)
class ExclusionCertificate:
    D: int
    N: int
    bound: Fraction
    inequality: str


@dataclass
class CandidateSet:
    max_gonality: Fraction
    params: BoundParams
    support_bound: int  # max number of primes in D resp. N
    prime_bound: int  # max prime allowed in D
    psi_bound: Fraction  # max Psi(N) * Phi(D)
    pairs: list[tuple[int, int]] = field(default_factory=list)
    truncated: bool = False
    sample_exclusions: list[ExclusionCertificate] = field(default_factory=list)

    def contains(self, D: int, N: int) -> bool:
        return quotient_gonality_lower_bound(D, N, self.params) < self.max_gonality

    def certificate(self, D: int, N: int) -> ExclusionCertificate:
        b = quotient_gonality_lower_bound(D, N, self.params)
        rel = "<" if b < self.max_gonality else ">="
        ineq = (
            f"c1(c2*Phi*Psi-2)/2^s = {b} {rel} {self.max_gonality}"
        )
        return ExclusionCertificate(D, N, b, ineq)


def _box_bounds(max_gn: Fraction, params: BoundParams):
    """Effective ranges for the support sizes and the volume factor, from
    the two-power-corrected inequalities: Phi/2^|S_D| >= 2^(|S_D| - 3) and
    Psi/2^|S_N| >= (3/2)^|S_N|."""
    # c1 * (c2 * PhiPsi - 2)/2^s < M  and PhiPsi/2^s >= 2^(sD-3)(3/2)^sN
    # force  c2 * 2^(sD-3) (3/2)^sN < M/c1 + 2
    rhs = max_gn / params.c1 + 2
    s_d = 0
    while params.c2 * Fraction(2) ** (s_d - 3 + 1) < rhs:
        s_d += 1
        if s_d > 64:
            break
    s_n = 0
    while params.c2 * Fraction(3, 2) ** (s_n + 1) / 8 < rhs:
        s_n += 1
        if s_n > 64:
            break
    support = max(s_d, s_n)
    # PhiPsi < (M/c1 * 2^s + 2)/c2 with s <= 2*support
    vol = (max_gn / params.c1 * Fraction(2) ** (2 * support) + 2) / params.c2
    # a single prime p in D contributes p - 1 <= vol
    prime_bound = int(vol) + 1
    return support, prime_bound, vol


def enumerate_candidates(
    max_gonality,
    params: BoundParams = BoundParams(),
    d_max: Optional[int] = None,
    n_max: Optional[int] = None,
    limit: int = 250_000,
) -> CandidateSet:
    """All (D, N) pairs whose quotient-gonality lower bound stays below the
    threshold, materialized within the (d_max, n_max) window (the full
    region is finite but far too large to list at the default spectral
    constant; membership outside the window goes through `contains`)."""
    max_gn = Fraction(max_gonality)
    if max_gn < 1:
        raise BoundsError("the gonality threshold is at least 1")
    support, prime_bound, vol = _box_bounds(max_gn, params)
    out = CandidateSet(
        max_gonality=max_gn,
        params=params,
        support_bound=support,
        prime_bound=prime_bound,
        psi_bound=vol,
    )
    d_cap = d_max if d_max is not None else min(prime_bound, 400)
    n_cap = n_max if n_max is not None else 400
    pairs = []
    exclusions = []
    for D in range(1, d_cap + 1):
        fac = factorize(D)
        if any(e > 1 for e in fac.values()):
            continue
        for N in range(1, n_cap + 1):
            if math.gcd(D, N) != 1:
                continue
            b = quotient_gonality_lower_bound(D, N, params)
            if b < max_gn:
                pairs.append((D, N))
                if len(pairs) > limit:
                    out.truncated = True
                    break
            elif len(exclusions) < 10:
                exclusions.append(out.certificate(D, N))
        if out.truncated:
            break
    out.pairs = pairs
    out.sample_exclusions = exclusions
    return out
