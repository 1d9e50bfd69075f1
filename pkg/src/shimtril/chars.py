"""Exact Dirichlet characters and root-of-unity tokens.

Characters are stored by their exponents on a canonical generating set of
(Z/M)^*, so products, conjugates and conductors are exact integer
arithmetic; no floating point anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache


def xgcd(a: int, b: int):
    old_r, r, old_s, s, old_t, t = a, b, 1, 0, 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def inv_mod(a: int, m: int) -> int:
    g, s, _ = xgcd(a % m, m)
    if g != 1:
        raise ZeroDivisionError(f"{a} not invertible mod {m}")
    return s % m


def factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n: int) -> list[int]:
    out = [1]
    for p, e in factorize(n).items():
        out = [d * p**k for d in out for k in range(e + 1)]
    return sorted(out)


def euler_phi(n: int) -> int:
    out = n
    for p in factorize(n):
        out = out // p * (p - 1)
    return out


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n) for n > 0."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    res = 1
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            res = -res
    if a < 0:
        a = -a
        if n % 4 == 3:
            res = -res
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                res = -res
        if a % 4 == 3 and n % 4 == 3:
            res = -res
        a, n = n % a, a
    return res if n == 1 else 0


def _crt_pair(a1: int, m1: int, a2: int, m2: int) -> int:
    g, s, t = xgcd(m1, m2)
    assert g == 1
    return (a2 * s * m1 + a1 * t * m2) % (m1 * m2)


@lru_cache(maxsize=None)
def _primitive_root(q: int) -> int:
    phi = euler_phi(q)
    fac = factorize(phi)
    for g in range(2, q):
        if math.gcd(g, q) != 1:
            continue
        if all(pow(g, phi // p, q) != 1 for p in fac):
            return g
    raise ValueError(q)


@lru_cache(maxsize=None)
def unit_group_gens(M: int) -> tuple[tuple[int, int], ...]:
    """Canonical generators (g, order) of (Z/M)^*, CRT over prime powers."""
    gens: list[tuple[int, int]] = []
    for p, e in sorted(factorize(M).items()):
        q = p**e
        rest = M // q
        if p == 2:
            if e == 1:
                continue
            loc = [(q - 1, 2)] if e == 2 else [(q - 1, 2), (5, 2 ** (e - 2))]
        else:
            loc = [(_primitive_root(q), euler_phi(q))]
        for g, order in loc:
            x = g % q if rest == 1 else _crt_pair(g % q, q, 1, rest)
            gens.append((x % M, order))
    return tuple(gens)


@lru_cache(maxsize=None)
def _unit_log_table(M: int) -> dict[int, tuple[int, ...]]:
    from itertools import product as iproduct

    gens = unit_group_gens(M)
    table: dict[int, tuple[int, ...]] = {}
    for combo in iproduct(*[range(n) for (_, n) in gens]):
        v = 1
        for (g, _), k in zip(gens, combo):
            v = v * pow(g, k, M) % M
        table.setdefault(v, combo)
    return table


@dataclass(frozen=True)
class DirichletChar:
    """Dirichlet character mod M, exponents on the canonical generators."""

    modulus: int
    exponents: tuple[int, ...]

    def __post_init__(self):
        gens = unit_group_gens(self.modulus)
        if len(self.exponents) != len(gens):
            raise ValueError("exponent tuple does not match the unit group")

    @staticmethod
    def trivial(M: int) -> "DirichletChar":
        return DirichletChar(M, tuple(0 for _ in unit_group_gens(M)))

    @property
    def order(self) -> int:
        o = 1
        for (_, n), e in zip(unit_group_gens(self.modulus), self.exponents):
            oe = n // math.gcd(n, e)
            o = o * oe // math.gcd(o, oe)
        return o

    def value_exponent(self, a: int) -> int | None:
        """chi(a) = zeta_order^k for the returned k; None if a non-unit."""
        M = self.modulus
        if M == 1:
            return 0
        a %= M
        if math.gcd(a, M) != 1:
            return None
        combo = _unit_log_table(M)[a]
        ordv = self.order
        k = 0
        for (_, n), e, c in zip(unit_group_gens(M), self.exponents, combo):
            k = (k + e * c * ordv // n) % ordv
        return k

    def value(self, a: int) -> "RootOfUnity | None":
        k = self.value_exponent(a)
        if k is None:
            return None
        return RootOfUnity(k, self.order)

    def is_even(self) -> bool:
        return self.value_exponent(-1) == 0

    def is_trivial(self) -> bool:
        return self.order == 1

    @property
    def conductor(self) -> int:
        M = self.modulus
        for d in divisors(M):
            if all(
                self.value_exponent(a) == 0
                for a in range(1, M + 1)
                if math.gcd(a, M) == 1 and a % d == 1 % d
            ):
                return d
        return M

    def conductor_exponent(self, p: int) -> int:
        return factorize(self.conductor).get(p, 0)

    def power(self, k: int) -> "DirichletChar":
        gens = unit_group_gens(self.modulus)
        return DirichletChar(
            self.modulus,
            tuple((e * k) % n for (_, n), e in zip(gens, self.exponents)),
        )

    def conjugate(self) -> "DirichletChar":
        return self.power(-1)

    def lift(self, M2: int) -> "DirichletChar":
        """The character mod M2 induced by self (modulus | M2)."""
        if M2 % self.modulus != 0:
            raise ValueError("can only lift to a multiple modulus")
        gens2 = unit_group_gens(M2)
        exps = []
        ordv = self.order
        for g2, n2 in gens2:
            # g2 is a unit mod M2, hence mod the (dividing) modulus
            k = self.value_exponent(g2)
            assert k is not None and (k * n2) % ordv == 0
            exps.append(k * n2 // ordv % n2)
        return DirichletChar(M2, tuple(exps))

    def times(self, other: "DirichletChar") -> "DirichletChar":
        """Product character, on the lcm modulus."""
        M = math.lcm(self.modulus, other.modulus)
        a, b = self.lift(M), other.lift(M)
        gens = unit_group_gens(M)
        return DirichletChar(
            M,
            tuple(
                (x + y) % n
                for (_, n), x, y in zip(gens, a.exponents, b.exponents)
            ),
        )


@dataclass(frozen=True)
class RootOfUnity:
    """Exact root of unity e^(2 pi i num/den), normalized."""

    num: int
    den: int

    def __post_init__(self):
        if self.den <= 0:
            raise ValueError("denominator must be positive")
        g = math.gcd(self.num % self.den, self.den) or 1
        object.__setattr__(self, "num", (self.num % self.den) // g)
        object.__setattr__(self, "den", self.den // g)

    @staticmethod
    def one() -> "RootOfUnity":
        return RootOfUnity(0, 1)

    @staticmethod
    def minus_one() -> "RootOfUnity":
        return RootOfUnity(1, 2)

    @staticmethod
    def from_sign(s: int) -> "RootOfUnity":
        if s == 1:
            return RootOfUnity.one()
        if s == -1:
            return RootOfUnity.minus_one()
        raise ValueError(s)

    def __mul__(self, other: "RootOfUnity") -> "RootOfUnity":
        den = math.lcm(self.den, other.den)
        return RootOfUnity(
            self.num * (den // self.den) + other.num * (den // other.den), den
        )

    def inverse(self) -> "RootOfUnity":
        return RootOfUnity(-self.num, self.den)

    def conjugate(self) -> "RootOfUnity":
        return self.inverse()

    @property
    def is_one(self) -> bool:
        return self.num == 0

    @property
    def order(self) -> int:
        return self.den

    def as_sign(self) -> int | None:
        if self.num == 0:
            return 1
        if (self.num, self.den) == (1, 2):
            return -1
        return None

    def __repr__(self):
        if self.num == 0:
            return "1"
        if (self.num, self.den) == (1, 2):
            return "-1"
        return f"zeta({self.num}/{self.den})"
