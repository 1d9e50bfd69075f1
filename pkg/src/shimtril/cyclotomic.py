"""Exact arithmetic in cyclotomic fields Q(zeta_n), n small.

Elements are vectors of Fractions over the power basis 1, z, ..., z^(d-1)
with d = deg Phi_n; products are reduced modulo the n-th cyclotomic
polynomial. Enough for character tables of groups of exponent <= 24.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Coefficients (low-first) of Phi_n, computed by exact division of
    x^n - 1 by the product of Phi_d over proper divisors d."""
    num = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            num = _polydiv_exact(num, list(cyclotomic_poly(d)))
    return tuple(num)


def _polydiv_exact(num: list[int], den: list[int]) -> list[int]:
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1]
        assert c % den[-1] == 0
        q = c // den[-1]
        out[i] = q
        for j, dc in enumerate(den):
            num[i + j] -= q * dc
    assert all(c == 0 for c in num), "non-exact polynomial division"
    return out


class CycNum:
    """Element of Q(zeta_n)."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs=None):
        self.n = n
        d = len(cyclotomic_poly(n)) - 1
        if coeffs is None:
            coeffs = [Fraction(0)] * d
        self.coeffs = list(coeffs) + [Fraction(0)] * (d - len(coeffs))

    @staticmethod
    def zero(n: int) -> "CycNum":
        return CycNum(n)

    @staticmethod
    def rational(n: int, r) -> "CycNum":
        c = CycNum(n)
        c.coeffs[0] = Fraction(r)
        return c

    @staticmethod
    def root(n: int, k: int) -> "CycNum":
        """zeta_n^k."""
        out = CycNum(n)
        _add_power(out, k % n, Fraction(1))
        return out

    def copy(self) -> "CycNum":
        c = CycNum(self.n)
        c.coeffs = list(self.coeffs)
        return c

    def __add__(self, other: "CycNum") -> "CycNum":
        assert self.n == other.n
        c = CycNum(self.n)
        c.coeffs = [a + b for a, b in zip(self.coeffs, other.coeffs)]
        return c

    def __sub__(self, other: "CycNum") -> "CycNum":
        assert self.n == other.n
        c = CycNum(self.n)
        c.coeffs = [a - b for a, b in zip(self.coeffs, other.coeffs)]
        return c

    def __mul__(self, other) -> "CycNum":
        if isinstance(other, (int, Fraction)):
            c = CycNum(self.n)
            c.coeffs = [a * other for a in self.coeffs]
            return c
        assert self.n == other.n
        d = len(self.coeffs)
        prod = [Fraction(0)] * (2 * d - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        prod[i + j] += a * b
        return _reduce(self.n, prod)

    __rmul__ = __mul__

    def __neg__(self) -> "CycNum":
        c = CycNum(self.n)
        c.coeffs = [-a for a in self.coeffs]
        return c

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = CycNum.rational(self.n, other)
        return self.n == other.n and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.n, tuple(self.coeffs)))

    def conjugate(self) -> "CycNum":
        """Complex conjugation zeta -> zeta^(-1)."""
        return self.galois(-1)

    def galois(self, k: int) -> "CycNum":
        """The automorphism zeta -> zeta^k (k coprime to n)."""
        out = CycNum(self.n)
        # coefficients live on powers 0..d-1 of zeta; map each power
        tmp = [Fraction(0)] * self.n
        for i, a in enumerate(self.coeffs):
            if a:
                tmp[(i * k) % self.n] += a
        return _reduce(self.n, tmp)

    @property
    def is_zero(self) -> bool:
        return all(a == 0 for a in self.coeffs)

    def as_rational(self):
        """The element as a Fraction if it is rational, else None."""
        if all(a == 0 for a in self.coeffs[1:]):
            return self.coeffs[0]
        return None

    def __repr__(self):
        r = self.as_rational()
        if r is not None:
            return str(r)
        return f"Cyc{self.n}{self.coeffs}"


def _add_power(c: CycNum, k: int, coef: Fraction):
    d = len(c.coeffs)
    if k < d:
        c.coeffs[k] += coef
        return
    tmp = [Fraction(0)] * (k + 1)
    tmp[k] = coef
    red = _reduce(c.n, tmp)
    c.coeffs = [a + b for a, b in zip(c.coeffs, red.coeffs)]


def _reduce(n: int, poly: list[Fraction]) -> CycNum:
    phi = list(cyclotomic_poly(n))
    d = len(phi) - 1
    poly = list(poly)
    for i in range(len(poly) - 1, d - 1, -1):
        c = poly[i]
        if c:
            # x^i = x^(i-d) * (x^d) and x^d = -(phi - x^d)/lead (monic)
            for j in range(d):
                poly[i - d + j] -= c * phi[j]
            poly[i] = Fraction(0)
    out = CycNum(n)
    out.coeffs = [Fraction(x) for x in poly[:d]]
    return out
