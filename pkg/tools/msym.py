"""Weight-2 modular symbols over F_p for Gamma0(N) with optional nebentypus.

Fixture-generation backend: computes cuspidal/new subspaces, Hecke and
Atkin-Lehner actions, and Galois-orbit decompositions of weight-2 newforms.
Combinatorial symbol tables are built once per level over Z (with character
values kept as root-of-unity exponents); linear algebra runs modulo several
word-size primes with numpy, and exact integer characteristic polynomials are
recovered by CRT and factored with sympy.

Not part of the shipped package; used only by gen_newform_fixtures.py.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


# ---------------------------------------------------------------------------
# elementary number theory


def xgcd(a: int, b: int):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
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


def genus_X0(N: int) -> int:
    """Classical genus of X_0(N) (independent oracle)."""
    fac = factorize(N)
    mu = N
    for p in fac:
        mu = mu // p * (p + 1)
    if N % 4 == 0:
        nu2 = 0
    else:
        nu2 = 1
        for p in fac:
            nu2 *= 1 + kronecker(-4, p) if p != 2 else 1
    if N % 9 == 0:
        nu3 = 0
    else:
        nu3 = 1
        for p in fac:
            nu3 *= 1 + kronecker(-3, p) if p != 3 else 1
    nuinf = sum(euler_phi(math.gcd(d, N // d)) for d in divisors(N))
    g12 = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * nuinf
    assert g12 % 12 == 0, (N, mu, nu2, nu3, nuinf)
    return g12 // 12


def dim_s2_new(N: int) -> int:
    def beta(m: int) -> int:
        out = 1
        for _, e in factorize(m).items():
            if e == 1:
                out *= -2
            elif e == 2:
                out *= 1
            else:
                return 0
        return out

    return sum(beta(N // d) * genus_X0(d) for d in divisors(N))


def genus_shimura_X0(D: int, N: int) -> int:
    """Genus of Xage_0^D(N): discriminant-D quaternion algebra over Q,
    Eichler level N (D squarefree > 1, gcd(D, N) = 1)."""
    fac_d, fac_n = factorize(D), factorize(N)
    phi_psi = 1
    for p in fac_d:
        phi_psi *= p - 1
    for p, e in fac_n.items():
        phi_psi *= p ** (e - 1) * (p + 1)
    if N % 4 == 0:
        e2 = 0
    else:
        e2 = 1
        for p in fac_d:
            e2 *= 1 - kronecker(-4, p) if p != 2 else 1
        for p in fac_n:
            e2 *= 1 + kronecker(-4, p) if p != 2 else 1
    if N % 9 == 0:
        e3 = 0
    else:
        e3 = 1
        for p in fac_d:
            e3 *= 1 - kronecker(-3, p) if p != 3 else 1
        for p in fac_n:
            e3 *= 1 + kronecker(-3, p) if p != 3 else 1
    g12 = 12 + phi_psi - 3 * e2 - 4 * e3
    assert g12 % 12 == 0, (D, N)
    return g12 // 12


def primes_upto(n: int) -> list[int]:
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, int(n**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = False
    return [int(i) for i in np.nonzero(sieve)[0]]


def _crt_pair(a1: int, m1: int, a2: int, m2: int) -> int:
    g, s, t = xgcd(m1, m2)
    assert g == 1
    return (a2 * s * m1 + a1 * t * m2) % (m1 * m2)


def crt_symmetric(residues, mods) -> int:
    x, m = 0, 1
    for r, p in zip(residues, mods):
        x = _crt_pair(x, m, r % p, p)
        m *= p
    if x > m // 2:
        x -= m
    return x


def _primitive_root(q: int) -> int:
    phi = euler_phi(q)
    fac = factorize(phi)
    for g in range(2, q):
        if math.gcd(g, q) != 1:
            continue
        if all(pow(g, phi // p, q) != 1 for p in fac):
            return g
    raise ValueError(q)


# ---------------------------------------------------------------------------
# Dirichlet characters


@lru_cache(maxsize=None)
def unit_group_gens(M: int) -> tuple[tuple[int, int], ...]:
    """Canonical generators (g, order) of (Z/M)^*."""
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
        x = 1
        for (g, _), k in zip(gens, combo):
            x = x * pow(g, k, M) % M
        table.setdefault(x, combo)
    return table


@dataclass(frozen=True)
class DirichletChar:
    """Dirichlet character mod M: exponents on the canonical generators."""

    modulus: int
    exponents: tuple[int, ...]

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
        """chi(a) = zeta_order^k; k, or None if a not a unit."""
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

    def is_even(self) -> bool:
        return self.value_exponent(-1) == 0

    @property
    def conductor(self) -> int:
        M = self.modulus
        for d in divisors(M):
            ok = True
            for a in range(1, M + 1):
                if math.gcd(a, M) != 1:
                    continue
                if a % d == 1 % d and self.value_exponent(a) != 0:
                    ok = False
                    break
            if ok:
                return d
        return M

    def restrict(self, M2: int) -> "DirichletChar":
        """The character mod M2 inducing self (requires conductor | M2 | M)."""
        assert self.modulus % M2 == 0 and M2 % self.conductor == 0
        gens2 = unit_group_gens(M2)
        ordv = self.order
        exps = []
        M = self.modulus
        for g2, n2 in gens2:
            # lift g2 to a unit mod M congruent to g2 mod M2 and 1 mod M/M2'
            a = g2
            while math.gcd(a, M) != 1:
                a += M2
            k = self.value_exponent(a)
            # chi(a) = zeta_ord^k must be an n2-th root compatible exponent
            assert k is not None and (k * n2) % ordv == 0, "not induced"
            exps.append(k * n2 // ordv % n2)
        return DirichletChar(M2, tuple(exps))

    def conjugate(self) -> "DirichletChar":
        gens = unit_group_gens(self.modulus)
        return DirichletChar(
            self.modulus,
            tuple((-e) % n for (_, n), e in zip(gens, self.exponents)),
        )

    def power(self, k: int) -> "DirichletChar":
        gens = unit_group_gens(self.modulus)
        return DirichletChar(
            self.modulus,
            tuple((e * k) % n for (_, n), e in zip(gens, self.exponents)),
        )

    def galois_orbit_powers(self) -> list[int]:
        """k coprime to order with chi^k in the Galois orbit (all of them)."""
        o = self.order
        return [k for k in range(1, o + 1) if math.gcd(k, o) == 1]


def all_even_chars(M: int) -> list[DirichletChar]:
    from itertools import product as iproduct

    gens = unit_group_gens(M)
    out = []
    for combo in iproduct(*[range(n) for (_, n) in gens]):
        chi = DirichletChar(M, tuple(combo))
        if chi.is_even():
            out.append(chi)
    return out


# ---------------------------------------------------------------------------
# P^1(Z/N)


class P1:
    def __init__(self, N: int):
        self.N = N
        if N == 1:
            self.reps = [(0, 0)]
            self._lookup = {(0, 0): (0, 1)}
            return
        units = [u for u in range(1, N) if math.gcd(u, N) == 1]
        lookup: dict[tuple[int, int], tuple[int, int]] = {}
        reps: list[tuple[int, int]] = []
        for c in range(N):
            for d in range(N):
                if (c, d) in lookup or math.gcd(math.gcd(c, d), N) != 1:
                    continue
                idx = len(reps)
                reps.append((c, d))
                for u in units:
                    key = (u * c % N, u * d % N)
                    if key not in lookup:
                        lookup[key] = (idx, u)
        self.reps = reps
        self._lookup = lookup

    def __len__(self):
        return len(self.reps)

    def index(self, u: int, v: int):
        if self.N == 1:
            return (0, 1)
        return self._lookup.get((u % self.N, v % self.N))


# ---------------------------------------------------------------------------
# mod-p linear algebra


def matmul_mod(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """A @ B mod p without int64 overflow (splits A into 15-bit halves)."""
    A = A % p
    B = B % p
    hi, lo = A >> 15, A & 0x7FFF
    return ((hi @ B % p) * (1 << 15) + (lo @ B % p)) % p


def rref_mod(A: np.ndarray, p: int):
    A = A % p
    rows, cols = A.shape
    piv_cols = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        A[r] = A[r] * inv_mod(int(A[r, c]), p) % p
        col = A[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            A[nzr] = (A[nzr] - np.outer(col[nzr], A[r])) % p
        piv_cols.append(c)
        r += 1
    return A[:r], piv_cols


def kernel_mod(A: np.ndarray, p: int) -> np.ndarray:
    """Right kernel of A mod p (columns of the result)."""
    R, piv = rref_mod(A.copy(), p)
    cols = A.shape[1]
    free = [c for c in range(cols) if c not in piv]
    basis = np.zeros((cols, len(free)), dtype=np.int64)
    for j, fc in enumerate(free):
        basis[fc, j] = 1
        for i, pc in enumerate(piv):
            basis[pc, j] = (-R[i, free[j]]) % p
    return basis


def solve_in_span(B: np.ndarray, X: np.ndarray, p: int) -> np.ndarray:
    """Solve B @ C = X mod p (B of full column rank)."""
    k = B.shape[1]
    aug = np.concatenate([B, X], axis=1) % p
    R, piv = rref_mod(aug, p)
    C = np.zeros((k, X.shape[1]), dtype=np.int64)
    for i, pc in enumerate(piv):
        if pc >= k:
            raise ValueError("X not in span of B")
        C[pc] = R[i, k:]
    return C


def intersect_mod(B1: np.ndarray, B2: np.ndarray, p: int) -> np.ndarray:
    """Basis of span(B1) :: span(B2) intersection (columns)."""
    if B1.shape[1] == 0 or B2.shape[1] == 0:
        return np.zeros((B1.shape[0], 0), dtype=np.int64)
    A = np.concatenate([B1, -B2 % p], axis=1) % p
    ker = kernel_mod(A, p)
    coeff1 = ker[: B1.shape[1]]
    out = B1 @ coeff1 % p
    # reduce to independent columns
    R, piv = rref_mod(out.T.copy(), p)
    return out[:, : 0] if not piv else _colspace(out, p)


def _colspace(M: np.ndarray, p: int) -> np.ndarray:
    R, piv = rref_mod(M.T.copy(), p)
    return R.T % p


def charpoly_mod(A: np.ndarray, p: int) -> list[int]:
    """det(xI - A) mod p via Hessenberg; coefficients low degree first."""
    H = A.copy() % p
    n = H.shape[0]
    if n == 0:
        return [1]
    for j in range(n - 2):
        nz = np.nonzero(H[j + 1 :, j])[0]
        if nz.size == 0:
            continue
        i = j + 1 + int(nz[0])
        if i != j + 1:
            H[[j + 1, i]] = H[[i, j + 1]]
            H[:, [j + 1, i]] = H[:, [i, j + 1]]
        inv = inv_mod(int(H[j + 1, j]), p)
        for i in range(j + 2, n):
            if H[i, j]:
                f = int(H[i, j]) * inv % p
                H[i] = (H[i] - f * H[j + 1]) % p
                H[:, j + 1] = (H[:, j + 1] + f * H[:, i]) % p
    polys = [np.array([1], dtype=np.int64)]
    for m in range(1, n + 1):
        pm = np.zeros(m + 1, dtype=np.int64)
        prev = polys[m - 1]
        pm[1 : m + 1] = prev
        pm[:m] = (pm[:m] - int(H[m - 1, m - 1]) * prev) % p
        prod = 1
        for i in range(m - 2, -1, -1):
            prod = prod * int(H[i + 1, i]) % p
            coef = prod * int(H[i, m - 1]) % p
            if coef:
                pi = polys[i]
                pm[: len(pi)] = (pm[: len(pi)] - coef * pi) % p
        polys.append(pm % p)
    return [int(c) for c in polys[n]]


# ---------------------------------------------------------------------------
# Merel matrices and continued fractions


@lru_cache(maxsize=None)
def merel_matrices(n: int) -> tuple[tuple[int, int, int, int], ...]:
    out = set()
    for a in range(1, n + 1):
        for d in range(1, n + 1):
            bc = a * d - n
            if bc < 0:
                continue
            if bc == 0:
                for b in range(a):
                    out.add((a, b, 0, d))
                for c in range(d):
                    out.add((a, 0, c, d))
                continue
            for b in divisors(bc):
                c = bc // b
                if b < a and c < d:
                    out.add((a, b, c, d))
    return tuple(sorted(out))


def convergents(num: int, den: int):
    """Convergents (p_k, q_k) of num/den, starting with (1, 0)."""
    out = [(1, 0)]
    a, b = num, den
    ks = []
    while b:
        k = a // b
        a, b = b, a - k * b
        ks.append(k)
    pm2, qm2 = 0, 1
    pm1, qm1 = 1, 0
    for k in ks:
        p_, q_ = k * pm1 + pm2, k * qm1 + qm2
        out.append((p_, q_))
        pm2, qm2, pm1, qm1 = pm1, qm1, p_, q_
    return out


# ---------------------------------------------------------------------------
# integer symbol tables for one level / character


class SymCombo:
    """Sparse combination of P^1 symbols with coefficients c * zeta^k,
    stored as {(index, k): c}."""

    __slots__ = ("terms",)

    def __init__(self):
        self.terms: dict[tuple[int, int], int] = {}

    def add(self, idx: int, k: int, c: int = 1):
        key = (idx, k)
        self.terms[key] = self.terms.get(key, 0) + c


class LevelTables:
    """Prime-independent combinatorial data for (N, chi)."""

    def __init__(self, N: int, chi: DirichletChar | None = None):
        self.N = N
        self.chi = chi if chi is not None else DirichletChar.trivial(N)
        self.order = self.chi.order
        self.p1 = P1(N)
        self.nsym = len(self.p1)
        self._chi_exp_cache: dict[int, int] = {}
        self._build_relations()
        self._boundary = None
        self._hecke: dict[int, list[SymCombo]] = {}
        self._al: dict[int, list[SymCombo]] = {}
        self._star = None

    # chi(u) = zeta^k
    def chi_exp(self, u: int) -> int:
        k = self.chi.value_exponent(u)
        assert k is not None
        return k

    def sym(self, u: int, v: int) -> tuple[int, int] | None:
        """(index, chi-exponent) of the class of (u, v), or None."""
        res = self.p1.index(u, v)
        if res is None:
            return None
        i, unit = res
        return (i, self.chi_exp(unit))

    def _build_relations(self):
        sigma_pairs: list[tuple[int, int, int]] = []
        tau_rows: list[dict[tuple[int, int], int]] = []
        seen_sigma, seen_tau = set(), set()
        for i, (c, d) in enumerate(self.p1.reps):
            j, k = self.sym(d, -c)
            key = tuple(sorted((i, j)))
            if key not in seen_sigma:
                seen_sigma.add(key)
                sigma_pairs.append((i, j, k))
            j1, k1 = self.sym(d, -c - d)
            j2, k2 = self.sym(-c - d, c)
            key = tuple(sorted((i, j1, j2)))
            if key not in seen_tau:
                seen_tau.add(key)
                row: dict[tuple[int, int], int] = {}
                for idx, kk in ((i, 0), (j1, k1), (j2, k2)):
                    row[(idx, kk)] = row.get((idx, kk), 0) + 1
                tau_rows.append(row)
        self.sigma_pairs = sigma_pairs
        self.tau_rows = tau_rows

    # -- SL2 lift and cusps --

    def sl2_lift(self, c: int, d: int):
        N = self.N
        if N == 1:
            return (1, 0, 0, 1)
        c %= N
        d %= N
        c0, d1 = c, d
        for t in range(2 * N + 2):
            if math.gcd(c0, d1 + t * N) == 1:
                d1 = d1 + t * N
                break
        else:
            raise RuntimeError((c, d, N))
        if c0 == 0 and d1 == 0:
            raise ValueError
        g, x, y = xgcd(c0, d1)
        assert g == 1
        return (y, -x, c0, d1)

    @staticmethod
    def _cusp_key(a: int, c: int):
        if c < 0:
            a, c = -a, -c
        g = math.gcd(abs(a), c) or 1
        a, c = a // g, c // g
        return (1, 0) if c == 0 else (a, c)

    def _cusp_equiv(self, x, y) -> bool:
        (p1_, q1), (p2_, q2) = x, y
        N = self.N

        def s_of(a, q):
            if q == 0:
                return a
            if q == 1:
                return 0
            return inv_mod(a, q)

        g = math.gcd(q1 * q2, N)
        return (s_of(p1_, q1) * q2 - s_of(p2_, q2) * q1) % g == 0

    @staticmethod
    def _mat_mul(m1, m2):
        a, b, c, d = m1
        e, f, g, h = m2
        return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def _complete_cusp(self, a, c):
        g, x, y = xgcd(a, c)
        assert g in (1, -1)
        if g == -1:
            x, y = -x, -y
        return (a, -y, c, x)

    def _identifier_unit(self, x, y) -> int | None:
        """d-entry (mod N) of some gamma in Gamma0(N) sending cusp x to y."""
        g1 = self._complete_cusp(*x)
        g2 = self._complete_cusp(*y)
        inv1 = (g1[3], -g1[1], -g1[2], g1[0])
        N = self.N
        for t in range(-3 * N - 1, 3 * N + 2):
            m = self._mat_mul(g2, (1, t, 0, 1))
            gamma = self._mat_mul(m, inv1)
            if gamma[2] % N == 0:
                return gamma[3] % N
        return None

    def boundary(self):
        """(rows, ncols): rows[i] = sparse boundary of symbol i as
        {col: zeta-exponent-weighted integer coefficient list}, where killed
        cusp classes are dropped. Entries are (col, k, c)."""
        if self._boundary is not None:
            return self._boundary
        classes: list[tuple[int, int]] = []
        lookup: dict[tuple[int, int], int] = {}
        reps_of_class: dict[int, tuple[int, int]] = {}

        def class_of(a, c):
            key = self._cusp_key(a, c)
            if key in lookup:
                return lookup[key]
            for i, rep in enumerate(classes):
                if self._cusp_equiv(key, rep):
                    lookup[key] = i
                    return i
            classes.append(key)
            lookup[key] = len(classes) - 1
            reps_of_class[len(classes) - 1] = key
            return len(classes) - 1

        entries = []  # (symbol index, class id, sign, zeta exponent)
        for i, (c, d) in enumerate(self.p1.reps):
            a, b, cc, dd = self.sl2_lift(c, d)
            for sgn, (num, den) in ((1, (a, cc)), (-1, (b, dd))):
                key = self._cusp_key(num, den)
                cid = class_of(*key)
                if self.order > 1 and key != reps_of_class[cid]:
                    # gamma sends this cusp to the class representative, so
                    # [cusp] = chi(d_gamma)^{-1} [rep]
                    u = self._identifier_unit(key, reps_of_class[cid])
                    assert u is not None and math.gcd(u, self.N) == 1
                    k = (-self.chi_exp(u)) % self.order
                else:
                    k = 0
                entries.append((i, cid, sgn, k))
        killed: set[int] = set()
        if self.order > 1:
            for cid, rep in reps_of_class.items():
                g0m = self._complete_cusp(*rep)
                inv0 = (g0m[3], -g0m[1], -g0m[2], g0m[0])
                N = self.N
                for t in range(1, 6 * N + 1):
                    gamma = self._mat_mul(self._mat_mul(g0m, (1, t, 0, 1)), inv0)
                    if gamma[2] % N == 0:
                        dg = gamma[3] % N
                        if math.gcd(dg, N) == 1 and self.chi_exp(dg) != 0:
                            killed.add(cid)
                        break
        cols = {}
        rows: list[list[tuple[int, int, int]]] = [[] for _ in range(self.nsym)]
        for i, cid, sgn, k in entries:
            if cid in killed:
                continue
            col = cols.setdefault(cid, len(cols))
            rows[i].append((col, k, sgn))
        self._boundary = (rows, len(cols), len(classes))
        return self._boundary

    # -- operator tables (images of every symbol) --

    def hecke_table(self, n: int) -> list[SymCombo]:
        if n in self._hecke:
            return self._hecke[n]
        mats = merel_matrices(n)
        out = []
        for c, d in self.p1.reps:
            combo = SymCombo()
            for a, b, cc, dd in mats:
                res = self.sym(c * a + d * cc, c * b + d * dd)
                if res is None:
                    continue
                i, k = res
                combo.add(i, k)
            out.append(combo)
        self._hecke[n] = out
        return out

    def star_table(self) -> list[tuple[int, int]]:
        """Star involution: symbol (c:d) -> (-c:d)."""
        if self._star is None:
            self._star = [self.sym(-c, d) for (c, d) in self.p1.reps]
        return self._star

    def modsym_combo(self, alpha, beta) -> SymCombo:
        """{alpha, beta} as a symbol combination; alpha, beta = (num, den)."""
        combo = SymCombo()
        self._add_to_infty(combo, beta, +1)
        self._add_to_infty(combo, alpha, -1)
        return combo

    def _add_to_infty(self, combo: SymCombo, cusp, sign: int):
        num, den = cusp
        if den == 0:
            return
        conv = convergents(num, den)
        for k in range(1, len(conv)):
            pk, qk = conv[k]
            pk1, qk1 = conv[k - 1]
            det = pk * qk1 - pk1 * qk
            assert det in (1, -1)
            res = self.sym(qk, det * qk1)
            assert res is not None
            i, kk = res
            combo.add(i, kk, sign)

    def atkin_lehner_table(self, Q: int) -> list[SymCombo]:
        if Q in self._al:
            return self._al[Q]
        N = self.N
        assert N % Q == 0 and math.gcd(Q, N // Q) == 1
        g, x, y = xgcd(Q, N // Q)
        assert g == 1
        gamma = (Q * x, -y, N, Q)
        out = []
        for c, d in self.p1.reps:
            a, b, cc, dd = self.sl2_lift(c, d)
            a1 = _apply_frac(gamma, (b, dd))
            a2 = _apply_frac(gamma, (a, cc))
            out.append(self.modsym_combo(a1, a2))
        self._al[Q] = out
        return out

    def degeneracy_table(self, target: "LevelTables", t: int) -> list[SymCombo]:
        """alpha_t: level N -> level M (M | N, t | N/M): {a,b} -> {ta, tb},
        expressed in the target's symbols."""
        out = []
        for c, d in self.p1.reps:
            a, b, cc, dd = self.sl2_lift(c, d)
            a1 = _apply_frac((t, 0, 0, 1), (b, dd))
            a2 = _apply_frac((t, 0, 0, 1), (a, cc))
            out.append(target.modsym_combo(a1, a2))
        return out


def _apply_frac(m, frac):
    a, b, c, d = m
    num, den = frac
    nn, dd = a * num + b * den, c * num + d * den
    if dd < 0:
        nn, dd = -nn, -dd
    g = math.gcd(abs(nn), abs(dd)) or 1
    return (nn // g, dd // g)


# ---------------------------------------------------------------------------
# per-prime instantiation


class PrimeSpace:
    """The quotient space over F_p built from LevelTables."""

    def __init__(self, tables: LevelTables, p: int):
        self.T = tables
        self.p = p
        ordv = tables.order
        if ordv > 1:
            assert (p - 1) % ordv == 0, (p, ordv)
            self.zeta = pow(_primitive_root(p), (p - 1) // ordv, p)
        else:
            self.zeta = 1
        self._zpow = [pow(self.zeta, k, p) for k in range(max(ordv, 1))]
        n = tables.nsym
        # phase 1: eliminate the sigma pairs by substitution
        sub_target = np.arange(n, dtype=np.int64)  # representative index
        sub_coef = np.ones(n, dtype=np.int64)  # x_i = coef * x_rep (or 0)
        for i, j, k in tables.sigma_pairs:
            zk = self._zpow[k]
            if i == j:
                if (1 + zk) % p != 0:
                    sub_coef[i] = 0
            else:
                # x_i + zeta^k x_j = 0  ->  x_j = -zeta^{-k} x_i
                sub_target[j] = i
                sub_coef[j] = (-inv_mod(zk, p)) % p
        reps = sorted(
            {int(sub_target[i]) for i in range(n) if sub_coef[sub_target[i]] != 0
             and sub_coef[i] != 0}
        )
        rep_pos = {r: t for t, r in enumerate(reps)}
        # phase 2: tau relations on the representatives
        rows = []
        for rel in tables.tau_rows:
            row = np.zeros(len(reps), dtype=np.int64)
            for (i, k), c in rel.items():
                t = int(sub_target[i])
                coef = c * self._zpow[k] % p * sub_coef[i] % p
                if coef and sub_coef[t] != 0:
                    row[rep_pos[t]] = (row[rep_pos[t]] + coef) % p
            if np.any(row):
                rows.append(row)
        R = (
            np.array(rows, dtype=np.int64)
            if rows
            else np.zeros((0, len(reps)), np.int64)
        )
        Rr, piv = rref_mod(R, p)
        free_rep = [c for c in range(len(reps)) if c not in piv]
        self.dim = len(free_rep)
        # projection of representative classes onto the free generators
        proj_rep = np.zeros((len(reps), self.dim), dtype=np.int64)
        for jj, fc in enumerate(free_rep):
            proj_rep[fc, jj] = 1
        for ii, pc in enumerate(piv):
            proj_rep[pc] = (-Rr[ii, free_rep]) % p
        proj = np.zeros((n, self.dim), dtype=np.int64)
        for i in range(n):
            t = int(sub_target[i])
            if sub_coef[i] == 0 or sub_coef[t] == 0:
                continue
            proj[i] = sub_coef[i] * proj_rep[rep_pos[t]] % p
        self.proj = proj
        self.free = [reps[c] for c in free_rep]

    def combo_vec(self, combo: SymCombo) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        for (i, k), c in combo.terms.items():
            if c % self.p == 0:
                continue
            v = (v + c * self._zpow[k] % self.p * self.proj[i]) % self.p
        return v

    def operator_on(self, table: list, basis: np.ndarray) -> np.ndarray:
        """Matrix of an operator given by a full symbol-image table,
        restricted to the (stable) column span of basis."""
        p = self.p
        full = np.zeros((self.dim, self.dim), dtype=np.int64)
        for j, fc in enumerate(self.free):
            entry = table[fc]
            if isinstance(entry, SymCombo):
                full[:, j] = self.combo_vec(entry)
            else:
                i, k = entry
                full[:, j] = self._zpow[k] * self.proj[i] % p
        img = matmul_mod(full, basis, p)
        return solve_in_span(basis, img, p)

    def operator_to_target(
        self, table: list[SymCombo], target: "PrimeSpace", basis: np.ndarray
    ) -> np.ndarray:
        """Matrix (target.dim x basis-cols) of a map to another level."""
        p = self.p
        cols = []
        M = np.zeros((target.dim, self.dim), dtype=np.int64)
        for j, fc in enumerate(self.free):
            M[:, j] = target.combo_vec(table[fc])
        return matmul_mod(M, basis, p)

    def cuspidal_basis(self) -> np.ndarray:
        rows, ncols, _ = self.T.boundary()
        p = self.p
        n = self.T.nsym
        B = np.zeros((n, ncols), dtype=np.int64)
        for i, ents in enumerate(rows):
            for col, k, c in ents:
                B[i, col] = (B[i, col] + c * self._zpow[k]) % p
        # boundary of free generator j = boundary row of symbol free[j];
        # boundary on the quotient: since proj expresses pivot symbols via
        # free ones and the boundary respects the relations, the boundary of
        # basis vector e_j is just B[free[j]].
        Bq = B[self.free]
        return kernel_mod(Bq.T % p, p)

    def plus_subspace(self, basis: np.ndarray) -> np.ndarray:
        star = self.operator_on(self.T.star_table(), basis)
        p = self.p
        eye = np.eye(basis.shape[1], dtype=np.int64)
        ker = kernel_mod((star - eye) % p, p)
        return matmul_mod(basis, ker, p)
