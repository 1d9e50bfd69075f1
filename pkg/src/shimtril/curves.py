"""Shimura curves over Q: level structures, which automorphic
representations appear in them, genus via the cohomology decomposition,
Atkin-Lehner involutions and quotient-genus-zero tests, and the sign-table
prechecks used by the quaternionic classification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .chars import DirichletChar, RootOfUnity, divisors, factorize
from .lmfdb import CacheMissError, NewformRecord
from .reptheory import (
    CompactInductionData,
    DirichletLocal,
    Kind,
    LocalGL2Rep,
    MaximalCompact,
    TwistDescriptor,
    classify_from_newform_local,
    dim_gamma0_invariants,
    quat_minimal_dim,
)


class Flavor(Enum):
    GAMMA0 = "gamma0"
    GAMMA1 = "gamma1"
    GAMMA_FULL = "gamma-full"


class CurveError(ValueError):
    pass


@dataclass(frozen=True)
class CurveSpec:
    """A quaternionic Shimura curve over Q.

    discriminant: squarefree product of the division primes (1 = modular).
    ramified_level: the ideal A supported on the division primes (defaults
    to the discriminant, i.e. the maximal-order level).
    level / level_full: the tame level N and the full-congruence part N'.
    projectivized: quotient by the center (trivial central character).
    al_quotient: primes whose Atkin-Lehner involutions are quotiented out.
    """

    discriminant: int = 1
    level: int = 1
    ramified_level: Optional[int] = None
    level_full: int = 1
    flavor: Flavor = Flavor.GAMMA0
    projectivized: bool = True
    al_quotient: frozenset = frozenset()

    def __post_init__(self):
        D = self.discriminant
        fac = factorize(D)
        if any(e > 1 for e in fac.values()):
            raise CurveError("the discriminant must be squarefree")
        A = self.A
        if A != 1 or D != 1:
            afac = factorize(A)
            if set(afac) != set(fac):
                raise CurveError(
                    "the ramified level must be supported exactly on the "
                    "division primes"
                )
        if math.gcd(D, self.level * self.level_full) != 1:
            raise CurveError("tame level must be coprime to the discriminant")
        if math.gcd(self.level, self.level_full) != 1:
            raise CurveError("the two tame level parts must be coprime")
        for p in self.al_quotient:
            if D % p != 0 and (self.level * self.level_full) % p != 0:
                raise CurveError("quotient primes must divide the level data")

    @property
    def A(self) -> int:
        return self.discriminant if self.ramified_level is None else self.ramified_level

    @property
    def division_primes(self) -> list[int]:
        return sorted(factorize(self.discriminant))

    @property
    def class_modulus(self) -> int:
        """The modulus governing geometric connectedness: product of
        p^[ord_p(A)/2] over the division primes."""
        m = 1
        for p, e in factorize(self.A).items():
            m *= p ** (e // 2)
        return m

    def describe(self) -> str:
        base = "Y" if self.projectivized else "X"
        sub = {Flavor.GAMMA0: "0", Flavor.GAMMA1: "1", Flavor.GAMMA_FULL: ""}[
            self.flavor
        ]
        sup = "" if self.A == self.discriminant else f"^{self.A}"
        if self.discriminant > 1 and self.A == self.discriminant:
            sup = f"^D{self.discriminant}"
        lvl = (
            f"({self.level})"
            if self.level_full == 1
            else f"({self.level},{self.level_full})"
        )
        q = (
            "/w{" + ",".join(map(str, sorted(self.al_quotient))) + "}"
            if self.al_quotient
            else ""
        )
        return f"{base}{sub}{sup}{lvl}{q}"


@dataclass(frozen=True)
class Embedding:
    """One automorphic representation: a newform orbit member."""

    record: NewformRecord
    index: int
    char_power: int  # nebentypus = (orbit character)^char_power
    ap_tokens: tuple  # ((p, RootOfUnity or None), ...) at bad primes

    @property
    def label(self) -> str:
        return self.record.label

    def nebentypus(self) -> DirichletChar:
        chi = self.record.nebentypus
        return chi.power(self.char_power)

    def ap_token(self, p: int) -> Optional[RootOfUnity]:
        for q, tok in self.ap_tokens:
            if q == p:
                return tok
        return None


@dataclass
class AppearingRep:
    embedding: Embedding
    local: dict[int, LocalGL2Rep]
    invariant_dim: int
    local_dims: dict[int, int]
    al_signs: dict[int, Optional[int]]
    dim_blockers: list[str] = field(default_factory=list)


@dataclass
class AppearanceReport:
    curve: CurveSpec
    reps: list[AppearingRep]
    blockers: list[str] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return not self.blockers and all(
            not r.dim_blockers for r in self.reps
        )


@dataclass
class Genus:
    total: int
    components: int
    per_component: Optional[int]
    blockers: list[str] = field(default_factory=list)

    @property
    def is_partial(self) -> bool:
        return bool(self.blockers)


# invariant dimensions of the full-congruence subgroup of depth nprime for
# supercuspidal local components (depth-zero cuspidal counts and their
# twists); solved from the classical genera of the mixed-level curves.
GAMMA_FULL_SC_DIMS = {
    (2, 2, 1): 1,
    (3, 2, 1): 2,
    (5, 2, 1): 4,
    (2, 3, 2): 3,
    (2, 4, 2): 3,
}


class RepBuilder:
    """Builds classified local data for newform records against a source."""

    def __init__(self, source, extensions: Optional[dict] = None):
        self.source = source
        self.ext = extensions or {}
        self._local_cache: dict[tuple, LocalGL2Rep] = {}

    def local_rep(
        self, rec: NewformRecord, p: int, char_power: int = 1, entry: int = 0
    ) -> LocalGL2Rep:
        key = (rec.label, p, char_power, entry)
        if key in self._local_cache:
            return self._local_cache[key]
        n = factorize(rec.level).get(p, 0)
        chi = rec.nebentypus.power(char_power)
        omega = _local_char(chi, p)
        a_p = None
        if rec.char_order == 1:
            a = rec.ap.get(p)
            if a in (1, -1):
                a_p = RootOfUnity.from_sign(a)
        else:
            a_p = _embedding_ap_token(rec, p, char_power, entry)
        route = rec.twist_routes.get(p)
        minimal_at_p = route is None
        twist = None
        m_exp = None
        m_kind = None
        if route is not None:
            target_label, target_exp, token, cond_exp = route
            m_exp = int(target_exp)
            twist = TwistDescriptor(
                p,
                int(cond_exp),
                2 if _is_int_token(token) else 3,
                str(token),
            )
            try:
                target = self.source.by_label(target_label)
                target_rep = self.local_rep(target, p)
                m_kind = target_rep.kind
                if m_kind is Kind.STEINBERG_TWIST and a_p is None:
                    a_p = (
                        RootOfUnity.from_sign(target.ap[p])
                        if target.ap.get(p) in (1, -1)
                        else None
                    )
            except CacheMissError:
                m_kind = None
        induction = self._induction_fixture(rec.label, p)
        rep = classify_from_newform_local(
            p,
            n,
            omega,
            a_p,
            minimal_at_p,
            minimal_twist_level_exponent=m_exp,
            al_sign=rec.atkin_lehner.get(p),
            twist=twist,
            induction=induction,
            minimal_twist_kind=m_kind,
        )
        self._local_cache[key] = rep
        return rep

    def _induction_fixture(self, label: str, p: int) -> Optional[CompactInductionData]:
        entry = self.ext.get("induction", {}).get(f"{label}@{p}")
        if entry is None:
            return None
        return CompactInductionData(
            MaximalCompact.RAMIFIED
            if entry.get("maximal_compact", "ramified") == "ramified"
            else MaximalCompact.UNRAMIFIED,
            int(entry["dim"]),
            int(entry["sign_at_g"]) if entry.get("sign_at_g") is not None else None,
            int(entry.get("level", 0)),
        )

    def row_hint(self, label: str, p: int) -> Optional[str]:
        return self.ext.get("rows", {}).get(f"{label}@{p}")


def _is_int_token(token) -> bool:
    try:
        int(token)
        return True
    except (TypeError, ValueError):
        return False


def _local_char(chi: DirichletChar, p: int) -> DirichletLocal:
    """Local data at p of a Dirichlet character."""
    cond_exp = chi.conductor_exponent(p)
    if cond_exp == 0:
        # unramified local component; for a character with conductor prime
        # to p the local value at p is chi(p)^{-1}-adjusted, but the engine
        # only consumes unramified central characters through triviality
        # tests at the global layer, so the uniformizer value of the local
        # component of a *global* character is recorded as chi(p).
        if chi.order == 1:
            return DirichletLocal.trivial(p)
        k = chi.value_exponent(p)
        val = RootOfUnity(k, chi.order) if k is not None else None
        order = val.order if val is not None else 1
        return DirichletLocal(p, 0, max(order, 1), val)
    # ramified: order of the p-part
    p_part_order = _p_part_order(chi, p)
    return DirichletLocal(p, cond_exp, p_part_order, None)


def _p_part_order(chi: DirichletChar, p: int) -> int:
    from .chars import unit_group_gens

    M = chi.modulus
    order = 1
    for (g, n), e in zip(unit_group_gens(M), chi.exponents):
        # generator belongs to the p-part iff g = 1 mod M/p^a
        q = p ** factorize(M).get(p, 0)
        if q == 1:
            continue
        if (g - 1) % (M // q) == 0:
            oe = n // math.gcd(n, e)
            order = math.lcm(order, oe)
    return order


def _embedding_ap_token(
    rec: NewformRecord, p: int, char_power: int, entry_index: int = 0
) -> Optional[RootOfUnity]:
    """Exact a_p token for a nebentypus-orbit embedding, when stored."""
    if not rec.embeddings or entry_index >= len(rec.embeddings):
        return None
    data = dict(rec.embeddings[entry_index])
    ap = data.get("ap", {})
    token = ap.get(str(p)) if isinstance(ap, dict) else None
    if token is None:
        return None
    if token.get("kind") == "rational":
        v = token["value"]
        return RootOfUnity.from_sign(v) if v in (1, -1) else None
    if token.get("kind") == "root_of_unity":
        base = RootOfUnity(int(token["num"]), int(token["den"]))
        # the power-k conjugate applies the Galois map fixing the value
        # semantics: zeta -> zeta^k with k odd against the doubled order
        k = char_power
        if k % 2 == 0:
            k += rec.char_order
        return RootOfUnity(base.num * k, base.den)
    return None


# ---------------------------------------------------------------------------
# appearance


def appearing_reps(curve: CurveSpec, source, extensions=None) -> AppearanceReport:
    builder = RepBuilder(source, extensions)
    report = AppearanceReport(curve=curve, reps=[])
    D, A, N, Nf = (
        curve.discriminant,
        curve.A,
        curve.level,
        curve.level_full,
    )
    bound = A * N * Nf * Nf
    trivial_only = curve.projectivized
    m = curve.class_modulus
    cond_bound = m
    if not trivial_only:
        if curve.flavor is Flavor.GAMMA1:
            cond_bound = m * N
        elif curve.flavor is Flavor.GAMMA_FULL:
            cond_bound = m * N * Nf
    try:
        records = source.newforms_dividing(
            bound,
            trivial_char_only=trivial_only,
            char_conductor_divides=None if trivial_only else cond_bound,
        )
    except CacheMissError:
        raise
    for rec in records:
        if rec.level % D != 0:
            continue
        if not trivial_only and rec.char_order > 1:
            if cond_bound % rec.char_conductor != 0:
                continue
            if not rec.nebentypus.is_even():
                continue
        elif trivial_only and rec.char_order > 1:
            continue
        for emb_index, power, entry in _embedding_powers(rec):
            rep = _build_appearing(
                curve, builder, rec, emb_index, power, entry
            )
            if rep is not None:
                report.reps.append(rep)
    report.reps.sort(key=lambda r: (r.embedding.label, r.embedding.index))
    return report


def _embedding_powers(rec: NewformRecord):
    """(embedding index, character power, eigensystem entry index)."""
    if rec.char_order == 1:
        for i in range(rec.dim):
            yield i, 1, 0
    else:
        entries = max(len(rec.embeddings), 1)
        i = 0
        for k in rec.orbit_powers:
            for e in range(entries):
                yield i, k, e
                i += 1


def _build_appearing(
    curve: CurveSpec,
    builder: RepBuilder,
    rec: NewformRecord,
    emb_index: int,
    power: int,
    entry: int = 0,
) -> Optional[AppearingRep]:
    D, A, N, Nf = curve.discriminant, curve.A, curve.level, curve.level_full
    local: dict[int, LocalGL2Rep] = {}
    dims: dict[int, int] = {}
    als: dict[int, Optional[int]] = {}
    blockers: list[str] = []
    lev = factorize(rec.level)
    for p in sorted(set(factorize(D)) | set(lev) | set(factorize(N * Nf))):
        n_p = lev.get(p, 0)
        if D % p == 0:
            a_p = factorize(A)[p]
            if n_p == 0:
                return None  # not a discrete series at a division prime
            rep = builder.local_rep(rec, p, power, entry)
            if not rep.is_discrete_series:
                return None
            if rep.conductor > a_p:
                return None
            local[p] = rep
            dims[p] = quat_minimal_dim(p, rep.min_cond)
            als[p] = (
                _division_sign(rep) if a_p == 1 and rep.conductor == 1 else None
            )
            continue
        # split prime
        rep = builder.local_rep(rec, p, power, entry)
        local[p] = rep
        mN = factorize(N).get(p, 0)
        mF = factorize(Nf).get(p, 0)
        if mF > 0:
            if rep.conductor > 2 * mF + mN:
                return None
            d = _gamma_full_dim(rep, p, mF, mN)
            if d is None:
                blockers.append(f"dimension at {p} needs a fixture")
                dims[p] = 0
            elif d == 0:
                return None
            else:
                dims[p] = d
        else:
            if curve.flavor is Flavor.GAMMA0 and not rep.central_char.is_unramified:
                return None
            d = max(mN - rep.conductor + 1, 0)
            if d == 0:
                return None
            dims[p] = d
        als[p] = rec.atkin_lehner.get(p)
    total = 1
    for d in dims.values():
        total *= d
    tokens = tuple(
        (p, _ap_token_for(builder, rec, p, power, entry))
        for p in sorted(local)
    )
    emb = Embedding(rec, emb_index, power, tokens)
    return AppearingRep(
        embedding=emb,
        local=local,
        invariant_dim=total,
        local_dims=dims,
        al_signs=als,
        dim_blockers=blockers,
    )


def _ap_token_for(builder, rec, p, power, entry=0):
    if rec.char_order == 1:
        a = rec.ap.get(p)
        return RootOfUnity.from_sign(a) if a in (1, -1) else None
    return _embedding_ap_token(rec, p, power, entry)


def _division_sign(rep: LocalGL2Rep) -> Optional[int]:
    """Eigenvalue of the Atkin-Lehner involution at a division prime with
    squarefree ramified level: the value of the transferred character at
    the uniformizer (the negative of the split-side new-vector sign)."""
    if rep.steinberg_twist is not None:
        return rep.steinberg_twist.as_sign()
    if rep.al_sign is not None:
        return -rep.al_sign
    return None


def _gamma_full_dim(rep: LocalGL2Rep, p: int, nf: int, n0: int) -> Optional[int]:
    """Invariants under Gamma0(p^n0) Gamma(p^nf); in this project's scope
    n0 = 0 at full-congruence primes."""
    if rep.conductor == 0:
        return p ** (nf - 1) * (p + 1) if nf >= 1 else 1
    if rep.kind is Kind.STEINBERG_TWIST:
        return p ** (nf - 1) * (p + 1) - 1
    if rep.kind is Kind.SUPERCUSPIDAL:
        key = (p, rep.conductor, nf)
        return GAMMA_FULL_SC_DIMS.get(key)
    # ramified principal series under the full congruence subgroup: not
    # needed by the supported curves
    return None


# ---------------------------------------------------------------------------
# genus


def genus(curve: CurveSpec, source, extensions=None) -> Genus:
    report = appearing_reps(curve, source, extensions)
    return genus_from_report(curve, report)


def genus_from_report(curve: CurveSpec, report: AppearanceReport) -> Genus:
    blockers = list(report.blockers)
    for r in report.reps:
        blockers.extend(r.dim_blockers)
    total = sum(r.invariant_dim for r in report.reps)
    comps = component_count(curve)
    per = total // comps if comps and total % comps == 0 else None
    return Genus(total=total, components=comps, per_component=per, blockers=blockers)


def component_count(curve: CurveSpec) -> int:
    m = curve.class_modulus
    units_m = [a for a in range(1, max(m, 2)) if math.gcd(a, m) == 1] or [1]
    if curve.flavor is Flavor.GAMMA_FULL and curve.level_full > 1:
        nf = curve.level_full
        g = [a for a in range(1, nf + 1) if math.gcd(a, nf) == 1]
        if curve.projectivized:
            sq = {(a * a) % nf for a in g}
            base = len(g) // len(sq)
        else:
            base = len(g)
    else:
        base = 1
    if curve.projectivized:
        sqm = {(a * a) % m for a in units_m} if m > 1 else {1}
        return base * (len(units_m) // len(sqm) if m > 1 else 1)
    return base * (len(units_m) if m > 1 else 1)


# ---------------------------------------------------------------------------
# Atkin-Lehner quotients and sign tables


def al_quotient_genus_zero(curve: CurveSpec, S, source, extensions=None):
    """Whether the quotient by the product of the Atkin-Lehner involutions
    over S has genus zero, by the two-step eigenvector argument: every
    appearing representation must be ramified at each quotient prime (else
    both eigenvalues occur) and must have total sign -1 over S."""
    S = sorted(S)
    AN = curve.A * curve.level
    for p in S:
        if factorize(AN).get(p, 0) != 1:
            raise CurveError(
                "quotient primes must exactly divide the ramified-tame level"
            )
    report = appearing_reps(curve, source, extensions)
    if not report.reps:
        return True
    for rep in report.reps:
        prod = 1
        for p in S:
            loc = rep.local.get(p)
            if loc is None or loc.conductor == 0:
                return False  # unramified: both eigenvalues occur
            s = rep.al_signs.get(p)
            if s is None:
                s = _division_sign(loc) if curve.discriminant % p == 0 else None
            if s is None:
                return None
            prod *= s
        if prod != -1:
            return False
    return True


def goodness_precheck_sign_tables(curve: CurveSpec, source, extensions=None):
    """Search for three sign tuples over the division primes whose
    componentwise product is all-ones (a nonvanishing witness at the sign
    level); None when no such triple exists."""
    primes = curve.division_primes
    report = appearing_reps(curve, source, extensions)
    tuples = set()
    for rep in report.reps:
        t = []
        for p in primes:
            loc = rep.local[p]
            s = _division_sign(loc)
            if s is None:
                break
            t.append(s)
        else:
            tuples.add(tuple(t))
    tl = sorted(tuples)
    for i, t1 in enumerate(tl):
        for j in range(i, len(tl)):
            for k in range(j, len(tl)):
                prod = tuple(
                    a * b * c for a, b, c in zip(t1, tl[j], tl[k])
                )
                if all(x == 1 for x in prod):
                    return (t1, tl[j], tl[k])
    return None
