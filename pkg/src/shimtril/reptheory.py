"""Local representation theory of GL2(Q_p) and of the ramified quaternion
division algebra over Q_p, at the level of detail the trilinear-form engine
needs: classification of local components from newform data, conductors,
new-vector Atkin-Lehner signs, invariant dimensions, and the
Jacquet-Langlands transfer.

Everything here is a pure function of exact integer/character data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .chars import RootOfUnity


class ClassificationError(ValueError):
    """Inconsistent local input data."""


class UnsupportedCaseError(ValueError):
    """The requested quantity is outside the supported parameter range."""


@dataclass(frozen=True)
class DirichletLocal:
    """Local data of a finite-order character of Q_p^*.

    For conductor_exponent = 0 the character is determined by its value on a
    uniformizer; the unit part is trivial. For ramified characters the engine
    only needs the conductor exponent and the order.
    """

    prime: int
    conductor_exponent: int
    order: int
    value_at_uniformizer: Optional[RootOfUnity] = None

    def __post_init__(self):
        if self.order < 1 or self.conductor_exponent < 0:
            raise ClassificationError("bad character data")
        if self.order == 1 and self.conductor_exponent != 0:
            raise ClassificationError("the trivial character is unramified")
        if self.order == 1 and self.value_at_uniformizer not in (
            None,
            RootOfUnity.one(),
        ):
            raise ClassificationError("the trivial character has value 1")

    @staticmethod
    def trivial(p: int) -> "DirichletLocal":
        return DirichletLocal(p, 0, 1, RootOfUnity.one())

    @staticmethod
    def unramified_quadratic(p: int) -> "DirichletLocal":
        return DirichletLocal(p, 0, 2, RootOfUnity.minus_one())

    @property
    def is_trivial(self) -> bool:
        return self.order == 1

    @property
    def is_unramified(self) -> bool:
        return self.conductor_exponent == 0


class Kind(Enum):
    PRINCIPAL_SERIES = "principal-series"
    STEINBERG_TWIST = "steinberg-twist"
    SUPERCUSPIDAL = "supercuspidal"


class MaximalCompact(Enum):
    UNRAMIFIED = "unramified"
    RAMIFIED = "ramified"


@dataclass(frozen=True)
class CompactInductionData:
    """Type data of a minimal supercuspidal: the maximal compact-mod-center
    subgroup it is induced from, the dimension of the inducing representation
    and the scalar by which the order-two normalizing element acts on it
    (recorded only when that action is scalar)."""

    maximal_compact: MaximalCompact
    very_cuspidal_dim: int
    sign_at_g: Optional[int]  # +-1 scalar action; None when not scalar
    level: int

    def __post_init__(self):
        if self.very_cuspidal_dim < 1 or self.level < 0:
            raise ClassificationError("bad induction data")
        if self.sign_at_g not in (None, 1, -1):
            raise ClassificationError("sign must be +-1 or unknown")


@dataclass(frozen=True)
class TwistDescriptor:
    """A character of Q_p^* used to twist down to a minimal representation."""

    prime: int
    conductor_exponent: int
    order: int
    token: str  # e.g. "chi4", "chi8", "chi3", "ord3_mod_9"

    @property
    def is_quadratic(self) -> bool:
        return self.order == 2


@dataclass(frozen=True)
class LocalGL2Rep:
    """One prime's local component of a weight-2 newform."""

    prime: int
    conductor: int
    central_char: DirichletLocal
    kind: Kind
    minimal: bool
    # value chi(p) for Steinberg twists St (x) chi with chi unramified,
    # as a root-of-unity token (the p-th Fourier coefficient of the newform)
    steinberg_twist: Optional[RootOfUnity] = None
    al_sign: Optional[int] = None
    # minimal-core bookkeeping for non-minimal representations
    min_conductor: Optional[int] = None
    twist: Optional[TwistDescriptor] = None
    induction: Optional[CompactInductionData] = None

    def __post_init__(self):
        if self.conductor < 0:
            raise ClassificationError("negative conductor")
        if self.kind is Kind.STEINBERG_TWIST and self.minimal:
            if self.conductor != 1:
                raise ClassificationError(
                    "a minimal Steinberg twist has conductor 1"
                )
        if (
            self.kind is Kind.PRINCIPAL_SERIES
            and self.minimal
            and self.conductor != self.central_char.conductor_exponent
        ):
            # a minimal ramified principal series has one unramified factor,
            # so its conductor equals the central-character conductor
            raise ClassificationError(
                "minimal principal series conductor must match its "
                "central-character conductor"
            )
        if self.kind is Kind.SUPERCUSPIDAL and self.minimal:
            if self.central_char.conductor_exponent >= max(self.conductor, 1):
                raise ClassificationError(
                    "a minimal supercuspidal has central-character conductor "
                    "strictly below its conductor"
                )
        if self.al_sign is not None:
            if not self.central_char.is_trivial or self.conductor < 1:
                raise ClassificationError(
                    "new-vector sign needs trivial central character and "
                    "positive conductor"
                )
        if (
            self.al_sign is not None
            and self.kind is Kind.STEINBERG_TWIST
            and self.minimal
            and self.steinberg_twist is not None
        ):
            s = self.steinberg_twist.as_sign()
            if s is not None and self.al_sign != -s:
                raise ClassificationError(
                    "the new-vector sign of St(x)chi is the negative of "
                    "chi at the uniformizer"
                )

    @property
    def min_cond(self) -> int:
        return self.conductor if self.minimal else self.min_conductor

    @property
    def is_discrete_series(self) -> bool:
        return self.kind in (Kind.STEINBERG_TWIST, Kind.SUPERCUSPIDAL)

    @property
    def is_unramified_ps(self) -> bool:
        return self.kind is Kind.PRINCIPAL_SERIES and self.conductor == 0


def classify_from_newform_local(
    p: int,
    level_exponent: int,
    central_char_local: DirichletLocal,
    a_p: Optional[RootOfUnity],
    is_minimal: bool,
    minimal_twist_level_exponent: Optional[int] = None,
    al_sign: Optional[int] = None,
    twist: Optional[TwistDescriptor] = None,
    induction: Optional[CompactInductionData] = None,
    minimal_twist_kind: Optional[Kind] = None,
) -> LocalGL2Rep:
    """Classify the local component of a weight-2 newform at p.

    `level_exponent` is ord_p of the newform level, `central_char_local` the
    local nebentypus data, `a_p` the p-th coefficient as an exact
    root-of-unity token when it is one (only consulted for conductor-1
    components, where chi(p) = a_p identifies the Steinberg twist),
    `minimal_twist_level_exponent` is ord_p of the level of the minimal
    twist when the form is not minimal at p.
    """
    n = level_exponent
    omega = central_char_local
    if omega.conductor_exponent > max(n, 0):
        raise ClassificationError(
            "central-character conductor cannot exceed the conductor"
        )
    if n == 0:
        if not omega.is_unramified:
            raise ClassificationError(
                "an unramified representation has unramified central character"
            )
        return LocalGL2Rep(
            p, 0, omega, Kind.PRINCIPAL_SERIES, minimal=True
        )
    if n == 1:
        if not omega.is_unramified:
            # conductor matching the central-character conductor: a
            # ramified principal series with one unramified factor
            return LocalGL2Rep(
                p, 1, omega, Kind.PRINCIPAL_SERIES, minimal=True
            )
        if a_p is None:
            raise ClassificationError(
                "conductor 1 needs the coefficient a_p to identify the "
                "Steinberg twist"
            )
        sign = a_p.as_sign()
        computed_al = -sign if (sign is not None and omega.is_trivial) else None
        return LocalGL2Rep(
            p,
            1,
            omega,
            Kind.STEINBERG_TWIST,
            minimal=True,
            steinberg_twist=a_p,
            al_sign=al_sign if al_sign is not None else computed_al,
        )
    # conductor >= 2
    if is_minimal or minimal_twist_level_exponent is None:
        if omega.conductor_exponent == n:
            kind = Kind.PRINCIPAL_SERIES
        else:
            kind = Kind.SUPERCUSPIDAL
        return LocalGL2Rep(
            p,
            n,
            omega,
            kind,
            minimal=True,
            al_sign=al_sign,
            induction=induction,
        )
    # non-minimal: the kind is the kind of the minimal twist (twisting by a
    # character never changes the kind)
    m = minimal_twist_level_exponent
    if m >= n:
        raise ClassificationError(
            "a minimal twist must have strictly smaller conductor"
        )
    if minimal_twist_kind is not None:
        kind = minimal_twist_kind
    elif m == 0:
        kind = Kind.PRINCIPAL_SERIES
    elif m == 1:
        kind = Kind.STEINBERG_TWIST
    else:
        kind = Kind.SUPERCUSPIDAL
    return LocalGL2Rep(
        p,
        n,
        omega,
        kind,
        minimal=False,
        min_conductor=m,
        twist=twist,
        al_sign=al_sign,
        induction=induction,
        # for a twisted Steinberg the unramified part of the twisting
        # character is the minimal twist's coefficient
        steinberg_twist=a_p if kind is Kind.STEINBERG_TWIST else None,
    )


def dim_gamma0_invariants(rep: LocalGL2Rep, m: int) -> int:
    """Dimension of the invariants under the standard congruence subgroup of
    depth m (new-vector theory); needs unramified central character."""
    if not rep.central_char.is_unramified:
        raise UnsupportedCaseError(
            "invariant dimensions for ramified central characters are out "
            "of scope; use the depth-1 congruence filtration instead"
        )
    return max(m - rep.conductor + 1, 0)


def gamma_full_invariants_nonzero(rep: LocalGL2Rep, n: int) -> bool:
    """Whether the full depth-n congruence subgroup has nonzero invariants."""
    if (
        rep.kind is Kind.PRINCIPAL_SERIES
        and not rep.central_char.is_trivial
    ):
        raise UnsupportedCaseError(
            "principal series with nontrivial central character unsupported"
        )
    return rep.conductor <= 2 * n


@dataclass(frozen=True)
class ALProfile:
    plus_nonzero: bool
    minus_nonzero: bool


def al_eigenspace_profile(rep: LocalGL2Rep, m: int) -> ALProfile:
    """Eigenspace profile of the depth-m Atkin-Lehner involution on the
    depth-m invariants: at m = conductor only the new-vector sign survives;
    above the conductor both eigenspaces are nonzero."""
    if not rep.central_char.is_trivial:
        raise UnsupportedCaseError("needs trivial central character")
    if dim_gamma0_invariants(rep, m) <= 0:
        raise UnsupportedCaseError(
            "no invariants at this depth; the profile is empty"
        )
    if m == rep.conductor:
        if rep.al_sign is None:
            raise UnsupportedCaseError("new-vector sign unknown")
        return ALProfile(rep.al_sign == 1, rep.al_sign == -1)
    return ALProfile(True, True)


def quat_minimal_dim(q: int, conductor: int) -> int:
    """Dimension of a minimal irreducible of the division-algebra unit group
    with the given conductor (q = residue field size)."""
    c = conductor
    if c <= 1:
        return 1
    if c % 2 == 1:
        n = (c - 1) // 2
        return q ** (n - 1) * (q + 1)
    n = c // 2
    return 2 * q ** (n - 1)


@dataclass(frozen=True)
class LocalQuatRep:
    """Finite-dimensional irreducible of the local division quaternion
    algebra's unit group, as transferred newform data."""

    prime: int
    dim: int
    conductor: int
    central_char: DirichletLocal
    # minimal-core data: the core conductor and the twist character linking
    # this representation to its minimal twist (trivial twist if minimal)
    core_conductor: int = 0
    twist: Optional[TwistDescriptor] = None
    # character-table position when the quotient is small enough to resolve:
    # (group kind tag, row label), else None
    char_row: Optional[tuple[str, str]] = None
    # for 1-dimensionals chi o nrd: the value chi(p) (the action of the
    # uniformizer, which generates the order-2 component group)
    unit_value: Optional[RootOfUnity] = None

    def __post_init__(self):
        if self.dim == 1 and self.conductor > 2:
            raise ClassificationError("1-dimensionals have conductor <= 2")
        if self.dim > 1 and self.conductor <= 1:
            raise ClassificationError("conductor <= 1 forces dimension 1")


def jacquet_langlands(rep: LocalGL2Rep) -> LocalQuatRep:
    """Transfer a discrete series to the division side.

    Conductor and central character are preserved. Steinberg twists map to
    one-dimensionals chi o nrd; minimal supercuspidals of conductor c map to
    irreducibles of dimension q^(n-1)(q+1) (c = 2n+1 odd) or 2q^(n-1)
    (c = 2n even) of the quotient by the depth-(c-1) principal units.
    """
    if not rep.is_discrete_series:
        raise UnsupportedCaseError(
            "only discrete series transfer; principal series have no "
            "division-side counterpart"
        )
    p = rep.prime
    if rep.kind is Kind.STEINBERG_TWIST:
        if rep.minimal:
            # St (x) chi, chi unramified: 1-dimensional chi o nrd
            return LocalQuatRep(
                p,
                1,
                rep.conductor,
                rep.central_char,
                core_conductor=1,
                char_row=("unramified-character", "chi-nrd"),
                unit_value=rep.steinberg_twist,
            )
        # ramified twist of St: 1-dimensional, conductor 2 cond(chi)
        return LocalQuatRep(
            p,
            1,
            rep.conductor,
            rep.central_char,
            core_conductor=1,
            twist=rep.twist,
            char_row=("ramified-character", rep.twist.token if rep.twist else "?"),
            unit_value=rep.steinberg_twist,
        )
    # supercuspidal
    core = rep.min_cond
    dim = quat_minimal_dim(p, core)
    char_row = None
    if core == 2:
        # the dihedral quotient has a unique 2-dimensional irreducible for
        # q in {2, 3}; for larger q the row is ambiguous without extra data
        if p in (2, 3):
            char_row = (f"dihedral-{p}", "W2")
    elif core == 3 and p == 2 and rep.al_sign is not None and rep.minimal:
        # the two 3-dimensionals of the second-layer quotient are separated
        # by the trace of the uniformizer, which is minus the new-vector sign
        char_row = ("cqext-2", "V3+" if rep.al_sign == 1 else "V3-")
    return LocalQuatRep(
        p,
        dim,
        rep.conductor,
        rep.central_char,
        core_conductor=core,
        twist=rep.twist if not rep.minimal else None,
        char_row=char_row,
    )
