"""shimtril: deciding vanishing of diagonal-invariant trilinear forms on
quaternionic Shimura curves over Q, from newform data and local
epsilon-factor criteria, with effective finiteness bounds."""

from .chars import DirichletChar, RootOfUnity
from .classifier import (
    ClassificationTable,
    GoodnessEngine,
    GoodnessKind,
    GoodnessResult,
    classify_modular_curves,
    classify_quaternionic,
    hyperelliptic_shortcut,
)
from .curves import (
    CurveSpec,
    Flavor,
    al_quotient_genus_zero,
    appearing_reps,
    genus,
    goodness_precheck_sign_tables,
)
from .lmfdb import FixtureSource, LmfdbClient, NewformRecord
from .reptheory import (
    DirichletLocal,
    Kind,
    LocalGL2Rep,
    LocalQuatRep,
    classify_from_newform_local,
    jacquet_langlands,
)
from .trilinear import LocalTriple, Outcome, Side, Verdict, epsilon_division, epsilon_split

__version__ = "0.1.0"

__all__ = [
    "ClassificationTable",
    "CurveSpec",
    "DirichletChar",
    "DirichletLocal",
    "Flavor",
    "FixtureSource",
    "GoodnessEngine",
    "GoodnessKind",
    "GoodnessResult",
    "Kind",
    "LmfdbClient",
    "LocalGL2Rep",
    "LocalQuatRep",
    "LocalTriple",
    "NewformRecord",
    "Outcome",
    "RootOfUnity",
    "Side",
    "Verdict",
    "al_quotient_genus_zero",
    "appearing_reps",
    "classify_from_newform_local",
    "classify_modular_curves",
    "classify_quaternionic",
    "epsilon_division",
    "epsilon_split",
    "genus",
    "goodness_precheck_sign_tables",
    "hyperelliptic_shortcut",
    "jacquet_langlands",
]
