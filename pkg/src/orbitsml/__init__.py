"""Certified progression structure of automorphism orbits meeting varieties.

Given a polynomial automorphism sigma of affine n-space over Q or a number
field, a point q, and a subvariety X, `decide` returns the set
{m in Z : sigma^m(q) in X} as complete doubly-infinite arithmetic
progressions plus a finite sporadic set, together with the certificates
(prime, embedding, period, per-class zero analyses) needed to re-verify
the answer.  `orbitsml.sml` exposes the classical linear-recurrence
front-end.
"""

from .decide import (
    ProblemInstance,
    ProgressionSet,
    SolverConfig,
    decide,
    density_flag,
    normalize_progressions,
)
from .exact import (
    AlgNum,
    AutomorphismCert,
    MultiPoly,
    NumberField,
    PolyMap,
    QQ,
    validate_automorphism,
)
from .padic import PadicContext, PadicInt, ValBound, embed_rational, hensel_root, vp_factorial
from .sml import LinearRecurrence, RecurrenceZeroSet, zero_set_of_recurrence

__all__ = [
    "ProblemInstance",
    "ProgressionSet",
    "SolverConfig",
    "decide",
    "density_flag",
    "normalize_progressions",
    "AlgNum",
    "AutomorphismCert",
    "MultiPoly",
    "NumberField",
    "PolyMap",
    "QQ",
    "validate_automorphism",
    "PadicContext",
    "PadicInt",
    "ValBound",
    "embed_rational",
    "hensel_root",
    "vp_factorial",
    "LinearRecurrence",
    "RecurrenceZeroSet",
    "zero_set_of_recurrence",
]

__version__ = "0.1.0"
