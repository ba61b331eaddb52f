"""Classical Skolem-Mahler-Lech front-end for linear recurrences.

A recurrence f(n) = a_1 f(n-1) + ... + a_r f(n-r) with a_r != 0 becomes a
linear representation f(m) = v^T M^m w with the companion matrix M, the
initial-state vector w and the first-coordinate selector v.  The zero set
of f is then the set of m with sigma^m(w) on the hyperplane x_0 = 0, where
sigma is multiplication by M, and the main pipeline decides it.

Recurrences with a_r = 0 are handled by stripping trailing zero
coefficients: the stripped recurrence (order r') governs f from index
r - r' on, the finite initial segment is checked directly, and the m >= 0
answer records any initial-segment members of a full class whose value is
nonzero as explicit exclusions.

Recurrences report over m >= 0; the doubly-infinite certificate from the
pipeline is retained unrestricted.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .decide import ProblemInstance, ProgressionSet, SolverConfig, decide
from .errors import DegenerateRecurrence
from .exact import QQ, MultiPoly, PolyMap

__all__ = [
    "LinearRecurrence",
    "LinearRep",
    "RecurrenceZeroSet",
    "recurrence_to_linear_rep",
    "linear_rep_to_coeffs",
    "zero_set_of_recurrence",
    "companion_automorphism",
]


@dataclass(frozen=True)
class LinearRecurrence:
    """f(n) = sum_{t=1}^{r} a_t f(n-t) with initial values f(0)..f(r-1)."""

    coefficients: tuple  # a_1 .. a_r
    initial: tuple       # f(0) .. f(r-1)

    def __post_init__(self):
        if len(self.coefficients) < 1:
            raise ValueError("recurrence needs order >= 1")
        if len(self.initial) != len(self.coefficients):
            raise ValueError("need exactly r initial values")

    @property
    def order(self) -> int:
        return len(self.coefficients)

    def unroll(self, count: int):
        """First `count` values by direct recursion (test oracle)."""
        vals = list(self.initial[:count])
        while len(vals) < count:
            n = len(vals)
            vals.append(
                sum(
                    a * vals[n - t]
                    for t, a in enumerate(self.coefficients, start=1)
                )
            )
        return vals


@dataclass(frozen=True)
class LinearRep:
    """Coefficients as v^T M^i w plus a finite polynomial correction P."""

    M: tuple
    v: tuple
    w: tuple
    P: tuple  # P[i] corrects coefficient i; empty means P = 0


def _companion_matrix(coefficients):
    r = len(coefficients)
    rows = []
    for i in range(r - 1):
        row = [Fraction(0)] * r
        row[i + 1] = Fraction(1)
        rows.append(tuple(row))
    rows.append(tuple(Fraction(a) for a in reversed(coefficients)))
    return tuple(rows)


def recurrence_to_linear_rep(rec: LinearRecurrence) -> LinearRep:
    """Companion representation; the matrix is invertible iff a_r != 0."""
    if rec.coefficients[-1] == 0:
        raise DegenerateRecurrence(
            "trailing coefficient a_r = 0: companion matrix not invertible "
            "(zero_set_of_recurrence strips trailing zeros instead)"
        )
    r = rec.order
    v = tuple(Fraction(1) if i == 0 else Fraction(0) for i in range(r))
    w = tuple(Fraction(c) for c in rec.initial)
    return LinearRep(M=_companion_matrix(rec.coefficients), v=v, w=w, P=())


def linear_rep_to_coeffs(rep: LinearRep, count: int):
    """First `count` coefficients v^T M^i w (+P) by matrix-vector products."""
    r = len(rep.w)
    state = list(rep.w)
    out = []
    for i in range(count):
        c = sum(a * b for a, b in zip(rep.v, state))
        if i < len(rep.P):
            c += rep.P[i]
        out.append(c)
        state = [
            sum(rep.M[row][k] * state[k] for k in range(r)) for row in range(r)
        ]
    return out


def _fraction_matrix_inverse(mat):
    n = len(mat)
    aug = [
        [Fraction(x) for x in row]
        + [Fraction(1) if i == j else Fraction(0) for j in range(n)]
        for i, row in enumerate(mat)
    ]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise DegenerateRecurrence("companion matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def _matrix_polymap(mat) -> PolyMap:
    n = len(mat)
    comps = []
    for row in mat:
        terms = {}
        for k, c in enumerate(row):
            if c:
                e = [0] * n
                e[k] = 1
                terms[tuple(e)] = QQ.from_rational(c)
        comps.append(MultiPoly(n, terms))
    return PolyMap(n, tuple(comps))


def companion_automorphism(coefficients):
    """Companion map and its exact inverse as polynomial maps over Q."""
    M = _companion_matrix(coefficients)
    Minv = _fraction_matrix_inverse(M)
    return _matrix_polymap(M), _matrix_polymap(Minv)


@dataclass
class RecurrenceZeroSet:
    """Zero set of f over m >= 0.

    contains(m) = (m mod modulus in classes and m not in excluded) or m in
    sporadic.  `excluded` is nonempty only for stripped (degenerate)
    recurrences, where finitely many initial indices sit in a full class
    but carry a nonzero value.
    """

    modulus: int
    classes: frozenset
    sporadic: tuple
    excluded: tuple
    offset: int
    certificate: ProgressionSet | None

    def contains(self, m: int) -> bool:
        if m < 0:
            return False
        if m in self.sporadic:
            return True
        return (m % self.modulus) in self.classes and m not in self.excluded


def zero_set_of_recurrence(
    rec: LinearRecurrence, config: SolverConfig = SolverConfig()
) -> RecurrenceZeroSet:
    """Decide {m >= 0 : f(m) = 0} through the orbit pipeline."""
    coeffs = list(Fraction(a) for a in rec.coefficients)
    r = len(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    rp = len(coeffs)
    offset = r - rp
    head = [Fraction(x) for x in rec.unroll(r)]

    if rp == 0:
        # empty recurrence: f(n) = 0 for every n >= r
        sporadic = tuple(m for m in range(r) if head[m] == 0)
        # the full progression is modulus 1; initial nonzeros are excluded
        return RecurrenceZeroSet(
            modulus=1,
            classes=frozenset({0}),
            sporadic=(),
            excluded=tuple(m for m in range(r) if head[m] != 0),
            offset=r,
            certificate=None,
        )

    stripped = LinearRecurrence(tuple(coeffs), tuple(head[offset:r]))
    sigma, sigma_inv = companion_automorphism(stripped.coefficients)
    hyperplane = MultiPoly.variable(rp, 0, QQ.one())
    instance = ProblemInstance(
        field=QQ,
        n=rp,
        sigma=sigma,
        sigma_inv=sigma_inv,
        q=tuple(QQ.from_rational(c) for c in stripped.initial),
        variety=(hyperplane,),
        config=config,
    )
    ps = decide(instance)

    classes = frozenset((c + offset) % ps.modulus for c in ps.full_classes)
    sporadic = set(
        z + offset for z in ps.sporadic if z + offset >= 0
    )
    excluded = []
    for m in range(offset):
        iszero = head[m] == 0
        in_class = (m % ps.modulus) in classes
        if iszero and not in_class:
            sporadic.add(m)
        elif not iszero and in_class:
            excluded.append(m)
    return RecurrenceZeroSet(
        modulus=ps.modulus,
        classes=classes,
        sporadic=tuple(sorted(sporadic)),
        excluded=tuple(excluded),
        offset=offset,
        certificate=ps,
    )
