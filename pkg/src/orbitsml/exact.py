"""Exact arithmetic over Q and simple number fields Q(theta).

Sparse multivariate polynomials over field elements, polynomial-map
composition, Jacobians and determinants.  Everything here is the symbolic
ground truth the p-adic side is checked against, so all checks are exact
(no probabilistic identity testing).

Rationals are ``fractions.Fraction``; a number field element is a
coordinate vector over the power basis 1, theta, ..., theta^(d-1) where
theta is a root of a monic integer minimal polynomial.  Degree 1 means the
field is Q itself.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import (
    ArityMismatch,
    IrreducibilityUncertain,
    NonConstantJacobian,
    NotInverse,
    ZeroJacobian,
)

__all__ = [
    "NumberField",
    "AlgNum",
    "MultiPoly",
    "PolyMap",
    "AutomorphismCert",
    "QQ",
    "poly_compose",
    "jacobian",
    "det_polymatrix",
    "validate_automorphism",
    "evaluate_map",
]


# ---------------------------------------------------------------------------
# univariate helpers over F_ell, used only by the irreducibility screen


def _fp_trim(f, ell):
    f = [c % ell for c in f]
    while f and f[-1] == 0:
        f.pop()
    return f


def _fp_mulmod(a, b, f, ell):
    # a*b reduced mod the monic polynomial f, over F_ell
    res = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                res[i + j] = (res[i + j] + ca * cb) % ell
    d = len(f) - 1
    for i in range(len(res) - 1, d - 1, -1):
        c = res[i]
        if c:
            res[i] = 0
            for j in range(d):
                res[i - d + j] = (res[i - d + j] - c * f[j]) % ell
    return _fp_trim(res, ell)


def _fp_powmod(base, e, f, ell):
    result = [1]
    while e:
        if e & 1:
            result = _fp_mulmod(result, base, f, ell)
        base = _fp_mulmod(base, base, f, ell)
        e >>= 1
    return result


def _fp_rem(a, b, ell):
    """Remainder of a mod b over F_ell (b nonzero, trimmed)."""
    r = _fp_trim(a, ell)
    inv = pow(b[-1], -1, ell)
    while len(r) >= len(b):
        lead = r[-1] * inv % ell
        shift = len(r) - len(b)
        for j, c in enumerate(b):
            r[shift + j] = (r[shift + j] - lead * c) % ell
        r = _fp_trim(r, ell)
    return r


def _fp_gcd(a, b, ell):
    a, b = _fp_trim(a, ell), _fp_trim(b, ell)
    while b:
        a, b = b, _fp_rem(a, b, ell)
    return a


def _fp_sub_x(poly, ell):
    """poly - x over F_ell."""
    out = list(poly) + [0] * max(0, 2 - len(poly))
    out[1] = (out[1] - 1) % ell
    return _fp_trim(out, ell)


def _irreducible_mod(fcoeffs, ell) -> bool:
    """Rabin test: monic f of degree d is irreducible over F_ell iff
    x^(ell^d) = x mod f and gcd(x^(ell^(d/r)) - x, f) = 1 for primes r | d."""
    f = [c % ell for c in fcoeffs]
    d = len(f) - 1
    if f[-1] == 0:
        return False
    x = [0, 1]
    if _fp_sub_x(_fp_powmod(x, ell ** d, f, ell), ell):
        return False
    dd = d
    prime_divs = []
    r = 2
    while r * r <= dd:
        if dd % r == 0:
            prime_divs.append(r)
            while dd % r == 0:
                dd //= r
        r += 1
    if dd > 1:
        prime_divs.append(dd)
    for r in prime_divs:
        diff = _fp_sub_x(_fp_powmod(x, ell ** (d // r), f, ell), ell)
        g = _fp_gcd(f, diff, ell)
        if len(g) > 1:
            return False
    return True


def _small_primes(bound):
    sieve = [True] * bound
    sieve[0:2] = [False, False]
    for i in range(2, int(bound ** 0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = [False] * len(sieve[i * i :: i])
    return [i for i, b in enumerate(sieve) if b]


def _check_irreducible(coeffs):
    """Rational-root and modular screen; rejects when inconclusive."""
    d = len(coeffs) - 1
    if d == 1:
        return
    if coeffs[0] == 0:
        raise IrreducibilityUncertain("minimal polynomial divisible by x")
    for ell in _small_primes(200):
        if _irreducible_mod(coeffs, ell):
            return
    if d <= 3:
        # no linear factor over Q  <=>  irreducible, for degrees 2 and 3;
        # rational roots of a monic integer poly are integer divisors of c0
        c0 = abs(coeffs[0])
        if c0 <= 10 ** 12:
            divs = set()
            i = 1
            while i * i <= c0:
                if c0 % i == 0:
                    divs.update((i, c0 // i))
                i += 1
            for r in sorted(divs):
                for root in (r, -r):
                    if sum(c * root ** k for k, c in enumerate(coeffs)) == 0:
                        raise IrreducibilityUncertain(
                            f"minimal polynomial has rational root {root}"
                        )
            return
    raise IrreducibilityUncertain(
        "irreducibility screen inconclusive for the given minimal polynomial; "
        "refusing to construct an unsound field"
    )


def _sylvester_resultant(f, g):
    """Resultant of integer polynomials via Sylvester matrix over Q."""
    m, n = len(f) - 1, len(g) - 1
    size = m + n
    rows = []
    for i in range(n):
        row = [Fraction(0)] * size
        for j, c in enumerate(reversed(f)):
            row[i + j] = Fraction(c)
        rows.append(row)
    for i in range(m):
        row = [Fraction(0)] * size
        for j, c in enumerate(reversed(g)):
            row[i + j] = Fraction(c)
        rows.append(row)
    # fraction-exact Gaussian elimination
    det = Fraction(1)
    for col in range(size):
        piv = next((r for r in range(col, size) if rows[r][col] != 0), None)
        if piv is None:
            return 0
        if piv != col:
            rows[col], rows[piv] = rows[piv], rows[col]
            det = -det
        det *= rows[col][col]
        inv = 1 / rows[col][col]
        for r in range(col + 1, size):
            if rows[r][col] != 0:
                factor = rows[r][col] * inv
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[col])]
    return det


@dataclass(frozen=True)
class NumberField:
    """Q(theta) by a monic integer minimal polynomial (ascending coeffs)."""

    minpoly: tuple
    discriminant: int

    @classmethod
    def create(cls, minpoly) -> "NumberField":
        coeffs = tuple(int(c) for c in minpoly)
        if len(coeffs) < 2:
            raise ValueError("minimal polynomial must have degree >= 1")
        if coeffs[-1] != 1:
            raise ValueError("minimal polynomial must be monic")
        _check_irreducible(coeffs)
        d = len(coeffs) - 1
        if d == 1:
            disc = 1
        else:
            deriv = [i * c for i, c in enumerate(coeffs)][1:]
            res = _sylvester_resultant(list(coeffs), deriv)
            sign = -1 if (d * (d - 1) // 2) % 2 else 1
            disc = sign * res
            if disc.denominator != 1:
                raise ValueError("discriminant of a monic integer poly is integral")
            disc = int(disc)
            if disc == 0:
                raise ValueError("zero discriminant: minimal polynomial not squarefree")
        return cls(coeffs, disc)

    @property
    def degree(self) -> int:
        return len(self.minpoly) - 1

    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    def zero(self) -> "AlgNum":
        return AlgNum(self, (Fraction(0),) * self.degree)

    def one(self) -> "AlgNum":
        return AlgNum(self, (Fraction(1),) + (Fraction(0),) * (self.degree - 1))

    def from_rational(self, r) -> "AlgNum":
        return AlgNum(
            self, (Fraction(r),) + (Fraction(0),) * (self.degree - 1)
        )

    def generator(self) -> "AlgNum":
        if self.degree == 1:
            # theta is the root of the degree-1 minpoly c0 + x
            return self.from_rational(-self.minpoly[0])
        coords = [Fraction(0)] * self.degree
        coords[1] = Fraction(1)
        return AlgNum(self, tuple(coords))

    def element(self, coords) -> "AlgNum":
        coords = tuple(Fraction(c) for c in coords)
        if len(coords) != self.degree:
            raise ValueError(
                f"expected {self.degree} coordinates, got {len(coords)}"
            )
        return AlgNum(self, coords)


QQ = NumberField.create((0, 1))


@lru_cache(maxsize=None)
def _reduction_rows(field: NumberField):
    """Coordinates of theta^d .. theta^(2d-2) over the power basis."""
    d = field.degree
    rows = []
    # theta^d = -(c_0 + c_1 theta + ... + c_{d-1} theta^{d-1})
    current = [Fraction(-c) for c in field.minpoly[:-1]]
    rows.append(tuple(current))
    for _ in range(d - 2):
        shifted = [Fraction(0)] + current[:-1]
        top = current[-1]
        if top:
            shifted = [
                s - top * Fraction(c) for s, c in zip(shifted, field.minpoly[:-1])
            ]
        current = shifted
        rows.append(tuple(current))
    return rows


@dataclass(frozen=True)
class AlgNum:
    """Element of Q(theta) as a vector over the power basis."""

    field: NumberField
    coords: tuple

    def __post_init__(self):
        if len(self.coords) != self.field.degree:
            raise ValueError("coordinate vector has wrong length")

    def __bool__(self) -> bool:
        return any(self.coords)

    def is_one(self) -> bool:
        return self.coords[0] == 1 and not any(self.coords[1:])

    def _check(self, other: "AlgNum"):
        if self.field != other.field:
            raise ValueError("mixed number fields")

    def __add__(self, other: "AlgNum") -> "AlgNum":
        self._check(other)
        return AlgNum(
            self.field, tuple(a + b for a, b in zip(self.coords, other.coords))
        )

    def __sub__(self, other: "AlgNum") -> "AlgNum":
        self._check(other)
        return AlgNum(
            self.field, tuple(a - b for a, b in zip(self.coords, other.coords))
        )

    def __neg__(self) -> "AlgNum":
        return AlgNum(self.field, tuple(-a for a in self.coords))

    def __mul__(self, other) -> "AlgNum":
        if isinstance(other, (int, Fraction)):
            return AlgNum(self.field, tuple(a * other for a in self.coords))
        self._check(other)
        d = self.field.degree
        if d == 1:
            return AlgNum(self.field, (self.coords[0] * other.coords[0],))
        conv = [Fraction(0)] * (2 * d - 1)
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(other.coords):
                    if b:
                        conv[i + j] += a * b
        out = conv[:d]
        rows = _reduction_rows(self.field)
        for k in range(d, 2 * d - 1):
            c = conv[k]
            if c:
                row = rows[k - d]
                for i in range(d):
                    if row[i]:
                        out[i] += c * row[i]
        return AlgNum(self.field, tuple(out))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "AlgNum":
        if e < 0:
            raise ValueError("negative powers of field elements unsupported")
        result = self.field.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def as_rational(self) -> Fraction:
        if any(self.coords[1:]):
            raise ValueError("element is not rational")
        return self.coords[0]

    def __repr__(self):
        if self.field.degree == 1:
            return str(self.coords[0])
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


# ---------------------------------------------------------------------------
# sparse multivariate polynomials


class MultiPoly:
    """Sparse polynomial: exponent tuple -> nonzero coefficient.

    Coefficients may be AlgNum, Fraction, or p-adic residues; the class only
    relies on +, *, unary - and truthiness.  Zero coefficients are never
    stored, so dict equality is canonical equality.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        self.terms = {}
        if terms:
            for exps, coeff in terms.items():
                if len(exps) != nvars:
                    raise ArityMismatch("exponent vector of wrong length")
                if coeff:
                    self.terms[tuple(exps)] = coeff

    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, coeff) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: coeff})

    @classmethod
    def variable(cls, nvars: int, i: int, one) -> "MultiPoly":
        exps = [0] * nvars
        exps[i] = 1
        return cls(nvars, {tuple(exps): one})

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * self.nvars)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def __eq__(self, other):
        return (
            isinstance(other, MultiPoly)
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __hash__(self):
        raise TypeError("MultiPoly is mutable-ish; not hashable")

    def _check(self, other: "MultiPoly"):
        if self.nvars != other.nvars:
            raise ArityMismatch("polynomials in different variable counts")

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            if e in out:
                s = out[e] + c
                if s:
                    out[e] = s
                else:
                    del out[e]
            else:
                out[e] = c
        r = MultiPoly(self.nvars)
        r.terms = out
        return r

    def __neg__(self) -> "MultiPoly":
        r = MultiPoly(self.nvars)
        r.terms = {e: -c for e, c in self.terms.items()}
        return r

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self + (-other)

    def __mul__(self, other: "MultiPoly") -> "MultiPoly":
        self._check(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = c1 * c2
                if e in out:
                    s = out[e] + c
                    if s:
                        out[e] = s
                    else:
                        del out[e]
                elif c:
                    out[e] = c
        r = MultiPoly(self.nvars)
        r.terms = out
        return r

    def scaled(self, k) -> "MultiPoly":
        """Multiply every coefficient by the scalar k (an int)."""
        r = MultiPoly(self.nvars)
        if k:
            r.terms = {e: c * k for e, c in self.terms.items()}
        return r

    def __pow__(self, e: int) -> "MultiPoly":
        if e < 0:
            raise ValueError("negative polynomial power")
        if not self.terms:
            if e == 0:
                raise ValueError("0**0 of a polynomial with unknown one")
            return MultiPoly.zero(self.nvars)
        # square-and-multiply; seed from self to avoid needing an explicit one
        result = None
        base = self
        while e:
            if e & 1:
                result = base if result is None else result * base
            e >>= 1
            if e:
                base = base * base
        if result is None:
            raise ValueError("power 0 needs an explicit one; use constant()")
        return result

    def partial(self, i: int) -> "MultiPoly":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                k = ne[i]
                ne[i] -= 1
                nc = c * k
                ne = tuple(ne)
                if ne in out:
                    s = out[ne] + nc
                    if s:
                        out[ne] = s
                    else:
                        del out[ne]
                elif nc:
                    out[ne] = nc
        r = MultiPoly(self.nvars)
        r.terms = out
        return r

    def evaluate(self, point):
        """Evaluate at a point of ring elements; None when poly is zero."""
        if len(point) != self.nvars:
            raise ArityMismatch("point of wrong dimension")
        maxe = [0] * self.nvars
        for e in self.terms:
            for i, k in enumerate(e):
                if k > maxe[i]:
                    maxe[i] = k
        powers = []
        for i, m in enumerate(maxe):
            col = [None] * (m + 1)
            if m >= 1:
                col[1] = point[i]
                for k in range(2, m + 1):
                    col[k] = col[k - 1] * point[i]
            powers.append(col)
        acc = None
        for e, c in self.terms.items():
            term = c
            for i, k in enumerate(e):
                if k:
                    term = term * powers[i][k]
            acc = term if acc is None else acc + term
        return acc

    def substitute(self, maps) -> "MultiPoly":
        """Compose with polynomial arguments: self(maps[0], ..., maps[n-1])."""
        if len(maps) != self.nvars:
            raise ArityMismatch("substitution arity mismatch")
        nv = maps[0].nvars
        maxe = [0] * self.nvars
        for e in self.terms:
            for i, k in enumerate(e):
                if k > maxe[i]:
                    maxe[i] = k
        powers = []
        for i, m in enumerate(maxe):
            col = [None] * (m + 1)
            if m >= 1:
                col[1] = maps[i]
                for k in range(2, m + 1):
                    col[k] = col[k - 1] * maps[i]
            powers.append(col)
        acc = MultiPoly.zero(nv)
        for e, c in self.terms.items():
            term = MultiPoly.constant(nv, c)
            for i, k in enumerate(e):
                if k:
                    term = term * powers[i][k]
            acc = acc + term
        return acc

    def map_coeffs(self, fn) -> "MultiPoly":
        r = MultiPoly(self.nvars)
        for e, c in self.terms.items():
            nc = fn(c)
            if nc:
                r.terms[e] = nc
        return r

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            mono = "*".join(
                f"x{i}^{k}" if k > 1 else f"x{i}"
                for i, k in enumerate(e)
                if k
            )
            c = self.terms[e]
            parts.append(f"({c}){'*' + mono if mono else ''}")
        return " + ".join(parts)


@dataclass(frozen=True)
class PolyMap:
    """Polynomial self-map of affine n-space: one component per coordinate."""

    nvars: int
    components: tuple

    def __post_init__(self):
        if len(self.components) != self.nvars:
            raise ArityMismatch("a self-map needs nvars components")
        for c in self.components:
            if c.nvars != self.nvars:
                raise ArityMismatch("component in wrong variable count")

    @classmethod
    def identity(cls, nvars: int, one) -> "PolyMap":
        return cls(
            nvars,
            tuple(MultiPoly.variable(nvars, i, one) for i in range(nvars)),
        )

    def is_identity(self) -> bool:
        for i, comp in enumerate(self.components):
            if len(comp.terms) != 1:
                return False
            (e, c), = comp.terms.items()
            if sum(e) != 1 or e[i] != 1:
                return False
            if hasattr(c, "is_one"):
                if not c.is_one():
                    return False
            elif c != 1:
                return False
        return True

    def evaluate(self, point):
        return tuple(
            comp.evaluate(point) if comp.terms else None
            for comp in self.components
        )


def poly_compose(outer: PolyMap, inner: PolyMap) -> PolyMap:
    """outer(inner(x)) as an exact polynomial identity."""
    if outer.nvars != inner.nvars:
        raise ArityMismatch("composition of maps with different arities")
    return PolyMap(
        outer.nvars,
        tuple(comp.substitute(inner.components) for comp in outer.components),
    )


def jacobian(pmap: PolyMap):
    """Matrix of partials: entry (i, l) = d(component i)/d(x_l)."""
    return [
        [comp.partial(l) for l in range(pmap.nvars)]
        for comp in pmap.components
    ]


def det_polymatrix(mat) -> MultiPoly:
    """Exact determinant of a square matrix of polynomials by cofactors."""
    n = len(mat)
    for row in mat:
        if len(row) != n:
            raise ArityMismatch("determinant of a non-square matrix")
    nv = mat[0][0].nvars

    def _det(rows, cols):
        if len(cols) == 1:
            return mat[rows[0]][cols[0]]
        # expand along the row with the fewest nonzero entries
        best, best_count = None, None
        for ri, r in enumerate(rows):
            count = sum(1 for c in cols if mat[r][c].terms)
            if best_count is None or count < best_count:
                best, best_count = ri, count
        ri = best
        r = rows[ri]
        sub_rows = rows[:ri] + rows[ri + 1 :]
        acc = MultiPoly.zero(nv)
        for ci, c in enumerate(cols):
            entry = mat[r][c]
            if not entry.terms:
                continue
            sub_cols = cols[:ci] + cols[ci + 1 :]
            minor = _det(sub_rows, sub_cols)
            term = entry * minor
            if (ri + ci) % 2:
                term = -term
            acc = acc + term
        return acc

    return _det(list(range(n)), list(range(n)))


def _constant_of(poly: MultiPoly):
    """The constant value of a constant polynomial, or errors."""
    if poly.is_zero():
        raise ZeroJacobian("Jacobian determinant is zero")
    if not poly.is_constant():
        raise NonConstantJacobian(
            "Jacobian determinant is not a constant polynomial"
        )
    return poly.constant_term()


@dataclass(frozen=True)
class AutomorphismCert:
    """Verified automorphism pair with its constant Jacobian determinant."""

    forward: PolyMap
    inverse: PolyMap
    jac_det: AlgNum


def validate_automorphism(forward: PolyMap, inverse: PolyMap) -> AutomorphismCert:
    """Check both composition identities exactly and extract the Jacobian.

    Fails with NotInverse when either composition differs from the identity,
    and with NonConstantJacobian / ZeroJacobian on a bad determinant (which
    cannot happen for a genuine automorphism pair; the checks are defensive).
    """
    if forward.nvars != inverse.nvars:
        raise ArityMismatch("forward and inverse have different arities")
    if not poly_compose(forward, inverse).is_identity():
        raise NotInverse("forward(inverse(x)) != x")
    if not poly_compose(inverse, forward).is_identity():
        raise NotInverse("inverse(forward(x)) != x")
    det = det_polymatrix(jacobian(forward))
    return AutomorphismCert(forward, inverse, _constant_of(det))


def evaluate_map(pmap: PolyMap, point):
    """Exact evaluation; zero components evaluate to the zero of the field."""
    vals = pmap.evaluate(point)
    out = []
    for v in vals:
        if v is None:
            # component is the zero polynomial: reuse the point's zero
            sample = point[0]
            out.append(sample - sample)
        else:
            out.append(v)
    return tuple(out)
