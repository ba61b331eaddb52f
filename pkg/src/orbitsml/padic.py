"""Truncated Z_p arithmetic with honest precision semantics.

A value is a residue mod p^N.  A residue of zero only certifies valuation
>= N; values proven zero by exact rational arithmetic upstream carry a
``known_exact_zero`` flag, and only those may report infinite valuation.
This distinction keeps downstream zero-count certificates sound.

The working prime must satisfy p >= 5.  For p = 2 the analytic-arc
construction provably fails: the sign flip H(x) = -x fixes 1 mod 2 and has
derivative -1 = 1 mod 2, yet no 2-adic analytic f can satisfy f(0) = 1 and
f(z+1) = H(f(z)) (f would equal 1 on the even integers, hence identically,
contradicting f(1) = -1).  For p = 3 no counterexample is known, but the
construction is only proven for p >= 5, so p = 3 is rejected as well.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    DenominatorNotUnit,
    NonUnitInverse,
    NotASimpleRoot,
    PrimeUnsupported,
)

__all__ = [
    "PadicContext",
    "PadicInt",
    "ValBound",
    "embed_rational",
    "hensel_root",
    "vp_factorial",
    "int_valuation",
    "is_prime",
]


def is_prime(n: int) -> bool:
    """Deterministic primality by trial division (primes here are small)."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def int_valuation(x: int, p: int) -> int:
    """v_p(x) for a nonzero integer x."""
    if x == 0:
        raise ValueError("valuation of 0 is unbounded; handle zero separately")
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def vp_factorial(k: int, p: int) -> int:
    """Exact valuation of k!: (k - digit sum of k base p) / (p - 1)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    s, n = 0, k
    while n:
        s += n % p
        n //= p
    return (k - s) // (p - 1)


@dataclass(frozen=True)
class PadicContext:
    """Working prime p >= 5 and precision exponent N >= 1."""

    p: int
    N: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise PrimeUnsupported(f"{self.p} is not prime")
        if self.p == 2:
            raise PrimeUnsupported(
                "p = 2 is unsupported: the orbit of 1 under the sign flip "
                "H(x) = -x satisfies both congruence hypotheses mod 2, yet no "
                "2-adic analytic function f has f(0) = 1 and f(z+1) = H(f(z)) "
                "(f = 1 on the even integers would force f identically 1, "
                "contradicting f(1) = -1); choose p >= 5"
            )
        if self.p == 3:
            raise PrimeUnsupported(
                "p = 3 is unsupported: the analytic-arc construction is only "
                "proven for p >= 5, and whether it can fail at p = 3 is an "
                "open question (no counterexample is known); choose p >= 5"
            )
        if self.N < 1:
            raise ValueError("precision exponent N must be >= 1")
        object.__setattr__(self, "modulus", self.p ** self.N)

    def zero(self, exact: bool = False) -> "PadicInt":
        return PadicInt(self, 0, known_exact_zero=exact)

    def one(self) -> "PadicInt":
        return PadicInt(self, 1)

    def from_int(self, x: int) -> "PadicInt":
        return PadicInt(self, x % self.modulus, known_exact_zero=(x == 0))


@dataclass(frozen=True)
class ValBound:
    """Valuation knowledge: Exact(v), AtLeast(N), or Infinite.

    AtLeast is what a zero residue justifies; Infinite is reserved for
    values known to be exactly zero.
    """

    kind: str  # "exact" | "at_least" | "infinite"
    v: int = 0

    @classmethod
    def exact(cls, v: int) -> "ValBound":
        if v < 0:
            raise ValueError("exact valuations are nonnegative here")
        return cls("exact", v)

    @classmethod
    def at_least(cls, n: int) -> "ValBound":
        return cls("at_least", n)

    @classmethod
    def infinite(cls) -> "ValBound":
        return cls("infinite")

    def meets(self, bound: int) -> bool:
        """Whether this knowledge certifies valuation >= bound."""
        if self.kind == "infinite":
            return True
        return self.v >= bound

    @property
    def is_exact(self) -> bool:
        return self.kind == "exact"

    def __repr__(self):
        if self.kind == "exact":
            return f"v={self.v}"
        if self.kind == "at_least":
            return f"v>={self.v}"
        return "v=inf"


@dataclass(frozen=True)
class PadicInt:
    """Residue mod p^N, plus a flag for values known exactly zero."""

    ctx: PadicContext
    residue: int
    known_exact_zero: bool = False

    def __post_init__(self):
        if not 0 <= self.residue < self.ctx.modulus:
            raise ValueError("residue out of range")
        if self.known_exact_zero and self.residue != 0:
            raise ValueError("known_exact_zero requires residue 0")

    def _check(self, other: "PadicInt"):
        if self.ctx != other.ctx:
            raise ValueError("mixed p-adic contexts")

    def __bool__(self) -> bool:
        return self.residue != 0

    def __add__(self, other: "PadicInt") -> "PadicInt":
        self._check(other)
        return PadicInt(
            self.ctx,
            (self.residue + other.residue) % self.ctx.modulus,
            self.known_exact_zero and other.known_exact_zero,
        )

    def __sub__(self, other: "PadicInt") -> "PadicInt":
        self._check(other)
        return PadicInt(
            self.ctx,
            (self.residue - other.residue) % self.ctx.modulus,
            self.known_exact_zero and other.known_exact_zero,
        )

    def __neg__(self) -> "PadicInt":
        return PadicInt(
            self.ctx, (-self.residue) % self.ctx.modulus, self.known_exact_zero
        )

    def __mul__(self, other) -> "PadicInt":
        if isinstance(other, int):
            return PadicInt(
                self.ctx,
                (self.residue * other) % self.ctx.modulus,
                self.known_exact_zero,
            )
        self._check(other)
        return PadicInt(
            self.ctx,
            (self.residue * other.residue) % self.ctx.modulus,
            self.known_exact_zero or other.known_exact_zero,
        )

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "PadicInt":
        if e < 0:
            return self.inverse() ** (-e)
        return PadicInt(
            self.ctx,
            pow(self.residue, e, self.ctx.modulus),
            self.known_exact_zero and e > 0,
        )

    def valuation(self) -> ValBound:
        if self.known_exact_zero:
            return ValBound.infinite()
        if self.residue == 0:
            return ValBound.at_least(self.ctx.N)
        return ValBound.exact(int_valuation(self.residue, self.ctx.p))

    def is_unit(self) -> bool:
        return self.residue % self.ctx.p != 0

    def inverse(self) -> "PadicInt":
        if not self.is_unit():
            raise NonUnitInverse(
                f"residue {self.residue} has positive valuation; no inverse mod "
                f"{self.ctx.p}^{self.ctx.N}"
            )
        return PadicInt(self.ctx, pow(self.residue, -1, self.ctx.modulus))

    def __repr__(self):
        tag = " (exact 0)" if self.known_exact_zero else ""
        return f"{self.residue} mod {self.ctx.p}^{self.ctx.N}{tag}"


def embed_rational(r, ctx: PadicContext) -> PadicInt:
    """Send a rational with unit denominator into Z/p^N.

    Raises DenominatorNotUnit when p divides the denominator, which tells
    the prime selector to reject this p.
    """
    r = Fraction(r)
    num, den = r.numerator, r.denominator
    if den % ctx.p == 0:
        raise DenominatorNotUnit(
            f"denominator {den} is divisible by p = {ctx.p}"
        )
    residue = num * pow(den, -1, ctx.modulus) % ctx.modulus
    return PadicInt(ctx, residue, known_exact_zero=(num == 0))


def _poly_eval_mod(coeffs, x: int, mod: int) -> int:
    """Horner evaluation of an integer polynomial (ascending coeffs) mod m."""
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % mod
    return acc


def hensel_root(coeffs, r0: int, ctx: PadicContext) -> PadicInt:
    """Lift a simple root of f mod p to a root mod p^N by Newton iteration.

    coeffs are the integer coefficients of f in ascending order.  Requires
    f(r0) = 0 mod p and f'(r0) != 0 mod p; the lift is then unique.
    """
    p = ctx.p
    deriv = [i * c for i, c in enumerate(coeffs)][1:]
    if _poly_eval_mod(coeffs, r0, p) != 0:
        raise NotASimpleRoot(f"f({r0}) != 0 mod {p}")
    if _poly_eval_mod(deriv, r0, p) == 0:
        raise NotASimpleRoot(f"f'({r0}) = 0 mod {p}: root is not simple")
    r = r0 % p
    prec = 1
    while prec < ctx.N:
        prec = min(2 * prec, ctx.N)
        mod = p ** prec
        fr = _poly_eval_mod(coeffs, r, mod)
        dr = _poly_eval_mod(deriv, r, mod)
        r = (r - fr * pow(dr, -1, mod)) % mod
    return PadicInt(ctx, r % ctx.modulus)
