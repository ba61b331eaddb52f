"""Analytic arcs in the Mahler (binomial) basis, with certified tails.

An orbit m -> tau^m(s) of a map satisfying the two period-certificate
congruences extends to a p-adic analytic function of m.  Continuous
functions on Z_p have unique Mahler expansions and the nonnegative integers
are dense in Z_p, so the Mahler coefficients of that function are exactly
the forward finite differences of the orbit values:

    b_k = sum_{t=0}^{k} (-1)^(k-t) C(k,t) v_t.

We therefore build the arc by an O(K^2) difference triangle instead of any
symbolic recursion, and import the construction's valuation conclusion

    v(b_k) >= ceil((k+1)/2)   for k >= 1

as a runtime certificate (certify_arc_valuations).  The same bound holds
for the composition of the arc with any polynomial with Z_p coefficients,
because such compositions stay inside the algebra where degree-(2i-1)
blocks carry p^i.  A violation means the hypotheses failed upstream and
aborts the whole pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

from .errors import PrecisionExhausted, ValuationBoundViolated
from .padic import PadicContext, PadicInt, int_valuation, vp_factorial

__all__ = [
    "MahlerSeries",
    "PowerSeriesTrunc",
    "ArcBundle",
    "mahler_from_values",
    "mahler_from_residues",
    "certify_arc_valuations",
    "mahler_to_power_series",
    "compose_with_poly",
    "evaluate_mahler",
    "arc_valuation_bound",
    "dump_mahler",
]


def arc_valuation_bound(k: int) -> int:
    """Certified lower bound on v(b_k) for k >= 1: ceil((k+1)/2)."""
    return (k + 2) // 2


@dataclass(frozen=True)
class MahlerSeries:
    """Truncated binomial-basis series b_0..b_K mod p^N.

    exact_zero[k] records that b_k is zero as an exact field element (known
    from exact upstream arithmetic), which is strictly stronger than the
    residue being zero.  tail_bound(k) is only available once the computed
    coefficients passed certification, since the tail estimate is inherited
    from the same construction that guarantees the computed range.
    """

    ctx: PadicContext
    residues: tuple
    exact_zero: tuple
    certified: bool = False

    @property
    def K(self) -> int:
        return len(self.residues) - 1

    def coeff(self, k: int) -> PadicInt:
        return PadicInt(self.ctx, self.residues[k], self.exact_zero[k])

    @property
    def coeffs(self):
        return tuple(self.coeff(k) for k in range(len(self.residues)))

    def tail_bound(self, k: int) -> int:
        if not self.certified:
            raise ValueError("tail bound requires certified valuations")
        return arc_valuation_bound(k)

    @property
    def all_zero_residues(self) -> bool:
        return all(r == 0 for r in self.residues)

    @property
    def all_exact_zero(self) -> bool:
        return all(self.exact_zero)


@dataclass(frozen=True)
class PowerSeriesTrunc:
    """Truncated power series with a certified tail valuation bound.

    Coefficients are residues known mod p^prec (prec <= N after the 1/k!
    division), and every uncomputed coefficient has valuation >= tail
    bound T.
    """

    ctx: PadicContext
    coeffs: tuple
    prec: int
    tail_valuation_bound: int

    @property
    def J(self) -> int:
        return len(self.coeffs) - 1


@dataclass(frozen=True)
class ArcBundle:
    """Per-coordinate arcs for one residue class of the orbit."""

    class_index: int
    period: int
    series: tuple


def mahler_from_residues(ctx: PadicContext, residues, exact_zero=None) -> MahlerSeries:
    """Forward-difference triangle on residues mod p^N.

    exact_zero flags of the input values propagate as a prefix: b_k is an
    exact zero when v_0..v_k are all exact zeros (the only exactness the
    difference formula preserves without exact values in hand).
    """
    mod = ctx.modulus
    arr = [v % mod for v in residues]
    coeffs = [arr[0]]
    work = arr
    for _ in range(len(arr) - 1):
        work = [(work[i + 1] - work[i]) % mod for i in range(len(work) - 1)]
        coeffs.append(work[0])
    if exact_zero is None:
        flags = (False,) * len(coeffs)
    else:
        flags = []
        running = True
        for f in exact_zero:
            running = running and f
            flags.append(running)
        flags = tuple(flags)
    return MahlerSeries(ctx, tuple(coeffs), flags)


def mahler_from_values(values) -> MahlerSeries:
    """Difference triangle on a sequence of PadicInt orbit values."""
    values = list(values)
    if not values:
        raise ValueError("need at least one value")
    ctx = values[0].ctx
    return mahler_from_residues(
        ctx,
        [v.residue for v in values],
        [v.known_exact_zero for v in values],
    )


def certify_arc_valuations(series: MahlerSeries) -> MahlerSeries:
    """Assert v(b_k) >= ceil((k+1)/2) for every computed k >= 1.

    Residue-zero coefficients pass (their valuation is at least N, and a
    nonzero true value of valuation below the bound would show in the
    residue).  A violation is a hard pipeline abort: it means the period
    certificate or the prime was wrong.
    """
    p = series.ctx.p
    for k in range(1, len(series.residues)):
        r = series.residues[k]
        if r == 0:
            continue
        need = arc_valuation_bound(k)
        got = int_valuation(r, p)
        if got < need:
            raise ValuationBoundViolated(k, got, need)
    return replace(series, certified=True)


# --- Stirling numbers of the first kind (signed), reduced per context -----

_stirling_cache: dict = {}


def _stirling_rows(ctx: PadicContext, K: int):
    """Rows s(k, .) mod p^N for k = 0..K, grown on demand per context."""
    key = (ctx.p, ctx.N)
    rows = _stirling_cache.get(key)
    if rows is None:
        rows = [[1]]
        _stirling_cache[key] = rows
    mod = ctx.modulus
    while len(rows) <= K:
        k = len(rows) - 1
        prev = rows[-1]
        nxt = [0] * (k + 2)
        for j in range(k + 2):
            acc = prev[j - 1] if j >= 1 else 0
            if j <= k:
                acc -= k * prev[j]
            nxt[j] = acc % mod
        rows.append(nxt)
    return rows


def _factorial_units(ctx: PadicContext, K: int):
    """(v_p(k!), unit part of k! mod p^N) for k = 0..K."""
    mod = ctx.modulus
    p = ctx.p
    out = [(0, 1)]
    mu, unit = 0, 1
    for k in range(1, K + 1):
        t = k
        while t % p == 0:
            t //= p
            mu += 1
        unit = unit * t % mod
        out.append((mu, unit))
    return out


def mahler_to_power_series(series: MahlerSeries, J: int | None = None) -> PowerSeriesTrunc:
    """Convert to the monomial basis via C(z,k) = (1/k!) sum_j s(k,j) z^j.

    Every coefficient of the result is known mod p^(N - v_p(K!)); the
    division by k! is exact on residues because the certified bound
    ceil((k+1)/2) dominates v_p(k!) for all k when p >= 5.  The tail bound
    for uncomputed coefficients is the closed form
    ceil((K+2)/2 - (K+1)/(p-1)), valid because ceil((k+1)/2) - v_p(k!) is
    bounded below by the increasing linear function k(1/2 - 1/(p-1)) + 1/2.
    """
    if not series.certified:
        raise ValueError("convert only certified series (tail bound needed)")
    ctx = series.ctx
    p, N = ctx.p, ctx.N
    K = series.K
    if J is None:
        J = K
    J = min(J, K)
    facts = _factorial_units(ctx, K)
    loss = facts[K][0]
    if loss >= N:
        raise PrecisionExhausted(
            f"v_p(K!) = {loss} >= N = {N}: raise N or lower the term count"
        )
    prec = N - loss
    mod_prec = p ** prec
    rows = _stirling_rows(ctx, K)
    mod = ctx.modulus
    coeffs = []
    for j in range(J + 1):
        acc = 0
        for k in range(j, K + 1):
            b = series.residues[k]
            if b == 0:
                continue
            s = rows[k][j]
            if s == 0:
                continue
            mu, unit = facts[k]
            t = b * s % mod
            if mu:
                if t % (p ** mu):
                    raise PrecisionExhausted(
                        f"residue of b_{k} s({k},{j}) not divisible by p^{mu}"
                    )
                t //= p ** mu
            acc = (acc + t * pow(unit, -1, mod_prec)) % mod_prec
        coeffs.append(acc % mod_prec)
    # closed-form tail bound, exact rational arithmetic
    tail = math.ceil(Fraction(K + 2, 2) - Fraction(K + 1, p - 1))
    if J < K:
        # dropped computed coefficients join the tail with their own bound
        for j in range(J + 1, K + 1):
            acc = 0
            for k in range(j, K + 1):
                b = series.residues[k]
                if b == 0:
                    continue
                s = rows[k][j]
                if s == 0:
                    continue
                mu, unit = facts[k]
                t = b * s % mod
                if mu:
                    t //= p ** mu
                acc = (acc + t * pow(unit, -1, mod_prec)) % mod_prec
            v = prec if acc == 0 else int_valuation(acc, p)
            tail = min(tail, v)
    return PowerSeriesTrunc(ctx, tuple(coeffs), prec, tail)


def compose_with_poly(q_embedded, table, exact_gen=None, K: int | None = None) -> MahlerSeries:
    """Mahler series of z -> Q(tau^z(s)) from orbit values.

    Residues come from evaluating the embedded polynomial on the residue
    orbit.  When the table carries an exact orbit and the exact generator
    is supplied, exactness flags are recovered: if every exact value
    vanishes, the series is flagged exactly zero coefficientwise (the
    strongest form of the identically-zero verdict).  The exact check is
    only spent on series whose residues are already all zero.
    """
    from .embedding import compile_poly, eval_compiled

    ctx = table.ctx
    mod = ctx.modulus
    if K is None:
        K = len(table.values) - 1
    compiled = compile_poly(q_embedded)
    residues = [
        eval_compiled(compiled, table.residue_point(m), mod) for m in range(K + 1)
    ]
    flags = None
    if (
        exact_gen is not None
        and table.exact is not None
        and all(r == 0 for r in residues)
    ):
        exact_vals = [
            exact_gen.evaluate(table.exact_point(m)) for m in range(K + 1)
        ]
        flags = [not v for v in exact_vals]
    return mahler_from_residues(ctx, residues, flags)


def evaluate_mahler(series: MahlerSeries, z):
    """Evaluate sum b_k C(z,k) at an integer or a PadicInt.

    The result is returned at its honest precision: min(N, tail bound at
    K+1) for integer arguments (binomials are exact integers), further
    reduced by v_p(K!) for p-adic arguments where C(z,k) is computed as a
    falling-factorial product divided by k!.
    """
    if not series.certified:
        raise ValueError("evaluate only certified series (tail bound needed)")
    ctx = series.ctx
    p, N = ctx.p, ctx.N
    K = series.K
    tail = arc_valuation_bound(K + 1)
    if isinstance(z, PadicInt):
        facts = _factorial_units(ctx, K)
        loss = facts[K][0]
        if loss >= N:
            raise PrecisionExhausted(f"v_p(K!) = {loss} >= N = {N}")
        eff = min(N - loss, tail)
        mod = ctx.modulus
        mod_eff = p ** eff
        acc = 0
        ff = 1  # falling factorial z(z-1)...(z-k+1) mod p^N
        for k in range(K + 1):
            if k:
                ff = ff * ((z.residue - (k - 1)) % mod) % mod
            b = series.residues[k]
            if b == 0:
                continue
            mu, unit = facts[k]
            t = b * ff % mod
            if mu:
                if t % (p ** mu):
                    raise PrecisionExhausted(
                        f"b_{k} (z)_{k} residue not divisible by p^{mu}"
                    )
                t //= p ** mu
            acc = (acc + t * pow(unit, -1, mod_eff)) % mod_eff
        return PadicInt(PadicContext(p, eff), acc % mod_eff,
                        known_exact_zero=series.all_exact_zero)
    eff = min(N, tail)
    mod = ctx.modulus
    acc = 0
    for k in range(K + 1):
        b = series.residues[k]
        if b == 0:
            continue
        acc = (acc + b * _int_binomial(z, k)) % mod
    return PadicInt(
        PadicContext(p, eff),
        acc % (p ** eff),
        known_exact_zero=series.all_exact_zero,
    )


def _int_binomial(z: int, k: int) -> int:
    """C(z, k) for any integer z: C(z,k) = (-1)^k C(k-1-z, k) for z < 0."""
    if k == 0:
        return 1
    if z >= 0:
        return math.comb(z, k)
    val = math.comb(k - 1 - z, k)
    return -val if k % 2 else val


def dump_mahler(series: MahlerSeries) -> str:
    """One line per coefficient: 'k v(b_k) residue' (decimal)."""
    lines = []
    for k in range(len(series.residues)):
        v = series.coeff(k).valuation()
        if v.kind == "infinite":
            vs = "inf"
        elif v.kind == "at_least":
            vs = f">={v.v}"
        else:
            vs = str(v.v)
        lines.append(f"{k} {vs} {series.residues[k]}")
    return "\n".join(lines)
