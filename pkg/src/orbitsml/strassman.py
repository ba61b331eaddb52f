"""Zero counting and zero location for truncated p-adic power series.

The count comes from the classical bound: for a nonzero series converging
on Z_p, the number of zeros in Z_p is at most the largest index attaining
the minimal coefficient valuation.  On truncated data the bound is valid
as soon as that minimum lies strictly below the tail valuation bound, so
uncomputed coefficients cannot compete.

Location refines residue classes mod p, p^2, ... : at each node the series
is rewritten in local coordinates z = c + p^r w, normalized by its minimal
valuation, and reduced mod p.  Simple roots of the reduction lift uniquely
(Newton with unit derivative); multiple roots recurse one level deeper.
This normalization also handles roots where the original derivative is not
a unit (the valuation-shifted case): after dividing out the minimal
valuation the derivative becomes a unit in node coordinates.

"Identically zero" is always a precision-stamped statement: finite data
cannot distinguish the zero function from one whose coefficients all have
valuation >= N.  The verdict carries (K, precision) and is cross-validated
against exact arithmetic on a window of integers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .arc import (
    MahlerSeries,
    PowerSeriesTrunc,
    arc_valuation_bound,
    evaluate_mahler,
    mahler_to_power_series,
)
from .errors import Inconclusive, InternalContradiction
from .padic import PadicContext, PadicInt, int_valuation

__all__ = [
    "BoundedZeros",
    "IdenticallyZeroAtPrecision",
    "RootClass",
    "ZeroAnalysis",
    "strassman_bound",
    "isolate_roots",
    "classify_zero_set",
]


@dataclass(frozen=True)
class BoundedZeros:
    """At most `bound` zeros in Z_p; the minimal valuation and where."""

    bound: int
    min_valuation: int
    attained_index: int

    kind = "bounded"


@dataclass(frozen=True)
class IdenticallyZeroAtPrecision:
    """All computed data vanishes mod p^precision; tail certified too.

    all_exact upgrades the verdict: every value behind the series was zero
    as an exact field element, not merely zero at working precision.
    """

    terms: int
    precision: int
    exact_checks: int = 0
    all_exact: bool = False

    kind = "identically_zero"


@dataclass
class RootClass:
    """One surviving residue class that may contain zeros.

    Simple classes carry a refined root residue `location` mod p^loc and
    hold exactly one zero of the series.  Unresolved classes (isolation
    depth exhausted) may hold several.
    """

    residue: int
    depth: int
    kind: str                 # "simple" | "unresolved"
    location: int | None = None
    loc: int = 0
    matched: int | None = None          # tau-index integer zero in this class
    matched_global: int | None = None   # global-index zero (cross-class match)
    excluded: bool = False              # provably not a zero of the full system

    def contains_int(self, m: int, p: int) -> bool:
        if self.kind == "simple":
            return (m - self.location) % (p ** self.loc) == 0
        return (m - self.residue) % (p ** self.depth) == 0


@dataclass
class ZeroAnalysis:
    """Outcome for one residue class of the orbit."""

    verdict: object
    roots: list = field(default_factory=list)
    integer_zeros_found: list = field(default_factory=list)
    completeness: str = "certified"     # "certified" | "search_limited"
    generator_index: int | None = None


def strassman_bound(pst: PowerSeriesTrunc):
    """BoundedZeros, IdenticallyZeroAtPrecision, or raise Inconclusive.

    Inconclusive means the minimal computed valuation is not below the tail
    bound, so an uncomputed coefficient could attain or beat it; the caller
    must raise K or N and retry.
    """
    p = pst.ctx.p
    vals = [
        (int_valuation(c, p), j) for j, c in enumerate(pst.coeffs) if c != 0
    ]
    if not vals:
        if pst.tail_valuation_bound >= pst.prec:
            return IdenticallyZeroAtPrecision(pst.J, pst.prec)
        raise Inconclusive(
            "all computed coefficients vanish at working precision but the "
            "tail bound is weaker; raise K or N"
        )
    vstar = min(v for v, _ in vals)
    if vstar >= pst.tail_valuation_bound:
        raise Inconclusive(
            f"minimal coefficient valuation {vstar} is not below the tail "
            f"bound {pst.tail_valuation_bound}; raise K or N"
        )
    bound = max(j for v, j in vals if v == vstar)
    return BoundedZeros(bound=bound, min_valuation=vstar, attained_index=bound)


# --- root isolation --------------------------------------------------------


def _poly_eval(coeffs, x, mod):
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % mod
    return acc


def _taylor_shift(coeffs, c, mod):
    """Coefficients of g(w + c) mod `mod` by repeated Horner."""
    out = list(coeffs)
    n = len(out)
    if c % mod == 0:
        return out
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            out[j] = (out[j] + c * out[j + 1]) % mod
    return out


def _newton_refine(coeffs, w0, p, prec):
    """Unique root = w0 mod p of g with unit g'(w0), refined mod p^prec."""
    deriv = [(i * c) for i, c in enumerate(coeffs)][1:]
    mod = p ** prec
    w = w0 % p
    for _ in range(prec.bit_length() + 2):
        dw = _poly_eval(deriv, w, mod)
        fw = _poly_eval(coeffs, w, mod)
        w2 = (w - fw * pow(dw, -1, mod)) % mod
        if w2 == w:
            break
        w = w2
    return w


def _isolate(coeffs, prec, p, depth, prefix, r_max, out):
    """Collect root classes of g inside the disc prefix + p^depth Z_p.

    coeffs represent the function in local coordinates w (z = prefix +
    p^depth w) up to an error series whose coefficients all have valuation
    >= prec.
    """
    nonzero = [c for c in coeffs if c]
    if not nonzero or prec <= 0:
        out.append(RootClass(prefix, depth, "unresolved"))
        return
    mu = min(int_valuation(c, p) for c in nonzero)
    if mu:
        if mu >= prec:
            out.append(RootClass(prefix, depth, "unresolved"))
            return
        pmu = p ** mu
        coeffs = [c // pmu for c in coeffs]
        prec = prec - mu
    gbar = [c % p for c in coeffs]
    dbar = [(i * c) % p for i, c in enumerate(gbar)][1:]
    for w0 in range(p):
        if _poly_eval(gbar, w0, p) != 0:
            continue
        if _poly_eval(dbar, w0, p) != 0:
            w = _newton_refine(coeffs, w0, p, prec)
            location = (prefix + p ** depth * w) % (p ** (depth + prec))
            out.append(
                RootClass(
                    residue=(prefix + p ** depth * w0) % (p ** (depth + 1)),
                    depth=depth + 1,
                    kind="simple",
                    location=location,
                    loc=depth + prec,
                )
            )
        else:
            child_prefix = (prefix + p ** depth * w0) % (p ** (depth + 1))
            if depth + 1 > r_max:
                out.append(RootClass(child_prefix, depth + 1, "unresolved"))
                continue
            mod = p ** prec
            shifted = _taylor_shift(coeffs, w0, mod)
            scaled = [c * pow(p, i, mod) % mod for i, c in enumerate(shifted)]
            _isolate(scaled, prec, p, depth + 1, child_prefix, r_max, out)


def isolate_roots(pst: PowerSeriesTrunc, r_max: int):
    """Root classes of a series with a BoundedZeros verdict.

    The initial precision folds the tail bound once: beyond it the
    polynomial part no longer determines the function.
    """
    p = pst.ctx.p
    prec = min(pst.prec, pst.tail_valuation_bound)
    out: list = []
    _isolate(list(pst.coeffs), prec, p, 0, 0, r_max, out)
    return out


# --- per-class classification ---------------------------------------------


def _unit_constant_generator(series_list):
    """Index of a generator whose Mahler constant term is a unit, if any.

    For any certified series the monomial coefficients a_j with j >= 1
    satisfy v(a_j) >= ceil((k+1)/2) - v_p(k!) >= 1 (p >= 5), so a unit
    a_0 = b_0 forces the Strassman minimum to sit at index 0: zero count 0.
    """
    for idx, s in enumerate(series_list):
        r = s.residues[0]
        if r != 0 and r % s.ctx.p != 0:
            return idx
    return None


def classify_zero_set(
    series_list,
    exact_evaluator,
    *,
    M: int,
    M_prime: int,
    r_max: int,
) -> ZeroAnalysis:
    """Decide one residue class: full at precision, or a finite zero list.

    series_list holds one certified Mahler series per variety generator,
    all on the same residue class.  exact_evaluator(m) answers membership
    of the full system at tau-index m by exact arithmetic.
    """
    if not series_list:
        raise ValueError("need at least one generator series")
    ctx = series_list[0].ctx
    p = ctx.p

    if all(s.all_zero_residues for s in series_list):
        failures = [m for m in range(-M_prime, M_prime + 1) if not exact_evaluator(m)]
        if failures:
            raise InternalContradiction(
                f"class looks identically zero mod p^{ctx.N} but exact "
                f"evaluation fails at tau-index {failures[0]}; raise N"
            )
        K = series_list[0].K
        stamp = min(ctx.N, arc_valuation_bound(K + 1))
        return ZeroAnalysis(
            verdict=IdenticallyZeroAtPrecision(
                K,
                stamp,
                exact_checks=2 * M_prime + 1,
                all_exact=all(s.all_exact_zero for s in series_list),
            ),
            completeness="certified",
        )

    fast = _unit_constant_generator(series_list)
    if fast is not None:
        return ZeroAnalysis(
            verdict=BoundedZeros(0, 0, 0),
            completeness="certified",
            generator_index=fast,
        )

    candidates = []
    for idx, s in enumerate(series_list):
        if s.all_zero_residues:
            continue  # no Strassman information from this generator
        pst = mahler_to_power_series(s)
        verdict = strassman_bound(pst)  # may raise Inconclusive
        if verdict.kind == "identically_zero":
            continue
        candidates.append((verdict.bound, idx, pst, verdict))
    if not candidates:
        raise Inconclusive(
            "no generator yields a usable zero bound at this precision"
        )
    candidates.sort(key=lambda t: (t[0], t[1]))
    bound, gen_idx, pst, verdict = candidates[0]

    roots = isolate_roots(pst, r_max) if bound > 0 else []
    zeros = [m for m in range(-M, M + 1) if exact_evaluator(m)]
    if len(zeros) > bound:
        raise InternalContradiction(
            f"found {len(zeros)} integer zeros but the bound is {bound}"
        )
    for m in zeros:
        holders = [rc for rc in roots if rc.contains_int(m, p)]
        if not holders:
            raise InternalContradiction(
                f"integer zero {m} lies in no surviving root class"
            )
        for rc in holders:
            if rc.kind == "simple":
                rc.matched = m

    # a surviving root of the chosen generator need not be a zero of the
    # full system: if another generator is provably nonzero there, drop it
    others = [s for i, s in enumerate(series_list) if i != gen_idx]
    for rc in roots:
        if rc.kind == "simple" and rc.matched is None and others:
            if _excluded_by_other_generator(rc, others, ctx):
                rc.excluded = True

    complete = all(
        rc.kind == "simple" and (rc.matched is not None or rc.excluded)
        for rc in roots
    )
    return ZeroAnalysis(
        verdict=verdict,
        roots=roots,
        integer_zeros_found=zeros,
        completeness="certified" if complete else "search_limited",
        generator_index=gen_idx,
    )


def _excluded_by_other_generator(rc: RootClass, others, ctx) -> bool:
    """True when some other generator is provably nonzero at the root.

    The root is known mod p^loc; series values at points congruent mod
    p^loc agree mod p^loc as well (integral Mahler coefficients), so an
    exact valuation below min(eval precision, loc) certifies nonvanishing.
    """
    z = PadicInt(ctx, rc.location % ctx.modulus)
    for s in others:
        val = evaluate_mahler(s, z)
        v = val.valuation()
        if v.is_exact and v.v < min(val.ctx.N, rc.loc):
            return True
    return False
