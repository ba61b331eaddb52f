"""Top-level decision procedure: orbit meets variety, with certificates.

Pipeline: validate the automorphism pair exactly; select a prime and embed
everything into Z/p^N; find the period certificate j = d*e at the base
point; then, for each residue class i mod j, interpolate the orbit of
tau = sigma^j from sigma^i(q) by a certified analytic arc, compose with
each variety generator, and classify the class as full (identically zero
at precision, cross-checked exactly) or finite (Strassman bound, root
isolation, exact integer search).  Full classes are normalized to the
minimal modulus; finite classes contribute sporadic points.

sigma^j is never composed symbolically; all orbit work iterates sigma
step by step, and all class tables are slices of one shared global orbit.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field, replace

from .arc import ArcBundle, certify_arc_valuations, compose_with_poly, mahler_from_residues
from .dynamics import (
    ExactOrbit,
    OrbitTable,
    PeriodCertificate,
    find_period,
    mat_inv_mod,
    mat_mul_mod,
)
from .embedding import EmbeddedInstance, EmbeddingCert, embed_algnum, embed_problem, select_prime
from .errors import (
    Inconclusive,
    InternalContradiction,
    PrecisionExhausted,
)
from .exact import AutomorphismCert, MultiPoly, NumberField, PolyMap, validate_automorphism
from .padic import int_valuation
from .strassman import ZeroAnalysis, classify_zero_set

__all__ = [
    "SolverConfig",
    "ProblemInstance",
    "ClassReport",
    "ProgressionSet",
    "decide",
    "normalize_progressions",
    "density_flag",
    "retry_policy",
    "orbit_member",
]


@dataclass(frozen=True)
class SolverConfig:
    """Precision and search knobs; defaults suit exact desk-scale instances."""

    prime_override: int | None = None
    N: int = 64
    K: int = 144
    M: int = 1000
    M_prime: int = 50
    r_max: int | None = None
    min_prime: int = 5
    max_prime: int = 10_000
    threads: int = 1

    def __post_init__(self):
        for name in ("N", "K", "M", "M_prime", "max_prime"):
            if getattr(self, name) <= 0:
                raise ValueError(f"config field {name} must be positive")

    @property
    def isolation_depth(self) -> int:
        return self.r_max if self.r_max is not None else self.N // 2 + 1


@dataclass(frozen=True)
class ProblemInstance:
    """Field, automorphism pair, base point, variety generators, config."""

    field: NumberField
    n: int
    sigma: PolyMap
    sigma_inv: PolyMap
    q: tuple
    variety: tuple
    config: SolverConfig = SolverConfig()
    congruence: tuple | None = None  # (mod, residue) constraint on p

    def __post_init__(self):
        if self.sigma.nvars != self.n or self.sigma_inv.nvars != self.n:
            raise ValueError("automorphism arity differs from n")
        if len(self.q) != self.n:
            raise ValueError("point dimension differs from n")
        if not self.variety:
            raise ValueError("variety needs at least one generator")
        for g in self.variety:
            if g.nvars != self.n:
                raise ValueError("variety generator arity differs from n")
            if g.is_zero():
                raise ValueError("variety generators must be nonzero")


@dataclass
class ClassReport:
    """Analysis of one residue class i mod j, with global-index zeros."""

    index: int
    analysis: ZeroAnalysis
    zeros_global: list


@dataclass
class ProgressionSet:
    """The answer: full residue classes mod the minimal modulus j', plus
    sporadic integers, plus every certificate needed to re-verify."""

    modulus: int
    full_classes: frozenset
    sporadic: tuple
    period: PeriodCertificate
    embedding: EmbeddingCert
    automorphism: AutomorphismCert
    class_reports: list
    config_used: SolverConfig
    completeness: str
    density: str = ""

    def contains(self, m: int) -> bool:
        return (m % self.modulus) in self.full_classes or m in self.sporadic


def normalize_progressions(per_class_full, j: int):
    """Minimal period j' | j of the fullness indicator, and its residues."""
    for jp in sorted(d for d in range(1, j + 1) if j % d == 0):
        if all(per_class_full[i] == per_class_full[i % jp] for i in range(j)):
            return jp, frozenset(
                i for i in range(jp) if per_class_full[i]
            )
    raise AssertionError("indicator is always j-periodic")


def density_flag(result: ProgressionSet) -> str:
    """Zariski-density obstruction readable from this one subvariety.

    Any full class traps the whole orbit in the union of finitely many
    translates of X, so the orbit is not dense.  A purely sporadic answer
    carries no density conclusion either way.
    """
    if result.full_classes:
        return (
            "not_dense: orbit lies in the union of sigma^i(X) for i < "
            f"{result.period.j}"
        )
    return "no_obstruction_from_this_x"


def retry_policy(failure, config: SolverConfig, attempt: int) -> SolverConfig:
    """One escalation doubling N and K; after that the failure surfaces."""
    if not isinstance(failure, (Inconclusive, PrecisionExhausted)):
        raise failure
    if attempt == 0:
        return replace(config, N=2 * config.N, K=2 * config.K)
    raise failure


def orbit_member(exact_orbit: ExactOrbit, variety, m: int) -> bool:
    """Exact truth of sigma^m(q) in X."""
    pt = exact_orbit.point(m)
    for gen in variety:
        if gen.evaluate(pt):
            return False
    return True


def decide(instance: ProblemInstance) -> ProgressionSet:
    """Run the full pipeline with the retry ladder."""
    cert_auto = validate_automorphism(instance.sigma, instance.sigma_inv)
    config = instance.config
    attempt = 0
    while True:
        try:
            return _pipeline(instance, cert_auto, config)
        except (Inconclusive, PrecisionExhausted) as failure:
            config = retry_policy(failure, config, attempt)
            attempt += 1


def _pipeline(instance, cert_auto, config: SolverConfig) -> ProgressionSet:
    cert = select_prime(
        instance,
        cert_auto.jac_det,
        N=config.N,
        min_prime=config.min_prime,
        max_prime=config.max_prime,
        congruence=instance.congruence,
        prime_override=config.prime_override,
    )
    emb = embed_problem(instance, cert_auto, cert)
    ctx = emb.ctx
    period = find_period(emb)
    j, K = period.j, config.K
    p, mod = ctx.p, ctx.modulus

    # one shared residue orbit sigma^t(q) mod p^N, t < j*(K+1)
    total = j * (K + 1)
    glob = [tuple(x % mod for x in emb.q_res)]
    for _ in range(total - 1):
        glob.append(emb.apply_sigma(glob[-1]))

    _verify_class_hypotheses(emb, glob, j)

    exact_orbit = ExactOrbit(cert_auto, instance.q)
    _spot_check_orbit(emb, cert, glob, exact_orbit)

    member_cache: dict = {}
    member_lock = threading.Lock()

    def member_exact(t: int) -> bool:
        hit = member_cache.get(t)
        if hit is None:
            hit = orbit_member(exact_orbit, instance.variety, t)
            with member_lock:
                member_cache[t] = hit
        return hit

    def analyze_class(i: int) -> ClassReport:
        table = OrbitTable(
            ctx=ctx,
            step=j,
            values=[glob[i + j * m] for m in range(K + 1)],
            exact=exact_orbit,
            offset=i,
        )
        bundle = ArcBundle(
            class_index=i,
            period=j,
            series=tuple(
                certify_arc_valuations(
                    mahler_from_residues(
                        ctx, [pt[c] for pt in table.values]
                    )
                )
                for c in range(instance.n)
            ),
        )
        gen_series = tuple(
            certify_arc_valuations(
                compose_with_poly(emb.variety[l], table, instance.variety[l])
            )
            for l in range(len(emb.variety))
        )
        analysis = classify_zero_set(
            gen_series,
            lambda mh: member_exact(i + j * mh),
            M=config.M,
            M_prime=config.M_prime,
            r_max=config.isolation_depth,
        )
        del bundle  # arcs certified; retained data lives in the analysis
        return ClassReport(
            index=i,
            analysis=analysis,
            zeros_global=[i + j * mh for mh in analysis.integer_zeros_found],
        )

    if config.threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            reports = list(pool.map(analyze_class, range(j)))
    else:
        reports = [analyze_class(i) for i in range(j)]

    _match_roots_globally(reports, j, p, ctx.N)

    per_class_full = [
        r.analysis.verdict.kind == "identically_zero" for r in reports
    ]
    jp, full_classes = normalize_progressions(per_class_full, j)
    sporadic = sorted(
        m
        for r in reports
        if r.analysis.verdict.kind == "bounded"
        for m in r.zeros_global
    )
    for m in sporadic:
        if (m % jp) in full_classes:
            raise AssertionError("sporadic point inside a full class")
    completeness = (
        "certified"
        if all(_class_complete(r.analysis) for r in reports)
        else "search_limited"
    )
    result = ProgressionSet(
        modulus=jp,
        full_classes=full_classes,
        sporadic=tuple(sporadic),
        period=period,
        embedding=cert,
        automorphism=cert_auto,
        class_reports=reports,
        config_used=config,
        completeness=completeness,
    )
    result.density = density_flag(result)
    return result


def _class_complete(analysis: ZeroAnalysis) -> bool:
    if analysis.verdict.kind == "identically_zero":
        return True
    return all(
        rc.kind == "simple"
        and (
            rc.matched is not None
            or rc.matched_global is not None
            or rc.excluded
        )
        for rc in analysis.roots
    )


def _match_roots_globally(reports, j: int, p: int, N: int):
    """Second matching pass: identify roots with zeros found in any class.

    A located root z* of class i sits at global p-adic index i + j*z*.
    An integer zero m found in another class matches when it is congruent
    to that index at the root's full location depth; the analytic zero is
    then accounted for by a found integer (classes that collapse p-adically
    all see the same global zero).
    """
    found = sorted({m for r in reports for m in r.zeros_global})
    if not found:
        return
    vj = int_valuation(j, p) if j % p == 0 else 0
    for r in reports:
        for rc in r.analysis.roots:
            if rc.kind != "simple" or rc.matched is not None or rc.excluded:
                continue
            depth = min(rc.loc + vj, N)
            pd = p ** depth
            x_hat = (r.index + j * rc.location) % pd
            for m in found:
                if (m - x_hat) % pd == 0:
                    rc.matched_global = m
                    break
        r.analysis.completeness = (
            "certified" if _class_complete(r.analysis) else "search_limited"
        )


def _verify_class_hypotheses(emb: EmbeddedInstance, glob, j: int):
    """Check tau(s_i) = s_i and J(tau, s_i) = I mod p for every class.

    These congruences are what licenses the tail bound beyond the computed
    Mahler range, so they are verified directly rather than inherited.
    J(sigma^j, s_{i+1}) = A_{i+j} J(sigma^j, s_i) A_i^{-1} with
    A_t = J(sigma, sigma^t(q)) keeps the whole sweep linear in j.
    """
    p = emb.ctx.p
    n = len(emb.q_res)
    eye = [[1 if a == b else 0 for b in range(n)] for a in range(n)]
    pts = [tuple(x % p for x in glob[t]) for t in range(min(len(glob), 2 * j))]
    if len(pts) < 2 * j:
        # K = 0 edge: extend the mod-p orbit directly
        cur = pts[-1]
        while len(pts) < 2 * j:
            cur = emb.apply_sigma(cur, p)
            pts.append(cur)
    for i in range(j):
        if pts[i + j] != pts[i]:
            raise InternalContradiction(
                f"sigma^j is not the identity mod p at class point {i}"
            )
    amats = [emb.jacobian_at(pts[t], p) for t in range(2 * j)]
    prod = eye
    for t in range(j):
        prod = mat_mul_mod(amats[t], prod, p)
    for i in range(j):
        if prod != eye:
            raise InternalContradiction(
                f"J(sigma^j, s_{i}) != I mod p: period certificate invalid"
            )
        if i + 1 < j:
            prod = mat_mul_mod(
                amats[i + j], mat_mul_mod(prod, mat_inv_mod(amats[i], p), p), p
            )


def _spot_check_orbit(emb, cert: EmbeddingCert, glob, exact_orbit: ExactOrbit):
    """Exact-to-residue agreement at a handful of deterministic indices."""
    total = len(glob)
    stride = max(1, total // 5)
    for t in range(0, total, stride):
        pt = exact_orbit.point(t)
        reduced = tuple(
            embed_algnum(a, cert.theta_image).residue for a in pt
        )
        if reduced != glob[t]:
            raise InternalContradiction(
                f"reduction-first orbit disagrees with exact orbit at index {t}"
            )
