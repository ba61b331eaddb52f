"""Prime selection and embedding of the coefficient field into Z_p.

A prime qualifies when (a) it divides no denominator of any coefficient of
sigma, sigma^{-1}, the point, or the variety generators, (b) it does not
divide the discriminant of the minimal polynomial, (c) the minimal
polynomial has a simple root mod p, (d) the Jacobian determinant maps to a
p-adic unit, and (e) it meets an optional congruence constraint (used to
force p = 1 mod 2k for cyclotomic instances).  The search runs smallest
prime first, so selection is deterministic.

A qualifying prime always exists (by density of splitting primes), so the
search failing below max_prime is reported as a bound problem, not an
impossibility.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DenominatorNotUnit, NoPrimeInRange
from .exact import AlgNum, MultiPoly, PolyMap
from .padic import PadicContext, PadicInt, hensel_root, is_prime

__all__ = ["EmbeddingCert", "EmbeddedInstance", "select_prime", "embed_problem"]


@dataclass(frozen=True)
class EmbeddingCert:
    """Selected prime, the image of theta mod p^N, and the verified checks."""

    p: int
    theta_image: PadicInt
    root_mod_p: int
    checks: tuple

    @property
    def ctx(self) -> PadicContext:
        return self.theta_image.ctx


def _iter_algnums(instance):
    for pmap in (instance.sigma, instance.sigma_inv):
        for comp in pmap.components:
            yield from comp.terms.values()
    yield from instance.q
    for gen in instance.variety:
        yield from gen.terms.values()


def _denominators(instance, jac_det: AlgNum):
    dens = set()
    for a in _iter_algnums(instance):
        for c in a.coords:
            if c.denominator != 1:
                dens.add(c.denominator)
    for c in jac_det.coords:
        if c.denominator != 1:
            dens.add(c.denominator)
    return dens


def _simple_roots_mod_p(minpoly, p):
    """Simple roots of the minimal polynomial mod p, ascending."""
    deriv = [i * c for i, c in enumerate(minpoly)][1:]
    roots = []
    for r in range(p):
        acc = 0
        for c in reversed(minpoly):
            acc = (acc * r + c) % p
        if acc == 0:
            d = 0
            for c in reversed(deriv):
                d = (d * r + c) % p
            if d != 0:
                roots.append(r)
    return roots


def _algnum_mod_p(a: AlgNum, root: int, p: int) -> int:
    """Image of a field element mod p through theta -> root."""
    acc = 0
    pw = 1
    for c in a.coords:
        num, den = c.numerator, c.denominator
        acc = (acc + num * pow(den, -1, p) % p * pw) % p
        pw = (pw * root) % p
    return acc


def _candidate_checks(instance, jac_det, p, congruence, dens):
    """Run all named conditions for one prime; None on failure."""
    checks = []
    if congruence is not None:
        mod, residue = congruence
        if p % mod != residue % mod:
            return None
        checks.append(f"congruence: p = {residue} (mod {mod})")
    for d in dens:
        if d % p == 0:
            return None
    checks.append("denominators_unit: p divides no coefficient denominator")
    field = instance.field
    if field.discriminant % p == 0:
        return None
    checks.append("discriminant_unit: p does not divide disc(minpoly)")
    if field.is_rational:
        root = (-field.minpoly[0]) % p
        checks.append("root_exists: degree-1 field embeds directly")
    else:
        roots = _simple_roots_mod_p(field.minpoly, p)
        root = None
        for r in roots:
            if _algnum_mod_p(jac_det, r, p) != 0:
                root = r
                break
        if root is None:
            return None
        checks.append(f"root_exists: simple root {root} of minpoly mod {p}")
    if _algnum_mod_p(jac_det, root, p) == 0:
        return None
    checks.append("jacobian_det_unit: |det J(sigma)|_p = 1")
    return root, tuple(checks)


def select_prime(
    instance,
    jac_det: AlgNum,
    *,
    N: int,
    min_prime: int = 5,
    max_prime: int = 10_000,
    congruence=None,
    prime_override=None,
) -> EmbeddingCert:
    """Smallest qualifying prime >= max(5, min_prime), Hensel-lifted theta.

    With prime_override the single given prime is checked and used; its
    failure is an error rather than cause for further search.
    """
    dens = _denominators(instance, jac_det)
    if prime_override is not None:
        ctx = PadicContext(prime_override, N)  # enforces p >= 5 and primality
        result = _candidate_checks(instance, jac_det, prime_override, congruence, dens)
        if result is None:
            raise NoPrimeInRange(
                f"forced prime {prime_override} fails an embedding check"
            )
        root, checks = result
        theta = _lift_theta(instance.field, root, ctx)
        return EmbeddingCert(prime_override, theta, root, checks)
    p = max(5, min_prime)
    while p <= max_prime:
        if is_prime(p) and p >= 5:
            result = _candidate_checks(instance, jac_det, p, congruence, dens)
            if result is not None:
                root, checks = result
                ctx = PadicContext(p, N)
                theta = _lift_theta(instance.field, root, ctx)
                return EmbeddingCert(p, theta, root, checks)
        p += 1
    raise NoPrimeInRange(
        f"no qualifying prime in [{max(5, min_prime)}, {max_prime}]; a "
        f"qualifying prime exists further out, raise max_prime"
    )


def _lift_theta(field, root: int, ctx: PadicContext) -> PadicInt:
    if field.is_rational:
        return PadicInt(ctx, (-field.minpoly[0]) % ctx.modulus)
    return hensel_root(field.minpoly, root, ctx)


def embed_algnum(a: AlgNum, theta: PadicInt) -> PadicInt:
    """Homomorphic image sum(coords_i * theta^i) in Z/p^N."""
    ctx = theta.ctx
    mod = ctx.modulus
    acc = 0
    pw = 1
    for c in a.coords:
        num, den = c.numerator, c.denominator
        if num:
            if den % ctx.p == 0:
                raise DenominatorNotUnit(
                    f"denominator {den} not a unit at p = {ctx.p}"
                )
            term = num * pow(den, -1, mod) % mod
            acc = (acc + term * pw) % mod
        pw = (pw * theta.residue) % mod
    return PadicInt(ctx, acc, known_exact_zero=not a)


def _embed_poly(poly: MultiPoly, theta: PadicInt) -> MultiPoly:
    return poly.map_coeffs(lambda c: embed_algnum(c, theta))


def compile_poly(poly: MultiPoly):
    """Residue/exponent pairs plus per-variable max exponents, for fast eval."""
    terms = sorted(
        ((e, c.residue) for e, c in poly.terms.items()), key=lambda t: t[0]
    )
    maxe = [0] * poly.nvars
    for e, _ in terms:
        for i, k in enumerate(e):
            if k > maxe[i]:
                maxe[i] = k
    return terms, tuple(maxe)


def eval_compiled(compiled, point, mod: int) -> int:
    """Evaluate a compiled polynomial at integer residues mod `mod`."""
    terms, maxe = compiled
    powers = []
    for i, m in enumerate(maxe):
        col = [1] * (m + 1)
        x = point[i] % mod
        for k in range(1, m + 1):
            col[k] = col[k - 1] * x % mod
        powers.append(col)
    acc = 0
    for e, c in terms:
        t = c
        for i, k in enumerate(e):
            if k:
                t = t * powers[i][k] % mod
        acc = (acc + t) % mod
    return acc


@dataclass
class EmbeddedInstance:
    """The problem after theta -> theta_image: everything lives mod p^N."""

    ctx: PadicContext
    cert: EmbeddingCert
    sigma: PolyMap
    sigma_inv: PolyMap
    variety: tuple
    q_res: tuple
    sigma_c: tuple        # compiled components of sigma
    sigma_inv_c: tuple
    variety_c: tuple
    jac_sigma_c: tuple    # compiled Jacobian matrix of sigma
    jac_det_res: int

    def apply_sigma(self, point, mod=None):
        m = mod if mod is not None else self.ctx.modulus
        return tuple(eval_compiled(c, point, m) for c in self.sigma_c)

    def apply_sigma_inv(self, point, mod=None):
        m = mod if mod is not None else self.ctx.modulus
        return tuple(eval_compiled(c, point, m) for c in self.sigma_inv_c)

    def jacobian_at(self, point, mod=None):
        m = mod if mod is not None else self.ctx.modulus
        return [
            [eval_compiled(c, point, m) for c in row]
            for row in self.jac_sigma_c
        ]


def embed_problem(instance, cert_auto, cert: EmbeddingCert) -> EmbeddedInstance:
    """Map an exact instance through the embedding certificate.

    The resulting map must have unit constant Jacobian determinant mod p^N;
    anything else means the certificate was produced for a different
    instance and is an internal consistency failure.
    """
    theta = cert.theta_image
    ctx = theta.ctx
    sigma = PolyMap(
        instance.sigma.nvars,
        tuple(_embed_poly(c, theta) for c in instance.sigma.components),
    )
    sigma_inv = PolyMap(
        instance.sigma_inv.nvars,
        tuple(_embed_poly(c, theta) for c in instance.sigma_inv.components),
    )
    variety = tuple(_embed_poly(g, theta) for g in instance.variety)
    q_res = tuple(embed_algnum(a, theta).residue for a in instance.q)
    jac_det = embed_algnum(cert_auto.jac_det, theta)
    if not jac_det.is_unit():
        raise DenominatorNotUnit(
            "embedded Jacobian determinant is not a unit; embedding "
            "certificate does not match this instance"
        )
    from .exact import jacobian as exact_jacobian

    jac_rows = exact_jacobian(sigma)
    return EmbeddedInstance(
        ctx=ctx,
        cert=cert,
        sigma=sigma,
        sigma_inv=sigma_inv,
        variety=variety,
        q_res=q_res,
        sigma_c=tuple(compile_poly(c) for c in sigma.components),
        sigma_inv_c=tuple(compile_poly(c) for c in sigma_inv.components),
        variety_c=tuple(compile_poly(g) for g in variety),
        jac_sigma_c=tuple(
            tuple(compile_poly(entry) for entry in row) for row in jac_rows
        ),
        jac_det_res=jac_det.residue,
    )
