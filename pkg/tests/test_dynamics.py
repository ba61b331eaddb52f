import random
from fractions import Fraction

from gens import (
    fibonacci_instance,
    quartic_cyclotomic_instance,
    random_triangular_automorphism,
    swap_instance,
    variables,
)
from orbitsml.decide import ProblemInstance, SolverConfig
from orbitsml.dynamics import (
    ExactOrbit,
    exact_orbit_point,
    find_period,
    jacobian_order,
    orbit_values,
    residue_orbit_period,
)
from orbitsml.embedding import embed_algnum, embed_problem, select_prime
from orbitsml.exact import MultiPoly, PolyMap, QQ, validate_automorphism
from orbitsml.padic import PadicContext


def _embedded(instance, N=8):
    cert_auto = validate_automorphism(instance.sigma, instance.sigma_inv)
    cert = select_prime(
        instance,
        cert_auto.jac_det,
        N=N,
        congruence=instance.congruence,
        prime_override=instance.config.prime_override,
    )
    return cert_auto, embed_problem(instance, cert_auto, cert)


def _negation_instance():
    (x,) = variables(1)
    neg = PolyMap(1, (x.scaled(-1),))
    return ProblemInstance(
        QQ, 1, neg, neg, (QQ.one(),), (x,), SolverConfig(N=8, K=8, M=10, M_prime=4)
    )


def test_residue_period_negation():
    _, emb = _embedded(_negation_instance())
    assert emb.ctx.p == 5
    assert residue_orbit_period(emb) == 2


def test_residue_period_identity():
    inst = swap_instance()
    ident = PolyMap.identity(2, QQ.one())
    inst2 = ProblemInstance(
        QQ, 2, ident, ident, inst.q, inst.variety, inst.config
    )
    _, emb = _embedded(inst2)
    assert residue_orbit_period(emb) == 1


def test_residue_period_fibonacci_is_pisano():
    inst = fibonacci_instance(SolverConfig(N=8, K=8, M=10, M_prime=4, prime_override=7))
    _, emb = _embedded(inst)
    assert emb.ctx.p == 7
    d = residue_orbit_period(emb)
    assert d == 16  # Pisano period pi(7)
    assert jacobian_order(emb, d) == 1
    cert = find_period(emb)
    assert (cert.j, cert.d, cert.e) == (16, 16, 1)


def test_jacobian_order_negation():
    _, emb = _embedded(_negation_instance())
    assert jacobian_order(emb, 2) == 1  # (-1)(-1) = 1
    cert = find_period(emb)
    assert cert.j == 2


def test_jacobian_order_doubling():
    (x,) = variables(1)
    double = PolyMap(1, (x.scaled(2),))
    half = PolyMap(1, (x.map_coeffs(lambda c: c * Fraction(1, 2)),))
    inst = ProblemInstance(
        QQ, 1, double, half, (QQ.zero(),), (x,),
        SolverConfig(N=8, K=8, M=10, M_prime=4),
    )
    _, emb = _embedded(inst)
    assert emb.ctx.p == 5
    assert residue_orbit_period(emb) == 1
    assert jacobian_order(emb, 1) == 4  # order of 2 mod 5
    assert find_period(emb).j == 4


def test_find_period_identity():
    inst = swap_instance()
    ident = PolyMap.identity(2, QQ.one())
    inst2 = ProblemInstance(QQ, 2, ident, ident, inst.q, inst.variety, inst.config)
    _, emb = _embedded(inst2)
    assert find_period(emb).j == 1


def test_orbit_values_translation():
    ctx = PadicContext(5, 4)
    table = orbit_values(lambda pt: ((pt[0] + 5) % ctx.modulus,), (0,), 3, ctx)
    assert [v[0] for v in table.values] == [0, 5, 10, 15]


def test_orbit_values_scaling():
    ctx = PadicContext(5, 3)
    table = orbit_values(
        lambda pt: ((pt[0] * 6) % ctx.modulus,), (1,), 2, ctx
    )
    assert [v[0] for v in table.values] == [1, 6, 36]


def test_exact_orbit_fibonacci():
    inst = fibonacci_instance()
    cert = validate_automorphism(inst.sigma, inst.sigma_inv)
    pt = exact_orbit_point(cert, inst.q, 5)
    assert pt == (QQ.from_rational(5), QQ.from_rational(8))
    assert exact_orbit_point(cert, inst.q, 0) == inst.q
    back = exact_orbit_point(cert, inst.q, -2)
    assert back == (QQ.from_rational(-1), QQ.from_rational(1))
    assert exact_orbit_point(cert, back, 2) == inst.q


def test_exact_orbit_object_two_sided():
    inst = fibonacci_instance()
    cert = validate_automorphism(inst.sigma, inst.sigma_inv)
    orbit = ExactOrbit(cert, inst.q)
    for m in range(-20, 21):
        assert orbit.point(m) == exact_orbit_point(cert, inst.q, m)
    for m in range(1, 21):
        fwd = exact_orbit_point(cert, orbit.point(-m), m)
        assert fwd == inst.q


def test_certificate_conditions_reverified():
    inst = quartic_cyclotomic_instance(3, SolverConfig(N=6, K=6, M=10, M_prime=4))
    _, emb = _embedded(inst, N=6)
    cert = find_period(emb)
    assert cert.j == cert.d * cert.e
    p = emb.ctx.p
    pt = tuple(x % p for x in emb.q_res)
    cur = pt
    for _ in range(cert.j):
        cur = emb.apply_sigma(cur, p)
    assert cur == pt


def test_exact_matches_residue_orbit():
    rng = random.Random(17)
    for _ in range(4):
        fwd, inv = random_triangular_automorphism(rng, rng.randint(1, 3))
        n = fwd.nvars
        q = tuple(QQ.from_rational(rng.randint(-3, 3)) for _ in range(n))
        (x0,) = variables(1)[:1]
        gen = MultiPoly.variable(n, 0, QQ.one())
        inst = ProblemInstance(
            QQ, n, fwd, inv, q, (gen,), SolverConfig(N=8, K=8, M=10, M_prime=4)
        )
        cert_auto, emb = _embedded(inst)
        orbit = ExactOrbit(cert_auto, q)
        mod = emb.ctx.modulus
        cur = tuple(x % mod for x in emb.q_res)
        for m in range(51):
            exact = orbit.point(m)
            reduced = tuple(
                embed_algnum(a, emb.cert.theta_image).residue for a in exact
            )
            assert reduced == cur, f"mismatch at m={m}"
            cur = emb.apply_sigma(cur)


def test_j_divides_d_times_gl_order():
    from orbitsml.dynamics import _gl_order

    inst = fibonacci_instance(SolverConfig(N=8, K=8, M=10, M_prime=4))
    _, emb = _embedded(inst)
    cert = find_period(emb)
    assert (cert.d * _gl_order(2, emb.ctx.p)) % cert.j == 0
