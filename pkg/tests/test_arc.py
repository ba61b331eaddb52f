import random
from fractions import Fraction

import pytest

from gens import fibonacci_instance, random_triangular_automorphism, variables
from orbitsml.arc import (
    arc_valuation_bound,
    certify_arc_valuations,
    compose_with_poly,
    dump_mahler,
    evaluate_mahler,
    mahler_from_residues,
    mahler_from_values,
    mahler_to_power_series,
)
from orbitsml.decide import ProblemInstance, SolverConfig
from orbitsml.dynamics import ExactOrbit, OrbitTable, find_period
from orbitsml.embedding import embed_algnum, embed_problem, select_prime
from orbitsml.errors import ValuationBoundViolated
from orbitsml.exact import MultiPoly, QQ, validate_automorphism
from orbitsml.padic import PadicContext, PadicInt, vp_factorial


def _ctx(p=5, N=10):
    return PadicContext(p, N)


def test_geometric_arc_coefficients():
    ctx = _ctx()
    K = 12
    vals = [pow(1 + ctx.p, t, ctx.modulus) for t in range(K + 1)]
    s = mahler_from_residues(ctx, vals)
    assert list(s.residues) == [pow(ctx.p, k, ctx.modulus) for k in range(K + 1)]


def test_constant_arc():
    ctx = _ctx()
    s = mahler_from_residues(ctx, [7] * 9)
    assert s.residues[0] == 7 and all(r == 0 for r in s.residues[1:])


def test_translation_arc():
    ctx = _ctx()
    s = mahler_from_residues(ctx, [0, 5, 10, 15])
    assert list(s.residues) == [0, 5, 0, 0]


def test_certify_passes_translation_and_geometric():
    ctx = _ctx()
    certify_arc_valuations(mahler_from_residues(ctx, [0, 5, 10, 15]))
    K = 10
    vals = [pow(6, t, ctx.modulus) for t in range(K + 1)]
    certify_arc_valuations(mahler_from_residues(ctx, vals))


def test_certify_rejects_unit_b1():
    ctx = _ctx()
    s = mahler_from_residues(ctx, [0, 1, 2, 3])  # b_1 = 1, valuation 0 < 1
    with pytest.raises(ValuationBoundViolated) as exc:
        certify_arc_valuations(s)
    assert exc.value.k == 1


def test_conversion_translation():
    ctx = _ctx()
    s = certify_arc_valuations(mahler_from_residues(ctx, [3, 8, 13, 18]))
    pst = mahler_to_power_series(s)
    assert pst.coeffs[0] == 3 and pst.coeffs[1] == 5
    assert all(c == 0 for c in pst.coeffs[2:])


def test_conversion_geometric_gives_log():
    ctx = _ctx(5, 12)
    K = 25
    vals = [pow(6, t, ctx.modulus) for t in range(K + 1)]
    s = certify_arc_valuations(mahler_from_residues(ctx, vals))
    pst = mahler_to_power_series(s)
    # a_1 = log(1+p): verify against the truncated log series mod p^6
    want = 0
    mod = 5 ** 6
    for k in range(1, 40):
        term = Fraction((-1) ** (k - 1), k) * Fraction(5) ** k
        if term.denominator % 5 == 0:
            continue
        want = (want + term.numerator * pow(term.denominator, -1, mod)) % mod
    assert pst.coeffs[1] % mod == want
    assert pst.coeffs[1] % 25 == 5


def test_conversion_constant():
    ctx = _ctx()
    s = certify_arc_valuations(mahler_from_residues(ctx, [4] * 8))
    pst = mahler_to_power_series(s)
    assert pst.coeffs[0] == 4 and all(c == 0 for c in pst.coeffs[1:])
    assert pst.prec == ctx.N - vp_factorial(7, 5)


def test_evaluate_translation_at_7():
    ctx = _ctx()
    s = certify_arc_valuations(mahler_from_residues(ctx, [0, 5, 10, 15]))
    v = evaluate_mahler(s, 7)
    assert v.residue % 5 ** v.ctx.N == 35 % 5 ** v.ctx.N


def test_evaluate_at_zero_is_b0():
    ctx = _ctx()
    vals = [pow(6, t, ctx.modulus) for t in range(11)]
    s = certify_arc_valuations(mahler_from_residues(ctx, vals))
    assert evaluate_mahler(s, 0).residue == 1


def test_evaluate_padic_argument():
    ctx = _ctx(5, 10)
    vals = [pow(6, t, ctx.modulus) for t in range(13)]
    s = certify_arc_valuations(mahler_from_residues(ctx, vals))
    z = PadicInt(ctx, 3)
    padic_val = evaluate_mahler(s, z)
    int_val = evaluate_mahler(s, 3)
    m = 5 ** padic_val.ctx.N
    assert padic_val.residue % m == int_val.residue % m


def _fib_pipeline(N=16, K=28):
    inst = fibonacci_instance(SolverConfig(N=N, K=K, M=50, M_prime=8))
    cert_auto = validate_automorphism(inst.sigma, inst.sigma_inv)
    cert = select_prime(inst, cert_auto.jac_det, N=N)
    emb = embed_problem(inst, cert_auto, cert)
    period = find_period(emb)
    exact = ExactOrbit(cert_auto, inst.q)
    mod = emb.ctx.modulus
    glob = [tuple(x % mod for x in emb.q_res)]
    for _ in range(period.j * (K + 1)):
        glob.append(emb.apply_sigma(glob[-1]))
    return inst, cert_auto, emb, period, exact, glob


def test_arc_negative_continuation_matches_exact_inverse_orbit():
    inst, cert_auto, emb, period, exact, glob = _fib_pipeline()
    K = inst.config.K
    j = period.j
    table = OrbitTable(emb.ctx, j, [glob[j * m] for m in range(K + 1)], exact, 0)
    for c in range(2):
        series = certify_arc_valuations(
            mahler_from_residues(emb.ctx, [pt[c] for pt in table.values])
        )
        for m in range(1, 11):
            got = evaluate_mahler(series, -m)
            want_pt = exact.point(-j * m)
            want = embed_algnum(want_pt[c], emb.cert.theta_image)
            mod = got.ctx.p ** got.ctx.N
            assert got.residue % mod == want.residue % mod, (c, m)


def test_functional_equation_along_arc():
    """f(m+1) = tau(f(m)) at tail-limited precision, pos and neg m."""
    inst, cert_auto, emb, period, exact, glob = _fib_pipeline()
    K = inst.config.K
    j = period.j
    table = OrbitTable(emb.ctx, j, [glob[j * m] for m in range(K + 1)], exact, 0)
    coords = [
        certify_arc_valuations(
            mahler_from_residues(emb.ctx, [pt[c] for pt in table.values])
        )
        for c in range(2)
    ]
    for m in list(range(0, 31)) + list(range(-10, 0)):
        fvec = [evaluate_mahler(coords[c], m) for c in range(2)]
        eff = min(v.ctx.N for v in fvec)
        mod_eff = emb.ctx.p ** eff
        point = tuple(v.residue % emb.ctx.modulus for v in fvec)
        for _ in range(j):  # tau = sigma^j, applied stepwise
            point = emb.apply_sigma(point)
        nxt = [evaluate_mahler(coords[c], m + 1) for c in range(2)]
        for c in range(2):
            assert point[c] % mod_eff == nxt[c].residue % mod_eff, (m, c)


def test_interpolation_exactness_on_computed_range():
    inst, cert_auto, emb, period, exact, glob = _fib_pipeline()
    K = inst.config.K
    j = period.j
    table = OrbitTable(emb.ctx, j, [glob[j * m] for m in range(K + 1)], exact, 0)
    series = certify_arc_valuations(
        mahler_from_residues(emb.ctx, [pt[0] for pt in table.values])
    )
    # on 0..K the full-precision values are reproduced exactly mod p^N,
    # provided the tail bound covers N (here it does: ceil((K+2)/2) vs N)
    eff = min(emb.ctx.N, arc_valuation_bound(K + 1))
    mod_eff = emb.ctx.p ** eff
    for m in range(K + 1):
        got = evaluate_mahler(series, m)
        assert got.residue % mod_eff == table.values[m][0] % mod_eff


def test_composed_series_examples():
    ctx = _ctx()
    one = QQ.one()
    # Q = x on translation arc from 0: values m*p
    table = OrbitTable(ctx, 1, [(m * 5 % ctx.modulus,) for m in range(8)])
    x = MultiPoly.variable(1, 0, PadicInt(ctx, 1))
    s = compose_with_poly(x, table)
    assert s.residues[0] == 0 and s.residues[1] == 5
    assert all(r == 0 for r in s.residues[2:])
    # Q = x - 1 on geometric arc
    table = OrbitTable(ctx, 1, [(pow(6, m, ctx.modulus),) for m in range(9)])
    xm1 = MultiPoly(
        1, {(1,): PadicInt(ctx, 1), (0,): PadicInt(ctx, ctx.modulus - 1)}
    )
    s = compose_with_poly(xm1, table)
    assert s.residues[0] == 0
    assert [s.residues[k] for k in range(1, 9)] == [
        pow(5, k, ctx.modulus) for k in range(1, 9)
    ]


def test_composed_exact_zero_flags():
    """Q = x - s on the constant arc: all-zero series with exact flags."""
    inst = fibonacci_instance(SolverConfig(N=12, K=10, M=20, M_prime=5))
    cert_auto = validate_automorphism(inst.sigma, inst.sigma_inv)
    cert = select_prime(inst, cert_auto.jac_det, N=12)
    emb = embed_problem(inst, cert_auto, cert)
    ident_orbit = ExactOrbit(cert_auto, inst.q)

    # constant arc: iterate the identity (step map returns the point)
    table = OrbitTable(
        emb.ctx, 0, [emb.q_res] * 9, ExactOrbit(cert_auto, inst.q), 0
    )
    # table.step = 0 makes exact_point(m) return q for every m
    gen_exact = MultiPoly(
        2, {(1, 0): QQ.one(), (0, 0): -inst.q[0]}
    )  # x - q_0
    gen_emb = gen_exact.map_coeffs(lambda c: embed_algnum(c, cert.theta_image))
    s = compose_with_poly(gen_emb, table, gen_exact)
    assert s.all_zero_residues and s.all_exact_zero


def test_composed_valuation_law_random_triangular():
    """Mahler coefficients of Q(arc) obey v(b_k) >= floor(k/2) + 1, k >= 1."""
    rng = random.Random(23)
    for trial in range(5):
        n = rng.randint(1, 3)
        fwd, inv = random_triangular_automorphism(rng, n)
        q = tuple(QQ.from_rational(rng.randint(-3, 3)) for _ in range(n))
        gen = MultiPoly.zero(n)
        for _ in range(3):
            e = [0] * n
            e[rng.randrange(n)] += 1
            if rng.random() < 0.5:
                e[rng.randrange(n)] += 1
            c = rng.randint(-4, 4)
            if c:
                gen = gen + MultiPoly(n, {tuple(e): QQ.from_rational(c)})
        if gen.is_zero():
            continue
        inst = ProblemInstance(
            QQ, n, fwd, inv, q, (gen,), SolverConfig(N=12, K=20, M=10, M_prime=4)
        )
        cert_auto = validate_automorphism(fwd, inv)
        cert = select_prime(inst, cert_auto.jac_det, N=12)
        emb = embed_problem(inst, cert_auto, cert)
        period = find_period(emb)
        j, K = period.j, 20
        mod = emb.ctx.modulus
        glob = [tuple(x % mod for x in emb.q_res)]
        for _ in range(j * (K + 1)):
            glob.append(emb.apply_sigma(glob[-1]))
        table = OrbitTable(emb.ctx, j, [glob[j * m] for m in range(K + 1)])
        s = compose_with_poly(emb.variety[0], table)
        ps = certify_arc_valuations(s)  # raises on violation
        for k in range(1, K + 1):
            if ps.residues[k]:
                from orbitsml.padic import int_valuation

                assert int_valuation(ps.residues[k], emb.ctx.p) >= k // 2 + 1


def test_power_series_round_trip_small_integers():
    ctx = _ctx(5, 12)
    K = 20
    vals = [pow(6, t, ctx.modulus) for t in range(K + 1)]
    s = certify_arc_valuations(mahler_from_residues(ctx, vals))
    pst = mahler_to_power_series(s)
    floor = min(pst.prec, pst.tail_valuation_bound)
    for z in range(-3, 4):
        naive = sum(c * z ** k for k, c in enumerate(pst.coeffs))
        mah = evaluate_mahler(s, z)
        eff = min(floor, mah.ctx.N)
        assert naive % 5 ** eff == mah.residue % 5 ** eff, z


def test_mahler_from_values_api_and_dump():
    ctx = _ctx()
    vals = [PadicInt(ctx, 0, True), PadicInt(ctx, 5), PadicInt(ctx, 10)]
    s = mahler_from_values(vals)
    assert s.exact_zero[0] and not s.exact_zero[1]
    text = dump_mahler(s)
    assert text.splitlines()[0] == "0 inf 0"
    assert text.splitlines()[1] == "1 1 5"
