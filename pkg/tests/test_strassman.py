import random

import pytest

from orbitsml.arc import (
    PowerSeriesTrunc,
    certify_arc_valuations,
    mahler_from_residues,
    mahler_to_power_series,
)
from orbitsml.errors import Inconclusive, InternalContradiction
from orbitsml.padic import PadicContext
from orbitsml.strassman import (
    BoundedZeros,
    IdenticallyZeroAtPrecision,
    classify_zero_set,
    isolate_roots,
    strassman_bound,
)


def _poly_pst(ctx, int_coeffs, length=None):
    """Truncate an exact integer polynomial: tail coefficients are zero."""
    length = length if length is not None else len(int_coeffs) + 4
    coeffs = [
        (int_coeffs[j] if j < len(int_coeffs) else 0) % ctx.modulus
        for j in range(length)
    ]
    return PowerSeriesTrunc(ctx, tuple(coeffs), ctx.N, ctx.N)


def test_bound_quadratic():
    ctx = PadicContext(5, 8)
    pst = _poly_pst(ctx, [0, 5, 1])
    v = strassman_bound(pst)
    assert isinstance(v, BoundedZeros)
    assert v.bound == 2 and v.min_valuation == 0


def test_bound_log_shape():
    ctx = PadicContext(5, 10)
    K = 20
    vals = [(pow(6, t, ctx.modulus) - 1) % ctx.modulus for t in range(K + 1)]
    s = certify_arc_valuations(mahler_from_residues(ctx, vals))
    v = strassman_bound(mahler_to_power_series(s))
    assert isinstance(v, BoundedZeros)
    assert v.bound == 1 and v.min_valuation == 1


def test_identically_zero_verdict():
    ctx = PadicContext(5, 8)
    pst = PowerSeriesTrunc(ctx, (0,) * 10, ctx.N, ctx.N)
    v = strassman_bound(pst)
    assert isinstance(v, IdenticallyZeroAtPrecision)
    assert v.precision == 8


def test_inconclusive_when_tail_competes():
    ctx = PadicContext(5, 8)
    # min valuation 5, tail bound only 3: tail could hide competitors
    pst = PowerSeriesTrunc(ctx, (5 ** 5, 0, 0), ctx.N, 3)
    with pytest.raises(Inconclusive):
        strassman_bound(pst)
    pst = PowerSeriesTrunc(ctx, (0, 0, 0), ctx.N, 3)
    with pytest.raises(Inconclusive):
        strassman_bound(pst)


def test_isolate_quadratic_roots():
    ctx = PadicContext(5, 8)
    pst = _poly_pst(ctx, [0, 5, 1])  # z(z + 5)
    roots = isolate_roots(pst, 8)
    assert len(roots) == 2
    assert all(rc.kind == "simple" for rc in roots)
    locs = sorted(rc.location % 5 ** 3 for rc in roots)
    assert locs == sorted([0, (-5) % 5 ** 3])
    # distinguishable at depth 2, not depth 1
    assert all(rc.depth == 2 for rc in roots)


def test_isolate_log_shape_root_zero():
    ctx = PadicContext(5, 12)
    K = 25
    vals = [(pow(6, t, ctx.modulus) - 1) % ctx.modulus for t in range(K + 1)]
    s = certify_arc_valuations(mahler_from_residues(ctx, vals))
    pst = mahler_to_power_series(s)
    roots = isolate_roots(pst, 7)
    assert len(roots) == 1
    assert roots[0].kind == "simple"
    assert roots[0].location == 0


def test_isolate_respects_depth_cap_on_double_root():
    ctx = PadicContext(5, 10)
    pst = _poly_pst(ctx, [25, 10, 1])  # (z + 5)^2
    roots = isolate_roots(pst, 3)
    assert roots, "double root class must not vanish"
    assert any(rc.contains_int(-5, 5) for rc in roots)


def test_classify_identically_zero_invariant_variety():
    ctx = PadicContext(5, 8)
    series = mahler_from_residues(ctx, [0] * 9, [True] * 9)
    analysis = classify_zero_set(
        [certify_arc_valuations(series)],
        lambda m: True,
        M=20,
        M_prime=5,
        r_max=5,
    )
    assert analysis.verdict.kind == "identically_zero"
    assert analysis.verdict.all_exact
    assert analysis.completeness == "certified"
    assert analysis.verdict.exact_checks == 11


def test_classify_contradiction_aborts():
    ctx = PadicContext(5, 8)
    series = certify_arc_valuations(mahler_from_residues(ctx, [0] * 9))
    with pytest.raises(InternalContradiction):
        classify_zero_set(
            [series], lambda m: m != 3, M=20, M_prime=5, r_max=5
        )


def test_classify_finite_log_shape():
    ctx = PadicContext(5, 12)
    K = 25
    vals = [(pow(6, t, ctx.modulus) - 1) % ctx.modulus for t in range(K + 1)]
    s = certify_arc_valuations(mahler_from_residues(ctx, vals))
    analysis = classify_zero_set(
        [s], lambda m: m == 0, M=50, M_prime=5, r_max=7
    )
    assert analysis.verdict.kind == "bounded"
    assert analysis.verdict.bound == 1
    assert analysis.integer_zeros_found == [0]
    assert analysis.completeness == "certified"


def test_classify_unit_constant_fast_path():
    ctx = PadicContext(5, 8)
    s = certify_arc_valuations(mahler_from_residues(ctx, [3] * 9))
    analysis = classify_zero_set(
        [s], lambda m: False, M=20, M_prime=5, r_max=5
    )
    assert analysis.verdict.kind == "bounded" and analysis.verdict.bound == 0
    assert analysis.completeness == "certified"


def test_classify_two_generators_search_limited():
    """One generator identically zero, one with B=2 and only one zero found.

    g2 has values 25(m - 3)(m - 10^6): an integer zero at m = 3 plus a
    second Z_p zero far beyond the search bound; that root class stays
    unmatched and cannot be excluded by the all-zero first generator.
    (The p^2 scale keeps the composed-series valuation law intact, as any
    genuine arc composition would.)
    """
    ctx = PadicContext(5, 12)
    K = 25
    vals = [(25 * (t - 3) * (t - 10 ** 6)) % ctx.modulus for t in range(K + 1)]
    g2 = certify_arc_valuations(mahler_from_residues(ctx, vals))
    g1 = certify_arc_valuations(mahler_from_residues(ctx, [0] * (K + 1)))
    analysis = classify_zero_set(
        [g1, g2], lambda m: m == 3, M=50, M_prime=5, r_max=7
    )
    assert analysis.verdict.kind == "bounded"
    assert analysis.integer_zeros_found == [3]
    assert analysis.completeness == "search_limited"
    unmatched = [
        rc for rc in analysis.roots if rc.matched is None and not rc.excluded
    ]
    assert len(unmatched) == 1


def test_strassman_soundness_planted_roots():
    """Exact root count never exceeds B; planted integers land in classes."""
    rng = random.Random(101)
    for trial in range(100):
        p = rng.choice([5, 7, 11])
        ctx = PadicContext(p, 10)
        nroots = rng.randint(0, 3)
        roots = rng.sample(range(-20, 21), nroots)
        coeffs = [1]
        for r in roots:
            coeffs = [0] + coeffs
            for i in range(len(coeffs) - 1):
                coeffs[i] += -r * coeffs[i + 1]
        # unit factor without Z_p roots: constant, irreducible quadratic
        # mod p, or (1 + p z)
        style = rng.randrange(3)
        if style == 0:
            unit = [rng.choice([1, 2, 3, 4])]
        elif style == 1:
            while True:
                a, b = rng.randrange(p), rng.randrange(1, p)
                if all((x * x + a * x + b) % p for x in range(p)):
                    unit = [b, a, 1]
                    break
        else:
            unit = [1, p]
        prod = [0] * (len(coeffs) + len(unit) - 1)
        for i, c in enumerate(coeffs):
            for k, u in enumerate(unit):
                prod[i + k] += c * u
        pst = _poly_pst(ctx, prod)
        verdict = strassman_bound(pst)
        assert isinstance(verdict, BoundedZeros)
        assert nroots <= verdict.bound, (trial, roots, unit)
        classes = isolate_roots(pst, 12)
        for r in roots:
            assert any(
                rc.contains_int(r, p) for rc in classes
            ), (trial, r, roots, unit)


def test_every_found_zero_lies_in_a_class():
    ctx = PadicContext(7, 10)
    K = 22
    vals = [(49 * (t - 2) * (t + 9)) % ctx.modulus for t in range(K + 1)]
    s = certify_arc_valuations(mahler_from_residues(ctx, vals))
    analysis = classify_zero_set(
        [s], lambda m: m in (-9, 2), M=30, M_prime=4, r_max=8
    )
    assert sorted(analysis.integer_zeros_found) == [-9, 2]
    assert analysis.completeness == "certified"
    for m in (-9, 2):
        assert any(rc.contains_int(m, 7) for rc in analysis.roots)
