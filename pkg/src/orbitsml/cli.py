"""Command-line interface.

Subcommands:
  decide    full pipeline on an instance file
  sml       zero set of a linear recurrence (reported over m >= 0)
  validate  automorphism pair check only
  embed     prime selection and embedding certificate only
  arc       build and dump the analytic arc of one residue class

Exit codes: 0 success, 2 parse error, 3 validation failure, 4 pipeline
inconclusive or aborted.  stderr carries diagnostics only.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace
from fractions import Fraction

from . import arc as arcmod
from .decide import ProblemInstance, decide, _pipeline  # noqa: F401
from .dynamics import ExactOrbit, OrbitTable, find_period
from .embedding import embed_problem, select_prime
from .errors import (
    ArityMismatch,
    DegenerateRecurrence,
    Inconclusive,
    InternalContradiction,
    IrreducibilityUncertain,
    NoPrimeInRange,
    NotInverse,
    NonConstantJacobian,
    OrbitSMLError,
    ParseError,
    PrecisionExhausted,
    PrimeUnsupported,
    ValuationBoundViolated,
    ZeroJacobian,
)
from .exact import validate_automorphism
from .instancefile import parse_instance
from .report import (
    build_recurrence_report,
    build_report,
    render_human,
    render_machine,
)
from .sml import LinearRecurrence, zero_set_of_recurrence

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_PIPELINE = 4

_VALIDATION_ERRORS = (
    NotInverse,
    NonConstantJacobian,
    ZeroJacobian,
    ArityMismatch,
    PrimeUnsupported,
    IrreducibilityUncertain,
    DegenerateRecurrence,
)
_PIPELINE_ERRORS = (
    NoPrimeInRange,
    Inconclusive,
    PrecisionExhausted,
    InternalContradiction,
    ValuationBoundViolated,
)


def _add_common_flags(sp):
    sp.add_argument("--prime", type=int, default=None, help="force this prime")
    sp.add_argument("--precision", type=int, default=None, help="override N")
    sp.add_argument("--terms", type=int, default=None, help="override K")
    sp.add_argument(
        "--search-bound", type=int, default=None, help="override exact search bound M"
    )
    sp.add_argument("--threads", type=int, default=None, help="worker threads")
    sp.add_argument(
        "--machine", action="store_true", help="machine-readable JSON report"
    )


def _apply_overrides(instance: ProblemInstance, args) -> ProblemInstance:
    cfg = instance.config
    if args.prime is not None:
        cfg = replace(cfg, prime_override=args.prime)
    if args.precision is not None:
        cfg = replace(cfg, N=args.precision)
    if args.terms is not None:
        cfg = replace(cfg, K=args.terms)
    if getattr(args, "search_bound", None) is not None:
        cfg = replace(cfg, M=args.search_bound)
    if args.threads is not None:
        cfg = replace(cfg, threads=args.threads)
    return replace(instance, config=cfg)


def _load_instance(path: str) -> ProblemInstance:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_instance(fh.read())


def _cmd_decide(args) -> int:
    instance = _apply_overrides(_load_instance(args.instance), args)
    t0 = time.perf_counter()
    result = decide(instance)
    report = build_report(result, time.perf_counter() - t0)
    out = render_machine(report) if args.machine else render_human(report)
    sys.stdout.write(out if out.endswith("\n") else out + "\n")
    return EXIT_OK


def _parse_rationals(text: str, what: str):
    parts = text.replace(",", " ").split()
    if not parts:
        raise ParseError(f"empty {what}")
    try:
        return tuple(Fraction(p) for p in parts)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad rational in {what}: {text!r}") from None


def _cmd_sml(args) -> int:
    coeffs = _parse_rationals(args.coefficients, "coefficients")
    initial = _parse_rationals(args.initial, "initial values")
    if len(coeffs) != len(initial):
        raise ParseError("need as many initial values as coefficients")
    rec = LinearRecurrence(coeffs, initial)
    from .decide import SolverConfig

    cfg = SolverConfig()
    if args.prime is not None:
        cfg = replace(cfg, prime_override=args.prime)
    if args.precision is not None:
        cfg = replace(cfg, N=args.precision)
    if args.terms is not None:
        cfg = replace(cfg, K=args.terms)
    if args.search_bound is not None:
        cfg = replace(cfg, M=args.search_bound)
    if args.threads is not None:
        cfg = replace(cfg, threads=args.threads)
    t0 = time.perf_counter()
    zs = zero_set_of_recurrence(rec, cfg)
    report = build_recurrence_report(zs, time.perf_counter() - t0)
    out = render_machine(report) if args.machine else render_human(report)
    sys.stdout.write(out if out.endswith("\n") else out + "\n")
    return EXIT_OK


def _cmd_validate(args) -> int:
    instance = _load_instance(args.instance)
    cert = validate_automorphism(instance.sigma, instance.sigma_inv)
    det = cert.jac_det
    print("automorphism pair verified: both compositions are the identity")
    print(f"jacobian determinant (constant): {det}")
    return EXIT_OK


def _cmd_embed(args) -> int:
    instance = _apply_overrides(_load_instance(args.instance), args)
    cert_auto = validate_automorphism(instance.sigma, instance.sigma_inv)
    cfg = instance.config
    cert = select_prime(
        instance,
        cert_auto.jac_det,
        N=cfg.N,
        min_prime=cfg.min_prime,
        max_prime=cfg.max_prime,
        congruence=instance.congruence,
        prime_override=cfg.prime_override,
    )
    print(f"p = {cert.p}")
    print(f"theta = {cert.theta_image.residue} mod {cert.p}^{cert.ctx.N}")
    for check in cert.checks:
        print(f"check {check}")
    return EXIT_OK


def _cmd_arc(args) -> int:
    instance = _apply_overrides(_load_instance(args.instance), args)
    cert_auto = validate_automorphism(instance.sigma, instance.sigma_inv)
    cfg = instance.config
    cert = select_prime(
        instance,
        cert_auto.jac_det,
        N=cfg.N,
        min_prime=cfg.min_prime,
        max_prime=cfg.max_prime,
        congruence=instance.congruence,
        prime_override=cfg.prime_override,
    )
    emb = embed_problem(instance, cert_auto, cert)
    period = find_period(emb)
    i = args.class_index % period.j
    K = cfg.K
    mod = emb.ctx.modulus
    point = tuple(x % mod for x in emb.q_res)
    for _ in range(i):
        point = emb.apply_sigma(point)
    glob = [point]
    for _ in range(period.j * K):
        glob.append(emb.apply_sigma(glob[-1]))
    exact = ExactOrbit(cert_auto, instance.q)
    table = OrbitTable(
        ctx=emb.ctx,
        step=period.j,
        values=[glob[period.j * m] for m in range(K + 1)],
        exact=exact,
        offset=i,
    )
    exact_pts = [table.exact_point(m) for m in range(K + 1)]
    print(f"p = {cert.p}, j = {period.j}, class {i}, K = {K}")
    for c in range(instance.n):
        series = arcmod.certify_arc_valuations(
            arcmod.mahler_from_residues(
                emb.ctx,
                [pt[c] for pt in table.values],
                [not pt[c] for pt in exact_pts],
            )
        )
        print(f"coordinate {c}:")
        for line in arcmod.dump_mahler(series).splitlines():
            print(f"  {line}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="orbitsml",
        description=(
            "decide the progression structure of {m : sigma^m(q) in X} "
            "with explicit certificates"
        ),
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("decide", help="run the full decision pipeline")
    sp.add_argument("instance", help="instance file (JSON)")
    _add_common_flags(sp)
    sp.set_defaults(func=_cmd_decide)

    sp = sub.add_parser("sml", help="zero set of a linear recurrence, m >= 0")
    sp.add_argument("coefficients", help='recurrence coefficients, e.g. "1 1"')
    sp.add_argument("initial", help='initial values, e.g. "0 1"')
    _add_common_flags(sp)
    sp.set_defaults(func=_cmd_sml)

    sp = sub.add_parser("validate", help="check the automorphism pair only")
    sp.add_argument("instance")
    sp.set_defaults(func=_cmd_validate)

    sp = sub.add_parser("embed", help="prime selection and embedding only")
    sp.add_argument("instance")
    _add_common_flags(sp)
    sp.set_defaults(func=_cmd_embed)

    sp = sub.add_parser("arc", help="dump the analytic arc of one class")
    sp.add_argument("instance")
    sp.add_argument("--class-index", type=int, default=0)
    _add_common_flags(sp)
    sp.set_defaults(func=_cmd_arc)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as e:
        print(f"parse error: cannot read {e.filename}", file=sys.stderr)
        return EXIT_PARSE
    except _VALIDATION_ERRORS as e:
        print(f"validation failure: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except _PIPELINE_ERRORS as e:
        print(f"pipeline failure: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_PIPELINE


if __name__ == "__main__":
    sys.exit(main())
