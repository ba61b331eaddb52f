"""Textual instance format shared by all CLI subcommands.

An instance file is JSON with exact rational coefficients as strings
(never floats):

    {
      "field": {"type": "Q"}
             | {"type": "number_field", "minpoly": [c0, ..., 1],
                "congruence": {"mod": 6, "residue": 1}},
      "n": 2,
      "sigma":     [ [ {"coeff": "1", "exps": [0, 1]}, ... ], ... ],
      "sigma_inv": [ ... ],
      "point":   ["0", "1"],
      "variety": [ [ {"coeff": "1", "exps": [1, 0]} ] ],
      "config":  {"N": 64, "K": 144, "M": 1000, "M_prime": 50,
                  "r_max": null, "max_prime": 10000, "prime": null,
                  "threads": 1}
    }

A coefficient is either a rational string ("3/4") or, over a number
field, a list of rational strings giving coordinates over the power basis
of theta.  Syntax errors carry line/column; schema errors carry the JSON
path of the offending element.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .decide import ProblemInstance, SolverConfig
from .errors import OrbitSMLError, ParseError
from .exact import AlgNum, MultiPoly, NumberField, PolyMap

__all__ = ["parse_instance", "instance_to_dict", "render_instance"]

_CONFIG_KEYS = {
    "N": "N",
    "K": "K",
    "M": "M",
    "M_prime": "M_prime",
    "r_max": "r_max",
    "min_prime": "min_prime",
    "max_prime": "max_prime",
    "prime": "prime_override",
    "threads": "threads",
}


def _fail(msg, path):
    raise ParseError(msg, path=path)


def _parse_rational(s, path) -> Fraction:
    if isinstance(s, bool) or not isinstance(s, (str, int)):
        _fail("rational coefficients must be strings or integers", path)
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        _fail(f"not a rational: {s!r}", path)


def _parse_coeff(obj, field: NumberField, path) -> AlgNum:
    if isinstance(obj, list):
        if field.is_rational:
            _fail("coordinate-vector coefficient over Q", path)
        if len(obj) != field.degree:
            _fail(
                f"coefficient needs {field.degree} coordinates, got {len(obj)}",
                path,
            )
        return field.element(
            [_parse_rational(c, f"{path}[{i}]") for i, c in enumerate(obj)]
        )
    return field.from_rational(_parse_rational(obj, path))


def _parse_poly(obj, n: int, field: NumberField, path) -> MultiPoly:
    if not isinstance(obj, list):
        _fail("a polynomial is a list of terms", path)
    poly = MultiPoly.zero(n)
    for t, term in enumerate(obj):
        tpath = f"{path}[{t}]"
        if not isinstance(term, dict) or set(term) != {"coeff", "exps"}:
            _fail('a term is {"coeff": ..., "exps": [...]}', tpath)
        exps = term["exps"]
        if (
            not isinstance(exps, list)
            or len(exps) != n
            or not all(isinstance(e, int) and e >= 0 for e in exps)
        ):
            _fail(f"exps must be {n} nonnegative integers", f"{tpath}.exps")
        coeff = _parse_coeff(term["coeff"], field, f"{tpath}.coeff")
        poly = poly + MultiPoly(n, {tuple(exps): coeff})
    return poly


def _parse_field(obj, path):
    if not isinstance(obj, dict) or "type" not in obj:
        _fail('field must be {"type": "Q"} or a number_field object', path)
    if obj["type"] == "Q":
        return NumberField.create((0, 1)), None
    if obj["type"] != "number_field":
        _fail(f"unknown field type {obj['type']!r}", f"{path}.type")
    minpoly = obj.get("minpoly")
    if not isinstance(minpoly, list) or len(minpoly) < 2:
        _fail("minpoly must be a list of integers, degree >= 1", f"{path}.minpoly")
    try:
        field = NumberField.create(tuple(minpoly))
    except (OrbitSMLError, ValueError) as e:
        _fail(f"bad minimal polynomial: {e}", f"{path}.minpoly")
    congruence = None
    if "congruence" in obj and obj["congruence"] is not None:
        c = obj["congruence"]
        if (
            not isinstance(c, dict)
            or not isinstance(c.get("mod"), int)
            or not isinstance(c.get("residue"), int)
            or c["mod"] < 1
        ):
            _fail('congruence is {"mod": M, "residue": r}', f"{path}.congruence")
        congruence = (c["mod"], c["residue"])
    return field, congruence


def _parse_config(obj, path) -> SolverConfig:
    if obj is None:
        return SolverConfig()
    if not isinstance(obj, dict):
        _fail("config must be an object", path)
    kwargs = {}
    for key, value in obj.items():
        if key not in _CONFIG_KEYS:
            _fail(f"unknown config key {key!r}", f"{path}.{key}")
        if value is not None and (isinstance(value, bool) or not isinstance(value, int)):
            _fail(f"config value for {key!r} must be an integer", f"{path}.{key}")
        kwargs[_CONFIG_KEYS[key]] = value
    try:
        return SolverConfig(**kwargs)
    except ValueError as e:
        _fail(str(e), path)


def parse_instance(text: str) -> ProblemInstance:
    """Parse an instance document; errors carry a position annotation."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, line=e.lineno, col=e.colno) from None
    if not isinstance(data, dict):
        _fail("instance must be a JSON object", "$")
    for key in ("field", "n", "sigma", "sigma_inv", "point", "variety"):
        if key not in data:
            _fail(f"missing required key {key!r}", "$")
    field, congruence = _parse_field(data["field"], "field")
    n = data["n"]
    if not isinstance(n, int) or n < 1:
        _fail("n must be a positive integer", "n")

    def parse_map(key):
        obj = data[key]
        if not isinstance(obj, list) or len(obj) != n:
            _fail(f"{key} must list exactly n = {n} polynomials", key)
        return PolyMap(
            n,
            tuple(
                _parse_poly(comp, n, field, f"{key}[{i}]")
                for i, comp in enumerate(obj)
            ),
        )

    sigma = parse_map("sigma")
    sigma_inv = parse_map("sigma_inv")
    point_obj = data["point"]
    if not isinstance(point_obj, list) or len(point_obj) != n:
        _fail(f"point must have n = {n} coordinates", "point")
    point = tuple(
        _parse_coeff(c, field, f"point[{i}]") for i, c in enumerate(point_obj)
    )
    var_obj = data["variety"]
    if not isinstance(var_obj, list) or not var_obj:
        _fail("variety must be a nonempty list of polynomials", "variety")
    variety = tuple(
        _parse_poly(g, n, field, f"variety[{i}]") for i, g in enumerate(var_obj)
    )
    config = _parse_config(data.get("config"), "config")
    try:
        return ProblemInstance(
            field=field,
            n=n,
            sigma=sigma,
            sigma_inv=sigma_inv,
            q=point,
            variety=variety,
            config=config,
            congruence=congruence,
        )
    except ValueError as e:
        _fail(str(e), "$")


def _coeff_to_obj(a: AlgNum):
    if a.field.is_rational:
        return str(a.coords[0])
    return [str(c) for c in a.coords]


def _poly_to_obj(poly: MultiPoly):
    return [
        {"coeff": _coeff_to_obj(poly.terms[e]), "exps": list(e)}
        for e in sorted(poly.terms)
    ]


def instance_to_dict(instance: ProblemInstance) -> dict:
    field_obj = (
        {"type": "Q"}
        if instance.field.is_rational
        else {"type": "number_field", "minpoly": list(instance.field.minpoly)}
    )
    if instance.congruence is not None:
        field_obj["congruence"] = {
            "mod": instance.congruence[0],
            "residue": instance.congruence[1],
        }
    cfg = instance.config
    return {
        "field": field_obj,
        "n": instance.n,
        "sigma": [_poly_to_obj(c) for c in instance.sigma.components],
        "sigma_inv": [_poly_to_obj(c) for c in instance.sigma_inv.components],
        "point": [_coeff_to_obj(a) for a in instance.q],
        "variety": [_poly_to_obj(g) for g in instance.variety],
        "config": {
            "N": cfg.N,
            "K": cfg.K,
            "M": cfg.M,
            "M_prime": cfg.M_prime,
            "r_max": cfg.r_max,
            "min_prime": cfg.min_prime,
            "max_prime": cfg.max_prime,
            "prime": cfg.prime_override,
            "threads": cfg.threads,
        },
    }


def render_instance(instance: ProblemInstance) -> str:
    return json.dumps(instance_to_dict(instance), indent=2, sort_keys=True)
