"""Report construction and rendering, human and machine forms.

The machine form is canonical JSON mirroring the report fields bit-exactly
(rationals and residues as decimal strings), so parse(render(r)) == r.
The human form prints the answer first and the certificates after, for
top-down desk verification.  Identical instance and config produce
byte-identical reports up to the timing block, which records wall time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .decide import ProgressionSet
from .sml import RecurrenceZeroSet

__all__ = ["Report", "build_report", "build_recurrence_report",
           "render_machine", "parse_machine", "render_human"]


@dataclass(frozen=True)
class Report:
    """Canonical nested-dict form of an answer plus its certificates."""

    data: dict

    @property
    def answer(self) -> dict:
        return self.data["answer"]

    @property
    def certificates(self) -> dict:
        return self.data["certificates"]

    def without_timing(self) -> "Report":
        d = dict(self.data)
        d.pop("timing", None)
        return Report(d)


def _root_obj(rc):
    return {
        "kind": rc.kind,
        "residue": str(rc.residue),
        "depth": rc.depth,
        "location": None if rc.location is None else str(rc.location),
        "location_depth": rc.loc,
        "matched": rc.matched,
        "matched_global": rc.matched_global,
        "excluded": rc.excluded,
    }


def _class_obj(report):
    a = report.analysis
    obj = {
        "index": report.index,
        "completeness": a.completeness,
    }
    if a.verdict.kind == "identically_zero":
        obj["verdict"] = "full"
        obj["precision_stamp"] = {
            "terms": a.verdict.terms,
            "precision": a.verdict.precision,
        }
        obj["exact_checks"] = a.verdict.exact_checks
        obj["all_exact"] = a.verdict.all_exact
    else:
        obj["verdict"] = "finite"
        obj["strassman"] = {
            "bound": a.verdict.bound,
            "min_valuation": a.verdict.min_valuation,
            "attained_index": a.verdict.attained_index,
            "generator": a.generator_index,
        }
        obj["zeros"] = list(report.zeros_global)
        obj["roots"] = [_root_obj(rc) for rc in a.roots]
    return obj


def _certificates_obj(ps: ProgressionSet) -> dict:
    cfg = ps.config_used
    return {
        "prime": ps.embedding.p,
        "theta": str(ps.embedding.theta_image.residue),
        "theta_root_mod_p": ps.embedding.root_mod_p,
        "embedding_checks": list(ps.embedding.checks),
        "period": {"j": ps.period.j, "d": ps.period.d, "e": ps.period.e},
        "jacobian_det": [str(c) for c in ps.automorphism.jac_det.coords],
        "config": {
            "N": cfg.N,
            "K": cfg.K,
            "M": cfg.M,
            "M_prime": cfg.M_prime,
            "r_max": cfg.isolation_depth,
            "max_prime": cfg.max_prime,
        },
        "classes": [_class_obj(r) for r in ps.class_reports],
        "completeness": ps.completeness,
    }


def build_report(ps: ProgressionSet, seconds: float) -> Report:
    return Report(
        {
            "answer": {
                "view": "integers",
                "modulus": ps.modulus,
                "full_classes": sorted(ps.full_classes),
                "sporadic": list(ps.sporadic),
            },
            "certificates": _certificates_obj(ps),
            "density": ps.density,
            "timing": {"seconds": round(seconds, 6)},
        }
    )


def build_recurrence_report(zs: RecurrenceZeroSet, seconds: float) -> Report:
    answer = {
        "view": "m>=0",
        "modulus": zs.modulus,
        "full_classes": sorted(zs.classes),
        "sporadic": list(zs.sporadic),
        "excluded": list(zs.excluded),
        "shift": zs.offset,
    }
    data = {"answer": answer, "timing": {"seconds": round(seconds, 6)}}
    if zs.certificate is not None:
        data["certificates"] = _certificates_obj(zs.certificate)
        data["density"] = zs.certificate.density
    else:
        data["certificates"] = {"note": "empty recurrence; decided directly"}
        data["density"] = "not_dense: orbit eventually constant zero"
    return Report(data)


def render_machine(report: Report) -> str:
    return json.dumps(report.data, indent=2, sort_keys=True)


def parse_machine(text: str) -> Report:
    return Report(json.loads(text))


def _describe_classes(answer) -> str:
    mods = answer["modulus"]
    classes = answer["full_classes"]
    if not classes:
        return "no full progressions"
    return ", ".join(f"{c} (mod {mods})" for c in classes)


def render_human(report: Report) -> str:
    a = report.answer
    lines = []
    lines.append(f"answer ({a['view']}):")
    lines.append(f"  progressions: {_describe_classes(a)}")
    spor = a["sporadic"]
    lines.append(f"  sporadic: {('{' + ', '.join(map(str, spor)) + '}') if spor else '{}'}")
    if a.get("excluded"):
        lines.append(
            "  excluded from progressions (initial segment): "
            + ", ".join(map(str, a["excluded"]))
        )
    lines.append(f"  density: {report.data.get('density', '')}")
    certs = report.certificates
    lines.append("certificates:")
    if "note" in certs:
        lines.append(f"  {certs['note']}")
    else:
        lines.append(
            f"  prime p = {certs['prime']}, theta = {certs['theta']} "
            f"(root {certs['theta_root_mod_p']} mod p)"
        )
        for check in certs["embedding_checks"]:
            lines.append(f"    check {check}")
        per = certs["period"]
        lines.append(
            f"  period j = {per['j']} = d {per['d']} * e {per['e']}"
        )
        cfg = certs["config"]
        lines.append(
            f"  precision N = {cfg['N']}, terms K = {cfg['K']}, "
            f"search |m| <= {cfg['M']}, isolation depth {cfg['r_max']}"
        )
        full = [c for c in certs["classes"] if c["verdict"] == "full"]
        finite = [c for c in certs["classes"] if c["verdict"] == "finite"]
        lines.append(
            f"  classes: {len(certs['classes'])} total, {len(full)} full, "
            f"{len(finite)} finite"
        )
        for c in certs["classes"]:
            if c["verdict"] == "full":
                stamp = c["precision_stamp"]
                extra = ", all values exactly zero" if c["all_exact"] else ""
                lines.append(
                    f"    class {c['index']}: full at precision "
                    f"(K={stamp['terms']}, p^{stamp['precision']}), "
                    f"{c['exact_checks']} exact checks{extra}"
                )
            else:
                st = c["strassman"]
                zs = c.get("zeros", [])
                lines.append(
                    f"    class {c['index']}: finite, bound {st['bound']} "
                    f"(min valuation {st['min_valuation']} at index "
                    f"{st['attained_index']}), zeros {zs}, "
                    f"{c['completeness']}"
                )
        lines.append(f"  completeness: {certs['completeness']}")
    t = report.data.get("timing", {}).get("seconds")
    if t is not None:
        lines.append(f"timing: {t} s")
    return "\n".join(lines) + "\n"
