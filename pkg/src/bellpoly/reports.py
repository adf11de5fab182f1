"""JSON reports and their independent re-verification.

Every analysis command emits a report that embeds its inputs, the exact
result, and the primal/dual witnesses of every LP it solved, so that any
reader can re-check the claims by arithmetic alone.  ``recheck`` does
exactly that: it rebuilds the (deterministic) programs from the embedded
inputs and verifies the stored certificates with
:func:`bellpoly.lp.verify_certificate`; it never runs the solver.

All rationals are serialized as ``"a/b"`` strings.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Optional

from . import __version__
from .analyses import (
    AB_PAIR,
    AC_PAIR,
    BC_PAIR,
    ExtensionLocalPart,
    ExtensionMin,
    LocalityReport,
    MonogamyReport,
    NsOptimum,
    TransitivityReport,
    extension_local_part_lp,
    extension_lp,
    locality_lp,
    ns_polytope_lp,
    pair_sum_objective,
    stage2_lp,
)
from .bell import BellFunctional, CgTable, cg_to_functional, lift_through
from .files import (
    FileFormatError,
    behavior_from_dict,
    behavior_to_dict,
    cg_table_from_dict,
    cg_table_to_dict,
    scenario_from_dict,
    scenario_to_dict,
)
from .lp import LpSolution, verify_certificate
from .polytopes import enumerate_local_deterministic, marginal_operator
from .rational import format_rational, parse_rational
from .scenario import Behavior, Scenario, check_nonsignaling, validate
from .scenario import marginalize

__all__ = ["RecheckResult", "recheck", "REPORT_KINDS"]

ZERO = Fraction(0)


def _fmt(value: Fraction) -> str:
    return format_rational(value)


def _fmt_list(values) -> list[str]:
    return [format_rational(v) for v in values]


def _parse_list(values: Any, where: str) -> tuple[Fraction, ...]:
    if not isinstance(values, list):
        raise FileFormatError("expected a list of rationals", where)
    return tuple(parse_rational(str(v)) for v in values)


def _functional_to_dict(functional: BellFunctional) -> dict:
    return {
        "name": functional.name,
        "scenario": scenario_to_dict(functional.scenario),
        "coeffs": _fmt_list(functional.coeffs),
        "bound": _fmt(functional.bound),
    }


def _functional_from_dict(data: Any, where: str = "functional") -> BellFunctional:
    scenario = scenario_from_dict(data.get("scenario"), f"{where}.scenario")
    return BellFunctional(
        name=str(data.get("name", "unnamed")),
        scenario=scenario,
        coeffs=_parse_list(data.get("coeffs"), f"{where}.coeffs"),
        bound=parse_rational(str(data.get("bound", "0"))),
    )


def _header(kind: str) -> dict:
    return {"report": kind, "generator": "bellpoly", "version": __version__}


# ---------------------------------------------------------------------------
# Report builders
# ---------------------------------------------------------------------------

def validation_report(behavior: Behavior) -> dict:
    report = validate(behavior)
    ns = check_nonsignaling(behavior)
    return {
        **_header("validate"),
        "behavior": behavior_to_dict(behavior),
        "valid": report.ok,
        "nonsignaling": ns.ok,
        "violations": {
            "negative_entries": [[i, _fmt(v)] for i, v in report.negative_entries],
            "unnormalized_inputs": [[list(u), _fmt(t)]
                                    for u, t in report.unnormalized_inputs],
            "signaling": [eq.equality.label() for eq in ns.violations],
        },
    }


def localpart_report(behavior: Behavior, result: LocalityReport) -> dict:
    doc = {
        **_header("localpart"),
        "behavior": behavior_to_dict(behavior),
        "weight": _fmt(result.weight),
        "local": result.is_local,
        "vertex_count": result.vertex_count,
        "decomposition": {str(j): _fmt(w) for j, w in result.decomposition},
        "dual": _fmt_list(result.dual),
        "separating": None,
    }
    if result.separating is not None:
        doc["separating"] = {
            "coeffs": _fmt_list(result.separating.coeffs),
            "local_bound": _fmt(result.separating.bound),
            "value_on_behavior": _fmt(result.separating.dot(behavior.p)),
        }
    return doc


def belleval_report(table: CgTable, behavior: Behavior, value: Fraction) -> dict:
    return {
        **_header("belleval"),
        "bell": cg_table_to_dict(table),
        "behavior": behavior_to_dict(behavior),
        "value": _fmt(value),
        "bound": _fmt(table.bound),
        "violated": value > table.bound,
    }


def bellmax_report(table: CgTable, which: str, value: Fraction,
                   maximizer: Optional[Behavior] = None,
                   dual: Optional[tuple[Fraction, ...]] = None) -> dict:
    doc = {
        **_header("bellmax"),
        "bell": cg_table_to_dict(table),
        "set": which,
        "value": _fmt(value),
    }
    if maximizer is not None:
        doc["maximizer"] = behavior_to_dict(maximizer)
    if dual is not None:
        doc["dual"] = _fmt_list(dual)
    return doc


def monogamy_report(table: CgTable, tripartite: Scenario,
                    result: MonogamyReport) -> dict:
    return {
        **_header("monogamy"),
        "bell": cg_table_to_dict(table),
        "scenario": scenario_to_dict(tripartite),
        "value": _fmt(result.value),
        "shareable": result.shareable,
        "witness": behavior_to_dict(result.witness),
        "dual": _fmt_list(result.dual),
    }


def extendmin_report(marginal_ab: Behavior, marginal_bc: Behavior,
                     table: CgTable, result: ExtensionMin) -> dict:
    return {
        **_header("extendmin"),
        "marginal_ab": behavior_to_dict(marginal_ab),
        "marginal_bc": behavior_to_dict(marginal_bc),
        "bell_ac": cg_table_to_dict(table),
        "value": _fmt(result.value),
        "forced_violation": result.value > table.bound,
        "extension": behavior_to_dict(result.extension),
        "dual": _fmt_list(result.dual),
    }


def extend_localpart_report(marginal_ab: Behavior, marginal_bc: Behavior,
                            result: ExtensionLocalPart) -> dict:
    return {
        **_header("extend_localpart"),
        "marginal_ab": behavior_to_dict(marginal_ab),
        "marginal_bc": behavior_to_dict(marginal_bc),
        "value": _fmt(result.value),
        "ac_forced_nonlocal": result.value < 1,
        "vertex_count": result.vertex_count,
        "extension": behavior_to_dict(result.extension),
        "ac_weights": {str(j): _fmt(w) for j, w in result.ac_weights},
        "dual": _fmt_list(result.dual),
    }


def transitivity_report(tables: tuple[CgTable, CgTable, CgTable],
                        result: TransitivityReport,
                        witness_path: Optional[str] = None) -> dict:
    table_ab, table_bc, table_ac = tables
    return {
        **_header("transitivity"),
        "bell_ab": cg_table_to_dict(table_ab),
        "bell_bc": cg_table_to_dict(table_bc),
        "bell_ac": cg_table_to_dict(table_ac),
        "scenario": scenario_to_dict(result.scenario),
        "stage1": {
            "value": _fmt(result.stage1.value),
            "dual": _fmt_list(result.stage1.dual),
        },
        "stage2": {
            "value": _fmt(result.stage2.value),
            "primal": _fmt_list(result.stage2.primal),
            "dual": _fmt_list(result.stage2.dual),
        },
        "transitive": result.transitive,
        "witness": behavior_to_dict(result.witness),
        "witness_path": witness_path,
        "marginal_ab": behavior_to_dict(result.marginal_ab),
        "marginal_bc": behavior_to_dict(result.marginal_bc),
        "value_ab": _fmt(result.value_ab),
        "value_bc": _fmt(result.value_bc),
        "ac_min": {
            "value": _fmt(result.ac_min.value),
            "extension": behavior_to_dict(result.ac_min.extension),
            "dual": _fmt_list(result.ac_min.dual),
        },
        "ac_local": {
            "value": _fmt(result.ac_local.value),
            "vertex_count": result.ac_local.vertex_count,
            "extension": behavior_to_dict(result.ac_local.extension),
            "ac_weights": {str(j): _fmt(w) for j, w in result.ac_local.ac_weights},
            "dual": _fmt_list(result.ac_local.dual),
        },
        "ac_nonlocal_certified": result.ac_nonlocal_certified,
    }


def vertices_report(scenario: Scenario, count: int,
                    columns: Optional[list[list[str]]] = None) -> dict:
    doc = {
        **_header("vertices"),
        "scenario": scenario_to_dict(scenario),
        "count": count,
    }
    if columns is not None:
        doc["columns"] = columns
    return doc


# ---------------------------------------------------------------------------
# Recheck
# ---------------------------------------------------------------------------

@dataclass
class RecheckResult:
    kind: str
    checks: list[tuple[str, bool]]

    @property
    def ok(self) -> bool:
        return all(passed for _, passed in self.checks)

    def failures(self) -> list[str]:
        return [name for name, passed in self.checks if not passed]


class _Checker:
    def __init__(self, kind: str):
        self.result = RecheckResult(kind, [])

    def check(self, name: str, passed: bool) -> None:
        self.result.checks.append((name, bool(passed)))


def _primal_from_sparse(length: int, entries: dict, where: str) -> tuple[Fraction, ...]:
    vec = [ZERO] * length
    for key, value in entries.items():
        j = int(key)
        if not 0 <= j < length:
            raise FileFormatError(f"index {j} out of range 0..{length - 1}", where)
        vec[j] = parse_rational(str(value))
    return tuple(vec)


def _recheck_validate(doc: dict, c: _Checker) -> None:
    behavior = behavior_from_dict(doc["behavior"])
    report = validate(behavior)
    ns = check_nonsignaling(behavior)
    c.check("validity verdict matches", report.ok == bool(doc["valid"]))
    c.check("nonsignaling verdict matches", ns.ok == bool(doc["nonsignaling"]))


def _recheck_localpart(doc: dict, c: _Checker) -> None:
    behavior = behavior_from_dict(doc["behavior"])
    weight = parse_rational(str(doc["weight"]))
    vertices = enumerate_local_deterministic(behavior.scenario)
    c.check("vertex count matches", vertices.count == int(doc["vertex_count"]))
    primal = _primal_from_sparse(vertices.count, doc["decomposition"], "decomposition")
    dual = _parse_list(doc["dual"], "dual")
    lp = locality_lp(behavior, vertices)
    sol = LpSolution(status="optimal", value=weight, primal=primal, dual=dual)
    c.check("locality LP certificate", verify_certificate(lp, sol))
    c.check("local verdict matches", (weight == 1) == bool(doc["local"]))
    sep = doc.get("separating")
    c.check("separating functional present iff nonlocal", (sep is not None) == (weight < 1))
    if sep is not None:
        coeffs = _parse_list(sep["coeffs"], "separating.coeffs")
        c.check("separating = negated dual", coeffs == tuple(-y for y in dual))
        functional = BellFunctional("separating-hyperplane", behavior.scenario,
                                    coeffs, parse_rational(str(sep["local_bound"])))
        bound = max(sum((coeffs[i] for i in vertices.support(j)), ZERO)
                    for j in range(vertices.count))
        c.check("separating local bound exact", bound == functional.bound)
        value = functional.dot(behavior.p)
        c.check("separating value recorded", value == parse_rational(
            str(sep["value_on_behavior"])))
        c.check("separating hyperplane separates", value > functional.bound)


def _recheck_belleval(doc: dict, c: _Checker) -> None:
    table = cg_table_from_dict(doc["bell"])
    behavior = behavior_from_dict(doc["behavior"])
    functional = cg_to_functional(table)
    value = parse_rational(str(doc["value"]))
    c.check("behavior is nonsignaling", check_nonsignaling(behavior).ok)
    c.check("value recomputes", functional.dot(behavior.p) == value)
    c.check("violation flag matches", (value > table.bound) == bool(doc["violated"]))


def _recheck_bellmax(doc: dict, c: _Checker) -> None:
    table = cg_table_from_dict(doc["bell"])
    functional = cg_to_functional(table)
    value = parse_rational(str(doc["value"]))
    if doc["set"] == "local":
        vertices = enumerate_local_deterministic(functional.scenario)
        best = max(sum((functional.coeffs[i] for i in vertices.support(j)), ZERO)
                   for j in range(vertices.count))
        c.check("local maximum recomputes", best == value)
        return
    maximizer = behavior_from_dict(doc["maximizer"])
    dual = _parse_list(doc["dual"], "dual")
    lp = ns_polytope_lp(functional.scenario, functional.coeffs, "max")
    sol = LpSolution(status="optimal", value=value, primal=maximizer.p, dual=dual)
    c.check("nonsignaling maximum certificate", verify_certificate(lp, sol))


def _recheck_monogamy(doc: dict, c: _Checker) -> None:
    table = cg_table_from_dict(doc["bell"])
    functional = cg_to_functional(table)
    tripartite = scenario_from_dict(doc["scenario"])
    witness = behavior_from_dict(doc["witness"])
    dual = _parse_list(doc["dual"], "dual")
    value = parse_rational(str(doc["value"]))
    objective = pair_sum_objective(functional, functional, tripartite)
    lp = ns_polytope_lp(tripartite, objective, "max")
    sol = LpSolution(status="optimal", value=value, primal=witness.p, dual=dual)
    c.check("monogamy LP certificate", verify_certificate(lp, sol))
    c.check("shareable flag matches",
            (value > 2 * functional.bound) == bool(doc["shareable"]))


def _recheck_extendmin(doc: dict, c: _Checker) -> None:
    marginal_ab = behavior_from_dict(doc["marginal_ab"])
    marginal_bc = behavior_from_dict(doc["marginal_bc"])
    table = cg_table_from_dict(doc["bell_ac"])
    functional = cg_to_functional(table)
    extension = behavior_from_dict(doc["extension"])
    dual = _parse_list(doc["dual"], "dual")
    value = parse_rational(str(doc["value"]))
    tripartite = extension.scenario
    lifted = lift_through(functional, marginal_operator(tripartite, AC_PAIR))
    lp = extension_lp(marginal_ab, marginal_bc, lifted.coeffs, "min", tripartite)
    sol = LpSolution(status="optimal", value=value, primal=extension.p, dual=dual)
    c.check("extension minimum certificate", verify_certificate(lp, sol))
    c.check("forced violation flag matches",
            (value > table.bound) == bool(doc["forced_violation"]))


def _recheck_extend_localpart(doc: dict, c: _Checker) -> None:
    marginal_ab = behavior_from_dict(doc["marginal_ab"])
    marginal_bc = behavior_from_dict(doc["marginal_bc"])
    extension = behavior_from_dict(doc["extension"])
    dual = _parse_list(doc["dual"], "dual")
    value = parse_rational(str(doc["value"]))
    tripartite = extension.scenario
    ac_vertices = enumerate_local_deterministic(tripartite.restrict(AC_PAIR))
    c.check("vertex count matches", ac_vertices.count == int(doc["vertex_count"]))
    weights = _primal_from_sparse(ac_vertices.count, doc["ac_weights"], "ac_weights")
    lp = extension_local_part_lp(marginal_ab, marginal_bc, tripartite, ac_vertices)
    sol = LpSolution(status="optimal", value=value,
                     primal=extension.p + weights, dual=dual)
    c.check("extension local-part certificate", verify_certificate(lp, sol))
    c.check("forced-nonlocal flag matches",
            (value < 1) == bool(doc["ac_forced_nonlocal"]))


def _recheck_transitivity(doc: dict, c: _Checker) -> None:
    table_ab = cg_table_from_dict(doc["bell_ab"])
    table_bc = cg_table_from_dict(doc["bell_bc"])
    table_ac = cg_table_from_dict(doc["bell_ac"])
    f_ab = cg_to_functional(table_ab)
    f_bc = cg_to_functional(table_bc)
    f_ac = cg_to_functional(table_ac)
    tripartite = scenario_from_dict(doc["scenario"])
    witness = behavior_from_dict(doc["witness"])
    stage1_value = parse_rational(str(doc["stage1"]["value"]))
    stage2_value = parse_rational(str(doc["stage2"]["value"]))

    objective = pair_sum_objective(f_ab, f_bc, tripartite)
    lp1 = ns_polytope_lp(tripartite, objective, "max")
    sol1 = LpSolution(status="optimal", value=stage1_value, primal=witness.p,
                      dual=_parse_list(doc["stage1"]["dual"], "stage1.dual"))
    c.check("stage-1 certificate", verify_certificate(lp1, sol1))

    ac_vertices = enumerate_local_deterministic(tripartite.restrict(AC_PAIR))
    lp2 = stage2_lp(f_ab, f_bc, tripartite, ac_vertices)
    sol2 = LpSolution(status="optimal", value=stage2_value,
                      primal=_parse_list(doc["stage2"]["primal"], "stage2.primal"),
                      dual=_parse_list(doc["stage2"]["dual"], "stage2.dual"))
    c.check("stage-2 certificate", verify_certificate(lp2, sol2))
    c.check("transitive flag matches",
            (stage1_value > stage2_value) == bool(doc["transitive"]))

    marginal_ab = behavior_from_dict(doc["marginal_ab"])
    marginal_bc = behavior_from_dict(doc["marginal_bc"])
    c.check("AB marginal recomputes", marginalize(witness, AB_PAIR) == marginal_ab)
    c.check("BC marginal recomputes", marginalize(witness, BC_PAIR) == marginal_bc)
    value_ab = parse_rational(str(doc["value_ab"]))
    value_bc = parse_rational(str(doc["value_bc"]))
    c.check("AB Bell value recomputes", f_ab.dot(marginal_ab.p) == value_ab)
    c.check("BC Bell value recomputes", f_bc.dot(marginal_bc.p) == value_bc)
    c.check("marginal values sum to stage 1", value_ab + value_bc == stage1_value)

    ac_min = doc["ac_min"]
    lifted = lift_through(f_ac, marginal_operator(tripartite, AC_PAIR))
    lp_min = extension_lp(marginal_ab, marginal_bc, lifted.coeffs, "min", tripartite)
    sol_min = LpSolution(status="optimal",
                         value=parse_rational(str(ac_min["value"])),
                         primal=behavior_from_dict(ac_min["extension"]).p,
                         dual=_parse_list(ac_min["dual"], "ac_min.dual"))
    c.check("AC minimum certificate", verify_certificate(lp_min, sol_min))

    ac_local = doc["ac_local"]
    weights = _primal_from_sparse(ac_vertices.count, ac_local["ac_weights"],
                                  "ac_local.ac_weights")
    lp_local = extension_local_part_lp(marginal_ab, marginal_bc, tripartite, ac_vertices)
    local_value = parse_rational(str(ac_local["value"]))
    sol_local = LpSolution(status="optimal", value=local_value,
                           primal=behavior_from_dict(ac_local["extension"]).p + weights,
                           dual=_parse_list(ac_local["dual"], "ac_local.dual"))
    c.check("AC local-part certificate", verify_certificate(lp_local, sol_local))
    c.check("AC nonlocality flag matches",
            (local_value < 1) == bool(doc["ac_nonlocal_certified"]))


def _recheck_vertices(doc: dict, c: _Checker) -> None:
    scenario = scenario_from_dict(doc["scenario"])
    vertices = enumerate_local_deterministic(scenario)
    c.check("vertex count recomputes", vertices.count == int(doc["count"]))
    if "columns" in doc:
        claimed = doc["columns"]
        c.check("column count matches", len(claimed) == vertices.count)
        ok = True
        for j, col in enumerate(claimed):
            expected = vertices.column(j).p
            got = tuple(parse_rational(str(v)) for v in col)
            if got != expected:
                ok = False
                break
        c.check("columns recompute", ok)


_RECHECKERS: dict[str, Callable[[dict, _Checker], None]] = {
    "validate": _recheck_validate,
    "localpart": _recheck_localpart,
    "belleval": _recheck_belleval,
    "bellmax": _recheck_bellmax,
    "monogamy": _recheck_monogamy,
    "extendmin": _recheck_extendmin,
    "extend_localpart": _recheck_extend_localpart,
    "transitivity": _recheck_transitivity,
    "vertices": _recheck_vertices,
}

REPORT_KINDS = tuple(sorted(_RECHECKERS))


def recheck(doc: dict) -> RecheckResult:
    """Re-verify a report from its own content; never runs the solver.

    Raises :class:`bellpoly.files.FileFormatError` on malformed reports;
    a well-formed report with false claims comes back with failed checks.
    """
    if not isinstance(doc, dict) or "report" not in doc:
        raise FileFormatError("not a toolkit report (missing 'report' field)")
    kind = doc["report"]
    handler = _RECHECKERS.get(kind)
    if handler is None:
        raise FileFormatError(f"unknown report kind {kind!r}")
    checker = _Checker(kind)
    try:
        handler(doc, checker)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, FileFormatError):
            raise
        raise FileFormatError(f"malformed {kind} report: {exc!r}") from exc
    return checker.result
