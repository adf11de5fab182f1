"""Command-line interface.

Every command reads exact-rational JSON files, runs one analysis, and
emits a text or JSON report.  JSON reports embed full witnesses and LP
certificates and can be re-verified offline with ``bellpoly recheck``.

Exit codes are a stable contract:

* 0 - affirmative result (valid / local / monogamous / transitive / ...)
* 1 - negative or violation result
* 2 - usage or input error

Bell-table arguments accept either a file path or ``@NAME`` for a catalog
entry (``bellpoly catalog`` lists them).
"""

from __future__ import annotations

import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

import click

from . import __version__
from .analyses import (
    InfeasibleMarginalsError,
    MarginalMismatchError,
    local_part,
    max_ac_local_part,
    max_bell_local,
    max_bell_ns,
    min_bell_extension,
    monogamy_max,
    transitivity_search,
)
from .bell import CgTable, catalog, cg_to_functional, evaluate
from .files import (
    FileFormatError,
    load_behavior,
    load_bell,
    save_behavior,
    cg_table_to_dict,
)
from .polytopes import DEFAULT_ENUMERATION_CAP, EnumerationCapError, \
    enumerate_local_deterministic
from .rational import format_rational
from . import reports
from .scenario import (
    InvalidBehaviorError,
    Scenario,
    SignalingError,
    check_nonsignaling,
    validate,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_ERROR = 2


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_ERROR)


def show(value: Fraction) -> str:
    """Exact fraction with a 6-digit decimal approximation alongside."""
    return f"{format_rational(value)} (~ {float(value):.6f})"


def _load_behavior_arg(path: str):
    try:
        return load_behavior(path)
    except FileFormatError as exc:
        _fail(str(exc))


def _load_bell_arg(ref: str) -> CgTable:
    if ref.startswith("@"):
        name = ref[1:]
        tables = catalog()
        if name not in tables:
            _fail(f"unknown catalog entry {name!r}; available: {', '.join(sorted(tables))}")
        return tables[name]
    try:
        return load_bell(ref)
    except FileFormatError as exc:
        _fail(str(exc))


def _emit(doc: dict, text: str, fmt: str, out: Optional[str]) -> None:
    payload = json.dumps(doc, indent=2) + "\n" if fmt == "json" else text + "\n"
    if out:
        Path(out).write_text(payload)
    else:
        click.echo(payload, nl=False)


def _format_options(fn):
    fn = click.option("--format", "fmt", type=click.Choice(["text", "json"]),
                      default="text", show_default=True,
                      help="Report format.")(fn)
    fn = click.option("--out", type=click.Path(dir_okay=False, writable=True),
                      default=None, help="Write the report to a file instead of stdout.")(fn)
    return fn


def _cap_option(fn):
    return click.option("--cap", type=int, default=DEFAULT_ENUMERATION_CAP,
                        show_default=True,
                        help="Vertex enumeration cap.")(fn)


@click.group()
@click.version_option(version=__version__, prog_name="bellpoly")
def main() -> None:
    """Exact Bell-scenario analysis over the local and nonsignaling polytopes."""


@main.command("validate")
@click.argument("behavior_file", type=str)
@_format_options
def cmd_validate(behavior_file: str, fmt: str, out: Optional[str]) -> None:
    """Check positivity, normalization and nonsignaling of a behavior file."""
    behavior = _load_behavior_arg(behavior_file)
    doc = reports.validation_report(behavior)
    lines = [f"behavior: {behavior_file}",
             f"valid probability table: {'yes' if doc['valid'] else 'NO'}",
             f"nonsignaling: {'yes' if doc['nonsignaling'] else 'NO'}"]
    for i, v in doc["violations"]["negative_entries"]:
        lines.append(f"  negative entry p[{i}] = {v}")
    for u, total in doc["violations"]["unnormalized_inputs"]:
        lines.append(f"  input {tuple(u)} sums to {total}")
    for label in doc["violations"]["signaling"]:
        lines.append(f"  violated: {label}")
    _emit(doc, "\n".join(lines), fmt, out)
    sys.exit(EXIT_OK if doc["valid"] and doc["nonsignaling"] else EXIT_NEGATIVE)


@main.command("localpart")
@click.argument("behavior_file", type=str)
@_format_options
@_cap_option
def cmd_localpart(behavior_file: str, fmt: str, out: Optional[str], cap: int) -> None:
    """Maximal local weight of a behavior; exit 0 iff it is local."""
    behavior = _load_behavior_arg(behavior_file)
    try:
        result = local_part(behavior, cap=cap)
    except (InvalidBehaviorError, SignalingError, EnumerationCapError) as exc:
        _fail(str(exc))
    doc = reports.localpart_report(behavior, result)
    lines = [f"local part weight: {show(result.weight)}",
             f"local: {'yes' if result.is_local else 'no'}"]
    if result.decomposition:
        lines.append("decomposition (vertex: weight):")
        for j, w in result.decomposition:
            lines.append(f"  {j}: {show(w)}")
    if result.separating is not None:
        lines.append(f"separating Bell functional: value on behavior "
                     f"{show(result.separating.dot(behavior.p))} "
                     f"> local bound {show(result.separating.bound)}")
    _emit(doc, "\n".join(lines), fmt, out)
    sys.exit(EXIT_OK if result.is_local else EXIT_NEGATIVE)


@main.command("belleval")
@click.argument("bell_file", type=str)
@click.argument("behavior_file", type=str)
@_format_options
def cmd_belleval(bell_file: str, behavior_file: str, fmt: str, out: Optional[str]) -> None:
    """Bell value of a behavior; exit 1 iff the inequality is violated."""
    table = _load_bell_arg(bell_file)
    behavior = _load_behavior_arg(behavior_file)
    try:
        value = evaluate(cg_to_functional(table), behavior)
    except (ValueError, SignalingError) as exc:
        _fail(str(exc))
    doc = reports.belleval_report(table, behavior, value)
    text = (f"{table.name} value: {show(value)}\n"
            f"bound: {show(table.bound)}\n"
            f"violated: {'yes' if doc['violated'] else 'no'}")
    _emit(doc, text, fmt, out)
    sys.exit(EXIT_NEGATIVE if doc["violated"] else EXIT_OK)


@main.command("bellmax")
@click.argument("bell_file", type=str)
@click.option("--set", "which", type=click.Choice(["ns", "local"]), default="ns",
              show_default=True, help="Optimize over nonsignaling or local behaviors.")
@_format_options
@_cap_option
def cmd_bellmax(bell_file: str, which: str, fmt: str, out: Optional[str], cap: int) -> None:
    """Maximum Bell value over the nonsignaling or local set."""
    table = _load_bell_arg(bell_file)
    functional = cg_to_functional(table)
    if which == "local":
        try:
            value = max_bell_local(functional, cap=cap)
        except EnumerationCapError as exc:
            _fail(str(exc))
        doc = reports.bellmax_report(table, "local", value)
        text = f"{table.name} local maximum: {show(value)}"
    else:
        result = max_bell_ns(functional)
        value = result.value
        doc = reports.bellmax_report(table, "ns", value, result.maximizer, result.dual)
        text = f"{table.name} nonsignaling maximum: {show(value)}"
    _emit(doc, text, fmt, out)
    sys.exit(EXIT_OK)


@main.command("monogamy")
@click.argument("bell_file", type=str)
@_format_options
def cmd_monogamy(bell_file: str, fmt: str, out: Optional[str]) -> None:
    """Maximum of the AB + BC sum of a bipartite inequality over tripartite
    nonsignaling behaviors; exit 0 iff the inequality is monogamous."""
    table = _load_bell_arg(bell_file)
    functional = cg_to_functional(table)
    m = table.m
    tripartite = Scenario((m, m, m), (2, 2, 2))
    result = monogamy_max(functional, tripartite)
    doc = reports.monogamy_report(table, tripartite, result)
    text = (f"max {table.name}(AB) + {table.name}(BC) over nonsignaling: "
            f"{show(result.value)}\n"
            f"monogamous (no simultaneous violation): "
            f"{'yes' if not result.shareable else 'no'}")
    _emit(doc, text, fmt, out)
    sys.exit(EXIT_OK if not result.shareable else EXIT_NEGATIVE)


@main.command("transitivity")
@click.argument("bell_ab", type=str)
@click.argument("bell_bc", type=str)
@click.argument("bell_ac", type=str)
@click.option("--witness-out", type=click.Path(dir_okay=False, writable=True),
              default="transitivity_witness.json", show_default=True,
              help="Where to write the stage-1 witness behavior file.")
@_format_options
@_cap_option
def cmd_transitivity(bell_ab: str, bell_bc: str, bell_ac: str, witness_out: str,
                     fmt: str, out: Optional[str], cap: int) -> None:
    """Two-stage transitivity search; exit 0 iff stage 1 strictly beats stage 2."""
    table_ab = _load_bell_arg(bell_ab)
    table_bc = _load_bell_arg(bell_bc)
    table_ac = _load_bell_arg(bell_ac)
    try:
        result = transitivity_search(cg_to_functional(table_ab),
                                     cg_to_functional(table_bc),
                                     cg_to_functional(table_ac),
                                     cap=cap)
    except (ValueError, EnumerationCapError) as exc:
        _fail(str(exc))
    save_behavior(result.witness, witness_out)
    doc = reports.transitivity_report((table_ab, table_bc, table_ac), result,
                                      witness_path=witness_out)
    lines = [
        f"stage 1 (nonsignaling) optimum: {show(result.stage1_value)}",
        f"stage 2 (AC-local) optimum:     {show(result.stage2_value)}",
        f"transitive (stage1 > stage2): {'yes' if result.transitive else 'no'}",
        f"witness written to: {witness_out}",
        f"{table_ab.name} on AB marginal: {show(result.value_ab)}",
        f"{table_bc.name} on BC marginal: {show(result.value_bc)}",
        f"min {table_ac.name} on AC over consistent extensions: "
        f"{show(result.ac_min_value)}",
        f"max AC local part over consistent extensions: "
        f"{show(result.ac_max_local_part)}",
        f"AC forced nonlocal: {'yes' if result.ac_nonlocal_certified else 'no'}",
    ]
    _emit(doc, "\n".join(lines), fmt, out)
    sys.exit(EXIT_OK if result.transitive else EXIT_NEGATIVE)


@main.command("extendmin")
@click.argument("marginal_ab", type=str)
@click.argument("marginal_bc", type=str)
@click.argument("bell_ac", type=str)
@_format_options
def cmd_extendmin(marginal_ab: str, marginal_bc: str, bell_ac: str,
                  fmt: str, out: Optional[str]) -> None:
    """Minimum AC Bell value over nonsignaling extensions of two marginals;
    exit 0 iff the marginals force a violation."""
    m_ab = _load_behavior_arg(marginal_ab)
    m_bc = _load_behavior_arg(marginal_bc)
    table = _load_bell_arg(bell_ac)
    try:
        result = min_bell_extension(m_ab, m_bc, cg_to_functional(table))
    except (MarginalMismatchError, InfeasibleMarginalsError, ValueError) as exc:
        _fail(str(exc))
    doc = reports.extendmin_report(m_ab, m_bc, table, result)
    text = (f"min {table.name} on AC over consistent extensions: {show(result.value)}\n"
            f"forces violation (> bound {show(table.bound)}): "
            f"{'yes' if doc['forced_violation'] else 'no'}")
    _emit(doc, text, fmt, out)
    sys.exit(EXIT_OK if doc["forced_violation"] else EXIT_NEGATIVE)


@main.command("extend-localpart")
@click.argument("marginal_ab", type=str)
@click.argument("marginal_bc", type=str)
@_format_options
@_cap_option
def cmd_extend_localpart(marginal_ab: str, marginal_bc: str, fmt: str,
                         out: Optional[str], cap: int) -> None:
    """Maximum AC local part over nonsignaling extensions of two marginals;
    exit 0 iff some extension has a local AC marginal."""
    m_ab = _load_behavior_arg(marginal_ab)
    m_bc = _load_behavior_arg(marginal_bc)
    try:
        result = max_ac_local_part(m_ab, m_bc, cap=cap)
    except (MarginalMismatchError, InfeasibleMarginalsError, EnumerationCapError,
            ValueError) as exc:
        _fail(str(exc))
    doc = reports.extend_localpart_report(m_ab, m_bc, result)
    text = (f"max AC local part over consistent extensions: {show(result.value)}\n"
            f"AC forced nonlocal: {'yes' if doc['ac_forced_nonlocal'] else 'no'}")
    _emit(doc, text, fmt, out)
    sys.exit(EXIT_OK if result.value == 1 else EXIT_NEGATIVE)


@main.command("vertices")
@click.argument("inputs", type=str)
@click.argument("outputs", type=str)
@click.option("--columns", is_flag=True, help="Include full 0/1 columns in the report.")
@_format_options
@_cap_option
def cmd_vertices(inputs: str, outputs: str, columns: bool, fmt: str,
                 out: Optional[str], cap: int) -> None:
    """Count (and optionally dump) the local deterministic vertices of the
    scenario with the given comma-separated input and output counts."""
    try:
        scenario = Scenario(tuple(int(v) for v in inputs.split(",")),
                            tuple(int(v) for v in outputs.split(",")))
    except ValueError as exc:
        _fail(str(exc))
    try:
        vertices = enumerate_local_deterministic(scenario, cap)
    except EnumerationCapError as exc:
        _fail(str(exc))
    cols = None
    if columns:
        cols = [[format_rational(v) for v in vertices.column(j).p]
                for j in range(vertices.count)]
    doc = reports.vertices_report(scenario, vertices.count, cols)
    text = f"local deterministic vertices: {vertices.count}"
    _emit(doc, text, fmt, out)
    sys.exit(EXIT_OK)


@main.command("catalog")
@click.argument("name", type=str, required=False)
@_format_options
def cmd_catalog(name: Optional[str], fmt: str, out: Optional[str]) -> None:
    """List the stock Bell inequalities, or write one as a Bell file."""
    tables = catalog()
    if name is None:
        doc = {"report": "catalog", "names": sorted(tables)}
        text = "\n".join(sorted(tables))
        _emit(doc, text, fmt, out)
        sys.exit(EXIT_OK)
    if name not in tables:
        _fail(f"unknown catalog entry {name!r}; available: {', '.join(sorted(tables))}")
    doc = cg_table_to_dict(tables[name])
    _emit(doc, json.dumps(doc, indent=2), fmt, out)
    sys.exit(EXIT_OK)


@main.command("recheck")
@click.argument("report_file", type=str)
def cmd_recheck(report_file: str) -> None:
    """Re-verify a JSON report's witnesses and certificates offline."""
    try:
        doc = json.loads(Path(report_file).read_text())
    except OSError as exc:
        _fail(str(exc))
    except json.JSONDecodeError as exc:
        _fail(f"invalid JSON in {report_file}: {exc}")
    try:
        result = reports.recheck(doc)
    except FileFormatError as exc:
        _fail(str(exc))
    for check, passed in result.checks:
        click.echo(f"[{'ok' if passed else 'FAIL'}] {check}")
    click.echo(f"recheck: {'pass' if result.ok else 'FAIL'} ({result.kind})")
    sys.exit(EXIT_OK if result.ok else EXIT_NEGATIVE)


if __name__ == "__main__":
    main()
