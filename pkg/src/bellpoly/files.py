"""Behavior and Bell-table files: JSON with exact rational strings.

A behavior file is::

    {"scenario": {"parties": 2, "inputs": [2, 2], "outputs": [2, 2]},
     "p": ["1/2", "0", ...]}

with ``p`` in the package's flat index order (inputs outer, outputs
inner, party 0 most significant).  A Bell file is::

    {"name": "CH", "m": 2, "row": ["-1", "0"], "col": ["-1", "0"],
     "body": [["1", "1"], ["1", "-1"]], "bound": "0"}

All rationals are strings ``"a/b"`` or integer strings; parsing is exact
and round-trips exactly.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence, Union

from .bell import CgTable
from .rational import RationalParseError, format_rational, parse_rational
from .scenario import Behavior, Scenario

__all__ = [
    "FileFormatError",
    "behavior_to_dict",
    "behavior_from_dict",
    "load_behavior",
    "save_behavior",
    "cg_table_to_dict",
    "cg_table_from_dict",
    "load_bell",
    "save_bell",
    "scenario_to_dict",
    "scenario_from_dict",
]


class FileFormatError(ValueError):
    """A file (or embedded document) is not a valid toolkit object."""

    def __init__(self, message: str, where: str = ""):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


def _rational(value: Any, where: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise FileFormatError(f"expected a rational string, got {value!r}", where)
    try:
        return parse_rational(str(value))
    except RationalParseError as exc:
        raise FileFormatError(str(exc), where) from exc


def _int_list(value: Any, where: str) -> tuple[int, ...]:
    if not isinstance(value, list) or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in value):
        raise FileFormatError(f"expected a list of integers, got {value!r}", where)
    return tuple(value)


def scenario_to_dict(scenario: Scenario) -> dict:
    return {
        "parties": scenario.parties,
        "inputs": list(scenario.inputs),
        "outputs": list(scenario.outputs),
    }


def scenario_from_dict(data: Any, where: str = "scenario") -> Scenario:
    if not isinstance(data, dict):
        raise FileFormatError("scenario must be an object", where)
    inputs = _int_list(data.get("inputs"), f"{where}.inputs")
    outputs = _int_list(data.get("outputs"), f"{where}.outputs")
    try:
        scenario = Scenario(inputs, outputs)
    except ValueError as exc:
        raise FileFormatError(str(exc), where) from exc
    if "parties" in data and data["parties"] != scenario.parties:
        raise FileFormatError(
            f"parties field {data['parties']} disagrees with {scenario.parties} "
            f"input/output entries", where)
    return scenario


def behavior_to_dict(behavior: Behavior) -> dict:
    return {
        "scenario": scenario_to_dict(behavior.scenario),
        "p": [format_rational(v) for v in behavior.p],
    }


def behavior_from_dict(data: Any, where: str = "behavior") -> Behavior:
    if not isinstance(data, dict):
        raise FileFormatError("behavior must be an object", where)
    scenario = scenario_from_dict(data.get("scenario"), f"{where}.scenario")
    p_raw = data.get("p")
    if not isinstance(p_raw, list):
        raise FileFormatError("p must be a list of rational strings", f"{where}.p")
    entries = tuple(_rational(v, f"{where}.p[{i}]") for i, v in enumerate(p_raw))
    try:
        return Behavior(scenario, entries)
    except ValueError as exc:
        raise FileFormatError(str(exc), where) from exc


def cg_table_to_dict(table: CgTable) -> dict:
    return {
        "name": table.name,
        "m": table.m,
        "row": [format_rational(c) for c in table.row_coeffs],
        "col": [format_rational(c) for c in table.col_coeffs],
        "body": [[format_rational(c) for c in row] for row in table.body],
        "bound": format_rational(table.bound),
    }


def cg_table_from_dict(data: Any, where: str = "bell") -> CgTable:
    if not isinstance(data, dict):
        raise FileFormatError("Bell table must be an object", where)
    name = data.get("name", "unnamed")
    if not isinstance(name, str):
        raise FileFormatError("name must be a string", f"{where}.name")
    row = data.get("row")
    col = data.get("col")
    body = data.get("body")
    if not isinstance(row, list) or not isinstance(col, list) or not isinstance(body, list) \
            or not all(isinstance(r, list) for r in body):
        raise FileFormatError("row/col must be lists and body a list of lists", where)
    row_coeffs = tuple(_rational(v, f"{where}.row[{i}]") for i, v in enumerate(row))
    col_coeffs = tuple(_rational(v, f"{where}.col[{i}]") for i, v in enumerate(col))
    body_coeffs = tuple(
        tuple(_rational(v, f"{where}.body[{i}][{j}]") for j, v in enumerate(r))
        for i, r in enumerate(body))
    bound = _rational(data.get("bound", "0"), f"{where}.bound")
    try:
        table = CgTable(name=name, row_coeffs=row_coeffs, col_coeffs=col_coeffs,
                        body=body_coeffs, bound=bound)
    except ValueError as exc:
        raise FileFormatError(str(exc), where) from exc
    if "m" in data and data["m"] != table.m:
        raise FileFormatError(f"m field {data['m']} disagrees with table size {table.m}",
                              where)
    return table


def _load_json(path: Union[str, Path]) -> Any:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise FileFormatError(str(exc), str(path)) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"invalid JSON: {exc}", str(path)) from exc


def load_behavior(path: Union[str, Path]) -> Behavior:
    return behavior_from_dict(_load_json(path), where=str(path))


def save_behavior(behavior: Behavior, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(behavior_to_dict(behavior), indent=2) + "\n")


def load_bell(path: Union[str, Path]) -> CgTable:
    return cg_table_from_dict(_load_json(path), where=str(path))


def save_bell(table: CgTable, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(cg_table_to_dict(table), indent=2) + "\n")
