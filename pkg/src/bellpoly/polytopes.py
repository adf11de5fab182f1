"""Geometric objects of a Bell scenario.

Local-deterministic vertices of the local polytope, the nonsignaling and
normalization equality systems, and the linear marginalization operators.
All constraint rows are labeled with their provenance so that violation
reports point at a concrete equality, and redundant rows are kept by
design (correctness and traceability over minimality; the LP layer drops
dependent rows itself).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Iterator, Sequence

from .scenario import (
    Behavior,
    DimensionError,
    PartySubset,
    Scenario,
    ns_equalities,
)

__all__ = [
    "Row",
    "LinearConstraintSystem",
    "VertexMatrix",
    "MarginalOperator",
    "EnumerationCapError",
    "DEFAULT_ENUMERATION_CAP",
    "enumerate_local_deterministic",
    "ns_constraint_system",
    "normalization_constraints",
    "marginal_operator",
]

ZERO = Fraction(0)
ONE = Fraction(1)

# A sparse constraint row: ((column, coefficient), ...) sorted by column.
Row = tuple[tuple[int, Fraction], ...]

DEFAULT_ENUMERATION_CAP = 2 ** 20


class EnumerationCapError(ValueError):
    """Deterministic-vertex enumeration would exceed the configured cap."""

    def __init__(self, count: int, cap: int):
        self.count = count
        self.cap = cap
        super().__init__(f"scenario has {count} local deterministic vertices, "
                         f"which exceeds the enumeration cap {cap}")


def row_dot(row: Row, vector: Sequence[Fraction]) -> Fraction:
    return sum((coeff * vector[col] for col, coeff in row), ZERO)


@dataclass(frozen=True)
class LinearConstraintSystem:
    """Labeled equality and inequality rows on a fixed-dimension space.

    Equalities are A_eq . p = b_eq, inequalities A_le . p <= b_le.  Every
    row carries a human-readable label naming where it came from.
    """

    dimension: int
    eq_rows: tuple[Row, ...] = ()
    eq_rhs: tuple[Fraction, ...] = ()
    eq_labels: tuple[str, ...] = ()
    le_rows: tuple[Row, ...] = ()
    le_rhs: tuple[Fraction, ...] = ()
    le_labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not (len(self.eq_rows) == len(self.eq_rhs) == len(self.eq_labels)):
            raise DimensionError("equality rows, rhs and labels must align")
        if not (len(self.le_rows) == len(self.le_rhs) == len(self.le_labels)):
            raise DimensionError("inequality rows, rhs and labels must align")

    def violated_rows(self, vector: Sequence[Fraction]) -> list[str]:
        """Labels of exactly violated rows."""
        if len(vector) != self.dimension:
            raise DimensionError(f"vector length {len(vector)} != dimension {self.dimension}")
        bad = []
        for row, rhs, label in zip(self.eq_rows, self.eq_rhs, self.eq_labels):
            if row_dot(row, vector) != rhs:
                bad.append(label)
        for row, rhs, label in zip(self.le_rows, self.le_rhs, self.le_labels):
            if row_dot(row, vector) > rhs:
                bad.append(label)
        return bad

    def satisfied_by(self, vector: Sequence[Fraction]) -> bool:
        return not self.violated_rows(vector)

    def format_text(self) -> str:
        """Render every labeled row, for debugging."""
        lines = []
        for row, rhs, label in zip(self.eq_rows, self.eq_rhs, self.eq_labels):
            terms = " + ".join(f"{coeff}*p[{col}]" for col, coeff in row)
            lines.append(f"[{label}] {terms} = {rhs}")
        for row, rhs, label in zip(self.le_rows, self.le_rhs, self.le_labels):
            terms = " + ".join(f"{coeff}*p[{col}]" for col, coeff in row)
            lines.append(f"[{label}] {terms} <= {rhs}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Local deterministic vertices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VertexMatrix:
    """All local deterministic behaviors of a scenario, as matrix columns.

    Column j is the product of the per-party strategy tables
    ``strategies[j]``; it is 0/1-valued with exactly one 1 per joint-input
    block, so columns are stored by their support only.  Order is
    canonical: lexicographic over the per-party function tables with party
    0 most significant.
    """

    scenario: Scenario
    strategies: tuple[tuple[tuple[int, ...], ...], ...]

    @property
    def count(self) -> int:
        return len(self.strategies)

    def support(self, j: int) -> tuple[int, ...]:
        """Flat indices of the 1-entries of column j (one per joint input)."""
        tables = self.strategies[j]
        scenario = self.scenario
        return tuple(
            scenario.index(u, tuple(tables[k][u[k]] for k in range(scenario.parties)))
            for u in scenario.all_inputs())

    def column(self, j: int) -> Behavior:
        p = [ZERO] * self.scenario.dim
        for i in self.support(j):
            p[i] = ONE
        return Behavior(self.scenario, tuple(p))

    def columns(self) -> Iterator[Behavior]:
        return (self.column(j) for j in range(self.count))

    def incidence(self) -> list[list[int]]:
        """For each flat index, the vertex ids whose column is 1 there."""
        rows: list[list[int]] = [[] for _ in range(self.scenario.dim)]
        for j in range(self.count):
            for i in self.support(j):
                rows[i].append(j)
        return rows


def enumerate_local_deterministic(scenario: Scenario,
                                  cap: int = DEFAULT_ENUMERATION_CAP) -> VertexMatrix:
    """Enumerate all products of per-party deterministic strategies.

    Raises :class:`EnumerationCapError` (with the computed count) when the
    number of vertices, prod_k o_k ** m_k, exceeds ``cap``.
    """
    count = prod(o ** m for m, o in zip(scenario.inputs, scenario.outputs))
    if count > cap:
        raise EnumerationCapError(count, cap)
    per_party = [
        tuple(itertools.product(range(o), repeat=m))
        for m, o in zip(scenario.inputs, scenario.outputs)
    ]
    strategies = tuple(itertools.product(*per_party))
    return VertexMatrix(scenario, strategies)


# ---------------------------------------------------------------------------
# Constraint systems
# ---------------------------------------------------------------------------

def ns_constraint_system(scenario: Scenario) -> LinearConstraintSystem:
    """All nonsignaling equalities as rows A_ns . p = 0.

    One row per (kept subset, its inputs, its outputs, complement-input
    choice vs the all-first anchor); see :func:`bellpoly.scenario.ns_equalities`
    for the enumeration order.  Rows are redundant across subsets on
    purpose; each carries its provenance label.
    """
    rows = []
    labels = []
    for eq in ns_equalities(scenario):
        entries = [(i, ONE) for i in eq.plus_indices(scenario)]
        entries += [(i, -ONE) for i in eq.minus_indices(scenario)]
        entries.sort()
        rows.append(tuple(entries))
        labels.append(eq.label())
    n = len(rows)
    return LinearConstraintSystem(
        dimension=scenario.dim,
        eq_rows=tuple(rows),
        eq_rhs=tuple(ZERO for _ in range(n)),
        eq_labels=tuple(labels),
    )


def normalization_constraints(scenario: Scenario) -> LinearConstraintSystem:
    """One equality row per joint input: entries over outputs sum to 1."""
    rows = []
    labels = []
    block = scenario.joint_outputs
    for u in scenario.all_inputs():
        base = scenario.flat_input(u) * block
        rows.append(tuple((base + k, ONE) for k in range(block)))
        labels.append(f"normalization inputs={u}")
    n = len(rows)
    return LinearConstraintSystem(
        dimension=scenario.dim,
        eq_rows=tuple(rows),
        eq_rhs=tuple(ONE for _ in range(n)),
        eq_labels=tuple(labels),
    )


# ---------------------------------------------------------------------------
# Marginalization as a linear map
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MarginalOperator:
    """Sparse 0/1 matrix M with M.p = marginal of p on the kept parties.

    Row r (a sub-scenario flat index) lists the full-vector columns summed
    into that marginal entry, with the dropped parties' inputs fixed to
    their first value.  Agrees with :func:`bellpoly.scenario.marginalize`
    on every nonsignaling behavior.
    """

    scenario: Scenario
    subset: PartySubset
    sub_scenario: Scenario
    rows: tuple[tuple[int, ...], ...]

    def apply(self, vector: Sequence[Fraction]) -> tuple[Fraction, ...]:
        if len(vector) != self.scenario.dim:
            raise DimensionError(f"vector length {len(vector)} != {self.scenario.dim}")
        return tuple(sum((vector[c] for c in cols), ZERO) for cols in self.rows)

    def apply_behavior(self, behavior: Behavior) -> Behavior:
        if behavior.scenario != self.scenario:
            raise DimensionError("behavior scenario does not match the operator")
        return Behavior(self.sub_scenario, self.apply(behavior.p))

    def lift_coefficients(self, sub_coeffs: Sequence[Fraction]) -> tuple[Fraction, ...]:
        """Transpose action: coefficients g with g.p = c.(M.p) for all p."""
        if len(sub_coeffs) != self.sub_scenario.dim:
            raise DimensionError(f"coefficient length {len(sub_coeffs)} != "
                                 f"{self.sub_scenario.dim}")
        lifted = [ZERO] * self.scenario.dim
        for r, cols in enumerate(self.rows):
            c = sub_coeffs[r]
            if c:
                for col in cols:
                    lifted[col] += c
        return tuple(lifted)

    def equality_rows(self) -> tuple[Row, ...]:
        """Rows of M as sparse constraint rows (for M.p = marginal systems)."""
        return tuple(tuple((c, ONE) for c in cols) for cols in self.rows)


def marginal_operator(scenario: Scenario, subset: PartySubset) -> MarginalOperator:
    subset.validate_for(scenario)
    sub = scenario.restrict(subset)
    kept = subset.parties
    complement = subset.complement(scenario.parties)
    comp_outputs = [range(scenario.outputs[k]) for k in complement]
    rows = []
    for u_sub in sub.all_inputs():
        u = _merge_full(scenario.parties, kept, u_sub, complement)
        for x_sub in sub.all_outputs():
            cols = []
            for xc in itertools.product(*comp_outputs):
                x = _merge_values(scenario.parties, kept, x_sub, complement, xc)
                cols.append(scenario.index(u, x))
            rows.append(tuple(cols))
    return MarginalOperator(scenario, subset, sub, tuple(rows))


def _merge_full(parties: int, kept: tuple[int, ...], values: Sequence[int],
                complement: tuple[int, ...]) -> tuple[int, ...]:
    return _merge_values(parties, kept, values, complement, tuple(0 for _ in complement))


def _merge_values(parties: int, kept: tuple[int, ...], kept_values: Sequence[int],
                  complement: tuple[int, ...], comp_values: Sequence[int]) -> tuple[int, ...]:
    merged = [0] * parties
    for k, v in zip(kept, kept_values):
        merged[k] = v
    for k, v in zip(complement, comp_values):
        merged[k] = v
    return tuple(merged)
