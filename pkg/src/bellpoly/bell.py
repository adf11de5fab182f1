"""Bell inequalities: Collins-Gisin tables, full-vector functionals, lifting.

A CG table describes a bipartite binary-outcome inequality through the
coefficients of the first-outcome probabilities: per-input marginal terms
for each side plus a joint term per input pair.  ``cg_to_functional``
expands it to a linear functional on the full behavior vector;
``lift_to_pair`` composes a bipartite functional with a marginalization
operator so tripartite programs can score bipartite marginals.

The catalog ships the toolkit's three stock inequalities: CH and the two
four-input inequalities I4422_11 and I4422_3 from the 4422 facet family.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .polytopes import MarginalOperator, marginal_operator
from .rational import as_rational
from .scenario import Behavior, DimensionError, PartySubset, Scenario, SignalingError, \
    check_nonsignaling

__all__ = [
    "CgTable",
    "BellFunctional",
    "cg_to_functional",
    "evaluate",
    "lift_to_pair",
    "catalog",
]

ZERO = Fraction(0)


@dataclass(frozen=True)
class CgTable:
    """Coefficients of first-outcome probabilities for a bipartite inequality.

    ``row_coeffs[u]`` multiplies P(first | u) on the first side,
    ``col_coeffs[v]`` multiplies P(first | v) on the second side, and
    ``body[u][v]`` multiplies the joint P(first, first | u, v).  The
    intended reading is value <= bound for every local behavior; the bound
    is verified against vertex enumeration, never assumed.
    """

    name: str
    row_coeffs: tuple[Fraction, ...]
    col_coeffs: tuple[Fraction, ...]
    body: tuple[tuple[Fraction, ...], ...]
    bound: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "row_coeffs", tuple(as_rational(c) for c in self.row_coeffs))
        object.__setattr__(self, "col_coeffs", tuple(as_rational(c) for c in self.col_coeffs))
        object.__setattr__(self, "body",
                           tuple(tuple(as_rational(c) for c in row) for row in self.body))
        object.__setattr__(self, "bound", as_rational(self.bound))
        m = len(self.row_coeffs)
        if m < 1:
            raise DimensionError("a CG table needs at least one input per side")
        if len(self.col_coeffs) != m or len(self.body) != m \
                or any(len(row) != m for row in self.body):
            raise DimensionError("CG table dimensions are inconsistent")

    @property
    def m(self) -> int:
        """Inputs per side."""
        return len(self.row_coeffs)

    def scenario(self) -> Scenario:
        return Scenario((self.m, self.m), (2, 2))


@dataclass(frozen=True)
class BellFunctional:
    """Linear functional coeffs . p with a bound on its local maximum."""

    name: str
    scenario: Scenario
    coeffs: tuple[Fraction, ...]
    bound: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", tuple(as_rational(c) for c in self.coeffs))
        object.__setattr__(self, "bound", as_rational(self.bound))
        if len(self.coeffs) != self.scenario.dim:
            raise DimensionError(
                f"coefficient vector has length {len(self.coeffs)}, "
                f"scenario dimension is {self.scenario.dim}")

    def dot(self, vector: Sequence[Fraction]) -> Fraction:
        """Raw inner product; no nonsignaling check (see :func:`evaluate`)."""
        return sum((c * v for c, v in zip(self.coeffs, vector) if c), ZERO)


def cg_to_functional(table: CgTable) -> BellFunctional:
    """Expand a CG table to full behavior-vector coefficients.

    Marginal terms are expanded against the other side's first input
    (P(first|u) = sum_y P(first, y | u, 0)); on nonsignaling behaviors any
    fixed choice agrees, and :func:`evaluate` refuses signaling input
    rather than silently depending on this convention.
    """
    scenario = table.scenario()
    coeffs = [ZERO] * scenario.dim
    for u in range(table.m):
        c = table.row_coeffs[u]
        if c:
            for y in (0, 1):
                coeffs[scenario.index((u, 0), (0, y))] += c
    for v in range(table.m):
        c = table.col_coeffs[v]
        if c:
            for x in (0, 1):
                coeffs[scenario.index((0, v), (x, 0))] += c
    for u in range(table.m):
        for v in range(table.m):
            c = table.body[u][v]
            if c:
                coeffs[scenario.index((u, v), (0, 0))] += c
    return BellFunctional(table.name, scenario, tuple(coeffs), table.bound)


def evaluate(functional: BellFunctional, behavior: Behavior) -> Fraction:
    """Exact Bell value of a nonsignaling behavior.

    Raises on scenario mismatch and on signaling behaviors, where the
    marginal expansion inside CG-derived functionals would be
    convention-dependent.
    """
    if behavior.scenario != functional.scenario:
        raise DimensionError(
            f"behavior scenario {behavior.scenario} does not match "
            f"functional scenario {functional.scenario}")
    report = check_nonsignaling(behavior)
    if not report.ok:
        raise SignalingError(report)
    return functional.dot(behavior.p)


def lift_to_pair(functional: BellFunctional, tripartite: Scenario,
                 pair: PartySubset) -> BellFunctional:
    """Compose a bipartite functional with marginalization onto a party pair.

    The result g satisfies g(b) = functional(marginal of b on the pair) for
    every nonsignaling b on the larger scenario.
    """
    if len(pair) != 2:
        raise DimensionError("lift target must be a pair of parties")
    operator = marginal_operator(tripartite, pair)
    if operator.sub_scenario != functional.scenario:
        raise DimensionError(
            f"pair sub-scenario {operator.sub_scenario} does not match "
            f"functional scenario {functional.scenario}")
    return lift_through(functional, operator)


def lift_through(functional: BellFunctional, operator: MarginalOperator) -> BellFunctional:
    """Lift along an explicit marginal operator (avoids rebuilding it)."""
    lifted = operator.lift_coefficients(functional.coeffs)
    name = f"{functional.name}[parties {','.join(str(k) for k in operator.subset)}]"
    return BellFunctional(name, operator.scenario, lifted, functional.bound)


def catalog() -> dict[str, CgTable]:
    """Stock inequalities: CH and the 4422-family pair used by the analyses.

    Coefficients are exact integers; the bound 0 of each entry is a tight
    local maximum (checked by vertex enumeration in the test suite).
    """
    f = Fraction
    ch = CgTable(
        name="CH",
        row_coeffs=(f(-1), f(0)),
        col_coeffs=(f(-1), f(0)),
        body=((f(1), f(1)),
              (f(1), f(-1))),
        bound=f(0),
    )
    i4422_11 = CgTable(
        name="I4422_11",
        row_coeffs=(f(-2), f(-1), f(-1), f(0)),
        col_coeffs=(f(-2), f(-1), f(-1), f(0)),
        body=((f(1), f(1), f(1), f(2)),
              (f(1), f(0), f(2), f(-1)),
              (f(1), f(2), f(-1), f(-1)),
              (f(2), f(-1), f(-1), f(-1))),
        bound=f(0),
    )
    i4422_3 = CgTable(
        name="I4422_3",
        row_coeffs=(f(-1), f(0), f(0), f(0)),
        col_coeffs=(f(-2), f(-1), f(-1), f(0)),
        body=((f(1), f(1), f(1), f(1)),
              (f(0), f(1), f(0), f(-1)),
              (f(1), f(-1), f(1), f(-1)),
              (f(1), f(0), f(-1), f(0))),
        bound=f(0),
    )
    return {table.name: table for table in (ch, i4422_11, i4422_3)}
