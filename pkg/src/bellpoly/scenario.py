"""Bell scenarios and behaviors over exact rationals.

A scenario fixes the number of parties and each party's input and output
counts.  A behavior is the full conditional probability table of such a
system, stored as a flat vector of exact Fractions.

Vector layout (fixed package-wide): inputs vary in the outer loops and
outputs in the inner loops, with party 0 most significant in both, i.e.

    index(u, x) = flat(u) * (product of output counts) + flat(x)

where ``flat`` is the lexicographic index of the tuple.  Parties, inputs
and outputs are all 0-based; output 0 of each party is the distinguished
outcome of the Collins-Gisin tables in :mod:`bellpoly.bell`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Iterator, Sequence

from .rational import as_rational

__all__ = [
    "Scenario",
    "PartySubset",
    "Behavior",
    "ValidationReport",
    "NonsignalingReport",
    "NsEquality",
    "DimensionError",
    "InvalidBehaviorError",
    "SignalingError",
    "validate",
    "ns_equalities",
    "check_nonsignaling",
    "marginalize",
    "uniform_behavior",
    "deterministic_behavior",
    "pr_box",
    "convex_combination",
]

ZERO = Fraction(0)
ONE = Fraction(1)


class DimensionError(ValueError):
    """Structural mismatch (vector length, party index out of range, ...).

    Distinct from a validation *failure*, which is a well-formed behavior
    violating positivity or normalization.
    """


class InvalidBehaviorError(ValueError):
    """A behavior failed positivity/normalization where validity is required."""

    def __init__(self, report: "ValidationReport"):
        self.report = report
        super().__init__(f"behavior is not a probability table: {report.summary()}")


class SignalingError(ValueError):
    """A behavior violates a nonsignaling equality where one is required."""

    def __init__(self, report: "NonsignalingReport"):
        self.report = report
        first = report.violations[0]
        super().__init__(f"behavior is signaling: {first.equality.label()} "
                         f"(lhs {first.lhs} != rhs {first.rhs})")


@dataclass(frozen=True)
class Scenario:
    """Party structure: per-party input counts ``m_k`` and output counts ``o_k``."""

    inputs: tuple[int, ...]
    outputs: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "inputs", tuple(int(m) for m in self.inputs))
        object.__setattr__(self, "outputs", tuple(int(o) for o in self.outputs))
        if len(self.inputs) != len(self.outputs):
            raise DimensionError("inputs and outputs must list the same number of parties")
        if len(self.inputs) < 1:
            raise DimensionError("a scenario needs at least one party")
        if any(m < 1 for m in self.inputs):
            raise DimensionError("every party needs at least one input")
        if any(o < 2 for o in self.outputs):
            raise DimensionError("every party needs at least two outputs")

    @property
    def parties(self) -> int:
        return len(self.inputs)

    @property
    def joint_inputs(self) -> int:
        return prod(self.inputs)

    @property
    def joint_outputs(self) -> int:
        return prod(self.outputs)

    @property
    def dim(self) -> int:
        """Length of a behavior vector: (prod inputs) * (prod outputs)."""
        return self.joint_inputs * self.joint_outputs

    def flat_input(self, u: Sequence[int]) -> int:
        return self._flat(u, self.inputs, "input")

    def flat_output(self, x: Sequence[int]) -> int:
        return self._flat(x, self.outputs, "output")

    def _flat(self, values: Sequence[int], sizes: tuple[int, ...], what: str) -> int:
        if len(values) != len(sizes):
            raise DimensionError(f"{what} tuple has {len(values)} entries, expected {len(sizes)}")
        flat = 0
        for v, size in zip(values, sizes):
            if not 0 <= v < size:
                raise DimensionError(f"{what} value {v} out of range 0..{size - 1}")
            flat = flat * size + v
        return flat

    def index(self, u: Sequence[int], x: Sequence[int]) -> int:
        """Flat vector index of P(x|u)."""
        return self.flat_input(u) * self.joint_outputs + self.flat_output(x)

    def input_from_flat(self, flat: int) -> tuple[int, ...]:
        return self._unflat(flat, self.inputs)

    def output_from_flat(self, flat: int) -> tuple[int, ...]:
        return self._unflat(flat, self.outputs)

    @staticmethod
    def _unflat(flat: int, sizes: tuple[int, ...]) -> tuple[int, ...]:
        out = []
        for size in reversed(sizes):
            out.append(flat % size)
            flat //= size
        return tuple(reversed(out))

    def all_inputs(self) -> Iterator[tuple[int, ...]]:
        """Joint inputs in lexicographic (party 0 most significant) order."""
        return itertools.product(*(range(m) for m in self.inputs))

    def all_outputs(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(range(o) for o in self.outputs))

    def restrict(self, subset: "PartySubset") -> "Scenario":
        """Sub-scenario of the given parties, in their listed order."""
        subset.validate_for(self)
        return Scenario(tuple(self.inputs[k] for k in subset.parties),
                        tuple(self.outputs[k] for k in subset.parties))


@dataclass(frozen=True)
class PartySubset:
    """Strictly increasing tuple of 0-based party indices."""

    parties: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "parties", tuple(int(k) for k in self.parties))
        if len(self.parties) == 0:
            raise DimensionError("party subset must be nonempty")
        if any(k < 0 for k in self.parties):
            raise DimensionError("party indices are 0-based and nonnegative")
        if any(a >= b for a, b in zip(self.parties, self.parties[1:])):
            raise DimensionError("party indices must be distinct and strictly increasing")

    def __len__(self) -> int:
        return len(self.parties)

    def __iter__(self) -> Iterator[int]:
        return iter(self.parties)

    def validate_for(self, scenario: Scenario) -> None:
        if self.parties[-1] >= scenario.parties:
            raise DimensionError(
                f"party index {self.parties[-1]} out of range for {scenario.parties} parties")

    def complement(self, parties: int) -> tuple[int, ...]:
        return tuple(k for k in range(parties) if k not in self.parties)

    def compose(self, inner: "PartySubset") -> "PartySubset":
        """Subset of the original parties selected by ``inner`` positions in self."""
        return PartySubset(tuple(self.parties[i] for i in inner.parties))


@dataclass(frozen=True)
class Behavior:
    """Flat conditional probability table P(outputs | inputs) over a scenario."""

    scenario: Scenario
    p: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        entries = tuple(as_rational(v) for v in self.p)
        object.__setattr__(self, "p", entries)
        if len(entries) != self.scenario.dim:
            raise DimensionError(
                f"behavior vector has length {len(entries)}, "
                f"scenario dimension is {self.scenario.dim}")

    def at(self, u: Sequence[int], x: Sequence[int]) -> Fraction:
        return self.p[self.scenario.index(u, x)]

    def input_block(self, u: Sequence[int]) -> tuple[Fraction, ...]:
        base = self.scenario.flat_input(u) * self.scenario.joint_outputs
        return self.p[base:base + self.scenario.joint_outputs]


@dataclass(frozen=True)
class ValidationReport:
    """Positivity and per-input normalization, checked exactly."""

    negative_entries: tuple[tuple[int, Fraction], ...]
    unnormalized_inputs: tuple[tuple[tuple[int, ...], Fraction], ...]

    @property
    def ok(self) -> bool:
        return not self.negative_entries and not self.unnormalized_inputs

    def summary(self) -> str:
        if self.ok:
            return "ok"
        parts = []
        for idx, value in self.negative_entries:
            parts.append(f"p[{idx}] = {value} < 0")
        for u, total in self.unnormalized_inputs:
            parts.append(f"input {u} sums to {total} != 1")
        return "; ".join(parts)


def validate(behavior: Behavior) -> ValidationReport:
    """Check positivity of every entry and normalization of every input block."""
    negatives = tuple((i, v) for i, v in enumerate(behavior.p) if v < 0)
    unnormalized = []
    for u in behavior.scenario.all_inputs():
        total = sum(behavior.input_block(u), ZERO)
        if total != 1:
            unnormalized.append((u, total))
    return ValidationReport(negatives, tuple(unnormalized))


# ---------------------------------------------------------------------------
# Nonsignaling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NsEquality:
    """One nonsignaling equality between two complement-input choices.

    The marginal probability of ``outputs`` given ``inputs`` on the kept
    ``subset`` must not depend on the inputs of the complementary parties;
    each equality compares the all-first complement choice against one
    other choice.
    """

    subset: tuple[int, ...]
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]
    complement: tuple[int, ...]
    reference_inputs: tuple[int, ...]
    other_inputs: tuple[int, ...]

    def label(self) -> str:
        return (f"NS subset={self.subset} inputs={self.inputs} outputs={self.outputs} "
                f"complement_inputs={self.other_inputs} vs {self.reference_inputs}")

    def _indices(self, scenario: Scenario, comp_inputs: tuple[int, ...]) -> list[int]:
        u = _merge(scenario.parties, self.subset, self.inputs, self.complement, comp_inputs)
        indices = []
        comp_outputs = [range(scenario.outputs[k]) for k in self.complement]
        for xc in itertools.product(*comp_outputs):
            x = _merge(scenario.parties, self.subset, self.outputs, self.complement, xc)
            indices.append(scenario.index(u, x))
        return indices

    def plus_indices(self, scenario: Scenario) -> list[int]:
        """Entries summed with +1 (reference complement inputs)."""
        return self._indices(scenario, self.reference_inputs)

    def minus_indices(self, scenario: Scenario) -> list[int]:
        """Entries summed with -1 (compared complement inputs)."""
        return self._indices(scenario, self.other_inputs)


def _merge(parties: int, subset: tuple[int, ...], sub_values: Sequence[int],
           complement: tuple[int, ...], comp_values: Sequence[int]) -> tuple[int, ...]:
    merged = [0] * parties
    for k, v in zip(subset, sub_values):
        merged[k] = v
    for k, v in zip(complement, comp_values):
        merged[k] = v
    return tuple(merged)


def ns_equalities(scenario: Scenario) -> Iterator[NsEquality]:
    """All nonsignaling equalities, in canonical order.

    Subsets run over every nonempty proper party subset (by size, then
    lexicographically); complement-input pairs are anchored at the
    all-first choice, which spans the same solution set as all pairs.
    Rows are intentionally redundant across subsets; consumers that need a
    minimal system reduce it themselves.
    """
    n = scenario.parties
    for size in range(1, n):
        for subset in itertools.combinations(range(n), size):
            complement = tuple(k for k in range(n) if k not in subset)
            reference = tuple(0 for _ in complement)
            sub_inputs = [range(scenario.inputs[k]) for k in subset]
            sub_outputs = [range(scenario.outputs[k]) for k in subset]
            comp_inputs = [range(scenario.inputs[k]) for k in complement]
            for u in itertools.product(*sub_inputs):
                for x in itertools.product(*sub_outputs):
                    for other in itertools.product(*comp_inputs):
                        if other == reference:
                            continue
                        yield NsEquality(subset, u, x, complement, reference, other)


@dataclass(frozen=True)
class NsViolation:
    equality: NsEquality
    lhs: Fraction
    rhs: Fraction


@dataclass(frozen=True)
class NonsignalingReport:
    violations: tuple[NsViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def check_nonsignaling(behavior: Behavior) -> NonsignalingReport:
    """Check every nonsignaling equality exactly."""
    scenario = behavior.scenario
    violations = []
    for eq in ns_equalities(scenario):
        lhs = sum((behavior.p[i] for i in eq.plus_indices(scenario)), ZERO)
        rhs = sum((behavior.p[i] for i in eq.minus_indices(scenario)), ZERO)
        if lhs != rhs:
            violations.append(NsViolation(eq, lhs, rhs))
    return NonsignalingReport(tuple(violations))


def marginalize(behavior: Behavior, subset: PartySubset) -> Behavior:
    """Marginal behavior of the given parties.

    Requires a valid, nonsignaling behavior: marginals of signaling
    behaviors depend on the dropped parties' inputs and are refused rather
    than averaged.  Dropped inputs are fixed to their first value, which by
    nonsignaling does not matter.
    """
    scenario = behavior.scenario
    subset.validate_for(scenario)
    report = validate(behavior)
    if not report.ok:
        raise InvalidBehaviorError(report)
    ns_report = check_nonsignaling(behavior)
    if not ns_report.ok:
        raise SignalingError(ns_report)
    return _marginalize_unchecked(behavior, subset)


def _marginalize_unchecked(behavior: Behavior, subset: PartySubset) -> Behavior:
    """Marginal with dropped inputs at their first value; no precondition checks.

    Internal helper for callers that already hold exact-feasibility
    guarantees (LP solutions satisfy the nonsignaling rows exactly).
    """
    scenario = behavior.scenario
    sub = scenario.restrict(subset)
    kept = subset.parties
    complement = subset.complement(scenario.parties)
    comp_zero = tuple(0 for _ in complement)
    comp_outputs = [range(scenario.outputs[k]) for k in complement]
    entries = []
    for u_sub in sub.all_inputs():
        u = _merge(scenario.parties, kept, u_sub, complement, comp_zero)
        for x_sub in sub.all_outputs():
            total = ZERO
            for xc in itertools.product(*comp_outputs):
                x = _merge(scenario.parties, kept, x_sub, complement, xc)
                total += behavior.p[scenario.index(u, x)]
            entries.append(total)
    return Behavior(sub, tuple(entries))


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def uniform_behavior(scenario: Scenario) -> Behavior:
    value = Fraction(1, scenario.joint_outputs)
    return Behavior(scenario, tuple(value for _ in range(scenario.dim)))


def deterministic_behavior(scenario: Scenario, tables: Sequence[Sequence[int]]) -> Behavior:
    """Product of per-party deterministic strategies.

    ``tables[k][u]`` is party k's output on input u.
    """
    if len(tables) != scenario.parties:
        raise DimensionError(f"need one strategy table per party ({scenario.parties})")
    for k, table in enumerate(tables):
        if len(table) != scenario.inputs[k]:
            raise DimensionError(f"party {k} table has {len(table)} entries, "
                                 f"expected {scenario.inputs[k]}")
        if any(not 0 <= x < scenario.outputs[k] for x in table):
            raise DimensionError(f"party {k} table maps outside 0..{scenario.outputs[k] - 1}")
    p = [ZERO] * scenario.dim
    for u in scenario.all_inputs():
        x = tuple(tables[k][u[k]] for k in range(scenario.parties))
        p[scenario.index(u, x)] = ONE
    return Behavior(scenario, tuple(p))


def pr_box() -> Behavior:
    """The extremal nonsignaling box: P(xy|uv) = 1/2 iff x XOR y = u AND v."""
    scenario = Scenario((2, 2), (2, 2))
    half = Fraction(1, 2)
    p = [ZERO] * scenario.dim
    for u, v in scenario.all_inputs():
        for x, y in scenario.all_outputs():
            if (x ^ y) == (u & v):
                p[scenario.index((u, v), (x, y))] = half
    return Behavior(scenario, tuple(p))


def convex_combination(terms: Sequence[tuple[Fraction, Behavior]]) -> Behavior:
    """Exact convex combination of behaviors on a common scenario."""
    if not terms:
        raise DimensionError("convex combination of nothing")
    scenario = terms[0][1].scenario
    if any(b.scenario != scenario for _, b in terms):
        raise DimensionError("behaviors live on different scenarios")
    weights = [as_rational(w) for w, _ in terms]
    if any(w < 0 for w in weights):
        raise ValueError("convex weights must be nonnegative")
    if sum(weights, ZERO) != 1:
        raise ValueError("convex weights must sum to 1")
    p = [ZERO] * scenario.dim
    for w, b in zip(weights, (b for _, b in terms)):
        for i, v in enumerate(b.p):
            if v:
                p[i] += w * v
    return Behavior(scenario, tuple(p))
