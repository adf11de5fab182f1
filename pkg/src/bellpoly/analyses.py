"""Polytope analyses: locality, nonsignaling extrema, monogamy, transitivity.

Every analysis assembles exact linear programs from the polytope
constraint systems and solves them with the certified simplex in
:mod:`bellpoly.lp`.  The LP builders are module-level functions so that
report verification can rebuild the identical program (same row order,
same labels) from serialized inputs and re-check the stored certificates
without touching solver state.

Party pairs on a tripartite scenario are fixed throughout: AB = parties
(0, 1), BC = (1, 2), AC = (0, 2).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .bell import BellFunctional, evaluate, lift_through
from .lp import LinearProgram, LpSolution, solve
from .polytopes import (
    DEFAULT_ENUMERATION_CAP,
    MarginalOperator,
    VertexMatrix,
    enumerate_local_deterministic,
    marginal_operator,
    normalization_constraints,
    ns_constraint_system,
)
from .scenario import (
    Behavior,
    InvalidBehaviorError,
    PartySubset,
    Scenario,
    SignalingError,
    check_nonsignaling,
    marginalize,
    validate,
)

__all__ = [
    "LocalityReport",
    "NsOptimum",
    "MonogamyReport",
    "ExtensionMin",
    "ExtensionLocalPart",
    "TransitivityReport",
    "MarginalMismatchError",
    "InfeasibleMarginalsError",
    "AB_PAIR",
    "BC_PAIR",
    "AC_PAIR",
    "local_part",
    "max_bell_ns",
    "max_bell_local",
    "monogamy_max",
    "transitivity_search",
    "min_bell_extension",
    "max_ac_local_part",
]

ZERO = Fraction(0)
ONE = Fraction(1)

AB_PAIR = PartySubset((0, 1))
BC_PAIR = PartySubset((1, 2))
AC_PAIR = PartySubset((0, 2))


class MarginalMismatchError(ValueError):
    """The two bipartite marginals disagree on the shared party."""


class InfeasibleMarginalsError(ValueError):
    """No tripartite nonsignaling extension matches the given marginals."""


# ---------------------------------------------------------------------------
# Result types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LocalityReport:
    """Outcome of the local-part program for one behavior.

    ``weight`` is the maximal total weight of a local sub-distribution
    dominated by the behavior; it equals 1 exactly when the behavior is
    local, in which case ``decomposition`` is a convex decomposition into
    deterministic vertices.  When ``weight < 1`` the LP dual supplies a
    hyperplane separating the behavior from the local polytope, returned
    as ``separating`` together with its exact local bound.
    """

    weight: Fraction
    decomposition: tuple[tuple[int, Fraction], ...]
    separating: Optional[BellFunctional]
    dual: tuple[Fraction, ...]
    vertex_count: int

    @property
    def is_local(self) -> bool:
        return self.weight == 1

    def decomposition_dict(self) -> dict[int, Fraction]:
        return dict(self.decomposition)


@dataclass(frozen=True)
class NsOptimum:
    """Exact nonsignaling extremum of a Bell functional, with witnesses."""

    value: Fraction
    maximizer: Behavior
    dual: tuple[Fraction, ...]


@dataclass(frozen=True)
class MonogamyReport:
    """Maximum of a functional's sum over the AB and BC pairs, over all
    tripartite nonsignaling behaviors."""

    value: Fraction
    witness: Behavior
    dual: tuple[Fraction, ...]
    shareable: bool  # True iff value exceeds twice the local bound


@dataclass(frozen=True)
class ExtensionMin:
    """Minimum Bell value on AC over nonsignaling extensions of fixed marginals."""

    value: Fraction
    extension: Behavior
    dual: tuple[Fraction, ...]


@dataclass(frozen=True)
class ExtensionLocalPart:
    """Maximum local part of the AC marginal over nonsignaling extensions."""

    value: Fraction
    extension: Behavior
    ac_weights: tuple[tuple[int, Fraction], ...]
    dual: tuple[Fraction, ...]
    vertex_count: int


@dataclass(frozen=True)
class StageResult:
    """One optimization stage: exact value plus primal/dual witnesses."""

    value: Fraction
    primal: tuple[Fraction, ...]
    dual: tuple[Fraction, ...]


@dataclass(frozen=True)
class TransitivityReport:
    """Two-stage search for marginals that force AC nonlocality.

    Stage 1 maximizes the summed AB and BC Bell values over tripartite
    nonsignaling behaviors; stage 2 repeats the maximization restricted to
    behaviors whose AC marginal is local.  A strict gap proves the stage-1
    witness cannot be local between A and C.  The witness marginals are
    then tested directly: ``ac_min`` minimizes the AC functional over all
    nonsignaling extensions consistent with them, and ``ac_local``
    maximizes the AC local part over the same extensions (< 1 certifies
    that every consistent extension has a nonlocal AC marginal).
    """

    functional_ab: BellFunctional
    functional_bc: BellFunctional
    functional_ac: BellFunctional
    scenario: Scenario
    stage1: StageResult
    stage2: StageResult
    witness: Behavior
    marginal_ab: Behavior
    marginal_bc: Behavior
    value_ab: Fraction
    value_bc: Fraction
    ac_min: ExtensionMin
    ac_local: ExtensionLocalPart

    @property
    def stage1_value(self) -> Fraction:
        return self.stage1.value

    @property
    def stage2_value(self) -> Fraction:
        return self.stage2.value

    @property
    def ac_min_value(self) -> Fraction:
        return self.ac_min.value

    @property
    def ac_max_local_part(self) -> Fraction:
        return self.ac_local.value

    @property
    def transitive(self) -> bool:
        """Stage-1 optimum strictly beats the AC-local restriction."""
        return self.stage1.value > self.stage2.value

    @property
    def ac_nonlocal_certified(self) -> bool:
        """Every nonsignaling extension of the marginals has nonlocal AC."""
        return self.ac_local.value < 1


# ---------------------------------------------------------------------------
# LP builders (shared with report rechecking)
# ---------------------------------------------------------------------------

def locality_lp(behavior: Behavior, vertices: VertexMatrix) -> LinearProgram:
    """max sum(q) s.t. (vertex matrix) . q <= p, q >= 0."""
    incidence = vertices.incidence()
    le_rows = tuple(tuple((j, ONE) for j in incidence[i])
                    for i in range(behavior.scenario.dim))
    return LinearProgram(
        sense="max",
        objective=tuple(ONE for _ in range(vertices.count)),
        le_rows=le_rows,
        le_rhs=tuple(behavior.p),
        variable_labels=tuple(f"q{j}" for j in range(vertices.count)),
        le_labels=tuple(f"dominated p[{i}]" for i in range(behavior.scenario.dim)),
    )


def _ns_norm_equalities(scenario: Scenario) -> tuple[tuple, tuple, tuple]:
    """Equality rows, rhs and labels of the nonsignaling + normalization system."""
    ns = ns_constraint_system(scenario)
    norm = normalization_constraints(scenario)
    return (ns.eq_rows + norm.eq_rows,
            ns.eq_rhs + norm.eq_rhs,
            ns.eq_labels + norm.eq_labels)


def ns_polytope_lp(scenario: Scenario, objective: tuple[Fraction, ...],
                   sense: str) -> LinearProgram:
    """Optimize a linear functional over the nonsignaling polytope."""
    eq_rows, eq_rhs, eq_labels = _ns_norm_equalities(scenario)
    return LinearProgram(
        sense=sense,
        objective=objective,
        eq_rows=eq_rows,
        eq_rhs=eq_rhs,
        eq_labels=eq_labels,
        variable_labels=tuple(f"p{i}" for i in range(scenario.dim)),
    )


def pair_sum_objective(functional_ab: BellFunctional, functional_bc: BellFunctional,
                       tripartite: Scenario) -> tuple[Fraction, ...]:
    """Coefficients of lift(f_ab, AB) + lift(f_bc, BC) on the tripartite space."""
    lifted_ab = lift_through(functional_ab, marginal_operator(tripartite, AB_PAIR))
    lifted_bc = lift_through(functional_bc, marginal_operator(tripartite, BC_PAIR))
    return tuple(a + b for a, b in zip(lifted_ab.coeffs, lifted_bc.coeffs))


def stage2_lp(functional_ab: BellFunctional, functional_bc: BellFunctional,
              tripartite: Scenario, ac_vertices: VertexMatrix) -> LinearProgram:
    """Stage-1 program plus the restriction that the AC marginal is local.

    Variables are the tripartite behavior p followed by weights q over the
    AC deterministic vertices; constraints add  M_AC . p = A_AC . q  and
    sum(q) = 1.
    """
    dim = tripartite.dim
    nq = ac_vertices.count
    objective = pair_sum_objective(functional_ab, functional_bc, tripartite) \
        + tuple(ZERO for _ in range(nq))
    eq_rows, eq_rhs, eq_labels = _ns_norm_equalities(tripartite)
    ac_op = marginal_operator(tripartite, AC_PAIR)
    incidence = ac_vertices.incidence()
    link_rows = []
    link_labels = []
    for r, cols in enumerate(ac_op.rows):
        entries = [(c, ONE) for c in cols]
        entries += [(dim + j, -ONE) for j in incidence[r]]
        link_rows.append(tuple(sorted(entries)))
        link_labels.append(f"AC marginal[{r}] = local mixture")
    total_row = tuple((dim + j, ONE) for j in range(nq))
    return LinearProgram(
        sense="max",
        objective=objective,
        eq_rows=eq_rows + tuple(link_rows) + (total_row,),
        eq_rhs=eq_rhs + tuple(ZERO for _ in link_rows) + (ONE,),
        eq_labels=eq_labels + tuple(link_labels) + ("sum of AC weights = 1",),
        variable_labels=tuple(f"p{i}" for i in range(dim))
        + tuple(f"q{j}" for j in range(nq)),
    )


def _marginal_equalities(marginal_ab: Behavior, marginal_bc: Behavior,
                         tripartite: Scenario) -> tuple[tuple, tuple, tuple]:
    """Rows fixing the AB and BC marginals of a tripartite behavior."""
    ab_op = marginal_operator(tripartite, AB_PAIR)
    bc_op = marginal_operator(tripartite, BC_PAIR)
    rows = ab_op.equality_rows() + bc_op.equality_rows()
    rhs = tuple(marginal_ab.p) + tuple(marginal_bc.p)
    labels = tuple(f"AB marginal[{i}]" for i in range(len(marginal_ab.p))) \
        + tuple(f"BC marginal[{i}]" for i in range(len(marginal_bc.p)))
    return rows, rhs, labels


def extension_lp(marginal_ab: Behavior, marginal_bc: Behavior,
                 objective: tuple[Fraction, ...], sense: str,
                 tripartite: Scenario) -> LinearProgram:
    """Optimize over nonsignaling extensions with both marginals fixed."""
    eq_rows, eq_rhs, eq_labels = _ns_norm_equalities(tripartite)
    marg_rows, marg_rhs, marg_labels = _marginal_equalities(
        marginal_ab, marginal_bc, tripartite)
    return LinearProgram(
        sense=sense,
        objective=objective,
        eq_rows=eq_rows + marg_rows,
        eq_rhs=eq_rhs + marg_rhs,
        eq_labels=eq_labels + marg_labels,
        variable_labels=tuple(f"p{i}" for i in range(tripartite.dim)),
    )


def extension_local_part_lp(marginal_ab: Behavior, marginal_bc: Behavior,
                            tripartite: Scenario,
                            ac_vertices: VertexMatrix) -> LinearProgram:
    """max sum(q) over extensions p and weights q with A_AC . q <= M_AC . p."""
    dim = tripartite.dim
    nq = ac_vertices.count
    objective = tuple(ZERO for _ in range(dim)) + tuple(ONE for _ in range(nq))
    eq_rows, eq_rhs, eq_labels = _ns_norm_equalities(tripartite)
    marg_rows, marg_rhs, marg_labels = _marginal_equalities(
        marginal_ab, marginal_bc, tripartite)
    ac_op = marginal_operator(tripartite, AC_PAIR)
    incidence = ac_vertices.incidence()
    le_rows = []
    le_labels = []
    for r, cols in enumerate(ac_op.rows):
        entries = [(dim + j, ONE) for j in incidence[r]]
        entries += [(c, -ONE) for c in cols]
        le_rows.append(tuple(sorted(entries)))
        le_labels.append(f"AC local part dominated at [{r}]")
    return LinearProgram(
        sense="max",
        objective=objective,
        eq_rows=eq_rows + marg_rows,
        eq_rhs=eq_rhs + marg_rhs,
        eq_labels=eq_labels + marg_labels,
        le_rows=tuple(le_rows),
        le_rhs=tuple(ZERO for _ in le_rows),
        le_labels=tuple(le_labels),
        variable_labels=tuple(f"p{i}" for i in range(dim))
        + tuple(f"q{j}" for j in range(nq)),
    )


# ---------------------------------------------------------------------------
# Analyses
# ---------------------------------------------------------------------------

def _require_valid_ns(behavior: Behavior) -> None:
    report = validate(behavior)
    if not report.ok:
        raise InvalidBehaviorError(report)
    ns = check_nonsignaling(behavior)
    if not ns.ok:
        raise SignalingError(ns)


def local_part(behavior: Behavior,
               cap: int = DEFAULT_ENUMERATION_CAP) -> LocalityReport:
    """Maximal weight of a local sub-distribution dominated by the behavior.

    Weight 1 means local (and the decomposition is a local model); weight
    < 1 means nonlocal, certified by the returned separating functional,
    whose exact local bound is computed by vertex enumeration.
    """
    _require_valid_ns(behavior)
    vertices = enumerate_local_deterministic(behavior.scenario, cap)
    sol = solve(locality_lp(behavior, vertices))
    assert sol.status == "optimal"  # q = 0 is feasible, sum(q) <= 1 bounds it
    weight = sol.value
    decomposition = tuple((j, w) for j, w in enumerate(sol.primal) if w)
    separating = None
    if weight < 1:
        coeffs = tuple(-y for y in sol.dual)
        bound = max(sum((coeffs[i] for i in vertices.support(j)), ZERO)
                    for j in range(vertices.count))
        separating = BellFunctional("separating-hyperplane", behavior.scenario,
                                    coeffs, bound)
    return LocalityReport(weight=weight, decomposition=decomposition,
                          separating=separating, dual=sol.dual,
                          vertex_count=vertices.count)


def max_bell_ns(functional: BellFunctional) -> NsOptimum:
    """Exact maximum of a Bell functional over the nonsignaling polytope."""
    lp = ns_polytope_lp(functional.scenario, functional.coeffs, "max")
    sol = solve(lp)
    assert sol.status == "optimal"  # the polytope is nonempty and bounded
    return NsOptimum(value=sol.value,
                     maximizer=Behavior(functional.scenario, sol.primal),
                     dual=sol.dual)


def max_bell_local(functional: BellFunctional,
                   cap: int = DEFAULT_ENUMERATION_CAP) -> Fraction:
    """Exact maximum over all local deterministic vertices (hence all local
    behaviors, by linearity)."""
    vertices = enumerate_local_deterministic(functional.scenario, cap)
    return max(sum((functional.coeffs[i] for i in vertices.support(j)), ZERO)
               for j in range(vertices.count))


def monogamy_max(functional: BellFunctional, tripartite: Scenario) -> MonogamyReport:
    """Maximum of the functional summed over the AB and BC pairs.

    A value of twice the local bound means the two pairs cannot both
    violate the inequality in any nonsignaling behavior (monogamy).
    """
    _check_pair_scenario(functional, tripartite, AB_PAIR)
    _check_pair_scenario(functional, tripartite, BC_PAIR)
    objective = pair_sum_objective(functional, functional, tripartite)
    sol = solve(ns_polytope_lp(tripartite, objective, "max"))
    assert sol.status == "optimal"
    return MonogamyReport(value=sol.value,
                          witness=Behavior(tripartite, sol.primal),
                          dual=sol.dual,
                          shareable=sol.value > 2 * functional.bound)


def _check_pair_scenario(functional: BellFunctional, tripartite: Scenario,
                         pair: PartySubset) -> None:
    sub = tripartite.restrict(pair)
    if sub != functional.scenario:
        raise ValueError(
            f"parties {pair.parties} form scenario {sub}, but the functional "
            f"lives on {functional.scenario}")


def transitivity_search(functional_ab: BellFunctional,
                        functional_bc: BellFunctional,
                        functional_ac: BellFunctional,
                        cap: int = DEFAULT_ENUMERATION_CAP) -> TransitivityReport:
    """Search for bipartite marginals whose nonlocality is transitive.

    Maximizes the summed AB and BC Bell values twice, once over all
    tripartite nonsignaling behaviors and once restricted to behaviors
    with a local AC marginal.  The stage-1 maximizer (the deterministic
    Bland-rule vertex, this package's tie-break) becomes the witness; its
    marginals are then scored against the AC functional over all
    consistent nonsignaling extensions.
    """
    tripartite = _tripartite_scenario(functional_ab, functional_bc, functional_ac)
    objective = pair_sum_objective(functional_ab, functional_bc, tripartite)
    sol1 = solve(ns_polytope_lp(tripartite, objective, "max"))
    assert sol1.status == "optimal"
    witness = Behavior(tripartite, sol1.primal)

    ac_vertices = enumerate_local_deterministic(tripartite.restrict(AC_PAIR), cap)
    sol2 = solve(stage2_lp(functional_ab, functional_bc, tripartite, ac_vertices))
    assert sol2.status == "optimal"  # any local product behavior is feasible

    marginal_ab = marginalize(witness, AB_PAIR)
    marginal_bc = marginalize(witness, BC_PAIR)
    ac_min = min_bell_extension(marginal_ab, marginal_bc, functional_ac)
    ac_local = max_ac_local_part(marginal_ab, marginal_bc, cap)

    return TransitivityReport(
        functional_ab=functional_ab,
        functional_bc=functional_bc,
        functional_ac=functional_ac,
        scenario=tripartite,
        stage1=StageResult(sol1.value, sol1.primal, sol1.dual),
        stage2=StageResult(sol2.value, sol2.primal, sol2.dual),
        witness=witness,
        marginal_ab=marginal_ab,
        marginal_bc=marginal_bc,
        value_ab=evaluate(functional_ab, marginal_ab),
        value_bc=evaluate(functional_bc, marginal_bc),
        ac_min=ac_min,
        ac_local=ac_local,
    )


def _tripartite_scenario(functional_ab: BellFunctional,
                         functional_bc: BellFunctional,
                         functional_ac: BellFunctional) -> Scenario:
    (ma, mb) = functional_ab.scenario.inputs
    (oa, ob) = functional_ab.scenario.outputs
    (mb2, mc) = functional_bc.scenario.inputs
    (ob2, oc) = functional_bc.scenario.outputs
    if (mb2, ob2) != (mb, ob):
        raise ValueError("AB and BC functionals disagree on party B")
    tripartite = Scenario((ma, mb, mc), (oa, ob, oc))
    _check_pair_scenario(functional_ac, tripartite, AC_PAIR)
    return tripartite


def _check_marginal_pair(marginal_ab: Behavior, marginal_bc: Behavior) -> Scenario:
    """Validate both marginals and their agreement on B; return the
    tripartite scenario they extend to."""
    _require_valid_ns(marginal_ab)
    _require_valid_ns(marginal_bc)
    (ma, mb) = marginal_ab.scenario.inputs
    (oa, ob) = marginal_ab.scenario.outputs
    (mb2, mc) = marginal_bc.scenario.inputs
    (ob2, oc) = marginal_bc.scenario.outputs
    if (mb2, ob2) != (mb, ob):
        raise MarginalMismatchError("marginals disagree on party B's scenario")
    b_from_ab = marginalize(marginal_ab, PartySubset((1,)))
    b_from_bc = marginalize(marginal_bc, PartySubset((0,)))
    if b_from_ab != b_from_bc:
        raise MarginalMismatchError(
            "marginals induce different behaviors on the shared party B")
    return Scenario((ma, mb, mc), (oa, ob, oc))


def min_bell_extension(marginal_ab: Behavior, marginal_bc: Behavior,
                       functional_ac: BellFunctional) -> ExtensionMin:
    """Minimum AC Bell value over nonsignaling extensions of the marginals.

    A strictly positive minimum (for a functional with local bound 0)
    proves that the marginals force violation of this specific inequality
    between A and C.  Raises :class:`InfeasibleMarginalsError` when no
    nonsignaling extension exists.
    """
    tripartite = _check_marginal_pair(marginal_ab, marginal_bc)
    _check_pair_scenario(functional_ac, tripartite, AC_PAIR)
    lifted = lift_through(functional_ac, marginal_operator(tripartite, AC_PAIR))
    lp = extension_lp(marginal_ab, marginal_bc, lifted.coeffs, "min", tripartite)
    sol = solve(lp)
    if sol.status == "infeasible":
        raise InfeasibleMarginalsError("no nonsignaling extension matches the marginals")
    assert sol.status == "optimal"
    return ExtensionMin(value=sol.value,
                        extension=Behavior(tripartite, sol.primal),
                        dual=sol.dual)


def max_ac_local_part(marginal_ab: Behavior, marginal_bc: Behavior,
                      cap: int = DEFAULT_ENUMERATION_CAP) -> ExtensionLocalPart:
    """Maximum local part of the AC marginal over nonsignaling extensions.

    A value < 1 certifies that *every* nonsignaling extension of the
    marginals is nonlocal between A and C.
    """
    tripartite = _check_marginal_pair(marginal_ab, marginal_bc)
    ac_vertices = enumerate_local_deterministic(tripartite.restrict(AC_PAIR), cap)
    lp = extension_local_part_lp(marginal_ab, marginal_bc, tripartite, ac_vertices)
    sol = solve(lp)
    if sol.status == "infeasible":
        raise InfeasibleMarginalsError("no nonsignaling extension matches the marginals")
    assert sol.status == "optimal"
    dim = tripartite.dim
    weights = tuple((j, w) for j, w in enumerate(sol.primal[dim:]) if w)
    return ExtensionLocalPart(value=sol.value,
                              extension=Behavior(tripartite, sol.primal[:dim]),
                              ac_weights=weights,
                              dual=sol.dual,
                              vertex_count=ac_vertices.count)
