"""Exact-arithmetic toolkit for Bell-scenario correlation analysis.

Behaviors (conditional probability tables), the local and nonsignaling
polytopes, Collins-Gisin Bell inequalities, and a certified exact-rational
LP engine, composed into the analyses in :mod:`bellpoly.analyses`.  All
quantities are `fractions.Fraction`; nothing is ever rounded.
"""

from .bell import BellFunctional, CgTable, catalog, cg_to_functional, evaluate, lift_to_pair
from .lp import LinearProgram, LpSolution, solve, verify_certificate
from .polytopes import (
    DEFAULT_ENUMERATION_CAP,
    EnumerationCapError,
    LinearConstraintSystem,
    MarginalOperator,
    VertexMatrix,
    enumerate_local_deterministic,
    marginal_operator,
    normalization_constraints,
    ns_constraint_system,
)
from .rational import as_rational, format_rational, parse_rational
from .scenario import (
    Behavior,
    DimensionError,
    InvalidBehaviorError,
    PartySubset,
    Scenario,
    SignalingError,
    check_nonsignaling,
    convex_combination,
    deterministic_behavior,
    marginalize,
    pr_box,
    uniform_behavior,
    validate,
)
from .analyses import (
    AB_PAIR,
    AC_PAIR,
    BC_PAIR,
    ExtensionLocalPart,
    ExtensionMin,
    InfeasibleMarginalsError,
    LocalityReport,
    MarginalMismatchError,
    MonogamyReport,
    NsOptimum,
    TransitivityReport,
    local_part,
    max_ac_local_part,
    max_bell_local,
    max_bell_ns,
    min_bell_extension,
    monogamy_max,
    transitivity_search,
)

__version__ = "0.1.0"
