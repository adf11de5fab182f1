"""Exact rational linear programming with optimality certificates.

``solve`` runs a two-phase primal simplex over exact rationals with
Bland's anti-cycling rule, fixed variable order and a canonical starting
basis, so results are fully deterministic: among multiple optima the
returned vertex is the one Bland's rule reaches, which is this package's
documented tie-break.  ``verify_certificate`` re-checks a solution from
scratch (primal feasibility, dual feasibility, zero duality gap), sharing
no state with the solver.

Internally the tableau arithmetic runs on ``gmpy2.mpq`` when available
(exact rationals, same semantics as ``fractions.Fraction``, several times
faster); all public values are plain Fractions.

Dual sign conventions (checked by ``verify_certificate``):

* sense ``max``: multipliers on <= rows are >= 0, reduced costs
  ``c - A_eq^T y_eq - A_le^T y_le`` are <= 0 on lower-bounded variables
  and 0 on free ones;
* sense ``min``: multipliers on <= rows are <= 0, reduced costs >= 0 on
  lower-bounded variables, 0 on free ones;
* in both cases  value = b_eq^T y_eq + b_le^T y_le + sum_j l_j r_j  with
  the sum over lower-bounded variables (their bound l_j times reduced
  cost r_j), which together with feasibility proves optimality by weak
  duality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .rational import as_rational

try:
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover - exercised only without gmpy2
    _Q = Fraction

__all__ = ["LinearProgram", "LpSolution", "solve", "verify_certificate"]

Row = tuple[tuple[int, Fraction], ...]

_Z = _Q(0)
_ONE = _Q(1)
ZERO = Fraction(0)


@dataclass(frozen=True)
class LinearProgram:
    """max or min of objective . x subject to equalities, <= rows and bounds.

    ``lower_bounds[j]`` is the lower bound of variable j (default 0);
    ``None`` marks a free variable.  There are no upper bounds; encode
    them as <= rows.
    """

    sense: str
    objective: tuple[Fraction, ...]
    eq_rows: tuple[Row, ...] = ()
    eq_rhs: tuple[Fraction, ...] = ()
    le_rows: tuple[Row, ...] = ()
    le_rhs: tuple[Fraction, ...] = ()
    lower_bounds: Optional[tuple[Optional[Fraction], ...]] = None
    variable_labels: tuple[str, ...] = ()
    eq_labels: tuple[str, ...] = ()
    le_labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.sense not in ("max", "min"):
            raise ValueError(f"sense must be 'max' or 'min', got {self.sense!r}")
        n = len(self.objective)
        object.__setattr__(self, "objective", tuple(as_rational(c) for c in self.objective))
        if self.lower_bounds is None:
            object.__setattr__(self, "lower_bounds", tuple(ZERO for _ in range(n)))
        else:
            object.__setattr__(self, "lower_bounds",
                               tuple(None if b is None else as_rational(b)
                                     for b in self.lower_bounds))
        if len(self.lower_bounds) != n:
            raise ValueError("lower_bounds length must match the objective")
        if len(self.eq_rows) != len(self.eq_rhs):
            raise ValueError("eq_rows and eq_rhs must align")
        if len(self.le_rows) != len(self.le_rhs):
            raise ValueError("le_rows and le_rhs must align")
        if not self.variable_labels:
            object.__setattr__(self, "variable_labels",
                               tuple(f"x{j}" for j in range(n)))
        if not self.eq_labels:
            object.__setattr__(self, "eq_labels",
                               tuple(f"eq{i}" for i in range(len(self.eq_rows))))
        if not self.le_labels:
            object.__setattr__(self, "le_labels",
                               tuple(f"le{i}" for i in range(len(self.le_rows))))
        if len(self.variable_labels) != n or len(self.eq_labels) != len(self.eq_rows) \
                or len(self.le_labels) != len(self.le_rows):
            raise ValueError("label lengths are inconsistent")
        for row in self.eq_rows + self.le_rows:
            for col, _ in row:
                if not 0 <= col < n:
                    raise ValueError(f"row references column {col} outside 0..{n - 1}")

    @property
    def num_variables(self) -> int:
        return len(self.objective)

    def format_text(self) -> str:
        """Human-readable dump of the program, for debugging (not a stable format)."""

        def term(coeff, col):
            return f"{coeff}*{self.variable_labels[col]}"

        lines = [f"{self.sense} " + " + ".join(
            term(c, j) for j, c in enumerate(self.objective) if c)]
        for row, rhs, label in zip(self.eq_rows, self.eq_rhs, self.eq_labels):
            lines.append(f"  [{label}] " + " + ".join(term(c, j) for j, c in row) + f" = {rhs}")
        for row, rhs, label in zip(self.le_rows, self.le_rhs, self.le_labels):
            lines.append(f"  [{label}] " + " + ".join(term(c, j) for j, c in row) + f" <= {rhs}")
        bounds = []
        for j, b in enumerate(self.lower_bounds):
            bounds.append(f"{self.variable_labels[j]} free" if b is None
                          else f"{self.variable_labels[j]} >= {b}")
        lines.append("  " + ", ".join(bounds))
        return "\n".join(lines)


@dataclass(frozen=True)
class LpSolution:
    """Solver outcome with exact primal and dual witnesses.

    ``dual`` carries one multiplier per constraint row, equality rows
    first and then <= rows, in the program's order.  For ``optimal``
    solutions the zero-gap certificate holds exactly; for other statuses
    the witness fields are None.
    """

    status: str
    value: Optional[Fraction] = None
    primal: Optional[tuple[Fraction, ...]] = None
    dual: Optional[tuple[Fraction, ...]] = None

    def dual_eq(self, lp: LinearProgram) -> tuple[Fraction, ...]:
        return self.dual[:len(lp.eq_rows)]

    def dual_le(self, lp: LinearProgram) -> tuple[Fraction, ...]:
        return self.dual[len(lp.eq_rows):]


# ---------------------------------------------------------------------------
# Presolve: select a maximal independent subset of equality rows
# ---------------------------------------------------------------------------

def _independent_eq_rows(eq_rows: Sequence[dict], eq_rhs: list) -> tuple[list[int], bool]:
    """Indices of a maximal independent row subset, plus an infeasibility flag.

    Works on sparse dict rows over the backend scalar.  Dependent rows are
    checked for consistency against the rows that span them: a dependent
    row with inconsistent right-hand side makes the system infeasible.
    Deterministic (rows processed in order, pivot on the smallest column).
    """
    echelon: dict[int, tuple[dict, object]] = {}
    kept: list[int] = []
    for i, row in enumerate(eq_rows):
        r = dict(row)
        rr = eq_rhs[i]
        placed = False
        while r:
            lead = min(r)
            if lead in echelon:
                erow, erhs = echelon[lead]
                f = r[lead]
                for c, v in erow.items():
                    nv = r.get(c, _Z) - f * v
                    if nv:
                        r[c] = nv
                    elif c in r:
                        del r[c]
                rr = rr - f * erhs
            else:
                inv = _ONE / r[lead]
                if inv != 1:
                    r = {c: v * inv for c, v in r.items()}
                    rr = rr * inv
                echelon[lead] = (r, rr)
                kept.append(i)
                placed = True
                break
        if not placed and rr != 0:
            return kept, True
    return kept, False


# ---------------------------------------------------------------------------
# Simplex core
# ---------------------------------------------------------------------------

def _pivot(rows: list[list], zrow: list, basis: list[int], r: int, pc: int) -> None:
    """In-place Bland pivot: variable pc enters, row r's basic variable leaves."""
    prow = rows[r]
    piv = prow[pc]
    if piv != 1:
        inv = _ONE / piv
        prow = rows[r] = [v * inv if v else v for v in prow]
    nz = [j for j, v in enumerate(prow) if v]
    dense = len(nz) * 3 > len(prow)
    for i in range(len(rows)):
        if i == r:
            continue
        row = rows[i]
        f = row[pc]
        if not f:
            continue
        if dense:
            rows[i] = [a - f * b if b else a for a, b in zip(row, prow)]
        else:
            for j in nz:
                row[j] -= f * prow[j]
    f = zrow[pc]
    if f:
        if dense:
            zrow[:] = [a - f * b if b else a for a, b in zip(zrow, prow)]
        else:
            for j in nz:
                zrow[j] -= f * prow[j]
    basis[r] = pc


def _run_simplex(rows: list[list], zrow: list, basis: list[int],
                 barred: set[int], ncols: int) -> str:
    """Bland's rule to optimality.  Returns 'optimal' or 'unbounded'."""
    while True:
        enter = -1
        for j in range(ncols):
            if zrow[j] > 0 and j not in barred:
                enter = j
                break
        if enter < 0:
            return "optimal"
        leave = -1
        best = None
        for i, row in enumerate(rows):
            a = row[enter]
            if a > 0:
                ratio = row[-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave < 0:
            return "unbounded"
        _pivot(rows, zrow, basis, leave, enter)


def _rebuild_zrow(rows: list[list], basis: list[int], cost: list, ncols: int) -> list:
    """Reduced-cost row for the given basis; last entry holds -objective."""
    zrow = list(cost) + [_Z]
    for i, b in enumerate(basis):
        cb = cost[b]
        if cb:
            row = rows[i]
            for j in range(ncols + 1):
                v = row[j]
                if v:
                    zrow[j] -= cb * v
    return zrow


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

def solve(lp: LinearProgram) -> LpSolution:
    """Exact optimum with primal and dual witnesses.

    Deterministic for a fixed input.  Infeasible and unbounded programs
    are reported as statuses, never raised.
    """
    n = lp.num_variables
    maximize = lp.sense == "max"
    sign = _ONE if maximize else -_ONE

    # Variable transforms: shift lower-bounded variables to >= 0, split
    # free variables into differences of two nonnegative ones.
    col_of: list[tuple[str, int, object]] = []   # per original var
    ncols = 0
    const = _Z  # objective constant from shifts
    for j in range(n):
        lb = lp.lower_bounds[j]
        cj = sign * _Q(lp.objective[j])
        if lb is None:
            col_of.append(("split", ncols, ncols + 1))
            ncols += 2
        else:
            shift = _Q(lb)
            col_of.append(("shift", ncols, shift))
            if shift:
                const += cj * shift
            ncols += 1

    def expand(row: Row) -> dict:
        out: dict[int, object] = {}
        for col, coeff in row:
            q = _Q(coeff)
            kind, a, b = col_of[col]
            if kind == "split":
                out[a] = out.get(a, _Z) + q
                out[b] = out.get(b, _Z) - q
            else:
                out[a] = out.get(a, _Z) + q
        return {c: v for c, v in out.items() if v}

    def shifted_rhs(row: Row, rhs) -> object:
        value = _Q(rhs)
        for col, coeff in row:
            kind, _, shift = col_of[col]
            if kind == "shift" and shift:
                value -= _Q(coeff) * shift
        return value

    eq_sparse = [expand(row) for row in lp.eq_rows]
    eq_rhs = [shifted_rhs(row, rhs) for row, rhs in zip(lp.eq_rows, lp.eq_rhs)]

    kept_eq, infeasible = _independent_eq_rows(eq_sparse, eq_rhs)
    if infeasible:
        return LpSolution(status="infeasible")

    le_sparse = [expand(row) for row in lp.le_rows]
    le_rhs = [shifted_rhs(row, rhs) for row, rhs in zip(lp.le_rows, lp.le_rhs)]

    # Assemble standardized rows: kept equalities, then all <= rows with
    # slacks.  Flip rows with negative rhs; give every row an identity
    # column (its slack, or an artificial) for the starting basis and for
    # reading B^-1 at the end.
    std_rows: list[dict] = []
    std_rhs: list = []
    flipped: list[bool] = []
    row_kind: list[tuple[str, int]] = []  # ("eq", original index) / ("le", index)
    for i in kept_eq:
        std_rows.append(dict(eq_sparse[i]))
        std_rhs.append(eq_rhs[i])
        row_kind.append(("eq", i))
    slack_col: dict[int, int] = {}
    for i, row in enumerate(le_sparse):
        slack_col[i] = ncols
        r = dict(row)
        r[ncols] = _ONE
        ncols += 1
        std_rows.append(r)
        std_rhs.append(le_rhs[i])
        row_kind.append(("le", i))
    m = len(std_rows)
    for i in range(m):
        if std_rhs[i] < 0:
            std_rows[i] = {c: -v for c, v in std_rows[i].items()}
            std_rhs[i] = -std_rhs[i]
            flipped.append(True)
        else:
            flipped.append(False)
    structural = ncols

    identity_col: list[int] = [-1] * m
    basis: list[int] = [-1] * m
    artificials: list[int] = []
    for i in range(m):
        kind, idx = row_kind[i]
        if kind == "le" and not flipped[i]:
            identity_col[i] = slack_col[idx]
            basis[i] = slack_col[idx]
        else:
            art = ncols
            ncols += 1
            std_rows[i][art] = _ONE
            artificials.append(art)
            identity_col[i] = art
            basis[i] = art

    rows = []
    for i in range(m):
        dense = [_Z] * (ncols + 1)
        for c, v in std_rows[i].items():
            dense[c] = v
        dense[-1] = std_rhs[i]
        rows.append(dense)

    barred: set[int] = set(artificials)

    # Phase 1: drive the artificial variables to zero.
    if artificials:
        cost1 = [_Z] * ncols
        for a in artificials:
            cost1[a] = -_ONE
        zrow = _rebuild_zrow(rows, basis, cost1, ncols)
        status = _run_simplex(rows, zrow, basis, barred, ncols)
        assert status == "optimal"  # phase-1 objective is bounded above by 0
        if zrow[-1] != 0:  # -(-sum of artificials) != 0
            return LpSolution(status="infeasible")
        art_set = set(artificials)
        for i in range(m):
            if basis[i] in art_set:
                enter = next((j for j in range(structural) if rows[i][j]), -1)
                if enter < 0:
                    # Unreachable: the presolve keeps only independent
                    # equality rows, and <= rows carry their own slack.
                    raise AssertionError("artificial stuck in basis on a dependent row")
                _pivot(rows, zrow, basis, i, enter)

    # Phase 2: original objective (internally always maximized).
    cost2 = [_Z] * ncols
    for j in range(n):
        cj = sign * _Q(lp.objective[j])
        if not cj:
            continue
        kind, a, b = col_of[j]
        cost2[a] += cj
        if kind == "split":
            cost2[b] -= cj
    zrow = _rebuild_zrow(rows, basis, cost2, ncols)
    status = _run_simplex(rows, zrow, basis, barred, ncols)
    if status == "unbounded":
        return LpSolution(status="unbounded")

    # Recover the primal point in original variables.
    x_std = [_Z] * ncols
    for i, b in enumerate(basis):
        x_std[b] = rows[i][-1]
    primal = []
    for j in range(n):
        kind, a, b = col_of[j]
        if kind == "split":
            primal.append(Fraction(x_std[a] - x_std[b]))
        else:
            primal.append(Fraction(x_std[a] + b))
    value_int = -zrow[-1] + const
    value = Fraction(value_int) if maximize else Fraction(-value_int)

    # Row multipliers: read c_B B^-1 off the identity columns, then undo
    # row flips; for min programs the internal duals are negated.
    cb = [(i, cost2[basis[i]]) for i in range(m) if cost2[basis[i]]]
    dual_by_row: dict[tuple[str, int], Fraction] = {}
    for i in range(m):
        col = identity_col[i]
        yi = sum((c * rows[k][col] for k, c in cb), _Z)
        if flipped[i]:
            yi = -yi
        if not maximize:
            yi = -yi
        dual_by_row[row_kind[i]] = Fraction(yi)
    dual = [dual_by_row.get(("eq", i), ZERO) for i in range(len(lp.eq_rows))]
    dual += [dual_by_row.get(("le", i), ZERO) for i in range(len(lp.le_rows))]

    return LpSolution(status="optimal", value=value,
                      primal=tuple(primal), dual=tuple(dual))


# ---------------------------------------------------------------------------
# Certificate verification
# ---------------------------------------------------------------------------

def verify_certificate(lp: LinearProgram, sol: LpSolution) -> bool:
    """Exact re-check of an optimality certificate, independent of the solver.

    True iff the primal point is feasible, the dual multipliers are
    feasible with the sign conventions of the module docstring, and both
    objectives equal ``sol.value`` exactly.
    """
    if sol.status != "optimal" or sol.value is None \
            or sol.primal is None or sol.dual is None:
        return False
    n = lp.num_variables
    if len(sol.primal) != n or len(sol.dual) != len(lp.eq_rows) + len(lp.le_rows):
        return False
    x = sol.primal
    y_eq = sol.dual[:len(lp.eq_rows)]
    y_le = sol.dual[len(lp.eq_rows):]
    maximize = lp.sense == "max"

    for j in range(n):
        lb = lp.lower_bounds[j]
        if lb is not None and x[j] < lb:
            return False
    for row, rhs in zip(lp.eq_rows, lp.eq_rhs):
        if _row_dot(row, x) != rhs:
            return False
    for row, rhs in zip(lp.le_rows, lp.le_rhs):
        if _row_dot(row, x) > rhs:
            return False
    if _dot(lp.objective, x) != sol.value:
        return False

    for y in y_le:
        if maximize and y < 0:
            return False
        if not maximize and y > 0:
            return False

    # Reduced costs c - A^T y.
    reduced = list(lp.objective)
    for row, y in zip(lp.eq_rows, y_eq):
        if y:
            for col, coeff in row:
                reduced[col] -= y * coeff
    for row, y in zip(lp.le_rows, y_le):
        if y:
            for col, coeff in row:
                reduced[col] -= y * coeff

    dual_value = ZERO
    for rhs, y in zip(lp.eq_rhs, y_eq):
        dual_value += rhs * y
    for rhs, y in zip(lp.le_rhs, y_le):
        dual_value += rhs * y
    for j in range(n):
        lb = lp.lower_bounds[j]
        r = reduced[j]
        if lb is None:
            if r != 0:
                return False
        else:
            if maximize and r > 0:
                return False
            if not maximize and r < 0:
                return False
            if lb and r:
                dual_value += lb * r
    return dual_value == sol.value


def _row_dot(row: Row, x: Sequence[Fraction]) -> Fraction:
    return sum((coeff * x[col] for col, coeff in row), ZERO)


def _dot(c: Sequence[Fraction], x: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(c, x) if a), ZERO)
