"""Exact simplex solver against a brute-force vertex-enumeration oracle."""

import itertools
import random
from fractions import Fraction as F

import pytest

from bellpoly.lp import LinearProgram, LpSolution, solve, verify_certificate

ZERO = F(0)


# ---------------------------------------------------------------------------
# Oracle: enumerate all basic feasible points of a bounded feasible region
# ---------------------------------------------------------------------------

def _solve_square(rows, rhs):
    """Exact Gaussian elimination; None if the system is singular."""
    n = len(rows)
    a = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return None
        a[col], a[pivot] = a[pivot], a[col]
        inv = F(1) / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


def oracle_optimum(lp: LinearProgram):
    """(status, value) by enumerating candidate vertices.

    Requires a bounded feasible region (the generator encloses every
    variable in a box), so feasibility is equivalent to having a vertex:
    every n-subset of constraint hyperplanes is solved exactly and checked
    against all constraints.
    """
    n = lp.num_variables
    planes = []
    for row, rhs in zip(lp.eq_rows, lp.eq_rhs):
        planes.append((_dense(row, n), rhs))
    for row, rhs in zip(lp.le_rows, lp.le_rhs):
        planes.append((_dense(row, n), rhs))
    for j, lb in enumerate(lp.lower_bounds):
        if lb is not None:
            planes.append(([F(1) if k == j else ZERO for k in range(n)], lb))

    best = None
    feasible = False
    for combo in itertools.combinations(range(len(planes)), n):
        point = _solve_square([planes[i][0] for i in combo],
                              [planes[i][1] for i in combo])
        if point is None:
            continue
        if not _feasible(lp, point):
            continue
        feasible = True
        value = sum((c * x for c, x in zip(lp.objective, point)), ZERO)
        if best is None:
            best = value
        elif lp.sense == "max":
            best = max(best, value)
        else:
            best = min(best, value)
    if not feasible:
        return ("infeasible", None)
    return ("optimal", best)


def _dense(row, n):
    vec = [ZERO] * n
    for col, coeff in row:
        vec[col] += coeff
    return vec


def _feasible(lp, point):
    for j, lb in enumerate(lp.lower_bounds):
        if lb is not None and point[j] < lb:
            return False
    for row, rhs in zip(lp.eq_rows, lp.eq_rhs):
        if sum((c * point[j] for j, c in row), ZERO) != rhs:
            return False
    for row, rhs in zip(lp.le_rows, lp.le_rhs):
        if sum((c * point[j] for j, c in row), ZERO) > rhs:
            return False
    return True


# ---------------------------------------------------------------------------
# Random bounded LPs (deterministic corpus)
# ---------------------------------------------------------------------------

def random_lp(rng: random.Random) -> LinearProgram:
    n = rng.randint(1, 4)
    bounds = []
    for _ in range(n):
        r = rng.random()
        if r < 0.2:
            bounds.append(None)
        elif r < 0.35:
            bounds.append(F(rng.randint(-2, 2), rng.randint(1, 2)))
        else:
            bounds.append(ZERO)

    def coeff():
        return F(rng.randint(-3, 3), rng.randint(1, 2))

    def sparse_row():
        cols = sorted(rng.sample(range(n), rng.randint(1, n)))
        return tuple((j, coeff()) for j in cols)

    eq_rows, eq_rhs, le_rows, le_rhs = [], [], [], []
    for _ in range(rng.randint(0, 3)):
        row = sparse_row()
        rhs = F(rng.randint(-4, 4), rng.randint(1, 2))
        if rng.random() < 0.25:
            eq_rows.append(row)
            eq_rhs.append(rhs)
        else:
            le_rows.append(row)
            le_rhs.append(rhs)
    if eq_rows and rng.random() < 0.4:
        # Exercise the dependent-row presolve: duplicate or scale a row.
        k = rng.randrange(len(eq_rows))
        scale = F(rng.randint(1, 3))
        eq_rows.append(tuple((j, scale * c) for j, c in eq_rows[k]))
        eq_rhs.append(scale * eq_rhs[k] if rng.random() < 0.8
                      else scale * eq_rhs[k] + 1)  # sometimes inconsistent

    # Box every variable so the feasible region is bounded and the vertex
    # oracle is exact.
    box = F(rng.randint(1, 3))
    for j in range(n):
        le_rows.append(((j, F(1)),))
        le_rhs.append(box)
        if bounds[j] is None:
            le_rows.append(((j, F(-1)),))
            le_rhs.append(box)

    return LinearProgram(
        sense=rng.choice(["max", "min"]),
        objective=tuple(coeff() for _ in range(n)),
        eq_rows=tuple(eq_rows),
        eq_rhs=tuple(eq_rhs),
        le_rows=tuple(le_rows),
        le_rhs=tuple(le_rhs),
        lower_bounds=tuple(bounds),
    )


def corrupt(lp: LinearProgram, sol: LpSolution, rng: random.Random):
    """A perturbed solution that a sound verifier must reject, or None."""
    j = next((j for j, c in enumerate(lp.objective) if c), None)
    if j is not None and rng.random() < 0.5:
        primal = list(sol.primal)
        primal[j] += F(1, 1_000_000)
        return LpSolution("optimal", sol.value, tuple(primal), sol.dual)
    # Flip a dual multiplier whose row has nonzero rhs (breaks the gap) or
    # a nonzero <= multiplier (breaks the sign condition).
    n_eq = len(lp.eq_rows)
    rhs_all = tuple(lp.eq_rhs) + tuple(lp.le_rhs)
    for i, y in enumerate(sol.dual):
        if y and (rhs_all[i] != 0 or i >= n_eq):
            dual = list(sol.dual)
            dual[i] = -y
            return LpSolution("optimal", sol.value, sol.primal, tuple(dual))
    if j is not None:
        primal = list(sol.primal)
        primal[j] += F(1, 1_000_000)
        return LpSolution("optimal", sol.value, tuple(primal), sol.dual)
    return None


# ---------------------------------------------------------------------------
# Hand-written cases
# ---------------------------------------------------------------------------

def test_one_dimensional():
    lp = LinearProgram("max", (F(1),), le_rows=(((0, F(1)),),), le_rhs=(F(2, 3),))
    sol = solve(lp)
    assert sol.status == "optimal"
    assert sol.value == F(2, 3)
    assert sol.primal == (F(2, 3),)
    assert verify_certificate(lp, sol)


def test_tight_row_dual():
    lp = LinearProgram("max", (F(1), F(1)),
                       le_rows=(((0, F(1)), (1, F(1))),), le_rhs=(F(1),))
    sol = solve(lp)
    assert sol.status == "optimal"
    assert sol.value == 1
    assert sol.dual == (F(1),)
    assert verify_certificate(lp, sol)


def test_infeasible():
    lp = LinearProgram("min", (F(0),), le_rows=(((0, F(1)),),), le_rhs=(F(-1),))
    assert solve(lp).status == "infeasible"


def test_unbounded():
    lp = LinearProgram("max", (F(1),))
    assert solve(lp).status == "unbounded"


def test_equality_and_free_variable():
    # min x + y with x + y = 3, x free (so x can go very negative but the
    # equality pins the objective).
    lp = LinearProgram("min", (F(1), F(1)),
                       eq_rows=(((0, F(1)), (1, F(1))),), eq_rhs=(F(3),),
                       lower_bounds=(None, ZERO))
    sol = solve(lp)
    assert sol.status == "optimal"
    assert sol.value == 3
    assert verify_certificate(lp, sol)


def test_nonzero_lower_bounds():
    lp = LinearProgram("min", (F(1),), lower_bounds=(F(2),))
    sol = solve(lp)
    assert sol.status == "optimal"
    assert sol.value == 2
    assert sol.primal == (F(2),)
    assert verify_certificate(lp, sol)


def test_negative_rhs_equality():
    lp = LinearProgram("max", (F(1), F(0)),
                       eq_rows=(((0, F(1)), (1, F(-1))),), eq_rhs=(F(-2),),
                       le_rows=(((1, F(1)),),), le_rhs=(F(5),))
    sol = solve(lp)
    assert sol.status == "optimal"
    assert sol.value == 3
    assert verify_certificate(lp, sol)


def test_duplicate_equality_rows_are_dropped_consistently():
    row = ((0, F(1)), (1, F(2)))
    lp = LinearProgram("max", (F(1), F(1)),
                       eq_rows=(row, row, ((0, F(2)), (1, F(4)))),
                       eq_rhs=(F(2), F(2), F(4)),
                       le_rows=(((0, F(1)),), ((1, F(1)),)),
                       le_rhs=(F(2), F(2)))
    sol = solve(lp)
    assert sol.status == "optimal"
    assert sol.value == F(2)
    assert verify_certificate(lp, sol)


def test_inconsistent_dependent_rows_are_infeasible():
    row = ((0, F(1)), (1, F(2)))
    lp = LinearProgram("max", (F(1), F(1)),
                       eq_rows=(row, row), eq_rhs=(F(2), F(3)))
    assert solve(lp).status == "infeasible"


def test_determinism():
    rng = random.Random(4242)
    for _ in range(25):
        lp = random_lp(rng)
        first = solve(lp)
        second = solve(lp)
        assert first == second


def test_verify_rejects_value_inflation():
    lp = LinearProgram("max", (F(1),), le_rows=(((0, F(1)),),), le_rhs=(F(1),))
    sol = solve(lp)
    fake = LpSolution("optimal", sol.value + 1, sol.primal, sol.dual)
    assert not verify_certificate(lp, fake)


def test_verify_rejects_perturbed_primal_on_tight_row():
    lp = LinearProgram("max", (F(1), F(1)),
                       le_rows=(((0, F(1)), (1, F(1))),), le_rhs=(F(1),))
    sol = solve(lp)
    primal = (sol.primal[0] + F(1, 1_000_000), sol.primal[1])
    assert not verify_certificate(lp, LpSolution("optimal", sol.value, primal, sol.dual))


def test_verify_rejects_flipped_dual_sign():
    lp = LinearProgram("max", (F(1), F(1)),
                       le_rows=(((0, F(1)), (1, F(1))),), le_rhs=(F(1),))
    sol = solve(lp)
    assert not verify_certificate(
        lp, LpSolution("optimal", sol.value, sol.primal, (-sol.dual[0],)))


def test_verify_rejects_non_optimal_status():
    lp = LinearProgram("max", (F(1),), le_rows=(((0, F(1)),),), le_rhs=(F(1),))
    assert not verify_certificate(lp, LpSolution("infeasible"))


# ---------------------------------------------------------------------------
# Random corpus vs oracle
# ---------------------------------------------------------------------------

def test_random_corpus_matches_oracle_and_certifies():
    rng = random.Random(20240917)
    optima = 0
    rejected = 0
    for _ in range(220):
        lp = random_lp(rng)
        sol = solve(lp)
        status, value = oracle_optimum(lp)
        assert sol.status == status, lp.format_text()
        if status == "optimal":
            assert sol.value == value, lp.format_text()
            assert verify_certificate(lp, sol)
            optima += 1
            bad = corrupt(lp, sol, rng)
            if bad is not None:
                assert not verify_certificate(lp, bad), lp.format_text()
                rejected += 1
    assert optima >= 150  # the corpus is predominantly feasible
    assert rejected >= 100
