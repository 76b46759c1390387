import random
from fractions import Fraction as F

import pytest

from signalgames.lp import (
    EQ,
    GEQ,
    INFEASIBLE,
    LEQ,
    OPTIMAL,
    UNBOUNDED,
    LinearProgram,
    MatrixGame,
    best_response_value,
    solve_lp,
    solve_matrix_game,
)


def test_lp_trivial_bound():
    # maximize v s.t. v <= 0, v <= 1  ->  0
    lp = LinearProgram(
        objective=[F(1)],
        rows=[[F(1)], [F(1)]],
        senses=[LEQ, LEQ],
        rhs=[F(0), F(1)],
        free=frozenset({0}),
    )
    sol = solve_lp(lp)
    assert sol.status == OPTIMAL
    assert sol.objective == 0


def test_lp_degenerate_redundant_equalities_terminates():
    # Redundant equalities and a degenerate vertex; Bland's rule must not cycle.
    lp = LinearProgram(
        objective=[F(3), F(2), F(1)],
        rows=[
            [F(1), F(1), F(1)],
            [F(2), F(2), F(2)],      # redundant copy
            [F(1), F(0), F(0)],
            [F(0), F(1), F(1)],      # ties the first row at the optimum
        ],
        senses=[EQ, EQ, LEQ, LEQ],
        rhs=[F(1), F(2), F(1), F(0)],
    )
    sol = solve_lp(lp)
    assert sol.status == OPTIMAL
    assert sol.objective == 3
    assert sol.primal[0] == 1 and sol.primal[1] == 0 and sol.primal[2] == 0


def test_lp_infeasible_certificate():
    # x >= 2 and x <= 1 is infeasible.
    lp = LinearProgram(
        objective=[F(0)],
        rows=[[F(1)], [F(1)]],
        senses=[GEQ, LEQ],
        rhs=[F(2), F(1)],
    )
    sol = solve_lp(lp)
    assert sol.status == INFEASIBLE
    y = sol.certificate
    # Farkas: sign pattern, nonpositive combination over columns, positive rhs.
    assert y[0] >= 0 and y[1] <= 0
    assert y[0] * 1 + y[1] * 1 <= 0
    assert y[0] * 2 + y[1] * 1 > 0


def test_lp_unbounded_ray():
    lp = LinearProgram(
        objective=[F(1), F(0)],
        rows=[[F(-1), F(1)]],
        senses=[LEQ],
        rhs=[F(1)],
    )
    sol = solve_lp(lp)
    assert sol.status == UNBOUNDED
    d = sol.certificate
    # improving ray: objective strictly increases, all rows stay feasible
    assert d[0] * 1 + d[1] * 0 > 0
    assert -d[0] + d[1] <= 0
    assert all(v >= 0 for v in d)


def test_lp_duals_certify():
    # max x + y s.t. x + 2y <= 4, 3x + y <= 6 -> vertex (8/5, 6/5), value 14/5.
    lp = LinearProgram(
        objective=[F(1), F(1)],
        rows=[[F(1), F(2)], [F(3), F(1)]],
        senses=[LEQ, LEQ],
        rhs=[F(4), F(6)],
    )
    sol = solve_lp(lp)
    assert sol.status == OPTIMAL
    assert sol.objective == F(14, 5)
    assert sol.primal == [F(8, 5), F(6, 5)]
    # dual objective equals primal objective (strong duality, exact)
    assert sol.duals[0] * 4 + sol.duals[1] * 6 == F(14, 5)


def test_matrix_game_paper_two_by_two():
    sol = solve_matrix_game([[F(0), F(-1, 2)], [F(-1, 2), F(1, 2)]])
    assert sol.value == F(-1, 6)
    assert sol.row_strategy == [F(2, 3), F(1, 3)]
    assert sol.col_strategy == [F(2, 3), F(1, 3)]


def test_matrix_game_one_by_one():
    sol = solve_matrix_game([[F(7, 3)]])
    assert sol.value == F(7, 3)
    assert sol.row_strategy == [1] and sol.col_strategy == [1]


def test_matrix_game_coordination():
    sol = solve_matrix_game([[F(1), F(0)], [F(0), F(1)]])
    assert sol.value == F(1, 2)
    assert sol.row_strategy == [F(1, 2), F(1, 2)]
    assert sol.col_strategy == [F(1, 2), F(1, 2)]


def test_matrix_game_transpose_duality():
    rng = random.Random(7)
    for _ in range(25):
        m = [[F(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(3)]
             for _ in range(2)]
        v = solve_matrix_game(m).value
        mt = [[-m[r][c] for r in range(2)] for c in range(3)]
        assert solve_matrix_game(mt).value == -v


def test_matrix_game_constant_shift():
    rng = random.Random(11)
    for _ in range(25):
        m = [[F(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(2)]
             for _ in range(3)]
        c = F(rng.randint(-5, 5), rng.randint(1, 3))
        v = solve_matrix_game(m).value
        shifted = [[e + c for e in row] for row in m]
        assert solve_matrix_game(shifted).value == v + c


def _bruteforce_value_3x3(m):
    """Grid search over coarse mixed strategies; lower/upper sandwich."""
    grid = [F(a, 8) for a in range(9)]
    mixes = [(p, q, 1 - p - q) for p in grid for q in grid if p + q <= 1]
    lower = max(min(sum(mix[r] * m[r][c] for r in range(3)) for c in range(3))
                for mix in mixes)
    upper = min(max(sum(mix[c] * m[r][c] for c in range(3)) for r in range(3))
                for mix in mixes)
    return lower, upper


def test_matrix_game_dominated_row_and_bruteforce_sandwich():
    rng = random.Random(3)
    for _ in range(10):
        m = [[F(rng.randint(-4, 4), rng.randint(1, 2)) for _ in range(3)]
             for _ in range(3)]
        sol = solve_matrix_game(m)
        lower, upper = _bruteforce_value_3x3(m)
        assert lower <= sol.value <= upper
        # add a strictly dominated extra row: value unchanged
        dominated = [min(m[r][c] for r in range(3)) - 1 for c in range(3)]
        assert solve_matrix_game(m + [dominated]).value == sol.value


def test_matrix_game_guarantees_hold_exactly():
    rng = random.Random(19)
    for _ in range(20):
        rows_n = rng.randint(1, 4)
        cols_n = rng.randint(1, 4)
        m = [[F(rng.randint(-8, 8), rng.randint(1, 5)) for _ in range(cols_n)]
             for _ in range(rows_n)]
        sol = solve_matrix_game(m)
        game = MatrixGame(m)
        # min over columns of row-mix payoff == value == max over rows of col-mix
        assert best_response_value(game, sol.row_strategy, "row") == sol.value
        assert best_response_value(game, sol.col_strategy, "col") == sol.value


def test_best_response_value_examples():
    assert best_response_value([[F(1), F(0)], [F(0), F(1)]],
                               [F(1, 2), F(1, 2)], "row") == F(1, 2)
    assert best_response_value([[F(0), F(-1, 2)], [F(-1, 2), F(1, 2)]],
                               [F(1), F(0)], "row") == F(-1, 2)
    assert best_response_value([[F(0), F(-1, 2)], [F(-1, 2), F(1, 2)]],
                               [F(2, 3), F(1, 3)], "row") == F(-1, 6)


def test_matrix_game_rejects_malformed():
    with pytest.raises(Exception):
        solve_matrix_game([])
    with pytest.raises(Exception):
        MatrixGame([[F(1)], [F(1), F(2)]])


def test_trace_dumps_tableaus():
    lines = []
    lp = LinearProgram(
        objective=[F(1), F(1)],
        rows=[[F(1), F(2)], [F(3), F(1)]],
        senses=[LEQ, LEQ],
        rhs=[F(4), F(6)],
    )
    sol = solve_lp(lp, trace=lines.append)
    assert sol.status == OPTIMAL
    assert any("|" in line for line in lines)  # tableau rows present
