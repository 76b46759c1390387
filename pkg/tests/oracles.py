"""Independent oracles: pure-strategy enumeration, closed forms.

Deliberately reimplements game evaluation with plain recursion so the
sequence-form and backward-induction paths are checked against something
that shares no code with them (the matrix-game solver is the only shared
piece, and it has its own grid-search oracle tests).
"""

import itertools
from fractions import Fraction as F

from randgen import _reachable_views
from signalgames.lp import solve_matrix_game


def pure_strategies(spec, player, horizon, cap=None):
    views = _reachable_views(spec, player, horizon)
    actions = spec.actions1 if player == 1 else spec.actions2
    count = len(actions) ** len(views)
    if cap is not None and count > cap:
        return None
    out = []
    for combo in itertools.product(actions, repeat=len(views)):
        out.append(dict(zip(views, combo)))
    return out


def profile_mean_payoff(spec, pure1, pure2, horizon):
    """Expected mean payoff of a pure strategy pair, by direct recursion."""
    total = [F(0)]

    def walk(x, v1, v2, weight, depth):
        i, j = pure1[v1], pure2[v2]
        total[0] += weight * spec.reward[(x, i, j)]
        if depth < horizon:
            for (x2, c, d), p in spec.transition[(x, i, j)].items():
                if p > 0:
                    walk(x2, v1 + (i, c), v2 + (j, d), weight * p, depth + 1)

    for (x, c, d), p in spec.initial.items():
        if p > 0:
            walk(x, (c,), (d,), p, 1)
    return total[0] / horizon


def bruteforce_mean_value(spec, horizon, cap=4096):
    """Normal-form value via full pure-strategy enumeration, or None when
    the enumeration would exceed ``cap`` strategies per player."""
    pures1 = pure_strategies(spec, 1, horizon, cap)
    pures2 = pure_strategies(spec, 2, horizon, cap)
    if pures1 is None or pures2 is None:
        return None
    matrix = [[profile_mean_payoff(spec, p1, p2, horizon) for p2 in pures2]
              for p1 in pures1]
    return solve_matrix_game(matrix).value


def guessing_matrix_value(n):
    """Stopping-game oracle for the Big Match variant's sup bounds.

    Both players reduce to a single switch time in {1..n, never}; the
    maximizer scores except on a simultaneous switch (or mutual never), so
    the matrix is all-ones minus the identity and the value is n/(n+1).
    """
    size = n + 1
    matrix = [[F(0) if a == b else F(1) for b in range(size)] for a in range(size)]
    return solve_matrix_game(matrix).value


def mdp_nstage_value(n):
    """Blind MDP closed form: commit to Bottom after k Tops."""
    best = F(0)
    for k in range(n):
        best = max(best, (F(1) - F(1, 2 ** k)) * F(n - k - 1, n))
    return best
