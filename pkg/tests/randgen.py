"""Seeded random generators for games and strategies (test-side only)."""

import random
from fractions import Fraction as F

from signalgames.model import BehavioralStrategy, GameSpec, SymmetricGameSpec


def rational_weights(rng, n, denom_max=4):
    """n nonnegative rationals summing to exactly 1, all positive."""
    weights = [rng.randint(1, denom_max) for _ in range(n)]
    total = sum(weights)
    return [F(w, total) for w in weights]


def random_dist(rng, outcomes, support_max=2):
    k = rng.randint(1, min(support_max, len(outcomes)))
    chosen = rng.sample(outcomes, k)
    ws = rational_weights(rng, k)
    return dict(zip(chosen, ws))


def random_game(seed, n_states=2, n_actions=2, n_signals=2, support_max=2) -> GameSpec:
    """Small general game with sparse exact-rational transitions."""
    rng = random.Random(seed)
    states = [f"x{k}" for k in range(rng.randint(1, n_states))]
    I = [f"a{k}" for k in range(rng.randint(1, n_actions))]
    J = [f"b{k}" for k in range(rng.randint(1, n_actions))]
    C = [f"c{k}" for k in range(rng.randint(1, n_signals))]
    D = [f"d{k}" for k in range(rng.randint(1, n_signals))]
    triples = [(x, c, d) for x in states for c in C for d in D]
    initial = random_dist(rng, triples, support_max)
    transition = {}
    reward = {}
    for x in states:
        for i in I:
            for j in J:
                transition[(x, i, j)] = random_dist(rng, triples, support_max)
                reward[(x, i, j)] = F(rng.randint(-8, 8), rng.randint(1, 4))
    return GameSpec(states=states, actions1=I, actions2=J, signals1=C,
                    signals2=D, initial=initial, transition=transition,
                    reward=reward)


def random_symmetric_game(seed, n_states=2, n_actions=2, n_signals=2,
                          support_max=2) -> SymmetricGameSpec:
    rng = random.Random(seed)
    states = [f"x{k}" for k in range(rng.randint(1, n_states))]
    I = [f"a{k}" for k in range(rng.randint(1, n_actions))]
    J = [f"b{k}" for k in range(rng.randint(1, n_actions))]
    S = [f"s{k}" for k in range(rng.randint(1, n_signals))]
    pairs = [(x, s) for x in states for s in S]
    initial = random_dist(rng, pairs, support_max)
    transition = {}
    reward = {}
    for x in states:
        for i in I:
            for j in J:
                transition[(x, i, j)] = random_dist(rng, pairs, support_max)
                reward[(x, i, j)] = F(rng.randint(-4, 4), rng.randint(1, 4))
    return SymmetricGameSpec(states=states, actions1=I, actions2=J, signals=S,
                             initial=initial, transition=transition,
                             reward=reward)


def _reachable_views(spec: GameSpec, player: int, horizon: int):
    """All views of the given player with positive chance weight, lengths
    1..horizon stages (independent walk, no library tree reuse)."""
    views = set()
    frontier = {}
    for (x, c, d), p in spec.initial.items():
        if p > 0:
            v = (c,) if player == 1 else (d,)
            views.add(v)
            frontier.setdefault(v, set()).add(x)
    for _ in range(horizon - 1):
        nxt = {}
        for v, xs in frontier.items():
            for x in xs:
                for i in spec.actions1:
                    for j in spec.actions2:
                        for (x2, c, d), p in spec.transition[(x, i, j)].items():
                            if p <= 0:
                                continue
                            if player == 1:
                                v2 = v + (i, c)
                            else:
                                v2 = v + (j, d)
                            views.add(v2)
                            nxt.setdefault(v2, set()).add(x2)
        frontier = nxt
    return sorted(views)


def random_strategy(rng_or_seed, spec: GameSpec, player: int,
                    horizon: int) -> BehavioralStrategy:
    """Random exact behavioral strategy defined on every reachable view."""
    rng = (rng_or_seed if isinstance(rng_or_seed, random.Random)
           else random.Random(rng_or_seed))
    actions = spec.actions1 if player == 1 else spec.actions2
    table = {}
    for v in _reachable_views(spec, player, horizon):
        ws = rational_weights(rng, len(actions))
        table[v] = dict(zip(actions, ws))
    return BehavioralStrategy(player=player, horizon=horizon, table=table,
                              tail={a: F(1, len(actions)) for a in actions})
