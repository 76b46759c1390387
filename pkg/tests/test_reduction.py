import random
from fractions import Fraction as F

import pytest

from randgen import random_strategy, random_symmetric_game
from signalgames import corpus
from signalgames.errors import UnsupportedStructureError
from signalgames.histories import build_trees, exact_play_distribution
from signalgames.lp import solve_matrix_game
from signalgames.model import PLAYER1, SymmetricGameSpec
from signalgames.rationals import ZERO
from signalgames.reduction import (
    MEAN,
    auxiliary_from_trees,
    build_auxiliary,
    lift_payoff,
    posterior,
    solve_backward,
)


def test_signal_transition_noisy_example():
    # prior 1/2-1/2, likelihoods 1/3 vs 2/3: marginal of signal u is 1/2
    aux = build_auxiliary(corpus.noisy_public_2state(), 2)
    (root,) = aux.roots
    for i in aux.actions1:
        for j in aux.actions2:
            psi = aux.signal_transition(root, i, j)
            assert psi["u"] == F(1, 2)
            assert psi["w"] == F(1, 2)
            assert sum(psi.values(), ZERO) == 1


def test_signal_transition_rows_sum_one_random():
    for seed in range(15):
        sym = random_symmetric_game(seed)
        aux = build_auxiliary(sym, 3)
        for level in aux.levels[:-1]:
            for node in level:
                for i in aux.actions1:
                    for j in aux.actions2:
                        psi = aux.signal_transition(node, i, j)
                        assert sum(psi.values(), ZERO) == 1


def test_constant_signal_psi_trivial():
    aux = build_auxiliary(corpus.bigmatch_fullmonitor(), 3)
    (root,) = aux.roots
    for i in aux.actions1:
        for j in aux.actions2:
            psi = aux.signal_transition(root, i, j)
            assert psi == {"o": F(1)}


def test_belief_recursion_matches_member_trees():
    """The lightweight belief recursion and the explicit member-based
    observed tree agree on beta and posterior at every node."""
    for seed in range(12):
        sym = random_symmetric_game(seed)
        pair = build_trees(sym, 4)
        from_members = auxiliary_from_trees(pair)
        from_beliefs = build_auxiliary(sym, 4)
        for n in range(4):
            lhs = {node.view(): (node.beta, tuple(sorted(node.posterior.items())))
                   for node in from_members.levels[n]}
            rhs = {node.view(): (node.beta, tuple(sorted(node.posterior.items())))
                   for node in from_beliefs.levels[n]}
            assert lhs == rhs, (seed, n)


def test_posterior_examples():
    # Dirac prior, deterministic transitions -> Dirac posterior
    aux = build_auxiliary(corpus.bigmatch_fullmonitor(), 2)
    (root,) = aux.roots
    assert root.posterior == {"s": F(1)}
    for w, child in root.children.values():
        assert len(child.posterior) == 1 and sum(child.posterior.values()) == 1

    # likelihood 1/3 vs 2/3 -> posterior (1/3, 2/3) after u
    aux2 = build_auxiliary(corpus.noisy_public_2state(), 2)
    (root2,) = aux2.roots
    for (edge, label), (w, child) in root2.children.items():
        if label == "u":
            assert child.posterior == {"xa": F(1, 3), "xb": F(2, 3)}
        else:
            assert child.posterior == {"xa": F(2, 3), "xb": F(1, 3)}


def test_posterior_uninformative_equals_markov_marginal():
    """With a constant public signal the posterior must equal the plain
    Markov forward marginal under the played actions (independent oracle)."""
    sym = SymmetricGameSpec(
        states=["xa", "xb"], actions1=["T", "B"], actions2=["L"],
        signals=["o"],
        initial={("xa", "o"): F(1, 4), ("xb", "o"): F(3, 4)},
        transition={
            ("xa", "T", "L"): {("xa", "o"): F(1, 3), ("xb", "o"): F(2, 3)},
            ("xb", "T", "L"): {("xb", "o"): F(1)},
            ("xa", "B", "L"): {("xa", "o"): F(1)},
            ("xb", "B", "L"): {("xa", "o"): F(1, 2), ("xb", "o"): F(1, 2)},
        },
        reward={(x, i, "L"): F(0) for x in ("xa", "xb") for i in ("T", "B")},
    )
    aux = build_auxiliary(sym, 3)

    def forward(dist, action):
        out = {}
        for x, w in dist.items():
            for (x2, s), p in sym.transition[(x, action, "L")].items():
                out[x2] = out.get(x2, ZERO) + w * p
        return out

    marg = {"xa": F(1, 4), "xb": F(3, 4)}
    (node,) = aux.roots
    assert node.posterior == marg
    for action in ("T", "B"):
        marg2 = forward(marg, action)
        (child,) = [c for (edge, lab), (w, c) in node.children.items()
                    if edge[0] == action]
        assert child.posterior == marg2


def test_posterior_martingale_one_step():
    """The expected next-stage posterior under the signal transition equals
    the one-step predicted law of the next state, for every action pair."""
    for seed in range(12):
        sym = random_symmetric_game(seed)
        spec = sym.expand()
        aux = build_auxiliary(sym, 3)
        for level in aux.levels[:-1]:
            for node in level:
                for i in aux.actions1:
                    for j in aux.actions2:
                        predicted = {}
                        for x, w in node.posterior.items():
                            for (x2, c, d), p in spec.transition[(x, i, j)].items():
                                predicted[x2] = predicted.get(x2, ZERO) + w * p
                        mixed = {}
                        for (edge, label), (w, child) in node.children.items():
                            if edge == (i, j):
                                for x2, q in child.posterior.items():
                                    mixed[x2] = mixed.get(x2, ZERO) + w * q
                        assert predicted == mixed, (seed, i, j)


def test_lift_payoff_constant_and_revealing():
    sym = corpus.noisy_public_2state()
    pair = build_trees(sym, 3)
    lifted = lift_payoff(pair, lambda h: F(7, 3))
    assert set(lifted.values.values()) == {F(7, 3)}

    # fully revealing: public signal names the state, so fhat is f renamed
    revealing = SymmetricGameSpec(
        states=["xa", "xb"], actions1=["T"], actions2=["L"],
        signals=["sa", "sb"],
        initial={("xa", "sa"): F(1, 2), ("xb", "sb"): F(1, 2)},
        transition={
            ("xa", "T", "L"): {("xa", "sa"): F(2, 5), ("xb", "sb"): F(3, 5)},
            ("xb", "T", "L"): {("xb", "sb"): F(1)},
        },
        reward={("xa", "T", "L"): F(0), ("xb", "T", "L"): F(1)},
    )
    pair2 = build_trees(revealing, 3)
    f = lambda h: F(1) if h.state == "xb" else F(0)
    lifted2 = lift_payoff(pair2, f)
    for v in pair2.observations(3):
        assert lifted2.value_at(v) == (F(1) if v.label == "sb" else F(0))


def test_transfer_identity_random_symmetric():
    """E_P[f] = E_Q[fhat] exactly for random games, strategies and payoffs."""
    rng = random.Random(99)
    for seed in range(10):
        sym = random_symmetric_game(seed)
        spec = sym.expand()
        N = 3
        pair = build_trees(spec, N)
        f = {h: F(rng.randint(-6, 6), rng.randint(1, 4))
             for h in pair.histories(N)}
        lifted = lift_payoff(pair, f)
        for _ in range(4):
            sigma = random_strategy(rng, spec, 1, N)
            tau = random_strategy(rng, spec, 2, N)
            dist = exact_play_distribution(pair, sigma, tau, N)
            lhs = sum((p * f[h] for h, p in dist.probs.items()), ZERO)
            rhs = sum((p * lifted.values[v.view()]
                       for v, p in dist.observed_marginal().items()), ZERO)
            assert lhs == rhs, seed


def test_lift_bounds():
    # min f <= fhat <= max f
    rng = random.Random(5)
    sym = random_symmetric_game(3)
    pair = build_trees(sym, 3)
    f = {h: F(rng.randint(-5, 5)) for h in pair.histories(3)}
    lifted = lift_payoff(pair, f)
    lo, hi = min(f.values()), max(f.values())
    for value in lifted.values.values():
        assert lo <= value <= hi


def test_solve_backward_horizon1_is_stage_game():
    sym = corpus.noisy_public_2state()
    aux = build_auxiliary(sym, 1)
    sol = solve_backward(aux, payoff=MEAN)
    # expected stage matrix under the prior
    spec = sym.expand()
    prior = {"xa": F(1, 2), "xb": F(1, 2)}
    matrix = [[sum((prior[x] * spec.reward[(x, i, j)] for x in prior), ZERO)
               for j in spec.actions2] for i in spec.actions1]
    assert sol.value == solve_matrix_game(matrix).value


def test_solve_backward_merge_agrees_with_plain():
    for seed in range(25):
        sym = random_symmetric_game(seed)
        aux = build_auxiliary(sym, 4)
        plain = solve_backward(aux, payoff=MEAN, want_strategies=False)
        merged = solve_backward(aux, payoff=MEAN, merge="by-belief",
                                want_strategies=False)
        assert plain.value == merged.value, seed
        assert merged.node_count <= plain.node_count


def test_solve_backward_strategies_are_distributions():
    aux = build_auxiliary(corpus.quitting_game(), 3)
    sol = solve_backward(aux, payoff=MEAN)
    for table in (sol.strategy1.table, sol.strategy2.table):
        for view, dist in table.items():
            assert sum(dist.values(), ZERO) == 1


def test_build_auxiliary_private_view_requires_single_opponent(games):
    with pytest.raises(UnsupportedStructureError):
        build_auxiliary(games["example3_bigmatch_blind1"], 2, view=PLAYER1)
    # the blind MDP has a single-action opponent: allowed
    aux = build_auxiliary(games["mdp_final_remark"], 3, view=PLAYER1)
    assert aux.view == PLAYER1


def test_mdp_belief_values_match_closed_form(games):
    """Blind MDP: total value of the n-stage game equals
    max_k (1 - 2^-k) (n - k - 1), the hand-derived plan value."""
    spec = games["mdp_final_remark"]
    for n in (2, 4, 7, 12):
        aux = build_auxiliary(spec, n, prune_absorbed=True)
        sol = solve_backward(aux, payoff=MEAN, want_strategies=False)
        expected = max(
            (F(1) - F(1, 2 ** k)) * (n - k - 1) for k in range(n)) / n
        expected = max(expected, F(0))
        assert sol.value == expected, n
