import random
from fractions import Fraction as F

from oracles import bruteforce_mean_value
from randgen import random_game, random_symmetric_game
from signalgames import corpus
from signalgames.lp import solve_matrix_game
from signalgames.reduction import MEAN as RED_MEAN
from signalgames.reduction import build_auxiliary, lift_payoff, solve_backward
from signalgames.histories import build_trees
from signalgames.seqform import (
    TerminalPayoff,
    best_response_value,
    build_sequence_form,
    nstage_value,
)


def test_single_stage_reduces_to_matrix_game(games):
    spec = games["bigmatch_nosignals"]
    sol = nstage_value(spec, 1)
    stage = [[spec.reward[("s", i, j)] for j in spec.actions2]
             for i in spec.actions1]
    assert sol.value == solve_matrix_game(stage).value == F(1, 2)


def test_single_stage_averages_initial(games):
    # two initial states under one signal: stage game of the expected matrix
    sym = games["noisy_public_2state"]
    spec = sym.expand()
    sol = nstage_value(spec, 1)
    matrix = [[(spec.reward[("xa", i, j)] + spec.reward[("xb", i, j)]) / 2
               for j in spec.actions2] for i in spec.actions1]
    assert sol.value == solve_matrix_game(matrix).value


def test_bigmatch_nosignals_values_half(games):
    spec = games["bigmatch_nosignals"]
    for n in range(1, 7):
        sol = nstage_value(spec, n)
        assert sol.value == F(1, 2), n


def test_example2_mean2_matches_bruteforce(games):
    spec = games["example2_informed"]
    expected = bruteforce_mean_value(spec, 2)
    assert expected is not None
    sol = nstage_value(spec, 2)
    assert sol.value == expected


def test_corpus_nstage_matches_bruteforce_n2(games):
    for name in ("example1_guessing", "example3_bigmatch_blind1",
                 "bigmatch_nosignals", "mdp_final_remark"):
        spec = games[name]
        expected = bruteforce_mean_value(spec, 2)
        assert expected is not None, name
        assert nstage_value(spec, 2).value == expected, name


def test_random_games_match_bruteforce():
    checked = 0
    for seed in range(40):
        if checked >= 20:
            break
        spec = random_game(seed)
        for n in (1, 2):
            expected = bruteforce_mean_value(spec, n, cap=512)
            if expected is None:
                continue
            assert nstage_value(spec, n).value == expected, (seed, n)
            checked += 1


def test_strategies_certified_by_best_response():
    for seed in (0, 3, 5, 11):
        spec = random_game(seed)
        for n in (2, 3):
            sol = nstage_value(spec, n)
            # opponent best response cannot push below/above the value
            assert best_response_value(spec, sol.strategy1, n, responder=2) == sol.value
            assert best_response_value(spec, sol.strategy2, n, responder=1) == sol.value


def test_backward_equals_sequence_form_symmetric_corpus(games):
    for name in corpus.SYMMETRIC_GAMES:
        sym = games[name]
        for n in range(1, 5):
            aux = build_auxiliary(sym, n)
            back = solve_backward(aux, payoff=RED_MEAN, want_strategies=False)
            seq = nstage_value(sym, n)
            assert back.value == seq.value, (name, n)


def test_backward_equals_sequence_form_random_symmetric():
    for seed in range(12):
        sym = random_symmetric_game(seed)
        for n in (2, 3):
            aux = build_auxiliary(sym, n)
            back = solve_backward(aux, payoff=RED_MEAN, want_strategies=False)
            seq = nstage_value(sym, n)
            assert back.value == seq.value, (seed, n)


def test_backward_equals_sequence_form_lifted_terminal():
    """Terminal payoff f on full histories: the observed-game value with the
    lifted payoff equals the original game's value with f."""
    rng = random.Random(77)
    for seed in range(8):
        sym = random_symmetric_game(seed)
        spec = sym.expand()
        N = 3
        pair = build_trees(spec, N)
        f = {h.full_key(): F(rng.randint(-4, 4), rng.randint(1, 3))
             for h in pair.histories(N)}
        fnode = {h: f[h.full_key()] for h in pair.histories(N)}
        lifted = lift_payoff(pair, fnode)
        aux = build_auxiliary(sym, N)
        back = solve_backward(aux, payoff=lifted, want_strategies=False)
        seq = nstage_value(spec, N, TerminalPayoff(node_fn=f.__getitem__))
        assert back.value == seq.value, seed


def test_public_strategy_certificates(games):
    sym = games["quitting_game"]
    n = 3
    aux = build_auxiliary(sym, n)
    back = solve_backward(aux, payoff=RED_MEAN)
    spec = sym.expand()
    assert best_response_value(spec, back.strategy1, n, responder=2) == back.value
    assert best_response_value(spec, back.strategy2, n, responder=1) == back.value


def test_arbitrary_views_flagged():
    # a state where player 1's plan never sends mass: views reported
    spec = corpus.example3_bigmatch_blind1()
    sol = nstage_value(spec, 3)
    assert isinstance(sol.arbitrary_views1, list)
    assert isinstance(sol.arbitrary_views2, list)


def test_sequence_form_program_prunes_absorbed(games):
    prog = build_sequence_form(games["bigmatch_nosignals"], 5)
    assert prog.closed_nodes > 0
    # live histories are exactly the all-B paths: 2^(t-1) per level
    assert prog.live_nodes == sum(2 ** (t - 1) for t in range(1, 6))
