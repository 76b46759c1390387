import random
from fractions import Fraction as F

import pytest

from randgen import random_game, random_strategy
from signalgames import corpus
from signalgames.errors import BudgetExceededError, IncompleteStrategyError
from signalgames.histories import (
    build_trees,
    conditional_check,
    exact_play_distribution,
    phi,
    phi_row,
    simulate,
)
from signalgames.model import PLAYER1, constant_strategy, uniform_strategy
from signalgames.rationals import ZERO


def test_alpha_dirac_initial(games):
    pair = build_trees(games["example1_guessing"], 1)
    (root,) = pair.histories(1)
    assert root.alpha == 1 and root.state == "s2"


def test_alpha_product_formula():
    # uniform prior over two states, then a 1/3-mass transition => alpha 1/6
    sym = corpus.noisy_public_2state()
    pair = build_trees(sym, 2)
    level2 = pair.histories(2)
    a_sixth = [h for h in level2 if h.alpha == F(1, 6)]
    # (xa, u) branch has mass 1/2 * 1/3 per action pair
    assert any(h.stage_path()[0] == ["xa", "xa"] for h in a_sixth)


def test_beta_sums_members(games):
    sym = games["noisy_public_2state"]
    pair = build_trees(sym, 2)
    for v in pair.observations(1):
        assert v.beta == sum((h.alpha for h in v.members), ZERO)
    (root,) = pair.observations(1)
    assert root.beta == 1  # two level-1 histories, equal observation


def test_budget_exceeded_reports_level():
    spec = random_game(0)
    with pytest.raises(BudgetExceededError) as err:
        build_trees(spec, 12, budget=40)
    assert err.value.level_reached <= 12


def test_phi_uninformative_signals_stay_half():
    # uniform prior over 2 states, state-independent transitions and signals:
    # no information ever arrives, the kernel stays at the prior
    from signalgames.model import SymmetricGameSpec
    sym2 = SymmetricGameSpec(
        states=["xa", "xb"], actions1=["T"], actions2=["L"],
        signals=["s0", "u", "w"],
        initial={("xa", "s0"): F(1, 2), ("xb", "s0"): F(1, 2)},
        transition={
            ("xa", "T", "L"): {("xa", "u"): F(1, 3), ("xa", "w"): F(2, 3)},
            ("xb", "T", "L"): {("xb", "u"): F(1, 3), ("xb", "w"): F(2, 3)},
        },
        reward={("xa", "T", "L"): F(0), ("xb", "T", "L"): F(1)},
    )
    pair = build_trees(sym2, 3)
    (root,) = pair.observations(1)
    h_a = next(h for h in pair.histories(1) if h.state == "xa")
    for m in (1, 2, 3):
        for v in pair.observations(m):
            assert phi(pair, h_a, v) == F(1, 2)


def test_phi_likelihood_posterior_bruteforce():
    """Signal u has likelihood 1/3 under xa, 2/3 under xb: the level-1
    conditional after u must be 1/3, computed independently here by direct
    enumeration of level-2 histories."""
    sym = corpus.noisy_public_2state()
    pair = build_trees(sym, 2)
    h_a = next(h for h in pair.histories(1) if h.state == "xa")
    # independent brute force: alpha sums over explicit paths
    num = F(1, 2) * F(1, 3)     # xa then u
    den = num + F(1, 2) * F(2, 3)
    expected = num / den
    assert expected == F(1, 3)
    for v in pair.observations(2):
        if v.label == "u":
            assert phi(pair, h_a, v) == F(1, 3)
        elif v.label == "w":
            assert phi(pair, h_a, v) == F(2, 3) / (F(2, 3) + F(1, 3))


def test_phi_fully_revealing_is_indicator():
    # public signal names the arrival state: kernel degenerates to 0/1
    from signalgames.model import SymmetricGameSpec
    sym = SymmetricGameSpec(
        states=["xa", "xb"], actions1=["T"], actions2=["L"],
        signals=["sa", "sb"],
        initial={("xa", "sa"): F(1, 2), ("xb", "sb"): F(1, 2)},
        transition={
            ("xa", "T", "L"): {("xa", "sa"): F(1, 2), ("xb", "sb"): F(1, 2)},
            ("xb", "T", "L"): {("xb", "sb"): F(1)},
        },
        reward={("xa", "T", "L"): F(0), ("xb", "T", "L"): F(1)},
    )
    pair = build_trees(sym, 3)
    for m in (1, 2, 3):
        for v in pair.observations(m):
            assert v.beta > 0
            for n in range(1, m + 1):
                row = phi_row(pair, n, v)
                assert sum(row.values(), ZERO) == 1
                assert all(val == 1 for val in row.values())
                assert len(row) == 1


def test_play_distribution_pure_dirac(games):
    spec = games["bigmatch_nosignals"]
    dist = exact_play_distribution(spec, constant_strategy(spec, 1, "B"),
                                   constant_strategy(spec, 2, "R"), 4)
    assert dist.total() == 1
    supported = [h for h, p in dist.probs.items() if p > 0]
    assert len(supported) == 1  # deterministic transitions, pure strategies
    states, actions = supported[0].stage_path()
    assert states == ["s", "s", "s", "s"] and set(actions) == {("B", "R")}


def test_play_distribution_normalizes_random():
    for seed in range(12):
        spec = random_game(seed)
        sigma = random_strategy(seed * 31 + 1, spec, 1, 3)
        tau = random_strategy(seed * 31 + 2, spec, 2, 3)
        dist = exact_play_distribution(spec, sigma, tau, 3)
        assert dist.total() == 1
        # support inside positive-alpha histories by construction
        assert all(h.alpha > 0 for h in dist.probs)


def test_play_distribution_example3_stage1_absorption(games):
    spec = games["example3_bigmatch_blind1"]
    dist = exact_play_distribution(spec, uniform_strategy(spec, 1),
                                   uniform_strategy(spec, 2), 2)
    absorbed = sum((p for h, p in dist.probs.items()
                    if h.state in spec.absorbing_states), ZERO)
    assert absorbed == F(1, 2)


def test_incomplete_strategy_error_names_view(games):
    spec = games["bigmatch_nosignals"]
    from signalgames.model import BehavioralStrategy
    broken = BehavioralStrategy(player=1, horizon=5, table={("n1",): {"T": F(1)}},
                                tail=None)
    with pytest.raises(IncompleteStrategyError) as err:
        exact_play_distribution(spec, broken, uniform_strategy(spec, 2), 3)
    assert err.value.view == ("n1", "T", "n1")


def test_conditional_check_corpus_games(games):
    for name in ("example1_guessing", "example3_bigmatch_blind1"):
        spec = games[name]
        sigma = uniform_strategy(spec, 1)
        tau = uniform_strategy(spec, 2)
        for n, m in ((1, 1), (1, 3), (2, 3), (3, 3)):
            report = conditional_check(spec, sigma, tau, n, m)
            assert report.all_exact, (name, n, m)


def test_conditional_check_random_games_exact():
    """Strategy independence of the kernel: random games, random exact
    strategies, all depth pairs up to 4."""
    rng = random.Random(2024)
    for seed in range(20):
        spec = random_game(seed)
        sigma = random_strategy(rng, spec, 1, 4)
        tau = random_strategy(rng, spec, 2, 4)
        pair = build_trees(spec, 4)
        for m in range(1, 5):
            for n in range(1, m + 1):
                report = conditional_check(pair, sigma, tau, n, m)
                assert report.all_exact, (seed, n, m)
                assert report.max_discrepancy == 0


def test_conditional_check_rejects_player_views():
    spec = random_game(1)
    pair = build_trees(spec, 2, view=PLAYER1)
    with pytest.raises(Exception):
        conditional_check(pair, uniform_strategy(spec, 1),
                          uniform_strategy(spec, 2), 1, 2)


def test_simulate_deterministic_and_bigmatch(games):
    spec = games["bigmatch_nosignals"]
    res = simulate(spec, constant_strategy(spec, 1, "B"),
                   constant_strategy(spec, 2, "R"), horizon=20, seed=7,
                   replicas=50)
    assert all(r.mean_payoff == 1.0 for r in res.results)
    res2 = simulate(spec, constant_strategy(spec, 1, "B"),
                    constant_strategy(spec, 2, "R"), horizon=20, seed=7,
                    replicas=50)
    assert res.mean_of_means == res2.mean_of_means
    assert [r.mean_payoff for r in res.results] == [r.mean_payoff for r in res2.results]


def test_simulate_example3_matches_exact(games):
    spec = games["example3_bigmatch_blind1"]
    res = simulate(spec, uniform_strategy(spec, 1), uniform_strategy(spec, 2),
                   horizon=3, seed=123, replicas=4000)
    # exact stage-1 absorption probability is 1/2; 3 standard errors of a
    # Bernoulli(1/2) over 4000 replicas
    se = (0.25 / 4000) ** 0.5
    assert abs(res.stage1_absorbed_fraction - 0.5) <= 3 * se
