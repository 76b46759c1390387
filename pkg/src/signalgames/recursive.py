"""Uniform value of recursive games with nonnegative absorbing payoffs.

For such games the n-stage mean values are nondecreasing in n, every
n-stage optimal strategy of the maximizer guarantees its n-stage value at
all longer horizons, and the supremum of the values is the uniform value.
The solver therefore reports a *certified lower bound* (the largest n-stage
value computed, sound unconditionally) separate from a *stabilized
estimate* (a heuristic stopping rule); no finite-horizon upper bound is
claimed because none is available in general.

Values are computed on an increasing horizon schedule — consecutive
horizons first, then geometrically spaced, optionally densified near the
top — because meaningful accuracy on blind games needs horizons far past
anything a per-horizon enumeration of every intermediate n could afford.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetExceededError, PreconditionError
from .model import BehavioralStrategy, GameSpec, SymmetricGameSpec, is_symmetric_signaling
from .reduction import MEAN as RED_MEAN
from .reduction import build_auxiliary, solve_backward
from .seqform import best_response_value, nstage_value


@dataclass
class RecursiveClassification:
    is_recursive: bool
    is_nonnegative: bool
    absorbing: list                      # [(state, payoff)]
    offending: list                      # nonzero rewards outside absorbing states

    @property
    def solvable(self) -> bool:
        return self.is_recursive and self.is_nonnegative


def classify(spec_or_sym) -> RecursiveClassification:
    """Exact structural test: rewards vanish outside absorbing states, and
    absorbing payoffs are all nonnegative."""
    spec = spec_or_sym.expand() if isinstance(spec_or_sym, SymmetricGameSpec) else spec_or_sym
    spec.require_valid()
    absorbing = [(x, spec.absorbing_payoff(x)) for x in spec.states
                 if x in spec.absorbing_states]
    offending = []
    for (x, i, j), g in spec.reward.items():
        if x not in spec.absorbing_states and g != 0:
            offending.append((x, i, j, g))
    is_recursive = not offending
    is_nonnegative = all(pay >= 0 for _, pay in absorbing)
    return RecursiveClassification(is_recursive=is_recursive,
                                   is_nonnegative=is_nonnegative,
                                   absorbing=absorbing, offending=offending)


@dataclass
class UniformValueReport:
    value_sequence: list                 # [(n, Fraction)] nondecreasing
    certified_lower: Fraction            # max computed value: sound bound
    stabilized: bool
    window: int
    tol: Fraction
    eps_optimal_strategy1: BehavioralStrategy | None
    strategy_horizon: int | None
    strategy_guarantee: Fraction | None  # v_N of the returned strategy
    # Player 2's exactly-optimal uniform strategy exists but is not
    # constructible at finite horizon; what is returned is the cap v_N that
    # player 2's horizon-N optimal strategy certifies at that horizon.
    player2_strategy: BehavioralStrategy | None
    player2_cap_at_horizon: Fraction | None
    strategy_eps_achieved: Fraction | None
    route: str


def default_schedule(n_max: int, dense_top: int = 4) -> list:
    """1..12 consecutively, then ratio 3/2, then ``dense_top`` evenly spaced
    points below n_max (tight spacing where the stopping rule looks)."""
    pts = list(range(1, min(12, n_max) + 1))
    n = pts[-1]
    while n < n_max:
        n = min(n_max, max(n + 1, (n * 3) // 2))
        pts.append(n)
    if n_max >= 100 and dense_top > 0:
        step = max(1, n_max // 10)
        extra = [n_max - k * step for k in range(1, dense_top + 1)]
        pts = sorted(set(pts) | {p for p in extra if p >= 1})
    return pts


def _value_route(spec: GameSpec):
    """Pick the cheapest sound engine for n-stage values."""
    if spec.public_label or is_symmetric_signaling(spec):
        return "reduction-public"
    if len(spec.actions2) == 1 or len(spec.actions1) == 1:
        return "reduction-private"
    return "sequence-form"


def _nstage(spec: GameSpec, route: str, n: int, budget,
            want_strategies: bool = False):
    if route.startswith("reduction"):
        aux = build_auxiliary(spec, n, budget=budget, prune_absorbed=True,
                              merge_beliefs=not want_strategies)
        sol = solve_backward(aux, payoff=RED_MEAN,
                             want_strategies=want_strategies)
        return sol.value, sol.strategy1, sol.strategy2
    sol = nstage_value(spec, n, budget=budget)
    return sol.value, sol.strategy1, sol.strategy2


def uniform_value(spec_or_sym, tol=Fraction(1, 10000), n_max: int = 512,
                  window: int = 5, schedule: list | None = None,
                  strategy_eps=Fraction(1, 20),
                  budget: int | None = None) -> UniformValueReport:
    """Monotone scheme for the uniform value of recursive nonnegative games.

    Raises PreconditionError otherwise: with negative absorbing payoffs the
    n-stage values need not converge upward to anything (the guessing game
    has no uniform value at all), so the certificate below would be unsound.

    ``stabilized`` is True when the last value is within ``tol`` of the
    value ``window`` schedule points back; ``certified_lower`` needs no such
    heuristic and is always a true guarantee for player 1.
    """
    spec = spec_or_sym.expand() if isinstance(spec_or_sym, SymmetricGameSpec) else spec_or_sym
    cls = classify(spec)
    if not cls.solvable:
        detail = ("rewards outside absorbing states: "
                  f"{cls.offending[:3]}" if not cls.is_recursive else
                  "negative absorbing payoffs: "
                  f"{[(x, p) for x, p in cls.absorbing if p < 0]}")
        raise PreconditionError(f"uniform_value needs a recursive nonnegative game; {detail}")

    route = _value_route(spec)
    pts = schedule if schedule is not None else default_schedule(n_max)
    values = []
    for n in pts:
        if n > n_max:
            break
        try:
            v, _, _ = _nstage(spec, route, n, budget)
        except BudgetExceededError:
            break
        values.append((n, v))
        if len(values) >= 2:
            assert values[-1][1] >= values[-2][1], \
                "n-stage values of a recursive nonnegative game must be monotone"
    if not values:
        raise BudgetExceededError(0, 1)

    certified = values[-1][1]
    stabilized = (len(values) > window
                  and values[-1][1] - values[-1 - window][1] < tol)

    # Strategy extraction at the smallest horizon already within
    # strategy_eps of the certified level (monotonicity then makes its
    # n-stage guarantee a uniform one); fall back to the largest horizon
    # where an unmerged tree fits the budget.
    strat = strat2 = None
    strat_n = None
    strat_value = None
    p2_cap = None
    for n, v in values:
        if certified - v <= strategy_eps:
            try:
                _, s1, s2 = _nstage(spec, route, n, budget, want_strategies=True)
            except BudgetExceededError:
                continue
            strat, strat2, strat_n, strat_value = s1, s2, n, v
            break
    if strat is None:
        for n, v in reversed(values):
            try:
                _, s1, s2 = _nstage(spec, route, n, budget, want_strategies=True)
            except BudgetExceededError:
                continue
            strat, strat2, strat_n, strat_value = s1, s2, n, v
            break
    if strat is not None:
        # two exact certificates at the extraction horizon: player 1's
        # strategy floors the value, player 2's caps it, and they meet
        try:
            floor = best_response_value(spec, strat, strat_n,
                                        responder=2, budget=budget)
            assert floor == strat_value
            if strat2 is not None:
                p2_cap = best_response_value(spec, strat2, strat_n,
                                             responder=1, budget=budget)
                assert p2_cap == strat_value
        except BudgetExceededError:
            p2_cap = None

    return UniformValueReport(
        value_sequence=values, certified_lower=certified,
        stabilized=stabilized, window=window, tol=Fraction(tol),
        eps_optimal_strategy1=strat, strategy_horizon=strat_n,
        strategy_guarantee=strat_value,
        player2_strategy=strat2, player2_cap_at_horizon=p2_cap,
        strategy_eps_achieved=(certified - strat_value
                               if strat_value is not None else None),
        route=route)


@dataclass
class EpsOptimalResult:
    strategy: BehavioralStrategy
    horizon: int
    guarantee: Fraction                  # certified uniform guarantee v_N
    requested_eps: Fraction
    achieved_eps: Fraction
    warning: str
    certificates: list                   # [(m, best-response value at m)]


def extract_eps_optimal(spec_or_sym, report: UniformValueReport, eps,
                        check_horizons: int = 3,
                        budget: int | None = None) -> EpsOptimalResult:
    """Strategy guaranteeing certified_lower - eps in the uniform sense.

    Picks the smallest computed horizon N with v_N >= certified_lower - eps
    and returns the N-stage optimal strategy: by monotonicity its value
    against any reply at any horizon m >= N is at least v_N.  The
    certificate list re-verifies this with exact best responses at
    N..N+check_horizons.  When even the deepest extractable strategy misses
    eps, the best available one is returned with a warning.
    """
    spec = spec_or_sym.expand() if isinstance(spec_or_sym, SymmetricGameSpec) else spec_or_sym
    eps = Fraction(eps)
    route = report.route
    target = report.certified_lower - eps
    chosen = None
    for n, v in report.value_sequence:
        if v >= target:
            try:
                _, s1, _ = _nstage(spec, route, n, budget, want_strategies=True)
            except BudgetExceededError:
                continue
            chosen = (n, v, s1)
            break
    warning = ""
    if chosen is None:
        for n, v in reversed(report.value_sequence):
            try:
                _, s1, _ = _nstage(spec, route, n, budget, want_strategies=True)
            except BudgetExceededError:
                continue
            chosen = (n, v, s1)
            warning = (f"requested eps {eps} unattainable within the computed "
                       f"schedule; returning the horizon-{n} strategy "
                       f"(gap {report.certified_lower - v})")
            break
    if chosen is None:
        raise BudgetExceededError(0, 1)
    n, v, strategy = chosen
    certs = []
    for m in range(n, n + check_horizons + 1):
        try:
            br = best_response_value(spec, strategy, m, responder=2, budget=budget)
        except BudgetExceededError:
            break
        assert br >= v, "monotone guarantee violated: implementation bug"
        certs.append((m, br))
    return EpsOptimalResult(strategy=strategy, horizon=n, guarantee=v,
                            requested_eps=eps,
                            achieved_eps=report.certified_lower - v,
                            warning=warning, certificates=certs)
