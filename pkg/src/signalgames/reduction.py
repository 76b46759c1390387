"""Auxiliary game on observed histories and belief backward induction.

For a symmetric-signaling game, the observed histories form the state space
of an equivalent stochastic game with full monitoring: the transition
probability to the child observation (i, j, s) is the ratio of observed
weights  beta(v + (i,j,s)) / beta(v),  and a stage-measurable payoff f on
full histories lifts to  fhat(v) = sum_h kernel(h, v) f(h)  with equal
expectation under every strategy pair.  Values are then computed by
backward induction, solving one exact matrix game per observed node.

Two constructions of the observed tree:

* from an explicit TreePair (kept for tests and small horizons);
* a belief recursion that carries only (beta, posterior over current
  states) per node — equivalent because both the signal transition and the
  child posterior are functions of the current posterior — which scales to
  long horizons when absorbed nodes are pruned.

The same machinery solves blind single-controller games (one player has a
single action) on that player's private view; with an opponent who truly
has choices, a private view would not support the reduction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    GameModelError,
    UnsupportedStructureError,
    node_budget,
    BudgetExceededError,
)
from .histories import ObservedNode, TreePair, phi_row
from .lp import solve_matrix_game
from .model import (
    JOINT,
    PLAYER1,
    PLAYER2,
    PUBLIC,
    BehavioralStrategy,
    GameSpec,
    SymmetricGameSpec,
    is_symmetric_signaling,
)
from .rationals import ZERO


@dataclass(eq=False)
class BeliefNode:
    """Observed history carried as (weight, posterior over current states).

    ``children`` maps (edge, label) -> (transition weight, child node); the
    weight is the probability of the child observation given the node and
    the actions on the edge.  With belief merging the structure is a DAG
    (children shared between nodes of equal posterior), ``parent`` is then
    the first discoverer and views are unavailable.
    """

    label: object
    edge: tuple | None
    beta: Fraction
    posterior: dict                      # state -> Fraction, sums to 1
    depth: int
    parent: "BeliefNode | None" = None
    children: dict = field(default_factory=dict)
    pruned: bool = False                 # posterior fully on absorbing states

    def view(self) -> tuple:
        parts: list = []
        chain = []
        node: BeliefNode | None = self
        while node is not None:
            chain.append(node)
            node = node.parent
        for node in reversed(chain):
            if node.edge is not None:
                parts.extend(node.edge)
            parts.append(node.label)
        return tuple(parts)


@dataclass(eq=False)
class AuxiliaryGame:
    """Stochastic game over observed histories, built to a horizon."""

    spec: GameSpec                       # expanded/general form
    view: str
    horizon: int
    roots: list                          # level-1 BeliefNodes
    levels: list                         # levels[n-1] = BeliefNodes at depth n
    actions1: list
    actions2: list
    merged: bool = False                 # belief DAG (no per-history views)

    def signal_transition(self, node: BeliefNode, i: str, j: str) -> dict:
        """Distribution over child labels under (i, j): exact beta ratios."""
        out = {}
        for (edge, label), (weight, child) in node.children.items():
            if _edge_matches(self.view, edge, i, j):
                out[label] = weight
        return out


def _edge_matches(view: str, edge: tuple, i: str, j: str) -> bool:
    if view in (PUBLIC, JOINT):
        return edge[0] == i and edge[1] == j
    if view == PLAYER1:
        return edge[0] == i
    return edge[0] == j


def posterior_of_observed(node: ObservedNode) -> dict:
    """Exact current-state posterior at an observed-tree node (from members)."""
    if node.beta <= 0:
        raise GameModelError("observation has zero weight")
    out: dict = {}
    for h in node.members:
        out[h.state] = out.get(h.state, ZERO) + h.alpha
    return {x: a / node.beta for x, a in out.items()}


def _resolve_view(spec: GameSpec, view: str | None) -> str:
    if view is not None:
        if view in (PLAYER1, PLAYER2):
            free = spec.actions2 if view == PLAYER1 else spec.actions1
            if len(free) != 1:
                raise UnsupportedStructureError(
                    "a private view only supports the reduction when the "
                    "unobserved player has a single action")
        return view
    if spec.public_label or is_symmetric_signaling(spec):
        return PUBLIC
    if len(spec.actions2) == 1:
        return PLAYER1
    if len(spec.actions1) == 1:
        return PLAYER2
    raise UnsupportedStructureError(
        "auxiliary game needs symmetric signaling or a single-action opponent")


def build_auxiliary(spec_or_sym, horizon: int, view: str | None = None,
                    budget: int | None = None,
                    prune_absorbed: bool = False,
                    merge_beliefs: bool = False) -> AuxiliaryGame:
    """Build the observed-history game by exact belief recursion.

    With ``prune_absorbed`` the children of nodes whose posterior sits
    entirely on absorbing states are not expanded: from there every
    continuation earns the same constant per stage, so solvers can close
    the node in closed form.  This is what makes long horizons tractable.

    With ``merge_beliefs`` nodes of equal depth and posterior are shared (a
    DAG instead of a tree): sound for stage-additive payoffs because stage
    reward, signal transition and child posteriors are all functions of the
    posterior alone, and often exponentially smaller.  Strategy extraction
    needs per-history views, hence an unmerged tree.
    """
    if isinstance(spec_or_sym, SymmetricGameSpec):
        spec = spec_or_sym.expand()
    else:
        spec = spec_or_sym
    spec.require_valid()
    view = _resolve_view(spec, view)
    public_of = spec.public_label if view == PUBLIC else None
    if view == PUBLIC and not spec.public_label:
        witness = is_symmetric_signaling(spec)
        if not witness:
            raise UnsupportedStructureError(witness.reason)
        public_of = witness.public_of
    absorbing = spec.absorbing_states

    limit = node_budget(budget)
    count = 0

    def charge(level):
        nonlocal count
        count += 1
        if count > limit:
            raise BudgetExceededError(limit, level)

    def label_of(c, d):
        if view == PUBLIC:
            return public_of.get(c, c)
        if view == JOINT:
            return (c, d)
        return c if view == PLAYER1 else d

    def edge_of(i, j):
        if view in (PUBLIC, JOINT):
            return (i, j)
        return (i,) if view == PLAYER1 else (j,)

    def belief_key(posterior):
        return tuple(sorted(posterior.items()))

    # Level 1.
    groups: dict = {}
    for (x, c, d), p in spec.initial.items():
        if p <= 0:
            continue
        lab = label_of(c, d)
        bucket = groups.setdefault(lab, {})
        bucket[x] = bucket.get(x, ZERO) + p
    roots = []
    seen: dict = {}
    for lab in sorted(groups, key=str):
        bucket = groups[lab]
        beta = sum(bucket.values(), ZERO)
        posterior = {x: a / beta for x, a in bucket.items()}
        if merge_beliefs:
            key = (lab, belief_key(posterior))
            if key in seen:
                seen[key].beta += beta
                continue
        charge(1)
        node = BeliefNode(label=lab, edge=None, beta=beta, posterior=posterior,
                          depth=1)
        node.pruned = prune_absorbed and all(x in absorbing for x in node.posterior)
        if merge_beliefs:
            seen[(lab, belief_key(posterior))] = node
        roots.append(node)

    levels = [roots]
    for n in range(1, horizon):
        nxt = []
        seen = {}
        for node in levels[-1]:
            if node.pruned:
                continue
            buckets: dict = {}
            for x, w in node.posterior.items():
                for i in spec.actions1:
                    for j in spec.actions2:
                        for (x2, c, d), p in spec.transition[(x, i, j)].items():
                            if p <= 0:
                                continue
                            key = (edge_of(i, j), label_of(c, d))
                            bucket = buckets.setdefault(key, {})
                            bucket[x2] = bucket.get(x2, ZERO) + w * p
            for key in sorted(buckets, key=str):
                bucket = buckets[key]
                mass = sum(bucket.values(), ZERO)
                posterior = {x: a / mass for x, a in bucket.items()}
                if merge_beliefs:
                    bkey = belief_key(posterior)
                    child = seen.get(bkey)
                    if child is not None:
                        child.beta += node.beta * mass
                        node.children[key] = (mass, child)
                        continue
                charge(n + 1)
                child = BeliefNode(
                    label=key[1], edge=key[0],
                    beta=node.beta * mass,
                    posterior=posterior,
                    depth=n + 1, parent=node)
                child.pruned = (prune_absorbed
                                and all(x in absorbing for x in child.posterior))
                if merge_beliefs:
                    seen[bkey] = child
                node.children[key] = (mass, child)
                nxt.append(child)
        levels.append(nxt)

    return AuxiliaryGame(spec=spec, view=view, horizon=horizon, roots=roots,
                         levels=levels, actions1=list(spec.actions1),
                         actions2=list(spec.actions2), merged=merge_beliefs)


def auxiliary_from_trees(pair: TreePair) -> AuxiliaryGame:
    """Auxiliary game over an explicit observed tree (posteriors from
    members); used to cross-check the belief recursion."""
    levels = []
    mapping: dict = {}
    for n in range(1, pair.horizon + 1):
        lvl = []
        for ob in pair.observations(n):
            node = BeliefNode(label=ob.label, edge=ob.edge, beta=ob.beta,
                              posterior=posterior_of_observed(ob), depth=n,
                              parent=mapping.get(id(ob.parent)))
            mapping[id(ob)] = node
            if node.parent is not None:
                node.parent.children[(ob.edge, ob.label)] = (
                    ob.beta / ob.parent.beta, node)
            lvl.append(node)
        levels.append(lvl)
    return AuxiliaryGame(spec=pair.spec, view=pair.view, horizon=pair.horizon,
                         roots=levels[0], levels=levels,
                         actions1=list(pair.spec.actions1),
                         actions2=list(pair.spec.actions2))


# ---------------------------------------------------------------------------
# Lifted payoffs
# ---------------------------------------------------------------------------


@dataclass
class LiftedPayoff:
    """Terminal payoff on observed histories equivalent to f on full ones.

    Keyed by observed view tuples so the same payoff works on trees built
    either from explicit histories or by the belief recursion.
    """

    horizon: int
    values: dict                         # view tuple -> Fraction

    def value_at(self, node) -> Fraction:
        return self.values[node.view()]


def lift_payoff(pair: TreePair, f) -> LiftedPayoff:
    """fhat(v) = sum over horizon histories of kernel(h, v) * f(h).

    ``f`` maps HistoryNode -> Fraction (callable or dict) and must be defined
    on every positive-weight horizon history.  The defining identity — the
    expectation of f under any strategy pair equals the expectation of fhat
    under the induced observed-play distribution — is exercised by tests.
    """
    n = pair.horizon
    get = f.__getitem__ if isinstance(f, dict) else f
    values = {}
    for v in pair.observations(n):
        row = phi_row(pair, n, v)
        total = ZERO
        for h, k in row.items():
            try:
                fh = get(h)
            except KeyError:
                raise GameModelError(
                    f"payoff undefined on reachable history at level {n}") from None
            total += k * fh
        values[v.view()] = total
    return LiftedPayoff(horizon=n, values=values)


def posterior(node) -> dict:
    """Exact posterior over current states at an observed node."""
    if isinstance(node, BeliefNode):
        return dict(node.posterior)
    return posterior_of_observed(node)


# ---------------------------------------------------------------------------
# Backward induction
# ---------------------------------------------------------------------------

MEAN = "mean"
TOTAL = "total"


@dataclass
class BackwardSolution:
    value: Fraction
    horizon: int
    evaluation: str
    strategy1: BehavioralStrategy | None
    strategy2: BehavioralStrategy | None
    arbitrary_views: list
    node_count: int
    merged_count: int


def _expected_reward(spec: GameSpec, post: dict, i: str, j: str) -> Fraction:
    return sum((w * spec.reward[(x, i, j)] for x, w in post.items()), ZERO)


def solve_backward(aux: AuxiliaryGame, payoff="mean", merge: str = "none",
                   want_strategies: bool = True) -> BackwardSolution:
    """Backward induction over the auxiliary game.

    ``payoff``: "mean" (average of stage rewards over the horizon) or a
    LiftedPayoff terminal map on depth-``horizon`` observed nodes.

    ``merge``: "by-belief" shares the computation between nodes of equal
    depth and posterior.  Sound for the mean evaluation because the stage
    reward, the signal transition and the child posteriors are all functions
    of the posterior alone; a general terminal payoff is history-dependent,
    so merging is refused there.

    Absorption-pruned nodes (see build_auxiliary) are closed in closed form:
    a posterior concentrated on absorbing states earns its expected
    absorbing payoff every remaining stage.
    """
    spec = aux.spec
    N = aux.horizon
    if aux.view == JOINT:
        raise UnsupportedStructureError(
            "cannot solve on the joint view: neither player observes it")
    terminal = None
    if isinstance(payoff, LiftedPayoff):
        if payoff.horizon != N:
            raise GameModelError("lifted payoff horizon mismatch")
        if merge == "by-belief" or aux.merged:
            raise GameModelError("belief merging needs a stage-additive payoff")
        terminal = payoff
    if want_strategies and aux.merged:
        want_strategies = False

    results: dict = {}               # id(node) -> (total value, matrix solution)
    belief_cache: dict = {}          # (depth, posterior) -> result (merging)
    merged = 0
    node_count = 0

    # bottom-up over levels: children are always resolved before parents,
    # and no recursion depth limits bite at long horizons
    for depth in range(N, 0, -1):
        remaining = N - depth + 1
        for node in aux.levels[depth - 1]:
            bkey = None
            if merge == "by-belief":
                bkey = (depth, tuple(sorted(node.posterior.items())))
                hit = belief_cache.get(bkey)
                if hit is not None:
                    merged += 1
                    results[id(node)] = hit
                    continue
            node_count += 1
            if terminal is None and node.pruned:
                per_stage = sum((w * spec.absorbing_payoff(x)
                                 for x, w in node.posterior.items()), ZERO)
                result = per_stage * remaining, None
            elif terminal is not None and depth == N:
                result = terminal.value_at(node), None
            elif terminal is not None and node.pruned:
                raise GameModelError("terminal payoff undefined on pruned node")
            else:
                rows = []
                for i in aux.actions1:
                    row = []
                    for j in aux.actions2:
                        total = ZERO
                        if terminal is None:
                            total += _expected_reward(spec, node.posterior, i, j)
                        if depth < N:
                            for (edge, label), (w, child) in node.children.items():
                                if _edge_matches(aux.view, edge, i, j):
                                    total += w * results[id(child)][0]
                        row.append(total)
                    rows.append(row)
                sol = solve_matrix_game(rows)
                result = sol.value, sol
            results[id(node)] = result
            if bkey is not None:
                belief_cache[bkey] = result

    total = ZERO
    for root in aux.roots:
        total += root.beta * results[id(root)][0]

    strategy1 = strategy2 = None
    if want_strategies and merge != "by-belief":
        table1: dict = {}
        table2: dict = {}
        for level in aux.levels:
            for node in level:
                sol = results[id(node)][1]
                if sol is None:
                    continue
                view = node.view()
                table1[view] = dict(zip(aux.actions1, sol.row_strategy))
                table2[view] = dict(zip(aux.actions2, sol.col_strategy))
        kind = "public" if aux.view == PUBLIC else "player"
        if aux.view == PLAYER2:
            strategy1 = _trivial_strategy(aux.actions1, player=1, horizon=N)
        else:
            strategy1 = BehavioralStrategy(player=1, horizon=N, table=table1,
                                           tail=_uniform_tail(aux.actions1),
                                           view_kind=kind)
        if aux.view == PLAYER1:
            strategy2 = _trivial_strategy(aux.actions2, player=2, horizon=N)
        else:
            strategy2 = BehavioralStrategy(player=2, horizon=N, table=table2,
                                           tail=_uniform_tail(aux.actions2),
                                           view_kind=kind)

    if terminal is not None:
        value = total
    else:
        value = total if payoff == TOTAL else total / N
    return BackwardSolution(value=value, horizon=N,
                            evaluation=("terminal" if terminal is not None
                                        else payoff),
                            strategy1=strategy1, strategy2=strategy2,
                            arbitrary_views=[], node_count=node_count,
                            merged_count=merged)


def _uniform_tail(actions):
    p = Fraction(1, len(actions))
    return {a: p for a in actions}


def _trivial_strategy(actions, player, horizon):
    """The other side of a single-controller game: one action, no choices."""
    return BehavioralStrategy(player=player, horizon=0, table={},
                              tail=_uniform_tail(actions))
