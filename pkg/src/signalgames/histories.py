"""Reachable history trees, observation trees and exact play distributions.

The two central objects:

* the *history tree*: all full histories h_n = (x_1,c_1,d_1,i_1,j_1,...) with
  positive chance weight, each annotated with that weight
  (``alpha``: the product of initial and transition probabilities along h,
  ignoring the players' action probabilities);

* the *observed tree* for a chosen observer view: the projections of those
  histories, annotated with ``beta`` = the sum of alpha over the preimage.

The ratio  sum of alpha over {h' extending h_n whose projection is v_m}
divided by beta(v_m)  is the conditional probability of h_n given the
observation v_m.  Its defining property — the reason the whole reduction
works — is that it equals the Bayes conditional induced by *any* strategy
pair, because both players' action probabilities are measurable with
respect to the observation and cancel in the ratio.  That cancellation
requires the view to contain both players' actions and signals, so kernel
checks run on the "public" view (symmetric games) or the "joint" view
(general games: forget only the states); per-player views support only the
weight bookkeeping, not the strategy-independence property.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    BudgetExceededError,
    GameModelError,
    UnsupportedStructureError,
    node_budget,
)
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
class HistoryNode:
    """One full history; identity is the object itself (trees are tries)."""

    state: str
    sig1: str
    sig2: str
    alpha: Fraction
    depth: int
    parent: "HistoryNode | None" = None
    via: tuple | None = None            # (i, j) taken from parent
    obs: "ObservedNode | None" = None   # set by build_trees

    def ancestor(self, n: int) -> "HistoryNode":
        node = self
        while node.depth > n:
            node = node.parent
        if node.depth != n:
            raise GameModelError(f"no ancestor at level {n}")
        return node

    def view(self, who: str, public_of=None) -> tuple:
        """Observed view tuple of this history for player1/player2/joint/public."""
        parts: list = []
        node: HistoryNode | None = self
        chain = []
        while node is not None:
            chain.append(node)
            node = node.parent
        for node in reversed(chain):
            if node.via is not None:
                i, j = node.via
                if who == PLAYER1:
                    parts.append(i)
                elif who == PLAYER2:
                    parts.append(j)
                else:
                    parts.extend((i, j))
            if who == PLAYER1:
                parts.append(node.sig1)
            elif who == PLAYER2:
                parts.append(node.sig2)
            elif who == JOINT:
                parts.append((node.sig1, node.sig2))
            else:
                parts.append(public_of[node.sig1] if public_of else node.sig1)
        return tuple(parts)

    def stage_path(self):
        """(states, action pairs) along the history, oldest first."""
        chain = []
        node: HistoryNode | None = self
        while node is not None:
            chain.append(node)
            node = node.parent
        chain.reverse()
        states = [n.state for n in chain]
        actions = [n.via for n in chain[1:]]
        return states, actions

    def full_key(self) -> tuple:
        """Hashable identity of the full history: ((x,c,d) triples, actions).
        Stable across independent tree constructions."""
        chain = []
        node: HistoryNode | None = self
        while node is not None:
            chain.append(node)
            node = node.parent
        chain.reverse()
        return (tuple((n.state, n.sig1, n.sig2) for n in chain),
                tuple(n.via for n in chain[1:]))


@dataclass(eq=False)
class ObservedNode:
    """One observed history; groups the full histories projecting onto it."""

    label: object                       # this stage's observed component
    edge: tuple | None                  # observed action part from parent
    beta: Fraction
    depth: int
    parent: "ObservedNode | None" = None
    members: list = field(default_factory=list)
    children: dict = field(default_factory=dict)

    def view(self) -> tuple:
        parts: list = []
        node: ObservedNode | None = self
        chain = []
        while node is not None:
            chain.append(node)
            node = node.parent
        for node in reversed(chain):
            if node.edge is not None:
                parts.extend(node.edge)
            parts.append(node.label)
        return tuple(parts)


def _observed_parts(view: str, public_of, node_sig1, node_sig2, i, j):
    """(edge components, stage label) of a one-step extension under a view."""
    if view == PUBLIC:
        label = public_of[node_sig1] if public_of else node_sig1
        return (i, j), label
    if view == JOINT:
        return (i, j), (node_sig1, node_sig2)
    if view == PLAYER1:
        return (i,), node_sig1
    if view == PLAYER2:
        return (j,), node_sig2
    raise GameModelError(f"unknown view {view!r}")


@dataclass(eq=False)
class TreePair:
    """History tree and observed tree built jointly to a horizon."""

    spec: GameSpec
    view: str
    horizon: int
    levels: list                        # levels[n-1] = list[HistoryNode] at length n
    obs_levels: list                    # same for ObservedNode
    public_of: dict | None = None

    def histories(self, n: int):
        return self.levels[n - 1]

    def observations(self, n: int):
        return self.obs_levels[n - 1]


def _resolve_public_of(spec: GameSpec):
    if spec.public_label:
        return dict(spec.public_label)
    witness = is_symmetric_signaling(spec)
    if not witness:
        raise UnsupportedStructureError(
            f"public view needs symmetric signaling: {witness.reason}")
    return witness.public_of


def build_trees(spec_or_sym, horizon: int, view: str | None = None,
                budget: int | None = None, stop=None) -> TreePair:
    """Build H-bar and V-bar levels 1..horizon with exact alpha/beta weights.

    ``view`` defaults to "public" when the spec has symmetric signaling and
    "joint" otherwise.  ``stop``, if given, is a predicate on ObservedNode:
    children of nodes where it returns True are not expanded (used by solvers
    that know the continuation is determined there).  Budget overruns raise
    BudgetExceededError naming the level reached.
    """
    if isinstance(spec_or_sym, SymmetricGameSpec):
        spec = spec_or_sym.expand()
    else:
        spec = spec_or_sym
    spec.require_valid()
    if horizon < 1:
        raise GameModelError("horizon must be >= 1")
    public_of = None
    if view is None:
        if spec.public_label:
            view, public_of = PUBLIC, _resolve_public_of(spec)
        else:
            witness = is_symmetric_signaling(spec)
            if witness:
                view, public_of = PUBLIC, witness.public_of
            else:
                view = JOINT
    elif view == PUBLIC:
        public_of = _resolve_public_of(spec)

    limit = node_budget(budget)
    count = 0

    def charge(level):
        nonlocal count
        count += 1
        if count > limit:
            raise BudgetExceededError(limit, level)

    # Level 1 from the initial distribution.
    roots: dict = {}
    level1 = []
    obs1: dict = {}
    for (x, c, d), p in spec.initial.items():
        if p <= 0:
            continue
        charge(1)
        node = HistoryNode(state=x, sig1=c, sig2=d, alpha=p, depth=1)
        level1.append(node)
        if view == PUBLIC:
            label = public_of[c] if public_of else c
        elif view == JOINT:
            label = (c, d)
        elif view == PLAYER1:
            label = c
        else:
            label = d
        ob = obs1.get(label)
        if ob is None:
            ob = obs1[label] = ObservedNode(label=label, edge=None, beta=ZERO, depth=1)
        ob.beta += p
        ob.members.append(node)
        node.obs = ob

    levels = [level1]
    obs_levels = [list(obs1.values())]

    for n in range(1, horizon):
        next_level: list = []
        next_obs: list = []
        for ob in obs_levels[-1]:
            if stop is not None and stop(ob):
                continue
            children: dict = {}
            for h in ob.members:
                for i in spec.actions1:
                    for j in spec.actions2:
                        for (x2, c, d), p in spec.transition[(h.state, i, j)].items():
                            if p <= 0:
                                continue
                            charge(n + 1)
                            child = HistoryNode(state=x2, sig1=c, sig2=d,
                                                alpha=h.alpha * p, depth=n + 1,
                                                parent=h, via=(i, j))
                            next_level.append(child)
                            edge, label = _observed_parts(view, public_of, c, d, i, j)
                            key = (edge, label)
                            ob2 = children.get(key)
                            if ob2 is None:
                                ob2 = children[key] = ObservedNode(
                                    label=label, edge=edge, beta=ZERO,
                                    depth=n + 1, parent=ob)
                            ob2.beta += child.alpha
                            ob2.members.append(child)
                            child.obs = ob2
            ob.children = children
            next_obs.extend(children.values())
        levels.append(next_level)
        obs_levels.append(next_obs)

    return TreePair(spec=spec, view=view, horizon=horizon, levels=levels,
                    obs_levels=obs_levels, public_of=public_of)


# ---------------------------------------------------------------------------
# The conditional kernel
# ---------------------------------------------------------------------------


def phi(pair: TreePair, h_n: HistoryNode, v_m: ObservedNode) -> Fraction:
    """Conditional probability of history h_n given observation v_m (m >= n).

    Exact ratio of chance weights: sum of alpha over level-m members of v_m
    that extend h_n, divided by beta(v_m).  Returns 0 when h_n is
    inconsistent with v_m, which includes the projection mismatch case.
    """
    if v_m.depth < h_n.depth:
        raise GameModelError("phi needs observation at least as long as the history")
    if v_m.beta <= 0:
        raise GameModelError("observation has zero weight")
    total = ZERO
    for h in v_m.members:
        if h.ancestor(h_n.depth) is h_n:
            total += h.alpha
    return total / v_m.beta


def phi_row(pair: TreePair, n: int, v_m: ObservedNode) -> dict:
    """phi over all level-n histories at once: HistoryNode -> Fraction."""
    if v_m.beta <= 0:
        raise GameModelError("observation has zero weight")
    sums: dict = {}
    for h in v_m.members:
        anc = h.ancestor(n)
        sums[anc] = sums.get(anc, ZERO) + h.alpha
    return {h: s / v_m.beta for h, s in sums.items()}


# ---------------------------------------------------------------------------
# Exact play distributions
# ---------------------------------------------------------------------------


@dataclass
class PlayDistribution:
    """Exact probability of every positive-weight history at the horizon."""

    horizon: int
    probs: dict                         # HistoryNode -> Fraction
    pair: TreePair

    def observed_marginal(self) -> dict:
        out: dict = {}
        for h, p in self.probs.items():
            out[h.obs] = out.get(h.obs, ZERO) + p
        return out

    def total(self) -> Fraction:
        return sum(self.probs.values(), ZERO)


def _strategy_prob(strategy: BehavioralStrategy, h: HistoryNode, action: str,
                   pair: TreePair) -> Fraction:
    if strategy.view_kind == "public":
        public_of = pair.public_of or pair.spec.public_label or None
        view = h.view(PUBLIC, public_of)
    else:
        view = h.view(PLAYER1 if strategy.player == 1 else PLAYER2)
    return strategy.action_dist(view).get(action, ZERO)


def exact_play_distribution(spec_or_pair, sigma: BehavioralStrategy,
                            tau: BehavioralStrategy, horizon: int,
                            budget: int | None = None) -> PlayDistribution:
    """P(h) = alpha(h) * product of the players' action probabilities along h.

    Accepts a spec (trees are built) or an existing TreePair covering the
    horizon.  The marginal of the result on the observed tree is the
    distribution over observed plays.
    """
    if isinstance(spec_or_pair, TreePair):
        pair = spec_or_pair
        if pair.horizon < horizon:
            raise GameModelError("tree pair shorter than requested horizon")
    else:
        pair = build_trees(spec_or_pair, horizon, budget=budget)

    weights: dict = {}
    for root in pair.histories(1):
        weights[root] = root.alpha
    for n in range(1, horizon):
        nxt: dict = {}
        for h in pair.histories(n + 1):
            base = weights.get(h.parent)
            if base is None or base == 0:
                continue
            i, j = h.via
            pi = _strategy_prob(sigma, h.parent, i, pair)
            pj = _strategy_prob(tau, h.parent, j, pair)
            if pi == 0 or pj == 0:
                continue
            # alpha already contains the chance factor of this step
            nxt[h] = base * (h.alpha / h.parent.alpha) * pi * pj
        weights = nxt
    return PlayDistribution(horizon=horizon, probs=weights, pair=pair)


# ---------------------------------------------------------------------------
# Kernel identity checks
# ---------------------------------------------------------------------------


@dataclass
class KernelCheckReport:
    n: int
    m: int
    checked_pairs: int
    max_discrepancy: Fraction
    normalization_ok: bool
    bayes_ok: bool
    sum_identity_ok: bool
    compatibility_ok: bool

    @property
    def all_exact(self) -> bool:
        return (self.normalization_ok and self.bayes_ok
                and self.sum_identity_ok and self.compatibility_ok
                and self.max_discrepancy == 0)


def conditional_check(spec_or_pair, sigma, tau, n: int, m: int,
                      budget: int | None = None) -> KernelCheckReport:
    """Exact regression test of the kernel identities at depths (n, m).

    Checks, with exact rational equality:
      * normalization: the kernel row over level-n histories sums to 1 at
        every positive-weight observation;
      * Bayes: the kernel equals the conditional distribution induced by the
        given strategy pair wherever the observation has positive
        probability (strategy independence);
      * sum identity: P(h_n and v_m) = kernel * Q(v_m) for all pairs;
      * compatibility: the kernel at level n equals its refinement summed
        over one-step extensions.
    """
    if not (1 <= n <= m):
        raise GameModelError("need 1 <= n <= m")
    if isinstance(spec_or_pair, TreePair):
        pair = spec_or_pair
    else:
        pair = build_trees(spec_or_pair, m, budget=budget)
    if pair.view not in (PUBLIC, JOINT):
        raise UnsupportedStructureError(
            "kernel checks need the public or joint view; per-player views "
            "do not make both strategies observation-measurable")

    dist = exact_play_distribution(pair, sigma, tau, m)
    q: dict = {}
    joint: dict = {}
    for h, p in dist.probs.items():
        v = h.obs
        q[v] = q.get(v, ZERO) + p
        anc = h.ancestor(n)
        key = (v, anc)
        joint[key] = joint.get(key, ZERO) + p

    max_disc = ZERO
    checked = 0
    normalization_ok = True
    bayes_ok = True
    sum_ok = True
    compat_ok = True

    for v in pair.observations(m):
        row = phi_row(pair, n, v)
        if sum(row.values(), ZERO) != 1:
            normalization_ok = False
        qv = q.get(v, ZERO)
        for h in pair.histories(n):
            k = row.get(h, ZERO)
            checked += 1
            jp = joint.get((v, h), ZERO)
            # sum identity (eq. over cylinders): joint == kernel * Q
            if jp != k * qv:
                sum_ok = False
                max_disc = max(max_disc, abs(jp - k * qv))
            if qv > 0:
                bayes = jp / qv
                if bayes != k:
                    bayes_ok = False
                    max_disc = max(max_disc, abs(bayes - k))
        if n < m:
            refined = phi_row(pair, n + 1, v)
            folded: dict = {}
            for h1, val in refined.items():
                folded[h1.parent] = folded.get(h1.parent, ZERO) + val
            for h in set(row) | set(folded):
                a, b = row.get(h, ZERO), folded.get(h, ZERO)
                if a != b:
                    compat_ok = False
                    max_disc = max(max_disc, abs(a - b))

    return KernelCheckReport(n=n, m=m, checked_pairs=checked,
                             max_discrepancy=max_disc,
                             normalization_ok=normalization_ok,
                             bayes_ok=bayes_ok, sum_identity_ok=sum_ok,
                             compatibility_ok=compat_ok)


# ---------------------------------------------------------------------------
# Monte Carlo simulation (the one floating-point corner, by design)
# ---------------------------------------------------------------------------


@dataclass
class ReplicaResult:
    mean_payoff: float
    sup_payoff: float
    absorbed: bool
    absorption_stage: int | None
    absorbing_payoff: float | None


@dataclass
class SimulationSummary:
    replicas: int
    horizon: int
    seed: int
    mean_of_means: float
    var_of_means: float
    mean_sup: float
    absorbed_fraction: float
    stage1_absorbed_fraction: float
    results: list

    def stderr_of_means(self) -> float:
        if self.replicas < 2:
            return 0.0
        return (self.var_of_means / self.replicas) ** 0.5


def _counter_uniform(seed: int, replica: int, stage: int, purpose: str) -> Fraction:
    """Deterministic uniform in [0,1): counter-based, order-independent."""
    payload = f"{seed}:{replica}:{stage}:{purpose}".encode()
    digest = hashlib.sha256(payload).digest()
    return Fraction(int.from_bytes(digest[:16], "big"), 1 << 128)


def _draw(dist_items, u: Fraction):
    acc = ZERO
    last = None
    for outcome, p in dist_items:
        acc += p
        last = outcome
        if u < acc:
            return outcome
    return last


def simulate(spec_or_sym, sigma: BehavioralStrategy, tau: BehavioralStrategy,
             horizon: int, seed: int, replicas: int) -> SimulationSummary:
    """Sample plays under (sigma, tau); reproducible given the seed.

    Uses a counter-based generator keyed by (seed, replica, stage, purpose):
    replicas are independent of execution order.  Sampling comparisons are
    exact; only the reported statistics are floats.
    """
    if isinstance(spec_or_sym, SymmetricGameSpec):
        spec = spec_or_sym.expand()
    else:
        spec = spec_or_sym
    spec.require_valid()
    absorbing = spec.absorbing_states
    init_items = sorted(spec.initial.items(), key=lambda kv: str(kv[0]))

    results = []
    for r in range(replicas):
        x, c, d = _draw(init_items, _counter_uniform(seed, r, 0, "init"))
        v1: tuple = (c,)
        v2: tuple = (d,)
        total = 0.0
        sup = None
        # absorption_stage = the stage whose transition landed in an
        # absorbing state (0 when the game starts absorbed already)
        absorbed_stage = 0 if x in absorbing else None
        absorbing_payoff = (float(spec.absorbing_payoff(x))
                            if absorbed_stage is not None else None)
        for t in range(1, horizon + 1):
            dist1 = sigma.action_dist(v1)
            dist2 = tau.action_dist(v2)
            i = _draw(sorted(dist1.items()), _counter_uniform(seed, r, t, "a1"))
            j = _draw(sorted(dist2.items()), _counter_uniform(seed, r, t, "a2"))
            g = spec.reward[(x, i, j)]
            total += float(g)
            sup = float(g) if sup is None else max(sup, float(g))
            items = sorted(spec.transition[(x, i, j)].items(), key=lambda kv: str(kv[0]))
            x, c, d = _draw(items, _counter_uniform(seed, r, t, "trans"))
            if absorbed_stage is None and x in absorbing:
                absorbed_stage = t
                absorbing_payoff = float(spec.absorbing_payoff(x))
            v1 = v1 + (i, c)
            v2 = v2 + (j, d)
        results.append(ReplicaResult(
            mean_payoff=total / horizon,
            sup_payoff=sup if sup is not None else 0.0,
            absorbed=absorbed_stage is not None,
            absorption_stage=absorbed_stage,
            absorbing_payoff=absorbing_payoff,
        ))

    means = [res.mean_payoff for res in results]
    mean = sum(means) / replicas if replicas else 0.0
    var = (sum((v - mean) ** 2 for v in means) / (replicas - 1)
           if replicas > 1 else 0.0)
    sups = [res.sup_payoff for res in results]
    absorbed = [res for res in results if res.absorbed]
    stage1 = [res for res in results if res.absorption_stage == 1]
    return SimulationSummary(
        replicas=replicas, horizon=horizon, seed=seed,
        mean_of_means=mean, var_of_means=var,
        mean_sup=sum(sups) / replicas if replicas else 0.0,
        absorbed_fraction=len(absorbed) / replicas if replicas else 0.0,
        stage1_absorbed_fraction=len(stage1) / replicas if replicas else 0.0,
        results=results,
    )
