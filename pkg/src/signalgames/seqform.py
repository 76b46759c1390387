"""Finite-horizon solving of games with arbitrary signaling via sequence form.

A horizon-N truncation with perfect recall is solved exactly as one linear
program over realization plans: player 1's plan x lives on his sequences
(own view followed by an action), player 2's plan enters through the dual.
The payoff matrix couples sequence pairs through the chance weight alpha of
each history, so the LP value is the exact game value.

Histories whose continuation payoff no longer depends on anything (for the
mean payoff: the state is absorbing; for terminal payoffs: an
evaluation-supplied rule) are closed early, banking  alpha * constant  on
the sequence pair that reached them.  This keeps trees small on absorbing
games and makes long horizons reachable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    BudgetExceededError,
    GameModelError,
    node_budget,
)
from .lp import EQ, LEQ, OPTIMAL, LPError, LinearProgram, solve_lp
from .model import (
    BehavioralStrategy,
    GameSpec,
    SymmetricGameSpec,
    is_symmetric_signaling,
)
from .rationals import ONE, ZERO

MEAN = "mean"


@dataclass
class TerminalPayoff:
    """Terminal evaluation of an N-stage game.

    ``action_fn(state, i, j)``: payoff collected at stage N (may depend on
    the stage-N actions); alternatively ``node_fn(full_key)`` for payoffs
    measurable on the length-N history alone.  ``determined_fn(state)`` may
    return the constant continuation value at any state where the remaining
    payoff no longer depends on play, enabling early closing.
    """

    action_fn: object = None
    node_fn: object = None
    determined_fn: object = None

    def __post_init__(self):
        if (self.action_fn is None) == (self.node_fn is None):
            raise GameModelError("terminal payoff needs exactly one of "
                                 "action_fn / node_fn")


@dataclass
class _PlayerForm:
    """Sequence-form bookkeeping for one player."""

    seq_index: dict = field(default_factory=dict)      # seq tuple -> int
    infosets: dict = field(default_factory=dict)       # view tuple -> list[seq ids]
    parent_seq: dict = field(default_factory=dict)     # view tuple -> seq id
    actions: list = field(default_factory=list)

    def __post_init__(self):
        self.seq_index[()] = 0

    def sequence(self, seq: tuple) -> int:
        idx = self.seq_index.get(seq)
        if idx is None:
            idx = self.seq_index[seq] = len(self.seq_index)
        return idx

    def visit(self, view: tuple) -> None:
        if view not in self.infosets:
            self.parent_seq[view] = self.sequence(view[:-1])
            self.infosets[view] = [self.sequence(view + (a,)) for a in self.actions]


@dataclass
class SequenceFormProgram:
    spec: GameSpec
    horizon: int
    evaluation: object
    p1: _PlayerForm
    p2: _PlayerForm
    payoff: dict                                       # (s1, s2) -> Fraction
    live_nodes: int
    closed_nodes: int


@dataclass
class NStageSolution:
    value: Fraction
    horizon: int
    evaluation: object
    strategy1: BehavioralStrategy
    strategy2: BehavioralStrategy
    plan1: dict                                        # seq tuple -> Fraction
    plan2: dict
    arbitrary_views1: list
    arbitrary_views2: list
    program: SequenceFormProgram


def _as_spec(spec_or_sym) -> GameSpec:
    if isinstance(spec_or_sym, SymmetricGameSpec):
        return spec_or_sym.expand()
    return spec_or_sym


def _mean_determined(spec: GameSpec, state: str, depth: int, N: int):
    if state in spec.absorbing_states:
        return spec.absorbing_payoff(state) * (N - depth + 1) / N
    return None


def build_sequence_form(spec_or_sym, horizon: int, evaluation=MEAN,
                        budget: int | None = None) -> SequenceFormProgram:
    """Walk the positive-weight history tree and assemble the program."""
    spec = _as_spec(spec_or_sym)
    spec.require_valid()
    N = horizon
    if N < 1:
        raise GameModelError("horizon must be >= 1")
    terminal = evaluation if isinstance(evaluation, TerminalPayoff) else None
    if terminal is None and evaluation != MEAN:
        raise GameModelError(f"unknown evaluation {evaluation!r}")

    p1 = _PlayerForm(actions=list(spec.actions1))
    p2 = _PlayerForm(actions=list(spec.actions2))
    payoff: dict = {}
    limit = node_budget(budget)
    live = closed = 0

    def bank(s1: int, s2: int, amount: Fraction):
        if amount:
            key = (s1, s2)
            payoff[key] = payoff.get(key, ZERO) + amount

    def determined(state, depth):
        if terminal is None:
            return _mean_determined(spec, state, depth, N)
        if terminal.determined_fn is not None:
            return terminal.determined_fn(state)
        return None

    # Iterative DFS; each frame: (state, alpha, v1, v2, key, depth).
    stack = []
    for (x, c, d), p in sorted(spec.initial.items(), key=str):
        if p > 0:
            stack.append((x, p, (c,), (d,), (((x, c, d),), ()), 1))

    while stack:
        x, alpha, v1, v2, key, depth = stack.pop()
        det = determined(x, depth)
        if det is not None:
            closed += 1
            bank(p1.sequence(v1[:-1]), p2.sequence(v2[:-1]), alpha * det)
            continue
        live += 1
        if live + closed > limit:
            raise BudgetExceededError(limit, depth)
        p1.visit(v1)
        p2.visit(v2)
        for i in spec.actions1:
            s1 = p1.sequence(v1 + (i,))
            for j in spec.actions2:
                s2 = p2.sequence(v2 + (j,))
                if terminal is None:
                    bank(s1, s2, alpha * spec.reward[(x, i, j)] / N)
                elif depth == N and terminal.action_fn is not None:
                    bank(s1, s2, alpha * terminal.action_fn(x, i, j))
                if depth < N:
                    for (x2, c, d), p in spec.transition[(x, i, j)].items():
                        if p > 0:
                            stack.append((x2, alpha * p, v1 + (i, c), v2 + (j, d),
                                          (key[0] + ((x2, c, d),), key[1] + ((i, j),)),
                                          depth + 1))
        if depth == N and terminal is not None and terminal.node_fn is not None:
            bank(p1.sequence(v1[:-1]), p2.sequence(v2[:-1]),
                 alpha * terminal.node_fn(key))

    return SequenceFormProgram(spec=spec, horizon=N, evaluation=evaluation,
                               p1=p1, p2=p2, payoff=payoff,
                               live_nodes=live, closed_nodes=closed)


def _solve_program(prog: SequenceFormProgram):
    """One LP solve: maximize player 2's tree value cap q_root subject to
    every player-2 sequence being covered by payoff + released q's."""
    n1 = len(prog.p1.seq_index)
    # q variables sit after the x block: column n1 is the root payment,
    # then one per p2 infoset.
    inf2 = list(prog.p2.infosets)
    q_of = {view: n1 + 1 + k for k, view in enumerate(inf2)}
    nq = 1 + len(inf2)
    nvars = n1 + nq

    # children-of-sequence maps
    released_by_seq: dict = {}
    for view, qidx in q_of.items():
        released_by_seq.setdefault(prog.p2.parent_seq[view], []).append(qidx)

    payoff_by_s2: dict = {}
    for (s1, s2), val in prog.payoff.items():
        payoff_by_s2.setdefault(s2, []).append((s1, val))

    rows, senses, rhs = [], [], []
    seq2_rows = []                       # (seq index, row number) for duals
    for seq, s2 in prog.p2.seq_index.items():
        row = [ZERO] * nvars
        if seq == ():
            row[n1] = ONE
        else:
            view = seq[:-1]
            if view in q_of:
                row[q_of[view]] = ONE
            else:
                continue  # unreachable p2 sequence with no infoset: no constraint
        for qidx in released_by_seq.get(s2, []):
            row[qidx] = -ONE
        for (s1, val) in payoff_by_s2.get(s2, []):
            row[s1] -= val
        seq2_rows.append((s2, len(rows)))
        rows.append(row)
        senses.append(LEQ)
        rhs.append(ZERO)

    # player 1 plan constraints
    row = [ZERO] * nvars
    row[0] = ONE
    rows.append(row)
    senses.append(EQ)
    rhs.append(ONE)
    for view, seqs in prog.p1.infosets.items():
        row = [ZERO] * nvars
        for s in seqs:
            row[s] = ONE
        row[prog.p1.parent_seq[view]] -= ONE
        rows.append(row)
        senses.append(EQ)
        rhs.append(ZERO)

    objective = [ZERO] * nvars
    objective[n1] = ONE
    lp = LinearProgram(objective=objective, rows=rows, senses=senses, rhs=rhs,
                       free=frozenset(range(n1, nvars)))
    sol = solve_lp(lp)
    if sol.status != OPTIMAL:
        raise LPError(f"sequence-form LP ended {sol.status}")

    plan1_vec = sol.primal[:n1]
    plan2_vec = [ZERO] * len(prog.p2.seq_index)
    for s2, rownum in seq2_rows:
        plan2_vec[s2] = sol.duals[rownum]
    # dual feasibility already makes plan2 a realization plan; assert the
    # flow equations exactly as a belt-and-braces check
    assert plan2_vec[0] == 1
    for view, seqs in ((v, [prog.p2.seq_index[v + (a,)] for a in prog.p2.actions])
                       for v in prog.p2.infosets):
        total = sum((plan2_vec[s] for s in seqs), ZERO)
        assert total == plan2_vec[prog.p2.parent_seq[view]]
    return sol.objective, plan1_vec, plan2_vec


def _plan_to_strategy(form: _PlayerForm, plan_vec, player: int,
                      horizon: int) -> tuple[BehavioralStrategy, list]:
    table = {}
    arbitrary = []
    uniform = Fraction(1, len(form.actions))
    for view, seqs in form.infosets.items():
        enter = plan_vec[form.parent_seq[view]]
        if enter == 0:
            table[view] = {a: uniform for a in form.actions}
            arbitrary.append(view)
        else:
            table[view] = {a: plan_vec[s] / enter
                           for a, s in zip(form.actions, seqs)}
    return (BehavioralStrategy(player=player, horizon=horizon, table=table,
                               tail={a: uniform for a in form.actions}),
            arbitrary)


def nstage_value(spec_or_sym, horizon: int, evaluation=MEAN,
                 budget: int | None = None) -> NStageSolution:
    """Exact value and optimal behavioral strategies of the N-stage game.

    ``evaluation``: "mean" for the average of the N stage rewards, or a
    TerminalPayoff.  Strategies at unreached views carry uniform
    placeholders and are listed in ``arbitrary_views*``.
    """
    prog = build_sequence_form(spec_or_sym, horizon, evaluation, budget)
    value, plan1_vec, plan2_vec = _solve_program(prog)
    strategy1, arb1 = _plan_to_strategy(prog.p1, plan1_vec, 1, horizon)
    strategy2, arb2 = _plan_to_strategy(prog.p2, plan2_vec, 2, horizon)
    plan1 = {seq: plan1_vec[idx] for seq, idx in prog.p1.seq_index.items()}
    plan2 = {seq: plan2_vec[idx] for seq, idx in prog.p2.seq_index.items()}
    return NStageSolution(value=value, horizon=horizon, evaluation=evaluation,
                          strategy1=strategy1, strategy2=strategy2,
                          plan1=plan1, plan2=plan2,
                          arbitrary_views1=arb1, arbitrary_views2=arb2,
                          program=prog)


# ---------------------------------------------------------------------------
# Best response against a fixed behavioral strategy
# ---------------------------------------------------------------------------


def best_response_value(spec_or_sym, fixed: BehavioralStrategy, horizon: int,
                        evaluation=MEAN, responder: int = 2,
                        budget: int | None = None) -> Fraction:
    """Exact value of the responder's best reply against ``fixed``.

    responder=2 minimizes, responder=1 maximizes.  Works by collapsing the
    fixed player with chance and running backward induction over the
    responder's view tree; independent of the LP path, so it doubles as a
    certificate check for returned strategies.
    """
    spec = _as_spec(spec_or_sym)
    spec.require_valid()
    N = horizon
    terminal = evaluation if isinstance(evaluation, TerminalPayoff) else None
    public_of = None
    if fixed.view_kind == "public":
        public_of = (spec.public_label
                     or is_symmetric_signaling(spec).public_of)

    form = _PlayerForm(actions=list(spec.actions2 if responder == 2
                                    else spec.actions1))
    cost: dict = {}                      # seq id -> banked Fraction
    limit = node_budget(budget)
    count = 0

    def bank(seq_id, amount):
        if amount:
            cost[seq_id] = cost.get(seq_id, ZERO) + amount

    def fixed_dist(v_fixed, vpub):
        view = vpub if fixed.view_kind == "public" else v_fixed
        return fixed.action_dist(view)

    # frames: (state, weight, v_fixed, v_resp, vpub, depth)
    stack = []
    for (x, c, d), p in sorted(spec.initial.items(), key=str):
        if p > 0:
            vf = (c,) if responder == 2 else (d,)
            vr = (d,) if responder == 2 else (c,)
            vpub = (public_of.get(c, c),) if public_of is not None else None
            stack.append((x, p, vf, vr, vpub, 1))

    while stack:
        x, weight, vf, vr, vpub, depth = stack.pop()
        count += 1
        if count > limit:
            raise BudgetExceededError(limit, depth)
        det = (_mean_determined(spec, x, depth, N) if terminal is None
               else (terminal.determined_fn(x) if terminal.determined_fn else None))
        if det is not None:
            bank(form.sequence(vr[:-1]), weight * det)
            continue
        form.visit(vr)
        dist = fixed_dist(vf, vpub)
        for a_resp in form.actions:
            s_resp = form.sequence(vr + (a_resp,))
            for a_fixed, pf in dist.items():
                if pf == 0:
                    continue
                i, j = (a_fixed, a_resp) if responder == 2 else (a_resp, a_fixed)
                w = weight * pf
                if terminal is None:
                    bank(s_resp, w * spec.reward[(x, i, j)] / N)
                elif depth == N and terminal.action_fn is not None:
                    bank(s_resp, w * terminal.action_fn(x, i, j))
                if depth < N:
                    for (x2, c, d), p in spec.transition[(x, i, j)].items():
                        if p > 0:
                            vf2 = vf + ((i, c) if responder == 2 else (j, d))
                            vr2 = vr + ((j, d) if responder == 2 else (i, c))
                            vpub2 = (vpub + (i, j, public_of.get(c, c))
                                     if vpub is not None else None)
                            stack.append((x2, w * p, vf2, vr2, vpub2, depth + 1))
        if depth == N and terminal is not None and terminal.node_fn is not None:
            raise GameModelError("best_response_value needs an action-style "
                                 "terminal payoff")

    # fold the responder tree: minimize (responder 2) or maximize (1)
    pick = min if responder == 2 else max
    children_of_seq: dict = {}
    for view in form.infosets:
        children_of_seq.setdefault(form.parent_seq[view], []).append(view)

    def seq_value(seq_id) -> Fraction:
        total = cost.get(seq_id, ZERO)
        for view in children_of_seq.get(seq_id, []):
            total += pick(seq_value(s)
                          for s in (form.seq_index[view + (a,)]
                                    for a in form.actions))
        return total

    import sys
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * horizon + 100))
    try:
        return seq_value(0)
    finally:
        sys.setrecursionlimit(old)
