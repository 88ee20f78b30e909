"""Preimages and universal planning algorithms over a transition system.

A state-action set is a diagram over current-state and system-action
variables.  All algorithms grow a visited set ``V`` backwards from the goal
and keep only rules whose state is new, so every state of the plan keeps
the rules of the first layer it appeared in.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Tuple

from .bdd import NodeRef
from .encoder import Encoding, TransitionSystem

STRONG = 'strong'
STRONG_CYCLIC = 'strong-cyclic'
OPTIMISTIC = 'optimistic'
ALGORITHMS = (STRONG, STRONG_CYCLIC, OPTIMISTIC)

FAILURE_REASON = {
    STRONG: 'no-strong-plan',
    STRONG_CYCLIC: 'no-strong-cyclic-plan',
    OPTIMISTIC: 'no-optimistic-plan',
}
FAILURE_MESSAGE = {
    'no-strong-plan': 'No strong plan exists',
    'no-strong-cyclic-plan': 'No strong cyclic plan exists',
    'no-optimistic-plan': 'No optimistic plan exists',
    'iteration-cap': 'Iteration cap reached',
}


class PlanningError(Exception):
    pass


# -- preimages -----------------------------------------------------------

def weak_preimage_sa(ts: TransitionSystem, V: NodeRef) -> NodeRef:
    """State-action pairs with at least one transition into ``V``."""
    enc = ts.enc
    target = ts.bdd.rename(V, enc.cur_to_next)
    return ts.relprod(target, ts.quantified_vars())


def strong_preimage_sa(ts: TransitionSystem, V: NodeRef) -> NodeRef:
    """Applicable state-action pairs all of whose transitions end in ``V``."""
    return weak_preimage_sa(ts, V) & ~weak_preimage_sa(ts, ts.valid & ~V)


def states_of(ts: TransitionSystem, sa: NodeRef) -> NodeRef:
    return ts.bdd.exists(sa, ts.enc.sys_vars)


def image(ts: TransitionSystem, states: NodeRef, actions: Optional[NodeRef] = None) -> NodeRef:
    """Successor states of ``states`` under the given system action diagram."""
    enc = ts.enc
    start = states if actions is None else states & actions
    quant = enc.cur_vars + enc.sys_vars + enc.env_vars
    nxt = ts.relprod(start, quant)
    return ts.bdd.rename(nxt, enc.next_to_cur)


def count_states(ts: TransitionSystem, states: NodeRef) -> int:
    return ts.bdd.count_sat(states, ts.enc.cur_vars)


# -- results -------------------------------------------------------------

@dataclass
class IterationStat:
    iteration: int
    new_states: int
    plan_nodes: int

    def __str__(self):
        return f'iter {self.iteration} new_states {self.new_states} plan_nodes {self.plan_nodes}'


@dataclass
class UniversalPlan:
    """State-action rules plus the visited sets they were built from."""

    ts: TransitionSystem
    sa: NodeRef
    algorithm: str
    iterations: int = 0
    stats: List[IterationStat] = field(default_factory=list)
    visited: List[NodeRef] = field(default_factory=list)

    @property
    def covered(self) -> NodeRef:
        """Goal states plus every state with a rule."""
        return self.visited[-1]

    @property
    def states(self) -> NodeRef:
        return states_of(self.ts, self.sa)

    def node_count(self) -> int:
        return self.ts.bdd.node_count(self.sa)

    def covered_count(self) -> int:
        return count_states(self.ts, self.covered)


@dataclass
class PlanOutcome:
    success: bool
    plan: UniversalPlan
    reason: Optional[str] = None

    @property
    def message(self) -> str:
        if self.success:
            return 'SUCCESS'
        return FAILURE_MESSAGE.get(self.reason, self.reason)


def default_cap(ts: TransitionSystem) -> int:
    # every iteration adds a state, so this bound is never reached by a correct encoding
    return (1 << ts.enc.num_state_bits) + 1


class _Builder:
    def __init__(self, ts: TransitionSystem, algorithm: str, cap: Optional[int],
                 on_iteration: Optional[Callable[[IterationStat], None]]):
        self.ts = ts
        self.V = ts.goal
        self.plan = UniversalPlan(ts, ts.bdd.ZERO, algorithm, visited=[ts.goal])
        self.cap = default_cap(ts) if cap is None else cap
        self.on_iteration = on_iteration

    def done(self) -> bool:
        return (self.ts.init & ~self.V).is_zero

    def commit(self, sa: NodeRef) -> None:
        new = states_of(self.ts, sa)
        self.V = self.V | new
        p = self.plan
        p.sa = p.sa | sa
        p.iterations += 1
        p.visited.append(self.V)
        stat = IterationStat(p.iterations, count_states(self.ts, new), p.node_count())
        p.stats.append(stat)
        if self.on_iteration:
            self.on_iteration(stat)
        if p.iterations >= self.cap:
            raise _CapReached()

    def result(self, ok: bool, reason: Optional[str] = None) -> PlanOutcome:
        return PlanOutcome(ok, self.plan, None if ok else reason)


class _CapReached(Exception):
    pass


def _layered(ts: TransitionSystem, algorithm: str, preimage, cap, on_iteration) -> PlanOutcome:
    b = _Builder(ts, algorithm, cap, on_iteration)
    try:
        while not b.done():
            pruned = preimage(ts, b.V) & ~b.V
            if pruned.is_zero:
                return b.result(False, FAILURE_REASON[algorithm])
            b.commit(pruned)
    except _CapReached:
        if not b.done():
            return b.result(False, 'iteration-cap')
    return b.result(True)


def optimistic_plan(ts: TransitionSystem, cap: Optional[int] = None,
                    on_iteration=None) -> PlanOutcome:
    """Weak preimage layers until the initial states are covered."""
    return _layered(ts, OPTIMISTIC, weak_preimage_sa, cap, on_iteration)


def strong_plan(ts: TransitionSystem, cap: Optional[int] = None, on_iteration=None) -> PlanOutcome:
    """Strong preimage layers; each state gets its worst-case shortest rules."""
    return _layered(ts, STRONG, strong_preimage_sa, cap, on_iteration)


def closed_subset(ts: TransitionSystem, V: NodeRef, cand: NodeRef) -> NodeRef:
    """Largest subset of rules ``cand`` none of whose transitions leave ``V`` or its own states.

    Removal proceeds by frontier: once a state loses its last rule, only
    rules with a transition into that state can become bad.
    """
    X = cand
    allowed = V | states_of(ts, X)
    bad = X & weak_preimage_sa(ts, ts.valid & ~allowed)
    while not bad.is_zero:
        X = X & ~bad
        lost = allowed & ~V & ~states_of(ts, X)
        allowed = allowed & ~lost
        bad = X & weak_preimage_sa(ts, lost)
    return X


def strong_cyclic_plan(ts: TransitionSystem, cap: Optional[int] = None,
                       on_iteration=None) -> PlanOutcome:
    """Strong layers while possible, otherwise the first closed set of weak layers.

    The weak phase accumulates pruned weak layers ``W1, W2, ...`` and
    commits the greatest closed subset ``C_k`` of ``W1 + ... + Wk`` for the
    smallest ``k`` where it is nonempty.  ``C_k`` grows with ``k``, so the
    smallest such ``k`` is found by doubling and bisection.
    """
    b = _Builder(ts, STRONG_CYCLIC, cap, on_iteration)
    try:
        while not b.done():
            strong = strong_preimage_sa(ts, b.V) & ~b.V
            if not strong.is_zero:
                b.commit(strong)
                continue
            C = _first_closed(ts, b.V)
            if C is None:
                return b.result(False, FAILURE_REASON[STRONG_CYCLIC])
            b.commit(C)
    except _CapReached:
        if not b.done():
            return b.result(False, 'iteration-cap')
    return b.result(True)


def _first_closed(ts: TransitionSystem, V: NodeRef) -> Optional[NodeRef]:
    # cum[k] is the union of the first k weak layers
    cum = [ts.bdd.ZERO]
    reach = V
    exhausted = False

    def extend_to(k: int) -> int:
        nonlocal reach, exhausted
        while len(cum) <= k and not exhausted:
            layer = weak_preimage_sa(ts, reach) & ~reach
            if layer.is_zero:
                exhausted = True
                break
            cum.append(cum[-1] | layer)
            reach = reach | states_of(ts, layer)
        return len(cum) - 1

    memo: Dict[int, NodeRef] = {}

    def closed(k: int) -> NodeRef:
        if k not in memo:
            memo[k] = closed_subset(ts, V, cum[k])
        return memo[k]

    lo, hi = 0, 1  # closed(lo) is empty
    while True:
        top = extend_to(hi)
        if top < hi:
            hi = top
            if hi == lo or closed(hi).is_zero:
                return None
            break
        if not closed(hi).is_zero:
            break
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if closed(mid).is_zero:
            lo = mid
        else:
            hi = mid
    return closed(hi)


PLANNERS = {
    STRONG: strong_plan,
    STRONG_CYCLIC: strong_cyclic_plan,
    OPTIMISTIC: optimistic_plan,
}


def plan(ts: TransitionSystem, algorithm: str, cap: Optional[int] = None,
         on_iteration=None) -> PlanOutcome:
    try:
        planner = PLANNERS[algorithm]
    except KeyError:
        raise PlanningError(f'unknown algorithm {algorithm!r}') from None
    return planner(ts, cap=cap, on_iteration=on_iteration)


# -- using plans ---------------------------------------------------------

def advice(enc: Encoding, sa: NodeRef, state: Mapping[str, int]) -> List[Dict[str, str]]:
    """Advised joint actions at ``state``, in lexicographic order of their id bits."""
    rules = enc.bdd.let(enc.state_assignment(state), sa)
    return [enc.decode_actions(a) for a in enc.bdd.enumerate_sat(rules, enc.sys_vars)]


def extract_actions(ts: TransitionSystem, sa: NodeRef,
                    state: Mapping[str, int]) -> List[Dict[str, str]]:
    return advice(ts.enc, sa, state)


def nondeterministic_pairs(ts: TransitionSystem) -> NodeRef:
    """State-action pairs with two or more distinct successors."""
    out = ts.bdd.ZERO
    for v in ts.enc.cur_vars:
        x = ts.bdd.make_var(v)
        out = out | (weak_preimage_sa(ts, x) & weak_preimage_sa(ts, ~x & ts.valid))
    return out


def is_deterministic(ts: TransitionSystem) -> bool:
    return nondeterministic_pairs(ts).is_zero


class SequentialPlanError(Exception):
    pass


def sequential_plan(ts: TransitionSystem, sa: NodeRef, start: Mapping[str, int],
                    max_steps: int = 10_000, check: bool = True) -> List[Dict[str, str]]:
    """Follow the plan from ``start`` choosing the smallest advised action each step."""
    enc, bdd = ts.enc, ts.bdd
    if check and not is_deterministic(ts):
        raise SequentialPlanError('domain is not deterministic')
    state = dict(start)
    steps: List[Dict[str, str]] = []
    while True:
        cube = enc.state_cube(state)
        if not (cube & ts.goal).is_zero:
            return steps
        if len(steps) >= max_steps:
            raise SequentialPlanError(f'no goal state within {max_steps} steps')
        rules = bdd.let(enc.state_assignment(state), sa)
        choice = bdd.pick(rules, enc.sys_vars)
        if choice is None:
            raise SequentialPlanError(f'plan has no rule for state {state}')
        succ = image(ts, cube, bdd.cube(choice))
        succ_asg = bdd.pick(succ, enc.cur_vars)
        if succ_asg is None:
            raise SequentialPlanError(f'advised action has no successor at {state}')
        if bdd.count_sat(succ, enc.cur_vars) != 1:
            raise SequentialPlanError(f'advised action is nondeterministic at {state}')
        steps.append(enc.decode_actions(choice))
        state = enc.decode_state(succ_asg)
