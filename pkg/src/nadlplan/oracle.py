"""Explicit-state reference semantics, planners and plan evaluation.

States are numbered in mixed radix over the declared variables (first
declared variable least significant).  System joint actions are numbered
in mixed radix over the system agents, first agent most significant.
Everything is computed with numpy arrays over all states at once, so this
is meant for domains of a few thousand states.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .nadl.syntax import (ArithOp, Bin, Const, DomainDescription, Ite, Not, Num, NumVar, Prop,
                          Rel)
from .planning import FAILURE_REASON, OPTIMISTIC, STRONG, STRONG_CYCLIC


class OracleError(Exception):
    pass


MAX_STATES = 1 << 14
MAX_JOINT = 1 << 10


# -- direct formula evaluation -------------------------------------------

def eval_arith(e, cur: Mapping[str, np.ndarray], nxt: Mapping[str, np.ndarray]):
    if isinstance(e, Num):
        return np.int64(e.value)
    if isinstance(e, NumVar):
        return (nxt if e.primed else cur)[e.name]
    if isinstance(e, ArithOp):
        a, b = eval_arith(e.left, cur, nxt), eval_arith(e.right, cur, nxt)
        if e.op == '+':
            return a + b
        if e.op == '-':
            return a - b
        raise OracleError(f"unsupported operator '{e.op}'")
    raise OracleError(f'not an arithmetic expression: {e!r}')


_RELS = {'<': np.less, '>': np.greater, '<=': np.less_equal, '>=': np.greater_equal,
         '=': np.equal, '!=': np.not_equal}


def eval_formula(f, cur: Mapping[str, np.ndarray], nxt: Mapping[str, np.ndarray]):
    if isinstance(f, Const):
        return np.bool_(f.value)
    if isinstance(f, Prop):
        return (nxt if f.primed else cur)[f.name] != 0
    if isinstance(f, Rel):
        return _RELS[f.op](eval_arith(f.left, cur, nxt), eval_arith(f.right, cur, nxt))
    if isinstance(f, Not):
        return ~eval_formula(f.arg, cur, nxt)
    if isinstance(f, Bin):
        a, b = eval_formula(f.left, cur, nxt), eval_formula(f.right, cur, nxt)
        if f.op == 'and':
            return a & b
        if f.op == 'or':
            return a | b
        if f.op == 'implies':
            return ~a | b
        if f.op == 'iff':
            return a == b
    if isinstance(f, Ite):
        c = eval_formula(f.cond, cur, nxt)
        return (c & eval_formula(f.then, cur, nxt)) | (~c & eval_formula(f.other, cur, nxt))
    raise OracleError(f'not a formula: {f!r}')


# -- the explicit automaton ----------------------------------------------

@dataclass
class ExplicitNfa:
    dd: DomainDescription
    names: List[str]
    sizes: List[int]
    strides: List[int]
    n_states: int
    sys_joints: List[Tuple[str, ...]]
    env_joints: List[Tuple[str, ...]]
    # full relation with the environment choice kept
    full_src: np.ndarray
    full_inp: np.ndarray
    full_env: np.ndarray
    full_dst: np.ndarray
    # environment projected away, duplicates removed
    src: np.ndarray
    inp: np.ndarray
    dst: np.ndarray
    init: np.ndarray
    goal: np.ndarray

    @property
    def n_inputs(self) -> int:
        return len(self.sys_joints)

    def values(self, s: int) -> Dict[str, int]:
        return {n: (s // st) % sz for n, st, sz in zip(self.names, self.strides, self.sizes)}

    def index(self, values: Mapping[str, int]) -> int:
        return sum(int(values[n]) * st for n, st in zip(self.names, self.strides))

    def joint_index(self, actions: Mapping[str, str]) -> int:
        key = tuple(actions[ag.name] for ag in self.dd.system)
        return self.sys_joints.index(key)

    def joint_dict(self, i: int) -> Dict[str, str]:
        return {ag.name: a for ag, a in zip(self.dd.system, self.sys_joints[i])}

    def triples(self) -> set:
        return set(zip(self.src.tolist(), self.inp.tolist(), self.dst.tolist()))

    def dump(self) -> List[str]:
        """``<s> <joint-action> <s'>`` lines, states and actions spelled out."""
        def st(s):
            return ','.join(f'{n}={v}' for n, v in self.values(s).items())
        return [f'{st(s)} {"+".join(self.sys_joints[i])} {st(d)}'
                for s, i, d in sorted(self.triples())]


def _grid(names, sizes):
    strides, acc = [], 1
    for sz in sizes:
        strides.append(acc)
        acc *= sz
    return strides, acc


def expand(dd: DomainDescription, max_states: int = MAX_STATES,
           max_joint: int = MAX_JOINT) -> ExplicitNfa:
    """Enumerate every state and joint action and evaluate the relation directly."""
    names = [v.name for v in dd.variables]
    sizes = [v.size for v in dd.variables]
    strides, n = _grid(names, sizes)
    if n > max_states:
        raise OracleError(f'{n} states exceed the cap of {max_states}')
    n_joint = int(np.prod([len(ag.actions) for ag in dd.agents], dtype=object))
    if n_joint > max_joint:
        raise OracleError(f'{n_joint} joint actions exceed the cap of {max_joint}')
    ids = np.arange(n, dtype=np.int64)
    cur = {nm: (ids // st) % sz for nm, st, sz in zip(names, strides, sizes)}
    pos = {nm: k for k, nm in enumerate(names)}

    # per action: allowed (state, assignment of constrained next values) and the index delta
    allowed: Dict[str, np.ndarray] = {}
    delta: Dict[str, np.ndarray] = {}
    for a in dd.actions:
        con = list(a.con)
        csizes = [sizes[pos[v]] for v in con]
        combos = np.array(list(itertools.product(*[range(s) for s in csizes])),
                          dtype=np.int64).reshape(-1, len(con)) if con else np.zeros((1, 0), np.int64)
        m = combos.shape[0]
        nxt = {v: combos[None, :, k] for k, v in enumerate(con)}
        cur2 = {nm: arr[:, None] for nm, arr in cur.items()}
        ok = np.broadcast_to(eval_formula(a.pre, cur2, nxt) & eval_formula(a.eff, cur2, nxt),
                             (n, m))
        allowed[a.name] = np.ascontiguousarray(ok)
        d = np.zeros((n, m), dtype=np.int64)
        for k, v in enumerate(con):
            d += (combos[None, :, k] - cur[v][:, None]) * strides[pos[v]]
        delta[a.name] = d

    sys_joints = list(itertools.product(*[[a.name for a in ag.actions] for ag in dd.system]))
    env_joints = list(itertools.product(*[[a.name for a in ag.actions] for ag in dd.environment]))
    con_of = {a.name: set(a.con) for a in dd.actions}

    def interferes(joint):
        return any(con_of[x] & con_of[y] for x, y in itertools.combinations(joint, 2))

    parts = []
    for i, sj in enumerate(sys_joints):
        if interferes(sj):
            continue
        for e, ej in enumerate(env_joints):
            if interferes(ej):
                continue
            src = ids
            dst = ids
            for a in sj + ej:
                rows, cols = np.nonzero(allowed[a][src])
                dst = dst[rows] + delta[a][src[rows], cols]
                src = src[rows]
            if src.size:
                parts.append((src, np.full(src.size, i), np.full(src.size, e), dst))
    if parts:
        fs, fi, fe, fd = (np.concatenate(x) for x in zip(*parts))
    else:
        fs = fi = fe = fd = np.zeros(0, dtype=np.int64)
    key = np.unique((fs * len(sys_joints) + fi) * n + fd)
    dst = key % n
    si = key // n
    init = np.broadcast_to(eval_formula(dd.init, cur, {}), (n,)).copy()
    goal = np.broadcast_to(eval_formula(dd.goal, cur, {}), (n,)).copy()
    return ExplicitNfa(dd, names, sizes, strides, n, sys_joints, env_joints,
                       fs, fi, fe, fd, si // len(sys_joints), si % len(sys_joints), dst,
                       init, goal)


# -- preimages and planners ----------------------------------------------

def oracle_preimages(nfa: ExplicitNfa, V: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Weak and strong preimages of the state mask ``V`` as state-by-input masks."""
    shape = (nfa.n_states, nfa.n_inputs)
    weak = np.zeros(shape, dtype=bool)
    app = np.zeros(shape, dtype=bool)
    out = np.zeros(shape, dtype=bool)
    hit = V[nfa.dst]
    weak[nfa.src[hit], nfa.inp[hit]] = True
    app[nfa.src, nfa.inp] = True
    out[nfa.src[~hit], nfa.inp[~hit]] = True
    return weak, app & ~out


@dataclass
class ExplicitPlan:
    success: bool
    reason: Optional[str]
    sa: np.ndarray  # states x inputs
    visited: List[np.ndarray] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.visited) - 1

    @property
    def covered(self) -> np.ndarray:
        return self.visited[-1]


def _closed(nfa: ExplicitNfa, V: np.ndarray, cand: np.ndarray) -> np.ndarray:
    X = cand.copy()
    while True:
        allowed = V | X.any(axis=1)
        _, stay = oracle_preimages(nfa, allowed)
        bad = X & ~stay
        if not bad.any():
            return X
        X &= ~bad


def oracle_plan(nfa: ExplicitNfa, algorithm: str) -> ExplicitPlan:
    V = nfa.goal.copy()
    sa = np.zeros((nfa.n_states, nfa.n_inputs), dtype=bool)
    visited = [V.copy()]
    init = nfa.init

    def commit(rules):
        nonlocal V
        sa[:] |= rules
        V = V | rules.any(axis=1)
        visited.append(V.copy())

    def fail():
        return ExplicitPlan(False, FAILURE_REASON[algorithm], sa, visited)

    while (init & ~V).any():
        weak, strong = oracle_preimages(nfa, V)
        if algorithm == OPTIMISTIC:
            rules = weak & ~V[:, None]
        elif algorithm == STRONG:
            rules = strong & ~V[:, None]
        elif algorithm == STRONG_CYCLIC:
            rules = strong & ~V[:, None]
            if not rules.any():
                # weak layers one at a time until some closed subset appears
                cand = np.zeros_like(sa)
                reach = V.copy()
                rules = cand
                while True:
                    layer = oracle_preimages(nfa, reach)[0] & ~reach[:, None]
                    if not layer.any():
                        break
                    cand = cand | layer
                    reach = reach | layer.any(axis=1)
                    rules = _closed(nfa, V, cand)
                    if rules.any():
                        break
        else:
            raise OracleError(f'unknown algorithm {algorithm!r}')
        if not rules.any():
            return fail()
        commit(rules)
    return ExplicitPlan(True, None, sa, visited)


# -- plan evaluation -----------------------------------------------------

class Infinite:
    """Unbounded plan length; ``dead_end`` marks reachable unrecoverable states."""

    def __init__(self, dead_end: bool):
        self.dead_end = dead_end

    def __eq__(self, other):
        return isinstance(other, Infinite) and other.dead_end == self.dead_end

    def __hash__(self):
        return hash(('inf', self.dead_end))

    def __repr__(self):
        return 'INF_D' if self.dead_end else 'INF'

    __str__ = __repr__


INF = Infinite(False)
INF_D = Infinite(True)
Length = Union[int, Infinite]


@dataclass(frozen=True)
class LengthProfile:
    best: Length
    worst: Length

    def __str__(self):
        return f'best {self.best} worst {self.worst}'


def _plan_edges(nfa: ExplicitNfa, sa: np.ndarray, goal: np.ndarray) -> Dict[int, List[int]]:
    """Successors of each non-goal state under all of its plan rules."""
    use = sa[nfa.src, nfa.inp] & ~goal[nfa.src]
    succ: Dict[int, List[int]] = {}
    for s, d in zip(nfa.src[use].tolist(), nfa.dst[use].tolist()):
        succ.setdefault(s, []).append(d)
    return succ


def evaluate_plan(nfa: ExplicitNfa, sa: np.ndarray,
                  starts: Optional[Sequence[int]] = None) -> Dict[int, LengthProfile]:
    """Best and worst execution lengths from each start state.

    The worst case lets the adversary pick both the advised action and the
    outcome.  It is ``INF_D`` if some execution reaches a state that is
    neither a goal nor covered by the plan, otherwise ``INF`` if some
    execution can cycle, otherwise the longest execution.
    """
    goal = nfa.goal
    covered = sa.any(axis=1)
    succ = _plan_edges(nfa, sa, goal)
    if starts is None:
        starts = np.nonzero(nfa.init & (covered | goal))[0].tolist()

    # best case: backward breadth-first search from the goal over plan edges
    pred: Dict[int, List[int]] = {}
    for s, ds in succ.items():
        for d in ds:
            pred.setdefault(d, []).append(s)
    best = {int(g): 0 for g in np.nonzero(goal)[0]}
    queue = deque(best)
    while queue:
        u = queue.popleft()
        for p in pred.get(u, ()):
            if p not in best:
                best[p] = best[u] + 1
                queue.append(p)

    out = {}
    worst_memo: Dict[int, Length] = {}
    for s in starts:
        s = int(s)
        if goal[s]:
            out[s] = LengthProfile(0, 0)
            continue
        b = best.get(s, INF)
        out[s] = LengthProfile(b, _worst(s, succ, goal, covered, worst_memo))
    return out


def _worst(start: int, succ, goal, covered, memo) -> Length:
    if start in memo:
        return memo[start]
    # reachable part of the plan graph
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        if goal[u]:
            continue
        for d in succ.get(u, ()):
            if d not in seen:
                seen.add(d)
                stack.append(d)
    if any(not goal[u] and (not covered[u] or u not in succ) for u in seen):
        memo[start] = INF_D
        return INF_D
    # longest path by depth-first search; a back edge means a cycle
    state: Dict[int, int] = {}
    length: Dict[int, int] = {}

    def visit(root):
        stack = [(root, iter(succ.get(root, ())))]
        state[root] = 1
        while stack:
            u, it = stack[-1]
            for d in it:
                if goal[d]:
                    continue
                if state.get(d) == 1:
                    return False
                if d not in state:
                    state[d] = 1
                    stack.append((d, iter(succ.get(d, ()))))
                    break
            else:
                stack.pop()
                state[u] = 2
                length[u] = 1 + max((0 if goal[d] else length[d]) for d in succ.get(u, ()))
        return True

    if not visit(start):
        memo[start] = INF
        return INF
    memo[start] = length[start]
    return length[start]


# -- symbolic to explicit ------------------------------------------------

def state_mask(nfa: ExplicitNfa, ts, states) -> np.ndarray:
    """Explicit mask of a state diagram over the current-state variables."""
    enc = ts.enc
    mask = np.zeros(nfa.n_states, dtype=bool)
    for asg in ts.bdd.enumerate_sat(states, enc.cur_vars):
        mask[nfa.index(enc.decode_state(asg))] = True
    return mask


def sa_matrix(nfa: ExplicitNfa, ts, sa) -> np.ndarray:
    """Explicit state-by-input mask of a state-action diagram."""
    enc = ts.enc
    out = np.zeros((nfa.n_states, nfa.n_inputs), dtype=bool)
    for asg in ts.bdd.enumerate_sat(sa, enc.cur_vars + enc.sys_vars):
        acts = enc.decode_actions(asg)
        if any(v.startswith('<invalid') for v in acts.values()):
            raise OracleError(f'state-action set contains an invalid action id: {acts}')
        out[nfa.index(enc.decode_state(asg)), nfa.joint_index(acts)] = True
    return out


def symbolic_triples(nfa: ExplicitNfa, ts) -> set:
    """``(state, input, next)`` triples of the monolithic relation of ``ts``."""
    enc = ts.enc
    t = ts.monolithic()
    out = set()
    for asg in ts.bdd.enumerate_sat(t, enc.cur_vars + enc.sys_vars + enc.next_vars):
        acts = enc.decode_actions(asg)
        if any(v.startswith('<invalid') for v in acts.values()):
            raise OracleError(f'relation contains an invalid action id: {acts}')
        s = nfa.index(enc.decode_state(asg))
        d = nfa.index(enc.decode_state(asg, primed=True))
        out.add((s, nfa.joint_index(acts), d))
    return out
