"""Boolean encoding of NADL domains and construction of the transition relation.

Decision variables are laid out as: environment action-id blocks, system
action-id blocks, then the state bits with each current bit directly
followed by its next-state twin.  Action ids are written most significant
bit first; numeric state variables least significant bit first.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .bdd import BddManager, NodeRef
from .nadl.syntax import (Action, ArithOp, Bin, Const, DomainDescription, Ite, Not, Num,
                          NumVar, Prop, Rel, SUPPORTED_ARITH_OPS)


class EncodingError(Exception):
    pass


def bits_for(size: int) -> int:
    """Bits needed for ``size`` distinct codes, i.e. ceil(log2(size))."""
    return max(size - 1, 0).bit_length()


# -- layout --------------------------------------------------------------

@dataclass
class StateVarLayout:
    name: str
    kind: str  # 'bool' or 'nat'
    size: int
    cur: List[int]  # least significant first
    nxt: List[int]


@dataclass
class AgentLayout:
    name: str
    environment: bool
    bits: List[int]  # most significant first
    actions: List[str]


@dataclass
class Encoding:
    """Where every NADL variable and action id lives among the decision variables."""

    bdd: BddManager
    state_vars: Dict[str, StateVarLayout]
    agents: Dict[str, AgentLayout]
    action_id: Dict[str, int] = field(init=False)
    action_agent: Dict[str, str] = field(init=False)

    def __post_init__(self):
        self.action_id = {}
        self.action_agent = {}
        for ag in self.agents.values():
            for i, a in enumerate(ag.actions):
                self.action_id[a] = i
                self.action_agent[a] = ag.name
        self.cur_vars = [b for v in self.state_vars.values() for b in v.cur]
        self.next_vars = [b for v in self.state_vars.values() for b in v.nxt]
        self.sys_vars = [b for ag in self.agents.values() if not ag.environment for b in ag.bits]
        self.env_vars = [b for ag in self.agents.values() if ag.environment for b in ag.bits]
        self.next_to_cur = dict(zip(self.next_vars, self.cur_vars))
        self.cur_to_next = dict(zip(self.cur_vars, self.next_vars))
        self.system_agents = [ag for ag in self.agents.values() if not ag.environment]
        self.env_agents = [ag for ag in self.agents.values() if ag.environment]

    @property
    def num_state_bits(self) -> int:
        return len(self.cur_vars)

    # -- cubes and decoding

    def action_cube(self, action: str) -> NodeRef:
        """``i(agent) = b(action)`` over the agent's id block."""
        ag = self.agents[self.action_agent[action]]
        code = self.action_id[action]
        n = len(ag.bits)
        return self.bdd.cube({b: bool((code >> (n - 1 - k)) & 1) for k, b in enumerate(ag.bits)})

    def joint_action_cube(self, actions: Iterable[str]) -> NodeRef:
        return self.bdd.conjoin(self.action_cube(a) for a in actions)

    def state_assignment(self, values: Mapping[str, int], primed: bool = False) -> Dict[int, bool]:
        out = {}
        for name, lay in self.state_vars.items():
            if name not in values:
                raise EncodingError(f'no value for state variable {name}')
            val = int(values[name])
            if not 0 <= val < lay.size:
                raise EncodingError(f'{name}={val} outside 0..{lay.size - 1}')
            for k, b in enumerate(lay.nxt if primed else lay.cur):
                out[b] = bool((val >> k) & 1)
        extra = set(values) - set(self.state_vars)
        if extra:
            raise EncodingError(f'unknown state variable(s) {", ".join(sorted(extra))}')
        return out

    def state_cube(self, values: Mapping[str, int], primed: bool = False) -> NodeRef:
        return self.bdd.cube(self.state_assignment(values, primed))

    def decode_state(self, assignment: Mapping[int, bool], primed: bool = False) -> Dict[str, int]:
        out = {}
        for name, lay in self.state_vars.items():
            out[name] = sum(1 << k for k, b in enumerate(lay.nxt if primed else lay.cur)
                            if assignment[b])
        return out

    def decode_actions(self, assignment: Mapping[int, bool],
                       agents: Optional[Sequence[AgentLayout]] = None) -> Dict[str, str]:
        out = {}
        for ag in (agents if agents is not None else self.system_agents):
            code = 0
            for b in ag.bits:
                code = (code << 1) | int(assignment[b])
            out[ag.name] = ag.actions[code] if code < len(ag.actions) else f'<invalid {code}>'
        return out

    # -- layout text

    def layout_lines(self) -> List[str]:
        """``statevar``/``agent`` declarations followed by ``var <idx> <role> <name> <bit>`` lines."""
        lines = []
        for v in self.state_vars.values():
            lines.append(f'statevar {v.name} {v.kind} {v.size}')
        for ag in self.agents.values():
            role = 'env' if ag.environment else 'sys'
            lines.append(f'agent {ag.name} {role} {" ".join(ag.actions)}')
        roles = {}
        for ag in self.agents.values():
            n = len(ag.bits)
            for k, b in enumerate(ag.bits):
                roles[b] = ('env-action' if ag.environment else 'sys-action', ag.name, n - 1 - k)
        for v in self.state_vars.values():
            for k, b in enumerate(v.cur):
                roles[b] = ('current', v.name, k)
            for k, b in enumerate(v.nxt):
                roles[b] = ('next', v.name, k)
        for b in range(self.bdd.num_vars):
            role, name, bit = roles[b]
            lines.append(f'var {b} {role} {name} {bit}')
        return lines

    @classmethod
    def from_layout(cls, lines: Iterable[str], bdd: Optional[BddManager] = None) -> 'Encoding':
        """Rebuild an encoding from :meth:`layout_lines` output."""
        decls, agents, bits = [], [], []
        for raw in lines:
            parts = raw.split()
            if not parts:
                continue
            if parts[0] == 'statevar':
                decls.append((parts[1], parts[2], int(parts[3])))
            elif parts[0] == 'agent':
                agents.append((parts[1], parts[2] == 'env', parts[3:]))
            elif parts[0] == 'var':
                bits.append((int(parts[1]), parts[2], parts[3], int(parts[4])))
            else:
                raise EncodingError(f'malformed layout line: {raw!r}')
        n = len(bits)
        if sorted(b[0] for b in bits) != list(range(n)):
            raise EncodingError('layout variable indices must be 0..n-1')
        state = {name: StateVarLayout(name, kind, size, [None] * bits_for(size), [None] * bits_for(size))
                 for name, kind, size in decls}
        ags = {name: AgentLayout(name, env, [None] * bits_for(len(acts)), list(acts))
               for name, env, acts in agents}
        names = [''] * n
        try:
            for idx, role, name, bit in bits:
                if role == 'current':
                    state[name].cur[bit] = idx
                    names[idx] = f'{name}.{bit}'
                elif role == 'next':
                    state[name].nxt[bit] = idx
                    names[idx] = f"{name}'.{bit}"
                else:
                    ag = ags[name]
                    ag.bits[len(ag.bits) - 1 - bit] = idx
                    names[idx] = f'i({name}).{bit}'
        except (KeyError, IndexError):
            raise EncodingError('layout lines are inconsistent') from None
        if any(b is None for v in state.values() for b in v.cur + v.nxt) or \
                any(b is None for ag in ags.values() for b in ag.bits):
            raise EncodingError('layout lines are incomplete')
        if bdd is None:
            bdd = BddManager(n, names=names)
        return cls(bdd, state, ags)


def allocate(dd: DomainDescription, bdd: Optional[BddManager] = None, **manager_args) -> Encoding:
    """Assign decision variables to ``dd`` in the fixed block order."""
    idx = 0
    names: List[str] = []
    agents: Dict[str, AgentLayout] = {}
    for env, group in ((True, dd.environment), (False, dd.system)):
        for ag in group:
            n = bits_for(len(ag.actions))
            agents[ag.name] = AgentLayout(ag.name, env, list(range(idx, idx + n)),
                                          [a.name for a in ag.actions])
            names += [f'i({ag.name}).{n - 1 - k}' for k in range(n)]
            idx += n
    state: Dict[str, StateVarLayout] = {}
    for v in dd.variables:
        n = bits_for(v.size)
        lay = StateVarLayout(v.name, v.kind, v.size, [], [])
        for k in range(n):
            lay.cur.append(idx)
            lay.nxt.append(idx + 1)
            names += [f'{v.name}.{k}', f"{v.name}'.{k}"]
            idx += 2
        state[v.name] = lay
    if bdd is None:
        bdd = BddManager(idx, names=names, **manager_args)
    elif bdd.num_vars != idx:
        raise EncodingError(f'manager has {bdd.num_vars} variables, encoding needs {idx}')
    return Encoding(bdd, state, agents)


# -- arithmetic ----------------------------------------------------------

@dataclass
class BitVector:
    """Binary number as a list of diagrams, least significant bit first."""

    bits: List[NodeRef]
    signed: bool = False

    @property
    def width(self) -> int:
        return len(self.bits)

    def extend(self, width: int) -> 'BitVector':
        if width < self.width:
            raise EncodingError('cannot narrow a bit vector')
        fill = self.bits[-1] if self.signed else self.bits[0].manager.ZERO
        return BitVector(self.bits + [fill] * (width - self.width), self.signed)

    def as_signed(self) -> 'BitVector':
        if self.signed:
            return self
        return BitVector(self.bits + [self.bits[0].manager.ZERO], True)


def constant_vector(bdd: BddManager, value: int, width: Optional[int] = None) -> BitVector:
    if value < 0:
        raise EncodingError('literals are natural numbers')
    if width is None:
        width = max(1, value.bit_length())
    return BitVector([bdd.constant(bool((value >> k) & 1)) for k in range(width)])


def _add_bits(a: List[NodeRef], b: List[NodeRef], carry: NodeRef) -> List[NodeRef]:
    out = []
    for x, y in zip(a, b):
        out.append(x ^ y ^ carry)
        carry = (x & y) | (carry & (x ^ y))
    return out


def add(a: BitVector, b: BitVector) -> BitVector:
    bdd = a.bits[0].manager
    if not a.signed and not b.signed:
        w = max(a.width, b.width) + 1
        return BitVector(_add_bits(a.extend(w).bits, b.extend(w).bits, bdd.ZERO))
    a, b = a.as_signed(), b.as_signed()
    w = max(a.width, b.width) + 1
    return BitVector(_add_bits(a.extend(w).bits, b.extend(w).bits, bdd.ZERO), True)


def sub(a: BitVector, b: BitVector) -> BitVector:
    """Two's complement difference; always signed, so no result aliases another."""
    bdd = a.bits[0].manager
    a, b = a.as_signed(), b.as_signed()
    w = max(a.width, b.width) + 1
    nb = [~x for x in b.extend(w).bits]
    return BitVector(_add_bits(a.extend(w).bits, nb, bdd.ONE), True)


def _align(a: BitVector, b: BitVector) -> Tuple[List[NodeRef], List[NodeRef]]:
    """Equal-width operand lists, with signed operands biased by flipping the sign bit."""
    if not a.signed and not b.signed:
        w = max(a.width, b.width)
        return a.extend(w).bits, b.extend(w).bits
    a, b = a.as_signed(), b.as_signed()
    w = max(a.width, b.width)
    xa, xb = a.extend(w).bits, b.extend(w).bits
    return xa[:-1] + [~xa[-1]], xb[:-1] + [~xb[-1]]


def equal(a: BitVector, b: BitVector) -> NodeRef:
    xa, xb = _align(a, b)
    bdd = xa[0].manager
    return bdd.conjoin(x.iff(y) for x, y in zip(xa, xb))


def less(a: BitVector, b: BitVector) -> NodeRef:
    xa, xb = _align(a, b)
    lt = xa[0].manager.ZERO
    for x, y in zip(xa, xb):
        lt = (~x & y) | (x.iff(y) & lt)
    return lt


def compare(op: str, a: BitVector, b: BitVector) -> NodeRef:
    if op == '=':
        return equal(a, b)
    if op == '!=':
        return ~equal(a, b)
    if op == '<':
        return less(a, b)
    if op == '>':
        return less(b, a)
    if op == '<=':
        return ~less(b, a)
    if op == '>=':
        return ~less(a, b)
    raise EncodingError(f'unknown relation {op!r}')


def var_vector(enc: Encoding, name: str, primed: bool = False) -> BitVector:
    lay = enc.state_vars[name]
    return BitVector([enc.bdd.make_var(b) for b in (lay.nxt if primed else lay.cur)])


def encode_arith(enc: Encoding, e) -> BitVector:
    if isinstance(e, Num):
        return constant_vector(enc.bdd, e.value)
    if isinstance(e, NumVar):
        return var_vector(enc, e.name, e.primed)
    if isinstance(e, ArithOp):
        if e.op not in SUPPORTED_ARITH_OPS:
            raise EncodingError(f"unsupported operator '{e.op}'")
        a, b = encode_arith(enc, e.left), encode_arith(enc, e.right)
        return add(a, b) if e.op == '+' else sub(a, b)
    raise EncodingError(f'not an arithmetic expression: {e!r}')


def encode_formula(enc: Encoding, f) -> NodeRef:
    bdd = enc.bdd
    if isinstance(f, Const):
        return bdd.constant(f.value)
    if isinstance(f, Prop):
        lay = enc.state_vars[f.name]
        return bdd.make_var((lay.nxt if f.primed else lay.cur)[0])
    if isinstance(f, Rel):
        return compare(f.op, encode_arith(enc, f.left), encode_arith(enc, f.right))
    if isinstance(f, Not):
        return ~encode_formula(enc, f.arg)
    if isinstance(f, Bin):
        a, b = encode_formula(enc, f.left), encode_formula(enc, f.right)
        if f.op == 'and':
            return a & b
        if f.op == 'or':
            return a | b
        if f.op == 'implies':
            return a.implies(b)
        if f.op == 'iff':
            return a.iff(b)
        raise EncodingError(f'unknown connective {f.op!r}')
    if isinstance(f, Ite):
        # same function as the desugared (c /\ t) \/ (~c /\ e)
        return bdd.ite(encode_formula(enc, f.cond), encode_formula(enc, f.then),
                       encode_formula(enc, f.other))
    raise EncodingError(f'not a formula: {f!r}')


# -- basic conjuncts -----------------------------------------------------

def range_constraint(enc: Encoding, name: str, primed: bool = False) -> NodeRef:
    """True exactly on the valid codes ``0..size-1`` of a state variable."""
    lay = enc.state_vars[name]
    if lay.size == 1 << len(lay.cur):
        return enc.bdd.ONE
    return less(var_vector(enc, name, primed), constant_vector(enc.bdd, lay.size))


def state_range(enc: Encoding, primed: bool = False) -> NodeRef:
    return enc.bdd.conjoin(range_constraint(enc, n, primed) for n in enc.state_vars)


def id_range(enc: Encoding, agent: str) -> NodeRef:
    ag = enc.agents[agent]
    bdd = enc.bdd
    if len(ag.actions) == 1 << len(ag.bits):
        return bdd.ONE
    vec = BitVector([bdd.make_var(b) for b in reversed(ag.bits)])
    return less(vec, constant_vector(bdd, len(ag.actions)))


@dataclass
class Conjunct:
    kind: str  # 'action', 'id-range', 'frame', 'range', 'interference'
    subject: str  # action, agent or variable name
    rel: NodeRef


def build_action_constraint(dd: DomainDescription, enc: Encoding) -> List[Conjunct]:
    """One ``i(agent)=b(a) => pre /\\ eff`` conjunct per action, plus id-range conjuncts."""
    out = []
    for ag in dd.agents:
        for a in ag.actions:
            body = encode_formula(enc, a.pre) & encode_formula(enc, a.eff)
            out.append(Conjunct('action', a.name, enc.action_cube(a.name).implies(body)))
        r = id_range(enc, ag.name)
        if not r.is_one:
            out.append(Conjunct('id-range', ag.name, r))
    return out


def build_frame(dd: DomainDescription, enc: Encoding) -> List[Conjunct]:
    """Unconstrained variables keep their value: one conjunct per state variable."""
    bdd = enc.bdd
    out = []
    for v in dd.variables:
        lay = enc.state_vars[v.name]
        nobody = bdd.conjoin(~enc.action_cube(a.name) for a in dd.actions if v.name in a.con)
        same = bdd.conjoin(bdd.make_var(c).iff(bdd.make_var(n)) for c, n in zip(lay.cur, lay.nxt))
        out.append(Conjunct('frame', v.name, nobody.implies(same)))
    return out


def build_interference(dd: DomainDescription, enc: Encoding) -> List[Conjunct]:
    """Exclude joint actions of distinct same-side agents with overlapping constrained sets."""
    out = []
    for group in (dd.system, dd.environment):
        for i, ag1 in enumerate(group):
            for ag2 in group[i + 1:]:
                for a1 in ag1.actions:
                    for a2 in ag2.actions:
                        if set(a1.con) & set(a2.con):
                            rel = ~(enc.action_cube(a1.name) & enc.action_cube(a2.name))
                            out.append(Conjunct('interference', f'{a1.name}|{a2.name}', rel))
    return out


def build_ranges(dd: DomainDescription, enc: Encoding) -> List[Conjunct]:
    out = []
    for v in dd.variables:
        for primed in (False, True):
            r = range_constraint(enc, v.name, primed)
            if not r.is_one:
                out.append(Conjunct('range', v.name, r))
    return out


def build_init(dd: DomainDescription, enc: Encoding) -> NodeRef:
    return encode_formula(enc, dd.init) & state_range(enc)


def build_goal(dd: DomainDescription, enc: Encoding) -> NodeRef:
    return encode_formula(enc, dd.goal) & state_range(enc)


# -- transition system ---------------------------------------------------

@dataclass
class Partition:
    rel: NodeRef
    support: FrozenSet[int]
    members: List[str] = field(default_factory=list)


@dataclass
class BasicGroup:
    """Conjuncts that belong together: everything about one state variable, or the rest."""

    name: str
    conjuncts: List[Conjunct]


def basic_groups(dd: DomainDescription, enc: Encoding) -> List[BasicGroup]:
    """Group the conjuncts by the first declared variable an action constrains.

    Each state variable collects its frame and range conjuncts and the
    effect conjuncts of actions whose constrained set starts with it.
    Id-range and interference conjuncts, and actions constraining nothing,
    form a trailing ``misc`` group.
    """
    order = {v.name: i for i, v in enumerate(dd.variables)}
    groups = {v.name: BasicGroup(f'var:{v.name}', []) for v in dd.variables}
    misc = BasicGroup('misc', [])
    actions = {a.name: a for a in dd.actions}
    for c in build_frame(dd, enc) + build_ranges(dd, enc):
        groups[c.subject].conjuncts.append(c)
    for c in build_action_constraint(dd, enc):
        a = actions.get(c.subject) if c.kind == 'action' else None
        if a is not None and a.con:
            groups[min(a.con, key=order.get)].conjuncts.append(c)
        else:
            misc.conjuncts.append(c)
    misc.conjuncts.extend(build_interference(dd, enc))
    out = [g for g in groups.values()]
    if misc.conjuncts:
        out.append(misc)
    return out


class TransitionSystem:
    """Init, goal and a conjunctively partitioned transition relation.

    The relation is over current, next, system-action and environment-action
    variables.  In monolithic mode there is one partition with the
    environment already quantified; in partitioned mode environment
    variables stay free and are quantified during image computations.
    """

    def __init__(self, dd: DomainDescription, enc: Encoding, partitions: List[Partition],
                 mode: str, budget: Optional[int]):
        self.dd = dd
        self.enc = enc
        self.bdd = enc.bdd
        self.partitions = partitions
        self.mode = mode
        self.budget = budget
        self.init = build_init(dd, enc)
        self.goal = build_goal(dd, enc)
        self.valid = state_range(enc)
        self._schedules: Dict[FrozenSet[int], List[FrozenSet[int]]] = {}

    def schedule(self, quantify: Iterable[int]) -> List[FrozenSet[int]]:
        """Variables to quantify right after each partition.

        A variable goes with the last partition mentioning it, or with the
        first partition when none does.
        """
        qs = frozenset(quantify)
        sched = self._schedules.get(qs)
        if sched is None:
            slots: List[set] = [set() for _ in self.partitions]
            for v in qs:
                last = 0
                for k, p in enumerate(self.partitions):
                    if v in p.support:
                        last = k
                slots[last].add(v)
            sched = [frozenset(s) for s in slots]
            self._schedules[qs] = sched
        return sched

    def relprod(self, f: NodeRef, quantify: Iterable[int]) -> NodeRef:
        """``exists quantify . f /\\ T`` following the partition schedule."""
        acc = f
        for p, qs in zip(self.partitions, self.schedule(quantify)):
            acc = self.bdd.and_exists(acc, p.rel, qs)
            if acc.is_zero:
                break
        return acc

    def quantified_vars(self) -> List[int]:
        """Next-state and environment-action variables."""
        return self.enc.next_vars + self.enc.env_vars

    def monolithic(self) -> NodeRef:
        """Single diagram ``exists A_env . /\\ partitions``."""
        return self.bdd.exists(self.bdd.conjoin(p.rel for p in self.partitions), self.enc.env_vars)


def build_transition(dd: DomainDescription, enc: Encoding, mode: str = 'partitioned',
                     budget: int = 10) -> TransitionSystem:
    """Build the transition system in ``'monolithic'`` or ``'partitioned'`` mode."""
    bdd = enc.bdd
    groups = basic_groups(dd, enc)
    if mode == 'monolithic':
        rel = bdd.exists(bdd.conjoin(c.rel for g in groups for c in g.conjuncts), enc.env_vars)
        parts = [Partition(rel, bdd.support(rel), [g.name for g in groups])]
        return TransitionSystem(dd, enc, parts, mode, None)
    if mode != 'partitioned':
        raise EncodingError(f'unknown mode {mode!r}')
    if budget < 1:
        raise EncodingError('partition budget must be positive')
    nxt = set(enc.next_vars)
    rels = []
    for g in groups:
        rel = bdd.conjoin(c.rel for c in g.conjuncts)
        rels.append((len(bdd.support(rel) & nxt), g.name, rel))
    rels.sort(key=lambda t: t[0])  # stable: ties keep declaration order
    parts = []
    for k in range(0, len(rels), budget):
        chunk = rels[k:k + budget]
        rel = bdd.conjoin(r for _, _, r in chunk)
        parts.append(Partition(rel, bdd.support(rel), [name for _, name, _ in chunk]))
    return TransitionSystem(dd, enc, parts, mode, budget)


def encode_domain(dd: DomainDescription, mode: str = 'partitioned', budget: int = 10,
                  **manager_args) -> TransitionSystem:
    return build_transition(dd, allocate(dd, **manager_args), mode, budget)
