"""Syntax trees for NADL domain descriptions."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple, Union


@dataclass(frozen=True)
class Pos:
    line: int
    col: int

    def __str__(self):
        return f'{self.line}:{self.col}'


def _pos():
    return field(default=None, compare=False, repr=False)


# -- arithmetic expressions ----------------------------------------------

@dataclass(frozen=True)
class Num:
    value: int
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class NumVar:
    name: str
    primed: bool = False
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class ArithOp:
    op: str  # '+', '-', '*', '/', 'mod'
    left: 'Arith'
    right: 'Arith'
    pos: Optional[Pos] = _pos()


Arith = Union[Num, NumVar, ArithOp]

ARITH_OPS = ('+', '-', '*', '/', 'mod')
SUPPORTED_ARITH_OPS = ('+', '-')


# -- formulas ------------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: bool
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Prop:
    name: str
    primed: bool = False
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Rel:
    op: str  # '<', '>', '<=', '>=', '=', '!='
    left: Arith
    right: Arith
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Not:
    arg: 'Formula'
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Bin:
    op: str  # 'and', 'or', 'implies', 'iff'
    left: 'Formula'
    right: 'Formula'
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Ite:
    cond: 'Formula'
    then: 'Formula'
    other: 'Formula'
    pos: Optional[Pos] = _pos()


Formula = Union[Const, Prop, Rel, Not, Bin, Ite]

REL_OPS = ('<', '>', '<=', '>=', '=', '!=')
BOOL_OPS = ('and', 'or', 'implies', 'iff')


def conj(*fs: Formula) -> Formula:
    if not fs:
        return Const(True)
    out = fs[0]
    for f in fs[1:]:
        out = Bin('and', out, f)
    return out


def disj(*fs: Formula) -> Formula:
    if not fs:
        return Const(False)
    out = fs[0]
    for f in fs[1:]:
        out = Bin('or', out, f)
    return out


def subterms(node) -> Iterator:
    """Every node of a formula or arithmetic tree, parents first."""
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        if isinstance(n, (ArithOp, Rel, Bin)):
            stack.append(n.right)
            stack.append(n.left)
        elif isinstance(n, Not):
            stack.append(n.arg)
        elif isinstance(n, Ite):
            stack.extend((n.other, n.then, n.cond))


def variables(node, primed: Optional[bool] = None) -> set:
    """Names of state variables occurring in ``node``.

    With ``primed`` given, only occurrences with that priming count.
    """
    return {n.name for n in subterms(node)
            if isinstance(n, (Prop, NumVar)) and (primed is None or n.primed == primed)}


def desugar_ite(f: Formula) -> Formula:
    """Replace every ``c -> t, e`` by ``(c /\\ t) \\/ (~c /\\ e)``, outermost first."""
    if isinstance(f, Ite):
        c = desugar_ite(f.cond)
        return Bin('or', Bin('and', c, desugar_ite(f.then), pos=f.pos),
                   Bin('and', Not(c, pos=f.pos), desugar_ite(f.other), pos=f.pos), pos=f.pos)
    if isinstance(f, Not):
        return Not(desugar_ite(f.arg), pos=f.pos)
    if isinstance(f, Bin):
        return Bin(f.op, desugar_ite(f.left), desugar_ite(f.right), pos=f.pos)
    return f


# -- domain --------------------------------------------------------------

@dataclass
class VarDecl:
    name: str
    kind: str  # 'bool' or 'nat'
    size: int = 2  # number of values; nat(k) ranges over 0..k-1
    pos: Optional[Pos] = _pos()

    @property
    def top(self) -> int:
        """Largest value, the ``t_v`` of ``{0..t_v}``."""
        return self.size - 1


@dataclass
class Action:
    name: str
    con: Tuple[str, ...]
    pre: Formula
    eff: Formula
    pos: Optional[Pos] = _pos()
    con_pos: Tuple[Pos, ...] = field(default=(), compare=False, repr=False)


@dataclass
class Agent:
    name: str
    actions: List[Action]
    pos: Optional[Pos] = _pos()


@dataclass
class DomainDescription:
    """A parsed domain: state variables, agents with actions, init and goal."""

    variables: List[VarDecl]
    system: List[Agent]
    environment: List[Agent]
    init: Formula
    goal: Formula

    @property
    def prop_vars(self) -> List[str]:
        return [v.name for v in self.variables if v.kind == 'bool']

    @property
    def num_vars(self) -> Dict[str, int]:
        """Numerical variables mapped to their largest value."""
        return {v.name: v.top for v in self.variables if v.kind == 'nat'}

    @property
    def agents(self) -> List[Agent]:
        return self.system + self.environment

    @property
    def actions(self) -> List[Action]:
        return [a for ag in self.agents for a in ag.actions]

    def var(self, name: str) -> VarDecl:
        for v in self.variables:
            if v.name == name:
                return v
        raise KeyError(name)

    def agent_of(self, action: str) -> Agent:
        for ag in self.agents:
            if any(a.name == action for a in ag.actions):
                return ag
        raise KeyError(action)

    def is_environment(self, agent: str) -> bool:
        return any(ag.name == agent for ag in self.environment)


# -- printing ------------------------------------------------------------

_REL_TEXT = {'<': '<', '>': '>', '<=': '<=', '>=': '>=', '=': '=', '!=': '!='}
_BOOL_TEXT = {'and': '/\\', 'or': '\\/', 'implies': '=>', 'iff': '<=>'}


def format_arith(e: Arith) -> str:
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, NumVar):
        return e.name + ("'" if e.primed else '')
    return f'({format_arith(e.left)} {e.op} {format_arith(e.right)})'


def format_formula(f: Formula) -> str:
    """ASCII text for ``f``; binary operators are fully parenthesized."""
    if isinstance(f, Const):
        return 'true' if f.value else 'false'
    if isinstance(f, Prop):
        return f.name + ("'" if f.primed else '')
    if isinstance(f, Rel):
        return f'{format_arith(f.left)} {_REL_TEXT[f.op]} {format_arith(f.right)}'
    if isinstance(f, Not):
        return f'~{_atomic(f.arg)}'
    if isinstance(f, Bin):
        return f'({format_formula(f.left)} {_BOOL_TEXT[f.op]} {format_formula(f.right)})'
    if isinstance(f, Ite):
        return f'({format_formula(f.cond)} -> {format_formula(f.then)}, {format_formula(f.other)})'
    raise TypeError(f'not a formula: {f!r}')


def _atomic(f: Formula) -> str:
    s = format_formula(f)
    if isinstance(f, Rel):
        return f'({s})'
    return s


def format_domain(dd: DomainDescription) -> str:
    lines = ['variables']
    for v in dd.variables:
        lines.append(f'  bool {v.name}' if v.kind == 'bool' else f'  nat({v.size}) {v.name}')

    def agents(title, group):
        lines.append(title)
        for ag in group:
            lines.append(f'  agt: {ag.name}')
            for a in ag.actions:
                lines.append(f'    {a.name}')
                lines.append(f'      con: {", ".join(a.con)}')
                lines.append(f'      pre: {format_formula(a.pre)}')
                lines.append(f'      eff: {format_formula(a.eff)}')

    agents('system', dd.system)
    if dd.environment:
        agents('environment', dd.environment)
    lines.append('initially')
    lines.append(f'  {format_formula(dd.init)}')
    lines.append('goal')
    lines.append(f'  {format_formula(dd.goal)}')
    return '\n'.join(lines) + '\n'
