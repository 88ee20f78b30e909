"""Semantic checks on a parsed domain."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

from .syntax import ArithOp, DomainDescription, Pos, SUPPORTED_ARITH_OPS, subterms, variables


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    pos: Optional[Pos] = None

    def __str__(self):
        line, col = (self.pos.line, self.pos.col) if self.pos else (0, 0)
        return f'ERROR {line}:{col} {self.code} {self.message}'


def _operators(node, where: str, out: List[Violation]):
    for n in subterms(node):
        if isinstance(n, ArithOp) and n.op not in SUPPORTED_ARITH_OPS:
            out.append(Violation('unsupported-operator',
                                 f"unsupported operator '{n.op}' in {where}", n.pos))


def _state_formula(node, where: str, pos, out: List[Violation]):
    primed = sorted(variables(node, primed=True))
    if primed:
        out.append(Violation('primed-in-state-formula',
                             f"{where} mentions next-state variable(s) {', '.join(primed)}", pos))


def validate(dd: DomainDescription) -> List[Violation]:
    """All violations in ``dd``, in source order of discovery; empty means ok."""
    out: List[Violation] = []
    for v in dd.variables:
        if v.kind == 'nat' and v.size < 2:
            out.append(Violation('range', f'nat({v.size}) {v.name} needs a range of at least 2 values', v.pos))
    for ag in dd.agents:
        if not ag.actions:
            out.append(Violation('empty-agent', f'agent {ag.name} has no actions', ag.pos))
        for a in ag.actions:
            _state_formula(a.pre, f'precondition of {a.name}', getattr(a.pre, 'pos', None) or a.pos, out)
            outside = sorted(variables(a.eff, primed=True) - set(a.con))
            if outside:
                out.append(Violation('primed-unconstrained',
                                     f"effect of {a.name} mentions primed variable(s) "
                                     f"{', '.join(outside)} outside its constrained set", a.pos))
            _operators(a.pre, f'precondition of {a.name}', out)
            _operators(a.eff, f'effect of {a.name}', out)
    sys_con = {}
    for ag in dd.system:
        for a in ag.actions:
            for name in a.con:
                sys_con.setdefault(name, a.name)
    for ag in dd.environment:
        for a in ag.actions:
            for name, p in zip(a.con, a.con_pos or [a.pos] * len(a.con)):
                if name in sys_con:
                    out.append(Violation('env-system-overlap',
                                         f'{name} is constrained by environment action {a.name} '
                                         f'and system action {sys_con[name]}', p))
    _state_formula(dd.init, 'initial condition', getattr(dd.init, 'pos', None), out)
    _state_formula(dd.goal, 'goal condition', getattr(dd.goal, 'pos', None), out)
    _operators(dd.init, 'initial condition', out)
    _operators(dd.goal, 'goal condition', out)
    return out


def format_violations(violations: List[Violation]) -> str:
    return ''.join(f'{v}\n' for v in violations)
