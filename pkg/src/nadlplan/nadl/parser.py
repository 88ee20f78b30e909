"""Lexer and recursive-descent parser for the ASCII NADL syntax.

Operator priorities, loosest first::

    c -> t, e          if-then-else (right-associative)
    <=>                equivalence
    =>                 implication (right-associative)
    \\/                 disjunction
    /\\                 conjunction
    ~                  negation
    < > <= >= = !=     relations between arithmetic expressions
    + -                additive
    * / mod            multiplicative

Names may contain inner hyphens (``Lift-Block``, ``set-p-2``), so a minus
sign right after a name needs surrounding spaces: ``pos - 1``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Set

from .syntax import (Action, Agent, ArithOp, Bin, Const, DomainDescription, Ite, Not,
                     Num, NumVar, Pos, Prop, Rel, VarDecl)


class NadlError(Exception):
    """A located problem in NADL input."""

    def __init__(self, message: str, line: int = 0, col: int = 0, code: str = 'syntax'):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col
        self.code = code

    def __str__(self):
        return f'ERROR {self.line}:{self.col} {self.code} {self.message}'


KEYWORDS = {'variables', 'nat', 'bool', 'system', 'environment', 'initially', 'goal',
            'true', 'false', 'mod'}

_UNICODE = {'¬': '~', '∧': '/\\', '∨': '\\/', '⇒': '=>', '⇔': '<=>', '→': '->',
            '≤': '<=', '≥': '>=', '≠': '!='}

_TOKEN_RE = re.compile(r'''
    (?P<newline>\n)
  | (?P<skip>[ \t\r]+)
  | (?P<comment>%[^\n]*)
  | (?P<label>(?:agt|con|pre|eff)[ \t]*:)
  | (?P<num>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*(?:-[A-Za-z0-9_]+)*)
  | (?P<orop>\\[ \t]*/)
  | (?P<op><=>|=>|->|/\\|<=|>=|!=|[<>=~+\-*/(),'])
  | (?P<uni>[¬∧∨⇒⇔→≤≥≠])
  | (?P<bad>.)
''', re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # 'label', 'num', 'name', 'kw', 'op', 'eof'
    text: str
    line: int
    col: int

    @property
    def pos(self) -> Pos:
        return Pos(self.line, self.col)


def tokenize(text: str) -> List[Token]:
    tokens = []
    line, line_start = 1, 0
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        value = m.group()
        col = m.start() - line_start + 1
        if kind == 'newline':
            line += 1
            line_start = m.end()
        elif kind in ('skip', 'comment'):
            continue
        elif kind == 'bad':
            raise NadlError(f'unexpected character {value!r}', line, col, 'lexical')
        elif kind == 'label':
            tokens.append(Token('label', value.split(':')[0].strip(), line, col))
        elif kind == 'orop':
            tokens.append(Token('op', '\\/', line, col))
        elif kind == 'uni':
            tokens.append(Token('op', _UNICODE[value], line, col))
        elif kind == 'name' and value in KEYWORDS:
            tokens.append(Token('kw', value, line, col))
        else:
            tokens.append(Token(kind, value, line, col))
    tokens.append(Token('eof', '', line, len(text) - line_start + 1))
    return tokens


_REL = {'<', '>', '<=', '>=', '=', '!='}
_FORMULA = (Const, Prop, Rel, Not, Bin, Ite)
_ARITH = (Num, NumVar, ArithOp)


class Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0
        self.vars: Dict[str, VarDecl] = {}

    # -- token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        if t.kind != 'eof':
            self.i += 1
        return t

    def at(self, kind: str, text: Optional[str] = None) -> bool:
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def at_op(self, *ops: str) -> bool:
        return self.tok.kind == 'op' and self.tok.text in ops

    def accept(self, kind: str, text: Optional[str] = None) -> Optional[Token]:
        if self.at(kind, text):
            return self.advance()
        return None

    def error(self, message: str, tok: Optional[Token] = None, code: str = 'syntax') -> NadlError:
        t = tok or self.tok
        return NadlError(message, t.line, t.col, code)

    def expect(self, kind: str, text: Optional[str] = None, what: Optional[str] = None) -> Token:
        if self.at(kind, text):
            return self.advance()
        want = what or (repr(text) if text else kind)
        found = 'end of input' if self.tok.kind == 'eof' else repr(self.tok.text)
        raise self.error(f'expected {want}, found {found}')

    # -- domain structure

    def parse_domain(self) -> DomainDescription:
        self.expect('kw', 'variables', "section 'variables'")
        variables = []
        while self.at('kw', 'bool') or self.at('kw', 'nat'):
            variables.extend(self.parse_decl())
        self.expect('kw', 'system', "section 'system'")
        seen_agents: Dict[str, Token] = {}
        seen_actions: Dict[str, Token] = {}
        system = self.parse_agents(seen_agents, seen_actions)
        if not system:
            raise self.error("section 'system' needs at least one agent 'agt:'")
        environment: List[Agent] = []
        if self.accept('kw', 'environment'):
            environment = self.parse_agents(seen_agents, seen_actions)
        self.expect('kw', 'initially', "section 'initially'")
        init = self.parse_formula()
        self.expect('kw', 'goal', "section 'goal'")
        goal = self.parse_formula()
        self.expect('eof', what='end of input')
        return DomainDescription(variables, system, environment, init, goal)

    def parse_decl(self) -> List[VarDecl]:
        t = self.advance()
        if t.text == 'bool':
            kind, size = 'bool', 2
        else:
            self.expect('op', '(')
            size = int(self.expect('num', what='range size').text)
            self.expect('op', ')')
            kind = 'nat'
        out = []
        while True:
            nt = self.expect('name', what='variable name')
            if nt.text in self.vars:
                raise self.error(f'duplicate variable {nt.text!r}', nt, 'duplicate-name')
            d = VarDecl(nt.text, kind, size, pos=nt.pos)
            self.vars[nt.text] = d
            out.append(d)
            if not self.accept('op', ','):
                break
        return out

    def parse_agents(self, seen_agents, seen_actions) -> List[Agent]:
        agents = []
        while self.at('label', 'agt'):
            start = self.advance()
            nt = self.expect('name', what='agent name')
            if nt.text in seen_agents:
                raise self.error(f'duplicate agent {nt.text!r}', nt, 'duplicate-name')
            seen_agents[nt.text] = nt
            actions = []
            while self.at('name'):
                actions.append(self.parse_action(seen_actions))
            agents.append(Agent(nt.text, actions, pos=start.pos))
        return agents

    def parse_action(self, seen_actions) -> Action:
        nt = self.advance()
        if nt.text in seen_actions:
            raise self.error(f'duplicate action {nt.text!r}', nt, 'duplicate-name')
        seen_actions[nt.text] = nt
        con: List[str] = []
        con_pos: List[Pos] = []
        pre = eff = None
        if self.accept('label', 'con'):
            if self.at('name'):
                while True:
                    vt = self.expect('name', what='variable name')
                    if vt.text not in self.vars:
                        raise self.error(f'unknown variable {vt.text!r}', vt, 'unknown-variable')
                    if vt.text in con:
                        raise self.error(f'variable {vt.text!r} listed twice', vt, 'duplicate-name')
                    con.append(vt.text)
                    con_pos.append(vt.pos)
                    if not self.accept('op', ','):
                        break
        if self.accept('label', 'pre'):
            pre = self.parse_formula()
        if self.accept('label', 'eff'):
            eff = self.parse_formula()
        return Action(nt.text, tuple(con), pre if pre is not None else Const(True),
                      eff if eff is not None else Const(True), pos=nt.pos,
                      con_pos=tuple(con_pos))

    # -- expressions

    def parse_formula(self):
        start = self.tok
        node = self.parse_ite()
        if not isinstance(node, _FORMULA):
            raise self.error('expected a formula, found an arithmetic expression', start, 'type')
        return node

    def _need_formula(self, node, tok: Token):
        if not isinstance(node, _FORMULA):
            raise self.error('expected a formula, found an arithmetic expression', tok, 'type')
        return node

    def _need_arith(self, node, tok: Token):
        if not isinstance(node, _ARITH):
            raise self.error('expected an arithmetic expression, found a formula', tok, 'type')
        return node

    def parse_ite(self):
        start = self.tok
        cond = self.parse_iff()
        if self.at_op('->'):
            arrow = self.advance()
            self._need_formula(cond, start)
            t_tok = self.tok
            then = self._need_formula(self.parse_ite(), t_tok)
            self.expect('op', ',', "',' of if-then-else")
            e_tok = self.tok
            other = self._need_formula(self.parse_ite(), e_tok)
            return Ite(cond, then, other, pos=arrow.pos)
        return cond

    def _binary(self, sub, ops: Dict[str, str], right_assoc: bool = False):
        start = self.tok
        left = sub()
        while self.at_op(*ops):
            op_tok = self.advance()
            self._need_formula(left, start)
            r_tok = self.tok
            if right_assoc:
                right = self._binary(sub, ops, True)
            else:
                right = sub()
            self._need_formula(right, r_tok)
            left = Bin(ops[op_tok.text], left, right, pos=op_tok.pos)
            if right_assoc:
                break
        return left

    def parse_iff(self):
        return self._binary(self.parse_implies, {'<=>': 'iff'})

    def parse_implies(self):
        return self._binary(self.parse_or, {'=>': 'implies'}, right_assoc=True)

    def parse_or(self):
        return self._binary(self.parse_and, {'\\/': 'or'})

    def parse_and(self):
        return self._binary(self.parse_not, {'/\\': 'and'})

    def parse_not(self):
        if self.at_op('~'):
            t = self.advance()
            a_tok = self.tok
            return Not(self._need_formula(self.parse_not(), a_tok), pos=t.pos)
        return self.parse_rel()

    def parse_rel(self):
        start = self.tok
        left = self.parse_sum()
        if self.at_op(*_REL):
            op = self.advance()
            self._need_arith(left, start)
            r_tok = self.tok
            right = self._need_arith(self.parse_sum(), r_tok)
            if self.at_op(*_REL):
                raise self.error('relations do not chain; add parentheses')
            return Rel(op.text, left, right, pos=op.pos)
        return left

    def parse_sum(self):
        start = self.tok
        left = self.parse_product()
        while self.at_op('+', '-'):
            op = self.advance()
            self._need_arith(left, start)
            r_tok = self.tok
            right = self._need_arith(self.parse_product(), r_tok)
            left = ArithOp(op.text, left, right, pos=op.pos)
        return left

    def parse_product(self):
        start = self.tok
        left = self.parse_primary()
        while self.at_op('*', '/') or self.at('kw', 'mod'):
            op = self.advance()
            self._need_arith(left, start)
            r_tok = self.tok
            right = self._need_arith(self.parse_primary(), r_tok)
            left = ArithOp(op.text, left, right, pos=op.pos)
        return left

    def parse_primary(self):
        t = self.tok
        if t.kind == 'num':
            self.advance()
            return Num(int(t.text), pos=t.pos)
        if t.kind == 'kw' and t.text in ('true', 'false'):
            self.advance()
            return Const(t.text == 'true', pos=t.pos)
        if t.kind == 'name':
            self.advance()
            primed = bool(self.accept('op', "'"))
            decl = self.vars.get(t.text)
            if decl is None:
                raise self.error(f'unknown variable {t.text!r}', t, 'unknown-variable')
            if decl.kind == 'bool':
                return Prop(t.text, primed, pos=t.pos)
            return NumVar(t.text, primed, pos=t.pos)
        if self.at_op('('):
            self.advance()
            node = self.parse_ite()
            self.expect('op', ')')
            return node
        found = 'end of input' if t.kind == 'eof' else repr(t.text)
        raise self.error(f'expected an expression, found {found}')


def parse(text: str) -> DomainDescription:
    """Parse NADL source text; raises :class:`NadlError` with a location."""
    return Parser(text).parse_domain()


def parse_formula(text: str, variables: List[VarDecl]) -> object:
    """Parse a standalone formula over the given declarations."""
    p = Parser(text)
    p.vars = {v.name: v for v in variables}
    node = p.parse_formula()
    p.expect('eof', what='end of input')
    return node
