"""Reading and writing universal plans as text.

Layout::

    umop-plan v1
    algorithm <tag>
    outcome success | outcome failure <reason>
    iterations <k>
    vars <count>
    statevar / agent / var lines of the encoding layout
    plan
    node ... / root ... lines of the state-action diagram
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, TextIO

from .bdd import BddError, NodeRef
from .encoder import Encoding, EncodingError
from .planning import PlanOutcome, advice

MAGIC = 'umop-plan v1'


class PlanFileError(Exception):
    pass


@dataclass
class StoredPlan:
    enc: Encoding
    sa: NodeRef
    algorithm: str
    success: bool
    reason: Optional[str]
    iterations: int

    def query(self, state: Mapping[str, int]) -> List[Dict[str, str]]:
        return advice(self.enc, self.sa, state)


def plan_lines(outcome: PlanOutcome) -> List[str]:
    p = outcome.plan
    enc = p.ts.enc
    out = [MAGIC, f'algorithm {p.algorithm}',
           'outcome success' if outcome.success else f'outcome failure {outcome.reason}',
           f'iterations {p.iterations}', f'vars {enc.bdd.num_vars}']
    out += enc.layout_lines()
    out.append('plan')
    out += enc.bdd.dump(p.sa)
    return out


def write_plan(stream: TextIO, outcome: PlanOutcome) -> None:
    stream.write('\n'.join(plan_lines(outcome)) + '\n')


def read_plan(lines: Iterable[str]) -> StoredPlan:
    it = iter(line.rstrip('\n') for line in lines)

    def field(key: str) -> List[str]:
        raw = next(it, None)
        if raw is None:
            raise PlanFileError(f'missing {key!r} line')
        parts = raw.split()
        if not parts or parts[0] != key:
            raise PlanFileError(f'expected {key!r} line, found {raw!r}')
        return parts[1:]

    if next(it, None) != MAGIC:
        raise PlanFileError(f'not a plan file (first line must be {MAGIC!r})')
    algorithm = ' '.join(field('algorithm'))
    outcome = field('outcome')
    if not outcome or outcome[0] not in ('success', 'failure'):
        raise PlanFileError('outcome must be success or failure')
    success = outcome[0] == 'success'
    reason = outcome[1] if not success and len(outcome) > 1 else None
    try:
        iterations = int(field('iterations')[0])
        n = int(field('vars')[0])
    except (IndexError, ValueError):
        raise PlanFileError('malformed header numbers') from None
    layout = []
    for raw in it:
        if raw.strip() == 'plan':
            break
        layout.append(raw)
    else:
        raise PlanFileError("missing 'plan' line")
    try:
        enc = Encoding.from_layout(layout)
        if enc.bdd.num_vars != n:
            raise PlanFileError(f'header says {n} variables, layout has {enc.bdd.num_vars}')
        sa = enc.bdd.load(it)
    except (EncodingError, BddError) as exc:
        raise PlanFileError(str(exc)) from None
    return StoredPlan(enc, sa, algorithm, success, reason, iterations)


def load_plan(path: str) -> StoredPlan:
    with open(path) as fh:
        return read_plan(fh)
