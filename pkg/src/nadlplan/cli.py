"""Command line: generate domains, plan, query plans and simulate them.

Exit status: 0 success, 1 planning failure, 2 bad input, 3 I/O error.
"""
from __future__ import annotations

import argparse
import random
import sys
from typing import Dict, List, Optional

from .bdd import BddError
from .domains import DomainParamError, generate
from .encoder import EncodingError, encode_domain
from .nadl import NadlError, format_violations, parse, validate
from .planfile import PlanFileError, StoredPlan, load_plan, write_plan
from .planning import (ALGORITHMS, OPTIMISTIC, SequentialPlanError, is_deterministic, plan,
                       sequential_plan)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_IO = 0, 1, 2, 3


class InputError(Exception):
    pass


def parse_params(items: List[str]) -> Dict[str, int]:
    out = {}
    for item in items:
        key, sep, value = item.partition('=')
        if not sep or not key:
            raise InputError(f'parameter {item!r} is not key=value')
        try:
            out[key.strip()] = int(value)
        except ValueError:
            raise InputError(f'parameter {key} needs an integer value') from None
    return out


def parse_state(text: str) -> Dict[str, int]:
    """``"pos=0,robot_works=1"`` to a dict; booleans accept true/false too."""
    out = {}
    for item in filter(None, (s.strip() for s in text.split(','))):
        key, sep, value = item.partition('=')
        if not sep or not key.strip():
            raise InputError(f'malformed state item {item!r}')
        value = value.strip().lower()
        if value in ('true', 'false'):
            out[key.strip()] = int(value == 'true')
            continue
        try:
            out[key.strip()] = int(value)
        except ValueError:
            raise InputError(f'value of {key.strip()} must be an integer') from None
    return out


def read_text(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise OSError(f'cannot read {path}: {exc.strerror}') from None


def load_dd(text: str):
    dd = parse(text)
    problems = validate(dd)
    if problems:
        raise InputError(format_violations(problems).rstrip('\n'))
    return dd


def format_joint(actions: Dict[str, str]) -> str:
    return ' '.join(f'{agent}={act}' for agent, act in actions.items())


def format_state(state: Dict[str, int]) -> str:
    return ','.join(f'{k}={v}' for k, v in state.items())


# -- subcommands ---------------------------------------------------------

def cmd_gen(args, out) -> int:
    text = generate(args.domain, **parse_params(args.params))
    if args.output:
        with open(args.output, 'w') as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_plan(args, out) -> int:
    if args.domain_name:
        text = generate(args.domain_name, **parse_params(args.param or []))
    else:
        text = read_text(args.input)
    dd = load_dd(text)
    mode = 'monolithic' if args.monolithic else 'partitioned'
    ts = encode_domain(dd, mode=mode, budget=args.partition)
    algorithm = OPTIMISTIC if args.algorithm == 'deterministic' else args.algorithm
    if args.algorithm == 'deterministic' and not is_deterministic(ts):
        out.write('Domain is not deterministic\n')
        return EXIT_FAIL
    on_iter = (lambda st: out.write(f'{st}\n')) if args.stats else None
    outcome = plan(ts, algorithm, cap=args.cap, on_iteration=on_iter)
    if args.output:
        with open(args.output, 'w') as fh:
            write_plan(fh, outcome)
    p = outcome.plan
    if not outcome.success:
        out.write(f'{outcome.message}\n')
        return EXIT_FAIL
    out.write(f'SUCCESS iterations={p.iterations} plan_nodes={p.node_count()} '
              f'covered_states={p.covered_count()}\n')
    if args.algorithm == 'deterministic':
        bdd, enc = ts.bdd, ts.enc
        start = bdd.pick(ts.init, enc.cur_vars)
        steps = sequential_plan(ts, p.sa, enc.decode_state(start), check=False)
        out.write(f'length {len(steps)}\n')
        for k, step in enumerate(steps, 1):
            out.write(f'step {k} {format_joint(step)}\n')
    return EXIT_OK


def cmd_query(args, out) -> int:
    stored = load_plan(args.plan)
    for joint in stored.query(parse_state(args.state)):
        out.write(format_joint(joint) + '\n')
    return EXIT_OK


def _check_layout(stored: StoredPlan, ts) -> None:
    if stored.enc.layout_lines() != ts.enc.layout_lines():
        raise InputError('plan file was not made for this domain')


def cmd_simulate(args, out) -> int:
    stored = load_plan(args.plan)
    dd = load_dd(read_text(args.domain))
    ts = encode_domain(dd, mode='partitioned', budget=1 << 30)
    _check_layout(stored, ts)
    sa = ts.bdd.load(stored.enc.bdd.dump(stored.sa))
    start = parse_state(args.start)
    if args.exhaustive:
        from .oracle import evaluate_plan, expand, sa_matrix
        nfa = expand(dd)
        profile = evaluate_plan(nfa, sa_matrix(nfa, ts, sa), [nfa.index(start)])
        out.write(f'{profile[nfa.index(start)]}\n')
        return EXIT_OK
    return _random_trace(ts, sa, start, args.seed, args.steps, out)


def _random_trace(ts, sa, start, seed: int, cap: int, out) -> int:
    bdd, enc = ts.bdd, ts.enc
    rng = random.Random(seed)
    rel = bdd.conjoin(p.rel for p in ts.partitions)
    out.write(f'seed {seed}\n')
    state = dict(start)
    cube = enc.state_cube(state)
    for k in range(cap + 1):
        if not (cube & ts.goal).is_zero:
            out.write(f'GOAL after {k} steps\n')
            return EXIT_OK
        if k == cap:
            break
        choices = list(bdd.enumerate_sat(bdd.let(enc.state_assignment(state), sa), enc.sys_vars))
        if not choices:
            out.write(f'GAP no plan rule for state {format_state(state)}\n')
            return EXIT_FAIL
        act = rng.choice(choices)
        here = bdd.let({**enc.state_assignment(state), **act}, rel)
        outcomes = list(bdd.enumerate_sat(here, enc.env_vars + enc.next_vars))
        if not outcomes:
            out.write(f'GAP advised action has no outcome at {format_state(state)}\n')
            return EXIT_FAIL
        res = rng.choice(outcomes)
        nxt = enc.decode_state(res, primed=True)
        env = format_joint(enc.decode_actions(res, enc.env_agents)) or '-'
        out.write(f'step {k + 1} state {format_state(state)} action {format_joint(enc.decode_actions(act))} '
                  f'env {env} next {format_state(nxt)}\n')
        state = nxt
        cube = enc.state_cube(state)
    out.write(f'CAP reached after {cap} steps\n')
    return EXIT_FAIL


# -- entry point ---------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog='nadlplan', description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest='command', required=True)

    g = sub.add_parser('gen', help='write the NADL text of a benchmark domain')
    g.add_argument('domain')
    g.add_argument('params', nargs='*', metavar='key=value')
    g.add_argument('-o', '--output')
    g.set_defaults(func=cmd_gen)

    p = sub.add_parser('plan', help='synthesize a universal plan')
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument('input', nargs='?', help='NADL file')
    src.add_argument('--domain', dest='domain_name', help='generate this benchmark domain instead')
    p.add_argument('--param', action='append', metavar='key=value',
                   help='generator parameter (with --domain)')
    p.add_argument('-a', '--algorithm', required=True,
                   choices=list(ALGORITHMS) + ['deterministic'])
    part = p.add_mutually_exclusive_group()
    part.add_argument('-p', '--partition', type=int, default=10, metavar='BUDGET',
                      help='basic conjunct groups per partition (default 10)')
    part.add_argument('--monolithic', action='store_true')
    p.add_argument('-o', '--output', help='plan file to write')
    p.add_argument('--stats', action='store_true', help='print one line per iteration')
    p.add_argument('--cap', type=int, help='iteration cap')
    p.set_defaults(func=cmd_plan)

    q = sub.add_parser('query', help='advised joint actions at a state')
    q.add_argument('plan')
    q.add_argument('-s', '--state', required=True, help='var=value,...')
    q.set_defaults(func=cmd_query)

    s = sub.add_parser('simulate', help='execute a plan against a domain')
    s.add_argument('plan')
    s.add_argument('domain')
    s.add_argument('-s', '--start', required=True, help='var=value,...')
    mode = s.add_mutually_exclusive_group()
    mode.add_argument('--seed', type=int, default=0)
    mode.add_argument('--exhaustive', action='store_true',
                      help='best and worst case lengths instead of a random trace')
    s.add_argument('--steps', type=int, default=1000, help='step cap')
    s.set_defaults(func=cmd_simulate)
    return ap


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except NadlError as exc:
        sys.stderr.write(f'{exc}\n')
        return EXIT_INPUT
    except (InputError, DomainParamError, EncodingError, PlanFileError, BddError,
            SequentialPlanError) as exc:
        sys.stderr.write(f'error: {exc}\n')
        return EXIT_INPUT
    except OSError as exc:
        sys.stderr.write(f'error: {exc}\n')
        return EXIT_IO


if __name__ == '__main__':
    sys.exit(main())
