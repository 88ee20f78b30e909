import numpy as np
import pytest

from nadlplan.domains import beam_walk, domain1, domain2, generate, robot_baby
from nadlplan.encoder import encode_domain
from nadlplan.nadl import load_domain
from nadlplan.oracle import (INF, INF_D, LengthProfile, OracleError, evaluate_plan, expand,
                             oracle_plan, oracle_preimages, sa_matrix, state_mask)
from nadlplan.planning import (OPTIMISTIC, STRONG, STRONG_CYCLIC, plan, strong_preimage_sa,
                               weak_preimage_sa)


def adjacency(nfa):
    """``{(state values, joint action): {successor values}}`` with states as tuples."""
    out = {}
    for s, i, d in nfa.triples():
        key = (tuple(nfa.values(s).values()), nfa.sys_joints[i])
        out.setdefault(key, set()).add(tuple(nfa.values(d).values()))
    return out


def robot_baby_by_hand():
    adj = {}
    for pos in range(4):
        for rw in (0, 1):
            if pos < 3:
                adj[((pos, rw), ('Lift-Block',))] = {(pos + 1, 0), (pos + 1, 1)} if rw else {(pos, 0)}
            if pos > 0:
                adj[((pos, rw), ('Lower-Block',))] = {(pos - 1, 0), (pos - 1, 1)} if rw else {(pos, 0)}
    return adj


def beam_walk_by_hand(n):
    adj = {}
    for up in (0, 1):
        for pos in range(n):
            if up and pos == n - 1:
                continue
            if up:
                nxt = {(0, pos + 1), (1, pos + 1)}
            elif pos == 0:
                nxt = {(1, 0)}
            else:
                nxt = {(0, pos - 1)}
            adj[((up, pos), ('walk',))] = nxt
    return adj


def domain_by_hand(n, dead_end):
    adj = {}
    for s in range(n):
        adj[((s,), ('solid',))] = {(s + 1,), (s,)} if dead_end else {(s + 1,)}
    adj[((0,), ('dashed',))] = {(0,), (n,), (n + 1,)} if dead_end else {(0,), (n,)}
    return adj


def test_robot_baby_nfa():
    nfa = expand(load_domain(robot_baby()))
    assert nfa.n_states == 8
    assert nfa.n_inputs == 2
    assert adjacency(nfa) == robot_baby_by_hand()


@pytest.mark.parametrize('n', [2, 4, 9, 16])
def test_beam_walk_nfa(n):
    nfa = expand(load_domain(beam_walk(n)))
    assert nfa.n_states == 2 * n
    assert adjacency(nfa) == beam_walk_by_hand(n)


@pytest.mark.parametrize('n', [2, 4, 8])
def test_domain_nfas(n):
    assert adjacency(expand(load_domain(domain1(n)))) == domain_by_hand(n, False)
    assert adjacency(expand(load_domain(domain2(n)))) == domain_by_hand(n, True)


def test_domain2_dead_end_reachable_by_dashed():
    nfa = expand(load_domain(domain2(4)))
    adj = adjacency(nfa)
    assert (5,) in adj[((0,), ('dashed',))]
    assert not any(s == (5,) for s, _ in adj)


def test_empty_environment_inputs_are_system_joints():
    nfa = expand(load_domain(domain1(3)))
    assert nfa.env_joints == [()]
    assert nfa.n_inputs == len(nfa.sys_joints) == 2


def test_dump_lines():
    nfa = expand(load_domain(robot_baby()))
    lines = nfa.dump()
    assert len(lines) == len(nfa.triples()) == 18
    assert 'pos=0,robot_works=1 Lift-Block pos=1,robot_works=0' in lines


def test_weak_and_strong_extremes():
    nfa = expand(load_domain(robot_baby()))
    weak, strong = oracle_preimages(nfa, np.ones(nfa.n_states, bool))
    applicable = np.zeros_like(weak)
    applicable[nfa.src, nfa.inp] = True
    assert (weak == applicable).all() and (strong == applicable).all()


def test_symbolic_agreement_power_plant():
    dd = load_domain(generate('power-plant', h=2, t=2))
    nfa = expand(dd)
    ts = encode_domain(dd)
    V = nfa.goal.copy()
    Vs = ts.goal
    for _ in range(3):
        weak, strong = oracle_preimages(nfa, V)
        assert (sa_matrix(nfa, ts, weak_preimage_sa(ts, Vs)) == weak).all()
        assert (sa_matrix(nfa, ts, strong_preimage_sa(ts, Vs)) == strong).all()
        V = V | weak.any(axis=1)
        Vs = Vs | ts.bdd.exists(weak_preimage_sa(ts, Vs), ts.enc.sys_vars)
        assert (state_mask(nfa, ts, Vs) == V).all()


@pytest.mark.parametrize('text,verdicts', [
    (robot_baby(), (False, False, True)),
    (domain2(3), (False, True, True)),
    (domain1(3), (True, True, True)),
])
def test_oracle_verdicts(text, verdicts):
    nfa = expand(load_domain(text))
    got = tuple(oracle_plan(nfa, a).success for a in (STRONG, STRONG_CYCLIC, OPTIMISTIC))
    assert got == verdicts


def profile(text, algorithm):
    dd = load_domain(text)
    nfa = expand(dd)
    ts = encode_domain(dd)
    out = plan(ts, algorithm)
    start = int(np.nonzero(nfa.init)[0][0])
    return out.success, evaluate_plan(nfa, sa_matrix(nfa, ts, out.plan.sa), [start])[start]


def test_table_domain1():
    assert profile(domain1(5), STRONG) == (True, LengthProfile(5, 5))
    assert profile(domain1(5), STRONG_CYCLIC) == (True, LengthProfile(5, 5))
    assert profile(domain1(5), OPTIMISTIC) == (True, LengthProfile(1, INF))


def test_table_domain2():
    assert not profile(domain2(5), STRONG)[0]
    assert profile(domain2(5), STRONG_CYCLIC) == (True, LengthProfile(5, INF))
    assert profile(domain2(5), OPTIMISTIC) == (True, LengthProfile(1, INF_D))


def test_profile_text():
    assert str(LengthProfile(1, INF_D)) == 'best 1 worst INF_D'
    assert str(LengthProfile(5, 5)) == 'best 5 worst 5'


def test_goal_start_has_zero_length():
    nfa = expand(load_domain(domain1(3)))
    sa = np.zeros((nfa.n_states, nfa.n_inputs), bool)
    assert evaluate_plan(nfa, sa, [nfa.index({'s': 3})]) == {3: LengthProfile(0, 0)}


def test_uncovered_start_is_dead_end():
    nfa = expand(load_domain(robot_baby()))
    sa = np.zeros((nfa.n_states, nfa.n_inputs), bool)
    s = nfa.index({'pos': 0, 'robot_works': 0})
    assert evaluate_plan(nfa, sa, [s])[s] == LengthProfile(INF, INF_D)


def test_strong_plan_worst_case_is_finite():
    for text in (domain1(6), beam_walk(3).replace('up /\\ pos = 0\n', 'up /\\ pos = 1\n')):
        dd = load_domain(text)
        nfa = expand(dd)
        ex = oracle_plan(nfa, STRONG)
        if not ex.success:
            continue
        for p in evaluate_plan(nfa, ex.sa).values():
            assert isinstance(p.worst, int)


def test_too_many_states():
    with pytest.raises(OracleError):
        expand(load_domain(generate('power-plant', h=4, t=4)))
