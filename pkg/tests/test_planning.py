import pytest

from nadlplan.domains import beam_walk, domain1, domain2, generate, gripper, movie, robot_baby
from nadlplan.encoder import allocate, build_transition, encode_domain
from nadlplan.nadl import load_domain
from nadlplan.planning import (OPTIMISTIC, STRONG, STRONG_CYCLIC, SequentialPlanError,
                               closed_subset, extract_actions, image, is_deterministic, plan,
                               sequential_plan, states_of, strong_preimage_sa, weak_preimage_sa)

# Two boolean state bits and one action bit.  With the goal at x1=0, x2=1
# the pairs that may reach it are (00, a1), (10, a0) and (11, a0).
FOUR_STATES = """\
variables
  bool x1, x2
system
  agt: Agent
    a0
      con: x1, x2
      pre: x1 \\/ x2
      eff: (~x1 /\\ x2) -> x1', ~x1'
    a1
      con: x1, x2
      pre: ~x1
      eff: x2 -> x1', ~x1'
initially true
goal ~x1 /\\ x2
"""

# One action.  g=0 is the goal; a1..a3 (1..3) lead to g, b=4 goes to a1 or
# c=5, c goes back to b, and d=6 goes to c.
LAYERS = """\
variables
  nat(7) s
system
  agt: Agent
    step
      con: s
      eff: (s = 1 \\/ s = 2 \\/ s = 3) -> s' = 0,
           (s = 4 -> s' = 1 \\/ s' = 5,
           (s = 5 -> s' = 4, (s = 6 -> s' = 5, s' = s)))
initially s = 6
goal s = 0
"""


def system(text, mode='partitioned', budget=10):
    return encode_domain(load_domain(text), mode=mode, budget=budget)


def cube(ts, **values):
    return ts.enc.state_cube(values)


def states(ts, f):
    enc = ts.enc
    return sorted(tuple(enc.decode_state(a).values()) for a in ts.bdd.enumerate_sat(f, enc.cur_vars))


def rules(ts, sa):
    enc = ts.enc
    out = []
    for a in ts.bdd.enumerate_sat(sa, enc.cur_vars + enc.sys_vars):
        acts = tuple(enc.decode_actions(a).values())
        out.append((tuple(enc.decode_state(a).values()), acts[0] if len(acts) == 1 else acts))
    return sorted(out)


def test_four_state_weak_preimage():
    ts = system(FOUR_STATES)
    P1 = weak_preimage_sa(ts, cube(ts, x1=0, x2=1))
    assert rules(ts, P1) == [((0, 0), 'a1'), ((1, 0), 'a0'), ((1, 1), 'a0')]
    assert states(ts, states_of(ts, P1)) == [(0, 0), (1, 0), (1, 1)]


def test_preimage_of_nothing():
    ts = system(FOUR_STATES)
    assert weak_preimage_sa(ts, ts.bdd.ZERO).is_zero
    assert states_of(ts, ts.bdd.ZERO).is_zero


def test_states_of_is_idempotent():
    ts = system(FOUR_STATES)
    s = states_of(ts, weak_preimage_sa(ts, cube(ts, x1=0, x2=1)))
    assert states_of(ts, s) == s


def test_layers_strong_then_weak():
    ts = system(LAYERS)
    pre1 = strong_preimage_sa(ts, ts.goal) & ~ts.goal
    assert [s for s, _ in rules(ts, pre1)] == [(1,), (2,), (3,)]
    V = ts.goal | states_of(ts, pre1)
    assert (strong_preimage_sa(ts, V) & ~V).is_zero
    assert not (weak_preimage_sa(ts, V) & ~V).is_zero


def test_layers_strong_cyclic_sequence():
    ts = system(LAYERS)
    out = plan(ts, STRONG_CYCLIC)
    assert out.success
    added = [states(ts, b & ~a) for a, b in zip(out.plan.visited, out.plan.visited[1:])]
    assert added == [[(1,), (2,), (3,)], [(4,), (5,)], [(6,)]]
    assert not plan(ts, STRONG).success


def test_strong_preimage_needs_applicability():
    ts = system(FOUR_STATES)
    sp = strong_preimage_sa(ts, ts.valid)
    assert sp == weak_preimage_sa(ts, ts.valid)
    assert rules(ts, sp) == [((0, 0), 'a1'), ((0, 1), 'a0'), ((0, 1), 'a1'),
                            ((1, 0), 'a0'), ((1, 1), 'a0')]


def test_robot_baby_strong_layers():
    ts = system(robot_baby())
    # a working robot at pos 2 reaches pos 3 whatever the baby does
    first = strong_preimage_sa(ts, ts.goal) & ~ts.goal
    assert rules(ts, first) == [((2, 1), 'Lift-Block')]
    V = ts.goal | states_of(ts, first)
    # from pos 1 the baby may break the robot on the way to pos 2
    assert (strong_preimage_sa(ts, V) & ~V).is_zero


def test_robot_baby_verdicts():
    ts = system(robot_baby())
    assert not plan(ts, STRONG).success
    assert not plan(ts, STRONG_CYCLIC).success
    out = plan(ts, OPTIMISTIC)
    assert out.success
    works = [((p, 1), 'Lift-Block') for p in range(3)]
    assert rules(ts, out.plan.sa) == works
    assert extract_actions(ts, out.plan.sa, {'pos': 0, 'robot_works': 1}) == [{'Robot': 'Lift-Block'}]


def test_goal_covers_init():
    ts = system(robot_baby().replace('pos = 0 /\\ robot_works', 'pos = 3'))
    for alg in (STRONG, STRONG_CYCLIC, OPTIMISTIC):
        out = plan(ts, alg)
        assert out.success and out.plan.iterations == 0 and out.plan.sa.is_zero


@pytest.mark.parametrize('n', [2, 3, 5, 8])
def test_domain1_optimistic(n):
    ts = system(domain1(n))
    out = plan(ts, OPTIMISTIC)
    assert out.success
    assert rules(ts, out.plan.sa) == [((0,), 'dashed'), ((n - 1,), 'solid')]


def test_domain1_strong():
    ts = system(domain1(5))
    out = plan(ts, STRONG)
    assert out.success
    assert rules(ts, out.plan.sa) == [((k,), 'solid') for k in range(5)]
    assert out.plan.iterations == 5


def test_domain2_strong_cyclic():
    ts = system(domain2(5))
    assert not plan(ts, STRONG).success
    out = plan(ts, STRONG_CYCLIC)
    assert out.success
    assert rules(ts, out.plan.sa) == [((k,), 'solid') for k in range(5)]


def test_domain2_small():
    ts = system(domain2(3))
    assert not plan(ts, STRONG).success
    assert plan(ts, STRONG_CYCLIC).success
    assert plan(system(domain1(3)), STRONG).success


def test_beam_walk():
    assert not plan(system(beam_walk(4)), STRONG).success
    ts = system(beam_walk(8))
    out = plan(ts, STRONG_CYCLIC)
    assert out.success
    assert out.plan.covered == ts.valid
    assert out.plan.covered_count() == 16


def test_image():
    ts = system(robot_baby())
    start = cube(ts, pos=0, robot_works=1)
    lift = ts.enc.action_cube('Lift-Block')
    assert states(ts, image(ts, start, lift)) == [(1, 0), (1, 1)]
    assert image(ts, ts.bdd.ZERO).is_zero


def test_image_inverts_weak_preimage():
    ts = system(beam_walk(4))
    for a in ts.bdd.enumerate_sat(ts.valid, ts.enc.cur_vars):
        s = ts.bdd.cube(a)
        succ = image(ts, s)
        if succ.is_zero:
            continue
        pre = states_of(ts, weak_preimage_sa(ts, succ))
        assert not (pre & s).is_zero
        for b in ts.bdd.enumerate_sat(ts.valid & ~succ, ts.enc.cur_vars):
            assert (states_of(ts, weak_preimage_sa(ts, ts.bdd.cube(b))) & s).is_zero


def test_closed_subset_drops_leaking_rules():
    ts = system(LAYERS)
    V = ts.goal | cube(ts, s=1) | cube(ts, s=2) | cube(ts, s=3)
    b = weak_preimage_sa(ts, V) & ~V
    assert closed_subset(ts, V, b).is_zero
    bc = b | (weak_preimage_sa(ts, V | states_of(ts, b)) & cube(ts, s=5))
    assert states(ts, states_of(ts, closed_subset(ts, V, bc))) == [(4,), (5,)]


def test_failed_plan_keeps_partial_rules():
    ts = system(generate('obstacle', n=1))
    out = plan(ts, OPTIMISTIC)
    assert not out.success and out.reason == 'no-optimistic-plan'
    assert out.message == 'No optimistic plan exists'
    covered_init = ts.bdd.count_sat(out.plan.covered & ts.init, ts.enc.cur_vars)
    # the obstacle sitting on the goal cell makes 31 initial states hopeless
    assert covered_init == 992 - 31


def test_iteration_cap():
    out = plan(system(domain1(5)), STRONG, cap=2)
    assert not out.success and out.reason == 'iteration-cap'


def test_stats_callback():
    seen = []
    out = plan(system(domain1(4)), STRONG, on_iteration=seen.append)
    assert [s.iteration for s in seen] == [1, 2, 3, 4]
    assert all(s.new_states == 1 for s in seen)
    assert str(seen[0]).startswith('iter 1 new_states 1 plan_nodes ')
    assert out.plan.stats == seen


def test_strong_plan_is_sound():
    # from every rule, all outcomes stay within the plan's visited states
    for text in (domain1(6), generate('power-plant', h=1, t=1)):
        ts = system(text)
        out = plan(ts, STRONG)
        if not out.success:
            continue
        V = out.plan.covered
        assert (strong_preimage_sa(ts, V) & out.plan.sa) == out.plan.sa


def test_strong_cyclic_is_closed():
    ts = system(beam_walk(6))
    out = plan(ts, STRONG_CYCLIC)
    sa = out.plan.sa
    leak = weak_preimage_sa(ts, ts.valid & ~out.plan.covered) & sa
    assert leak.is_zero


def test_rule_states_are_disjoint_from_goal():
    ts = system(beam_walk(6))
    for alg in (STRONG_CYCLIC, OPTIMISTIC):
        assert (plan(ts, alg).plan.states & ts.goal).is_zero


@pytest.mark.parametrize('problem,length', [(1, 11), (2, 17)])
def test_gripper_sequential(problem, length):
    ts = system(gripper(problem))
    out = plan(ts, OPTIMISTIC)
    start = ts.enc.decode_state(ts.bdd.pick(ts.init, ts.enc.cur_vars))
    assert len(sequential_plan(ts, out.plan.sa, start)) == length


def test_movie_sequential():
    ts = system(movie(2))
    out = plan(ts, OPTIMISTIC)
    start = ts.enc.decode_state(ts.bdd.pick(ts.init, ts.enc.cur_vars))
    steps = sequential_plan(ts, out.plan.sa, start)
    assert len(steps) == 7
    names = [s['Watcher'] for s in steps]
    assert names.index('rewind-movie') < names.index('reset-counter')


def test_sequential_from_goal_is_empty():
    ts = system(domain1(3))
    out = plan(ts, STRONG)
    assert sequential_plan(ts, out.plan.sa, {'s': 3}, check=False) == []


def test_sequential_rejects_nondeterminism():
    ts = system(robot_baby())
    assert not is_deterministic(ts)
    out = plan(ts, OPTIMISTIC)
    with pytest.raises(SequentialPlanError):
        sequential_plan(ts, out.plan.sa, {'pos': 0, 'robot_works': 1})


def test_monolithic_matches_partitioned_nodes():
    dd = load_domain(beam_walk(5))
    enc = allocate(dd)
    plans = [plan(build_transition(dd, enc, m, b), STRONG_CYCLIC).plan
             for m, b in [('monolithic', 10), ('partitioned', 1), ('partitioned', 3)]]
    assert len({p.sa for p in plans}) == 1
    assert len({p.iterations for p in plans}) == 1
