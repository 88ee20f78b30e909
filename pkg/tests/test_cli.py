import io

import pytest

from nadlplan.cli import main
from nadlplan.domains import generate
from nadlplan.encoder import encode_domain
from nadlplan.nadl import load_domain
from nadlplan.planfile import PlanFileError, load_plan, read_plan, write_plan
from nadlplan.planning import advice, plan


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


@pytest.fixture
def files(tmp_path):
    def make(name, **params):
        path = tmp_path / f'{name}.nadl'
        assert run('gen', name, *[f'{k}={v}' for k, v in params.items()], '-o', str(path))[0] == 0
        return str(path)
    return make


def power_plant_bad_state():
    state = {}
    for i in (1, 2, 3, 4):
        state.update({f'okh{i}': int(i < 3), f'b{i}': 0})
        state.update({f'okt{i}': 1, f's{i}': 0, f'v{i}': 1})
    state.update(p=1, f=2)
    return ','.join(f'{k}={v}' for k, v in state.items())


def test_gen_to_stdout():
    code, text = run('gen', 'domain1', 'n=3')
    assert code == 0
    assert text == generate('domain1', n=3)


def test_robot_baby_exit_codes(files, tmp_path):
    rb = files('robot-baby')
    code, text = run('plan', rb, '-a', 'strong', '-o', str(tmp_path / 's.plan'))
    assert code == 1 and text.strip() == 'No strong plan exists'
    # the partial plan is still written
    assert not load_plan(str(tmp_path / 's.plan')).success
    code, text = run('plan', rb, '-a', 'optimistic')
    assert code == 0
    assert text.startswith('SUCCESS iterations=3 plan_nodes=')
    assert text.rstrip().endswith('covered_states=5')


def test_stats_lines(files):
    code, text = run('plan', files('domain1', n=3), '-a', 'strong', '--stats', '--monolithic')
    lines = text.splitlines()
    assert code == 0
    assert lines[:3] == [l for l in lines[:3] if l.startswith('iter ')]
    assert lines[-1].startswith('SUCCESS iterations=3 ')


def test_power_plant_query(tmp_path):
    out = str(tmp_path / 'pp.plan')
    code, text = run('plan', '--domain', 'power-plant', '--param', 'h=4', '--param', 't=4',
                     '-a', 'optimistic', '-o', out)
    assert code == 0 and 'iterations=1 ' in text
    code, text = run('query', out, '-s', power_plant_bad_state())
    assert code == 0
    assert text.splitlines() == [
        'H1=wait-h1 H2=wait-h2 H3=block-h3 H4=block-h4 T1=wait-t1 T2=wait-t2 T3=wait-t3 '
        'T4=wait-t4 Reactor=set-p-2']


def test_query_goal_and_dead_end(files, tmp_path):
    out = str(tmp_path / 'rb.plan')
    run('plan', files('robot-baby'), '-a', 'optimistic', '-o', out)
    assert run('query', out, '-s', 'pos=3,robot_works=1') == (0, '')
    assert run('query', out, '-s', 'pos=1,robot_works=false') == (0, '')
    assert run('query', out, '-s', 'pos=0,robot_works=true') == (0, 'Robot=Lift-Block\n')


@pytest.mark.parametrize('state', ['pos=0', 'pos=0,robot_works=1,x=2', 'pos=zero,robot_works=1',
                                   'pos', 'pos=9,robot_works=1'])
def test_query_bad_states(files, tmp_path, state):
    out = str(tmp_path / 'rb.plan')
    run('plan', files('robot-baby'), '-a', 'optimistic', '-o', out)
    assert run('query', out, '-s', state)[0] == 2


@pytest.mark.parametrize('name,params,alg', [
    ('beam-walk', dict(n=6), 'strong-cyclic'),
    ('gripper', dict(problem=1), 'optimistic'),
    ('soccer', dict(width=3, height=2, players=2), 'strong-cyclic'),
    ('power-plant', dict(h=2, t=2), 'optimistic'),
])
def test_plan_file_round_trip(name, params, alg):
    ts = encode_domain(load_domain(generate(name, **params)))
    outcome = plan(ts, alg)
    buf = io.StringIO()
    write_plan(buf, outcome)
    stored = read_plan(io.StringIO(buf.getvalue()))
    assert stored.algorithm == alg and stored.success == outcome.success
    assert stored.iterations == outcome.plan.iterations
    enc = ts.enc
    for asg in ts.bdd.enumerate_sat(ts.valid, enc.cur_vars):
        state = enc.decode_state(asg)
        assert stored.query(state) == advice(enc, outcome.plan.sa, state)


def test_bad_plan_files(tmp_path):
    with pytest.raises(PlanFileError):
        read_plan(['hello'])
    with pytest.raises(PlanFileError):
        read_plan(['umop-plan v1', 'algorithm strong', 'outcome maybe'])
    path = tmp_path / 'broken.plan'
    path.write_text('umop-plan v1\nalgorithm strong\noutcome success\niterations 1\nvars 2\n')
    assert run('query', str(path), '-s', 'p=1')[0] == 2


def test_gripper_simulation(tmp_path, files):
    dom = files('gripper', problem=1)
    out = str(tmp_path / 'g.plan')
    code, text = run('plan', dom, '-a', 'deterministic', '-o', out)
    assert code == 0
    assert 'length 11' in text.splitlines()
    start = 'robot=0,' + ','.join(f'ball{i}=0' for i in range(1, 5))
    code, text = run('simulate', out, dom, '-s', start, '--seed', '7')
    lines = text.splitlines()
    assert code == 0
    assert lines[0] == 'seed 7'
    assert sum(l.startswith('step ') for l in lines) == 11
    assert lines[-1] == 'GOAL after 11 steps'


def test_simulation_is_reproducible(tmp_path, files):
    dom = files('beam-walk', n=5)
    out = str(tmp_path / 'b.plan')
    run('plan', dom, '-a', 'strong-cyclic', '-o', out)
    a = run('simulate', out, dom, '-s', 'up=1,pos=0', '--seed', '3')
    b = run('simulate', out, dom, '-s', 'up=1,pos=0', '--seed', '3')
    assert a == b and a[0] == 0
    assert ' env - ' in a[1]


def test_simulation_from_goal(tmp_path, files):
    dom = files('domain1', n=4)
    out = str(tmp_path / 'd.plan')
    run('plan', dom, '-a', 'strong', '-o', out)
    assert run('simulate', out, dom, '-s', 's=4') == (0, 'seed 0\nGOAL after 0 steps\n')


def test_simulation_gap(tmp_path, files):
    dom = files('robot-baby')
    out = str(tmp_path / 'rb.plan')
    run('plan', dom, '-a', 'optimistic', '-o', out)
    code, text = run('simulate', out, dom, '-s', 'pos=0,robot_works=0')
    assert code == 1 and 'GAP' in text.splitlines()[-1]


def test_exhaustive_simulation(tmp_path, files):
    dom = files('domain1', n=5)
    out = str(tmp_path / 'd.plan')
    run('plan', dom, '-a', 'optimistic', '-o', out)
    assert run('simulate', out, dom, '-s', 's=0', '--exhaustive') == (0, 'best 1 worst INF\n')


def test_simulation_rejects_other_domain(tmp_path, files):
    out = str(tmp_path / 'd.plan')
    run('plan', files('domain1', n=5), '-a', 'optimistic', '-o', out)
    assert run('simulate', out, files('domain2', n=5), '-s', 's=0')[0] == 2


def test_deterministic_requires_determinism(files):
    code, text = run('plan', files('robot-baby'), '-a', 'deterministic')
    assert code == 1 and 'not deterministic' in text


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / 'bad.nadl'
    bad.write_text('variables\n  bool p\nsystem\n')
    assert run('plan', str(bad), '-a', 'strong')[0] == 2
    assert capsys.readouterr().err.startswith('ERROR ')


def test_missing_file_exit_code(tmp_path):
    assert run('plan', str(tmp_path / 'none.nadl'), '-a', 'strong')[0] == 3
    assert run('query', str(tmp_path / 'none.plan'), '-s', 'p=1')[0] == 3


def test_unknown_domain_exit_code():
    assert run('gen', 'chess')[0] == 2
    assert run('gen', 'domain1', 'n')[0] == 2


def test_input_source_is_exclusive(files):
    with pytest.raises(SystemExit):
        run('plan', files('domain1', n=3), '--domain', 'domain1', '-a', 'strong')
    with pytest.raises(SystemExit):
        run('plan', '-a', 'strong')
