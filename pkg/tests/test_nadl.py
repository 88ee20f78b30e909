import pytest

from nadlplan.nadl import (Bin, Const, Ite, NadlError, Not, Prop, Rel, desugar_ite,
                           format_domain, format_formula, parse, parse_formula, validate,
                           format_violations, VarDecl)

ROBOT_BABY = """\
variables
  nat(4) pos
  bool robot_works
system
  agt: Robot
    Lift-Block
      con: pos
      pre: pos < 3
      eff: robot_works -> pos' = pos + 1, pos' = pos
    Lower-Block
      con: pos
      pre: pos > 0
      eff: robot_works -> pos' = pos - 1, pos' = pos
environment
  agt: Baby
    Hit-Robot
      con: robot_works
      pre: true
      eff: ~robot_works => ~robot_works'
initially
  pos = 0 /\\ robot_works
goal
  pos = 3
"""

ROBOT_BABY_GLYPHS = """
variables
  nat(4) pos
  bool robot_works
system
  agt: Robot
    Lift-Block
      con: pos
      pre: pos < 3
      eff: robot_works → pos' = pos + 1, pos' = pos
    Lower-Block
      con: pos
      pre: pos > 0
      eff: robot_works → pos' = pos - 1, pos' = pos
environment
  agt: Baby
    Hit-Robot
      con: robot_works
      pre: true
      eff: ¬robot_works ⇒ ¬robot_works'
initially
  pos = 0 ∧ robot_works
goal
  pos = 3
"""


def test_robot_baby_shape():
    dd = parse(ROBOT_BABY)
    assert dd.num_vars == {'pos': 3}
    assert dd.var('pos').size == 4
    assert dd.prop_vars == ['robot_works']
    assert [a.name for a in dd.system] == ['Robot']
    assert [a.name for a in dd.system[0].actions] == ['Lift-Block', 'Lower-Block']
    assert [a.name for a in dd.environment] == ['Baby']
    assert [a.name for a in dd.environment[0].actions] == ['Hit-Robot']
    assert validate(dd) == []


def test_glyph_syntax_matches_ascii():
    assert parse(ROBOT_BABY_GLYPHS) == parse(ROBOT_BABY)


def test_safety_fragment_is_four_way_disjunction():
    decls = [VarDecl(f'okh{i}', 'bool') for i in range(1, 5)]
    f = parse_formula('(okh1 \\ / okh2 \\ / okh3 \\ / okh4)', decls)
    atoms = []

    def walk(n):
        if isinstance(n, Bin):
            assert n.op == 'or'
            walk(n.left)
            walk(n.right)
        else:
            atoms.append(n)
    walk(f)
    assert atoms == [Prop(f'okh{i}') for i in range(1, 5)]
    assert parse_formula('okh1 \\/ okh2 \\/ okh3 \\/ okh4', decls) == f


def test_missing_goal_section():
    text = ROBOT_BABY[:ROBOT_BABY.index('goal')]
    with pytest.raises(NadlError) as exc:
        parse(text)
    assert exc.value.code == 'syntax'
    assert "'goal'" in exc.value.message
    assert str(exc.value).startswith('ERROR ')


@pytest.mark.parametrize('text, code', [
    (ROBOT_BABY.replace('pre: pos < 3', 'pre: pos < 3 $'), 'lexical'),
    (ROBOT_BABY.replace('pre: pos < 3', 'pre: height < 3'), 'unknown-variable'),
    (ROBOT_BABY.replace('bool robot_works', 'bool robot_works\n  bool pos'), 'duplicate-name'),
    (ROBOT_BABY.replace('Lower-Block', 'Lift-Block'), 'duplicate-name'),
    (ROBOT_BABY.replace('agt: Baby', 'agt: Robot'), 'duplicate-name'),
    (ROBOT_BABY.replace('pre: pos < 3', 'pre: pos < 3 < 4'), 'syntax'),
    (ROBOT_BABY.replace('pre: pos < 3', 'pre: pos + robot_works'), 'type'),
])
def test_parse_errors_are_located(text, code):
    with pytest.raises(NadlError) as exc:
        parse(text)
    assert exc.value.code == code
    assert exc.value.line > 0 and exc.value.col > 0


def test_error_position():
    with pytest.raises(NadlError) as exc:
        parse(ROBOT_BABY.replace('pre: pos < 3', 'pre: height < 3'))
    assert (exc.value.line, exc.value.col) == (8, 12)


def test_validate_overlap():
    dd = parse(ROBOT_BABY.replace('con: robot_works', 'con: robot_works, pos'))
    codes = [v.code for v in validate(dd)]
    assert codes == ['env-system-overlap']


def test_validate_primed_outside_constrained_set():
    dd = parse(ROBOT_BABY.replace('      con: pos\n      pre: pos < 3',
                                  '      con:\n      pre: pos < 3', 1))
    vs = validate(dd)
    assert [v.code for v in vs] == ['primed-unconstrained']
    assert 'pos' in vs[0].message
    assert format_violations(vs).startswith('ERROR 6:5 primed-unconstrained')


def test_validate_other_violations():
    text = (ROBOT_BABY.replace('nat(4) pos', 'nat(4) pos\n  nat(1) tiny')
            .replace('pre: pos > 0', "pre: pos' > 0")
            .replace('pos - 1', 'pos * 2')
            .replace('  pos = 3\n', "  pos' = 3\n")
            .replace('environment\n  agt: Baby', 'environment\n  agt: Idle\n  agt: Baby'))
    codes = sorted(v.code for v in validate(parse(text)))
    assert codes == ['empty-agent', 'primed-in-state-formula', 'primed-in-state-formula',
                     'range', 'unsupported-operator']
    dd = parse(text)
    assert validate(dd) == validate(dd)


@pytest.mark.parametrize('src, expect', [
    ('a \\/ b /\\ c', Bin('or', Prop('a'), Bin('and', Prop('b'), Prop('c')))),
    ('a /\\ b -> c, a', Ite(Bin('and', Prop('a'), Prop('b')), Prop('c'), Prop('a'))),
    ('a => b => c', Bin('implies', Prop('a'), Bin('implies', Prop('b'), Prop('c')))),
    ('~a /\\ b', Bin('and', Not(Prop('a')), Prop('b'))),
    ('a <=> b \\/ c', Bin('iff', Prop('a'), Bin('or', Prop('b'), Prop('c')))),
    ('a -> b, c -> a, b', Ite(Prop('a'), Prop('b'), Ite(Prop('c'), Prop('a'), Prop('b')))),
])
def test_precedence(src, expect):
    decls = [VarDecl(n, 'bool') for n in 'abc']
    assert parse_formula(src, decls) == expect


def test_arith_precedence_and_hyphen_names():
    decls = [VarDecl('x', 'nat', 8), VarDecl('y-z', 'nat', 8)]
    f = parse_formula("x' = x - y-z + 1", decls)
    assert isinstance(f, Rel)
    assert format_formula(f) == "x' = ((x - y-z) + 1)"


def test_round_trip():
    dd = parse(ROBOT_BABY)
    text = format_domain(dd)
    again = parse(text)
    assert again == dd
    assert format_domain(again) == text


def test_round_trip_with_nesting():
    decls = [VarDecl(n, 'bool') for n in 'abcd'] + [VarDecl('n', 'nat', 5)]
    for src in ['~(n = 2) /\\ (a -> b, c -> d, ~a)', '~~a', '(a -> (b -> c, d), a) <=> ~(b \\/ c)',
                'n + 1 - 2 >= n']:
        f = parse_formula(src, decls)
        assert parse_formula(format_formula(f), decls) == f


def test_desugar_ite():
    a, b, c, d, e = (Prop(n) for n in 'abcde')
    assert desugar_ite(Ite(a, b, c)) == Bin('or', Bin('and', a, b), Bin('and', Not(a), c))
    nested = desugar_ite(Ite(a, Ite(b, c, d), e))
    inner = Bin('or', Bin('and', b, c), Bin('and', Not(b), d))
    assert nested == Bin('or', Bin('and', a, inner), Bin('and', Not(a), e))
    assert desugar_ite(Const(True)) == Const(True)
