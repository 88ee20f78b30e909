"""Generators for NADL text of the benchmark domains."""
from __future__ import annotations

import inspect
from typing import Callable, Dict, List


class DomainParamError(ValueError):
    pass


def _need(cond: bool, message: str) -> None:
    if not cond:
        raise DomainParamError(message)


def _conj(parts: List[str]) -> str:
    return ' /\\ '.join(parts) if parts else 'true'


def _disj(parts: List[str]) -> str:
    return ' \\/ '.join(parts) if parts else 'false'


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


def robot_baby() -> str:
    return ROBOT_BABY


def domain1(n: int = 5) -> str:
    """States 0..n. ``solid`` steps forward; ``dashed`` from 0 either stays or jumps to n."""
    _need(n >= 2, 'domain1 needs n >= 2')
    return f"""\
variables
  nat({n + 1}) s
system
  agt: Agent
    solid
      con: s
      pre: s < {n}
      eff: s' = s + 1
    dashed
      con: s
      pre: s = 0
      eff: s' = 0 \\/ s' = {n}
initially
  s = 0
goal
  s = {n}
"""


def domain2(n: int = 5) -> str:
    """Like domain1, but ``solid`` may stay put and ``dashed`` may reach dead end n+1."""
    _need(n >= 2, 'domain2 needs n >= 2')
    return f"""\
variables
  nat({n + 2}) s
system
  agt: Agent
    solid
      con: s
      pre: s < {n}
      eff: s' = s + 1 \\/ s' = s
    dashed
      con: s
      pre: s = 0
      eff: s' = 0 \\/ s' = {n} \\/ s' = {n + 1}
initially
  s = 0
goal
  s = {n}
"""


def beam_walk(n: int = 8) -> str:
    """Walk a beam of n positions; a step on the beam may fall to the ground below.

    On the ground the agent walks back to position 0 and climbs up again.
    """
    _need(n >= 2, 'beam-walk needs n >= 2')
    last = n - 1
    return f"""\
variables
  bool up
  nat({n}) pos
system
  agt: Walker
    walk
      con: up, pos
      pre: ~(up /\\ pos = {last})
      eff: up -> pos' = pos + 1,
           (pos = 0 -> up' /\\ pos' = 0, ~up' /\\ pos' = pos - 1)
initially
  up /\\ pos = 0
goal
  up /\\ pos = {last}
"""


def gripper(problem: int = 1) -> str:
    """Move all balls from room A (0) to room B (1); grippers are ball values 2 and 3."""
    _need(problem >= 1, 'gripper problem numbers start at 1')
    balls = [f'ball{i}' for i in range(1, 4 + 2 * (problem - 1) + 1)]
    lines = ['variables', '  nat(2) robot']
    lines += [f'  nat(4) {b}' for b in balls]
    lines += ['system', '  agt: Robot',
              '    move-A-B', '      con: robot', '      pre: robot = 0', "      eff: robot' = 1",
              '    move-B-A', '      con: robot', '      pre: robot = 1', "      eff: robot' = 0"]
    for b in balls:
        for g, side in ((2, 'left'), (3, 'right')):
            free = [f'{o} != {g}' for o in balls if o != b]
            lines += [f'    pick-{b}-{side}', f'      con: {b}',
                      f'      pre: {_conj([f"{b} = robot"] + free)}',
                      f"      eff: {b}' = {g}"]
    for b in balls:
        for g, side in ((2, 'left'), (3, 'right')):
            lines += [f'    drop-{b}-{side}', f'      con: {b}',
                      f'      pre: {b} = {g}', f"      eff: {b}' = robot"]
    lines += ['initially', '  ' + _conj(['robot = 0'] + [f'{b} = 0' for b in balls]),
              'goal', '  ' + _conj([f'{b} = 1' for b in balls])]
    return '\n'.join(lines) + '\n'


MOVIE_FOODS = ('chips', 'dip', 'pop', 'cheese', 'crackers')


def movie(objects: int = 5) -> str:
    """Get one object of each food, rewind the movie, then reset the counter.

    A food variable holds the number of the object taken (0 for none).
    Rewinding disturbs the counter, and resetting only zeroes it once the
    movie is rewound, which forces rewind before reset.
    """
    _need(objects >= 1, 'movie needs at least one object per food')
    lines = ['variables']
    lines += [f'  nat({objects + 1}) {f}' for f in MOVIE_FOODS]
    lines += ['  bool rewound', '  nat(256) counter', 'system', '  agt: Watcher']
    for f in MOVIE_FOODS:
        for j in range(1, objects + 1):
            lines += [f'    get-{f}-{j}', f'      con: {f}', f"      eff: {f}' = {j}"]
    lines += ['    rewind-movie', '      con: rewound, counter',
              "      eff: rewound' /\\ counter' = 1",
              '    reset-counter', '      con: counter',
              "      eff: rewound -> counter' = 0, counter' = counter"]
    lines += ['initially', '  ' + _conj([f'{f} = 0' for f in MOVIE_FOODS]
                                        + ['~rewound', 'counter = 1']),
              'goal', '  ' + _conj([f'{f} > 0' for f in MOVIE_FOODS]
                                   + ['rewound', 'counter = 0'])]
    return '\n'.join(lines) + '\n'


def power_plant_goal(h: int, t: int) -> str:
    H, T = range(1, h + 1), range(1, t + 1)
    parts = [f"({_disj([f'okh{i}' for i in H])})",
             f"({_disj([f'okt{i}' for i in T])})"]
    parts += [f'(~okh{i} => b{i})' for i in H]
    parts += [f'(~okt{i} => s{i})' for i in T]
    parts += ['p = f']
    parts += [f'(okt{i} => v{i})' for i in T]
    return _conj(parts)


def power_plant(h: int = 4, t: int = 4) -> str:
    """Heat exchangers, turbines and a reactor, each unit run by its own agent.

    A single environment agent may fail any working unit and keeps failed
    units failed.  Initial states are the bad states: not good, not failed,
    with positive demand and production.
    """
    _need(h >= 1 and t >= 1, 'power-plant needs at least one heat exchanger and turbine')
    H, T = range(1, h + 1), range(1, t + 1)
    lines = ['variables']
    lines += [f'  bool okh{i}, b{i}' for i in H]
    lines += [f'  bool okt{i}, s{i}, v{i}' for i in T]
    lines += ['  nat(4) p, f', 'system']
    for i in H:
        lines += [f'  agt: H{i}',
                  f'    block-h{i}', f'      con: b{i}', f'      pre: ~okh{i} /\\ ~b{i}',
                  f"      eff: b{i}'",
                  f'    wait-h{i}']
    for i in T:
        lines += [f'  agt: T{i}',
                  f'    stop-t{i}', f'      con: s{i}', f'      pre: ~okt{i} /\\ ~s{i}',
                  f"      eff: s{i}'",
                  f'    open-t{i}', f'      con: v{i}', f'      pre: okt{i} /\\ ~v{i}',
                  f"      eff: v{i}'",
                  f'    wait-t{i}']
    lines += ['  agt: Reactor']
    for k in (1, 2, 3):
        lines += [f'    set-p-{k}', '      con: p', f"      eff: p' = {k}"]
    oks = [f'okh{i}' for i in H] + [f'okt{i}' for i in T]
    lines += ['environment', '  agt: Nature', '    fail',
              f'      con: {", ".join(oks)}',
              '      eff: ' + _conj([f"(~{o} => ~{o}')" for o in oks])]
    good = power_plant_goal(h, t)
    failed = f"~({_disj([f'okh{i}' for i in H])}) \\/ ~({_disj([f'okt{i}' for i in T])})"
    lines += ['initially', f'  ~({good}) /\\ ~({failed}) /\\ f > 0 /\\ p > 0',
              'goal', f'  {good}']
    return '\n'.join(lines) + '\n'


def soccer_goal_cells(w: int, h: int) -> List[int]:
    """Cells of the goal area: the middle row(s) of the rightmost column."""
    rows = [h // 2] if h % 2 else [h // 2 - 1, h // 2]
    return [y * w + (w - 1) for y in rows]


def _grid_moves(var: str, w: int, h: int) -> List[tuple]:
    """(name, precondition, effect) for the four moves on a w x h grid, cell = y*w + x."""
    left = [y * w for y in range(h)]
    right = [y * w + w - 1 for y in range(h)]
    return [
        ('north', f'{var} < {w * (h - 1)}', f"{var}' = {var} + {w}"),
        ('south', f'{var} >= {w}', f"{var}' = {var} - {w}"),
        ('east', _conj([f'{var} != {c}' for c in right]), f"{var}' = {var} + 1"),
        ('west', _conj([f'{var} != {c}' for c in left]), f"{var}' = {var} - 1"),
    ]


def soccer(width: int = 4, height: int = 2, players: int = 1) -> str:
    """Attackers (system) move or pass; defenders (environment) only move.

    With one attacker it always holds the ball; otherwise ``carrier`` names
    the attacker holding it.  Player collisions are not modelled.
    """
    _need(width >= 2 and height >= 1 and players >= 1, 'soccer needs a 2x1 field and a player')
    _need(width * height >= 2, 'soccer field needs at least two cells')
    cells = width * height
    att = [f'a{i}' for i in range(1, players + 1)]
    dfn = [f'd{i}' for i in range(1, players + 1)]
    lines = ['variables', f'  nat({cells}) {", ".join(att + dfn)}']
    if players > 1:
        lines.append(f'  nat({players}) carrier')
    lines.append('system')
    for k, a in enumerate(att):
        lines.append(f'  agt: A{k + 1}')
        for name, pre, eff in _grid_moves(a, width, height):
            if (height == 1 and name in ('north', 'south')):
                continue
            lines += [f'    {a}-{name}', f'      con: {a}', f'      pre: {pre}', f'      eff: {eff}']
        if players > 1:
            for j in range(players):
                if j != k:
                    lines += [f'    {a}-pass-a{j + 1}', '      con: carrier',
                              f'      pre: carrier = {k}', f"      eff: carrier' = {j}"]
    lines.append('environment')
    for k, d in enumerate(dfn):
        lines.append(f'  agt: D{k + 1}')
        for name, pre, eff in _grid_moves(d, width, height):
            if (height == 1 and name in ('north', 'south')):
                continue
            lines += [f'    {d}-{name}', f'      con: {d}', f'      pre: {pre}', f'      eff: {eff}']
    area = soccer_goal_cells(width, height)

    def in_area(v):
        return '(' + _disj([f'{v} = {c}' for c in area]) + ')'
    if players > 1:
        holder = _disj([f'(carrier = {k} /\\ {in_area(a)})' for k, a in enumerate(att)])
    else:
        holder = in_area(att[0])
    goal = _conj([f'({holder})'] + [f'~{in_area(d)}' for d in dfn])
    lines += ['initially', '  true', 'goal', f'  {goal}']
    return '\n'.join(lines) + '\n'


OBSTACLE_W, OBSTACLE_H = 8, 4


def obstacle(n: int = 1) -> str:
    """A robot on an 8 x 4 grid with n static obstacles at unknown positions.

    The goal is the upper right cell; the robot may start anywhere else.
    """
    _need(n >= 0, 'obstacle count must be non-negative')
    w, h = OBSTACLE_W, OBSTACLE_H
    cells = w * h
    goal_cell = cells - 1
    obs = [f'o{i}' for i in range(1, n + 1)]
    lines = ['variables', f'  nat({cells}) robot']
    if obs:
        lines.append(f'  nat({cells}) {", ".join(obs)}')
    lines += ['system', '  agt: Robot']
    step = {'north': f'robot + {w}', 'south': f'robot - {w}', 'east': 'robot + 1',
            'west': 'robot - 1'}
    for name, pre, eff in _grid_moves('robot', w, h):
        clear = [f'{o} != {step[name]}' for o in obs]
        lines += [f'    move-{name}', '      con: robot', f'      pre: {_conj([pre] + clear)}',
                  f'      eff: {eff}']
    lines += ['initially', f'  robot != {goal_cell}', 'goal', f'  robot = {goal_cell}']
    return '\n'.join(lines) + '\n'


GENERATORS: Dict[str, Callable[..., str]] = {
    'robot-baby': robot_baby,
    'beam-walk': beam_walk,
    'domain1': domain1,
    'domain2': domain2,
    'gripper': gripper,
    'movie': movie,
    'power-plant': power_plant,
    'soccer': soccer,
    'obstacle': obstacle,
}


def parameters(name: str) -> Dict[str, int]:
    """Parameter names of a generator with their defaults."""
    sig = inspect.signature(GENERATORS[name])
    return {p.name: p.default for p in sig.parameters.values()}


def generate(name: str, **params: int) -> str:
    try:
        gen = GENERATORS[name]
    except KeyError:
        raise DomainParamError(f'unknown domain {name!r}; choose from {", ".join(GENERATORS)}') from None
    known = parameters(name)
    extra = set(params) - set(known)
    if extra:
        raise DomainParamError(f'{name} has no parameter(s) {", ".join(sorted(extra))}')
    for k, v in params.items():
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise DomainParamError(f'{k} must be a non-negative integer')
    return gen(**params)
