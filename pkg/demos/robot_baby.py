"""
A robot, a block and a baby
===========================

The robot lifts a block step by step; the baby may break the robot at any
time.  We plan with all three algorithms and look at what the plan advises.
"""

from nadlplan import encode_domain, generate, load_domain, plan, advice
from nadlplan.oracle import expand

text = generate('robot-baby')
print(text)

# the explicit automaton is small enough to print in full
nfa = expand(load_domain(text))
print('\n'.join(nfa.dump()))

ts = encode_domain(load_domain(text))
for algorithm in ('strong', 'strong-cyclic', 'optimistic'):
    out = plan(ts, algorithm)
    print(f'{algorithm:14s} {out.message}')

# only the optimistic plan exists: keep lifting while the robot works
opt = plan(ts, 'optimistic').plan
for pos in range(4):
    for works in (1, 0):
        print(pos, works, advice(ts.enc, opt.sa, {'pos': pos, 'robot_works': works}))
