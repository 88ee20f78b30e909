"""
Best and worst case plan lengths
================================

Two small chains of n + 1 states.  In the first, a shortcut from state 0
either stays or jumps to the goal.  In the second the shortcut may also
fall into a dead end, and the step action may fail to move.
"""

import numpy as np

from nadlplan import encode_domain, generate, load_domain, plan
from nadlplan.oracle import evaluate_plan, expand, sa_matrix

n = 5
for name in ('domain1', 'domain2'):
    dd = load_domain(generate(name, n=n))
    ts = encode_domain(dd)
    nfa = expand(dd)
    start = int(np.nonzero(nfa.init)[0][0])
    for algorithm in ('strong', 'strong-cyclic', 'optimistic'):
        out = plan(ts, algorithm)
        if not out.success:
            print(f'{name} {algorithm:14s} -')
            continue
        prof = evaluate_plan(nfa, sa_matrix(nfa, ts, out.plan.sa), [start])[start]
        print(f'{name} {algorithm:14s} {prof}')

# INF means the plan may loop forever; INF_D means it may reach a state
# from which the goal is unreachable.
