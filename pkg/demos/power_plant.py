"""
Keeping a power plant safe
==========================

Four heat exchangers, four turbines and a reactor, each run by its own
agent, while the environment may fail any unit.  The state space has 2^24
states, yet one preimage covers every bad state.
"""

import time

from nadlplan import advice, encode_domain, generate, load_domain, plan

t0 = time.time()
ts = encode_domain(load_domain(generate('power-plant', h=4, t=4)))
out = plan(ts, 'optimistic')
print(out.message, 'after', out.plan.iterations, 'iteration(s),',
      out.plan.node_count(), 'plan nodes,', f'{time.time() - t0:.2f}s')

# heat exchangers 3 and 4 have failed; demand is 2 but the reactor makes 1
state = {}
for i in (1, 2, 3, 4):
    state.update({f'okh{i}': int(i < 3), f'b{i}': 0, f'okt{i}': 1, f's{i}': 0, f'v{i}': 1})
state.update(p=1, f=2)
for joint in advice(ts.enc, out.plan.sa, state):
    print({agent: act for agent, act in joint.items() if not act.startswith('wait')})
