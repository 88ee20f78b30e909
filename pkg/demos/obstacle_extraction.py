"""
Sequential plans from a universal plan
======================================

A robot on a 32 cell grid must reach the top right corner, with one
obstacle somewhere.  Configurations with the obstacle on the goal cannot be
solved, so the plan covers only part of the initial states.  For any
covered configuration a sequential plan is read off quickly.
"""

import random
import time

import numpy as np

from nadlplan import encode_domain, generate, load_domain, plan, sequential_plan

ts = encode_domain(load_domain(generate('obstacle', n=1)))
out = plan(ts, 'optimistic')
bdd, enc = ts.bdd, ts.enc
print(out.message, '(partial plan kept)')
print('initial states', bdd.count_sat(ts.init, enc.cur_vars),
      'covered', bdd.count_sat(ts.init & out.plan.covered, enc.cur_vars))

starts = [enc.decode_state(a) for a in bdd.enumerate_sat(ts.init & out.plan.covered, enc.cur_vars)]
rows = []
for s in random.Random(0).sample(starts, 50):
    t0 = time.perf_counter()
    steps = sequential_plan(ts, out.plan.sa, s, check=False)
    rows.append((len(steps), time.perf_counter() - t0))

L, T = np.array(rows).T
slope, icpt = np.polyfit(L, T, 1)
print(f'extraction time ~ {icpt * 1e3:.3f} ms + {slope * 1e3:.3f} ms per step')
