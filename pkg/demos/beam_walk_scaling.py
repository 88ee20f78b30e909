"""
Beam walk: strong cyclic plans
==============================

Every step on the beam may fall to the ground, so no strong plan exists,
but walking back and climbing up again always works eventually.
"""

import time

from nadlplan import encode_domain, generate, load_domain, plan

for n in (4, 16, 64, 256, 1024):
    ts = encode_domain(load_domain(generate('beam-walk', n=n)))
    t0 = time.time()
    out = plan(ts, 'strong-cyclic')
    dt = time.time() - t0
    print(f'n={n:5d} {out.message:8s} covered={out.plan.covered_count():5d} '
          f'nodes={out.plan.node_count():6d} {dt:.2f}s strong={plan(ts, "strong").success}')
