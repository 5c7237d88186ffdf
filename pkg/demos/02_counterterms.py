"""Green's operator counterterms across a closing model-space gap.

Three levels: a Q state at 1, a model state at E - gap and the initial
model state at E.  The bare second-order ladder blows up like 1/gap; the
counterterm removes the singular part and leaves the derivative term
-u w / (E - 1)^2.
"""
import numpy as np

from radrec.fixtures import CountertermToy
from radrec.verify import DEFAULT_GAPS, counterterm_regularity, counterterm_values

with_ct = counterterm_values(DEFAULT_GAPS)
without = counterterm_values(DEFAULT_GAPS, counterterms=False)
print(f"{'gap':>8s} {'G2 (regular)':>14s} {'U2 (bare)':>14s}")
for gap, g, u in zip(DEFAULT_GAPS, with_ct, without):
    print(f"{gap:8.0e} {g.real:14.8f} {u.real:14.4e}")

print(f"analytic limit {CountertermToy(1e-8).limit:.8f}")
r = counterterm_regularity(DEFAULT_GAPS)
d = counterterm_regularity(DEFAULT_GAPS, counterterms=False)
print(r.line())
print(f"bare ladder log-log slope {d.context['slope']:.3f}")
