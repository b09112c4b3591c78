"""
Grid states
===========

The ideal grid state turns the likelihood into a lattice of spikes with
spacing sqrt(2 pi).  For a narrow prior only the central spike matters and
the displacement is pinned almost exactly.
"""
from dispest import GkpFilter, posterior_summary
from dispest.filters import gkp_s_max

for v in (0.1, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0):
    s = posterior_summary(v, GkpFilter())
    print(f"v={v:4.2f}  v'={s.v_prime:.3e}   lattice terms per axis: {2 * gkp_s_max(v) + 1}")

# Off-centre outcomes split the weight between neighbouring spikes.
for y in (0.0, 0.6, 1.2533):
    print(f"y=({y}, 0)  v' = {posterior_summary(1.0, GkpFilter(), (y, 0.0)).v_prime:.4f}")
