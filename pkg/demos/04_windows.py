"""
Post-selecting on a disc of outcomes
====================================

Instead of a single outcome we accept every result within radius ``r`` of
the origin and average ``v'`` over them.  As ``r`` grows the acceptance
probability goes to one and the average turns into the unconditional error.
"""
import numpy as np

from dispest import FockFilter, gaussian_bound, posterior_summary, vp_bayes, window_scan

f = FockFilter(1)
for v in (0.5, 1.0, 1.5):
    print(f"\nv={v}: unconditional error {vp_bayes(v, f):.5f}, Gaussian bound {gaussian_bound(v):.3f}")
    for w in window_scan(v, f, [0.1, 0.5, 1.0, 2.0, 4.0, 8.0]):
        print(f"  r={w.r:4.1f}  P_sel={w.p_select:.4f}  <v'>={w.avg_vp:.5f}")

# The best single outcome at v = 0.5 sits slightly off centre.
rs = np.linspace(0, 1, 41)
vals = [posterior_summary(0.5, f, (r, 0.0)).v_prime for r in rs]
print(f"\nmin over |y| of v'(y) at v=0.5: {min(vals):.5f} at |y|={rs[int(np.argmin(vals))]:.3f}")
