"""
How much loss can a single photon take?
=======================================

Loss mixes vacuum into the photon, ``(1-l)|1><1| + l|0><0|``, on both the
probe and the ancilla.  We look for the largest ``l`` at which some prior
variance still beats each reference curve.
"""
from dispest import gaussian_bound
from dispest.sweeps import loss_margin, loss_threshold, lossy_vp

for l in (0.0, 0.05, 0.1, 0.3):
    print(f"l={l:4.2f}  v'(v=1) = {lossy_vp(l, 1.0):.5f}   (Gaussian bound {gaussian_bound(1.0)})")

# The margin vp/bound - 1, minimised over v, changes sign at the threshold.
for l in (0.08, 0.09, 0.1):
    m, where = loss_margin(l)
    print(f"l={l:4.2f}  best relative margin {m:+.2e} at v={where:.3f}")

for bound in ("gaussian", "classical"):
    t = loss_threshold(bound)
    print(f"{bound:>9} threshold: l = {t.l_max:.4f} (+/- {t.resolution:.0e})")

# Against the coherent-state curve the margin only closes as v -> 0, so the
# best v drifts towards zero as l approaches one half.
for l in (0.3, 0.45, 0.49):
    m, where = loss_margin(l, "classical")
    print(f"l={l:4.2f}  classical margin {m:+.2e} at v={where:.2e}")
