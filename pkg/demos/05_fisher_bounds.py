"""
Information bounds for a fixed outcome
======================================

The error after conditioning on one outcome is bounded by a prior term
plus a likelihood term, ``1/v' <= 1/v + F/4``.  ``F`` in turn sits below a
photon-number estimate, so bigger Fock states can help only up to a point.
"""
import numpy as np

from dispest import FockFilter, posterior_summary
from dispest.fock import fock_dm
from dispest.ghosh import fisher_sweep, ghosh_report

v = 1.0
for n in range(4):
    rho = fock_dm(n)
    rep = ghosh_report(v, rho, rho / (2 * np.pi))
    vp = posterior_summary(v, FockFilter(n)).v_prime
    print(f"n={n}: 1/v'={1 / vp:.4f}  1/v+F/4={1 / v + rep.fisher / 4:.4f}  "
          f"F={rep.fisher:.4f} <= {rep.fisher_upper:.4f}  photon bound {rep.photon_bound:.4f}")

# With a narrow prior the gain rises with n, peaks, then falls as the
# outcome probability thins out.
for v in (0.1, 0.5):
    rows = fisher_sweep(v, 30)
    best = max(rows, key=lambda r: r.inv_vp_minus_inv_v)
    print(f"\nv={v}: best n={best.n}, gain {best.inv_vp_minus_inv_v:.3f}")
    for r in rows[::5]:
        print(f"  n={r.n:2d} gain={r.inv_vp_minus_inv_v:8.4f} p_y={r.p_y:.3e}")
