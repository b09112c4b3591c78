"""
Cross-checks
============

Two checks that do not go through the quadrature engine: importance
sampling from the prior, and the two-mode construction showing ``v' >= 1``
at ``v = 2`` for any probe and outcome.
"""
from dispest import FockFilter, posterior_summary
from dispest.oracle import mc_posterior, random_v2_pair, v2_theorem_check

for n in (0, 1, 2):
    exact = posterior_summary(1.0, FockFilter(n)).v_prime
    mc = mc_posterior(1.0, FockFilter(n), n_samples=100_000, seed=n)
    print(f"n={n}: quadrature {exact:.5f}  sampled {mc.v_prime:.5f} +/- {mc.std_err:.5f}")

for seed in range(3):
    same = v2_theorem_check(*random_v2_pair(4, seed))
    diff = v2_theorem_check(*random_v2_pair(4, seed, matched=False))
    print(f"seed {seed}: matched v'={same.vp_sigma:.10f}  mismatched v'={diff.vp_sigma:.5f} "
          f"(direct {diff.vp_direct:.5f})")
