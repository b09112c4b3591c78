"""Golden-value and property checks run by ``dispest validate``."""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .bayes import marginal_py, posterior_summary
from .filters import FockFilter, GaussianFilter, GkpFilter, filter_mass, heterodyne_filter
from .fock import displacement_matrix, fock_dm, lossy_single_photon
from .gaussian import classical_bound, det_inequality_holds, gaussian_bound, pure_gaussian_cov
from .ghosh import (
    appendix_e_limit_product,
    appendix_e_py,
    appendix_e_vp,
    ghosh_report,
)
from .oracle import displacement_oracle, mc_posterior, random_v2_pair, v2_theorem_check
from .sweeps import loss_threshold, lossy_filter

E_GRID_V = (0.25, 0.5, 1.0, 2.0, 4.0)
E_GRID_Q = (0.0, 0.5, 1.0, 2.0)


def mc_benchmarks():
    """``(label, v, filter, y)`` scenarios shared by the Monte-Carlo checks."""
    squeezed = GaussianFilter(pure_gaussian_cov(0.5) + pure_gaussian_cov(2.0))
    return [
        ("vacuum v=1", 1.0, FockFilter(0), (0.0, 0.0)),
        ("n=1 v=1", 1.0, FockFilter(1), (0.0, 0.0)),
        ("n=2 v=0.8 off-centre", 0.8, FockFilter(2), (0.3, -0.2)),
        ("n=3 v=1.5", 1.5, FockFilter(3), (0.0, 0.0)),
        ("lossy l=0.3 v=1", 1.0, lossy_filter(0.3), (0.2, 0.1)),
        ("squeezed pair v=1", 1.0, squeezed, (0.4, 0.0)),
    ]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    slack: float
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        extra = f" ({self.detail})" if self.detail else ""
        return f"{tag} {self.name}: slack={self.slack:.3e}{extra}"


def _within(name, err, tol, detail=""):
    return CheckResult(name, bool(err <= tol), float(tol - err), detail)


def check_closed_form_spot():
    vp = posterior_summary(1.0, FockFilter(1)).v_prime
    return _within("one-photon closed form v'(1,0) -> 0.4", abs(vp - 0.4), 1e-12, f"v'={vp:.17g}")


def check_closed_form_grid():
    err = 0.0
    for v in E_GRID_V:
        for q in E_GRID_Q:
            s = posterior_summary(v, FockFilter(1), (q, 0.0))
            err = max(err, abs(s.v_prime / appendix_e_vp(v, q) - 1),
                      abs(s.p_y / appendix_e_py(v, q) - 1))
    return _within("one-photon closed forms on (v,q) grid", err, 1e-8, f"max rel err {err:.2e}")


def check_limit_product():
    val = appendix_e_limit_product(1e-3)
    return _within("small-v limit product -> 1/e", abs(val - np.exp(-1)), 1e-3, f"{val:.9f}")


def check_classical():
    err = max(abs(posterior_summary(v, FockFilter(0)).v_prime - classical_bound(v))
              for v in np.geomspace(0.05, 20, 60))
    return _within("vacuum probe equals classical bound", err, 1e-10)


def check_filter_mass():
    err = max(abs(filter_mass(FockFilter(n)) - 1) for n in range(4))
    lossy = heterodyne_filter(lossy_single_photon(0.3), lossy_single_photon(0.3))
    err = max(err, abs(filter_mass(lossy) - 1))
    return _within("filter normalization", err, 1e-6)


def check_v2_fock():
    err = max(abs(posterior_summary(2.0, FockFilter(n)).v_prime - 1) for n in (1, 2, 3))
    return _within("Fock probes give v'=1 at v=2", err, 1e-6)


def check_v2_sigma(seed: int = 0):
    err, low = 0.0, np.inf
    for k in range(5):
        r = v2_theorem_check(*random_v2_pair(4, seed + k))
        m = v2_theorem_check(*random_v2_pair(4, seed + k, matched=False))
        err = max(err, abs(r.slack), abs(r.vp_sigma - r.vp_direct), abs(m.vp_sigma - m.vp_direct))
        low = min(low, m.slack)
    ok = err <= 1e-6 and low >= -1e-8
    return CheckResult("v=2 sigma construction", ok, float(min(1e-6 - err, low + 1e-8)))


def check_gkp():
    vp = posterior_summary(0.5, GkpFilter()).v_prime
    one = posterior_summary(2.0, GkpFilter()).v_prime
    ok = vp < 1e-3 and abs(one - 1) < 1e-6
    return CheckResult("GKP v'(0.5)<1e-3 and v'(2)=1", ok, float(min(1e-3 - vp, 1e-6 - abs(one - 1))))


def check_ghosh_chain():
    slack = np.inf
    cases = [(fock_dm(n), fock_dm(n)) for n in range(4)]
    cases.append((lossy_single_photon(0.3), lossy_single_photon(0.3)))
    for v in (0.5, 1.0):
        for rho, rp in cases:
            E = np.conj(rp) / (2 * np.pi)
            rep = ghosh_report(v, rho, E)
            vp = posterior_summary(v, heterodyne_filter(rho, rp)).v_prime
            slack = min(slack,
                        1 / v + rep.fisher / 4 + 1e-9 - 1 / vp,
                        rep.fisher_upper + 1e-9 - rep.fisher,
                        rep.photon_bound + 1e-9 - 1 / vp)
    return CheckResult("Ghosh bound chain", bool(slack >= 0), float(slack))


def check_det_inequality(seed: int = 0):
    rng = np.random.default_rng(seed)
    worst = np.inf
    for _ in range(1000):
        a, b = rng.normal(size=(2, 2, 2))
        A = a @ a.T + 1e-3 * np.eye(2)
        B = b @ b.T + 1e-3 * np.eye(2)
        worst = min(worst, det_inequality_holds(A, B)[1])
    return CheckResult("determinant inequality", bool(worst >= -1e-12), float(worst + 1e-12))


def check_displacement_oracle():
    err = 0.0
    for xi, eta in [(0.3, -0.2), (1.5, 1.0), (-2.0, 1.8), (0.0, 2.8)]:
        D = displacement_matrix(xi, eta, 40)[:21, :21]
        O = displacement_oracle(xi, eta, 40)[:21, :21]
        err = max(err, np.abs(D - O).max())
    return _within("displacement closed form vs exponentiation", err, 1e-8)


def check_mc(seed: int = 0):
    worst = 0.0
    for _, v, filt, y in mc_benchmarks():
        ref = posterior_summary(v, filt, y).v_prime
        mc = mc_posterior(v, filt, y, n_samples=100_000, seed=seed)
        worst = max(worst, abs(mc.v_prime - ref) / mc.std_err)
    return CheckResult("Monte-Carlo v' on 6 scenarios", bool(worst <= 3), float(3 - worst),
                       f"worst {worst:.2f} sigma")


def check_bounds():
    ok = gaussian_bound(1.0) == 0.5 and abs(classical_bound(2.0) - 1) < 1e-15
    return CheckResult("bound formulas", ok, 0.0)


def check_loss_thresholds():
    g = loss_threshold("gaussian").l_max
    c = loss_threshold("classical").l_max
    slack = min(0.005 - abs(g - 0.089), 0.01 - abs(c - 0.5))
    return CheckResult("loss thresholds", bool(slack >= 0), float(slack), f"gaussian {g:.4f}, classical {c:.4f}")


def check_marginal_total():
    f = FockFilter(1)
    tot = quad(lambda r: 2 * np.pi * r * marginal_py(1.0, f, (r, 0.0)), 0, 15, epsabs=1e-13)[0]
    return _within("outcome density integrates to 1", abs(tot - 1), 1e-8)


CHECKS: tuple[Callable[..., CheckResult], ...] = (
    check_bounds,
    check_closed_form_spot,
    check_closed_form_grid,
    check_limit_product,
    check_classical,
    check_filter_mass,
    check_marginal_total,
    check_v2_fock,
    check_v2_sigma,
    check_gkp,
    check_ghosh_chain,
    check_det_inequality,
    check_displacement_oracle,
    check_mc,
    check_loss_thresholds,
)


def run_all(seed: int = 0, echo=print) -> bool:
    t0 = time.perf_counter()
    ok = True
    for chk in CHECKS:
        kw = {"seed": seed} if "seed" in chk.__code__.co_varnames else {}
        try:
            res = chk(**kw)
        except Exception as exc:  # a crash is a failure, not an abort
            res = CheckResult(chk.__name__.removeprefix("check_"), False, float("nan"), repr(exc))
        ok &= res.passed
        echo(res.line())
    echo(f"{'ALL PASS' if ok else 'FAILURES'} in {time.perf_counter() - t0:.1f} s")
    return ok
