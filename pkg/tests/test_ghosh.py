import numpy as np
import pytest
from scipy.integrate import cubature

from dispest.bayes import Prior, posterior_summary
from dispest.filters import FockFilter, TraceFilter, heterodyne_filter
from dispest.fock import displacement_matrix, fock_dm, lossy_single_photon, number_op, pure_dm
from dispest.gaussian import classical_bound
from dispest.ghosh import (
    SCHWARZ,
    appendix_e_limit_product,
    appendix_e_point,
    appendix_e_py,
    appendix_e_small_v,
    appendix_e_vp,
    fisher_F,
    fisher_sweep,
    fisher_upper_bound,
    ghosh_report,
    photon_number_bound,
    prior_fisher,
)
from dispest.oracle import random_pure_state

HET = 1 / (2 * np.pi)


def test_prior_fisher_values():
    assert prior_fisher(4.0) == 1.0
    assert prior_fisher(2.0) == 2.0
    with pytest.raises(ValueError):
        prior_fisher(0.0)


def test_prior_fisher_by_quadrature():
    # posterior average of the prior's negative log-curvature, by finite differences
    v, h = 1.0, 1e-3
    prior = Prior(v)
    f = FockFilter(1)

    def curvature(t):
        lp = lambda a, b: np.log(prior.pdf(a, b))  # noqa: E731
        x, p = t[:, 0], t[:, 1]
        dxx = (lp(x + h, p) - 2 * lp(x, p) + lp(x - h, p)) / h**2
        dpp = (lp(x, p + h) - 2 * lp(x, p) + lp(x, p - h)) / h**2
        w = prior.pdf(x, p) * f(x, p)
        return np.stack([w * -(dxx + dpp), w], axis=-1)

    res = cubature(curvature, [-9, -9], [9, 9], rtol=1e-11)
    assert res.estimate[0] / res.estimate[1] == pytest.approx(4.0, abs=1e-6)


@pytest.mark.parametrize("v", [0.3, 1.0, 2.0, 6.0])
def test_vacuum_equality(v):
    rep = ghosh_report(v, fock_dm(0), fock_dm(0) * HET)
    assert rep.fisher == pytest.approx(2.0, abs=1e-12)
    assert rep.vp_lower == pytest.approx(classical_bound(v), rel=1e-12)
    assert np.isfinite(rep.fisher_upper) and rep.fisher_upper > 0


def test_single_photon_frozen():
    F = fisher_F(1.0, fock_dm(1), fock_dm(1) * HET)
    assert F == pytest.approx(9.2, rel=1e-12)
    assert 1 / 0.4 - 1 <= F / 4


def _scenarios():
    out = [(fock_dm(n), fock_dm(n)) for n in range(4)]
    out += [(lossy_single_photon(l), lossy_single_photon(l)) for l in (0.0, 0.3)]
    return out


@pytest.mark.parametrize("v", [0.2, 0.7, 1.5, 3.0])
@pytest.mark.parametrize("k", range(6))
def test_ghosh_chain(v, k):
    rho, rp = _scenarios()[k]
    E = np.conj(rp) * HET
    rep = ghosh_report(v, rho, E)
    vp = posterior_summary(v, heterodyne_filter(rho, rp)).v_prime
    assert rep.fisher >= 0
    assert 1 / vp <= 1 / v + rep.fisher / 4 + 1e-9
    assert vp >= rep.vp_lower - 1e-9
    assert rep.fisher <= rep.fisher_upper + 1e-9
    assert 1 / vp <= rep.photon_bound + 1e-9


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_upper_bound_chain_fock(n):
    v = 0.8
    E = fock_dm(n) * HET
    rep = ghosh_report(v, fock_dm(n), E)
    trE2 = np.trace(E @ E).real
    assert trE2 == pytest.approx(HET**2)
    assert rep.fisher_upper <= 2 * SCHWARZ * (2 * n + 1) * np.sqrt(trE2) / rep.p_y + 1e-9


@pytest.mark.parametrize("seed", range(2))
def test_ghosh_general_outcome(seed):
    rho = pure_dm(random_pure_state(3, seed))
    E0 = pure_dm(random_pure_state(3, seed + 50)) * HET
    D = displacement_matrix(0.6, -0.9, 12)
    E = D @ np.pad(E0, (0, 10)) @ D.conj().T
    v = 1.1
    rep = ghosh_report(v, rho, E, n=2)
    vp = posterior_summary(v, TraceFilter(rho, E)).v_prime
    assert 1 / vp <= 1 / v + rep.fisher / 4 + 1e-9
    assert rep.fisher <= rep.fisher_upper + 1e-9


def test_rotation_invariance():
    rho = pure_dm(random_pure_state(4, 7))
    E = pure_dm(random_pure_state(4, 8)) * HET
    R = np.diag(np.exp(-1j * np.pi / 4 * np.diag(number_op(3)).real))
    a = ghosh_report(0.9, rho, E)
    b = ghosh_report(0.9, R @ rho @ R.conj().T, R @ E @ R.conj().T)
    assert b.fisher == pytest.approx(a.fisher, rel=1e-8)
    assert b.fisher_upper == pytest.approx(a.fisher_upper, rel=1e-8)
    assert b.p_y == pytest.approx(a.p_y, rel=1e-8)


def test_photon_number_bound():
    b = [photon_number_bound(1.0, n, HET**2, 0.05) for n in range(6)]
    np.testing.assert_allclose(np.diff(b), SCHWARZ * HET / 0.05, rtol=1e-13)
    with pytest.raises(ValueError):
        photon_number_bound(1.0, 1, HET**2, 0.0)


@pytest.mark.parametrize("n", range(6))
@pytest.mark.parametrize("v", [0.1, 0.5, 1.0, 2.0])
def test_photon_bound_fock(n, v):
    s = posterior_summary(v, FockFilter(n))
    assert 1 / s.v_prime <= photon_number_bound(v, n, HET**2, s.p_y) + 1e-9


def test_closed_form_spot_values():
    assert appendix_e_vp(1.0, 0.0) == pytest.approx(0.4, rel=1e-15)
    assert appendix_e_vp(2.0, 0.0) == pytest.approx(1.0, rel=1e-15)
    pt = appendix_e_point(1.0, 0.5)
    assert pt.vp > 0 and pt.py > 0


@pytest.mark.parametrize("v", [0.25, 0.5, 1.0, 2.0, 4.0])
@pytest.mark.parametrize("q", [0.0, 0.5, 1.0, 2.0])
def test_closed_form_matches_pipeline(v, q):
    s = posterior_summary(v, FockFilter(1), (q, 0.0))
    assert s.v_prime == pytest.approx(appendix_e_vp(v, q), rel=1e-8)
    assert s.p_y == pytest.approx(appendix_e_py(v, q), rel=1e-8)


def test_closed_form_py_small_v():
    assert appendix_e_py(1e-12, 0.0) == pytest.approx(1 / (2 * np.pi), rel=1e-10)
    assert appendix_e_small_v(0.0) == pytest.approx((1.5, 1 / (2 * np.pi)))
    assert min(appendix_e_py(v, q) for v in (0.1, 1, 5) for q in np.linspace(0, 4, 41)) >= 0


@pytest.mark.parametrize("q", [0.0, 0.7, 2.5])
def test_small_v_limits_against_pipeline(q):
    v = 1e-3
    gain, py = appendix_e_small_v(q)
    s = posterior_summary(v, FockFilter(1), (q, 0.0))
    assert 1 / s.v_prime - 1 / v == pytest.approx(gain, rel=1e-2)
    assert s.p_y == pytest.approx(py, rel=1e-2)


def test_limit_product():
    eps = 1e-3
    assert appendix_e_limit_product(eps) == pytest.approx(np.exp(-1), abs=1e-3)
    assert appendix_e_small_v(np.sqrt(2 + eps))[1] / HET < 1e-4
    with pytest.raises(ZeroDivisionError):
        appendix_e_limit_product(0.0)


def test_closed_form_validation():
    with pytest.raises(ValueError):
        appendix_e_vp(0.0, 1.0)
    with pytest.raises(ValueError):
        appendix_e_py(-1.0, 1.0)


def test_fisher_sweep_head():
    rows = fisher_sweep(0.5, 3)
    assert rows[0].n == 0
    assert rows[0].inv_vp_minus_inv_v == pytest.approx(1 / classical_bound(0.5) - 1 / 0.5, abs=1e-12)
    assert rows[0].inv_vp_minus_inv_v == pytest.approx(0.5, abs=1e-12)
    # vacuum overlap at y=0: int p(theta) |<0|D|0>|^2 = 1/(1 + v/2)
    assert rows[0].p_y == pytest.approx(1 / (1 + 0.25), rel=1e-12)


@pytest.mark.parametrize("v", [0.1, 0.5])
def test_fisher_sweep_shape(v):
    g = np.array([r.inv_vp_minus_inv_v for r in fisher_sweep(v, 30)])
    k = int(np.argmax(g))
    assert 0 < k < 30
    assert np.all(np.diff(g[: k + 1]) > 0) and np.all(np.diff(g[k:]) < 0)


def test_fisher_sweep_limits():
    with pytest.raises(ValueError):
        fisher_sweep(1.0, 51)
    with pytest.raises(ValueError):
        fisher_sweep(0.0, 3)
