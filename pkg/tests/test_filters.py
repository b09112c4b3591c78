import numpy as np
import pytest
from scipy.special import roots_laguerre

from dispest.filters import (
    CrossFockFilter,
    FockFilter,
    GaussianFilter,
    GkpFilter,
    MixtureFilter,
    NumericConvolutionFilter,
    TraceFilter,
    cross_fock_filter,
    filter_mass,
    fock_filter,
    gkp_filter_weights,
    gkp_s_max,
    heterodyne_filter,
    mixture_filter,
    numeric_filter,
)
from dispest.fock import fock_dm, lossy_single_photon, pure_dm
from dispest.oracle import random_pure_state

TWO_PI = 2 * np.pi
GRID = [(0.0, 0.0), (0.7, 0.0), (1.0, -1.5), (-2.2, 2.9), (0.0, 4.0)]


@pytest.mark.parametrize("n", [0, 1, 2, 5, 17])
def test_fock_filter_peak(n):
    assert fock_filter(n, 0.0, 0.0) == pytest.approx(1 / TWO_PI, rel=1e-15)


def test_fock_filter_vacuum_is_gaussian():
    x, p = 0.8, -1.3
    assert fock_filter(0, x, p) == pytest.approx(np.exp(-(x * x + p * p) / 2) / TWO_PI, rel=1e-15)


def test_fock_filter_single_photon_zero():
    assert fock_filter(1, np.sqrt(2.0), 0.0) == pytest.approx(0.0, abs=1e-30)
    assert fock_filter(1, 1.0, 1.0) == pytest.approx(0.0, abs=1e-30)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_cross_fock_diagonal(n):
    for x, p in GRID:
        assert cross_fock_filter(n, n, x, p) == pytest.approx(fock_filter(n, x, p), rel=1e-13, abs=1e-300)


def test_cross_fock_one_zero():
    for x, p in GRID:
        u = (x * x + p * p) / 2
        assert cross_fock_filter(1, 0, x, p) == pytest.approx(u * np.exp(-u) / TWO_PI, rel=1e-14, abs=1e-300)
        assert cross_fock_filter(0, 1, x, p) == pytest.approx(cross_fock_filter(1, 0, x, p), rel=1e-14)


@pytest.mark.parametrize("m,n", [(1, 0), (2, 1), (3, 0), (0, 3)])
def test_cross_fock_against_convolution(m, n):
    for x, p in GRID[:4]:
        ref = numeric_filter(fock_dm(m), fock_dm(n), x, p)
        assert cross_fock_filter(m, n, x, p) == pytest.approx(ref, abs=1e-7)


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_fock_filter_against_convolution(n):
    for r in (0.0, 1.3, 2.5, 4.0):
        x, p = r * np.cos(0.3 * n + 0.2), r * np.sin(0.3 * n + 0.2)
        assert numeric_filter(fock_dm(n), fock_dm(n), x, p) == pytest.approx(fock_filter(n, x, p), abs=1e-7)


def test_numeric_filter_vacuum():
    assert numeric_filter(fock_dm(0), fock_dm(0), 1.0, 0.5) == pytest.approx(np.exp(-0.625) / TWO_PI, abs=1e-9)


def test_numeric_filter_double_reflection():
    rho = pure_dm(random_pure_state(3, 5))
    rp = pure_dm(random_pure_state(3, 6))
    a = numeric_filter(rho, rp, 0.4, -0.7)
    b = numeric_filter(rho, np.conj(np.conj(rp)), 0.4, -0.7)
    assert abs(a - b) < 1e-10


def test_numeric_filter_complex_ancilla_matches_trace():
    rho = pure_dm(random_pure_state(3, 1))
    rp = pure_dm(random_pure_state(3, 2))
    het = heterodyne_filter(rho, rp)
    for x, p in GRID[:3]:
        assert numeric_filter(rho, rp, x, p) == pytest.approx(het(x, p), abs=1e-8)


@pytest.mark.parametrize("filt", [
    FockFilter(0), FockFilter(1), FockFilter(2), FockFilter(3),
    CrossFockFilter(1, 0), CrossFockFilter(3, 2), CrossFockFilter(0, 3),
    mixture_filter(lossy_single_photon(0.1), lossy_single_photon(0.1)),
    mixture_filter(lossy_single_photon(0.5), lossy_single_photon(0.5)),
    GaussianFilter(np.diag([2.0, 0.3])),
    heterodyne_filter(pure_dm(random_pure_state(4, 9)), pure_dm(random_pure_state(4, 10))),
], ids=lambda f: type(f).__name__)
def test_normalization(filt):
    assert filter_mass(filt) == pytest.approx(1.0, abs=1e-6)


def test_normalization_by_cubature():
    from scipy.integrate import cubature

    f = FockFilter(2)
    res = cubature(lambda q: f(q[:, 0], q[:, 1]), [-12, -12], [12, 12], rtol=1e-10)
    assert res.estimate == pytest.approx(1.0, abs=1e-6)


def test_mixture_pure_equals_fock():
    f = mixture_filter(fock_dm(1), fock_dm(1))
    for x, p in GRID:
        assert f(x, p) == pytest.approx(fock_filter(1, x, p), rel=1e-13, abs=1e-300)


@pytest.mark.parametrize("l", [0.1, 0.3])
def test_mixture_bilinear_expansion(l):
    f = mixture_filter(lossy_single_photon(l), lossy_single_photon(l))
    for x, p in GRID[:3]:
        expected = ((1 - l) ** 2 * fock_filter(1, x, p) + l * (1 - l) * 2 * cross_fock_filter(1, 0, x, p)
                    + l * l * fock_filter(0, x, p))
        assert f(x, p) == pytest.approx(expected, rel=1e-13)
        rho = lossy_single_photon(l)
        assert numeric_filter(rho, rho, x, p) == pytest.approx(expected, abs=1e-7)


def test_mixture_full_loss_is_classical():
    f = mixture_filter(lossy_single_photon(1.0), lossy_single_photon(1.0))
    for x, p in GRID:
        assert f(x, p) == pytest.approx(fock_filter(0, x, p), rel=1e-14)


def test_mixture_rejects_coherences():
    with pytest.raises(ValueError):
        mixture_filter(pure_dm([1, 1]) / 2, fock_dm(1))


def test_trace_filter_matches_closed_forms():
    t = heterodyne_filter(fock_dm(2), fock_dm(1))
    for x, p in GRID:
        assert t(x, p) == pytest.approx(cross_fock_filter(2, 1, x, p), rel=1e-12, abs=1e-16)


def test_radial_symmetry():
    rng = np.random.default_rng(2)
    filters = [FockFilter(3), CrossFockFilter(2, 0), mixture_filter(lossy_single_photon(0.4), lossy_single_photon(0.1))]
    for f in filters:
        for r in (0.3, 1.7, 3.2):
            ang = rng.uniform(0, 2 * np.pi, 8)
            vals = f(r * np.cos(ang), r * np.sin(ang))
            np.testing.assert_allclose(vals, vals[0], rtol=1e-10, atol=1e-300)


def test_first_zero_decreases_with_n():
    zeros = []
    for n in range(1, 11):
        j1 = roots_laguerre(n)[0][0]
        r0 = np.sqrt(2 * j1)
        assert fock_filter(n, r0, 0.0) == pytest.approx(0.0, abs=1e-20)
        zeros.append(r0)
    assert np.all(np.diff(zeros) < 0)


def test_filters_nonnegative_and_capped():
    rng = np.random.default_rng(4)
    pts = rng.uniform(-6, 6, size=(4000, 2))
    psi = random_pure_state(4, 12)
    for f in (FockFilter(3), heterodyne_filter(pure_dm(psi), pure_dm(psi.conj())), CrossFockFilter(2, 1)):
        vals = f(pts[:, 0], pts[:, 1])
        assert vals.min() >= -1e-12
    for f in (FockFilter(3), heterodyne_filter(pure_dm(psi), pure_dm(psi.conj()))):
        assert f(pts[:, 0], pts[:, 1]).max() <= 1 / TWO_PI + 1e-12
        assert f(0.0, 0.0) == pytest.approx(1 / TWO_PI, rel=1e-12)


def test_numeric_convolution_backend():
    f = NumericConvolutionFilter(fock_dm(1), fock_dm(0))
    np.testing.assert_allclose(f([0.5, 1.0], [0.0, -1.0]), cross_fock_filter(1, 0, np.array([0.5, 1.0]), np.array([0.0, -1.0])), atol=1e-8)


def test_gkp_filter_is_symbolic():
    with pytest.raises(TypeError):
        GkpFilter()(0.0, 0.0)
    assert not GkpFilter().normalizable


@pytest.mark.parametrize("v", [0.05, 0.2, 0.5])
def test_gkp_origin_weight(v):
    w = gkp_filter_weights(v, (0.0, 0.0), 4)
    origin = w.weights[np.argmin(np.abs(w.points).sum(axis=1))]
    assert origin / w.weights.sum() >= 1 - 5 * np.exp(-2 * np.pi / v)


def test_gkp_weights_symmetric_positive():
    w = gkp_filter_weights(1.3, (0.0, 0.0), 5)
    assert np.all(w.weights > 0)
    np.testing.assert_allclose(w.weights, w.weights[::-1], rtol=1e-14)
    np.testing.assert_allclose(w.points, -w.points[::-1], atol=1e-14)


@pytest.mark.parametrize("v,y", [(0.5, (0.0, 0.0)), (2.0, (0.3, -1.1)), (8.0, (2.0, 0.0))])
def test_gkp_tail_bound(v, y):
    s = gkp_s_max(v, y)
    assert gkp_filter_weights(v, y).tail_bound < 1e-12
    assert gkp_filter_weights(v, y, s).s_max == s


def test_mixture_filter_object():
    f = MixtureFilter(((1.0, 1, 1),))
    assert f.radial and f.degree == 4
    assert f(0.3, 0.1) == pytest.approx(fock_filter(1, 0.3, 0.1))


def test_trace_filter_rejects_non_hermitian():
    with pytest.raises(ValueError):
        TraceFilter(np.array([[1, 1], [0, 0]]), fock_dm(1))
