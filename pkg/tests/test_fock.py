import numpy as np
import pytest
from scipy.integrate import dblquad
from scipy.special import eval_genlaguerre

from dispest.fock import (
    DisplacementParams,
    assoc_laguerre,
    beamsplitter_half,
    displacement_matrix,
    fock_dm,
    hermitize,
    lossy_single_photon,
    number_op,
    p_op,
    partial_trace_first,
    pure_dm,
    squeezed_vacuum,
    wigner_eval,
    x_op,
)
from dispest.oracle import displacement_oracle


@pytest.mark.parametrize("n,k,x,expected", [
    (0, 0, 3.7, 1.0),
    (1, 0, 0.0, 1.0),
    (1, 0, 1.0, 0.0),
    (1, 0, 2.0, -1.0),
    (2, 0, 2.0, -1.0),
])
def test_laguerre_values(n, k, x, expected):
    assert assoc_laguerre(n, k, x) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("n,k", [(5, 0), (7, 3), (30, 2), (60, 11)])
def test_laguerre_matches_scipy(n, k):
    x = np.linspace(0, 12, 25)
    np.testing.assert_allclose(assoc_laguerre(n, k, x), eval_genlaguerre(n, k, x), rtol=1e-9, atol=1e-9)


def test_laguerre_range():
    with pytest.raises(ValueError):
        assoc_laguerre(201, 0, 1.0)
    with pytest.raises(ValueError):
        assoc_laguerre(3, -1, 1.0)
    with pytest.raises(OverflowError):
        assoc_laguerre(200, 200, 1e300)


def test_displacement_identity():
    np.testing.assert_array_equal(displacement_matrix(0.0, 0.0, 10), np.eye(11))


def test_displacement_zero_element():
    # |alpha|^2 = 1  <=>  xi^2 + eta^2 = 2
    D = displacement_matrix(np.sqrt(2.0), 0.0, 10)
    assert abs(D[1, 1]) ** 2 == pytest.approx(0.0, abs=1e-30)


@pytest.mark.parametrize("xi,eta", [(0.4, -0.3), (1.1, 2.0), (-2.6, 1.0), (0.0, -2.8)])
def test_displacement_against_exponential(xi, eta):
    D = displacement_matrix(xi, eta, 40)
    O = displacement_oracle(xi, eta, 40)
    np.testing.assert_allclose(D[:21, :21], O[:21, :21], atol=1e-8)
    # a displaced |n> leaks past the truncation once n + |alpha|^2 + spread nears 40
    cols = np.linalg.norm(D[:, :11], axis=0)
    np.testing.assert_allclose(cols, 1.0, atol=1e-8)


def test_displacement_shifts_quadratures():
    xi, eta = 0.7, -0.4
    D = displacement_matrix(xi, eta, 60)
    vac = np.zeros(61)
    vac[0] = 1
    psi = D @ vac
    assert (psi.conj() @ x_op(60) @ psi).real == pytest.approx(xi, abs=1e-12)
    assert (psi.conj() @ p_op(60) @ psi).real == pytest.approx(eta, abs=1e-12)


def test_displacement_params_alpha():
    assert DisplacementParams(1.0, 2.0).alpha == pytest.approx((1 + 2j) / np.sqrt(2))


def test_beamsplitter_vacuum_and_single_photon():
    B = beamsplitter_half(3)
    d = 4
    vac = np.zeros(d * d)
    vac[0] = 1
    np.testing.assert_allclose(B @ vac, vac, atol=1e-15)
    idx = [1 * d + 0, 0 * d + 1]
    block = B[np.ix_(idx, idx)]
    np.testing.assert_allclose(np.abs(block), 1 / np.sqrt(2), atol=1e-15)
    np.testing.assert_allclose(block @ block.conj().T, np.eye(2), atol=1e-15)


def test_beamsplitter_unitary_and_number_conserving():
    n_cut = 8
    d = n_cut + 1
    B = beamsplitter_half(n_cut)
    N = np.kron(number_op(n_cut), np.eye(d)) + np.kron(np.eye(d), number_op(n_cut))
    assert np.abs(B @ N - N @ B).max() < 1e-10
    kept = np.diag(N).real <= n_cut
    BB = B.conj().T @ B
    np.testing.assert_allclose(BB[np.ix_(kept, kept)], np.eye(kept.sum()), atol=1e-10)


def test_beamsplitter_transforms_x():
    n_cut = 10
    d = n_cut + 1
    B = beamsplitter_half(n_cut)
    x1 = np.kron(x_op(n_cut), np.eye(d))
    x2 = np.kron(np.eye(d), x_op(n_cut))
    low = np.diag(np.kron(number_op(n_cut), np.eye(d)) + np.kron(np.eye(d), number_op(n_cut))).real <= n_cut - 2
    lhs = (B.conj().T @ x1 @ B)[np.ix_(low, low)]
    rhs = ((x1 + x2) / np.sqrt(2))[np.ix_(low, low)]
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_beamsplitter_too_large():
    with pytest.raises(ValueError):
        beamsplitter_half(61)


def test_partial_trace():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    rho = a @ a.conj().T
    rho /= np.trace(rho)
    tau = np.diag([0.2, 0.5, 0.3])
    np.testing.assert_allclose(partial_trace_first(np.kron(rho, tau)), tau, atol=1e-15)
    M = rng.normal(size=(9, 9))
    assert np.trace(partial_trace_first(M)) == pytest.approx(np.trace(M))
    with pytest.raises(ValueError):
        partial_trace_first(np.eye(6), (2, 2))


def test_lossy_single_photon():
    np.testing.assert_array_equal(lossy_single_photon(0.0), fock_dm(1))
    np.testing.assert_array_equal(lossy_single_photon(1.0), fock_dm(0, 1))
    np.testing.assert_allclose(np.diag(lossy_single_photon(0.3, 3)).real, [0.3, 0.7, 0, 0])
    with pytest.raises(ValueError):
        lossy_single_photon(1.2)


@pytest.mark.parametrize("op,expected", [(fock_dm(0), 1 / np.pi), (fock_dm(1), -1 / np.pi), (fock_dm(2), 1 / np.pi)])
def test_wigner_origin(op, expected):
    assert wigner_eval(op, 0.0, 0.0) == pytest.approx(expected, abs=1e-15)


def test_wigner_single_photon_by_definition():
    # W(x,p) = (1/pi) int psi*(x+s) psi(x-s) e^{2ips} ds with psi_1 ~ x e^{-x^2/2}
    from scipy.integrate import quad

    psi = lambda t: np.sqrt(2) * np.pi ** -0.25 * t * np.exp(-t * t / 2)  # noqa: E731
    for x, p in [(0.3, -0.5), (1.2, 0.4)]:
        re = quad(lambda s: psi(x + s) * psi(x - s) * np.cos(2 * p * s), -12, 12)[0] / np.pi
        assert wigner_eval(fock_dm(1), x, p) == pytest.approx(re, abs=1e-12)


@pytest.mark.parametrize("n", [0, 1, 3])
def test_wigner_normalization(n):
    total = dblquad(lambda p, x: wigner_eval(fock_dm(n), x, p), -9, 9, -9, 9, epsabs=1e-11)[0]
    assert total == pytest.approx(1.0, abs=1e-8)


def test_wigner_off_diagonal_is_complex():
    op = np.zeros((3, 3), dtype=complex)
    op[2, 0] = 1
    w = wigner_eval(op, 0.4, 0.9)
    assert np.iscomplexobj(w) and abs(np.imag(w)) > 0


def test_hermitize():
    a = np.array([[1, 1e-12j], [0, 2]])
    np.testing.assert_allclose(hermitize(a), [[1, 0.5e-12j], [-0.5e-12j, 2]])
    with pytest.raises(ValueError):
        hermitize(np.array([[1, 1], [0, 1]]))


@pytest.mark.parametrize("a", [0.3, 1.0, 2.5])
def test_squeezed_vacuum_variances(a):
    k = squeezed_vacuum(a, 80)
    rho = pure_dm(k)
    X, P = x_op(80), p_op(80)
    assert np.trace(rho @ X @ X).real == pytest.approx(a / 2, rel=1e-10)
    assert np.trace(rho @ P @ P).real == pytest.approx(1 / (2 * a), rel=1e-10)
