"""Truncated Fock-basis linear algebra for a single bosonic mode.

Operators are plain complex numpy arrays indexed by photon number
``0..n_cut``.  Quadratures follow ``x = (a + a^dag)/sqrt(2)``,
``p = (a - a^dag)/(i sqrt(2))`` so that ``[x, p] = i``, and a phase-space
displacement by ``(xi, eta)`` uses the complex amplitude
``alpha = (xi + i eta)/sqrt(2)``.
"""
from __future__ import annotations

from functools import lru_cache
from math import comb, lgamma
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln

DEFAULT_NCUT = 40
TWO_MODE_NCUT = 24
HERMITIAN_TOL = 1e-10


class DisplacementParams(NamedTuple):
    """Phase-space shift ``(x, p) -> (x + xi, p + eta)``."""

    xi: float
    eta: float

    @property
    def alpha(self) -> complex:
        return (self.xi + 1j * self.eta) / np.sqrt(2.0)


def assoc_laguerre(n: int, k: int, x):
    """Associated Laguerre polynomial ``L_n^k(x)`` by three-term recurrence.

    ``x`` may be an array; the result has the same shape.
    """
    if n < 0 or k < 0:
        raise ValueError("Laguerre indices must be non-negative")
    if n > 200 or k > 200:
        raise ValueError(f"Laguerre index out of range (n={n}, k={k}, max 200)")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + k - x
    with np.errstate(over="ignore", invalid="ignore"):
        for j in range(1, n):
            prev, cur = cur, ((2 * j + 1 + k - x) * cur - (j + k) * prev) / (j + 1)
    if not np.all(np.isfinite(cur)):
        raise OverflowError(f"L_{n}^{k} overflowed for the given argument")
    return cur if cur.ndim else float(cur)


def _laguerre_table(n_max: int, k: int, x: np.ndarray) -> np.ndarray:
    """Stack ``L_0^k(x) .. L_{n_max}^k(x)`` along a new leading axis."""
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 1.0 + k - x
    for j in range(1, n_max):
        out[j + 1] = ((2 * j + 1 + k - x) * out[j] - (j + k) * out[j - 1]) / (j + 1)
    return out


def displacement_elements(alpha, dim_m: int, dim_n: int | None = None, gaussian: bool = True):
    """Closed-form matrix elements ``<m|D(alpha)|n>``.

    Returns an array of shape ``alpha.shape + (dim_m, dim_n)``.  With
    ``gaussian=False`` the common factor ``exp(-|alpha|^2/2)`` is left out,
    which leaves a polynomial in ``alpha, conj(alpha)``.
    """
    if dim_n is None:
        dim_n = dim_m
    alpha = np.asarray(alpha, dtype=complex)
    r2 = np.abs(alpha) ** 2
    logabs = np.log(np.where(r2 > 0, np.abs(alpha), 1.0))
    phase = np.exp(1j * np.angle(alpha))
    out = np.zeros(alpha.shape + (dim_m, dim_n), dtype=complex)
    for k in range(max(dim_m, dim_n)):
        # lower triangle m = n + k uses alpha^k; upper triangle n = m + k uses (-alpha*)^k
        n_lo = min(dim_n, dim_m - k) if k < dim_m else 0
        n_up = min(dim_m, dim_n - k) if k < dim_n else 0
        j_max = max(n_lo, n_up)
        if j_max == 0:
            continue
        lag = _laguerre_table(j_max - 1, k, r2)
        j = np.arange(j_max)
        logpref = 0.5 * (gammaln(j + 1) - gammaln(j + k + 1))
        mag = np.exp(logpref.reshape((-1,) + (1,) * r2.ndim) + k * logabs)
        if k:
            mag = np.where(r2 > 0, mag, 0.0)
        vals = mag * lag
        for jj in range(n_lo):
            out[..., jj + k, jj] = vals[jj] * phase**k
        if k > 0:
            for jj in range(n_up):
                out[..., jj, jj + k] = vals[jj] * (-np.conj(phase)) ** k
    if gaussian:
        out *= np.exp(-r2 / 2)[..., None, None]
    return out


def displacement_matrix(xi: float, eta: float, n_cut: int = DEFAULT_NCUT) -> np.ndarray:
    """Truncated displacement operator ``D(xi, eta) = exp(i eta x - i xi p)``."""
    if n_cut < 1:
        raise ValueError("n_cut must be >= 1")
    alpha = (xi + 1j * eta) / np.sqrt(2.0)
    return displacement_elements(alpha, n_cut + 1)


def annihilation(n_cut: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_cut + 1, dtype=float)), 1).astype(complex)


def number_op(n_cut: int) -> np.ndarray:
    return np.diag(np.arange(n_cut + 1, dtype=float)).astype(complex)


def x_op(n_cut: int) -> np.ndarray:
    a = annihilation(n_cut)
    return (a + a.conj().T) / np.sqrt(2.0)


def p_op(n_cut: int) -> np.ndarray:
    a = annihilation(n_cut)
    return (a - a.conj().T) / (1j * np.sqrt(2.0))


def fock_dm(n: int, n_cut: int | None = None) -> np.ndarray:
    """Projector ``|n><n|``; ``n_cut`` defaults to ``n``."""
    n_cut = n if n_cut is None else n_cut
    if n > n_cut:
        raise ValueError("photon number exceeds truncation")
    rho = np.zeros((n_cut + 1, n_cut + 1), dtype=complex)
    rho[n, n] = 1.0
    return rho


def pure_dm(ket) -> np.ndarray:
    ket = np.asarray(ket, dtype=complex)
    return np.outer(ket, ket.conj())


def lossy_single_photon(l: float, n_cut: int = 1) -> np.ndarray:
    """Single photon after loss: ``(1 - l)|1><1| + l|0><0|``."""
    if not 0.0 <= l <= 1.0:
        raise ValueError(f"loss rate must lie in [0, 1], got {l}")
    rho = np.zeros((n_cut + 1, n_cut + 1), dtype=complex)
    rho[0, 0] = l
    rho[1, 1] = 1.0 - l
    return rho


def pad(op: np.ndarray, n_cut: int) -> np.ndarray:
    """Embed ``op`` into a larger truncation, or crop it (only zeros may be dropped)."""
    op = np.asarray(op, dtype=complex)
    d = n_cut + 1
    if op.shape[0] > d:
        if np.any(op[d:, :]) or np.any(op[:, d:]):
            raise ValueError("cannot crop an operator with weight above the truncation")
        return op[:d, :d].copy()
    out = np.zeros((d, d), dtype=complex)
    out[: op.shape[0], : op.shape[1]] = op
    return out


def support_size(op: np.ndarray, tol: float = 0.0) -> int:
    """One plus the largest photon index carrying a non-zero entry."""
    op = np.asarray(op)
    mask = np.abs(op) > tol
    rows = np.flatnonzero(mask.any(axis=1) | mask.any(axis=0))
    return int(rows[-1]) + 1 if rows.size else 1


def hermitize(op: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Symmetrize ``op``; asymmetry above ``tol`` is an error."""
    op = np.asarray(op, dtype=complex)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {op.shape}")
    asym = np.max(np.abs(op - op.conj().T)) if op.size else 0.0
    if asym > tol:
        raise ValueError(f"operator is not Hermitian (max asymmetry {asym:.3g})")
    return (op + op.conj().T) / 2


def check_povm(op: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    op = hermitize(op)
    lo = np.linalg.eigvalsh(op).min()
    if lo < -tol:
        raise ValueError(f"operator is not positive semidefinite (min eigenvalue {lo:.3g})")
    return op


def check_density(op: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    op = check_povm(op, tol)
    tr = np.trace(op).real
    if abs(tr - 1.0) > 1e-12:
        raise ValueError(f"density matrix must have unit trace, got {tr!r}")
    return op


@lru_cache(maxsize=8)
def _beamsplitter(n_cut: int) -> np.ndarray:
    d = n_cut + 1
    B = np.zeros((d * d, d * d))
    for n1 in range(d):
        for n2 in range(d):
            N = n1 + n2
            norm = -0.5 * (lgamma(n1 + 1) + lgamma(n2 + 1)) - 0.5 * N * np.log(2.0)
            col = n1 * d + n2
            # ((b1 + b2))^n1 ((b1 - b2))^n2 |00>, expanded binomially
            for j in range(n1 + 1):
                for k in range(n2 + 1):
                    o1 = j + k
                    o2 = N - o1
                    if o1 > n_cut or o2 > n_cut:
                        continue
                    coef = comb(n1, j) * comb(n2, k) * (-1) ** (n2 - k)
                    B[o1 * d + o2, col] += coef * np.exp(
                        norm + 0.5 * (lgamma(o1 + 1) + lgamma(o2 + 1))
                    )
    B.setflags(write=False)
    return B


def beamsplitter_half(n_cut: int = TWO_MODE_NCUT) -> np.ndarray:
    """Balanced beamsplitter ``B`` on the two-mode truncated space.

    ``B^dag x1 B = (x1 + x2)/sqrt(2)`` and ``B^dag x2 B = (x1 - x2)/sqrt(2)``
    (same for ``p``).  Basis index is ``n1 * (n_cut + 1) + n2``.  The matrix
    is exact and unitary on the block of total photon number ``<= n_cut``.
    """
    if n_cut < 1:
        raise ValueError("n_cut must be >= 1")
    if n_cut > 60:
        raise ValueError(f"two-mode truncation {n_cut} too large (max 60)")
    return _beamsplitter(n_cut).astype(complex)


def partial_trace_first(op: np.ndarray, dims: tuple[int, int] | None = None) -> np.ndarray:
    """Trace out the first tensor factor of a two-mode operator."""
    op = np.asarray(op)
    D = op.shape[0]
    if op.ndim != 2 or op.shape[1] != D:
        raise ValueError(f"expected a square matrix, got shape {op.shape}")
    if dims is None:
        d = int(round(np.sqrt(D)))
        dims = (d, d)
    d1, d2 = dims
    if d1 * d2 != D:
        raise ValueError(f"dimensions {dims} do not match operator size {D}")
    return np.einsum("ijik->jk", op.reshape(d1, d2, d1, d2))


def wigner_eval(op: np.ndarray, x, p):
    """Wigner function of ``op`` at phase-space points ``(x, p)``.

    Uses ``W_{|m><n|}`` in closed form; normalized so that the phase-space
    integral equals ``Tr(op)``.  Hermitian input gives a real result.
    """
    op = np.asarray(op, dtype=complex)
    x, p = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(p, dtype=float))
    r2 = x**2 + p**2
    d = support_size(op)
    w = 2.0 * (x - 1j * p) / np.sqrt(2.0)
    W = np.zeros(x.shape, dtype=complex)
    for k in range(d):
        lag = _laguerre_table(d - k - 1, k, 2 * r2)
        for n in range(d - k):
            m = n + k
            c_low, c_up = op[m, n], op[n, m] if k else 0.0
            if c_low == 0 and c_up == 0:
                continue
            pref = (-1) ** n / np.pi * np.exp(0.5 * (lgamma(n + 1) - lgamma(m + 1)))
            base = pref * w**k * lag[n]
            W += c_low * base
            if k:
                W += c_up * np.conj(base)
    W *= np.exp(-r2)
    if np.allclose(op, op.conj().T, atol=1e-12, rtol=0):
        W = W.real
    return W if W.ndim else W.item()


def squeezed_vacuum(a: float, n_cut: int = DEFAULT_NCUT) -> np.ndarray:
    """Ket of the pure Gaussian state with ``<x^2> = a/2`` and ``<p^2> = 1/(2a)``."""
    if not a > 0:
        raise ValueError("squeezing parameter a must be positive")
    r = -0.5 * np.log(a)
    t = np.tanh(r)
    ket = np.zeros(n_cut + 1, dtype=complex)
    for k in range(n_cut // 2 + 1):
        logc = 0.5 * lgamma(2 * k + 1) - lgamma(k + 1) - k * np.log(2.0)
        ket[2 * k] = (-t) ** k * np.exp(logc)
    return ket / np.sqrt(np.cosh(r))
