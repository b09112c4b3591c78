"""Likelihood kernels ("filters") for heterodyne readout of a displaced probe.

With probe ``rho`` and ancilla ``rho'`` the outcome density is
``p(y | xi, eta) = f(xi - y_x, eta - y_p)`` with

    f(x, p) = (1/2pi) Tr[D(x, p) rho D(x, p)^dag rho'^*].

Every backend except the GKP lattice and the quadrature-based reference
is a polynomial ``g`` times a Gaussian envelope ``exp(-q^T P q / 2)``.
``Filter.scaled`` returns ``g``; the posterior code integrates it exactly
with Gauss-Hermite rules matched to the envelope.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import lgamma

import numpy as np
from scipy.integrate import cubature

from ._quad import gaussian_rule
from .fock import (
    assoc_laguerre,
    displacement_elements,
    hermitize,
    support_size,
    wigner_eval,
)

SQRT_2PI = np.sqrt(2 * np.pi)
_IDENTITY = np.eye(2)
_IDENTITY.setflags(write=False)


def _xp(x, p):
    return np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(p, dtype=float))


def _out(a):
    return a if np.ndim(a) else float(a)


class Filter:
    """Base class.  Subclasses set the class attributes and ``scaled``."""

    radial = False
    normalizable = True
    envelope: np.ndarray | None = None
    # total degree in (x, p) of ``scaled``; sizes the exact quadrature rules
    degree: int | None = None

    @property
    def radius(self) -> float:
        """Rough phase-space extent, used to size integration domains."""
        return 6.0

    def scaled(self, x, p):
        raise NotImplementedError

    def __call__(self, x, p):
        x, p = _xp(x, p)
        P = self.envelope
        if P is None:
            raise NotImplementedError(f"{type(self).__name__} has no pointwise form")
        quad = P[0, 0] * x**2 + 2 * P[0, 1] * x * p + P[1, 1] * p**2
        return _out(self.scaled(x, p) * np.exp(-quad / 2))


def _cross_fock_scaled(m: int, n: int, x, p):
    u = (x**2 + p**2) / 2
    j, k = min(m, n), abs(m - n)
    lag = assoc_laguerre(j, k, u)
    return np.exp(lgamma(j + 1) - lgamma(j + k + 1)) * u**k * lag**2 / (2 * np.pi)


@dataclass(frozen=True)
class FockFilter(Filter):
    """``rho = rho' = |n><n|``."""

    n: int
    radial = True
    envelope = _IDENTITY

    @property
    def degree(self) -> int:
        return 4 * self.n

    @property
    def radius(self) -> float:
        return np.sqrt(2 * (2 * self.n + 1)) + 3

    def scaled(self, x, p):
        u = (x**2 + p**2) / 2
        return assoc_laguerre(self.n, 0, u) ** 2 / (2 * np.pi)


@dataclass(frozen=True)
class CrossFockFilter(Filter):
    """``rho = |m><m|``, ``rho' = |n><n|``: ``(1/2pi)|<n|D|m>|^2``."""

    m: int
    n: int
    radial = True
    envelope = _IDENTITY

    @property
    def degree(self) -> int:
        return 2 * (self.m + self.n)

    @property
    def radius(self) -> float:
        return np.sqrt(2 * (2 * max(self.m, self.n) + 1)) + 3

    def scaled(self, x, p):
        return _cross_fock_scaled(self.m, self.n, x, p)


@dataclass(frozen=True)
class MixtureFilter(Filter):
    """Bilinear combination of cross-Fock kernels; ``terms`` holds ``(weight, m, n)``."""

    terms: tuple
    radial = True
    envelope = _IDENTITY

    @property
    def degree(self) -> int:
        return 2 * max(m + n for _, m, n in self.terms)

    @property
    def radius(self) -> float:
        top = max(max(m, n) for _, m, n in self.terms)
        return np.sqrt(2 * (2 * top + 1)) + 3

    def scaled(self, x, p):
        x, p = _xp(x, p)
        out = np.zeros(x.shape)
        for w, m, n in self.terms:
            out = out + w * _cross_fock_scaled(m, n, x, p)
        return out


@dataclass(frozen=True, eq=False)
class GaussianFilter(Filter):
    """Zero-mean normal kernel; for pure Gaussian states ``cov = Sigma_rho + Sigma_rho'``."""

    cov: np.ndarray
    degree = 0

    def __post_init__(self):
        cov = np.array(self.cov, dtype=float)
        if cov.shape != (2, 2) or np.linalg.eigvalsh((cov + cov.T) / 2).min() <= 0:
            raise ValueError("GaussianFilter needs a positive-definite 2x2 covariance")
        cov = (cov + cov.T) / 2
        cov.setflags(write=False)
        object.__setattr__(self, "cov", cov)

    @property
    def envelope(self):
        return np.linalg.inv(self.cov)

    @property
    def radial(self):
        c = self.cov
        return abs(c[0, 1]) < 1e-15 and abs(c[0, 0] - c[1, 1]) < 1e-15

    @property
    def radius(self) -> float:
        return 8 * np.sqrt(np.linalg.eigvalsh(self.cov).max())

    def scaled(self, x, p):
        x, _ = _xp(x, p)
        return np.full(x.shape, 1 / (2 * np.pi * np.sqrt(np.linalg.det(self.cov))))


@dataclass(frozen=True, eq=False)
class TraceFilter(Filter):
    """``f(x, p) = Tr[D(x, p) rho D(x, p)^dag E]`` for finite-support ``rho, E``.

    With ``E = rho'^*/(2pi)`` this is the heterodyne kernel; with ``E`` a bare
    POVM element it is the likelihood of that single outcome.
    """

    rho: np.ndarray
    povm: np.ndarray
    envelope = _IDENTITY

    def __post_init__(self):
        K = max(support_size(self.rho), support_size(self.povm))
        for name in ("rho", "povm"):
            a = np.zeros((K, K), dtype=complex)
            src = hermitize(getattr(self, name))
            k = min(K, src.shape[0])
            a[:k, :k] = src[:k, :k]
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        # f = sum_ij lam_i mu_j |<w_j| D |u_i>|^2 from the spectral decompositions
        for name, tag in (("rho", "_r"), ("povm", "_e")):
            ev, vec = np.linalg.eigh(getattr(self, name))
            keep = np.abs(ev) > 1e-15 * max(1.0, np.abs(ev).max())
            object.__setattr__(self, tag, (ev[keep], vec[:, keep]))

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    @property
    def degree(self) -> int:
        return 4 * (self.dim - 1)

    @property
    def radial(self) -> bool:
        off = lambda a: np.abs(a - np.diag(np.diag(a))).max()  # noqa: E731
        return off(self.rho) == 0 and off(self.povm) == 0

    @property
    def radius(self) -> float:
        return np.sqrt(2 * self.dim) + 3

    def scaled(self, x, p):
        x, p = _xp(x, p)
        alpha = ((x + 1j * p) / np.sqrt(2.0)).ravel()
        lam, U = self._r
        mu, W = self._e
        out = np.empty(alpha.shape)
        step = max(1, 2**22 // self.dim**2)
        for i in range(0, alpha.size, step):
            D = displacement_elements(alpha[i : i + step], self.dim, gaussian=False)
            amp = W.conj().T @ D @ U
            out[i : i + step] = np.einsum("j,kji,i->k", mu, np.abs(amp) ** 2, lam)
        return out.reshape(x.shape)


def heterodyne_filter(rho, rho_prime) -> TraceFilter:
    """Kernel of the half-beamsplitter plus dual-homodyne readout with ancilla ``rho_prime``."""
    return TraceFilter(np.asarray(rho), np.conj(np.asarray(rho_prime)) / (2 * np.pi))


def _diagonal(op, name):
    op = np.asarray(op, dtype=complex)
    off = np.abs(op - np.diag(np.diag(op))).max() if op.size else 0.0
    if off > 1e-12:
        raise ValueError(f"{name} is not diagonal in the Fock basis; use heterodyne_filter")
    return np.diag(op).real


def mixture_filter(rho, rho_prime) -> MixtureFilter:
    """Kernel for Fock-diagonal mixtures, expanded bilinearly in cross-Fock terms."""
    pm = _diagonal(rho, "rho")
    pn = _diagonal(rho_prime, "rho_prime")
    terms = tuple(
        (float(a * b), m, n)
        for m, a in enumerate(pm)
        for n, b in enumerate(pn)
        if a * b != 0
    )
    if not terms:
        raise ValueError("filter has no weight")
    return MixtureFilter(terms)


def fock_filter(n: int, x, p):
    if n < 0:
        raise ValueError("photon number must be non-negative")
    return FockFilter(n)(x, p)


def cross_fock_filter(m: int, n: int, x, p):
    if m < 0 or n < 0:
        raise ValueError("photon numbers must be non-negative")
    return CrossFockFilter(m, n)(x, p)


def filter_mass(filt: Filter, order: int | None = None) -> float:
    """Phase-space integral of a filter with a Gaussian envelope."""
    P = filt.envelope
    if P is None:
        raise ValueError("filter_mass needs an envelope backend")
    order = order or max(16, filt.degree // 2 + 8)
    cov = np.linalg.inv(P)
    pts, wts = gaussian_rule((0.0, 0.0), cov, order)
    g = filt.scaled(pts[:, 0], pts[:, 1])
    return float(2 * np.pi * np.sqrt(np.linalg.det(cov)) * np.dot(wts, g))


# -- quadrature reference ----------------------------------------------------


def _state_radius(op) -> float:
    return np.sqrt(2 * support_size(op) + 1)


def numeric_filter(rho, rho_prime, x: float, p: float, rtol: float = 1e-9) -> float:
    """Filter value from the Wigner-convolution integral, by adaptive cubature.

    Independent of the trace formula: it integrates
    ``W_rho(x' - x, p' - p) W_rho'(x', -p')`` over a box that covers both
    factors.
    """
    rho = np.asarray(rho, dtype=complex)
    rho_prime = np.asarray(rho_prime, dtype=complex)
    R = 6.0 + max(_state_radius(rho), _state_radius(rho_prime))

    def integrand(pts):
        xs, ps = pts[:, 0], pts[:, 1]
        w1 = wigner_eval(rho, xs - x, ps - p)
        w2 = wigner_eval(rho_prime, xs, -ps)
        return np.real(np.asarray(w1) * np.asarray(w2))

    lo = [min(0.0, x) - R, min(0.0, p) - R]
    hi = [max(0.0, x) + R, max(0.0, p) + R]
    res = cubature(integrand, lo, hi, rtol=rtol, atol=1e-13, max_subdivisions=20000)
    if res.status != "converged":
        raise RuntimeError(f"filter quadrature did not converge at ({x}, {p})")
    return float(res.estimate)


@dataclass(frozen=True, eq=False)
class NumericConvolutionFilter(Filter):
    """Reference backend evaluated point by point with :func:`numeric_filter`."""

    rho: np.ndarray
    rho_prime: np.ndarray
    rtol: float = 1e-9

    @property
    def radius(self) -> float:
        return 3.0 + max(_state_radius(self.rho), _state_radius(self.rho_prime))

    def __call__(self, x, p):
        x, p = _xp(x, p)
        vals = np.array(
            [numeric_filter(self.rho, self.rho_prime, a, b, self.rtol) for a, b in zip(x.ravel(), p.ravel())]
        )
        return _out(vals.reshape(x.shape))


# -- GKP lattice -------------------------------------------------------------


@dataclass(frozen=True)
class GkpFilter(Filter):
    """Ideal grid-state kernel: unit Dirac deltas on a square lattice."""

    spacing: float = SQRT_2PI
    normalizable = False

    def __call__(self, x, p):
        raise TypeError("the GKP kernel is a delta lattice; use gkp_filter_weights")


@dataclass(frozen=True)
class GkpWeights:
    points: np.ndarray
    weights: np.ndarray
    s_max: int
    tail_bound: float


def _axis_sums(c: float, v: float, a: float, s_max: int) -> tuple[float, float]:
    s = np.arange(-s_max - 60, s_max + 61)
    w = np.exp(-((c + a * s) ** 2) / v)
    inside = np.abs(s) <= s_max
    return float(w[inside].sum()), float(w[~inside].sum())


def gkp_tail(v: float, y, s_max: int, spacing: float = SQRT_2PI) -> float:
    """Fraction of prior weight on lattice points outside ``|s|, |t| <= s_max``."""
    ix, ox = _axis_sums(y[0], v, spacing, s_max)
    iy, oy = _axis_sums(y[1], v, spacing, s_max)
    return float(1 - (ix * iy) / ((ix + ox) * (iy + oy)))


def gkp_s_max(v: float, y=(0.0, 0.0), tol: float = 1e-12, spacing: float = SQRT_2PI) -> int:
    """Smallest lattice half-width whose neglected weight is below ``tol``."""
    s = max(1, int(np.ceil((abs(y[0]) + abs(y[1])) / spacing)))
    while gkp_tail(v, y, s, spacing) >= tol:
        s += 1
    return s


def gkp_filter_weights(v: float, y=(0.0, 0.0), s_max: int | None = None,
                       spacing: float = SQRT_2PI) -> GkpWeights:
    """Prior density at each lattice point ``y + spacing*(s, t)``.

    Up to normalization these are the posterior weights of the GKP
    readout conditioned on outcome ``y``.
    """
    if v <= 0:
        raise ValueError("prior variance must be positive")
    if s_max is None:
        s_max = gkp_s_max(v, y, spacing=spacing)
    if s_max < 1:
        raise ValueError("s_max must be >= 1")
    s = np.arange(-s_max, s_max + 1)
    S, T = np.meshgrid(s, s, indexing="ij")
    pts = np.stack([y[0] + spacing * S.ravel(), y[1] + spacing * T.ravel()], axis=1)
    w = np.exp(-(pts**2).sum(axis=1) / v) / (np.pi * v)
    return GkpWeights(pts, w, s_max, gkp_tail(v, y, s_max, spacing))
