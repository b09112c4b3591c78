"""Fisher-type terms of the post-selected Bayesian Cramer-Rao (Ghosh) bound.

For an outcome ``y`` with POVM element ``E_y`` the bound reads
``1/v' <= 1/v + F(y)/4``.  ``F(y)`` and its Schwarz upper bound are
integrals over the displacement of traces against
``E(theta) = D(theta)^dag E_y D(theta)``; both are evaluated here in the
Fock basis with closed-form displacement elements, so the only truncation
is that of ``E_y`` itself.

Also holds the single-photon closed forms for outcomes on the ``x`` axis,
used as golden values for the generic pipeline.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import cubature

from ._quad import gaussian_rule
from .bayes import Prior, _as_prior, posterior_summary
from .filters import FockFilter
from .fock import displacement_elements, pad, support_size, x_op, p_op

SCHWARZ = np.sqrt(2.0) + 1.0


@dataclass(frozen=True)
class GhoshReport:
    f0: float
    fisher: float
    fisher_upper: float
    vp_lower: float
    photon_bound: float
    p_y: float
    n: int


@dataclass(frozen=True)
class AppendixEPoint:
    v: float
    q: float
    vp: float
    py: float


class FisherSweepRow(NamedTuple):
    n: int
    inv_vp_minus_inv_v: float
    p_y: float


def prior_fisher(v: float) -> float:
    """Prior curvature term; constant ``4/v`` for the isotropic Gaussian prior."""
    if not v > 0:
        raise ValueError("prior variance must be positive")
    return 4.0 / v


def photon_number_bound(v: float, n: int, trace_Ey_sq: float, p_y: float) -> float:
    """Upper limit on ``1/v'`` for probes with at most ``n`` photons."""
    if p_y <= 0:
        raise ValueError("p_y must be positive")
    if v <= 0 or n < 0 or trace_Ey_sq < 0:
        raise ValueError("invalid arguments")
    return 1.0 / v + SCHWARZ * (n + 0.5) * np.sqrt(trace_Ey_sq) / p_y


class _TraceKit:
    """Traces ``Tr[X E(theta)]`` with the Gaussian factor ``exp(-|theta|^2/2)`` stripped."""

    def __init__(self, rho, E):
        rho = np.asarray(rho, dtype=complex)
        E = np.asarray(E, dtype=complex)
        Kr = support_size(rho)
        self.Ke = support_size(E)
        # q and q^2 act on rho, so keep two spare levels above its support
        self.d = d = Kr + 3
        rho_d = pad(rho[:Kr, :Kr], d - 1)
        self.E = E[: self.Ke, : self.Ke]
        self.rho = rho_d
        self.terms = []
        for q in (x_op(d - 1), p_op(d - 1)):
            qrq = q @ rho_d @ q
            sym = q @ q @ rho_d + rho_d @ q @ q
            self.terms.append((q @ rho_d - rho_d @ q, qrq, sym))

    def moved(self, theta):
        alpha = (theta[:, 0] + 1j * theta[:, 1]) / np.sqrt(2.0)
        m = max(self.Ke, self.d)
        Dn = displacement_elements(alpha, m, m, gaussian=False)[:, : self.Ke, : self.d]
        return np.einsum("kaj,ab,kbl->kjl", Dn.conj(), self.E, Dn)

    @staticmethod
    def tr(X, Et):
        return np.einsum("lj,kjl->k", X, Et)

    def polynomial_parts(self, theta):
        """``Tr[rho E]`` and the two quotient-free sums, all polynomial in ``theta``."""
        Et = self.moved(theta)
        base = self.tr(self.rho, Et).real
        lower = np.zeros_like(base)
        upper = np.zeros_like(base)
        for _, qrq, sym in self.terms:
            a = self.tr(qrq, Et).real
            b = self.tr(sym, Et).real
            lower += b - 2 * a
            upper += b + 2 * a
        return base, lower, upper

    def quotient(self, theta):
        """``sum_i |Tr[[q_i, rho] E]|^2 / Tr[rho E]``, capped by ``4 Tr[q_i rho q_i E]``."""
        Et = self.moved(theta)
        base = self.tr(self.rho, Et).real
        out = np.zeros_like(base)
        for comm, qrq, _ in self.terms:
            T = self.tr(comm, Et)
            cap = 4 * self.tr(qrq, Et).real
            with np.errstate(divide="ignore", invalid="ignore"):
                quot = np.abs(T) ** 2 / base
            out += np.where(base > 0, np.minimum(quot, cap), np.maximum(cap, 0.0))
        return out


def _fisher_integrals(prior: Prior, rho, E, order: int | None, rtol: float = 1e-10):
    """Return ``(p_y, F, F_upper)``.

    Everything except the quotient term is a polynomial times
    ``prior x exp(-|theta|^2/2)`` and is summed exactly by Gauss-Hermite.
    The quotient is only piecewise smooth where ``Tr[rho E(theta)]`` has
    zeros, so it is integrated adaptively.
    """
    kit = _TraceKit(rho, E)
    v = prior.v
    kappa = 1.0 / v + 0.5
    cov = np.eye(2) / (2 * kappa)
    order = order or (kit.Ke + kit.d) + 8
    pts, wts = gaussian_rule((0.0, 0.0), cov, order)
    base, lower, upper = kit.polynomial_parts(pts)
    # prior x exp(-|theta|^2/2) = scale x N(0, cov) density
    scale = (np.pi / kappa) / (np.pi * v)
    p_y = scale * np.dot(wts, base)
    if not p_y > 0:
        raise ValueError("outcome has zero probability")

    R = np.sqrt(40.0 / kappa) + np.sqrt(2.0 * (kit.Ke + kit.d))
    weight = lambda t: np.exp(-kappa * (t**2).sum(axis=1)) / (np.pi * v)  # noqa: E731
    res = cubature(lambda t: weight(t) * kit.quotient(t), [-R, -R], [R, R],
                   rtol=rtol, atol=rtol * p_y, max_subdivisions=20000)
    if res.status != "converged":
        raise RuntimeError("Fisher quadrature did not converge")
    F = (float(res.estimate) + scale * np.dot(wts, lower)) / p_y
    Fu = scale * np.dot(wts, upper) / p_y
    return float(p_y), float(F), float(Fu)


def fisher_F(prior, rho, E_y, *, order: int | None = None) -> float:
    """Likelihood curvature term ``F(y)`` for probe ``rho`` and POVM element ``E_y``."""
    return _fisher_integrals(_as_prior(prior), rho, E_y, order)[1]


def fisher_upper_bound(prior, rho, E_y, *, order: int | None = None) -> float:
    """Schwarz-simplified upper bound on ``F(y)``."""
    return _fisher_integrals(_as_prior(prior), rho, E_y, order)[2]


def ghosh_report(prior, rho, E_y, *, n: int | None = None, order: int | None = None) -> GhoshReport:
    prior = _as_prior(prior)
    p_y, F, Fu = _fisher_integrals(prior, rho, E_y, order)
    f0 = prior_fisher(prior.v)
    n = support_size(rho) - 1 if n is None else n
    trE2 = float(np.real(np.trace(np.asarray(E_y) @ np.asarray(E_y))))
    return GhoshReport(
        f0=f0,
        fisher=F,
        fisher_upper=Fu,
        vp_lower=4.0 / (f0 + F),
        photon_bound=photon_number_bound(prior.v, n, trE2, p_y),
        p_y=p_y,
        n=n,
    )


# -- single-photon closed forms --------------------------------------------------


def _quartic(v, q):
    return 4 * q**4 + 4 * q**2 * v**2 - 16 * q**2 + v**4 + 4 * v**3 + 8 * v**2 + 16 * v + 16


def appendix_e_vp(v: float, q: float) -> float:
    """Closed-form ``v'`` for ``rho = rho' = |1><1|`` at outcome ``(q, 0)``."""
    if not v > 0:
        raise ValueError("prior variance must be positive")
    num = 2 * v * (
        16 * q**8 + 32 * q**6 * v**2 - 128 * q**6 + 32 * q**4 * v**4 + 48 * q**4 * v**3
        - 96 * q**4 * v**2 + 64 * q**4 * v + 384 * q**4 + 16 * q**2 * v**6 + 80 * q**2 * v**5
        + 160 * q**2 * v**4 + 256 * q**2 * v**3 + 256 * q**2 * v**2 - 256 * q**2 * v
        - 512 * q**2 + 3 * v**8 + 20 * v**7 + 56 * v**6 + 112 * v**5 + 192 * v**4
        + 192 * v**3 + 128 * v**2 + 256 * v + 256
    )
    den = (v + 2) * _quartic(v, q) ** 2
    if den == 0:
        raise ZeroDivisionError("closed form has a pole at this (v, q)")
    return num / den


def appendix_e_py(v: float, q: float) -> float:
    """Closed-form outcome density ``p(q, 0)`` for ``rho = rho' = |1><1|``."""
    if not v > 0:
        raise ValueError("prior variance must be positive")
    den = np.pi * (v**5 + 10 * v**4 + 40 * v**3 + 80 * v**2 + 80 * v + 32)
    return float(_quartic(v, q) * np.exp(-(q**2) / (v + 2)) / den)


def appendix_e_point(v: float, q: float) -> AppendixEPoint:
    return AppendixEPoint(v, q, appendix_e_vp(v, q), appendix_e_py(v, q))


def appendix_e_small_v(q: float) -> tuple[float, float]:
    """``v -> 0`` limits of ``1/v' - 1/v`` and of ``p(q, 0)``."""
    s = q**2 - 2
    if s == 0:
        raise ZeroDivisionError("q^2 = 2 is a pole of the information limit")
    gain = (q**4 - 4 * q**2 + 12) / (2 * s**2)
    py = s**2 * np.exp(-(q**2) / 2) / (8 * np.pi)
    return float(gain), float(py)


def appendix_e_limit_product(epsilon: float) -> float:
    """``(1/v' - 1/v) p(q,0)/sqrt(Tr E^2)`` in the ``v -> 0`` limit at ``q^2 = 2 + epsilon``.

    Uses ``Tr E_y^2 = 1/(2 pi)^2`` for the pure heterodyne element.
    """
    if epsilon == 0:
        raise ZeroDivisionError("epsilon = 0 sits on the pole")
    gain, py = appendix_e_small_v(np.sqrt(2 + epsilon))
    return gain * py * 2 * np.pi


# -- Fock sweep ------------------------------------------------------------------


def fisher_sweep(v: float, n_max: int) -> list[FisherSweepRow]:
    """``1/v' - 1/v`` and overlap probability for ``rho = E_y = |n><n|``, ``n = 0..n_max``.

    Outcomes are conditioned at the likelihood maximum (zero displacement).
    ``E_y`` is the bare projector, so ``p_y`` is a dimensionless probability.
    """
    if not v > 0:
        raise ValueError("prior variance must be positive")
    if not 0 <= n_max <= 50:
        raise ValueError("n_max must lie in [0, 50]")
    rows = []
    for n in range(n_max + 1):
        s = posterior_summary(v, FockFilter(n))
        rows.append(FisherSweepRow(n, 1 / s.v_prime - 1 / v, 2 * np.pi * s.p_y))
    return rows
