"""Independent cross-checks: Monte-Carlo posteriors, a brute-force displacement
operator, and the two-mode construction behind ``v' >= 1`` at ``v = 2``.

Nothing here shares code paths with the quadrature engine beyond the filter
evaluation itself.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bayes import _as_prior, posterior_summary
from .filters import Filter, TraceFilter
from .fock import (
    TWO_MODE_NCUT,
    beamsplitter_half,
    check_povm,
    pad,
    p_op,
    partial_trace_first,
    pure_dm,
    support_size,
    x_op,
)

MIN_ESS = 100.0
JACKKNIFE_GROUPS = 100


@dataclass(frozen=True, eq=False)
class McResult:
    mean: np.ndarray
    v_prime: float
    std_err: float
    n_samples: int
    seed: int
    ess: float


@dataclass(frozen=True)
class V2CheckReport:
    sigma_trace: float
    vp_sigma: float
    x0: float
    p0: float
    vp_direct: float
    slack: float
    sigma_min_eig: float


class UnreliableEstimateError(RuntimeError):
    pass


def _weighted_vp(xs, w):
    z = w.sum()
    m = xs.T @ w / z
    d = xs - m
    return m, float((w * (d * d).sum(axis=1)).sum() / z)


def mc_posterior(prior, filt: Filter, y=(0.0, 0.0), n_samples: int = 100_000,
                 seed: int = 0) -> McResult:
    """Self-normalized importance sampling with the prior as proposal.

    The standard error comes from a grouped jackknife over 100 contiguous
    blocks of samples.
    """
    prior = _as_prior(prior)
    if n_samples < 1000:
        raise ValueError("n_samples must be at least 1000")
    if not filt.normalizable:
        raise ValueError("Monte-Carlo posterior needs a normalizable filter")
    rng = np.random.default_rng(seed)
    xs = rng.normal(scale=np.sqrt(prior.v / 2), size=(n_samples, 2))
    w = np.asarray(filt(xs[:, 0] - y[0], xs[:, 1] - y[1]), dtype=float)
    # filters can dip a hair below zero through rounding
    w = np.clip(w, 0.0, None)
    ess = w.sum() ** 2 / (w * w).sum() if w.any() else 0.0
    if ess < MIN_ESS:
        raise UnreliableEstimateError(f"effective sample size {ess:.1f} below {MIN_ESS:g}")
    mean, vp = _weighted_vp(xs, w)

    g = JACKKNIFE_GROUPS
    blocks = np.array_split(np.arange(n_samples), g)
    loo = np.empty(g)
    for i, idx in enumerate(blocks):
        keep = np.ones(n_samples, dtype=bool)
        keep[idx] = False
        loo[i] = _weighted_vp(xs[keep], w[keep])[1]
    se = float(np.sqrt((g - 1) / g * ((loo - loo.mean()) ** 2).sum()))
    return McResult(mean, vp, se, n_samples, seed, float(ess))


def displacement_oracle(xi: float, eta: float, n_cut: int = 40) -> np.ndarray:
    """``exp(i eta x - i xi p)`` on the truncated space by scaling and squaring.

    Only the upper-left block (indices up to about ``n_cut/2``) is expected to
    agree with the untruncated operator.
    """
    if n_cut > 80:
        raise ValueError("n_cut must be <= 80")
    G = 1j * eta * x_op(n_cut) - 1j * xi * p_op(n_cut)
    norm = np.abs(G).sum(axis=0).max()
    s = max(0, int(np.ceil(np.log2(norm / 0.25))) if norm > 0 else 0)
    A = G / 2**s
    out = np.eye(n_cut + 1, dtype=complex)
    term = out.copy()
    for k in range(1, 60):
        term = term @ A / k
        out = out + term
        if np.abs(term).max() < 1e-18:
            break
    else:
        raise RuntimeError("Taylor series did not converge")
    for _ in range(s):
        out = out @ out
    return out


def random_pure_state(support: int, seed: int) -> np.ndarray:
    """Normalized Gaussian random ket on ``|0>..|support-1>``."""
    rng = np.random.default_rng(seed)
    z = rng.normal(size=support) + 1j * rng.normal(size=support)
    return z / np.linalg.norm(z)


def _sigma(rho, E, n_cut: int) -> np.ndarray:
    B = beamsplitter_half(n_cut)
    joint = np.kron(pad(rho, n_cut), pad(E, n_cut))
    return partial_trace_first(B.conj().T @ joint @ B)


def v2_theorem_check(rho, E_y, n_cut: int = TWO_MODE_NCUT) -> V2CheckReport:
    """Evaluate ``v'`` at ``v = 2`` through the reduced operator ``sigma``.

    ``sigma = Tr_1[B^dag (rho x E_y) B]``.  With the posterior mean
    ``(xi0, eta0)`` and ``|phi> = alpha|0> + |1>``,
    ``v' = Tr[(|0><0| + |phi><phi|) sigma] / <0|sigma|0>``.
    """
    rho = check_povm(rho)
    E_y = check_povm(E_y)
    if support_size(rho) + support_size(E_y) - 2 > n_cut:
        raise ValueError("n_cut too small for the total photon number of rho and E_y")
    sigma = _sigma(rho, E_y, n_cut)
    s00 = sigma[0, 0].real
    if not s00 > 0:
        raise ZeroDivisionError("<0|sigma|0> vanishes; conditioning is degenerate")
    direct = posterior_summary(2.0, TraceFilter(rho, E_y))
    xi0, eta0 = direct.mean
    x0, p0 = xi0 / np.sqrt(2.0), eta0 / np.sqrt(2.0)
    # sign fixed by the beamsplitter convention x2 -> (x1 - x2)/sqrt(2)
    alpha = np.sqrt(2.0) * (x0 - 1j * p0)
    phi = np.zeros(n_cut + 1, dtype=complex)
    phi[0], phi[1] = alpha, 1.0
    num = s00 + (phi.conj() @ sigma @ phi).real
    vp = float(num / s00)
    return V2CheckReport(
        sigma_trace=float(np.trace(sigma).real),
        vp_sigma=vp,
        x0=float(x0),
        p0=float(p0),
        vp_direct=direct.v_prime,
        slack=vp - 1.0,
        sigma_min_eig=float(np.linalg.eigvalsh((sigma + sigma.conj().T) / 2).min()),
    )


def random_v2_pair(support: int, seed: int, matched: bool = True):
    """Seeded ``(rho, E_y)`` pair of pure projectors; equal when ``matched``."""
    psi = random_pure_state(support, seed)
    rho = pure_dm(psi)
    if matched:
        return rho, rho.copy()
    return rho, pure_dm(random_pure_state(support, seed + 10_000))
