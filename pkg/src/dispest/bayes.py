"""Posterior statistics for a displacement drawn from an isotropic Gaussian prior.

The prior is ``p(xi, eta) = exp(-(xi^2 + eta^2)/v) / (pi v)`` and the
estimator is the posterior mean, so the post-selected error ``v'`` is the
trace of the posterior covariance.

Filters with a Gaussian envelope are integrated with product Gauss-Hermite
rules centred on ``prior x envelope``; because the remaining factor is a
polynomial those sums are exact up to rounding.  Radial filters evaluated at
the origin reduce to a single Gauss-Laguerre sum.  Anything else falls back
to adaptive cubature.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cubature, quad

from ._parallel import parallel_map
from ._quad import gaussian_rule, laguerre_rule
from .filters import Filter, GkpFilter, gkp_filter_weights

PY_FLOOR = 1e-300


@dataclass(frozen=True)
class Prior:
    """Isotropic Gaussian prior; ``v`` is ``<xi^2> + <eta^2>``."""

    v: float

    def __post_init__(self):
        if not (np.isfinite(self.v) and self.v > 0):
            raise ValueError(f"prior variance must be positive, got {self.v}")

    def pdf(self, xi, eta):
        return np.exp(-(np.asarray(xi) ** 2 + np.asarray(eta) ** 2) / self.v) / (np.pi * self.v)


@dataclass(frozen=True, eq=False)
class PosteriorSummary:
    mean: np.ndarray
    cov: np.ndarray
    v_prime: float
    p_y: float


@dataclass(frozen=True)
class WindowReport:
    r: float
    avg_vp: float
    p_select: float


class NullEventError(ValueError):
    """Conditioning on an outcome of (numerically) zero probability density."""


def prior_pdf(prior: Prior, xi, eta):
    return prior.pdf(xi, eta)


def _as_prior(prior) -> Prior:
    return prior if isinstance(prior, Prior) else Prior(float(prior))


def _finish(z, m1, m2, p_y) -> PosteriorSummary:
    if not p_y > PY_FLOOR:
        raise NullEventError(f"outcome has probability density {p_y:.3g}")
    mean = m1 / z
    cov = m2 / z - np.outer(mean, mean)
    cov = (cov + cov.T) / 2
    return PosteriorSummary(mean, cov, float(np.trace(cov)), float(p_y))


def _default_order(filt: Filter) -> int:
    return max(16, filt.degree // 2 + 8)


def _envelope_posterior(prior: Prior, filt: Filter, y, order: int | None) -> PosteriorSummary:
    v = prior.v
    P = np.asarray(filt.envelope, dtype=float)
    y = np.asarray(y, dtype=float)
    lam = (2 / v) * np.eye(2) + P
    C = np.linalg.inv(lam)
    m = C @ P @ y
    # prior x envelope = const * exp(-(theta - m)^T lam (theta - m) / 2)
    log_const = -0.5 * (y @ P @ y - m @ lam @ m)
    pts, wts = gaussian_rule(m, C, order or _default_order(filt))
    g = filt.scaled(pts[:, 0] - y[0], pts[:, 1] - y[1])
    wg = wts * g
    z = wg.sum()
    d = pts - m
    m1 = wg @ d
    m2 = (d * wg[:, None]).T @ d
    norm = np.exp(log_const) * 2 * np.pi * np.sqrt(np.linalg.det(C)) / (np.pi * v)
    s = _finish(z, m1, m2, norm * z)
    return PosteriorSummary(s.mean + m, s.cov, s.v_prime, s.p_y)


def _radial_origin_posterior(prior: Prior, filt: Filter, order: int | None) -> PosteriorSummary:
    c = float(filt.envelope[0, 0])
    kappa = 1 / prior.v + c / 2
    u, w = laguerre_rule(order or max(16, filt.degree // 4 + 8))
    g = filt.scaled(np.sqrt(u / kappa), np.zeros_like(u))
    wg = w * g
    z = wg.sum()
    p_y = z / (prior.v * kappa)
    if not p_y > PY_FLOOR:
        raise NullEventError(f"outcome has probability density {p_y:.3g}")
    vp = float((wg @ u) / (kappa * z))
    return PosteriorSummary(np.zeros(2), np.eye(2) * vp / 2, vp, float(p_y))


def _lattice_posterior(prior: Prior, filt: GkpFilter, y, s_max) -> PosteriorSummary:
    lw = gkp_filter_weights(prior.v, y, s_max, filt.spacing)
    w = lw.weights
    z = w.sum()
    # centre on y so the spread is computed from small offsets
    d = lw.points - np.asarray(y)
    s = _finish(z, w @ d, (d * w[:, None]).T @ d, z)
    return PosteriorSummary(s.mean + np.asarray(y), s.cov, s.v_prime, s.p_y)


def _adaptive_posterior(prior: Prior, filt: Filter, y, rtol: float) -> PosteriorSummary:
    v = prior.v
    half = 6 * max(np.sqrt(v), filt.radius)
    y = np.asarray(y, dtype=float)
    lo = np.minimum(0.0, y) - half
    hi = np.maximum(0.0, y) + half

    def integrand(pts):
        w = prior.pdf(pts[:, 0], pts[:, 1]) * filt(pts[:, 0] - y[0], pts[:, 1] - y[1])
        x, p = pts[:, 0], pts[:, 1]
        return np.stack([w, w * x, w * p, w * x * x, w * x * p, w * p * p], axis=-1)

    # odd moments can vanish, so pair rtol with an absolute floor set by the mass
    rough = cubature(lambda q: integrand(q)[:, 0], lo, hi, rtol=1e-4, atol=1e-300)
    atol = max(rtol * abs(float(rough.estimate)) * max(1.0, v), 1e-300)
    res = cubature(integrand, lo, hi, rtol=rtol, atol=atol, max_subdivisions=50000)
    if res.status != "converged":
        raise RuntimeError("posterior quadrature did not converge")
    z, mx, mp, xx, xp, pp = res.estimate
    return _finish(z, np.array([mx, mp]), np.array([[xx, xp], [xp, pp]]), z)


def posterior_summary(prior, filt: Filter, y=(0.0, 0.0), *, order: int | None = None,
                      method: str = "auto", rtol: float = 1e-9,
                      s_max: int | None = None) -> PosteriorSummary:
    """Posterior mean, covariance, ``v'`` and marginal density at outcome ``y``.

    ``method`` is one of ``"auto"``, ``"gauss"`` (envelope rule),
    ``"radial"`` (origin of a radial filter) or ``"adaptive"``.
    """
    prior = _as_prior(prior)
    y = (float(y[0]), float(y[1]))
    if isinstance(filt, GkpFilter):
        return _lattice_posterior(prior, filt, y, s_max)
    if method == "auto":
        if filt.envelope is None:
            method = "adaptive"
        elif filt.radial and y == (0.0, 0.0):
            method = "radial"
        else:
            method = "gauss"
    if method == "radial":
        P = np.asarray(filt.envelope)
        if not (filt.radial and y == (0.0, 0.0) and P[0, 1] == 0 and P[0, 0] == P[1, 1]):
            raise ValueError("radial method needs a radial filter evaluated at y = 0")
        return _radial_origin_posterior(prior, filt, order)
    if method == "gauss":
        if filt.envelope is None:
            raise ValueError("gauss method needs a filter with a Gaussian envelope")
        return _envelope_posterior(prior, filt, y, order)
    if method == "adaptive":
        return _adaptive_posterior(prior, filt, y, rtol)
    raise ValueError(f"unknown method {method!r}")


def marginal_py(prior, filt: Filter, y=(0.0, 0.0), **kw) -> float:
    """Marginal density of outcome ``y``: ``int p(theta) f(theta - y) dtheta``."""
    try:
        return posterior_summary(prior, filt, y, **kw).p_y
    except NullEventError:
        return 0.0


# -- averages over outcomes ----------------------------------------------------


def _check_outcome_filter(filt: Filter) -> None:
    if not filt.normalizable:
        raise ValueError("outcome averages need a normalizable filter")


def outcome_cutoff(prior, filt: Filter, tol: float = 1e-13) -> float:
    """Radius beyond which the outcome density carries negligible mass.

    Steps outward until ``2 pi R^2 max_angle p(R)`` drops below ``tol``; the
    outcome density has Gaussian tails so this bounds the neglected mass
    well below ``1e-10``.
    """
    prior = _as_prior(prior)
    R = np.sqrt(prior.v) + filt.radius
    angles = (0.0,) if filt.radial else np.linspace(0, 2 * np.pi, 8, endpoint=False)
    while True:
        peak = max(marginal_py(prior, filt, (R * np.cos(a), R * np.sin(a))) for a in angles)
        if 2 * np.pi * R * R * peak < tol:
            return float(R)
        R *= 1.15


def _radial_integrand(prior, filt, order):
    def f(r):
        try:
            s = posterior_summary(prior, filt, (r, 0.0), order=order, method="gauss")
        except NullEventError:
            return 0.0, 0.0
        return 2 * np.pi * r * s.p_y, 2 * np.pi * r * s.p_y * s.v_prime
    return f


def _radial_segment(f, a: float, b: float, tol: float) -> tuple[float, float]:
    kw = dict(epsabs=1e-14, epsrel=tol, limit=200)
    mass = quad(lambda r: f(r)[0], a, b, **kw)[0]
    err = quad(lambda r: f(r)[1], a, b, **kw)[0]
    return mass, err


def vp_bayes(prior, filt: Filter, *, order: int | None = None, tol: float = 1e-10) -> float:
    """Error averaged over outcomes, ``int p(y) v'(y) dy``."""
    prior = _as_prior(prior)
    _check_outcome_filter(filt)
    R = outcome_cutoff(prior, filt)
    if filt.radial:
        mass, err = _radial_segment(_radial_integrand(prior, filt, order), 0.0, R, tol)
        return err / mass

    def integrand(pts):
        out = []
        for a, b in pts:
            try:
                s = posterior_summary(prior, filt, (a, b), order=order)
                out.append((s.p_y, s.p_y * s.v_prime))
            except NullEventError:
                out.append((0.0, 0.0))
        return np.array(out)

    res = cubature(integrand, [-R, -R], [R, R], rtol=max(tol, 1e-8), atol=1e-14)
    mass, err = res.estimate
    return float(err / mass)


def window_scan(prior, filt: Filter, radii, *, order: int | None = None,
                tol: float = 1e-10) -> list[WindowReport]:
    """Window averages ``<v'>`` and selection probabilities for increasing radii."""
    prior = _as_prior(prior)
    _check_outcome_filter(filt)
    radii = np.asarray(radii, dtype=float)
    if np.any(radii <= 0) or np.any(np.diff(radii) <= 0):
        raise ValueError("window radii must be positive and strictly increasing")
    if not filt.radial:
        return [_window_polar(prior, filt, r, order, tol) for r in radii]
    f = _radial_integrand(prior, filt, order)
    edges = np.concatenate([[0.0], radii])
    segs = parallel_map(lambda ab: _radial_segment(f, ab[0], ab[1], tol), list(zip(edges[:-1], edges[1:])))
    out = []
    mass = err = 0.0
    for r, (dm, de) in zip(radii, segs):
        mass += dm
        err += de
        out.append(WindowReport(float(r), float(err / mass), float(mass)))
    return out


def _window_polar(prior, filt, r, order, tol) -> WindowReport:
    def integrand(pts):
        out = []
        for rho, phi in pts:
            try:
                s = posterior_summary(prior, filt, (rho * np.cos(phi), rho * np.sin(phi)), order=order)
                out.append((rho * s.p_y, rho * s.p_y * s.v_prime))
            except NullEventError:
                out.append((0.0, 0.0))
        return np.array(out)

    res = cubature(integrand, [0.0, 0.0], [r, 2 * np.pi], rtol=max(tol, 1e-8), atol=1e-14)
    mass, err = res.estimate
    return WindowReport(float(r), float(err / mass), float(mass))


def window_average(prior, filt: Filter, r: float, **kw) -> WindowReport:
    """Average of ``v'`` over outcomes with ``|y| <= r``, and the selection probability."""
    if not r > 0:
        raise ValueError("window radius must be positive")
    return window_scan(prior, filt, [r], **kw)[0]
