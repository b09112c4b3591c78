"""Covariance calculus for pure Gaussian probes and measurements.

All covariances are 2x2 real symmetric positive-definite arrays in
quadrature-variance units; vacuum is ``I/2``.  Means never enter the
error, so they are not tracked.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SqueezeScanPoint:
    a: float
    v: float
    v_prime: float


def as_covariance(m, tol: float = 1e-12) -> np.ndarray:
    """Validate a 2x2 covariance and return it as a float array."""
    m = np.asarray(m, dtype=float)
    if m.shape != (2, 2):
        raise ValueError(f"covariance must be 2x2, got shape {m.shape}")
    if abs(m[0, 1] - m[1, 0]) > tol:
        raise ValueError("covariance is not symmetric")
    m = (m + m.T) / 2
    if np.linalg.eigvalsh(m).min() <= 0:
        raise ValueError("covariance is not positive definite")
    return m


def pure_gaussian_cov(a: float = 1.0, angle: float = 0.0) -> np.ndarray:
    """Wigner covariance of a pure Gaussian state with eigenvalues ``a/2, 1/(2a)``."""
    if a <= 0:
        raise ValueError("squeezing parameter must be positive")
    c, s = np.cos(angle), np.sin(angle)
    R = np.array([[c, -s], [s, c]])
    return R @ np.diag([a / 2, 1 / (2 * a)]) @ R.T


def _check_v(v: float) -> None:
    if not v > 0:
        raise ValueError(f"prior variance must be positive, got {v}")


def classical_bound(v: float) -> float:
    """Smallest error reachable with coherent probes: ``2v/(v+2)``."""
    _check_v(v)
    return 2 * v / (v + 2)


def gaussian_bound(v: float) -> float:
    """Smallest error reachable with Gaussian states and operations."""
    _check_v(v)
    return v / 2 if v < 2 else 2 * v / (v + 2)


def prior_cov(v: float) -> np.ndarray:
    _check_v(v)
    return (v / 2) * np.eye(2)


def gaussian_posterior_cov(sigma_rho, sigma_E, v: float) -> np.ndarray:
    """Posterior covariance when the likelihood is Gaussian.

    The likelihood covariance is ``sigma_rho + sigma_E`` and combines with
    the isotropic prior ``(v/2) I`` as a harmonic sum.
    """
    like = as_covariance(sigma_rho) + as_covariance(sigma_E)
    prec = np.linalg.inv(like) + np.linalg.inv(prior_cov(v))
    out = np.linalg.inv(prec)
    return (out + out.T) / 2


def squeeze_scan_vp(a: float, v: float) -> float:
    """Error for a saturating Gaussian likelihood with eigenvalues ``a, 1/a``."""
    if a <= 0:
        raise ValueError("a must be positive")
    _check_v(v)
    return 1 / (2 / v + a) + 1 / (2 / v + 1 / a)


def squeeze_scan(a_values, v: float) -> list[SqueezeScanPoint]:
    return [SqueezeScanPoint(float(a), float(v), squeeze_scan_vp(a, v)) for a in a_values]


def det_inequality_holds(A, B, tol: float = 1e-12) -> tuple[bool, float]:
    """Check ``det(A+B) >= det A + det B + 2 sqrt(det A det B)``.

    Returns ``(holds, slack)`` where slack is left minus right side.
    """
    A = as_covariance(A)
    B = as_covariance(B)
    dA, dB = np.linalg.det(A), np.linalg.det(B)
    slack = float(np.linalg.det(A + B) - dA - dB - 2 * np.sqrt(dA * dB))
    return slack >= -tol, slack
