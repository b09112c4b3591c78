"""Gaussian-weighted product rules shared by the posterior and Fisher code."""
from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import roots_hermite, roots_laguerre


@lru_cache(maxsize=32)
def _hermite(order: int):
    z, w = roots_hermite(order)
    return z, w / np.sqrt(np.pi)


@lru_cache(maxsize=32)
def laguerre_rule(order: int):
    """Nodes and weights for ``int_0^inf e^{-u} g(u) du``."""
    return roots_laguerre(order)


def gaussian_rule(mean, cov, order: int):
    """Tensor Gauss-Hermite rule for the normal law ``N(mean, cov)`` in 2D.

    Returns ``(points, weights)`` with ``points`` of shape ``(order**2, 2)``
    and weights summing to one.  Exact for polynomials of degree
    ``<= 2*order - 1`` in each coordinate.
    """
    z, w = _hermite(order)
    L = np.linalg.cholesky(np.asarray(cov, dtype=float))
    Z = np.stack(np.meshgrid(z, z, indexing="ij"), axis=-1).reshape(-1, 2)
    pts = np.asarray(mean, dtype=float) + np.sqrt(2.0) * Z @ L.T
    wts = np.outer(w, w).ravel()
    return pts, wts
