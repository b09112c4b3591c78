"""Parameter sweeps behind the figure-style tables: v' curves, loss thresholds,
post-selection windows."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from ._parallel import parallel_map
from .bayes import outcome_cutoff, posterior_summary, vp_bayes, window_scan
from .filters import Filter, GkpFilter, mixture_filter
from .fock import lossy_single_photon
from .gaussian import classical_bound, gaussian_bound

BOUNDS = {"gaussian": gaussian_bound, "classical": classical_bound}

# v grid for the threshold search; stops short of v = 2 where every pure
# Fock curve touches both bounds
THRESHOLD_V = np.geomspace(1e-7, 1.99, 300)
BEATS = -1e-12


@dataclass(frozen=True)
class LossThreshold:
    bound: str
    l_max: float
    resolution: float


def curve_rows(filt: Filter, v_values, outcome=("point", (0.0, 0.0)), tol: float = 1e-10):
    """Rows ``(v, vp, p_y)`` for a fixed outcome, or ``(v, vp)`` for the Bayes error.

    The grid-state kernel is unnormalizable, so its rows carry no ``p_y``.
    """
    kind, vals = outcome
    if kind == "bayes":
        return parallel_map(lambda v: (float(v), vp_bayes(v, filt, tol=tol)), v_values)
    if kind != "point":
        raise ValueError("curve rows need a point outcome or 'bayes'")

    def row(v):
        s = posterior_summary(v, filt, vals)
        if isinstance(filt, GkpFilter):
            return (float(v), s.v_prime)
        return (float(v), s.v_prime, s.p_y)

    return parallel_map(row, v_values)


def lossy_filter(l: float) -> Filter:
    rho = lossy_single_photon(l)
    return mixture_filter(rho, rho)


def lossy_vp(l: float, v: float) -> float:
    """``v'`` at the centre outcome for a single photon with loss ``l`` on both sides."""
    return posterior_summary(v, lossy_filter(l)).v_prime


def loss_rows(l_values, v_values):
    grid = [(float(l), float(v)) for l in l_values for v in v_values]
    return parallel_map(lambda lv: (lv[0], lv[1], lossy_vp(*lv)), grid)


def loss_margin(l: float, bound: str = "gaussian", v_grid=THRESHOLD_V) -> tuple[float, float]:
    """Smallest relative margin ``vp/bound - 1`` over ``v``, and where it occurs."""
    b = BOUNDS[bound]
    filt = lossy_filter(l)
    v_grid = np.asarray(v_grid)
    m = np.array([posterior_summary(v, filt).v_prime / b(v) - 1 for v in v_grid])
    i = int(m.argmin())
    lo, hi = np.log(v_grid[max(i - 1, 0)]), np.log(v_grid[min(i + 1, len(v_grid) - 1)])
    best, where = m[i], v_grid[i]
    if hi > lo:
        res = minimize_scalar(
            lambda t: posterior_summary(np.exp(t), filt).v_prime / b(np.exp(t)) - 1,
            bounds=(lo, hi), method="bounded", options={"xatol": 1e-6},
        )
        if res.fun < best:
            best, where = res.fun, float(np.exp(res.x))
    return float(best), float(where)


def loss_threshold(bound: str = "gaussian", resolution: float = 1e-4,
                   v_grid=THRESHOLD_V) -> LossThreshold:
    """Largest loss rate at which some ``v`` still beats the bound, by bisection."""
    if bound not in BOUNDS:
        raise ValueError(f"bound must be one of {sorted(BOUNDS)}")
    beats = lambda l: loss_margin(l, bound, v_grid)[0] < BEATS  # noqa: E731
    lo, hi = 0.0, 1.0
    if not beats(lo):
        return LossThreshold(bound, float("nan"), resolution)
    if beats(hi):
        return LossThreshold(bound, 1.0, resolution)
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if beats(mid):
            lo = mid
        else:
            hi = mid
    return LossThreshold(bound, lo, hi - lo)


def default_radii(v: float, filt: Filter, points: int = 40) -> np.ndarray:
    """Log-spaced window radii up to the outcome cutoff radius."""
    R = outcome_cutoff(v, filt)
    return np.geomspace(0.02, R, points)


def window_rows(filt: Filter, v_values, radii=None, tol: float = 1e-10):
    """Rows ``(v, r, p_select, avg_vp)``."""
    rows = []
    for v in v_values:
        rs = default_radii(v, filt) if radii is None else radii
        for w in window_scan(v, filt, rs, tol=tol):
            rows.append((float(v), w.r, w.p_select, w.avg_vp))
    return rows
