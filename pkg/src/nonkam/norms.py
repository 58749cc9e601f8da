"""Sup-norms, Holder seminorms and composite C^r norms on grids.

The C^r norm follows the convention

    ||phi||_{C^r} = sum_{i <= k} ||D^i phi||_inf + [D^k phi]_theta,   r = k + theta,

with the Holder term dropped for integral ``r``.

Holder seminorms cannot be computed exactly. ``holder_seminorm`` returns
a lower estimate from sampled pairs; ``holder_bounds`` adds the upper
bound ``2 ||f||^(1 - theta) ||f'||^theta``. Smallness tests should use
``cr_upper`` and largeness tests ``cr_value``.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import AliasingError
from .periodic import DerivativeView, PeriodicFunction

OVERSAMPLING = 64
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class NormReport:
    order: float
    sup_norms: list
    holder_theta: float
    holder_seminorm: float
    holder_upper: float
    cr_value: float
    cr_upper: float
    grid_size: int
    dominant_frequency: int

    def to_dict(self):
        return asdict(self)

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), sort_keys=True, **kwargs)


def _grid_size(phi, grid_size):
    freq = int(getattr(phi, "dominant_frequency", 1))
    minimum = OVERSAMPLING * freq
    if grid_size is None:
        return max(4096, minimum)
    if grid_size < minimum:
        raise AliasingError(
            f"grid of {grid_size} points undersamples frequency {freq} (need >= {minimum})"
        )
    return int(grid_size)


def _polish_max(func, centers, h, iters=60):
    # vectorised golden-section search for max |func| on [c - h, c + h]
    a = centers - h
    b = centers + h
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc = np.abs(func(c))
    fd = np.abs(func(d))
    for _ in range(iters):
        left = fc > fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = b - _GOLDEN * (b - a)
        new_d = a + _GOLDEN * (b - a)
        c_next = np.where(left, new_c, d)
        d_next = np.where(left, c, new_d)
        fc_next = np.where(left, np.nan, fd)
        fd_next = np.where(left, fc, np.nan)
        need_c = np.isnan(fc_next)
        need_d = np.isnan(fd_next)
        if need_c.any():
            fc_next[need_c] = np.abs(func(c_next[need_c]))
        if need_d.any():
            fd_next[need_d] = np.abs(func(d_next[need_d]))
        c, d, fc, fd = c_next, d_next, fc_next, fd_next
    return np.maximum(fc, fd)


def sup_norms(phi: PeriodicFunction, k: int, grid_size: int | None = None, candidates: int = 8):
    """``[||D^0 phi||, .., ||D^k phi||]``: grid maxima polished locally."""
    n = _grid_size(phi, grid_size)
    xs = np.arange(n) / n
    vals = np.abs(phi.derivatives(xs, k))
    out = []
    for i in range(k + 1):
        row = vals[i]
        if not np.any(row):
            out.append(0.0)
            continue
        top = np.argsort(row)[-candidates:]
        func = lambda x, i=i: phi.derivatives(x, i)[i]
        polished = _polish_max(func, xs[top], 1.0 / n)
        out.append(float(max(row.max(), polished.max())))
    return out


def sup_norm_derivative(phi: PeriodicFunction, k: int, grid_size: int | None = None) -> float:
    """``||D^k phi||_inf`` on a grid of at least 64 points per period of the dominant frequency."""
    return sup_norms(phi, k, grid_size)[k]


def _holder_pairs(psi, theta, xs, psi_x, h):
    return float(np.max(np.abs(psi(xs + h) - psi_x)) / h**theta)


def holder_seminorm(psi: PeriodicFunction, theta: float, grid_size: int | None = None,
                    base_points: int = 4096) -> float:
    """Lower estimate of ``sup |psi(x) - psi(y)| / ||x - y||^theta``.

    Pairs are sampled at separations ``2^-j`` (``j = 1 .. ceil(log2(64 f))``
    for dominant frequency ``f``) from ``base_points`` base points; the best
    scale is then refined on a geometric grid of separations and a base grid
    resolving the oscillation. ``theta = 1`` returns the Lipschitz constant
    ``||psi'||_inf``.
    """
    if not 0.0 < theta <= 1.0:
        raise ValueError("theta must lie in (0, 1]")
    if theta == 1.0:
        return sup_norm_derivative(psi, 1, grid_size)
    freq = int(getattr(psi, "dominant_frequency", 1))
    xs = np.arange(base_points) / base_points
    psi_x = psi(xs)
    if not np.any(psi_x - psi_x[0]):
        return 0.0
    J = max(1, math.ceil(math.log2(OVERSAMPLING * freq)))
    best, best_h = 0.0, 0.5
    for j in range(1, J + 1):
        h = 2.0 ** -j
        q = _holder_pairs(psi, theta, xs, psi_x, h)
        if q > best:
            best, best_h = q, h
    n = _grid_size(psi, grid_size)
    fine = np.arange(n) / n
    psi_fine = psi(fine)
    scan = [h for h in best_h * np.geomspace(0.5, 2.0, 33) if h <= 0.5]
    quotients = [_holder_pairs(psi, theta, fine, psi_fine, h) for h in scan]
    i = int(np.argmax(quotients))
    best = max(best, quotients[i])
    lo, hi = scan[max(i - 1, 0)], scan[min(i + 1, len(scan) - 1)]
    if hi > lo:
        res = minimize_scalar(lambda h: -_holder_pairs(psi, theta, fine, psi_fine, h),
                              bounds=(lo, hi), method="bounded", options={"xatol": 1e-10 * hi})
        best = max(best, -float(res.fun))
    return best


def interpolation_bound(psi: PeriodicFunction, theta: float, grid_size: int | None = None) -> float:
    """``2 ||psi||^(1 - theta) ||psi'||^theta``."""
    s0, s1 = sup_norms(psi, 1, grid_size)
    return 2.0 * s0 ** (1.0 - theta) * s1**theta


def holder_bounds(psi: PeriodicFunction, theta: float, grid_size: int | None = None):
    """(lower estimate, interpolation upper bound) for ``[psi]_theta``."""
    return holder_seminorm(psi, theta, grid_size), interpolation_bound(psi, theta, grid_size)


def interpolation_check(psi: PeriodicFunction, theta: float, grid_size: int | None = None) -> float:
    """Ratio of the sampled Holder seminorm to its interpolation bound (should be <= 1)."""
    if not 0.0 < theta < 1.0:
        raise ValueError("theta must lie in (0, 1)")
    bound = interpolation_bound(psi, theta, grid_size)
    if bound == 0.0:
        return 0.0
    return holder_seminorm(psi, theta, grid_size) / bound


def cr_norm(phi: PeriodicFunction, r: float, grid_size: int | None = None) -> NormReport:
    """Composite ``C^r`` norm of ``phi``."""
    if r < 0:
        raise ValueError("r must be non-negative")
    n = _grid_size(phi, grid_size)
    k = math.floor(r)
    theta = r - k
    sups = sup_norms(phi, k + (1 if theta > 0 else 0), n)
    base = sum(sups[: k + 1])
    if theta > 0:
        view = DerivativeView(phi, k)
        lower = holder_seminorm(view, theta, n)
        upper = 2.0 * sups[k] ** (1.0 - theta) * sups[k + 1] ** theta
        upper = max(upper, lower)
    else:
        lower = upper = 0.0
    return NormReport(
        order=float(r),
        sup_norms=[float(s) for s in sups[: k + 1]],
        holder_theta=float(theta),
        holder_seminorm=float(lower),
        holder_upper=float(upper),
        cr_value=float(base + lower),
        cr_upper=float(base + upper),
        grid_size=n,
        dominant_frequency=int(getattr(phi, "dominant_frequency", 1)),
    )


def asymptotic_slope(points) -> float:
    """Least-squares slope of ``log(value)`` against ``log(n)``."""
    pts = list(points)
    if len(pts) < 4:
        raise ValueError("need at least 4 points")
    ns = np.array([p[0] for p in pts], dtype=float)
    vs = np.array([p[1] for p in pts], dtype=float)
    if np.any(vs <= 0) or np.any(ns <= 0):
        raise ValueError("values and abscissae must be positive")
    slope, _ = np.polyfit(np.log(ns), np.log(vs), 1)
    return float(slope)
