"""Heuristic diagnostics for singular conjugacies.

None of these quantities certifies singularity. Small values of the
derivative functional, or an invariant measure concentrated on a small
set, only suggest that the conjugacy to a rotation is not absolutely
continuous.
"""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .arithmetic import circle_norm
from .circlemap import CircleLift, _periodic_derivatives
from .errors import ModeLockedError
from .periodic import gauss_legendre_panels
from .rotation import RotationEstimate, is_near_rational, rotation_number

UNDERFLOW = 1e-300
LOCK_TOL = 1e-9
LOCK_MAX_Q = 50


def _nodes(quadrature: int):
    panels = max(1, int(quadrature) // 8)
    return gauss_legendre_panels(panels, 8)


def delta_metric(phi, quadrature: int = 1024) -> float:
    """``int |phi| / (1 + |phi|)`` over the circle, Gauss-Legendre with ``quadrature`` nodes."""
    xs, ws = _nodes(quadrature)
    v = np.abs(np.asarray(phi(xs), dtype=float) * np.ones_like(xs))
    return float(np.dot(ws, v / (1.0 + v)))


def _schedule(n_max: int):
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    ns, n = [], 1
    while n <= n_max:
        ns.append(n)
        n *= 2
    if ns[-1] != n_max:
        ns.append(n_max)
    return ns


def herman_profile(f: CircleLift, n_max: int, quadrature: int = 1024):
    """``[(n, delta(mean_{i<n} Df^i, 0))]`` for ``n`` in ``1, 2, 4, .., n_max``.

    ``Df^i`` is accumulated by the chain rule along orbits started at the
    quadrature nodes, with products clamped below at 1e-300.
    """
    f.require_certificate()
    schedule = _schedule(n_max)
    xs, ws = _nodes(quadrature)
    x = xs.copy()
    prod = np.ones_like(xs)
    total = np.zeros_like(xs)
    out = []
    want = iter(schedule)
    target = next(want)
    for i in range(1, n_max + 1):
        total += prod
        if i == target:
            avg = total / i
            out.append((i, float(np.dot(ws, avg / (1.0 + avg)))))
            target = next(want, None)
        if i < n_max:
            prod = np.maximum(prod * (1.0 + _periodic_derivatives(f, x, 1)[1]), UNDERFLOW)
            x = x + f.displacement(x)
    return out


def herman_functional(f: CircleLift, n_max: int = 4096, quadrature: int = 1024) -> float:
    """Running minimum of the profile: an upper bound for the infimum over all ``n``."""
    return min(v for _, v in herman_profile(f, n_max, quadrature))


@dataclass(frozen=True)
class EmpiricalConjugacy:
    """CDF ``h(j / grid)``, ``j = 0 .. grid``, of the orbit's empirical measure."""

    grid: int
    cdf: np.ndarray
    orbit_length: int
    rotation: RotationEstimate | None = None

    @classmethod
    def identity(cls, grid: int) -> "EmpiricalConjugacy":
        return cls(grid, np.arange(grid + 1) / grid, 0, None)

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.grid + 1) / self.grid

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        k = np.floor(x)
        return k + np.interp(x - k, self.nodes, self.cdf)

    def to_csv(self, dest=None) -> str:
        buf = io.StringIO()
        buf.write("x,h\n")
        for x, h in zip(self.nodes, self.cdf):
            buf.write(f"{float(x)!r},{float(h)!r}\n")
        text = buf.getvalue()
        if hasattr(dest, "write"):
            dest.write(text)
        elif dest is not None:
            with open(dest, "w", newline="") as fh:
                fh.write(text)
        return text


def empirical_conjugacy(g: CircleLift, orbit_length: int = 1_000_000, grid: int = 4096,
                        x0: float = 0.0) -> EmpiricalConjugacy:
    """Distribution function of ``{g^i(x0) mod 1 : i < orbit_length}`` on ``grid`` cells.

    Raises ``ModeLockedError`` when the rotation number is within 1e-9 of
    a fraction with denominator at most 50.
    """
    g.require_certificate()
    rho = rotation_number(g, "weighted_birkhoff", max(100, orbit_length), x0)
    near = is_near_rational(rho.value, LOCK_MAX_Q, LOCK_TOL)
    if near is not None:
        raise ModeLockedError(f"rotation number {rho.value:.12g} is within {LOCK_TOL:g} of {near}")
    a, m, ph = g.arrays
    pts = _kernels.orbit_fractions(g.translation, a, m, ph, float(x0), int(orbit_length))
    cells = np.minimum((pts * grid).astype(np.int64), grid - 1)
    counts = np.bincount(cells, minlength=grid)
    cdf = np.concatenate(([0], np.cumsum(counts))) / orbit_length
    cdf[-1] = 1.0
    return EmpiricalConjugacy(int(grid), cdf, int(orbit_length), rho)


def conjugacy_residual(h: EmpiricalConjugacy, g, alpha: float) -> float:
    """``max_j || h(g(x_j)) - h(x_j) - alpha ||`` over the grid nodes."""
    xs = np.arange(h.grid) / h.grid
    gx = np.asarray(g(xs), dtype=float)
    gx = gx - np.floor(gx)
    return float(np.max(circle_norm(h(gx) - h.cdf[:-1] - alpha)))


def singularity_indicator(h: EmpiricalConjugacy, mass: float = 0.9) -> float:
    """Total length of the fewest grid cells carrying at least ``mass`` of the measure."""
    if not 0.0 < mass < 1.0:
        raise ValueError("mass must lie in (0, 1)")
    inc = np.sort(np.diff(h.cdf))[::-1]
    k = int(np.searchsorted(np.cumsum(inc), mass - 1e-12)) + 1
    return min(k, h.grid) / h.grid

