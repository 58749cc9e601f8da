"""Rotation numbers, mode-locking intervals and parameter solves.

Two estimators are provided: the plain Birkhoff average
``(f^N(x0) - x0) / N`` and a weighted Birkhoff average with the smooth
bump ``w(t) = exp(-1 / (t (1 - t)))``, which converges faster than any
power of ``N`` for smooth lifts with Diophantine rotation number.

Rational rotation numbers are decided exactly rather than estimated:
``rho(f) = p/q`` iff ``f^q(x) - x - p`` has a zero, ``rho(f) < p/q`` iff
it is negative everywhere and ``rho(f) > p/q`` iff positive everywhere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from . import _kernels
from .circlemap import CircleLift
from .errors import BracketError

METHODS = ("birkhoff", "weighted_birkhoff")
_ALIASES = {"weighted": "weighted_birkhoff", "plain": "birkhoff"}


@dataclass(frozen=True)
class RotationEstimate:
    value: float
    method: str
    orbit_length: int
    error_indicator: float

    def to_dict(self):
        return {
            "value": self.value,
            "method": self.method,
            "orbit_length": self.orbit_length,
            "error_indicator": self.error_indicator,
        }


def _normalize_method(method: str) -> str:
    method = _ALIASES.get(method, method)
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    return method


def _python_average(f, x0, N, weighted):
    x = float(x0)
    num = den = 0.0
    for i in range(N):
        s = float(f.displacement(x))
        w = _kernels.bump(i / N) if weighted else 1.0
        num += w * s
        den += w
        x += s
    return num / den


def _estimate(f, method, N, x0):
    if isinstance(f, CircleLift):
        a, m, ph = f.arrays
        kernel = _kernels.weighted_birkhoff if method == "weighted_birkhoff" else _kernels.birkhoff
        return kernel(f.translation, a, m, ph, float(x0), int(N))
    return _python_average(f, x0, N, method == "weighted_birkhoff")


def rotation_number(f, method: str = "weighted_birkhoff", N: int = 10_000,
                    x0: float = 0.0) -> RotationEstimate:
    """Estimate ``rho(f)`` from an orbit of length ``N`` started at ``x0``.

    ``error_indicator`` is ``|estimate(N) - estimate(N // 2)|``; it is a
    convergence diagnostic, not an error bound.
    """
    method = _normalize_method(method)
    if N < 100:
        raise ValueError("N must be at least 100")
    if isinstance(f, CircleLift):
        f.require_certificate()
    value = _estimate(f, method, N, x0)
    half = _estimate(f, method, N // 2, x0)
    return RotationEstimate(float(value), method, int(N), float(abs(value - half)))


# -- exact comparison against a rational --------------------------------------------


def _as_fraction(r) -> Fraction:
    if isinstance(r, Fraction):
        return r
    if isinstance(r, tuple):
        return Fraction(*r)
    if isinstance(r, str):
        return Fraction(r)
    if isinstance(r, int):
        return Fraction(r)
    raise TypeError(f"expected a rational (Fraction, (p, q) or 'p/q'), got {r!r}")


def periodic_displacement(f: CircleLift, p: int, q: int, x):
    """``f^q(x) - x - p`` accumulated step by step."""
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x)
    y = x.copy()
    for _ in range(q):
        s = f.displacement(y)
        total = total + s
        y = y + s
    return total - p


def periodic_displacement_range(f: CircleLift, rational, grid: int | None = None):
    """Minimum and maximum of ``f^q(x) - x - p`` over the circle.

    Sampled on a uniform grid, then each extremum is polished by a
    bounded scalar search in the neighbouring cells.
    """
    r = _as_fraction(rational)
    p, q = r.numerator, r.denominator
    if grid is None:
        grid = max(512, 128 * q * f.dominant_frequency)
    xs = np.arange(grid) / grid
    vals = periodic_displacement(f, p, q, xs)
    h = 1.0 / grid

    def polish(j, sign):
        fun = lambda x: sign * float(periodic_displacement(f, p, q, np.array([x]))[0])
        res = minimize_scalar(fun, bounds=(xs[j] - h, xs[j] + h), method="bounded",
                              options={"xatol": 1e-14})
        return min(sign * vals[j], res.fun) * sign

    lo = polish(int(np.argmin(vals)), 1.0)
    hi = polish(int(np.argmax(vals)), -1.0)
    return float(lo), float(hi)


def compare_rotation(f: CircleLift, rational, grid: int | None = None) -> int:
    """Return -1, 0 or 1 as ``rho(f)`` is below, equal to or above ``rational``."""
    f.require_certificate()
    lo, hi = periodic_displacement_range(f, rational, grid)
    if hi < 0.0:
        return -1
    if lo > 0.0:
        return 1
    return 0


# -- parameter solves -----------------------------------------------------------------


@dataclass(frozen=True)
class ParameterSolution:
    """Result of ``solve_parameter``.

    ``locked`` is True when the solution sits inside a mode-locking
    interval; ``bracket`` is then the located interval, otherwise the
    final bisection bracket.
    """

    parameter: float
    rotation: float
    locked: bool
    bracket: tuple
    orbit_steps: int = 0


def _rational_target(target, max_q=50):
    if isinstance(target, (Fraction, tuple, str, int)):
        return _as_fraction(target)
    approx = Fraction(target).limit_denominator(max_q)
    if abs(float(approx) - target) <= 1e-13 * max(1.0, abs(target)):
        return approx
    return None


def _bisect_edge(classify, inside, outside, tol):
    # classify(p) == 0 on the inside; returns the innermost point found
    while abs(inside - outside) > tol:
        mid = 0.5 * (inside + outside)
        if mid == inside or mid == outside:
            break
        if classify(mid) == 0:
            inside = mid
        else:
            outside = mid
    return inside


def solve_parameter(family: Callable[[float], CircleLift], target, bracket, tol: float = 1e-12,
                    method: str = "weighted_birkhoff", N: int = 100_000,
                    grid: int | None = None, exact: bool | None = None) -> ParameterSolution:
    """Find a parameter value whose lift has rotation number ``target``.

    The family must be monotone in its parameter. Irrational targets are
    bisected on the sign of ``rho - target`` until the bracket is narrower
    than ``tol``. Rational targets (Fractions, or floats within 1e-13 of a
    fraction with denominator <= 50) use the exact comparison; once a
    locked parameter is hit, both edges of its locking interval are
    located and the midpoint is returned. ``exact=False`` disables the
    rational detection and ``exact=True`` requires it.
    """
    lo, hi = map(float, bracket)
    if not lo < hi:
        raise BracketError("bracket must satisfy lo < hi")
    rational = None if exact is False else _rational_target(target)
    if exact and rational is None:
        raise ValueError(f"target {target!r} is not a recognisable rational")
    if rational is not None:
        return _solve_rational(family, rational, lo, hi, tol, grid)

    method = _normalize_method(method)
    target = float(target)
    steps = 0

    def rho(p):
        nonlocal steps
        steps += N
        return _estimate(family(p), method, N, 0.0)

    r_lo, r_hi = rho(lo), rho(hi)
    if not (r_lo <= target <= r_hi):
        raise BracketError(
            f"rotation numbers {r_lo:.12g}, {r_hi:.12g} at the bracket do not straddle {target:.12g}"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if rho(mid) < target:
            lo = mid
        else:
            hi = mid
    mid = 0.5 * (lo + hi)
    return ParameterSolution(mid, float(rho(mid)), False, (lo, hi), steps)


def _solve_rational(family, rational, lo, hi, tol, grid):
    classify = lambda p: compare_rotation(family(p), rational, grid)
    c_lo, c_hi = classify(lo), classify(hi)
    if c_lo > 0 or c_hi < 0:
        raise BracketError(f"bracket [{lo}, {hi}] does not straddle rotation number {rational}")
    inside = lo if c_lo == 0 else (hi if c_hi == 0 else None)
    while inside is None:
        mid = 0.5 * (lo + hi)
        c = classify(mid)
        if c == 0:
            inside = mid
        elif c < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol and inside is None:
            inside = 0.5 * (lo + hi)
            break
    left = _bisect_edge(classify, inside, lo, tol) if c_lo != 0 else lo
    right = _bisect_edge(classify, inside, hi, tol) if c_hi != 0 else hi
    mid = 0.5 * (left + right)
    locked = classify(left) == 0 and classify(right) == 0
    return ParameterSolution(mid, float(rational), locked, (left, right), 0)


def arnold_family(lam: float, sigma: float) -> CircleLift:
    """``x + lam + sigma / (2 pi) sin(2 pi x)``; the default two-parameter family."""
    from .families import arnold
    return arnold(lam, sigma)


def mode_lock_interval(family: Callable[[float, float], CircleLift] | None, rational, sigma: float,
                       tol: float = 1e-12, bracket=None, grid: int | None = None):
    """Maximal parameter interval on which ``rho(family(lam, sigma)) = p/q``.

    Endpoints are located by bisection on the exact ``rho < p/q`` and
    ``rho > p/q`` conditions; both returned endpoints are locked. For
    ``sigma == 0`` the degenerate interval ``[p/q, p/q]`` is returned.
    """
    family = family or arnold_family
    r = _as_fraction(rational)
    if r.denominator < 1:
        raise ValueError("denominator must be positive")
    if sigma == 0:
        return (float(r), float(r))
    lo, hi = bracket if bracket is not None else (float(r) - 0.5, float(r) + 0.5)
    sol = _solve_rational(lambda lam: family(lam, sigma), r, float(lo), float(hi), tol, grid)
    return sol.bracket


def devil_staircase(family: Callable[[float], CircleLift], params, method="weighted_birkhoff",
                    N: int = 10_000) -> np.ndarray:
    """Rotation numbers along a parameter grid, in grid order."""
    method = _normalize_method(method)
    return np.array([_estimate(family(float(p)), method, N, 0.0) for p in params])


def is_near_rational(value: float, max_q: int = 50, tol: float = 1e-9):
    """Return the nearest fraction with denominator <= max_q if within tol, else None."""
    frac_part = value - math.floor(value)
    approx = Fraction(frac_part).limit_denominator(max_q)
    if abs(float(approx) - frac_part) <= tol:
        return approx + math.floor(value)
    # limit_denominator may miss a closer fraction with smaller denominator near 0/1
    for q in range(1, max_q + 1):
        p = round(frac_part * q)
        if abs(p / q - frac_part) <= tol:
            return Fraction(p, q) + math.floor(value)
    return None
