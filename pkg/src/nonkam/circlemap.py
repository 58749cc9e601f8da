"""Lifts of circle diffeomorphisms built from finite trigonometric sums.

A lift has the form

    f(x) = x + translation + sum_j a_j sin(2 pi m_j x + phase_j)

so every derivative is available in closed form. Inverses are computed
numerically (safeguarded Newton) and their derivatives follow from the
Faa di Bruno recursion applied to ``f(f^{-1}(y)) = y``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .errors import CertificateError

TWO_PI = 2.0 * math.pi
INVERSION_TOL = 1e-14
MAX_FREQUENCY = 2**31 - 1
AMPLITUDE_FLOOR = 1e-300


@dataclass(frozen=True)
class CircleLift:
    """Lift ``x + translation + sum a sin(2 pi m x + phase)`` of a circle map.

    Parameters
    ----------
    translation : float
        Constant term of the lift.
    terms : sequence of (amplitude, frequency, phase)
        Sinusoidal terms; frequencies are positive integers.
    certify : bool
        When True (default) construction fails unless ``min_slope > 0``.
    """

    translation: float
    terms: tuple = ()
    certify: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        cleaned = []
        for term in self.terms:
            a, m, ph = term
            m_int = int(m)
            if m_int != m or m_int < 1:
                raise ValueError(f"frequency must be a positive integer, got {m!r}")
            if m_int > MAX_FREQUENCY:
                raise ValueError(f"frequency {m_int} exceeds 2**31 - 1")
            a = float(a)
            if abs(a) < AMPLITUDE_FLOOR:
                continue
            cleaned.append((a, m_int, float(ph)))
        object.__setattr__(self, "translation", float(self.translation))
        object.__setattr__(self, "terms", tuple(cleaned))
        if self.certify and self.min_slope <= 0.0:
            raise CertificateError(
                f"lift is not certified as a diffeomorphism (min_slope={self.min_slope:.6g})"
            )

    @cached_property
    def min_slope(self) -> float:
        """Certified lower bound ``1 - sum 2 pi m |a|`` on the derivative."""
        return 1.0 - sum(TWO_PI * m * abs(a) for a, m, _ in self.terms)

    @cached_property
    def amplitude_bound(self) -> float:
        """Upper bound ``sum |a|`` on ``|f(x) - x - translation|``."""
        return sum(abs(a) for a, _, _ in self.terms)

    @cached_property
    def dominant_frequency(self) -> int:
        return max((m for _, m, _ in self.terms), default=1)

    @cached_property
    def arrays(self):
        """(amplitudes, frequencies, phases) as float64 arrays for the kernels."""
        if not self.terms:
            z = np.zeros(0)
            return z, z.copy(), z.copy()
        a, m, ph = zip(*self.terms)
        return np.array(a, float), np.array(m, float), np.array(ph, float)

    @property
    def is_rigid(self) -> bool:
        return not self.terms

    def periodic_part(self, x):
        """``f(x) - x - translation``; 1-periodic."""
        x = np.asarray(x, dtype=float)
        xr = x - np.floor(x)
        out = np.zeros_like(xr)
        for a, m, ph in self.terms:
            out = out + a * np.sin(TWO_PI * m * xr + ph)
        return out

    def displacement(self, x):
        """``f(x) - x`` computed without cancellation."""
        return self.translation + self.periodic_part(x)

    def __call__(self, x):
        return eval_lift(self, x)

    def shifted(self, delta: float) -> "CircleLift":
        """The same lift with ``delta`` added to the translation."""
        return CircleLift(self.translation + delta, self.terms, certify=self.certify)

    def require_certificate(self):
        if self.min_slope <= 0.0:
            raise CertificateError(
                f"operation needs an invertible lift (min_slope={self.min_slope:.6g})"
            )


@dataclass(frozen=True)
class DerivativeStack:
    """Derivatives ``D^0 .. D^order`` at one point (or a grid of points).

    ``values`` has shape ``(order + 1,) + shape(x)``.
    """

    order: int
    values: np.ndarray

    def __getitem__(self, m):
        return self.values[m]

    def __len__(self):
        return self.order + 1


def rigid_rotation(translation: float) -> CircleLift:
    return CircleLift(translation)


def eval_lift(f: CircleLift, x):
    """Evaluate the lift; returns a float for scalar input."""
    x_arr = np.asarray(x, dtype=float)
    val = x_arr + f.displacement(x_arr)
    return float(val) if val.ndim == 0 else val


def _periodic_derivatives(f: CircleLift, x, order: int) -> np.ndarray:
    # D^k of a sin(theta) with theta = 2 pi m x + ph is a (2 pi m)^k sin(theta + k pi / 2)
    x = np.asarray(x, dtype=float)
    xr = x - np.floor(x)
    out = np.zeros((order + 1,) + x.shape)
    for a, m, ph in f.terms:
        theta = TWO_PI * m * xr + ph
        s, c = np.sin(theta), np.cos(theta)
        cycle = (s, c, -s, -c)
        w = TWO_PI * m
        scale = a
        for k in range(order + 1):
            out[k] += scale * cycle[k % 4]
            scale *= w
    return out


def derivative_stack(f: CircleLift, x, K: int) -> DerivativeStack:
    """Analytic derivatives ``D^0 f .. D^K f`` at ``x``."""
    if K < 0:
        raise ValueError("order must be non-negative")
    x_arr = np.asarray(x, dtype=float)
    vals = _periodic_derivatives(f, x_arr, K)
    vals[0] += x_arr + f.translation
    if K >= 1:
        vals[1] += 1.0
    return DerivativeStack(K, vals)


def _newton_scalar(f: CircleLift, z: float, tol: float) -> float:
    # solve d + p(z + d) = 0 for d in [-A, A]
    A = f.amplitude_bound
    lo, hi = -A, A
    d = 0.0
    for _ in range(200):
        u = z + d
        F = d
        dF = 1.0
        for a, m, ph in f.terms:
            th = TWO_PI * m * u + ph
            F += a * math.sin(th)
            dF += a * TWO_PI * m * math.cos(th)
        if abs(F) <= tol:
            # the final correction is already computed; keep it
            return d - F / dF
        if F < 0.0:
            lo = d
        else:
            hi = d
        step = d - F / dF
        if not (lo < step < hi):
            step = 0.5 * (lo + hi)
        if step == d:
            return d
        d = step
    return d


def inverse_displacement(f: CircleLift, y, tol: float = INVERSION_TOL):
    """Return ``d`` with ``f^{-1}(y) = (y - translation) + d``.

    ``|d| <= sum |a|``; working with ``d`` avoids cancellation when the
    perturbation is tiny compared to ``y``.
    """
    f.require_certificate()
    y_arr = np.asarray(y, dtype=float)
    z = y_arr - f.translation
    zr = z - np.floor(z)
    if f.is_rigid:
        return 0.0 if y_arr.ndim == 0 else np.zeros_like(y_arr)
    if y_arr.ndim == 0:
        return _newton_scalar(f, float(zr), tol)
    shape = zr.shape
    zr = zr.ravel()
    A = f.amplitude_bound
    lo = np.full(zr.shape, -A)
    hi = np.full(zr.shape, A)
    d = np.zeros_like(zr)
    active = np.ones(zr.shape, dtype=bool)
    for _ in range(200):
        u = zr[active] + d[active]
        stack = _periodic_derivatives(f, u, 1)
        F = d[active] + stack[0]
        dF = 1.0 + stack[1]
        done = np.abs(F) <= tol
        lo_a, hi_a, d_a = lo[active], hi[active], d[active]
        lo_a = np.where(F < 0.0, d_a, lo_a)
        hi_a = np.where(F > 0.0, d_a, hi_a)
        step = d_a - F / dF
        outside = ~((lo_a < step) & (step < hi_a))
        step = np.where(outside, 0.5 * (lo_a + hi_a), step)
        stalled = step == d_a
        step = np.where(done, d_a - F / dF, step)
        lo[active], hi[active], d[active] = lo_a, hi_a, step
        idx = np.flatnonzero(active)
        active[idx[done | stalled]] = False
        if not active.any():
            break
    return d.reshape(shape)


def invert(f: CircleLift, y, tol: float = INVERSION_TOL):
    """Numerical inverse ``f^{-1}(y)``.

    Newton's method started at ``y - translation`` with a bisection
    safeguard on the bracket ``y - translation +/- sum |a|``; stops when
    the residual of the periodic equation is at most ``tol``.
    """
    d = inverse_displacement(f, y, tol)
    y_arr = np.asarray(y, dtype=float)
    x = (y_arr - f.translation) + d
    return float(x) if np.ndim(x) == 0 else x


def bell_table(order: int, xs: Sequence) -> dict:
    """Partial exponential Bell polynomials ``B[n, k](x_1, ..)`` for n <= order.

    ``xs[i]`` holds ``x_{i+1}``; entries may be arrays.
    """
    B = {(0, 0): 1.0}
    for n in range(1, order + 1):
        B[(n, 0)] = 0.0
        for k in range(1, n + 1):
            acc = 0.0
            for i in range(1, n - k + 2):
                prev = B.get((n - i, k - 1))
                if prev is None:
                    continue
                acc = acc + math.comb(n - 1, i - 1) * xs[i - 1] * prev
            B[(n, k)] = acc
    return B


def faa_di_bruno(outer, inner) -> list:
    """Derivatives of a composition ``F(G(x))``.

    ``outer[k]`` is ``D^k F`` evaluated at ``G(x)`` and ``inner[k]`` is
    ``D^k G(x)`` (index 0 unused); returns ``D^m (F o G)`` for
    ``m = 0 .. len(outer) - 1``.
    """
    K = len(outer) - 1
    B = bell_table(K, [inner[i] for i in range(1, K + 1)])
    out = [outer[0]]
    for m in range(1, K + 1):
        out.append(sum(outer[k] * B[(m, k)] for k in range(1, m + 1)))
    return out


def _inverse_derivatives_from(G, K: int):
    # G[k] = D^k f at u = f^{-1}(y). The b_m = 1 Faa di Bruno term of
    # D^m (f o f^{-1}) = 0 is G[1] * H[m]; every other term involves H[1..m-1].
    H = [None, 1.0 / G[1]]
    B = {(0, 0): 1.0, (1, 0): 0.0, (1, 1): H[1]}
    for m in range(2, K + 1):
        B[(m, 0)] = 0.0
        rest = 0.0
        for k in range(2, m + 1):
            acc = 0.0
            for i in range(1, m - k + 2):
                prev = B.get((m - i, k - 1))
                if prev is None:
                    continue
                acc = acc + math.comb(m - 1, i - 1) * H[i] * prev
            B[(m, k)] = acc
            rest = rest + G[k] * acc
        H.append(-rest / G[1])
        B[(m, 1)] = H[m]
    return H


def inverse_derivative_stack(f: CircleLift, y, K: int) -> DerivativeStack:
    """Derivatives ``D^0 f^{-1} .. D^K f^{-1}`` at ``y``.

    ``D f^{-1} = 1 / (Df o f^{-1})``; higher orders solve the Faa di Bruno
    expansion of ``D^m (f o f^{-1}) = 0`` for its ``b_m = 1`` term.
    """
    if K < 1:
        raise ValueError("inverse derivative stack needs K >= 1")
    y_arr = np.asarray(y, dtype=float)
    u = invert(f, y_arr)
    G = derivative_stack(f, u, K).values
    H = _inverse_derivatives_from(G, K)
    vals = np.empty((K + 1,) + y_arr.shape)
    vals[0] = u
    for m in range(1, K + 1):
        vals[m] = H[m]
    return DerivativeStack(K, vals)


def iterate(f, x0: float, N: int) -> np.ndarray:
    """Orbit ``[x0, f(x0), .., f^N(x0)]`` as unreduced lift values."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if isinstance(f, CircleLift):
        a, m, ph = f.arrays
        return _kernels.orbit(f.translation, a, m, ph, float(x0), int(N))
    out = np.empty(N + 1)
    x = float(x0)
    out[0] = x
    for i in range(N):
        x = x + float(f.displacement(x))
        out[i + 1] = x
    return out


class CallableLift:
    """Lift given by an arbitrary callable.

    Derivatives fall back to central finite differences and inversion to
    bisection, so results are lower accuracy than for ``CircleLift``
    (``approximate`` is always True). Invertibility is only spot-checked:
    the lift must be increasing on a 4096-point grid.
    """

    approximate = True

    def __init__(self, func: Callable, displacement: Callable | None = None,
                 dominant_frequency: int = 1, step: float = 1e-5):
        self.func = func
        self._displacement = displacement
        self.dominant_frequency = dominant_frequency
        self.step = step
        grid = np.linspace(0.0, 1.0, 4097)
        vals = np.array([func(float(x)) for x in grid])
        if not np.all(np.diff(vals) > 0):
            raise CertificateError("callable lift is not increasing on the check grid")
        if abs(vals[-1] - vals[0] - 1.0) > 1e-9:
            raise CertificateError("callable lift is not a degree-one lift")

    def __call__(self, x):
        return self.func(x)

    def displacement(self, x):
        if self._displacement is not None:
            return self._displacement(x)
        return self.func(x) - x

    def derivative(self, x, k: int = 1):
        h = self.step
        if k == 1:
            return (self.func(x + h) - self.func(x - h)) / (2 * h)
        if k == 2:
            return (self.func(x + h) - 2 * self.func(x) + self.func(x - h)) / h**2
        raise ValueError("finite-difference fallback supports k <= 2")
