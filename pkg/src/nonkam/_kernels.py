"""Compiled orbit kernels for trigonometric-sum lifts.

Every kernel tracks a lift value as ``k + r`` with ``k`` integral and
``r`` in [0, 1); the perturbation is periodic, so only ``r`` enters the
sine evaluations and long orbits do not lose fractional precision.
"""
import math

import numpy as np
from numba import njit

TWO_PI = 2.0 * math.pi


@njit(cache=True, nogil=True)
def _step(t, amps, freqs, phases, r):
    s = t
    for j in range(amps.shape[0]):
        s += amps[j] * math.sin(TWO_PI * freqs[j] * r + phases[j])
    return s


@njit(cache=True, nogil=True)
def advance(t, amps, freqs, phases, x0, n):
    k = math.floor(x0)
    r = x0 - k
    for _ in range(n):
        r += _step(t, amps, freqs, phases, r)
        fl = math.floor(r)
        k += fl
        r -= fl
    return k, r


@njit(cache=True, nogil=True)
def orbit(t, amps, freqs, phases, x0, n):
    out = np.empty(n + 1)
    k = math.floor(x0)
    r = x0 - k
    out[0] = x0
    for i in range(n):
        r += _step(t, amps, freqs, phases, r)
        fl = math.floor(r)
        k += fl
        r -= fl
        out[i + 1] = k + r
    return out


@njit(cache=True, nogil=True)
def orbit_fractions(t, amps, freqs, phases, x0, n):
    out = np.empty(n)
    k = math.floor(x0)
    r = x0 - k
    for i in range(n):
        out[i] = r
        r += _step(t, amps, freqs, phases, r)
        r -= math.floor(r)
    return out


@njit(cache=True, nogil=True)
def birkhoff(t, amps, freqs, phases, x0, n):
    k0 = math.floor(x0)
    r0 = x0 - k0
    k, r = advance(t, amps, freqs, phases, x0, n)
    return ((k - k0) + (r - r0)) / n


@njit(cache=True, nogil=True)
def bump(s):
    if s <= 0.0 or s >= 1.0:
        return 0.0
    return math.exp(-1.0 / (s * (1.0 - s)))


@njit(cache=True, nogil=True)
def weighted_birkhoff(t, amps, freqs, phases, x0, n):
    # Kahan-compensated sums of w(k/n) * step and w(k/n)
    r = x0 - math.floor(x0)
    num = 0.0
    num_c = 0.0
    den = 0.0
    den_c = 0.0
    for i in range(n):
        s = _step(t, amps, freqs, phases, r)
        w = bump(i / n)
        y = w * s - num_c
        tmp = num + y
        num_c = (tmp - num) - y
        num = tmp
        y = w - den_c
        tmp = den + y
        den_c = (tmp - den) - y
        den = tmp
        r += s
        r -= math.floor(r)
    return num / den


@njit(cache=True, nogil=True)
def weighted_birkhoff_grid(t_values, amps_scaled, freqs, phases, n):
    # one rotation number per (translation, amplitude scale) pair; used by sweeps
    out = np.empty(t_values.shape[0])
    for i in range(t_values.shape[0]):
        out[i] = weighted_birkhoff(t_values[i], amps_scaled[i], freqs, phases, 0.0, n)
    return out
