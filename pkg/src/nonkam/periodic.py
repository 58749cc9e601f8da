"""1-periodic functions with analytic derivative access.

Anything exposing ``__call__(x)``, ``derivatives(x, k)`` (an array of
shape ``(k + 1,) + shape(x)``) and ``dominant_frequency`` can be fed to
the norm estimators.
"""
from __future__ import annotations

import math

import numpy as np

TWO_PI = 2.0 * math.pi


class PeriodicFunction:
    dominant_frequency: int = 1

    def __call__(self, x):
        return self.derivatives(x, 0)[0]

    def derivatives(self, x, k: int) -> np.ndarray:
        raise NotImplementedError

    def derivative(self, k: int) -> "DerivativeView":
        """The ``k``-th derivative as a periodic function in its own right."""
        return DerivativeView(self, k)


class TrigSum(PeriodicFunction):
    """``sum a sin(2 pi m x + phase)`` plus an optional constant."""

    def __init__(self, terms=(), constant: float = 0.0):
        self.terms = tuple((float(a), int(m), float(ph)) for a, m, ph in terms)
        self.constant = float(constant)
        self.dominant_frequency = max((m for _, m, _ in self.terms), default=1)

    def derivatives(self, x, k: int) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        xr = x - np.floor(x)
        out = np.zeros((k + 1,) + x.shape)
        out[0] += self.constant
        for a, m, ph in self.terms:
            theta = TWO_PI * m * xr + ph
            s, c = np.sin(theta), np.cos(theta)
            cycle = (s, c, -s, -c)
            scale = a
            for j in range(k + 1):
                out[j] += scale * cycle[j % 4]
                scale *= TWO_PI * m
        return out


class Zero(TrigSum):
    def __init__(self):
        super().__init__(())


class DerivativeView(PeriodicFunction):
    def __init__(self, base: PeriodicFunction, order: int):
        self.base = base
        self.order = order
        self.dominant_frequency = base.dominant_frequency

    def derivatives(self, x, k: int) -> np.ndarray:
        return self.base.derivatives(x, self.order + k)[self.order:]


def gauss_legendre_panels(panels: int, nodes: int = 8):
    """Composite Gauss-Legendre nodes and weights on [0, 1)."""
    t, w = np.polynomial.legendre.leggauss(nodes)
    left = np.arange(panels) / panels
    xs = (left[:, None] + (t[None, :] + 1.0) / (2 * panels)).ravel()
    ws = np.tile(w / (2 * panels), panels)
    return xs, ws


def mean_value(func, panels: int = 10_000, nodes: int = 8) -> float:
    """``int_0^1 func`` by composite Gauss-Legendre quadrature."""
    xs, ws = gauss_legendre_panels(panels, nodes)
    return float(np.dot(ws, func(xs)))
