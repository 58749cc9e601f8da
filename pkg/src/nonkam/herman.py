"""Herman's correspondence between circle maps and invariant graphs.

For a twist map ``F(x, y) = (x + beta + y + phi(x), y + phi(x))`` the
graph of ``Psi`` is invariant iff ``g = Id + beta + Psi + phi`` is a
circle homeomorphism with ``(g + g^{-1}) / 2 = Id + phi / 2``. Starting
from ``g`` this gives

    phi = g + g^{-1} - 2 Id,    Psi = Id - g^{-1} - beta.

Both are realised as closures over the analytic ``g`` and its numerical
inverse; with ``g^{-1}(x) = x - t + d(x)`` (``t`` the translation of
``g``) they reduce to ``phi = p + d`` and ``Psi = t - beta - d`` where
``p`` is the periodic part of ``g``, so nothing of size ``x`` cancels.
"""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .circlemap import CircleLift, _inverse_derivatives_from, _periodic_derivatives, \
    inverse_displacement
from .periodic import PeriodicFunction, TrigSum, mean_value

ZERO_MEAN_TOL = 1e-10


class HermanPerturbation(PeriodicFunction):
    """``phi = g + g^{-1} - 2 Id`` for a certified lift ``g``."""

    def __init__(self, g: CircleLift):
        g.require_certificate()
        self.g = g
        self.dominant_frequency = g.dominant_frequency

    def derivatives(self, x, k: int) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        g = self.g
        d = inverse_displacement(g, x)
        out = np.empty((k + 1,) + x.shape)
        out[0] = g.periodic_part(x) + d
        if k == 0:
            return out
        u = (x - g.translation) + d
        P = _periodic_derivatives(g, x, k)
        Pu = _periodic_derivatives(g, u, k)
        G = [None, 1.0 + Pu[1]] + [Pu[j] for j in range(2, k + 1)]
        H = _inverse_derivatives_from(G, k)
        # D(g^{-1}) - 1 = -p'(u) / g'(u)
        out[1] = P[1] - Pu[1] / G[1]
        for j in range(2, k + 1):
            out[j] = P[j] + H[j]
        return out


class InvariantGraph(PeriodicFunction):
    """``Psi = Id - g^{-1} - beta``; its graph is invariant for ``F_beta^phi``."""

    def __init__(self, g: CircleLift, beta: float):
        g.require_certificate()
        self.source_g = g
        self.beta = float(beta)
        self.dominant_frequency = g.dominant_frequency

    def derivatives(self, x, k: int) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        g = self.source_g
        d = inverse_displacement(g, x)
        out = np.empty((k + 1,) + x.shape)
        out[0] = (g.translation - self.beta) - d
        if k == 0:
            return out
        u = (x - g.translation) + d
        Pu = _periodic_derivatives(g, u, k)
        G = [None, 1.0 + Pu[1]] + [Pu[j] for j in range(2, k + 1)]
        H = _inverse_derivatives_from(G, k)
        out[1] = Pu[1] / G[1]
        for j in range(2, k + 1):
            out[j] = -H[j]
        return out

    def samples(self, grid_size: int | None = None):
        n = grid_size or default_grid(self.dominant_frequency)
        xs = np.arange(n) / n
        return xs, self(xs)


@dataclass(frozen=True)
class TwistMap:
    """``(x, y) -> (x + beta + y + phi(x), y + phi(x))``."""

    beta: float
    phi: PeriodicFunction

    def __post_init__(self):
        m = mean_value(self.phi, panels=max(10_000, 4 * self.phi.dominant_frequency))
        if abs(m) > ZERO_MEAN_TOL:
            raise ValueError(f"phi must have zero mean, got {m:.3e}")

    def __call__(self, x, y):
        return twist_apply(self, (x, y))


def default_grid(frequency: int) -> int:
    return max(10_000, 64 * int(frequency))


def phi_from_g(g: CircleLift) -> HermanPerturbation:
    return HermanPerturbation(g)


def graph_from_g(g: CircleLift, beta: float) -> InvariantGraph:
    return InvariantGraph(g, beta)


def twist_apply(T: TwistMap, point):
    x, y = point
    ph = T.phi(x)
    return x + T.beta + y + ph, y + ph


def twist_jacobian(T: TwistMap, x):
    """Analytic Jacobian ``[[1 + phi', 1], [phi', 1]]`` at ``x``."""
    dphi = T.phi.derivatives(x, 1)[1]
    return np.array([[1.0 + dphi, np.ones_like(dphi)], [dphi, np.ones_like(dphi)]])


def verify_invariance(T: TwistMap, G: InvariantGraph, grid_size: int | None = None) -> float:
    """Largest vertical distance of ``T(x, Psi(x))`` from the graph of ``Psi``."""
    n = grid_size or default_grid(max(T.phi.dominant_frequency, G.dominant_frequency))
    xs = np.arange(n) / n
    ph = T.phi(xs)
    ps = G(xs)
    gx = xs + T.beta + ps + ph
    return float(np.max(np.abs(G(gx) - ps - ph)))


def circle_factor(T: TwistMap, G: InvariantGraph):
    """The map ``x -> x + beta + Psi(x) + phi(x)`` induced on the invariant graph."""
    from .circlemap import CallableLift

    def disp(x):
        return T.beta + G(x) + T.phi(x)

    return CallableLift(lambda x: x + disp(x), displacement=disp,
                        dominant_frequency=G.dominant_frequency)


def export_graph_csv(dest, T: TwistMap, G: InvariantGraph, grid_size: int | None = None,
                     metadata: dict | None = None):
    """Write ``x, phi, psi`` samples as CSV with ``# key=value`` header lines.

    ``dest`` is a path or a text stream; returns the CSV text.
    """
    n = grid_size or 64 * G.dominant_frequency
    xs = np.arange(n) / n
    buf = io.StringIO()
    meta = {"beta": T.beta}
    meta.update(metadata or {})
    for key in meta:
        buf.write(f"# {key}={_fmt(meta[key])}\n")
    buf.write("x,phi,psi\n")
    for x, ph, ps in zip(xs, T.phi(xs), G(xs)):
        buf.write(f"{_fmt(x)},{_fmt(ph)},{_fmt(ps)}\n")
    text = buf.getvalue()
    if hasattr(dest, "write"):
        dest.write(text)
    elif dest is not None:
        with open(dest, "w", newline="") as fh:
            fh.write(text)
    return text


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def zero_perturbation() -> TrigSum:
    return TrigSum(())
